use num_traits::{One, Zero};

use super::{CheckResult, Instance};
use crate::chain::{rat, ChainDescriptor, Rational, SectorIndex};
use crate::error::Result;
use crate::forms::{
    anticommutator, intersection_matrix_int, p_polynomial, picard_lefschetz_sign, x_level_partial,
    x_value, x_value_level,
};
use crate::matrix::IntMatrix;

pub fn verify_exact_suite(c: &ChainDescriptor) -> Result<Vec<CheckResult>> {
    Ok(run(&Instance::new(c)?))
}

pub(super) fn run(inst: &Instance) -> Vec<CheckResult> {
    vec![
        chi_unipotent(inst),
        chi_equals_x(inst),
        x_recursion(&inst.chain),
        q_eta_anticommute(inst),
        eta_symmetric_invertible(inst),
        serre_periodic(inst),
        det_chi(inst),
        psi_bijection(&inst.chain),
        omega_duality(&inst.chain),
        intersection_formula(inst),
    ]
}

fn chi_unipotent(inst: &Instance) -> CheckResult {
    CheckResult::exact("chi_unipotent", inst.chi.is_upper_unitriangular(), None)
}

fn chi_equals_x(inst: &Instance) -> CheckResult {
    let mu = inst.chi.size();
    for i in 0..mu {
        for j in i..mu {
            let x = x_value(&inst.chain, i as i64 - j as i64);
            if *inst.chi.get(i, j) != x {
                return CheckResult::exact(
                    "chi_equals_x",
                    false,
                    Some(format!("entry ({}, {}) differs from X_{}", i + 1, j + 1, i as i64 - j as i64)),
                );
            }
        }
    }
    CheckResult::exact("chi_equals_x", true, None)
}

fn x_recursion(c: &ChainDescriptor) -> CheckResult {
    let n = c.n();
    if n < 2 {
        return CheckResult::skipped("x_recursion", "needs n ≥ 2");
    }
    let p = p_polynomial(c);
    let an = rat(1, c.a(n) as i128);
    for l in 0..c.order() as i64 {
        let lower = x_value_level(c, n - 2, l);
        let folded = Rational::from_integer(p.fold(c.d(n - 1), -l));
        let rebuilt = x_level_partial(c, l) + &an * &lower;
        if folded != lower || rebuilt != x_value(c, l) {
            return CheckResult::exact("x_recursion", false, Some(format!("fails at l = {l}")));
        }
    }
    CheckResult::exact("x_recursion", true, None)
}

fn q_eta_anticommute(inst: &Instance) -> CheckResult {
    let ok = anticommutator(&inst.qtilde, &inst.eta).is_zero();
    CheckResult::exact("q_eta_anticommute", ok, None)
}

fn eta_symmetric_invertible(inst: &Instance) -> CheckResult {
    let sym = inst.eta.is_symmetric();
    let det = inst.eta.determinant();
    let detail = (!sym || det.is_zero()).then(|| format!("symmetric: {sym}, det: {det}"));
    CheckResult::exact("eta_symmetric_invertible", sym && !det.is_zero(), detail)
}

fn integral_chi(inst: &Instance) -> Option<IntMatrix> {
    inst.chi.to_int()
}

fn serre_periodic(inst: &Instance) -> CheckResult {
    let name = "serre_periodic";
    let Some(chi) = integral_chi(inst).filter(|m| m.is_upper_unitriangular()) else {
        return CheckResult::exact(name, false, Some("χ is not integral unitriangular".into()));
    };
    let result = crate::forms::serre_from_euler(&chi)
        .and_then(|s| s.pow(2 * inst.chain.order()));
    match result {
        Ok(p) => CheckResult::exact(name, p == IntMatrix::identity(chi.size()), None),
        Err(e) => CheckResult::failed(name, &e),
    }
}

fn det_chi(inst: &Instance) -> CheckResult {
    let det = inst.chi.determinant();
    let ok = det.is_one();
    CheckResult::exact("det_chi", ok, (!ok).then(|| format!("det = {det}")))
}

fn psi_bijection(c: &ChainDescriptor) -> CheckResult {
    let name = "psi_bijection";
    let (_, top) = c.monomial_basis();
    let mut images = Vec::with_capacity(top.len());
    for k in &top {
        match c.psi(k) {
            Ok(kappa) => {
                if c.psi_inverse(kappa).as_ref() != Ok(k) {
                    return CheckResult::exact(name, false, Some(format!("ψ^-1(ψ({k})) ≠ {k}")));
                }
                images.push(kappa);
            }
            Err(e) => return CheckResult::failed(name, &e),
        }
    }
    images.sort_unstable();
    CheckResult::exact(name, images == c.top_set(c.n()), None)
}

fn omega_duality(c: &ChainDescriptor) -> CheckResult {
    let name = "omega_duality";
    let n = c.n();
    let dn = c.order();
    for kappa in c.top_set(n) {
        let w = c.kappa_exponents_unchecked(n, kappa).0;
        let dual = c.kappa_exponents_unchecked(n, dn - kappa).0;
        if w.iter().zip(&dual).any(|(a, b)| a + b != Rational::one()) {
            return CheckResult::exact(name, false, Some(format!("ω_{{d-κ}} ≠ 1 - ω_κ at κ = {kappa}")));
        }
        let from_monomial = c
            .psi_inverse(kappa)
            .and_then(|k| c.exponents_for_monomial(&k));
        let from_kappa = c.exponents_for_kappa(&SectorIndex::new(n, kappa));
        if from_monomial.map(|e| e.0) != from_kappa.map(|e| e.0) {
            return CheckResult::exact(name, false, Some(format!("ω_ψ^-1(κ) ≠ ω_κ at κ = {kappa}")));
        }
    }
    CheckResult::exact(name, true, None)
}

fn intersection_formula(inst: &Instance) -> CheckResult {
    let name = "intersection_formula";
    let c = &inst.chain;
    let n = c.n();
    let Some(chi) = integral_chi(inst) else {
        return CheckResult::exact(name, false, Some("χ is not integral".into()));
    };
    let iform = match intersection_matrix_int(c) {
        Ok(m) => m,
        Err(e) => return CheckResult::failed(name, &e),
    };
    let s = picard_lefschetz_sign(n);
    let t = if n % 2 == 1 { 1 } else { -1 };
    let mu = chi.size();
    let mut ok = true;
    for i in 0..mu {
        for j in 0..mu {
            ok &= iform.get(i, j) == s * (chi.get(i, j) + t * chi.get(j, i));
            ok &= iform.get(i, j) == t * iform.get(j, i);
        }
        ok &= iform.get(i, i) == if n % 2 == 1 { 2 * s } else { 0 };
    }
    CheckResult::exact(name, ok, None)
}
