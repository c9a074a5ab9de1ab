use rug::{Assign, Complex, Float};

use super::{CheckResult, Instance, Job};
use crate::chain::{rat, ChainDescriptor, Rational};
use crate::error::Result;
use crate::forms::{p_polynomial, x_level_partial, x_value};
use crate::numerics::quadrature::half_line_integral;
use crate::numerics::{
    central_charge, coefficient_lemma_residual, modulus, orthant_integral_closed_form,
    orthant_integral_dual_form, orthant_integral_quadrature, reflection_residual, PrecContext,
};

pub const QUADRATURE_TOL_1D: f64 = 1e-6;
pub const QUADRATURE_TOL_2D: f64 = 1e-4;

pub fn verify_gamma_oracles(c: &ChainDescriptor, ctx: &PrecContext) -> Result<Vec<CheckResult>> {
    let inst = Instance::new(c)?;
    let out = jobs(&inst, ctx).iter().flat_map(|j| j()).collect();
    Ok(out)
}

pub(super) fn jobs<'a>(inst: &'a Instance, ctx: &'a PrecContext) -> Vec<Job<'a>> {
    let c = &inst.chain;
    vec![
        Box::new(move || vec![gamma_reflection(c, ctx)]),
        Box::new(move || vec![orthant_closed_vs_dual(c, ctx)]),
        Box::new(move || vec![orthant_quadrature(c, ctx)]),
        Box::new(move || vec![coefficient_lemma(c, ctx)]),
        Box::new(move || vec![n1_period_cross_check(inst, ctx)]),
        Box::new(move || vec![x_dft(c, ctx)]),
        Box::new(move || vec![gepner_rotation(c, ctx)]),
    ]
}

fn max_float(acc: Option<Float>, v: Float) -> Option<Float> {
    match acc {
        Some(a) if a >= v => Some(a),
        _ => Some(v),
    }
}

fn gamma_reflection(c: &ChainDescriptor, ctx: &PrecContext) -> CheckResult {
    let dn = c.order() as i128;
    let step = ((dn - 1) / 100).max(1);
    let mut worst = None;
    let mut p = 1;
    while p < dn {
        worst = max_float(worst, reflection_residual(&rat(p, dn), ctx));
        p += step;
    }
    let worst = worst.unwrap_or_else(|| ctx.float(0.0));
    CheckResult::numeric("gamma_reflection", &worst, &ctx.gamma_tolerance())
}

fn orthant_closed_vs_dual(c: &ChainDescriptor, ctx: &PrecContext) -> CheckResult {
    let name = "orthant_closed_vs_dual";
    let mut worst = None;
    for k in c.monomial_basis().1 {
        let x = orthant_integral_closed_form(c, &k, ctx);
        let y = orthant_integral_dual_form(c, &k, ctx);
        match (x, y) {
            (Ok(x), Ok(y)) => worst = max_float(worst, (x - y).abs()),
            (Err(e), _) | (_, Err(e)) => return CheckResult::failed(name, &e),
        }
    }
    CheckResult::numeric(name, &worst.unwrap_or_else(|| ctx.float(0.0)), &ctx.tolerance())
}

fn orthant_quadrature(c: &ChainDescriptor, ctx: &PrecContext) -> CheckResult {
    let name = "orthant_quadrature";
    let tol = match c.n() {
        1 => QUADRATURE_TOL_1D,
        2 => QUADRATURE_TOL_2D,
        _ => return CheckResult::skipped(name, "quadrature oracle covers n ≤ 2"),
    };
    let mut worst: f64 = 0.0;
    for k in c.monomial_basis().1 {
        let closed = match orthant_integral_closed_form(c, &k, ctx) {
            Ok(v) => v.to_f64(),
            Err(e) => return CheckResult::failed(name, &e),
        };
        let quad = match orthant_integral_quadrature(c, &k, tol / 4.0) {
            Ok(v) => v,
            Err(e) => return CheckResult::failed(name, &e).with_detail(format!("k = {k}: {e}")),
        };
        worst = worst.max((quad - closed).abs() / closed);
    }
    CheckResult::numeric_f64(name, worst, tol)
}

fn coefficient_lemma(c: &ChainDescriptor, ctx: &PrecContext) -> CheckResult {
    let name = "coefficient_lemma";
    let mut worst = None;
    for kappa in c.top_set(c.n()) {
        match coefficient_lemma_residual(c, kappa, ctx) {
            Ok(r) => worst = max_float(worst, r),
            Err(e) => return CheckResult::failed(name, &e),
        }
    }
    CheckResult::numeric(name, &worst.unwrap_or_else(|| ctx.float(0.0)), &ctx.tolerance())
}

/// For `n = 1`, `ch_{Γ,κj} = a(1 - e[κ/a]) e[κ(j-1)/a] ∫_0^∞ e^{-x^a} x^{a-1-κ} dx`
/// with the integral taken by quadrature.
fn n1_period_cross_check(inst: &Instance, ctx: &PrecContext) -> CheckResult {
    let name = "n1_period_cross_check";
    let c = &inst.chain;
    if c.n() != 1 {
        return CheckResult::skipped(name, "applies to n = 1");
    }
    let ch = match inst.ch_gamma(ctx) {
        Ok(m) => m,
        Err(e) => return CheckResult::failed(name, &e),
    };
    let a = c.a(1);
    let mut worst: f64 = 0.0;
    for (row, kappa) in c.top_set(1).into_iter().enumerate() {
        let integral = match half_line_integral(a, a - 1 - kappa, QUADRATURE_TOL_1D / 4.0) {
            Ok((v, _)) => v,
            Err(e) => return CheckResult::failed(name, &e),
        };
        let front = (ctx.one() - ctx.root_of_unity(&rat(kappa as i128, a as i128))) * a;
        for j in 0..c.rank() {
            let phase = ctx.root_of_unity(&rat((kappa as usize * j) as i128, a as i128));
            let expected = Complex::with_val(ctx.bits(), &front * &phase) * integral;
            let actual = ch.get(row, j);
            let err = modulus(&Complex::with_val(ctx.bits(), actual - &expected)) / modulus(&expected);
            worst = worst.max(err.to_f64());
        }
    }
    CheckResult::numeric_f64(name, worst, QUADRATURE_TOL_1D)
}

/// `X_l` recovered numerically from `p_n` at the `d_n`-th roots of unity, both in full
/// and restricted to frequencies `κ ∈ I'_n`, against the exact values.
fn x_dft(c: &ChainDescriptor, ctx: &PrecContext) -> CheckResult {
    let n = c.n();
    let dn = c.order() as usize;
    let roots: Vec<Complex> = (0..dn)
        .map(|r| ctx.root_of_unity(&rat(r as i128, dn as i128)))
        .collect();
    let p = p_polynomial(c);
    let coeffs: Vec<(usize, Float)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
        .map(|(e, v)| (e, ctx.float(num_traits::ToPrimitive::to_f64(v).expect("small coefficient"))))
        .collect();
    let mut tmp = ctx.zero();
    let values: Vec<Complex> = (0..dn)
        .map(|kappa| {
            let mut acc = ctx.zero();
            for (e, cf) in &coeffs {
                tmp.assign(&roots[(kappa * e) % dn] * cf);
                acc += &tmp;
            }
            acc
        })
        .collect();
    let in_top = |kappa: usize| kappa % c.a(n) as usize != 0;
    let mut worst = ctx.float(0.0);
    for l in 0..dn {
        let mut full = ctx.zero();
        let mut part = ctx.zero();
        for kappa in 0..dn {
            tmp.assign(&values[kappa] * &roots[(kappa * l) % dn]);
            full += &tmp;
            if kappa != 0 && in_top(kappa) {
                part += &tmp;
            }
        }
        full /= dn as u32;
        part /= dn as u32;
        let exact_full = ctx.rational(&x_value(c, l as i64));
        let e1 = modulus(&(full - &exact_full));
        if e1 > worst {
            worst = e1;
        }
        if n >= 2 {
            let exact_part: Rational = x_level_partial(c, l as i64);
            let e2 = modulus(&(part - ctx.rational(&exact_part)));
            if e2 > worst {
                worst = e2;
            }
        }
    }
    CheckResult::numeric("x_dft", &worst, &ctx.tolerance())
}

/// `Z(E_{j+1}) = e[∓1/d_n] Z(E_j)` and `|Z(E_j)|` constant, for `j = 1..μ̃`.
fn gepner_rotation(c: &ChainDescriptor, ctx: &PrecContext) -> CheckResult {
    let name = "gepner_rotation";
    let dn = c.order() as i128;
    let rho = ctx.root_of_unity(&rat(if c.n() % 2 == 1 { -1 } else { 1 }, dn));
    let count = c.rank() as i64 + 1;
    let mut zs = Vec::with_capacity(count as usize);
    for j in 1..=count {
        match central_charge(c, j, ctx) {
            Ok(z) => zs.push(z),
            Err(e) => return CheckResult::failed(name, &e),
        }
    }
    let m0 = modulus(&zs[0]);
    let mut worst = ctx.float(0.0);
    for w in zs.windows(2) {
        let d = modulus(&Complex::with_val(ctx.bits(), &w[1] - Complex::with_val(ctx.bits(), &rho * &w[0])));
        let dm = (modulus(&w[1]) - &m0).abs();
        for e in [d, dm] {
            if e > worst {
                worst = e;
            }
        }
    }
    CheckResult::numeric(name, &worst, &ctx.tolerance())
}
