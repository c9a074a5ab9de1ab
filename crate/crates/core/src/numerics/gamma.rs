use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rug::{Assign, Complex, Float};

use super::{modulus, PrecComplexMatrix, PrecContext};
use crate::chain::{rat, ChainDescriptor, Monomial, Rational, SectorIndex};
use crate::error::{Error, Result};
use crate::forms::{check_rank, p_polynomial, sector_labels, DEFAULT_MAX_RANK};
use crate::matrix::position_labels;

/// `Γ(q)` for rational `0 < q < 2`, checked against Euler's reflection formula.
pub fn gamma_rational(q: &Rational, ctx: &PrecContext) -> Result<Float> {
    if !q.is_positive() || *q >= rat(2, 1) {
        return Err(Error::InvalidArgument(format!(
            "Gamma argument {q} outside (0, 2)"
        )));
    }
    let g = ctx.rational(q).gamma();
    if !g.is_finite() {
        return Err(Error::PrecisionUnachievable {
            what: format!("Gamma({q})"),
            digits: ctx.digits(),
        });
    }
    if !q.is_one() {
        let residual = reflection_residual_with(q, &g, ctx);
        if residual > ctx.gamma_tolerance() {
            return Err(Error::PrecisionUnachievable {
                what: format!("Gamma({q})"),
                digits: ctx.digits(),
            });
        }
    }
    Ok(g)
}

/// `|Γ(q)Γ(1-q) sin(πq)/π - 1|` for `0 < q < 1`.
pub fn reflection_residual(q: &Rational, ctx: &PrecContext) -> Float {
    let g = ctx.rational(q).gamma();
    reflection_residual_with(q, &g, ctx)
}

fn reflection_residual_with(q: &Rational, gamma_q: &Float, ctx: &PrecContext) -> Float {
    // for 1 < q < 2 test Γ(q-1) = Γ(q)/(q-1) instead
    let (x, gx) = if *q > Rational::one() {
        let x = q - Rational::one();
        let gx = Float::with_val(ctx.bits(), gamma_q / ctx.rational(&x));
        (x, gx)
    } else {
        (q.clone(), gamma_q.clone())
    };
    let xf = ctx.rational(&x);
    let g1 = Float::with_val(ctx.bits(), 1 - &xf).gamma();
    let s = (xf * ctx.pi()).sin();
    let lhs = gx * g1 * s / ctx.pi();
    (lhs - 1u32).abs()
}

/// Memoized Gamma values at one precision.
#[derive(Debug, Clone)]
pub struct GammaCache {
    ctx: PrecContext,
    values: HashMap<Rational, Float>,
}

impl GammaCache {
    pub fn new(ctx: PrecContext) -> Self {
        GammaCache {
            ctx,
            values: HashMap::new(),
        }
    }

    pub fn get(&mut self, q: &Rational) -> Result<Float> {
        if let Some(v) = self.values.get(q) {
            return Ok(v.clone());
        }
        let v = gamma_rational(q, &self.ctx)?;
        self.values.insert(q.clone(), v.clone());
        Ok(v)
    }
}

/// `c^{(m)}_κ` at any level `m`, with the parity rule of `m`.
pub(crate) fn level_constant(
    c: &ChainDescriptor,
    level: usize,
    kappa: u64,
    cache: &mut GammaCache,
    ctx: &PrecContext,
) -> Result<Complex> {
    let w = c.kappa_exponents_unchecked(level, kappa).0;
    let mut gamma = Float::with_val(ctx.bits(), 1);
    for wl in &w {
        gamma *= cache.get(&(Rational::one() - wl))?;
    }
    let mut z = Complex::with_val(ctx.bits(), (gamma, 0));
    // odd level: odd positions 1, 3, ...; even level: even positions 2, 4, ...
    let first = if level % 2 == 1 { 0 } else { 1 };
    for wl in w.iter().skip(first).step_by(2) {
        let factor = ctx.one() - ctx.root_of_unity(wl);
        z *= factor;
    }
    Ok(z)
}

/// `c^{(n)}_κ` for a top-level sector `s = (n, κ)`.
pub fn c_kappa(c: &ChainDescriptor, s: &SectorIndex, ctx: &PrecContext) -> Result<Complex> {
    if s.level != c.n() {
        return Err(Error::WrongLevel {
            label: s.to_string(),
            expected: c.n(),
        });
    }
    if !c.contains(s) {
        return Err(Error::IndexNotInSet {
            label: s.to_string(),
        });
    }
    let mut cache = GammaCache::new(*ctx);
    level_constant(c, s.level, s.kappa, &mut cache, ctx)
}

/// Rows of `ch^{(m)}_Γ` over `I_m`, evaluated at the given columns, by the recursion
/// `[c_κ e[±ω_{κ,1}(j-1)] ; 2πi · ch^{(m-2)}_Γ]`.
fn ch_rows(
    c: &ChainDescriptor,
    level: usize,
    columns: &[i64],
    cache: &mut GammaCache,
    ctx: &PrecContext,
) -> Result<Vec<Vec<Complex>>> {
    if level == 0 {
        return Ok(vec![vec![ctx.one(); columns.len()]]);
    }
    let mut rows = Vec::new();
    for kappa in c.top_set(level) {
        let base = level_constant(c, level, kappa, cache, ctx)?;
        let mut step = c.kappa_exponents_unchecked(level, kappa).0[0].clone();
        if level % 2 == 0 {
            step = -step;
        }
        let row = columns
            .iter()
            .map(|&j| {
                let phase = ctx.root_of_unity(&(&step * Rational::from_integer((j - 1).into())));
                Complex::with_val(ctx.bits(), &base * &phase)
            })
            .collect();
        rows.push(row);
    }
    if level >= 2 {
        let two_pi_i = ctx.two_pi_i();
        for mut row in ch_rows(c, level - 2, columns, cache, ctx)? {
            for z in &mut row {
                *z *= &two_pi_i;
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Column `ch^{(n)}_{Γ,j}` over `I_n`.
pub fn ch_gamma_column(c: &ChainDescriptor, j: i64, ctx: &PrecContext) -> Result<Vec<Complex>> {
    let mut cache = GammaCache::new(*ctx);
    let rows = ch_rows(c, c.n(), &[j], &mut cache, ctx)?;
    Ok(rows.into_iter().map(|mut r| r.remove(0)).collect())
}

pub(crate) fn ch_gamma_matrix_unchecked(
    c: &ChainDescriptor,
    ctx: &PrecContext,
) -> Result<PrecComplexMatrix> {
    check_rank(c, DEFAULT_MAX_RANK)?;
    let mu = c.rank();
    let columns: Vec<i64> = (1..=mu as i64).collect();
    let mut cache = GammaCache::new(*ctx);
    let rows = ch_rows(c, c.n(), &columns, &mut cache, ctx)?;
    let mut m = PrecComplexMatrix::zeros(sector_labels(c), position_labels(mu), ctx);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, z) in row.into_iter().enumerate() {
            m.set(i, j, z);
        }
    }
    Ok(m)
}

/// `ch^{(n)}_Γ = (ch_{Γ,1}, …, ch_{Γ,μ̃})`, rejected when numerically singular.
pub fn ch_gamma_matrix(c: &ChainDescriptor, ctx: &PrecContext) -> Result<PrecComplexMatrix> {
    let m = ch_gamma_matrix_unchecked(c, ctx)?;
    m.lu(&ctx.tolerance())?;
    Ok(m)
}

fn gamma_product(ws: &[Rational], cache: &mut GammaCache) -> Result<Float> {
    let mut acc: Option<Float> = None;
    for w in ws {
        let g = cache.get(w)?;
        acc = Some(match acc {
            None => g,
            Some(a) => a * g,
        });
    }
    Ok(acc.unwrap_or_else(|| Float::with_val(53, 1)))
}

/// `∫_{(R≥0)^n} e^{-f̃_n} x^k dx = (1/d_n) Π_l Γ(ω_{k,l})`.
pub fn orthant_integral_closed_form(
    c: &ChainDescriptor,
    k: &Monomial,
    ctx: &PrecContext,
) -> Result<Float> {
    if !c.in_top_basis(k) {
        return Err(Error::MonomialOutOfRange {
            monomial: k.to_string(),
        });
    }
    let w = c.exponents_for_monomial(k)?.0;
    let mut cache = GammaCache::new(*ctx);
    let p = gamma_product(&w, &mut cache)?;
    Ok(Float::with_val(ctx.bits(), p / c.order()))
}

/// The same integral as `(1/d_n) Π_l Γ(1 - ω_{d_n - ψ(k), l})`.
pub fn orthant_integral_dual_form(
    c: &ChainDescriptor,
    k: &Monomial,
    ctx: &PrecContext,
) -> Result<Float> {
    let kappa = c.psi(k)?;
    let dual = c.kappa_exponents_unchecked(c.n(), c.order() - kappa).0;
    let ws: Vec<Rational> = dual.iter().map(|w| Rational::one() - w).collect();
    let mut cache = GammaCache::new(*ctx);
    let p = gamma_product(&ws, &mut cache)?;
    Ok(Float::with_val(ctx.bits(), p / c.order()))
}

/// Central charge `Z(E_j)` of the `j`-th exceptional object.
pub fn central_charge(c: &ChainDescriptor, j: i64, ctx: &PrecContext) -> Result<Complex> {
    let n = c.n();
    let dn = c.order() as i128;
    let weights = c.rational_weights();
    let sign: i128 = if n % 2 == 1 { -1 } else { 1 };
    let mut z = ctx.root_of_unity(&rat(sign * (j as i128 - 1), dn));
    let first = if n % 2 == 1 { 0 } else { 1 };
    for w in weights.iter().skip(first).step_by(2) {
        z *= ctx.one() - ctx.root_of_unity(&-w.clone());
    }
    let zero = Monomial(vec![0; n]);
    z *= orthant_integral_closed_form(c, &zero, ctx)?;
    z *= ctx.two_pi_i_power(-(n as i32));
    Ok(z)
}

/// `|LHS - RHS|` of the coefficient identity
/// `(2π)^{-n} c_κ e[½Σ(ω-½)] (1/d_n) c_{d_n-κ} = (1/d_n) p_n(e[(-1)^{n-1} ω_{κ,1}])`.
pub fn coefficient_lemma_residual(
    c: &ChainDescriptor,
    kappa: u64,
    ctx: &PrecContext,
) -> Result<Float> {
    let n = c.n();
    let s = SectorIndex::new(n, kappa);
    if !c.contains(&s) {
        return Err(Error::IndexNotInSet {
            label: s.to_string(),
        });
    }
    let dn = c.order();
    let mut cache = GammaCache::new(*ctx);
    let ck = level_constant(c, n, kappa, &mut cache, ctx)?;
    let cd = level_constant(c, n, dn - kappa, &mut cache, ctx)?;
    let w = c.kappa_exponents_unchecked(n, kappa).0;
    let mut shift = Rational::zero();
    for wl in &w {
        shift += wl - rat(1, 2);
    }
    shift /= rat(2, 1);
    let mut lhs = Complex::with_val(ctx.bits(), &ck * &cd);
    lhs *= ctx.root_of_unity(&shift);
    lhs /= ctx.two_pi_half_power(2 * n as i32);
    lhs /= dn;

    let mut step = w[0].clone();
    if n % 2 == 0 {
        step = -step;
    }
    let p = p_polynomial(c);
    let mut rhs = ctx.zero();
    let mut tmp = ctx.zero();
    for (e, coeff) in p.coeffs().iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let phase = ctx.root_of_unity(&(&step * Rational::from_integer((e as i64).into())));
        let cf = Float::with_val(ctx.bits(), rug::Integer::from_str_radix(&coeff.to_string(), 10).expect("integer"));
        tmp.assign(&phase * &cf);
        rhs += &tmp;
    }
    rhs /= dn;
    Ok(modulus(&(lhs - rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::new_chain;

    fn ctx() -> PrecContext {
        PrecContext::new(60).unwrap()
    }

    fn close(a: &Float, expected: &str, tol: f64) {
        let e: f64 = expected.parse().unwrap();
        assert!((a.to_f64() - e).abs() < tol, "{a} vs {expected}");
    }

    #[test]
    fn gamma_anchor_values() {
        let ctx = ctx();
        let half = gamma_rational(&rat(1, 2), &ctx).unwrap();
        let sqrt_pi = ctx.pi().sqrt();
        assert!((half - sqrt_pi).abs() < ctx.tolerance());
        let one = gamma_rational(&rat(1, 1), &ctx).unwrap();
        assert_eq!(one, 1);
        let quarter = gamma_rational(&rat(1, 4), &ctx).unwrap();
        assert!(quarter.to_string_radix(10, Some(24)).starts_with("3.62560990822190831193"));
        let late = gamma_rational(&rat(5, 3), &ctx).unwrap();
        let early = gamma_rational(&rat(2, 3), &ctx).unwrap();
        let diff = late - early * ctx.rational(&rat(2, 3));
        assert!(diff.abs() < ctx.tolerance());
    }

    #[test]
    fn gamma_domain_errors() {
        let ctx = ctx();
        for q in [rat(0, 1), rat(2, 1), rat(-1, 2), rat(5, 2)] {
            assert!(matches!(
                gamma_rational(&q, &ctx),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn c_kappa_examples() {
        let ctx = ctx();
        let tau = ctx.tolerance();
        let sqrt_pi = ctx.pi().sqrt();
        let a2 = new_chain(&[2]).unwrap();
        let z = c_kappa(&a2, &SectorIndex::new(1, 1), &ctx).unwrap();
        let expect = Complex::with_val(ctx.bits(), (Float::with_val(ctx.bits(), &sqrt_pi * 2u32), 0));
        assert!(modulus(&(z - &expect)) < tau);

        let a3 = new_chain(&[3]).unwrap();
        let z = c_kappa(&a3, &SectorIndex::new(1, 1), &ctx).unwrap();
        let g = gamma_rational(&rat(2, 3), &ctx).unwrap();
        let root3 = Float::with_val(ctx.bits(), 3).sqrt() / 2u32;
        let expect = Complex::with_val(ctx.bits(), (Float::with_val(ctx.bits(), &g * 3u32) / 2u32, -(g * root3)));
        assert!(modulus(&(z - expect)) < tau);

        let a22 = new_chain(&[2, 2]).unwrap();
        let z = c_kappa(&a22, &SectorIndex::new(2, 1), &ctx).unwrap();
        let g34 = gamma_rational(&rat(3, 4), &ctx).unwrap();
        let expect = Complex::with_val(ctx.bits(), (g34 * sqrt_pi * 2u32, 0));
        assert!(modulus(&(z - expect)) < tau);
    }

    #[test]
    fn c_kappa_errors() {
        let ctx = ctx();
        let c = new_chain(&[2, 2]).unwrap();
        assert!(matches!(
            c_kappa(&c, &SectorIndex::new(0, 1), &ctx),
            Err(Error::WrongLevel { expected: 2, .. })
        ));
        assert!(matches!(
            c_kappa(&c, &SectorIndex::new(2, 2), &ctx),
            Err(Error::IndexNotInSet { .. })
        ));
    }

    #[test]
    fn columns_and_matrix() {
        let ctx = ctx();
        let tau = ctx.tolerance();
        let c = new_chain(&[2]).unwrap();
        let two_sqrt_pi = ctx.pi().sqrt() * 2u32;
        let col1 = ch_gamma_column(&c, 1, &ctx).unwrap();
        let col2 = ch_gamma_column(&c, 2, &ctx).unwrap();
        assert!((Float::with_val(ctx.bits(), col1[0].real() - &two_sqrt_pi)).abs() < tau);
        assert!((Float::with_val(ctx.bits(), col2[0].real() + &two_sqrt_pi)).abs() < tau);

        let c = new_chain(&[2, 2]).unwrap();
        let m = ch_gamma_matrix(&c, &ctx).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 3));
        assert_eq!(m.row_labels()[2], "0:1");
        for j in 0..3 {
            assert!(modulus(&(m.get(2, j).clone() - ctx.two_pi_i())) < tau);
        }
    }

    #[test]
    fn columns_are_periodic() {
        let ctx = ctx();
        let c = new_chain(&[3, 2]).unwrap();
        let dn = c.order() as i64;
        for j in [1, 2, 5] {
            let a = ch_gamma_column(&c, j, &ctx).unwrap();
            let b = ch_gamma_column(&c, j + dn, &ctx).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!(modulus(&Complex::with_val(ctx.bits(), x - y)) < ctx.tolerance());
            }
        }
    }

    #[test]
    fn orthant_examples() {
        let ctx = ctx();
        let c = new_chain(&[2]).unwrap();
        let v = orthant_integral_closed_form(&c, &Monomial(vec![0]), &ctx).unwrap();
        close(&v, "0.88622692545", 1e-10);
        let c = new_chain(&[2, 2]).unwrap();
        let v = orthant_integral_closed_form(&c, &Monomial(vec![0, 0]), &ctx).unwrap();
        close(&v, "1.60655656", 1e-7);
        let c = new_chain(&[3]).unwrap();
        let v = orthant_integral_closed_form(&c, &Monomial(vec![1]), &ctx).unwrap();
        close(&v, "0.45137265", 1e-7);
        assert!(matches!(
            orthant_integral_closed_form(&c, &Monomial(vec![2]), &ctx),
            Err(Error::MonomialOutOfRange { .. })
        ));
    }

    #[test]
    fn dual_form_agrees() {
        let ctx = ctx();
        for a in [vec![2], vec![5], vec![2, 3], vec![3, 2, 2], vec![2, 3, 2, 2]] {
            let c = new_chain(&a).unwrap();
            for k in c.monomial_basis().1 {
                let x = orthant_integral_closed_form(&c, &k, &ctx).unwrap();
                let y = orthant_integral_dual_form(&c, &k, &ctx).unwrap();
                assert!((x - y).abs() < ctx.tolerance(), "{a:?} {k}");
            }
        }
    }

    #[test]
    fn central_charge_examples() {
        let ctx = ctx();
        let tau = ctx.tolerance();
        let c = new_chain(&[2]).unwrap();
        let z1 = central_charge(&c, 1, &ctx).unwrap();
        let z2 = central_charge(&c, 2, &ctx).unwrap();
        close(&modulus(&z1), "0.28209479", 1e-8);
        assert!(modulus(&Complex::with_val(ctx.bits(), &z1 + &z2)) < tau);
        let expect = Complex::with_val(ctx.bits(), ctx.pi().sqrt()) / ctx.two_pi_i();
        assert!(modulus(&(z1 - expect)) < tau);

        let c = new_chain(&[2, 2]).unwrap();
        let z = central_charge(&c, 1, &ctx).unwrap();
        let g = gamma_rational(&rat(1, 4), &ctx).unwrap() * gamma_rational(&rat(1, 2), &ctx).unwrap() / 4u32;
        let expect = Complex::with_val(ctx.bits(), g) * 2u32 * ctx.two_pi_i_power(-2);
        assert!(modulus(&(z - expect)) < tau);
    }

    #[test]
    fn coefficient_lemma_small() {
        let ctx = ctx();
        for a in [vec![2], vec![5], vec![2, 2], vec![3, 2, 4]] {
            let c = new_chain(&a).unwrap();
            for kappa in c.top_set(c.n()) {
                let r = coefficient_lemma_residual(&c, kappa, &ctx).unwrap();
                assert!(r < ctx.tolerance(), "{a:?} κ={kappa}: {r}");
            }
        }
    }
}
