use num_traits::One;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};

use super::Instance;
use crate::chain::{ChainDescriptor, Rational};
use crate::error::{Error, Result};
use crate::forms::{check_rank, sector_labels, DEFAULT_MAX_RANK};
use crate::matrix::{position_labels, RationalMatrix};
use crate::numerics::{gamma_rational, modulus, PrecComplexMatrix, PrecContext};

/// `S = χ^{-1} χᵀ` from the instance's (possibly corrupted) `χ`.
fn serre_of(chi: &RationalMatrix) -> Result<RationalMatrix> {
    if let Some(int) = chi.to_int().filter(|m| m.is_upper_unitriangular()) {
        let s = crate::forms::serre_from_euler(&int)?;
        return Ok(s.to_rational(chi.labels().to_vec()));
    }
    let inv = chi
        .inverse()
        .ok_or_else(|| Error::InvalidArgument("Euler matrix is singular".into()))?;
    Ok(inv.mul(&chi.transpose()))
}

fn phases(q: &RationalMatrix, factor: &Rational, ctx: &PrecContext) -> Vec<Complex> {
    (0..q.size())
        .map(|i| ctx.root_of_unity(&(q.get(i, i) * factor)))
        .collect()
}

/// `C = (2π)^{-n/2} ch_Γ`.
fn central_connection(inst: &Instance, ctx: &PrecContext) -> Result<PrecComplexMatrix> {
    let ch = inst.ch_gamma(ctx)?;
    let n = inst.chain.n() as i32;
    Ok(ch.scale(&ctx.two_pi_half_power(-n)))
}

/// Residual of `C^{-1} e[Q̃] C - S`.
pub(super) fn identity_1(inst: &Instance, ctx: &PrecContext) -> Result<Float> {
    let c = central_connection(inst, ctx)?;
    let lu = c.lu(&ctx.tolerance())?;
    let rhs = c.scale_rows(&phases(&inst.qtilde, &Rational::one(), ctx));
    let lhs = lu.solve(&rhs);
    Ok(lhs.max_abs_diff_rational(&serre_of(&inst.chi)?, ctx))
}

/// Residual of `Cᵀ e[Q̃/2] η C - χ`.
pub(super) fn identity_2(inst: &Instance, ctx: &PrecContext) -> Result<Float> {
    let c = central_connection(inst, ctx)?;
    let half = Rational::new(1.into(), 2.into());
    let inner = c
        .left_mul_rational(&inst.eta, ctx)
        .scale_rows(&phases(&inst.qtilde, &half, ctx));
    let lhs = c.transpose().mul(&inner);
    Ok(lhs.max_abs_diff_rational(&inst.chi, ctx))
}

pub fn verify_theorem_identity_1(c: &ChainDescriptor, ctx: &PrecContext) -> Result<Float> {
    identity_1(&Instance::new(c)?, ctx)
}

pub fn verify_theorem_identity_2(c: &ChainDescriptor, ctx: &PrecContext) -> Result<Float> {
    identity_2(&Instance::new(c)?, ctx)
}

/// `ch_Γ` entry by entry from
/// `(2πi)^{(n-m)/2} c^{(m)}_κ e[(-1)^{m-1} ω^{(m)}_{κ,1}(j-1)]`, without the recursion.
pub fn ch_gamma_closed_form(c: &ChainDescriptor, ctx: &PrecContext) -> Result<PrecComplexMatrix> {
    check_rank(c, DEFAULT_MAX_RANK)?;
    let n = c.n();
    let mu = c.rank();
    let mut out = PrecComplexMatrix::zeros(sector_labels(c), position_labels(mu), ctx);
    for (row, s) in c.index_set().iter().enumerate() {
        let m = s.level;
        let omega = c.exponents_for_kappa(s)?.0;
        let mut constant = ctx.two_pi_i_power(((n - m) / 2) as i32);
        for w in &omega {
            constant *= gamma_rational(&(Rational::one() - w), ctx)?;
        }
        for (l, w) in omega.iter().enumerate() {
            // positions are 1-based: odd levels take l = 1, 3, …; even levels l = 2, 4, …
            if (l + 1) % 2 == m % 2 {
                constant *= ctx.one() - ctx.root_of_unity(w);
            }
        }
        for j in 0..mu {
            let z = if m == 0 {
                constant.clone()
            } else {
                let sign: i64 = if m % 2 == 1 { 1 } else { -1 };
                let q = &omega[0] * Rational::from_integer((sign * j as i64).into());
                Complex::with_val(ctx.bits(), &constant * ctx.root_of_unity(&q))
            };
            out.set(row, j, z);
        }
    }
    Ok(out)
}

/// Explicit inverse by Gauss–Jordan elimination with partial pivoting.
fn gauss_jordan_inverse(a: &PrecComplexMatrix, ctx: &PrecContext) -> Result<PrecComplexMatrix> {
    let n = a.rows();
    let mut m: Vec<Vec<Complex>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).clone()).collect())
        .collect();
    let mut inv: Vec<Vec<Complex>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { ctx.one() } else { ctx.zero() }).collect())
        .collect();
    let tau = ctx.tolerance();
    let mut tmp = ctx.zero();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| {
                modulus(&m[x][col])
                    .partial_cmp(&modulus(&m[y][col]))
                    .expect("finite entries")
            })
            .expect("non-empty range");
        if modulus(&m[p][col]) <= tau {
            return Err(Error::SingularChGamma {
                pivot: crate::numerics::format_residual(&modulus(&m[p][col])),
            });
        }
        m.swap(p, col);
        inv.swap(p, col);
        let r = Complex::with_val(ctx.bits(), 1 / &m[col][col]);
        for j in 0..n {
            m[col][j] *= &r;
            inv[col][j] *= &r;
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..n {
                tmp.assign(&f * &m[col][j]);
                m[i][j] -= &tmp;
                tmp.assign(&f * &inv[col][j]);
                inv[i][j] -= &tmp;
            }
        }
    }
    let cols: Vec<Vec<Complex>> = (0..n)
        .map(|j| (0..n).map(|i| inv[i][j].clone()).collect())
        .collect();
    Ok(PrecComplexMatrix::from_columns(
        a.col_labels().to_vec(),
        a.row_labels().to_vec(),
        cols,
        ctx,
    ))
}

/// Residuals of the two relations for the central connection matrix, computed from
/// the closed-form `ch_Γ` and an explicit inverse, sharing nothing with the
/// theorem checks.
pub(super) fn d3(inst: &Instance, ctx: &PrecContext) -> Result<(Float, Float)> {
    let c = &inst.chain;
    let n = c.n() as f64;
    let two_pi = Float::with_val(ctx.bits(), Constant::Pi) * 2u32;
    let scale = two_pi.pow(-n / 2.0);
    let cphi = ch_gamma_closed_form(c, ctx)?.scale(&scale);
    let cinv = gauss_jordan_inverse(&cphi, ctx)?;

    let sphi = &inst.chi;
    let sphi_inv = sphi
        .inverse()
        .ok_or_else(|| Error::InvalidArgument("Stokes matrix is singular".into()))?;
    let rhs1 = sphi_inv.mul(&sphi.transpose());
    let q = &inst.qtilde;
    let full: Vec<Complex> = (0..q.size()).map(|i| ctx.root_of_unity(q.get(i, i))).collect();
    let lhs1 = cinv.mul(&cphi.scale_rows(&full));
    let r1 = lhs1.max_abs_diff_rational(&rhs1, ctx);

    let half: Vec<Complex> = (0..q.size())
        .map(|i| ctx.root_of_unity(&(q.get(i, i) / Rational::from_integer(2.into()))))
        .collect();
    let eta_c = PrecComplexMatrix::from_rational(&inst.eta, ctx).mul(&cphi);
    let lhs2 = cphi.transpose().mul(&eta_c.scale_rows(&half));
    let r2 = lhs2.max_abs_diff_rational(sphi, ctx);
    Ok((r1, r2))
}

pub fn verify_d3_relations(c: &ChainDescriptor, ctx: &PrecContext) -> Result<(Float, Float)> {
    d3(&Instance::new(c)?, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::new_chain;
    use crate::numerics::ch_gamma_matrix;

    #[test]
    fn closed_form_matches_recursion() {
        let ctx = PrecContext::new(48).unwrap();
        for a in [vec![2], vec![3], vec![2, 2], vec![2, 3, 2], vec![2, 2, 2, 2]] {
            let c = new_chain(&a).unwrap();
            let x = ch_gamma_closed_form(&c, &ctx).unwrap();
            let y = ch_gamma_matrix(&c, &ctx).unwrap();
            assert!(x.max_abs_diff(&y) < ctx.tolerance(), "{a:?}");
        }
    }

    #[test]
    fn identities_on_examples() {
        let ctx = PrecContext::new(64).unwrap();
        for a in [vec![2], vec![3], vec![2, 2], vec![2, 2, 2], vec![2, 3]] {
            let c = new_chain(&a).unwrap();
            let tau = ctx.tolerance();
            let r1 = verify_theorem_identity_1(&c, &ctx).unwrap();
            let r2 = verify_theorem_identity_2(&c, &ctx).unwrap();
            let (d1, d2) = verify_d3_relations(&c, &ctx).unwrap();
            assert!(r1 < tau, "{a:?} thm1 {r1}");
            assert!(r2 < tau, "{a:?} thm2 {r2}");
            assert!(d1 < tau && d2 < tau, "{a:?} d3 {d1} {d2}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let ctx = PrecContext::new(40).unwrap();
        let c = new_chain(&[3, 2]).unwrap();
        let m = ch_gamma_closed_form(&c, &ctx).unwrap();
        let inv = gauss_jordan_inverse(&m, &ctx).unwrap();
        let id = RationalMatrix::identity(position_labels(c.rank()));
        assert!(inv.mul(&m).max_abs_diff_rational(&id, &ctx) < ctx.tolerance());
    }
}
