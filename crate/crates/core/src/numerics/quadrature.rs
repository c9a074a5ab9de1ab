//! Double-precision adaptive quadrature, used only as an independent oracle for the
//! closed-form Gamma integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::chain::{ChainDescriptor, Monomial};
use crate::error::{Error, Result};

// 15-point Kronrod nodes on [0, 1] (symmetric), with the embedded 7-point Gauss rule
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    (value, err)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod over consecutive `breaks`, bisecting the piece with
/// the largest error until `err ≤ max(abs_tol, rel_tol·|value|)`.
///
/// Returns `(value, error estimate)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let mut heap = BinaryHeap::new();
    let (mut value, mut err) = (0.0, 0.0);
    for w in breaks.windows(2) {
        let (v, e) = gk15(f, w[0], w[1]);
        value += v;
        err += e;
        heap.push(Piece {
            a: w[0],
            b: w[1],
            value: v,
            err: e,
        });
    }
    while err > abs_tol.max(rel_tol * value.abs()) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNonConvergent {
                target: abs_tol.max(rel_tol * value.abs()),
                estimate: err,
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::QuadratureNonConvergent {
                target: abs_tol.max(rel_tol * value.abs()),
                estimate: err,
            });
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        value += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let value = heap.iter().map(|p| p.value).sum();
    let err = heap.iter().map(|p| p.err).sum();
    Ok((value, err))
}

fn uniform(a: f64, b: f64, pieces: usize) -> Vec<f64> {
    (0..=pieces)
        .map(|i| a + (b - a) * i as f64 / pieces as f64)
        .collect()
}

/// Smallest `R ≥ 1` with `scale·e^{-R^a}/a ≤ budget`.
fn truncation_radius(a: f64, scale: f64, budget: f64) -> f64 {
    let need = (scale / (a * budget)).ln().max(0.0);
    need.powf(1.0 / a).max(1.0)
}

/// `∫_0^∞ e^{-x^a} x^k dx` for `k ≤ a - 1`, to relative error `target`.
pub fn half_line_integral(a: u64, k: u64, target: f64) -> Result<(f64, f64)> {
    assert!(k < a, "exponent must satisfy k ≤ a - 1 for the tail bound");
    let af = a as f64;
    let f = |x: f64| (-x.powf(af)).exp() * x.powi(k as i32);
    let (head, head_err) = integrate(&f, &uniform(0.0, 1.0, 4), 0.0, target / 8.0)?;
    let budget = target * head / 2.0;
    let r = truncation_radius(af, 1.0, budget / 2.0);
    let tail_bound = (-r.powf(af)).exp() / af;
    let (body, body_err) = integrate(&f, &uniform(1.0, r.max(1.0 + 1e-12), 8), budget / 8.0, 0.0)?;
    let value = head + body;
    let err = head_err + body_err + tail_bound;
    if err > target * value {
        return Err(Error::QuadratureNonConvergent {
            target,
            estimate: err / value,
        });
    }
    Ok((value, err))
}

/// `∫_0^∞ e^{-x1 y^a} y^k dy` for `x1 > 0`, `k ≤ a - 1`, by dyadic pieces with a
/// certified cut-off.
fn inner_integral(x1: f64, a: u64, k: u64, rel: f64) -> Result<(f64, f64)> {
    if !(x1 > 0.0 && x1.is_finite()) {
        return Err(Error::QuadratureNonConvergent {
            target: rel,
            estimate: f64::INFINITY,
        });
    }
    let af = a as f64;
    let f = |y: f64| (-x1 * y.powf(af)).exp() * y.powi(k as i32);
    let mut breaks = vec![0.0];
    let mut y = 1.0 / 1024.0;
    // ∫_Y^∞ e^{-x1 y^a} y^k dy ≤ Y^{k-a+1} e^{-x1 Y^a}/(a x1) for Y ≥ 1
    let bound = |y: f64| y.powi(k as i32 + 1 - a as i32) * (-x1 * y.powf(af)).exp() / (af * x1);
    loop {
        breaks.push(y);
        if y >= 1.0 && bound(y) <= 1e-300 {
            break;
        }
        y *= 2.0;
    }
    let (v, e) = integrate(&f, &breaks, 0.0, rel)?;
    let tail = bound(*breaks.last().expect("non-empty"));
    Ok((v, e + tail))
}

/// Numerical value of `∫_{(R≥0)^n} e^{-f̃_n(x)} x^k dx` for `n ≤ 2` at relative error
/// `target_rel_err`. The two-dimensional case is a genuine iterated quadrature.
pub fn orthant_integral_quadrature(
    c: &ChainDescriptor,
    k: &Monomial,
    target_rel_err: f64,
) -> Result<f64> {
    let n = c.n();
    if n > 2 {
        return Err(Error::DimensionTooLarge { n });
    }
    if !c.in_top_basis(k) {
        return Err(Error::MonomialOutOfRange {
            monomial: k.to_string(),
        });
    }
    if !(target_rel_err >= 1e-8) {
        return Err(Error::InvalidArgument(format!(
            "quadrature target {target_rel_err:e} is below 1e-8"
        )));
    }
    match n {
        1 => Ok(half_line_integral(c.a(1), k.0[0], target_rel_err)?.0),
        _ => Ok(plane_integral(c.a(1), c.a(2), k.0[0], k.0[1], target_rel_err)?.0),
    }
}

/// `∫∫ e^{-x1^{a1} - x1 x2^{a2}} x1^{k1} x2^{k2}`, substituting `x1 = s^{a2}` to smooth
/// the outer integrand at the origin.
fn plane_integral(a1: u64, a2: u64, k1: u64, k2: u64, target: f64) -> Result<(f64, f64)> {
    let (a1f, a2f) = (a1 as f64, a2 as f64);
    let inner_rel = target / 64.0;
    let failure = std::cell::Cell::new(None);
    let outer = |s: f64| {
        if s <= 0.0 {
            // Kronrod nodes are interior, so the origin is never sampled
            return 0.0;
        }
        let x1 = s.powf(a2f);
        let jac = a2f * s.powf(a2f - 1.0);
        match inner_integral(x1, a2, k2, inner_rel) {
            Ok((g, _)) => jac * (-x1.powf(a1f)).exp() * x1.powi(k1 as i32) * g,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let (head, head_err) = integrate(&outer, &uniform(0.0, 1.0, 8), 0.0, target / 8.0)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let budget = target * head / 2.0;
    let r1 = truncation_radius(a1f, 2.0, budget / 2.0);
    let tail_bound = 2.0 * (-r1.powf(a1f)).exp() / a1f;
    let s_max = r1.powf(1.0 / a2f);
    let (body, body_err) = if s_max > 1.0 {
        integrate(&outer, &uniform(1.0, s_max, 8), budget / 8.0, 0.0)?
    } else {
        (0.0, 0.0)
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let value = head + body;
    let err = head_err + body_err + tail_bound + inner_rel * value;
    if !value.is_finite() || err > target * value {
        return Err(Error::QuadratureNonConvergent {
            target,
            estimate: err / value,
        });
    }
    Ok((value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::new_chain;

    #[test]
    fn polynomial_is_exact() {
        let (v, e) = integrate(&|x: f64| 3.0 * x * x, &[0.0, 2.0], 1e-14, 0.0).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
        assert!(e < 1e-12);
    }

    #[test]
    fn gaussian_half_line() {
        let c = new_chain(&[2]).unwrap();
        let v = orthant_integral_quadrature(&c, &Monomial(vec![0]), 1e-6).unwrap();
        let sqrt_pi_half = std::f64::consts::PI.sqrt() / 2.0;
        assert!((v - sqrt_pi_half).abs() / sqrt_pi_half < 1e-6);
    }

    #[test]
    fn cubic_half_line() {
        let c = new_chain(&[3]).unwrap();
        let v = orthant_integral_quadrature(&c, &Monomial(vec![0]), 1e-6).unwrap();
        // Γ(1/3)/3
        assert!((v - 0.892_979_511_569_249_2).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_requests() {
        let c = new_chain(&[2, 2, 2]).unwrap();
        assert!(matches!(
            orthant_integral_quadrature(&c, &Monomial(vec![0, 0, 0]), 1e-4),
            Err(Error::DimensionTooLarge { n: 3 })
        ));
        let c = new_chain(&[2]).unwrap();
        assert!(matches!(
            orthant_integral_quadrature(&c, &Monomial(vec![0]), 1e-12),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            orthant_integral_quadrature(&c, &Monomial(vec![1]), 1e-4),
            Err(Error::MonomialOutOfRange { .. })
        ));
    }

    #[test]
    fn plane_integral_matches_gamma_product() {
        // a = [2, 2], k = (1, 0): (1/4) Γ(3/4) Γ(1/2)
        let c = new_chain(&[2, 2]).unwrap();
        let v = orthant_integral_quadrature(&c, &Monomial(vec![1, 0]), 1e-4).unwrap();
        let expected = 0.25 * 1.225_416_702_465_177_6 * std::f64::consts::PI.sqrt();
        assert!((v - expected).abs() / expected < 1e-4, "{v} vs {expected}");
    }
}
