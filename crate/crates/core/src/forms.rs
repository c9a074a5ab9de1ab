//! Exact matrices attached to a chain.
//!
//! Sector-side matrices (`η`, `Q̃`) are labelled by the canonical `I_n` order;
//! K-lattice matrices (`χ`, `S`, intersection form) by positions `1..μ̃`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::chain::{rat, ChainDescriptor, Rational};
use crate::error::{Error, Result};
use crate::matrix::{position_labels, IntMatrix, RationalMatrix};

/// Matrices larger than this are refused unless a larger limit is passed explicitly.
pub const DEFAULT_MAX_RANK: usize = 5000;

pub fn check_rank(c: &ChainDescriptor, limit: usize) -> Result<()> {
    if c.rank() > limit {
        Err(Error::RankLimit {
            rank: c.rank(),
            limit,
        })
    } else {
        Ok(())
    }
}

pub fn sector_labels(c: &ChainDescriptor) -> Vec<String> {
    c.index_set().iter().map(|s| s.to_string()).collect()
}

/// Polynomial in `t` with integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, e: usize) -> BigInt {
        self.coeffs.get(e).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Sum of the coefficients at exponents `e ≡ r (mod modulus)`.
    pub fn fold(&self, modulus: u64, r: i64) -> BigInt {
        let m = modulus as i128;
        let r = (r as i128).rem_euclid(m);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(e, _)| (*e as i128) % m == r)
            .map(|(_, c)| c.clone())
            .sum()
    }

    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }
}

/// `p_n`, built by `p_n = p_{n-2} (1 + t^{d_{n-2}} + … + t^{(a_{n-1}-1) d_{n-2}})`.
pub fn p_polynomial(c: &ChainDescriptor) -> IntPolynomial {
    p_level(c, c.n())
}

pub(crate) fn p_level(c: &ChainDescriptor, m: usize) -> IntPolynomial {
    match m {
        0 => IntPolynomial::one(),
        1 => IntPolynomial::from_i64(&[1, -1]),
        _ => {
            let step = c.d(m - 2) as usize;
            let reps = c.a(m - 1) as usize;
            let mut factor = vec![BigInt::zero(); step * (reps - 1) + 1];
            for b in 0..reps {
                factor[b * step] = BigInt::one();
            }
            p_level(c, m - 2).mul(&IntPolynomial::new(factor))
        }
    }
}

/// `η^{(n)}`: block anti-diagonal `(1/d_m) δ_{κ+λ,d_m}` per level, scaled by
/// `Π (-1/a_l)` over the levels above.
pub fn pairing_matrix(c: &ChainDescriptor) -> Result<RationalMatrix> {
    check_rank(c, DEFAULT_MAX_RANK)?;
    let index = c.index_set();
    let mut eta = RationalMatrix::zeros(sector_labels(c));
    let mut scale = Rational::one();
    let mut start = 0usize;
    let mut level = c.n() as isize;
    while level >= 0 {
        let m = level as usize;
        let block = c.top_set(m);
        if m == 0 {
            eta.set(start, start, scale.clone());
        } else {
            let dm = c.d(m);
            let entry = &scale * rat(1, dm as i128);
            for (i, &kappa) in block.iter().enumerate() {
                // κ ∈ I'_m implies d_m - κ ∈ I'_m; locate it by binary search
                let partner = block
                    .binary_search(&(dm - kappa))
                    .expect("I'_m is closed under κ ↦ d_m - κ");
                eta.set(start + i, start + partner, entry.clone());
            }
        }
        start += block.len();
        if m >= 2 {
            scale *= rat(-1, c.a(m) as i128);
        }
        level -= 2;
    }
    debug_assert_eq!(start, index.len());
    Ok(eta)
}

/// Diagonal grading `Q̃^{(n)}`: at `(m, κ)` the entry is `Σ_l ω^{(m)}_{κ,l} - m/2`.
pub fn grading_matrix(c: &ChainDescriptor) -> Result<RationalMatrix> {
    check_rank(c, DEFAULT_MAX_RANK)?;
    let mut q = RationalMatrix::zeros(sector_labels(c));
    for (i, s) in c.index_set().iter().enumerate() {
        q.set(i, i, grading_entry(c, s.level, s.kappa));
    }
    Ok(q)
}

pub(crate) fn grading_entry(c: &ChainDescriptor, level: usize, kappa: u64) -> Rational {
    c.kappa_exponents_unchecked(level, kappa).sum() - rat(level as i128, 2)
}

/// Coefficient of `t^s` in the series of `1/φ_n = p_n / (1 - t^{d_n})`.
fn inverse_phi_coeff(p: &IntPolynomial, dn: u64, s: usize) -> BigInt {
    let dn = dn as usize;
    let mut e = s % dn;
    let mut acc = BigInt::zero();
    while e <= s {
        acc += p.coeff(e);
        e += dn;
    }
    acc
}

/// Euler matrix `χ^{(n)} = 1/φ_n(N)` as an integer matrix.
pub fn euler_matrix_int(c: &ChainDescriptor) -> Result<IntMatrix> {
    check_rank(c, DEFAULT_MAX_RANK)?;
    let mu = c.rank();
    let p = p_polynomial(c);
    let series: Vec<i128> = (0..mu)
        .map(|s| {
            inverse_phi_coeff(&p, c.order(), s)
                .to_i128()
                .ok_or(Error::Overflow("Euler matrix entry"))
        })
        .collect::<Result<_>>()?;
    let mut chi = IntMatrix::zeros(mu);
    for i in 0..mu {
        for j in i..mu {
            chi.set(i, j, series[j - i]);
        }
    }
    Ok(chi)
}

pub fn euler_matrix(c: &ChainDescriptor) -> Result<RationalMatrix> {
    Ok(euler_matrix_int(c)?.to_rational(position_labels(c.rank())))
}

/// Serre matrix `S = χ^{-1} χᵀ`.
pub fn serre_matrix_int(c: &ChainDescriptor) -> Result<IntMatrix> {
    serre_from_euler(&euler_matrix_int(c)?)
}

pub fn serre_from_euler(chi: &IntMatrix) -> Result<IntMatrix> {
    chi.unitriangular_inverse()?.mul(&chi.transpose())
}

pub fn serre_matrix(c: &ChainDescriptor) -> Result<RationalMatrix> {
    Ok(serre_matrix_int(c)?.to_rational(position_labels(c.rank())))
}

/// `X^{(n)}_l`, by folding the coefficients of `p_n` at exponents `≡ -l (mod d_n)`.
/// For the internal base `n = 0` this is `1`.
pub fn x_value(c: &ChainDescriptor, l: i64) -> Rational {
    x_value_level(c, c.n(), l)
}

pub(crate) fn x_value_level(c: &ChainDescriptor, m: usize, l: i64) -> Rational {
    let p = p_level(c, m);
    Rational::from_integer(p.fold(c.d(m), -l))
}

/// The part of `X^{(n)}_l` carried by frequencies `κ ∈ I'_n`, for `n ≥ 2`.
///
/// Frequencies divisible by `a_n` contribute `(1/a_n)·fold_{d_{n-1}}(p_n)(-l)`, so the
/// remainder is exact without any root-of-unity arithmetic.
pub fn x_level_partial(c: &ChainDescriptor, l: i64) -> Rational {
    let n = c.n();
    assert!(n >= 2, "level partial sums are defined for n ≥ 2");
    let p = p_polynomial(c);
    let full = Rational::from_integer(p.fold(c.order(), -l));
    let multiples = Rational::from_integer(p.fold(c.d(n - 1), -l)) * rat(1, c.a(n) as i128);
    full - multiples
}

/// Intersection form `I = (-1)^{(n-1)(n-2)/2} (χ + (-1)^{n-1} χᵀ)`.
pub fn intersection_matrix_int(c: &ChainDescriptor) -> Result<IntMatrix> {
    intersection_from_euler(&euler_matrix_int(c)?, c.n())
}

pub fn intersection_from_euler(chi: &IntMatrix, n: usize) -> Result<IntMatrix> {
    let s = picard_lefschetz_sign(n);
    let t = if n % 2 == 1 { 1 } else { -1 };
    let mu = chi.size();
    let mut out = IntMatrix::zeros(mu);
    for i in 0..mu {
        for j in 0..mu {
            out.set(i, j, s * (chi.get(i, j) + t * chi.get(j, i)));
        }
    }
    Ok(out)
}

pub fn intersection_matrix(c: &ChainDescriptor) -> Result<RationalMatrix> {
    Ok(intersection_matrix_int(c)?.to_rational(position_labels(c.rank())))
}

/// `(-1)^{(n-1)(n-2)/2}`.
pub fn picard_lefschetz_sign(n: usize) -> i128 {
    if n < 2 {
        return 1;
    }
    if ((n - 1) * (n - 2) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `AB + BA`.
pub fn anticommutator(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    a.mul(b).add(&b.mul(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::new_chain;

    fn chain(a: &[i64]) -> ChainDescriptor {
        new_chain(a).unwrap()
    }

    fn int_rows(m: &IntMatrix) -> Vec<Vec<i128>> {
        m.to_rows()
    }

    /// Independent oracle: expand `Π_{i=0}^n (1 - t^{d_i})^{-(-1)^{n-i}}` as a power
    /// series truncated at degree `len - 1`.
    fn inverse_phi_series(c: &ChainDescriptor, len: usize) -> Vec<i128> {
        let n = c.n();
        let mut s = vec![0i128; len];
        s[0] = 1;
        for i in 0..=n {
            let d = c.d(i) as usize;
            if (n - i) % 2 == 0 {
                // divide by (1 - t^d): running sum with stride d
                for e in d..len {
                    s[e] += s[e - d];
                }
            } else {
                for e in (d..len).rev() {
                    s[e] -= s[e - d];
                }
            }
        }
        s
    }

    #[test]
    fn pairing_examples() {
        let eta = pairing_matrix(&chain(&[2])).unwrap();
        assert_eq!(eta.to_string_rows(), vec![vec!["1/2"]]);
        let eta = pairing_matrix(&chain(&[3])).unwrap();
        assert_eq!(eta.to_string_rows(), vec![vec!["0", "1/3"], vec!["1/3", "0"]]);
        let eta = pairing_matrix(&chain(&[2, 2])).unwrap();
        assert_eq!(
            eta.to_string_rows(),
            vec![
                vec!["0", "1/4", "0"],
                vec!["1/4", "0", "0"],
                vec!["0", "0", "-1/2"]
            ]
        );
        assert_eq!(eta.labels(), &["2:1", "2:3", "0:1"]);
    }

    #[test]
    fn pairing_recursive_block() {
        let c = chain(&[3, 2, 4, 2]);
        let eta = pairing_matrix(&c).unwrap();
        let lower = pairing_matrix(&c.prefix(2)).unwrap();
        let off = (c.d(4) - c.d(3)) as usize;
        let s = rat(-1, 2);
        for i in 0..lower.size() {
            for j in 0..lower.size() {
                assert_eq!(eta.get(off + i, off + j), &(lower.get(i, j) * &s));
            }
        }
        assert!(eta.is_symmetric());
        assert!(!eta.determinant().is_zero());
    }

    #[test]
    fn grading_examples() {
        let q = grading_matrix(&chain(&[2])).unwrap();
        assert_eq!(q.to_string_rows(), vec![vec!["0"]]);
        let q = grading_matrix(&chain(&[3])).unwrap();
        assert_eq!(q.get(0, 0), &rat(-1, 6));
        assert_eq!(q.get(1, 1), &rat(1, 6));
        let q = grading_matrix(&chain(&[2, 2])).unwrap();
        let diag: Vec<_> = (0..3).map(|i| q.get(i, i).clone()).collect();
        assert_eq!(diag, vec![rat(-1, 4), rat(1, 4), rat(0, 1)]);
        assert!(q.is_diagonal());
    }

    #[test]
    fn grading_anticommutes_with_pairing() {
        for a in [vec![3], vec![2, 2], vec![3, 2, 4], vec![2, 3, 2, 3]] {
            let c = chain(&a);
            let q = grading_matrix(&c).unwrap();
            let eta = pairing_matrix(&c).unwrap();
            assert!(anticommutator(&q, &eta).is_zero(), "{a:?}");
        }
    }

    #[test]
    fn p_examples() {
        assert_eq!(p_polynomial(&chain(&[3])), IntPolynomial::from_i64(&[1, -1]));
        // (1 - t^2)/(1 - t)
        assert_eq!(p_polynomial(&chain(&[2, 2])), IntPolynomial::from_i64(&[1, 1]));
        // (1 - t)(1 - t^4)/(1 - t^2) = (1 - t)(1 + t^2)
        assert_eq!(
            p_polynomial(&chain(&[2, 2, 2])),
            IntPolynomial::from_i64(&[1, -1, 1, -1])
        );
    }

    #[test]
    fn p_degree_and_product_formula() {
        for a in [vec![3, 4], vec![2, 3, 2], vec![4, 2, 3, 2], vec![2, 2, 2, 2, 3]] {
            let c = chain(&a);
            let n = c.n();
            let p = p_polynomial(&c);
            let expected_deg: i128 = (1..=n)
                .map(|i| {
                    let d = c.d(i - 1) as i128;
                    if (n - i) % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .sum();
            assert_eq!(p.degree() as i128, expected_deg, "{a:?}");
            // p_n (1 - t^{d_n})^{-1} must reproduce the product expansion of 1/φ_n.
            let len = c.order() as usize + 1;
            let oracle = inverse_phi_series(&c, len);
            for (s, expected) in oracle.iter().enumerate() {
                let got = inverse_phi_coeff(&p, c.order(), s);
                assert_eq!(got, BigInt::from(*expected), "{a:?} degree {s}");
            }
        }
    }

    #[test]
    fn euler_examples() {
        assert_eq!(int_rows(&euler_matrix_int(&chain(&[2])).unwrap()), vec![vec![1]]);
        assert_eq!(
            int_rows(&euler_matrix_int(&chain(&[3])).unwrap()),
            vec![vec![1, -1], vec![0, 1]]
        );
        assert_eq!(
            int_rows(&euler_matrix_int(&chain(&[2, 2])).unwrap()),
            vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]
        );
    }

    #[test]
    fn euler_matches_series_oracle() {
        for a in [vec![4, 3, 2], vec![2, 2, 2, 2], vec![3, 3, 2]] {
            let c = chain(&a);
            let chi = euler_matrix_int(&c).unwrap();
            let oracle = inverse_phi_series(&c, c.rank());
            assert!(chi.is_upper_unitriangular());
            for i in 0..c.rank() {
                for j in i..c.rank() {
                    assert_eq!(chi.get(i, j), oracle[j - i]);
                }
            }
        }
    }

    #[test]
    fn serre_examples() {
        assert_eq!(int_rows(&serre_matrix_int(&chain(&[2])).unwrap()), vec![vec![1]]);
        let s = serre_matrix_int(&chain(&[3])).unwrap();
        assert_eq!(int_rows(&s), vec![vec![0, 1], vec![-1, 1]]);
        assert_eq!(s.pow(6).unwrap(), IntMatrix::identity(2));
        assert_ne!(s.pow(3).unwrap(), IntMatrix::identity(2));
    }

    #[test]
    fn x_examples() {
        let c = chain(&[3]);
        assert_eq!(x_value(&c, 0), rat(1, 1));
        assert_eq!(x_value(&c, -1), rat(-1, 1));
        assert_eq!(x_value(&c, -2), rat(0, 1));
        assert_eq!(x_value(&c, 1), x_value(&c, -2));
        assert_eq!(x_value(&c.prefix(0), 5), rat(1, 1));
    }

    #[test]
    fn x_level_recursion() {
        for a in [vec![2, 2], vec![3, 4, 2], vec![2, 3, 2, 2]] {
            let c = chain(&a);
            let lower = c.prefix(c.n() - 2);
            for l in -(c.order() as i64)..=(c.order() as i64) {
                let lhs = x_value(&c, l);
                let rhs = x_level_partial(&c, l) + x_value(&lower, l) * rat(1, c.a(c.n()) as i128);
                assert_eq!(lhs, rhs, "{a:?} l={l}");
            }
        }
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(
            int_rows(&intersection_matrix_int(&chain(&[3])).unwrap()),
            vec![vec![2, -1], vec![-1, 2]]
        );
        assert_eq!(
            int_rows(&intersection_matrix_int(&chain(&[2])).unwrap()),
            vec![vec![2]]
        );
        assert_eq!(
            int_rows(&intersection_matrix_int(&chain(&[2, 2])).unwrap()),
            vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]
        );
    }

    #[test]
    fn signs() {
        assert_eq!(
            (1..=6).map(picard_lefschetz_sign).collect::<Vec<_>>(),
            vec![1, 1, -1, -1, 1, 1]
        );
    }

    #[test]
    fn rank_limit() {
        let c = chain(&[4, 4, 4, 4, 4, 4, 4]);
        assert!(matches!(pairing_matrix(&c), Err(Error::RankLimit { .. })));
        assert!(check_rank(&c, 1 << 20).is_ok());
    }
}
