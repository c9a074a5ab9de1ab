//! Combinatorial data of a chain-type polynomial.
//!
//! A chain is fixed by its exponent list `(a_1, …, a_n)`. Everything else in the
//! crate (degrees, index sets, exponents, the cyclic symmetry group, monomial
//! bases) is derived here with exact rational arithmetic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i128, den: i128) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Fractional part `r - ⌊r⌋`, always in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

/// Formats a rational as `p/q` in lowest terms, or `p` when `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Exponent list of `f_n = z_1^{a_1} z_2 + … + z_n^{a_n}` with its derived degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ChainDescriptor {
    a: Vec<u64>,
    d: Vec<u64>,
    mu: u64,
}

/// Validates `a` and builds the descriptor. `n = 0` is rejected here.
pub fn new_chain(a: &[i64]) -> Result<ChainDescriptor> {
    if a.is_empty() {
        return Err(Error::EmptyChain);
    }
    for (i, &ai) in a.iter().enumerate() {
        if ai < 2 {
            return Err(Error::InvalidExponent {
                position: i + 1,
                value: ai,
            });
        }
    }
    ChainDescriptor::from_exponents(a.iter().map(|&x| x as u64).collect())
}

impl ChainDescriptor {
    fn from_exponents(a: Vec<u64>) -> Result<Self> {
        let mut d = Vec::with_capacity(a.len() + 1);
        d.push(1u64);
        for &ai in &a {
            let next = d
                .last()
                .unwrap()
                .checked_mul(ai)
                .filter(|&v| v < (1u64 << 62))
                .ok_or(Error::DegreeOverflow)?;
            d.push(next);
        }
        let n = a.len();
        let mut mu: i128 = 0;
        for (i, &di) in d.iter().enumerate() {
            let sign = if (n - i) % 2 == 0 { 1 } else { -1 };
            mu += sign * di as i128;
        }
        Ok(ChainDescriptor {
            a,
            d,
            mu: mu as u64,
        })
    }

    /// Descriptor of `f_m`, the chain truncated to its first `m` exponents.
    /// `m = 0` gives the internal recursion base (`μ̃ = 1`, `I_0 = {1}`).
    pub(crate) fn prefix(&self, m: usize) -> ChainDescriptor {
        assert!(m <= self.n());
        ChainDescriptor {
            a: self.a[..m].to_vec(),
            d: self.d[..=m].to_vec(),
            mu: mu_of(&self.d[..=m]),
        }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.a
    }

    /// `a_i` with 1-based `i`.
    pub fn a(&self, i: usize) -> u64 {
        self.a[i - 1]
    }

    /// Degrees `d_0 = 1, d_i = a_1 ⋯ a_i`.
    pub fn degrees(&self) -> &[u64] {
        &self.d
    }

    pub fn d(&self, i: usize) -> u64 {
        self.d[i]
    }

    /// Order of the symmetry group, `d_n`.
    pub fn order(&self) -> u64 {
        self.d[self.n()]
    }

    /// Milnor number `μ̃_n`.
    pub fn mu(&self) -> u64 {
        self.mu
    }

    pub fn rank(&self) -> usize {
        self.mu as usize
    }

    /// Rational weights `ω_i = Σ_{l=i}^n (-1)^{l-i} d_{i-1}/d_l`.
    pub fn rational_weights(&self) -> Vec<Rational> {
        let n = self.n();
        (1..=n)
            .map(|i| {
                let mut w = Rational::zero();
                for l in i..=n {
                    let term = rat(self.d[i - 1] as i128, self.d[l] as i128);
                    if (l - i) % 2 == 0 {
                        w += term;
                    } else {
                        w -= term;
                    }
                }
                w
            })
            .collect()
    }

    /// The exponent matrix `E = (a_i δ_{ij} + δ_{i+1,j})`.
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        let mut e = vec![vec![0i64; n]; n];
        for i in 0..n {
            e[i][i] = self.a[i] as i64;
            if i + 1 < n {
                e[i][i + 1] = 1;
            }
        }
        e
    }

    /// Whether `κ ∈ I'_m`.
    pub fn in_top_set(&self, level: usize, kappa: u64) -> bool {
        if level > self.n() {
            return false;
        }
        if level == 0 {
            return kappa == 1;
        }
        kappa >= 1 && kappa <= self.d[level] && kappa % self.a[level - 1] != 0
    }

    /// Whether `s` labels a row of the `I_n`-indexed matrices.
    pub fn contains(&self, s: &SectorIndex) -> bool {
        s.level <= self.n() && (self.n() - s.level) % 2 == 0 && self.in_top_set(s.level, s.kappa)
    }

    /// `I'_m` in increasing order.
    pub fn top_set(&self, level: usize) -> Vec<u64> {
        if level == 0 {
            return vec![1];
        }
        let am = self.a[level - 1];
        (1..=self.d[level]).filter(|k| k % am != 0).collect()
    }

    /// `I_n` in canonical order: level `n` ascending, then `I_{n-2}` recursively.
    pub fn index_set(&self) -> Vec<SectorIndex> {
        let mut out = Vec::with_capacity(self.rank());
        let mut level = self.n() as isize;
        while level >= 0 {
            let m = level as usize;
            out.extend(
                self.top_set(m)
                    .into_iter()
                    .map(|kappa| SectorIndex { level: m, kappa }),
            );
            level -= 2;
        }
        out
    }

    fn check_member(&self, s: &SectorIndex) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::IndexNotInSet {
                label: s.to_string(),
            })
        }
    }

    /// `ω^{(m)}_{κ,i} = frac((-1)^{i-1} d_{i-1} κ / d_m)`, `i = 1..m`, for `s = (m, κ)`.
    pub fn exponents_for_kappa(&self, s: &SectorIndex) -> Result<ExponentTuple> {
        self.check_member(s)?;
        Ok(self.kappa_exponents_unchecked(s.level, s.kappa))
    }

    pub(crate) fn kappa_exponents_unchecked(&self, level: usize, kappa: u64) -> ExponentTuple {
        let dm = self.d[level] as i128;
        let values = (1..=level)
            .map(|i| {
                let sign: i128 = if i % 2 == 1 { 1 } else { -1 };
                frac(&rat(sign * self.d[i - 1] as i128 * kappa as i128, dm))
            })
            .collect();
        ExponentTuple(values)
    }

    /// `(k + 1) E^{-T}`, solved by back substitution of `E ω = k + 1`.
    pub fn exponents_for_monomial(&self, k: &Monomial) -> Result<ExponentTuple> {
        if k.0.len() != self.n() {
            return Err(Error::MonomialOutOfRange {
                monomial: k.to_string(),
            });
        }
        let n = self.n();
        let mut w = vec![Rational::zero(); n];
        let mut next = Rational::zero();
        for i in (0..n).rev() {
            let rhs = Rational::from_integer(BigInt::from(k.0[i] + 1)) - &next;
            w[i] = rhs / Rational::from_integer(BigInt::from(self.a[i]));
            next = w[i].clone();
        }
        Ok(ExponentTuple(w))
    }

    pub fn in_top_basis(&self, k: &Monomial) -> bool {
        let n = self.n();
        k.0.len() == n
            && k.0.iter().enumerate().all(|(i, &ki)| {
                if i + 1 < n {
                    ki < self.a[i]
                } else {
                    ki + 2 <= self.a[i]
                }
            })
    }

    /// `ψ(k) = Σ_l (-1)^{l-1} (d_n/d_l)(k_l + 1)`, a bijection `B'_n → I'_n`.
    pub fn psi(&self, k: &Monomial) -> Result<u64> {
        if !self.in_top_basis(k) {
            return Err(Error::MonomialOutOfRange {
                monomial: k.to_string(),
            });
        }
        let n = self.n();
        let dn = self.order() as i128;
        let mut kappa: i128 = 0;
        for l in 1..=n {
            let term = dn / self.d[l] as i128 * (k.0[l - 1] as i128 + 1);
            if l % 2 == 1 {
                kappa += term;
            } else {
                kappa -= term;
            }
        }
        debug_assert!(self.in_top_set(n, kappa as u64));
        Ok(kappa as u64)
    }

    /// Inverse of [`psi`](Self::psi): `k = E ω_κ - 1`.
    pub fn psi_inverse(&self, kappa: u64) -> Result<Monomial> {
        let n = self.n();
        if !self.in_top_set(n, kappa) {
            return Err(Error::IndexNotInSet {
                label: SectorIndex { level: n, kappa }.to_string(),
            });
        }
        let w = self.kappa_exponents_unchecked(n, kappa).0;
        let mut k = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = &w[i] * Rational::from_integer(BigInt::from(self.a[i]));
            if i + 1 < n {
                v += &w[i + 1];
            }
            v -= Rational::one();
            debug_assert!(v.is_integer() && !v.is_negative());
            k.push(v.to_integer().to_u64().expect("ψ^{-1} produced a negative exponent"));
        }
        Ok(Monomial(k))
    }

    /// `(B_n, B'_n)`, each listed in the order of `I_n` and `I'_n` respectively.
    pub fn monomial_basis(&self) -> (Vec<Monomial>, Vec<Monomial>) {
        let n = self.n();
        if n == 0 {
            return (vec![Monomial(vec![])], vec![Monomial(vec![])]);
        }
        let top: Vec<Monomial> = self
            .top_set(n)
            .into_iter()
            .map(|kappa| self.psi_inverse(kappa).expect("I'_n member"))
            .collect();
        let mut full = top.clone();
        if n >= 2 {
            let (lower, _) = self.prefix(n - 2).monomial_basis();
            for m in lower {
                let mut e = m.0;
                e.push(0);
                e.push(self.a[n - 1] - 1);
                full.push(Monomial(e));
            }
        }
        (full, top)
    }

    /// The generator `g_κ` of the symmetry group and its age.
    pub fn symmetry_generator(&self, kappa: u64) -> Result<SymmetryElement> {
        let n = self.n();
        if !self.in_top_set(n, kappa) {
            return Err(Error::IndexNotInSet {
                label: SectorIndex { level: n, kappa }.to_string(),
            });
        }
        let phases = self.kappa_exponents_unchecked(n, kappa).0;
        let age = phases.iter().fold(Rational::zero(), |acc, p| acc + p);
        Ok(SymmetryElement { phases, age })
    }
}

fn mu_of(d: &[u64]) -> u64 {
    let n = d.len() - 1;
    let mut mu: i128 = 0;
    for (i, &di) in d.iter().enumerate() {
        if (n - i) % 2 == 0 {
            mu += di as i128;
        } else {
            mu -= di as i128;
        }
    }
    mu as u64
}

/// Row/column label of the `I_n`-indexed matrices: a level `m ≡ n (mod 2)` and `κ ∈ I'_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorIndex {
    pub level: usize,
    pub kappa: u64,
}

impl SectorIndex {
    pub fn new(level: usize, kappa: u64) -> Self {
        SectorIndex { level, kappa }
    }
}

impl fmt::Display for SectorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.kappa)
    }
}

impl FromStr for SectorIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("sector label {s:?} is not of the form m:κ"));
        let (m, k) = s.split_once(':').ok_or_else(bad)?;
        Ok(SectorIndex {
            level: m.trim().parse().map_err(|_| bad())?,
            kappa: k.trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentTuple(pub Vec<Rational>);

impl ExponentTuple {
    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, w| acc + w)
    }
}

impl fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Exponent vector of `x_1^{k_1} ⋯ x_n^{k_n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u64>);

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad monomial exponent {p:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }
}

/// Diagonal element `(e[α_1], …, e[α_n])`, stored by its phases `α_i ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryElement {
    pub phases: Vec<Rational>,
    pub age: Rational,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        rat(p, q)
    }

    #[test]
    fn degrees_and_milnor_number() {
        let c = new_chain(&[2]).unwrap();
        assert_eq!(c.degrees(), &[1, 2]);
        assert_eq!(c.mu(), 1);
        let c = new_chain(&[2, 2]).unwrap();
        assert_eq!(c.degrees(), &[1, 2, 4]);
        assert_eq!(c.mu(), 3);
        let c = new_chain(&[3, 2, 2]).unwrap();
        assert_eq!(c.degrees(), &[1, 3, 6, 12]);
        assert_eq!(c.mu(), 8);
    }

    #[test]
    fn milnor_number_recursion() {
        for a in [vec![2, 3, 4, 5], vec![3, 3, 3], vec![5, 2], vec![4, 4, 2, 3, 2]] {
            let c = new_chain(&a).unwrap();
            for m in 2..=c.n() {
                let lhs = c.prefix(m).mu() as i128;
                let rhs = c.d(m) as i128 - c.d(m - 1) as i128 + c.prefix(m - 2).mu() as i128;
                assert_eq!(lhs, rhs);
            }
            assert_eq!(c.prefix(1).mu(), c.a(1) - 1);
            assert_eq!(c.prefix(0).mu(), 1);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(new_chain(&[]), Err(Error::EmptyChain));
        assert_eq!(
            new_chain(&[1, 2]),
            Err(Error::InvalidExponent {
                position: 1,
                value: 1
            })
        );
        let msg = new_chain(&[1, 2]).unwrap_err().to_string();
        assert!(msg.contains("exponent a_1 must be ≥ 2"), "{msg}");
        assert!(matches!(new_chain(&[2, 0]), Err(Error::InvalidExponent { position: 2, .. })));
        assert_eq!(new_chain(&[1 << 40, 1 << 30]), Err(Error::DegreeOverflow));
    }

    #[test]
    fn weights() {
        assert_eq!(new_chain(&[2]).unwrap().rational_weights(), vec![r(1, 2)]);
        assert_eq!(new_chain(&[2, 2]).unwrap().rational_weights(), vec![r(1, 4), r(1, 2)]);
        assert_eq!(new_chain(&[3, 2]).unwrap().rational_weights(), vec![r(1, 6), r(1, 2)]);
    }

    #[test]
    fn weights_match_back_substitution() {
        let c = new_chain(&[3, 4, 2, 5]).unwrap();
        let zero = Monomial(vec![0; 4]);
        assert_eq!(c.exponents_for_monomial(&zero).unwrap().0, c.rational_weights());
    }

    #[test]
    fn exponent_matrix() {
        assert_eq!(new_chain(&[2]).unwrap().exponent_matrix(), vec![vec![2]]);
        assert_eq!(
            new_chain(&[2, 3]).unwrap().exponent_matrix(),
            vec![vec![2, 1], vec![0, 3]]
        );
        let e = new_chain(&[2, 2]).unwrap().exponent_matrix();
        assert_eq!(e[0][0] * e[1][1] - e[0][1] * e[1][0], 4);
    }

    #[test]
    fn index_sets() {
        let s = |m, k| SectorIndex::new(m, k);
        assert_eq!(new_chain(&[2]).unwrap().index_set(), vec![s(1, 1)]);
        assert_eq!(new_chain(&[3]).unwrap().index_set(), vec![s(1, 1), s(1, 2)]);
        assert_eq!(
            new_chain(&[2, 2]).unwrap().index_set(),
            vec![s(2, 1), s(2, 3), s(0, 1)]
        );
        let c = new_chain(&[3, 2, 2]).unwrap();
        let idx = c.index_set();
        assert_eq!(idx.len() as u64, c.mu());
        assert_eq!(idx[6], s(1, 1));
        assert_eq!(idx[7], s(1, 2));
    }

    #[test]
    fn kappa_exponents() {
        let c = new_chain(&[2, 2]).unwrap();
        assert_eq!(
            c.exponents_for_kappa(&SectorIndex::new(2, 1)).unwrap().0,
            vec![r(1, 4), r(1, 2)]
        );
        assert_eq!(
            c.exponents_for_kappa(&SectorIndex::new(2, 3)).unwrap().0,
            vec![r(3, 4), r(1, 2)]
        );
        let c3 = new_chain(&[3]).unwrap();
        assert_eq!(
            c3.exponents_for_kappa(&SectorIndex::new(1, 2)).unwrap().0,
            vec![r(2, 3)]
        );
        assert!(matches!(
            c.exponents_for_kappa(&SectorIndex::new(2, 2)),
            Err(Error::IndexNotInSet { .. })
        ));
        assert!(c.exponents_for_kappa(&SectorIndex::new(1, 1)).is_err());
        assert!(c.exponents_for_kappa(&SectorIndex::new(0, 1)).unwrap().0.is_empty());
    }

    #[test]
    fn psi_examples() {
        let c = new_chain(&[2, 2]).unwrap();
        assert_eq!(c.psi(&Monomial(vec![0, 0])).unwrap(), 1);
        assert_eq!(c.psi(&Monomial(vec![1, 0])).unwrap(), 3);
        assert_eq!(new_chain(&[3]).unwrap().psi(&Monomial(vec![1])).unwrap(), 2);
        assert!(matches!(
            c.psi(&Monomial(vec![0, 1])),
            Err(Error::MonomialOutOfRange { .. })
        ));
        assert_eq!(c.psi_inverse(3).unwrap(), Monomial(vec![1, 0]));
        assert_eq!(c.psi_inverse(1).unwrap(), Monomial(vec![0, 0]));
        assert_eq!(new_chain(&[3]).unwrap().psi_inverse(1).unwrap(), Monomial(vec![0]));
        assert!(matches!(c.psi_inverse(2), Err(Error::IndexNotInSet { .. })));
    }

    #[test]
    fn psi_of_zero() {
        for a in [vec![2, 3, 4], vec![5, 2, 2, 3]] {
            let c = new_chain(&a).unwrap();
            let n = c.n();
            let expected: i128 = (1..=n)
                .map(|l| {
                    let t = (c.order() / c.d(l)) as i128;
                    if l % 2 == 1 {
                        t
                    } else {
                        -t
                    }
                })
                .sum();
            assert_eq!(c.psi(&Monomial(vec![0; n])).unwrap() as i128, expected);
        }
    }

    #[test]
    fn monomial_bases() {
        let (b, bp) = new_chain(&[2]).unwrap().monomial_basis();
        assert_eq!(b, vec![Monomial(vec![0])]);
        assert_eq!(bp, b);
        let (b, bp) = new_chain(&[3]).unwrap().monomial_basis();
        assert_eq!(b, vec![Monomial(vec![0]), Monomial(vec![1])]);
        assert_eq!(bp, b);
        let (b, bp) = new_chain(&[2, 2]).unwrap().monomial_basis();
        assert_eq!(bp, vec![Monomial(vec![0, 0]), Monomial(vec![1, 0])]);
        assert_eq!(
            b,
            vec![Monomial(vec![0, 0]), Monomial(vec![1, 0]), Monomial(vec![0, 1])]
        );
        let c = new_chain(&[3, 2, 4]).unwrap();
        let (b, bp) = c.monomial_basis();
        assert_eq!(b.len() as u64, c.mu());
        assert_eq!(bp.len() as u64, c.d(3) - c.d(2));
        for m in &b[bp.len()..] {
            assert_eq!(m.0[2], c.a(3) - 1);
            assert_eq!(m.0[1], 0);
        }
    }

    #[test]
    fn generators_and_ages() {
        let c = new_chain(&[2, 2]).unwrap();
        let g = c.symmetry_generator(1).unwrap();
        assert_eq!(g.phases, vec![r(1, 4), r(1, 2)]);
        assert_eq!(g.age, r(3, 4));
        let g = c.symmetry_generator(3).unwrap();
        assert_eq!(g.phases, vec![r(3, 4), r(1, 2)]);
        assert_eq!(g.age, r(5, 4));
        let g = new_chain(&[3]).unwrap().symmetry_generator(2).unwrap();
        assert_eq!(g.phases, vec![r(2, 3)]);
        assert_eq!(g.age, r(2, 3));
        assert!(c.symmetry_generator(4).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let s: SectorIndex = "2:3".parse().unwrap();
        assert_eq!(s, SectorIndex::new(2, 3));
        assert_eq!(s.to_string(), "2:3");
        assert!("23".parse::<SectorIndex>().is_err());
        let m: Monomial = "1,0,2".parse().unwrap();
        assert_eq!(m.to_string(), "1,0,2");
        assert_eq!(parse_rational("-3/6").unwrap(), r(-1, 2));
        assert_eq!(format_rational(&r(4, 2)), "2");
        assert_eq!(format_rational(&r(-1, 4)), "-1/4");
    }
}
