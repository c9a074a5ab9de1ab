//! Dense exact matrices.
//!
//! [`RationalMatrix`] carries row/column labels (sector labels `m:κ` or lattice
//! positions `1..μ̃`). [`IntMatrix`] is the integer workhorse for the K-lattice
//! side, with overflow-checked arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::chain::{format_rational, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    labels: Vec<String>,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        RationalMatrix {
            labels,
            entries: vec![Rational::zero(); n * n],
        }
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let mut m = Self::zeros(labels);
        for i in 0..m.size() {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Square matrix from rows. Panics if `rows` is not square with `labels.len()` rows.
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<Rational>>) -> Self {
        let n = labels.len();
        assert_eq!(rows.len(), n);
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n);
            entries.extend(row);
        }
        RationalMatrix { labels, entries }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.size() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        let n = self.size();
        self.entries[i * n + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.size().max(1))
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        let mut t = Self::zeros(self.labels.clone());
        for i in 0..n {
            for j in 0..n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Product, skipping zero entries of `self` (the structured forms are very sparse).
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.size();
        assert_eq!(n, rhs.size());
        let mut out = Self::zeros(self.labels.clone());
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * n + j;
                    out.entries[idx] += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (o, r) in out.entries.iter_mut().zip(&rhs.entries) {
            *o += r;
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = self.clone();
        for o in out.entries.iter_mut() {
            *o *= s;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| {
            self.get(i, i).is_one() && (0..i).all(|j| self.get(i, j).is_zero())
        })
    }

    /// Determinant by Gaussian elimination with exact rationals; zero entries are skipped.
    pub fn determinant(&self) -> Rational {
        let n = self.size();
        let mut a: Vec<Vec<Rational>> = self.rows().map(|r| r.to_vec()).collect();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            let pivot_row: Vec<(usize, Rational)> = (col + 1..n)
                .filter(|&j| !a[col][j].is_zero())
                .map(|j| (j, a[col][j].clone()))
                .collect();
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &p;
                for (j, v) in &pivot_row {
                    let delta = &f * v;
                    a[r][*j] -= delta;
                }
                a[r][col] = Rational::zero();
            }
        }
        det
    }

    /// Exact inverse by Gauss–Jordan elimination, `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.size();
        let mut a: Vec<Vec<Rational>> = self.rows().map(|r| r.to_vec()).collect();
        let mut inv: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(pivot, col);
            inv.swap(pivot, col);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= &p;
                inv[col][j] /= &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    if !a[col][j].is_zero() {
                        let d = &f * &a[col][j];
                        a[r][j] -= d;
                    }
                    if !inv[col][j].is_zero() {
                        let d = &f * &inv[col][j];
                        inv[r][j] -= d;
                    }
                }
            }
        }
        Some(Self::from_rows(self.labels.clone(), inv))
    }

    /// Integer view, if every entry is an integer that fits in `i128`.
    pub fn to_int(&self) -> Option<IntMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|v| {
                if v.is_integer() {
                    v.to_integer().to_i128()
                } else {
                    None
                }
            })
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix {
            n: self.size(),
            entries,
        })
    }

    /// Row-major entries formatted as `p/q` strings.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.rows()
            .map(|r| r.iter().map(format_rational).collect())
            .collect()
    }

    /// Largest absolute entry of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> Rational {
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(Rational::zero(), |m, v| if v > m { v } else { m })
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_string_rows() {
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Labels `1..=n` for K-lattice matrices.
pub fn position_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.entries[i * self.n + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i128>> {
        self.entries.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn to_rational(&self, labels: Vec<String>) -> RationalMatrix {
        assert_eq!(labels.len(), self.n);
        RationalMatrix {
            labels,
            entries: self
                .entries
                .iter()
                .map(|&v| Rational::from_integer(BigInt::from(v)))
                .collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let n = self.n;
        assert_eq!(n, rhs.n);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b == 0 {
                        continue;
                    }
                    let idx = i * n + j;
                    out.entries[idx] = a
                        .checked_mul(b)
                        .and_then(|p| out.entries[idx].checked_add(p))
                        .ok_or(Error::Overflow("integer matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 1 && (0..i).all(|j| self.get(i, j) == 0))
    }

    /// Inverse of an upper unitriangular matrix by back substitution.
    pub fn unitriangular_inverse(&self) -> Result<Self> {
        if !self.is_upper_unitriangular() {
            return Err(Error::InvalidArgument(
                "matrix is not upper unitriangular".into(),
            ));
        }
        let n = self.n;
        let mut inv = Self::identity(n);
        // column j of the inverse solves U x = e_j
        for j in 0..n {
            for i in (0..j).rev() {
                let mut s: i128 = 0;
                for k in i + 1..=j {
                    s = self
                        .get(i, k)
                        .checked_mul(inv.get(k, j))
                        .and_then(|p| s.checked_add(p))
                        .ok_or(Error::Overflow("unitriangular inverse"))?;
                }
                inv.set(i, j, -s);
            }
        }
        Ok(inv)
    }

    /// Determinant via exact rational elimination.
    pub fn determinant(&self) -> BigInt {
        let det = self.to_rational(position_labels(self.n)).determinant();
        debug_assert!(det.is_integer());
        det.to_integer()
    }

    /// Bilinear form `uᵀ M v`.
    pub fn pair(&self, u: &[i128], v: &[i128]) -> Result<i128> {
        let mut s: i128 = 0;
        for i in 0..self.n {
            if u[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                let m = self.get(i, j);
                if m == 0 || v[j] == 0 {
                    continue;
                }
                s = u[i]
                    .checked_mul(m)
                    .and_then(|p| p.checked_mul(v[j]))
                    .and_then(|p| s.checked_add(p))
                    .ok_or(Error::Overflow("bilinear pairing"))?;
            }
        }
        Ok(s)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            let parts: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", parts.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::rat;

    #[test]
    fn unitriangular_inverse_round_trip() {
        let u = IntMatrix::from_rows(&[vec![1, 2, -1], vec![0, 1, 3], vec![0, 0, 1]]);
        let inv = u.unitriangular_inverse().unwrap();
        assert_eq!(u.mul(&inv).unwrap(), IntMatrix::identity(3));
        assert!(IntMatrix::from_rows(&[vec![2]]).unitriangular_inverse().is_err());
    }

    #[test]
    fn power_by_squaring() {
        let r = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]);
        assert_eq!(r.pow(4).unwrap(), IntMatrix::identity(2));
        assert_eq!(r.pow(2).unwrap(), IntMatrix::from_rows(&[vec![-1, 0], vec![0, -1]]));
        let big = IntMatrix::from_rows(&[vec![i128::MAX / 2, 1], vec![0, 3]]);
        assert!(big.pow(3).is_err());
    }

    #[test]
    fn rational_determinant_with_pivoting() {
        let labels = position_labels(3);
        let m = RationalMatrix::from_rows(
            labels,
            vec![
                vec![rat(0, 1), rat(1, 4), rat(0, 1)],
                vec![rat(1, 4), rat(0, 1), rat(0, 1)],
                vec![rat(0, 1), rat(0, 1), rat(-1, 2)],
            ],
        );
        assert_eq!(m.determinant(), rat(1, 32));
        assert!(m.is_symmetric());
        assert!(!m.is_diagonal());
        let singular = RationalMatrix::from_rows(
            position_labels(2),
            vec![vec![rat(1, 2), rat(1, 1)], vec![rat(1, 4), rat(1, 2)]],
        );
        assert!(singular.determinant().is_zero());
        assert!(singular.inverse().is_none());
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RationalMatrix::identity(position_labels(3)));
        assert_eq!(inv.get(0, 1), &rat(4, 1));
    }

    #[test]
    fn integer_view() {
        let m = IntMatrix::from_rows(&[vec![1, -1], vec![0, 1]]);
        let r = m.to_rational(position_labels(2));
        assert_eq!(r.to_int().unwrap(), m);
        let mut q = r.clone();
        q.set(0, 1, rat(1, 3));
        assert!(q.to_int().is_none());
        assert_eq!(m.pair(&[1, 0], &[0, 1]).unwrap(), -1);
    }
}
