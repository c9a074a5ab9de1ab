use rug::{Assign, Complex, Float};

use super::{modulus, ComplexRecord, PrecContext};
use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;

/// Dense row-major matrix of arbitrary-precision complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecComplexMatrix {
    rows: usize,
    cols: usize,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    digits: u32,
    bits: u32,
    entries: Vec<Complex>,
}

impl PrecComplexMatrix {
    pub fn zeros(row_labels: Vec<String>, col_labels: Vec<String>, ctx: &PrecContext) -> Self {
        let rows = row_labels.len();
        let cols = col_labels.len();
        PrecComplexMatrix {
            rows,
            cols,
            row_labels,
            col_labels,
            digits: ctx.digits(),
            bits: ctx.bits(),
            entries: vec![ctx.zero(); rows * cols],
        }
    }

    /// Builds a matrix from column vectors.
    pub fn from_columns(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        columns: Vec<Vec<Complex>>,
        ctx: &PrecContext,
    ) -> Self {
        let mut m = Self::zeros(row_labels, col_labels, ctx);
        assert_eq!(columns.len(), m.cols, "column count");
        for (j, col) in columns.into_iter().enumerate() {
            assert_eq!(col.len(), m.rows, "column length");
            for (i, z) in col.into_iter().enumerate() {
                m.entries[i * m.cols + j] = z;
            }
        }
        m
    }

    pub fn from_rational(r: &RationalMatrix, ctx: &PrecContext) -> Self {
        let labels = r.labels().to_vec();
        let mut m = Self::zeros(labels.clone(), labels, ctx);
        let n = r.size();
        for i in 0..n {
            for j in 0..n {
                let q = r.get(i, j);
                if !num_traits::Zero::is_zero(q) {
                    m.entries[i * n + j] = Complex::with_val(ctx.bits(), ctx.rational(q));
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Complex {
        &mut self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex) {
        self.entries[i * self.cols + j] = z;
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        PrecComplexMatrix {
            rows: self.cols,
            cols: self.rows,
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            digits: self.digits,
            bits: self.bits,
            entries,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions");
        let mut out = PrecComplexMatrix {
            rows: self.rows,
            cols: rhs.cols,
            row_labels: self.row_labels.clone(),
            col_labels: rhs.col_labels.clone(),
            digits: self.digits,
            bits: self.bits,
            entries: vec![Complex::new(self.bits); self.rows * rhs.cols],
        };
        let mut tmp = Complex::new(self.bits);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    tmp.assign(a * rhs.get(k, j));
                    out.entries[i * rhs.cols + j] += &tmp;
                }
            }
        }
        out
    }

    /// `R · self` for an exact (typically sparse) matrix `R`.
    pub fn left_mul_rational(&self, r: &RationalMatrix, ctx: &PrecContext) -> Self {
        assert_eq!(r.size(), self.rows, "inner dimensions");
        let mut out = Self::zeros(r.labels().to_vec(), self.col_labels.clone(), ctx);
        let mut tmp = Complex::new(self.bits);
        for i in 0..r.size() {
            for k in 0..r.size() {
                let q = r.get(i, k);
                if num_traits::Zero::is_zero(q) {
                    continue;
                }
                let f = ctx.rational(q);
                for j in 0..self.cols {
                    tmp.assign(self.get(k, j) * &f);
                    out.entries[i * self.cols + j] += &tmp;
                }
            }
        }
        out
    }

    /// `diag(d) · self`.
    pub fn scale_rows(&self, d: &[Complex]) -> Self {
        assert_eq!(d.len(), self.rows, "diagonal length");
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * self.cols + j] *= &d[i];
            }
        }
        out
    }

    pub fn scale(&self, s: &Float) -> Self {
        let mut out = self.clone();
        for z in &mut out.entries {
            *z *= s;
        }
        out
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> Float {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape");
        let mut best = Float::new(self.bits);
        for (a, b) in self.entries.iter().zip(&rhs.entries) {
            let d = modulus(&Complex::with_val(self.bits, a - b));
            if d > best {
                best = d;
            }
        }
        best
    }

    pub fn max_abs_diff_rational(&self, rhs: &RationalMatrix, ctx: &PrecContext) -> Float {
        self.max_abs_diff(&Self::from_rational(rhs, ctx))
    }

    pub fn to_records(&self, digits: u32) -> Vec<Vec<ComplexRecord>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| ComplexRecord::new(self.get(i, j), digits))
                    .collect()
            })
            .collect()
    }

    /// LU factorization with partial pivoting. Fails with [`Error::SingularChGamma`]
    /// when a pivot modulus is at or below `threshold`.
    pub fn lu(&self, threshold: &Float) -> Result<LuFactors> {
        assert_eq!(self.rows, self.cols, "square matrix");
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot: Option<Float> = None;
        let mut tmp = Complex::new(self.bits);
        for k in 0..n {
            let mut p = k;
            let mut best = modulus(&a[k * n + k]);
            for i in (k + 1)..n {
                let m = modulus(&a[i * n + k]);
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best <= *threshold {
                return Err(Error::SingularChGamma {
                    pivot: super::format_residual(&best),
                });
            }
            if min_pivot.as_ref().map_or(true, |m| best < *m) {
                min_pivot = Some(best);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k].clone();
            for i in (k + 1)..n {
                if a[i * n + k].is_zero() {
                    continue;
                }
                let factor = Complex::with_val(self.bits, &a[i * n + k] / &pivot);
                for j in (k + 1)..n {
                    tmp.assign(&factor * &a[k * n + j]);
                    a[i * n + j] -= &tmp;
                }
                a[i * n + k] = factor;
            }
        }
        Ok(LuFactors {
            n,
            col_labels: self.col_labels.clone(),
            bits: self.bits,
            lu: a,
            perm,
            min_pivot: min_pivot.unwrap_or_else(|| Float::with_val(self.bits, 1)),
        })
    }
}

/// Packed `PA = LU` factors.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    col_labels: Vec<String>,
    bits: u32,
    lu: Vec<Complex>,
    perm: Vec<usize>,
    min_pivot: Float,
}

impl LuFactors {
    pub fn min_pivot(&self) -> &Float {
        &self.min_pivot
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &PrecComplexMatrix) -> PrecComplexMatrix {
        let n = self.n;
        assert_eq!(b.rows, n, "right-hand side rows");
        let mut out = b.clone();
        let mut x = vec![Complex::new(self.bits); n];
        let mut tmp = Complex::new(self.bits);
        for j in 0..b.cols {
            for i in 0..n {
                x[i].assign(b.get(self.perm[i], j));
            }
            for i in 0..n {
                for k in 0..i {
                    let l = &self.lu[i * n + k];
                    if l.is_zero() {
                        continue;
                    }
                    tmp.assign(l * &x[k]);
                    x[i] -= &tmp;
                }
            }
            for i in (0..n).rev() {
                for k in (i + 1)..n {
                    tmp.assign(&self.lu[i * n + k] * &x[k]);
                    x[i] -= &tmp;
                }
                x[i] /= &self.lu[i * n + i];
            }
            for i in 0..n {
                out.entries[i * b.cols + j].assign(&x[i]);
            }
        }
        out.row_labels = self.col_labels.clone();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::rat;
    use crate::matrix::position_labels;

    fn ctx() -> PrecContext {
        PrecContext::new(50).unwrap()
    }

    fn sample(ctx: &PrecContext) -> PrecComplexMatrix {
        let labels = position_labels(3);
        let cols = vec![
            vec![
                Complex::with_val(ctx.bits(), (0, 0)),
                Complex::with_val(ctx.bits(), (2, 1)),
                Complex::with_val(ctx.bits(), (1, 0)),
            ],
            vec![
                Complex::with_val(ctx.bits(), (3, -1)),
                Complex::with_val(ctx.bits(), (0, 0)),
                Complex::with_val(ctx.bits(), (1, 5)),
            ],
            vec![
                Complex::with_val(ctx.bits(), (1, 1)),
                Complex::with_val(ctx.bits(), (-2, 0)),
                Complex::with_val(ctx.bits(), (4, 0)),
            ],
        ];
        PrecComplexMatrix::from_columns(labels.clone(), labels, cols, ctx)
    }

    #[test]
    fn lu_solve_recovers_identity() {
        let ctx = ctx();
        let a = sample(&ctx);
        let tau = ctx.tolerance();
        let lu = a.lu(&tau).unwrap();
        let x = lu.solve(&a);
        let labels = position_labels(3);
        let id = RationalMatrix::identity(labels);
        assert!(x.max_abs_diff_rational(&id, &ctx) < tau);
        let back = a.mul(&x);
        assert!(back.max_abs_diff(&a) < tau);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let ctx = ctx();
        let labels = position_labels(2);
        let one = ctx.one();
        let cols = vec![vec![one.clone(), one.clone()], vec![one.clone(), one]];
        let a = PrecComplexMatrix::from_columns(labels.clone(), labels, cols, &ctx);
        assert!(matches!(
            a.lu(&ctx.tolerance()),
            Err(Error::SingularChGamma { .. })
        ));
    }

    #[test]
    fn rational_products_and_transpose() {
        let ctx = ctx();
        let a = sample(&ctx);
        let labels = position_labels(3);
        let mut r = RationalMatrix::zeros(labels);
        r.set(0, 2, rat(1, 2));
        r.set(1, 1, rat(-3, 1));
        r.set(2, 0, rat(2, 7));
        let direct = PrecComplexMatrix::from_rational(&r, &ctx).mul(&a);
        let sparse = a.left_mul_rational(&r, &ctx);
        assert!(direct.max_abs_diff(&sparse) < ctx.tolerance());
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().get(0, 1), a.get(1, 0));
    }

    #[test]
    fn row_scaling_matches_diagonal_product() {
        let ctx = ctx();
        let a = sample(&ctx);
        let d = vec![
            ctx.root_of_unity(&rat(1, 3)),
            ctx.one(),
            ctx.root_of_unity(&rat(-1, 6)),
        ];
        let labels = position_labels(3);
        let mut dm = PrecComplexMatrix::zeros(labels.clone(), labels, &ctx);
        for (i, z) in d.iter().enumerate() {
            dm.set(i, i, z.clone());
        }
        assert!(dm.mul(&a).max_abs_diff(&a.scale_rows(&d)) < ctx.tolerance());
    }
}
