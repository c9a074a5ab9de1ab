//! Arbitrary-precision evaluation of the transcendental quantities.
//!
//! All functions take an explicit [`PrecContext`]; there is no global precision.
//! Real and complex values are MPFR/MPC numbers through `rug`.

mod cmatrix;
mod gamma;
pub mod quadrature;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use crate::chain::{frac, Rational};
use crate::error::{Error, Result};

pub use cmatrix::{LuFactors, PrecComplexMatrix};
pub use gamma::{
    c_kappa, central_charge, ch_gamma_column, ch_gamma_matrix, coefficient_lemma_residual,
    gamma_rational, orthant_integral_closed_form, orthant_integral_dual_form,
    reflection_residual, GammaCache,
};
pub use quadrature::orthant_integral_quadrature;
pub(crate) use gamma::ch_gamma_matrix_unchecked;

pub const DEFAULT_DIGITS: u32 = 128;
pub const MIN_DIGITS: u32 = 32;

/// Working precision in decimal digits and the derived acceptance tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrecContext {
    digits: u32,
}

impl Default for PrecContext {
    fn default() -> Self {
        PrecContext {
            digits: DEFAULT_DIGITS,
        }
    }
}

impl PrecContext {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::PrecisionTooLow { digits });
        }
        Ok(PrecContext { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Binary precision: the decimal digits plus 64 guard bits.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64
    }

    /// Residual acceptance threshold `τ = 10^{-(P-16)}`.
    pub fn tolerance(&self) -> Float {
        self.pow10(-(self.digits as i32 - 16))
    }

    /// Relative-error contract for single Gamma values, `10^{-(P-8)}`.
    pub fn gamma_tolerance(&self) -> Float {
        self.pow10(-(self.digits as i32 - 8))
    }

    pub fn pow10(&self, e: i32) -> Float {
        Float::with_val(self.bits(), 10).pow(e)
    }

    pub fn float(&self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn zero(&self) -> Complex {
        Complex::new(self.bits())
    }

    pub fn one(&self) -> Complex {
        Complex::with_val(self.bits(), 1)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// `2πi`.
    pub fn two_pi_i(&self) -> Complex {
        let two_pi = self.pi() * 2u32;
        Complex::with_val(self.bits(), (0, two_pi))
    }

    /// `(2π)^{e/2}` as a positive real; odd `e` uses the real square root.
    pub fn two_pi_half_power(&self, e: i32) -> Float {
        let two_pi = self.pi() * 2u32;
        let root = two_pi.sqrt();
        root.pow(e)
    }

    /// `i^k (2π)^k = (2πi)^k` with the power of `i` applied exactly.
    pub fn two_pi_i_power(&self, k: i32) -> Complex {
        let mag = (self.pi() * 2u32).pow(k);
        let zero = Float::new(self.bits());
        match k.rem_euclid(4) {
            0 => Complex::with_val(self.bits(), (mag, zero)),
            1 => Complex::with_val(self.bits(), (zero, mag)),
            2 => Complex::with_val(self.bits(), (-mag, zero)),
            _ => Complex::with_val(self.bits(), (zero, -mag)),
        }
    }

    pub fn rational(&self, r: &Rational) -> Float {
        let num = big_to_float(r.numer(), self.bits());
        let den = big_to_float(r.denom(), self.bits());
        num / den
    }

    /// `e[q] = exp(2πi q)`, reducing `q` modulo 1 exactly before any rounding.
    pub fn root_of_unity(&self, q: &Rational) -> Complex {
        let r = frac(q);
        // quarter turns are exact
        let quarter = Rational::from_integer(4.into()) * &r;
        if quarter.is_integer() {
            let (re, im) = match quarter.to_integer().to_u8() {
                Some(0) => (1, 0),
                Some(1) => (0, 1),
                Some(2) => (-1, 0),
                _ => (0, -1),
            };
            return Complex::with_val(self.bits(), (re, im));
        }
        let angle = self.rational(&r) * self.pi() * 2u32;
        let (sin, cos) = angle.sin_cos(Float::new(self.bits()));
        Complex::with_val(self.bits(), (cos, sin))
    }
}

fn big_to_float(b: &BigInt, bits: u32) -> Float {
    match b.to_i64() {
        Some(v) => Float::with_val(bits, v),
        None => {
            let parsed = Float::parse(b.to_string()).expect("decimal integer");
            Float::with_val(bits, parsed)
        }
    }
}

/// `|z|` at the precision of `z`.
pub fn modulus(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// Decimal string with `digits` significant digits.
pub fn format_float(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits as usize))
}

/// Short scientific rendering used for residuals.
pub fn format_residual(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(6))
}

/// Complex number as `{"re", "im", "digits"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexRecord {
    pub re: String,
    pub im: String,
    pub digits: u32,
}

impl ComplexRecord {
    /// A component below `|z|·10^{-digits}` is printed as `0`.
    pub fn new(z: &Complex, digits: u32) -> Self {
        let floor = modulus(z) * Float::with_val(z.prec().0, 10).pow(-(digits as i32));
        let part = |x: &Float| {
            if x.clone().abs() <= floor {
                "0".to_string()
            } else {
                format_float(x, digits)
            }
        };
        ComplexRecord {
            re: part(z.real()),
            im: part(z.imag()),
            digits,
        }
    }
}
