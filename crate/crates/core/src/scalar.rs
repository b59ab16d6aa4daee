//! Scalar fields: exact Gaussian rationals and complex doubles.
//!
//! Everything in the crate is generic over [`Scalar`]. The exact field
//! `ℚ(i)` (complex numbers with rational real and imaginary parts) makes
//! every theorem-level identity checkable as literal equality; the float
//! field trades that for access to transcendental constructions (contour
//! quadrature, eigendecompositions) behind the [`FloatScalar`] subtrait.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact scalars: Gaussian rationals.
pub type ExactScalar = Complex<BigRational>;

/// Float scalars: complex doubles.
pub type C64 = Complex<f64>;

/// A commutative field with conjugation, suitable as the coefficient
/// field of the symbol calculus. `Zero`/`One` come from `num_traits`, so
/// `S::zero()`, `S::one()` and `x.is_zero()` resolve the same way on
/// generic and concrete types.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and equality checks can demand
    /// literal zero.
    const EXACT: bool;

    /// The imaginary unit.
    fn i() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Build `re + im·i` from exact rational parts (rounded in float mode).
    fn from_rational_parts(re: &BigRational, im: &BigRational) -> Self;
    fn conj(&self) -> Self;
    /// Multiplicative inverse; `None` for exact zero.
    fn try_inv(&self) -> Option<Self>;
    /// Approximate modulus, used for pivoting and tolerance checks.
    fn abs(&self) -> f64;
    /// Approximate value as a complex double (exact values are rounded).
    fn approx(&self) -> C64;
    /// Scalar encoding used by all JSON schemas: `{"re": R, "im": R}`
    /// with `R` a `"p/q"` string in exact mode and a number in float mode.
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, String>;
}

/// Scalars that can absorb arbitrary complex doubles. Only the float
/// field implements this; operations needing transcendental constants
/// (contour nodes, eigensolvers) are bounded by it.
pub trait FloatScalar: Scalar {
    fn from_c64(z: C64) -> Self;
}

fn big_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rational_to_json(r: &BigRational) -> Value {
    if r.denom().is_one() {
        Value::String(r.numer().to_string())
    } else {
        Value::String(format!("{}/{}", r.numer(), r.denom()))
    }
}

fn rational_from_json(v: &Value) -> Result<BigRational, String> {
    match v {
        Value::String(s) => {
            BigRational::from_str(s).map_err(|e| format!("bad rational `{s}`: {e}"))
        }
        _ => Err(format!("expected a \"p/q\" string, got {v}")),
    }
}

impl Scalar for ExactScalar {
    const EXACT: bool = true;

    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn from_int(n: i64) -> Self {
        Complex::new(big_ratio(n, 1), BigRational::zero())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(big_ratio(num, den), BigRational::zero())
    }
    fn from_rational_parts(re: &BigRational, im: &BigRational) -> Self {
        Complex::new(re.clone(), im.clone())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(Complex::new(&self.re / &n, -&self.im / &n))
    }
    fn abs(&self) -> f64 {
        let n = &self.re * &self.re + &self.im * &self.im;
        n.to_f64().unwrap_or(f64::INFINITY).sqrt()
    }
    fn approx(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn to_json(&self) -> Value {
        serde_json::json!({ "re": rational_to_json(&self.re), "im": rational_to_json(&self.im) })
    }
    fn from_json(v: &Value) -> Result<Self, String> {
        let obj = v.as_object().ok_or_else(|| format!("expected object, got {v}"))?;
        let re = rational_from_json(obj.get("re").ok_or("missing field `re`")?)?;
        let im = rational_from_json(obj.get("im").ok_or("missing field `im`")?)?;
        Ok(Complex::new(re, im))
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn i() -> Self {
        C64::new(0.0, 1.0)
    }
    fn from_int(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        C64::new(num as f64 / den as f64, 0.0)
    }
    fn from_rational_parts(re: &BigRational, im: &BigRational) -> Self {
        C64::new(re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN))
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(C64::new(1.0, 0.0) / self)
        }
    }
    fn abs(&self) -> f64 {
        self.norm()
    }
    fn approx(&self) -> C64 {
        *self
    }
    fn to_json(&self) -> Value {
        serde_json::json!({ "re": self.re, "im": self.im })
    }
    fn from_json(v: &Value) -> Result<Self, String> {
        let obj = v.as_object().ok_or_else(|| format!("expected object, got {v}"))?;
        let num = |key: &str| -> Result<f64, String> {
            obj.get(key)
                .ok_or_else(|| format!("missing field `{key}`"))?
                .as_f64()
                .ok_or_else(|| format!("field `{key}` must be a number in float mode"))
        };
        Ok(C64::new(num("re")?, num("im")?))
    }
}

impl FloatScalar for C64 {
    fn from_c64(z: C64) -> Self {
        z
    }
}

/// Exact Gaussian rational from integer real and imaginary parts.
pub fn gauss_int<S: Scalar>(re: i64, im: i64) -> S {
    S::from_int(re) + S::i() * S::from_int(im)
}

/// `re_n/re_d + (im_n/im_d)·i`.
pub fn gauss_ratio<S: Scalar>(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> S {
    S::from_ratio(re_n, re_d) + S::i() * S::from_ratio(im_n, im_d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_inverse_is_exact() {
        let z: ExactScalar = gauss_ratio(3, 5, 4, 5);
        let inv = z.try_inv().unwrap();
        assert_eq!(z * inv, ExactScalar::one());
    }

    #[test]
    fn exact_unit_modulus() {
        // |3/5 + 4/5 i| = 1
        let z: ExactScalar = gauss_ratio(3, 5, 4, 5);
        assert_eq!(z.clone() * Scalar::conj(&z), ExactScalar::one());
    }

    #[test]
    fn json_round_trip_exact() {
        let z: ExactScalar = gauss_ratio(-7, 3, 1, 2);
        let v = z.to_json();
        assert_eq!(ExactScalar::from_json(&v).unwrap(), z);
    }

    #[test]
    fn json_round_trip_float() {
        let z = C64::new(0.125, -3.5);
        let v = z.to_json();
        assert_eq!(C64::from_json(&v).unwrap(), z);
    }

    #[test]
    fn json_mode_mismatch_rejected() {
        let exact: ExactScalar = gauss_int(1, 0);
        assert!(C64::from_json(&exact.to_json()).is_err());
        let float = C64::new(1.0, 0.0);
        assert!(ExactScalar::from_json(&float.to_json()).is_err());
    }
}
