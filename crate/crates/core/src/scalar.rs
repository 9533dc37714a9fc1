//! Working scalar types shared by every evaluator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};

/// Complex working scalar. All products and series are evaluated in
/// double-precision complex arithmetic.
pub type QComplex = Complex64;

/// Unit roundoff for `f64`.
pub const EPS: f64 = f64::EPSILON / 2.0;

/// Default relative accuracy target for infinite products and series.
pub const DEFAULT_TARGET: f64 = 1e-16;

#[inline]
pub fn c(re: f64) -> QComplex {
    QComplex::new(re, 0.0)
}

pub(crate) fn ensure_finite(z: QComplex, what: &'static str) -> Result<QComplex> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else if z.re.is_nan() || z.im.is_nan() {
        Err(QError::NonFinite(what))
    } else {
        Err(QError::Overflow(what))
    }
}

/// The base `q` of every q-shifted factorial, restricted to `0 < q < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Base(f64);

impl Base {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(Base(q))
        } else {
            Err(QError::InvalidBase(q))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `q^2`, the base of the `(x; q^2)_n` factors in the even-index sums.
    pub fn squared(self) -> Base {
        Base(self.0 * self.0)
    }

    #[inline]
    pub fn pow(self, k: i32) -> f64 {
        self.0.powi(k)
    }

    /// `q^{n(n-1)/2}`, computed in log space so it underflows gracefully.
    pub fn pow_binom2(self, n: usize) -> f64 {
        let e = (n as f64) * (n as f64 - 1.0) / 2.0;
        (e * self.0.ln()).exp()
    }
}

impl TryFrom<f64> for Base {
    type Error = QError;
    fn try_from(q: f64) -> Result<Self> {
        Base::new(q)
    }
}

impl From<Base> for f64 {
    fn from(b: Base) -> f64 {
        b.0
    }
}

/// Order of a q-shifted factorial: a finite count of factors or the infinite product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochhammerOrder {
    Finite(usize),
    Infinity,
}

/// A computed value together with its error bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: QComplex,
    /// Absolute error estimate (truncation plus roundoff), always `>= 0`.
    pub err_estimate: f64,
    pub terms_used: usize,
    /// The computation was exact up to roundoff (finite product, terminating series).
    pub terminated: bool,
    /// The error estimate is a last-term heuristic rather than a certified tail bound.
    pub heuristic: bool,
}

impl EvalResult {
    pub fn exact(value: QComplex) -> Self {
        EvalResult {
            value,
            err_estimate: 0.0,
            terms_used: 0,
            terminated: true,
            heuristic: false,
        }
    }

    pub fn relative_error(&self) -> f64 {
        let m = self.value.norm();
        if m > 0.0 {
            self.err_estimate / m
        } else {
            self.err_estimate
        }
    }

    /// First-order product of two results: relative errors add.
    pub fn mul(self, other: EvalResult) -> EvalResult {
        let value = self.value * other.value;
        let err = self.err_estimate * other.value.norm()
            + other.err_estimate * self.value.norm()
            + EPS * value.norm();
        EvalResult {
            value,
            err_estimate: err,
            terms_used: self.terms_used + other.terms_used,
            terminated: self.terminated && other.terminated,
            heuristic: self.heuristic || other.heuristic,
        }
    }

    /// First-order quotient; the caller guarantees `other.value != 0`.
    pub fn div(self, other: EvalResult) -> EvalResult {
        let value = self.value / other.value;
        let rel = self.relative_error() + other.relative_error() + EPS;
        EvalResult {
            value,
            err_estimate: rel * value.norm(),
            terms_used: self.terms_used + other.terms_used,
            terminated: self.terminated && other.terminated,
            heuristic: self.heuristic || other.heuristic,
        }
    }

    pub fn scale(self, factor: QComplex) -> EvalResult {
        EvalResult {
            value: self.value * factor,
            err_estimate: self.err_estimate * factor.norm() + EPS * (self.value * factor).norm(),
            ..self
        }
    }

    /// Real part of a value that must be real, rejecting a non-negligible imaginary part.
    pub fn real_part(&self) -> Result<f64> {
        let abs = self.value.norm();
        let allowed = 1e-10 * abs + 4.0 * self.err_estimate;
        if self.value.im.abs() <= allowed {
            Ok(self.value.re)
        } else {
            Err(QError::NotReal {
                im: self.value.im,
                abs,
            })
        }
    }
}

/// Relative difference `|x - y| / max(|x|, |y|, floor)`.
pub fn relative_difference(x: QComplex, y: QComplex, floor: f64) -> f64 {
    let den = x.norm().max(y.norm()).max(floor).max(1e-300);
    (x - y).norm() / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_validation() {
        assert!(Base::new(0.5).is_ok());
        assert_eq!(Base::new(0.0), Err(QError::InvalidBase(0.0)));
        assert_eq!(Base::new(1.0), Err(QError::InvalidBase(1.0)));
        assert!(Base::new(-0.2).is_err());
        assert!(Base::new(f64::NAN).is_err());
    }

    #[test]
    fn binom_power_underflows_to_zero() {
        let q = Base::new(0.3).unwrap();
        assert_eq!(q.pow_binom2(0), 1.0);
        assert_eq!(q.pow_binom2(1), 1.0);
        assert!((q.pow_binom2(4) - 0.3f64.powi(6)).abs() < 1e-15);
        assert_eq!(q.pow_binom2(100), 0.0);
    }

    #[test]
    fn real_part_rejects_complex() {
        let r = EvalResult::exact(QComplex::new(1.0, 1e-3));
        assert!(matches!(r.real_part(), Err(QError::NotReal { .. })));
        let r = EvalResult::exact(QComplex::new(1.0, 1e-14));
        assert_eq!(r.real_part().unwrap(), 1.0);
    }
}
