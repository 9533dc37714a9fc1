//! Numerical q-series: q-shifted factorials, basic hypergeometric series,
//! Askey-Wilson polynomials, q-beta integrals by periodic quadrature, and a
//! registry of identities checked side against side.

pub mod askey_wilson;
pub mod error;
pub mod harness;
pub mod hyperseries;
pub mod identities;
pub mod par;
pub mod qcore;
pub mod quadrature;
pub mod scalar;

pub use error::{QError, Result, Side};
pub use scalar::{c, Base, EvalResult, PochhammerOrder, QComplex};
