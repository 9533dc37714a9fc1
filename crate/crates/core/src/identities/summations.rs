//! Closed-form summations used to collapse terminating inner series.

use crate::error::Result;
use crate::qcore::product_ratio_n;
use crate::scalar::{c, Base, QComplex};

/// `_3phi_2(q^{-n}, alpha q^n, 0; sqrt(q alpha), -sqrt(q alpha); q, q)`:
/// zero for odd `n`, `(-1)^l q^{l^2} (q; q^2)_l alpha^l / (q alpha; q^2)_l` for `n = 2l`.
pub fn verma_jain_sum(n: usize, alpha: QComplex, q: Base) -> Result<QComplex> {
    if n % 2 == 1 {
        return Ok(c(0.0));
    }
    let l = n / 2;
    let q2 = q.squared();
    let r = product_ratio_n(&[c(q.get())], &[alpha * q.get()], q2, l)?;
    let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(r.value * alpha.powi(l as i32) * (sign * q.get().powi((l * l) as i32)))
}

/// `_4phi_3(q^{-n}, alpha q^n, sqrt(lambda), -sqrt(lambda); sqrt(q alpha), -sqrt(q alpha), lambda; q, q)`:
/// zero for odd `n`, `(q, alpha q / lambda; q^2)_{n/2} lambda^{n/2} / (q alpha, q lambda; q^2)_{n/2}` otherwise.
pub fn andrews_watson_sum(n: usize, alpha: QComplex, lambda: QComplex, q: Base) -> Result<QComplex> {
    if n % 2 == 1 {
        return Ok(c(0.0));
    }
    let l = n / 2;
    let qv = q.get();
    let r = product_ratio_n(&[c(qv), alpha * qv / lambda], &[alpha * qv, lambda * qv], q.squared(), l)?;
    Ok(r.value * lambda.powi(l as i32))
}

/// `_2phi_1(a, b; c; q, c/ab) = (c/a, c/b; q)_inf / (c, c/ab; q)_inf`.
pub fn q_gauss_sum(a: QComplex, b: QComplex, cc: QComplex, q: Base) -> Result<crate::scalar::EvalResult> {
    crate::qcore::product_ratio(&[cc / a, cc / b], &[cc, cc / (a * b)], q)
}

/// `_2phi_1(q^{-n}, b; c; q, q) = (c/b; q)_n b^n / (c; q)_n`.
pub fn q_chu_sum(n: usize, b: QComplex, cc: QComplex, q: Base) -> Result<QComplex> {
    Ok(product_ratio_n(&[cc / b], &[cc], q, n)?.value * b.powi(n as i32))
}

/// `_3phi_2(q^{-n}, alpha q^n, alpha uv/q; alpha u, alpha v; q, q)
///  = (q/u, q/v; q)_n (alpha uv/q)^n / (alpha u, alpha v; q)_n`.
pub fn q_saalschutz_sum(n: usize, alpha: QComplex, u: QComplex, v: QComplex, q: Base) -> Result<QComplex> {
    let qv = q.get();
    let r = product_ratio_n(&[qv / u, qv / v], &[alpha * u, alpha * v], q, n)?;
    Ok(r.value * (alpha * u * v / qv).powi(n as i32))
}
