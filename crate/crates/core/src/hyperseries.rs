//! Basic hypergeometric series `_{r+1}phi_r`, very-well-poised `_{r+1}W_r`, and
//! the truncation machinery behind them.
//!
//! Terminating series (a numerator parameter equal to `q^{-n}`) are summed
//! exactly. Convergent series are summed until the next term falls below the
//! accuracy target and a certified geometric tail bound confirms it.

use crate::error::{QError, Result};
use crate::qcore::qpoch_inf;
use crate::scalar::{c, ensure_finite, Base, EvalResult, QComplex, DEFAULT_TARGET, EPS};

/// Maximum number of terms summed for a non-terminating series.
pub const TERM_BUDGET: usize = 100_000;

/// Largest `n` for which a numerator parameter is recognised as `q^{-n}`.
pub const MAX_TERMINATING_DEGREE: usize = 10_000;

/// Relative tolerance for recognising `q^{-n}`.
pub const TERMINATION_TOLERANCE: f64 = 1e-12;

/// Indices scanned for a certified ratio bound before giving up.
pub const RATIO_SCAN: usize = 50;

/// Description of `_{r+1}phi_r(numerator; denominator; q, argument)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub numerator: Vec<QComplex>,
    pub denominator: Vec<QComplex>,
    pub q: Base,
    pub argument: QComplex,
}

impl SeriesSpec {
    pub fn new(numerator: Vec<QComplex>, denominator: Vec<QComplex>, q: Base, argument: QComplex) -> Result<Self> {
        if numerator.len() != denominator.len() + 1 {
            return Err(QError::Domain(format!(
                "a _(r+1)phi_r series needs one more numerator than denominator parameter, got {} and {}",
                numerator.len(),
                denominator.len()
            )));
        }
        Ok(SeriesSpec {
            numerator,
            denominator,
            q,
            argument,
        })
    }

    /// The smallest `n` such that some numerator parameter equals `q^{-n}`.
    pub fn terminating_degree(&self) -> Option<(usize, usize)> {
        self.numerator
            .iter()
            .enumerate()
            .filter_map(|(i, &u)| terminating_index(u, self.q).map(|n| (n, i)))
            .min()
    }
}

/// Very-well-poised series `_{r+1}W_r(a1; tail; q, argument)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VwpSpec {
    pub a1: QComplex,
    pub tail: Vec<QComplex>,
    pub q: Base,
    pub argument: QComplex,
}

impl VwpSpec {
    pub fn new(a1: QComplex, tail: Vec<QComplex>, q: Base, argument: QComplex) -> Result<Self> {
        if a1 == c(0.0) {
            return Err(QError::Domain("very-well-poised series needs a1 != 0".into()));
        }
        Ok(VwpSpec { a1, tail, q, argument })
    }

    /// Expanded `_{r+1}phi_r` with `q sqrt(a1), -q sqrt(a1)` on top and
    /// `sqrt(a1), -sqrt(a1), q a1 / a_j` below (principal square root).
    pub fn expand(&self) -> Result<SeriesSpec> {
        let s = self.a1.sqrt();
        let qv = self.q.get();
        let mut num = vec![self.a1, s * qv, -s * qv];
        num.extend_from_slice(&self.tail);
        let mut den = vec![s, -s];
        for &t in &self.tail {
            if t == c(0.0) {
                return Err(QError::Domain("very-well-poised tail parameter must be nonzero".into()));
            }
            den.push(self.a1 * qv / t);
        }
        SeriesSpec::new(num, den, self.q, self.argument)
    }
}

/// `Some(n)` when `u` equals `q^{-n}` to relative [`TERMINATION_TOLERANCE`].
pub fn terminating_index(u: QComplex, q: Base) -> Option<usize> {
    if u.re <= 0.0 {
        return None;
    }
    let m = u.norm();
    if m < 1.0 - TERMINATION_TOLERANCE {
        return None;
    }
    let n = (-(m.ln()) / q.get().ln()).round();
    if n < 0.0 || n > MAX_TERMINATING_DEGREE as f64 {
        return None;
    }
    let target = q.get().powf(-n);
    if (u - c(target)).norm() <= TERMINATION_TOLERANCE * target {
        Some(n as usize)
    } else {
        None
    }
}

fn denominator_guard(b: QComplex, qk: f64, k: usize) -> Result<QComplex> {
    let f = c(1.0) - b * qk;
    if f.norm() <= 1e-13 * (1.0 + (b * qk).norm()) {
        Err(QError::DenominatorPole {
            param: format!("{b}"),
            index: k,
        })
    } else {
        Ok(f)
    }
}

/// Exact sum of `_{r+1}phi_r(q^{-n}, others; den; q, z)` over its `n + 1` terms.
///
/// The `q^{-n}` factor is formed as `1 - q^{k-n}` so no rounding enters the
/// terminating parameter.
/// `sum_k |t_k|` for the terms of [`terminating_sum`]: the scale against which
/// the cancellation in a terminating sum is measured.
pub fn terminating_abs_sum(n: usize, others: &[QComplex], den: &[QComplex], q: Base, z: QComplex) -> Result<f64> {
    let qv = q.get();
    let mut term = 1.0;
    let mut total = 0.0;
    let mut qk = 1.0;
    for k in 0..=n {
        total += term;
        if k == n {
            break;
        }
        let mut ratio = z.norm() * (1.0 - qv.powi(k as i32 - n as i32)).abs();
        for &a in others {
            ratio *= (c(1.0) - a * qk).norm();
        }
        let mut bottom = (1.0 - qk * qv).abs();
        for &b in den {
            bottom *= denominator_guard(b, qk, k)?.norm();
        }
        term *= ratio / bottom;
        qk *= qv;
    }
    Ok(total)
}

pub fn terminating_sum(n: usize, others: &[QComplex], den: &[QComplex], q: Base, z: QComplex) -> Result<EvalResult> {
    let qv = q.get();
    let mut term = c(1.0);
    let mut sum = c(0.0);
    let mut weighted_abs = 0.0;
    let per_step = (others.len() + den.len() + 3) as f64;
    let mut qk = 1.0;
    for k in 0..=n {
        sum += term;
        weighted_abs += term.norm() * (1.0 + k as f64 * per_step);
        if k == n {
            break;
        }
        let mut ratio = z * (1.0 - qv.powi(k as i32 - n as i32));
        for &a in others {
            ratio *= c(1.0) - a * qk;
        }
        let mut bottom = c(1.0 - qk * qv);
        for &b in den {
            bottom *= denominator_guard(b, qk, k)?;
        }
        term *= ratio / bottom;
        qk *= qv;
    }
    let sum = ensure_finite(sum, "terminating series")?;
    Ok(EvalResult {
        value: sum,
        err_estimate: EPS * weighted_abs,
        terms_used: n + 1,
        terminated: true,
        heuristic: false,
    })
}

/// `q^{n(n-1)/2} * _{r+1}phi_r(q^{-n}, others; den; q, q x)` in the regrouped form
/// `sum_k (-1)^k q^{(n-k)(n-k-1)/2} (q^{n-k+1}; q)_k (others; q)_k / (q, den; q)_k x^k`,
/// whose terms stay bounded where the plain form overflows.
pub fn terminating_rescaled(n: usize, others: &[QComplex], den: &[QComplex], q: Base, x: QComplex) -> Result<EvalResult> {
    let qv = q.get();
    // (q; q)_m for m = 0..=n
    let mut qq = Vec::with_capacity(n + 1);
    qq.push(1.0);
    for m in 1..=n {
        qq.push(qq[m - 1] * (1.0 - qv.powi(m as i32)));
    }
    let per_step = (others.len() + den.len() + 3) as f64;
    // ratio_k = (others)_k x^k / (q, den)_k
    let mut ratio = c(1.0);
    let mut sum = c(0.0);
    let mut weighted_abs = 0.0;
    let mut qk = 1.0;
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let shifted = qq[n] / qq[n - k];
        let t = ratio * (sign * q.pow_binom2(n - k) * shifted);
        sum += t;
        weighted_abs += t.norm() * (1.0 + k as f64 * per_step);
        if k == n {
            break;
        }
        let mut top = x;
        for &a in others {
            top *= c(1.0) - a * qk;
        }
        let mut bottom = c(1.0 - qk * qv);
        for &b in den {
            bottom *= denominator_guard(b, qk, k)?;
        }
        ratio *= top / bottom;
        qk *= qv;
    }
    let sum = ensure_finite(sum, "rescaled terminating series")?;
    Ok(EvalResult {
        value: sum,
        err_estimate: EPS * weighted_abs,
        terms_used: n + 1,
        terminated: true,
        heuristic: false,
    })
}

/// Certified bound on successive term ratios of a convergent series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBound {
    pub rho: f64,
    /// `|t_{k+1} / t_k| <= rho` for every `k >= valid_from`.
    pub valid_from: usize,
}

/// `|z| prod(1 + |a_i| q^K) / ((1 - q^{K+1}) prod(1 - |b_j| q^K))`, which
/// dominates `|t_{k+1}/t_k|` for all `k >= K`; `None` while some `|b_j| q^K >= 1`.
fn ratio_majorant(spec: &SeriesSpec, k: usize) -> Option<f64> {
    let qv = spec.q.get();
    let qk = qv.powi(k as i32);
    let mut rho = spec.argument.norm() / (1.0 - qk * qv);
    for a in &spec.numerator {
        rho *= 1.0 + a.norm() * qk;
    }
    for b in &spec.denominator {
        let d = 1.0 - b.norm() * qk;
        if d <= 0.0 {
            return None;
        }
        rho /= d;
    }
    Some(rho)
}

/// First index at or after `from_index` (within [`RATIO_SCAN`] indices) whose
/// ratio majorant is below one.
pub fn term_ratio_bound(spec: &SeriesSpec, from_index: usize) -> Result<RatioBound> {
    if let Some((n, _)) = spec.terminating_degree() {
        return Err(QError::Domain(format!(
            "series terminates after {} terms; no tail to bound",
            n + 1
        )));
    }
    if spec.argument.norm() >= 1.0 {
        return Err(QError::Divergent(spec.argument.norm()));
    }
    for k in from_index..from_index + RATIO_SCAN {
        if let Some(rho) = ratio_majorant(spec, k) {
            if rho < 1.0 {
                return Ok(RatioBound { rho, valid_from: k });
            }
        }
    }
    Err(QError::NoRatioBound(RATIO_SCAN))
}

/// Sum `_{r+1}phi_r` to relative accuracy `target`.
pub fn phi_eval(spec: &SeriesSpec, target: f64) -> Result<EvalResult> {
    if !(target > 0.0) {
        return Err(QError::Domain(format!("accuracy target must be positive, got {target}")));
    }
    if let Some((n, idx)) = spec.terminating_degree() {
        let mut others = spec.numerator.clone();
        others.remove(idx);
        return terminating_sum(n, &others, &spec.denominator, spec.q, spec.argument);
    }
    let z = spec.argument;
    if z == c(0.0) {
        return Ok(EvalResult::exact(c(1.0)));
    }
    if z.norm() >= 1.0 {
        return Err(QError::Divergent(z.norm()));
    }

    let qv = spec.q.get();
    let per_step = (spec.numerator.len() + spec.denominator.len() + 3) as f64;
    let mut term = c(1.0);
    let mut sum = c(0.0);
    let mut sum_abs = 0.0;
    let mut weighted_abs = 0.0;
    let mut qk = 1.0;
    let mut uncertified = 0usize;
    for k in 0..TERM_BUDGET {
        sum += term;
        sum_abs += term.norm();
        weighted_abs += term.norm() * (1.0 + k as f64 * per_step);

        let mut top = z;
        for &a in &spec.numerator {
            top *= c(1.0) - a * qk;
        }
        let mut bottom = c(1.0 - qk * qv);
        for &b in &spec.denominator {
            bottom *= denominator_guard(b, qk, k)?;
        }
        term *= top / bottom;
        qk *= qv;
        ensure_finite(term, "series term")?;

        let threshold = (target * sum.norm()).max(EPS * sum_abs);
        let next = term.norm();
        if next <= threshold {
            let roundoff = EPS * weighted_abs;
            match ratio_majorant(spec, k + 1) {
                Some(rho) if rho < 1.0 => {
                    let tail = next / (1.0 - rho);
                    if tail <= threshold {
                        return Ok(EvalResult {
                            value: ensure_finite(sum, "series sum")?,
                            err_estimate: tail + roundoff,
                            terms_used: k + 1,
                            terminated: false,
                            heuristic: false,
                        });
                    }
                }
                _ => {
                    uncertified += 1;
                    if uncertified >= RATIO_SCAN {
                        return Ok(EvalResult {
                            value: ensure_finite(sum, "series sum")?,
                            err_estimate: next + roundoff,
                            terms_used: k + 1,
                            terminated: false,
                            heuristic: true,
                        });
                    }
                }
            }
        } else {
            uncertified = 0;
        }
    }
    Err(QError::AccuracyUnreachable {
        target,
        terms: TERM_BUDGET,
    })
}

/// Sum `_{r+1}W_r` through its expanded `_{r+1}phi_r`.
pub fn vwp_eval(spec: &VwpSpec, target: f64) -> Result<EvalResult> {
    phi_eval(&spec.expand()?, target)
}

/// Independent evaluation of `_{r+1}W_r` from the explicit term
/// `(1 - a1 q^{2k}) / (1 - a1) (a1, tail; q)_k / (q, q a1 / tail; q)_k z^k`.
pub fn vwp_term_form(spec: &VwpSpec, target: f64) -> Result<EvalResult> {
    let qv = spec.q.get();
    let a1 = spec.a1;
    let z = spec.argument;
    let n_term = spec.tail.iter().filter_map(|&t| terminating_index(t, spec.q)).min();
    if n_term.is_none() && z.norm() >= 1.0 {
        return Err(QError::Divergent(z.norm()));
    }
    let dens: Vec<QComplex> = spec.tail.iter().map(|&t| a1 * qv / t).collect();
    let mut base = c(1.0); // (a1, tail)_k / (q, dens)_k z^k
    let mut sum = c(0.0);
    let mut sum_abs = 0.0;
    let mut qk = 1.0;
    let limit = n_term.map_or(TERM_BUDGET, |n| n + 1);
    let mut small_run = 0;
    for k in 0..limit {
        let well_poised = (c(1.0) - a1 * (qk * qk)) / (c(1.0) - a1);
        let t = base * well_poised;
        sum += t;
        sum_abs += t.norm();
        if n_term.is_none() && t.norm() <= (target * sum.norm()).max(EPS * sum_abs) {
            small_run += 1;
            if small_run >= 3 {
                return Ok(EvalResult {
                    value: sum,
                    err_estimate: t.norm() + 8.0 * EPS * sum_abs,
                    terms_used: k + 1,
                    terminated: false,
                    heuristic: true,
                });
            }
        } else {
            small_run = 0;
        }
        let mut top = z * (c(1.0) - a1 * qk);
        for &t in &spec.tail {
            top *= c(1.0) - t * qk;
        }
        let mut bottom = c(1.0 - qk * qv);
        for &b in &dens {
            bottom *= denominator_guard(b, qk, k)?;
        }
        base *= top / bottom;
        qk *= qv;
    }
    match n_term {
        Some(n) => Ok(EvalResult {
            value: ensure_finite(sum, "very-well-poised sum")?,
            err_estimate: 8.0 * EPS * sum_abs,
            terms_used: n + 1,
            terminated: true,
            heuristic: false,
        }),
        None => Err(QError::AccuracyUnreachable {
            target,
            terms: TERM_BUDGET,
        }),
    }
}

/// Uniform-in-`n` bound on `q^{n(n-1)/2} |_{r+1}phi_r(q^{-n}, a1 q^n, rest; den; q, q x)|`
/// for `|x| <= lambda < 1` and `max |b_j| < 1`:
/// `(-|a1| lambda, -q, -|a_2|, ..., -|a_r|; q)_inf / (lambda, |b_1|, ..., |b_r|; q)_inf`.
pub fn rescaled_uniform_bound(a1: QComplex, rest: &[QComplex], den: &[QComplex], q: Base, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(QError::Domain(format!("bound needs 0 < lambda < 1, got {lambda}")));
    }
    if let Some(b) = den.iter().find(|b| b.norm() >= 1.0) {
        return Err(QError::Domain(format!("bound needs max |b_j| < 1, got |b| = {}", b.norm())));
    }
    let t = DEFAULT_TARGET;
    let mut top = qpoch_inf(c(-a1.norm() * lambda), q, t)?.value.re * qpoch_inf(c(-q.get()), q, t)?.value.re;
    for a in rest {
        top *= qpoch_inf(c(-a.norm()), q, t)?.value.re;
    }
    let mut bottom = qpoch_inf(c(lambda), q, t)?.value.re;
    for b in den {
        bottom *= qpoch_inf(c(b.norm()), q, t)?.value.re;
    }
    Ok(top / bottom)
}

/// One term of an outer series together with its error bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterTerm {
    pub value: QComplex,
    /// Absolute roundoff/truncation error already present in `value`.
    pub err: f64,
    /// Upper bound on `|value|` used by the stopping rule; `value.norm()` when
    /// no a-priori bound is available.
    pub majorant: f64,
    /// The majorant is not a certified bound.
    pub heuristic: bool,
}

impl OuterTerm {
    /// A term whose own magnitude serves as its majorant.
    pub fn observed(value: QComplex, err: f64) -> Self {
        OuterTerm {
            value,
            err,
            majorant: value.norm() + err,
            heuristic: true,
        }
    }
}

/// Stopping rule for [`outer_sum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterSumOptions {
    pub target: f64,
    /// Consecutive terms whose majorant must lie below `target / 10 * |S|`.
    pub consecutive: usize,
    pub max_terms: usize,
}

impl Default for OuterSumOptions {
    fn default() -> Self {
        OuterSumOptions {
            target: 1e-15,
            consecutive: 3,
            max_terms: 2_000,
        }
    }
}

/// Sums `term(0) + term(1) + ...` until `consecutive` successive majorants
/// fall below `target / 10` relative to the running sum.
///
/// Summation also stops, flagged heuristic, once terms are dominated by their
/// own roundoff: continuing would only accumulate noise.
pub fn outer_sum<F>(mut term: F, opts: OuterSumOptions) -> Result<EvalResult>
where
    F: FnMut(usize) -> Result<OuterTerm>,
{
    let mut sum = c(0.0);
    let mut err = 0.0;
    let mut sum_abs = 0.0;
    let mut run = 0;
    let mut heuristic = false;
    for n in 0..opts.max_terms {
        let t = term(n)?;
        ensure_finite(t.value, "outer series term")?;
        sum += t.value;
        sum_abs += t.value.norm();
        err += t.err + EPS * sum.norm();
        let threshold = (opts.target / 10.0 * sum.norm()).max(EPS * sum_abs);
        if t.majorant <= threshold {
            run += 1;
            heuristic |= t.heuristic;
            if run >= opts.consecutive {
                return Ok(EvalResult {
                    value: sum,
                    err_estimate: err + 2.0 * t.majorant,
                    terms_used: n + 1,
                    terminated: false,
                    heuristic,
                });
            }
        } else {
            run = 0;
            if n >= opts.consecutive && t.err >= t.value.norm() && t.err > threshold {
                return Ok(EvalResult {
                    value: sum,
                    err_estimate: err,
                    terms_used: n + 1,
                    terminated: false,
                    heuristic: true,
                });
            }
        }
    }
    Err(QError::AccuracyUnreachable {
        target: opts.target,
        terms: opts.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{product_ratio, qpoch};
    use crate::scalar::PochhammerOrder;

    fn q(v: f64) -> Base {
        Base::new(v).unwrap()
    }

    #[test]
    fn spec_shape_is_enforced() {
        assert!(SeriesSpec::new(vec![c(0.1), c(0.2)], vec![], q(0.5), c(0.1)).is_err());
        assert!(SeriesSpec::new(vec![c(0.1)], vec![], q(0.5), c(0.1)).is_ok());
    }

    #[test]
    fn recognises_negative_powers() {
        let qq = q(0.5);
        assert_eq!(terminating_index(c(1.0), qq), Some(0));
        assert_eq!(terminating_index(c(8.0), qq), Some(3));
        assert_eq!(terminating_index(c(8.0 * (1.0 + 1e-14)), qq), Some(3));
        assert_eq!(terminating_index(c(8.1), qq), None);
        assert_eq!(terminating_index(c(0.5), qq), None);
        assert_eq!(terminating_index(QComplex::new(8.0, 0.1), qq), None);
    }

    #[test]
    fn q_binomial_theorem() {
        let qq = q(0.5);
        for &(a, z) in &[(0.3, 0.4), (-0.7, 0.9), (0.9, -0.6)] {
            let spec = SeriesSpec::new(vec![c(a)], vec![], qq, c(z)).unwrap();
            let r = phi_eval(&spec, 1e-15).unwrap();
            let closed = product_ratio(&[c(a * z)], &[c(z)], qq).unwrap().value;
            assert!((r.value - closed).norm() <= 1e-10 * closed.norm(), "{a} {z}");
            assert!(!r.heuristic);
        }
    }

    #[test]
    fn zero_argument_and_divergence() {
        let qq = q(0.5);
        let spec = SeriesSpec::new(vec![c(0.3), c(0.2)], vec![c(0.1)], qq, c(0.0)).unwrap();
        assert_eq!(phi_eval(&spec, 1e-15).unwrap().value, c(1.0));
        let spec = SeriesSpec::new(vec![c(0.3)], vec![], qq, c(1.2)).unwrap();
        assert_eq!(phi_eval(&spec, 1e-15), Err(QError::Divergent(1.2)));
        // terminating series converge for any argument
        let spec = SeriesSpec::new(vec![c(4.0)], vec![], qq, c(3.0)).unwrap();
        let r = phi_eval(&spec, 1e-15).unwrap();
        assert!(r.terminated);
        assert_eq!(r.terms_used, 3);
    }

    #[test]
    fn denominator_pole_is_reported() {
        let qq = q(0.5);
        // b = q^{-1} vanishes at k = 1, before termination at n = 3
        let spec = SeriesSpec::new(vec![c(8.0), c(0.2)], vec![c(2.0)], qq, c(0.5)).unwrap();
        assert!(matches!(phi_eval(&spec, 1e-15), Err(QError::DenominatorPole { index: 1, .. })));
    }

    #[test]
    fn terminating_matches_reversed_order_sum() {
        let qq = q(0.6);
        let n = 9;
        let others = [c(0.3), QComplex::new(0.2, 0.1), c(-0.4)];
        let den = [c(0.5), c(0.25), c(-0.35)];
        let z = c(0.8);
        let fwd = terminating_sum(n, &others, &den, qq, z).unwrap();
        // explicit terms, then summed from the last one back
        let mut terms = Vec::new();
        for k in 0..=n {
            let mut t = z.powi(k as i32) / qpoch(c(0.6), qq, PochhammerOrder::Finite(k)).unwrap().value;
            t *= qpoch(c(0.6f64.powi(-(n as i32))), qq, PochhammerOrder::Finite(k)).unwrap().value;
            for &a in &others {
                t *= qpoch(a, qq, PochhammerOrder::Finite(k)).unwrap().value;
            }
            for &b in &den {
                t /= qpoch(b, qq, PochhammerOrder::Finite(k)).unwrap().value;
            }
            terms.push(t);
        }
        let rev = terms.iter().rev().fold(c(0.0), |s, &t| s + t);
        assert!((fwd.value - rev).norm() <= 1e-12 * rev.norm());
    }

    #[test]
    fn rescaled_matches_plain_for_moderate_degree() {
        let qq = q(0.7);
        let others = [c(0.3), c(0.25)];
        let den = [c(0.4), c(0.2)];
        for n in 0..12 {
            let x = c(0.45);
            let plain = terminating_sum(n, &others, &den, qq, x * 0.7).unwrap().value;
            let scaled = terminating_rescaled(n, &others, &den, qq, x).unwrap().value;
            let expect = plain * qq.pow_binom2(n);
            assert!((scaled - expect).norm() <= 1e-11 * (1.0 + expect.norm()), "n = {n}");
        }
    }

    #[test]
    fn rescaled_survives_large_degree() {
        let qq = q(0.3);
        let r = terminating_rescaled(600, &[c(0.2), c(0.3), c(0.1)], &[c(0.2), c(0.4), c(0.3)], qq, c(0.5)).unwrap();
        assert!(r.value.re.is_finite());
        let bound = rescaled_uniform_bound(c(0.2), &[c(0.3), c(0.1)], &[c(0.2), c(0.4), c(0.3)], qq, 0.5).unwrap();
        assert!(r.value.norm() <= bound);
    }

    #[test]
    fn ratio_bounds() {
        let qq = q(0.5);
        let spec = SeriesSpec::new(vec![c(0.9)], vec![], qq, c(0.4)).unwrap();
        let far = term_ratio_bound(&spec, 60).unwrap();
        assert!((far.rho - 0.4).abs() < 1e-12);
        let near = term_ratio_bound(&spec, 0).unwrap();
        assert!(near.rho >= far.rho);

        let term = SeriesSpec::new(vec![c(4.0)], vec![], qq, c(0.4)).unwrap();
        assert!(term_ratio_bound(&term, 0).is_err());
    }

    #[test]
    fn balanced_ratio_bound_dominates_observed_ratios() {
        let qq = q(0.5);
        let z = c(0.6);
        let spec = SeriesSpec::new(
            vec![c(0.3), c(0.4), c(0.2), c(0.35)],
            vec![c(0.1), c(0.25), c(0.15)],
            qq,
            z * 0.5,
        )
        .unwrap();
        let bound = term_ratio_bound(&spec, 0).unwrap();
        // scan the actual term ratios
        let mut t = c(1.0);
        let mut qk = 1.0;
        for k in 0..60 {
            let mut r = spec.argument / (1.0 - qk * 0.5);
            for a in &spec.numerator {
                r *= c(1.0) - a * qk;
            }
            for b in &spec.denominator {
                r /= c(1.0) - b * qk;
            }
            if k >= bound.valid_from {
                assert!(r.norm() <= bound.rho * (1.0 + 1e-12));
            }
            t *= r;
            qk *= 0.5;
        }
        assert!(bound.rho <= 0.3 * 1.5f64.powi(4) / 0.5 / (0.75 * 0.875 * 0.85));
        assert!(t.norm() < 1e-20);
    }

    #[test]
    fn heuristic_flag_near_unit_argument() {
        let qq = q(0.9);
        let spec = SeriesSpec::new(vec![c(0.99), c(0.98)], vec![c(0.99)], qq, c(0.99)).unwrap();
        let r = phi_eval(&spec, 1e-13).unwrap();
        assert!(r.value.re.is_finite());
        assert!(r.terms_used > 1000);
    }

    #[test]
    fn vwp_expansion_and_term_form_agree() {
        let qq = q(0.5);
        let spec = VwpSpec::new(c(0.3), vec![c(0.6), c(0.45), c(0.7), c(0.2), c(0.5)], qq, c(0.35)).unwrap();
        let a = vwp_eval(&spec, 1e-15).unwrap();
        let b = vwp_term_form(&spec, 1e-15).unwrap();
        assert!((a.value - b.value).norm() < 1e-13 * a.value.norm());
        assert!(VwpSpec::new(c(0.0), vec![], qq, c(0.1)).is_err());
    }

    #[test]
    fn vwp_with_unit_tail_collapses() {
        let qq = q(0.5);
        let spec = VwpSpec::new(c(0.3), vec![c(0.6), c(0.45), c(0.7), c(0.2), c(1.0)], qq, c(0.35)).unwrap();
        assert_eq!(vwp_eval(&spec, 1e-15).unwrap().value, c(1.0));
        assert_eq!(vwp_term_form(&spec, 1e-15).unwrap().value, c(1.0));
    }

    #[test]
    fn rogers_sum() {
        let qq = q(0.5);
        let (al, b, cc, d) = (0.3, 0.7, 0.9, 0.8);
        let z = 0.5 * al / (b * cc * d);
        let spec = VwpSpec::new(c(al), vec![c(b), c(cc), c(d)], qq, c(z)).unwrap();
        let lhs = vwp_eval(&spec, 1e-15).unwrap().value;
        let aq = al * 0.5;
        let rhs = product_ratio(
            &[c(aq), c(aq / (b * cc)), c(aq / (b * d)), c(aq / (cc * d))],
            &[c(aq / b), c(aq / cc), c(aq / d), c(aq / (b * cc * d))],
            qq,
        )
        .unwrap()
        .value;
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }

    #[test]
    fn outer_sum_of_geometric_series() {
        let r = outer_sum(
            |n| Ok(OuterTerm::observed(c(0.5f64.powi(n as i32)), 0.0)),
            OuterSumOptions::default(),
        )
        .unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-15);
        assert!(r.heuristic);
        let r = outer_sum(
            |n| {
                let v = c(if n == 0 { 1.0 } else { 0.0 });
                Ok(OuterTerm { value: v, err: 0.0, majorant: v.norm(), heuristic: false })
            },
            OuterSumOptions::default(),
        )
        .unwrap();
        assert_eq!(r.value, c(1.0));
        assert_eq!(r.terms_used, 4);
        assert!(!r.heuristic);
    }

    #[test]
    fn outer_sum_stops_on_noise() {
        let r = outer_sum(
            |n| {
                let v = if n < 5 { c(1.0 / (n + 1) as f64) } else { c(1e-9) };
                Ok(OuterTerm { value: v, err: if n < 5 { 0.0 } else { 1e-8 }, majorant: v.norm() + 1e-8, heuristic: false })
            },
            OuterSumOptions::default(),
        )
        .unwrap();
        assert!(r.heuristic);
        assert_eq!(r.terms_used, 6);
    }

    #[test]
    fn uniform_bound_is_monotone_in_lambda() {
        let qq = q(0.5);
        let rest = [c(0.2), c(0.3)];
        let den = [c(0.4), c(0.1), c(0.3)];
        let mut prev = 0.0;
        for i in 1..10 {
            let b = rescaled_uniform_bound(c(0.25), &rest, &den, qq, i as f64 / 10.0).unwrap();
            assert!(b > prev);
            prev = b;
        }
        assert!(rescaled_uniform_bound(c(0.25), &rest, &den, qq, 1.0).is_err());
        assert!(rescaled_uniform_bound(c(0.25), &rest, &[c(1.0)], qq, 0.5).is_err());
    }

    #[test]
    fn uniform_bound_without_parameters() {
        // with a1 = 0 and no other parameters the bound is (-q; q)_inf / (lambda; q)_inf,
        // and the series itself is (x q^{1-n}; q)_n by the q-binomial theorem
        let qq = q(0.5);
        let lambda = 0.6;
        let bound = rescaled_uniform_bound(c(0.0), &[], &[], qq, lambda).unwrap();
        let expect = qpoch(c(-0.5), qq, PochhammerOrder::Infinity).unwrap().value.re
            / qpoch(c(lambda), qq, PochhammerOrder::Infinity).unwrap().value.re;
        assert!((bound - expect).abs() < 1e-14 * expect);
        for n in 0..25 {
            let direct = qpoch(c(lambda * 0.5f64.powi(1 - n as i32)), qq, PochhammerOrder::Finite(n))
                .unwrap()
                .value
                * qq.pow_binom2(n);
            let via = terminating_rescaled(n, &[], &[], qq, c(lambda)).unwrap().value;
            assert!((direct - via).norm() < 1e-12 * (1.0 + direct.norm()));
            assert!(via.norm() <= bound);
        }
    }
}
