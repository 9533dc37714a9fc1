//! q-shifted factorials, the quadratic-argument products `h(x; a|q)` and the
//! Askey-Wilson normalising constant.

use std::f64::consts::PI;

use crate::error::{QError, Result};
use crate::scalar::{c, ensure_finite, Base, EvalResult, PochhammerOrder, QComplex, DEFAULT_TARGET, EPS};

/// Truncation index `K` for `(a; q)_inf` at relative accuracy `target`:
/// the first `K` with `|a| q^K / (1 - q) < target / 10`.
fn tail_cutoff(abs_a: f64, q: f64, target: f64) -> usize {
    if abs_a == 0.0 {
        return 0;
    }
    let bound = target / 10.0 * (1.0 - q);
    if abs_a < bound {
        return 0;
    }
    // |a| q^K < bound  <=>  K > ln(bound/|a|)/ln q
    ((bound / abs_a).ln() / q.ln()).floor() as usize + 1
}

/// `(a; q)_n` for finite `n` or `n = Infinity`.
pub fn qpoch(a: QComplex, q: Base, n: PochhammerOrder) -> Result<EvalResult> {
    match n {
        PochhammerOrder::Finite(n) => qpoch_finite(a, q, n),
        PochhammerOrder::Infinity => qpoch_inf(a, q, DEFAULT_TARGET),
    }
}

fn qpoch_finite(a: QComplex, q: Base, n: usize) -> Result<EvalResult> {
    let qv = q.get();
    let mut prod = c(1.0);
    let mut qk = 1.0;
    for _ in 0..n {
        prod *= c(1.0) - a * qk;
        qk *= qv;
    }
    let prod = ensure_finite(prod, "finite q-shifted factorial")?;
    Ok(EvalResult {
        value: prod,
        err_estimate: 2.0 * n as f64 * EPS * prod.norm(),
        terms_used: n,
        terminated: true,
        heuristic: false,
    })
}

/// `(a; q)_inf` truncated once the geometric tail bound drops below `target / 10`.
pub fn qpoch_inf(a: QComplex, q: Base, target: f64) -> Result<EvalResult> {
    let qv = q.get();
    let abs_a = a.norm();
    let k_max = tail_cutoff(abs_a, qv, target);
    let mut prod = c(1.0);
    let mut qk = 1.0;
    for _ in 0..k_max {
        prod *= c(1.0) - a * qk;
        qk *= qv;
    }
    let prod = ensure_finite(prod, "infinite q-shifted factorial")?;
    // |prod_{k>=K}(1 - a q^k) - 1| <= exp(sum |a| q^k) - 1
    let tail = (abs_a * qk / (1.0 - qv)).exp_m1();
    Ok(EvalResult {
        value: prod,
        err_estimate: prod.norm() * (tail + 2.0 * k_max as f64 * EPS),
        terms_used: k_max,
        terminated: false,
        heuristic: false,
    })
}

/// `(a_1, ..., a_m; q)_n`.
pub fn qpoch_multi(params: &[QComplex], q: Base, n: PochhammerOrder) -> Result<EvalResult> {
    if params.is_empty() {
        return Err(QError::Domain("multiple q-shifted factorial needs at least one parameter".into()));
    }
    let mut acc = EvalResult::exact(c(1.0));
    for &a in params {
        acc = acc.mul(qpoch(a, q, n)?);
    }
    ensure_finite(acc.value, "multiple q-shifted factorial")?;
    Ok(acc)
}

/// Ratio of infinite products `(num...; q)_inf / (den...; q)_inf`.
pub fn product_ratio(num: &[QComplex], den: &[QComplex], q: Base) -> Result<EvalResult> {
    ratio_impl(num, den, q, PochhammerOrder::Infinity)
}

/// Ratio of finite products `(num...; q)_n / (den...; q)_n`.
pub fn product_ratio_n(num: &[QComplex], den: &[QComplex], q: Base, n: usize) -> Result<EvalResult> {
    ratio_impl(num, den, q, PochhammerOrder::Finite(n))
}

fn ratio_impl(num: &[QComplex], den: &[QComplex], q: Base, n: PochhammerOrder) -> Result<EvalResult> {
    let mut top = EvalResult::exact(c(1.0));
    for &a in num {
        top = top.mul(qpoch(a, q, n)?);
    }
    let mut bottom = EvalResult::exact(c(1.0));
    for &b in den {
        let f = qpoch(b, q, n)?;
        if f.value.norm() <= f.err_estimate.max(1e-300) {
            return Err(QError::DenominatorPole {
                param: format!("{b}"),
                index: match n {
                    PochhammerOrder::Finite(n) => n,
                    PochhammerOrder::Infinity => usize::MAX,
                },
            });
        }
        bottom = bottom.mul(f);
    }
    let r = top.div(bottom);
    ensure_finite(r.value, "product ratio")?;
    Ok(r)
}

fn check_cosine(x: f64) -> Result<()> {
    if x.is_finite() && (-1.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(QError::Domain(format!("h(x; a|q) needs -1 <= x <= 1, got x = {x}")))
    }
}

/// Quadratic-factor form `prod_k (1 - 2 q^k a x + q^{2k} a^2)`, no cross-check.
pub(crate) fn h_quadratic(x: f64, a: QComplex, q: Base, target: f64) -> (QComplex, f64, usize) {
    let qv = q.get();
    let abs_a = a.norm();
    if abs_a == 0.0 {
        return (c(1.0), 0.0, 0);
    }
    let bound = target / 10.0;
    let two_ax = a * (2.0 * x);
    let a2 = a * a;
    let mut prod = c(1.0);
    let mut qk = 1.0;
    let mut k = 0usize;
    loop {
        let tail = 2.0 * abs_a * qk / (1.0 - qv) + abs_a * abs_a * qk * qk / (1.0 - qv * qv);
        if tail < bound {
            let err = prod.norm() * (tail.exp_m1() + 3.0 * k as f64 * EPS);
            return (prod, err, k);
        }
        prod *= c(1.0) - two_ax * qk + a2 * (qk * qk);
        qk *= qv;
        k += 1;
    }
}

/// Quadratic-factor `h(x; a|q)` without the cross-check, for per-node integrand loops.
#[inline]
pub(crate) fn h_fast(x: f64, a: QComplex, q: Base) -> QComplex {
    h_quadratic(x, a, q, DEFAULT_TARGET).0
}

/// `h(x; a|q) = (a e^{i theta}, a e^{-i theta}; q)_inf` with `x = cos theta`.
///
/// Evaluated through the quadratic factors and cross-checked against the
/// two-factor product; for real `a` the (real) value is returned with a zero
/// imaginary part, and a non-negligible imaginary part is an error.
pub fn h_product(x: f64, a: QComplex, q: Base) -> Result<EvalResult> {
    check_cosine(x)?;
    if a == c(0.0) {
        return Ok(EvalResult::exact(c(1.0)));
    }
    let (quad, quad_err, k) = h_quadratic(x, a, q, DEFAULT_TARGET);
    let quad = ensure_finite(quad, "h product")?;

    let theta = x.acos();
    let e = QComplex::from_polar(1.0, theta);
    let two = qpoch_inf(a * e, q, DEFAULT_TARGET)?.mul(qpoch_inf(a * e.conj(), q, DEFAULT_TARGET)?);

    // every partial product is dominated by (-|a|; q)_inf^2
    let scale = qpoch_inf(c(-a.norm()), q, DEFAULT_TARGET)?.value.re.powi(2);
    let allowed = 1e-12 * scale + 4.0 * (quad_err + two.err_estimate);
    if (quad - two.value).norm() > allowed {
        return Err(QError::CrossCheck {
            what: "h product",
            a: format!("{quad}"),
            b: format!("{}", two.value),
        });
    }

    let mut value = quad;
    if a.im == 0.0 {
        let im_allowed = 1e-10 * two.value.norm() + 8.0 * k as f64 * EPS * scale;
        if two.value.im.abs() > im_allowed {
            return Err(QError::NotReal {
                im: two.value.im,
                abs: two.value.norm(),
            });
        }
        value = c(quad.re);
    }
    Ok(EvalResult {
        value,
        err_estimate: quad_err.max((quad - two.value).norm()),
        terms_used: k,
        terminated: false,
        heuristic: false,
    })
}

/// `h(x; a_1, ..., a_m|q)`; the empty product is 1.
pub fn h_product_multi(x: f64, params: &[QComplex], q: Base) -> Result<EvalResult> {
    check_cosine(x)?;
    let mut acc = EvalResult::exact(c(1.0));
    for &a in params {
        acc = acc.mul(h_product(x, a, q)?);
    }
    Ok(acc)
}

pub(crate) fn max_modulus(params: &[QComplex]) -> f64 {
    params.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn require_unit_polydisc(params: &[QComplex], what: &str) -> Result<()> {
    let m = max_modulus(params);
    if m < 1.0 {
        Ok(())
    } else {
        Err(QError::Domain(format!("{what} requires max modulus < 1, got {m}")))
    }
}

/// `K(a, b, c, d|q) = 2 pi (abcd; q)_inf / (q, ab, ac, ad, bc, bd, cd; q)_inf`.
pub fn aw_constant(a: QComplex, b: QComplex, cc: QComplex, d: QComplex, q: Base) -> Result<EvalResult> {
    require_unit_polydisc(&[a, b, cc, d], "the Askey-Wilson integral (Prop 1.2)")?;
    let r = product_ratio(
        &[a * b * cc * d],
        &[c(q.get()), a * b, a * cc, a * d, b * cc, b * d, cc * d],
        q,
    )?;
    Ok(r.scale(c(2.0 * PI)))
}
