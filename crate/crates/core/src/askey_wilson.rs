//! Askey-Wilson polynomials, weight, orthogonality norms and generating functions.

use crate::error::{QError, Result};
use crate::hyperseries::{outer_sum, terminating_sum, OuterSumOptions, OuterTerm};
use crate::qcore::{aw_constant, h_fast, product_ratio, qpoch, require_unit_polydisc};
use crate::scalar::{c, ensure_finite, Base, EvalResult, PochhammerOrder, QComplex, EPS};

/// Largest degree accepted by [`aw_poly`].
pub const AW_DEGREE_CAP: usize = 64;

/// Number of interior points in the fixed theta grid used for pointwise checks.
pub const THETA_GRID_POINTS: usize = 17;

/// `17` equispaced interior points of `(0, pi)`.
pub fn theta_grid() -> Vec<f64> {
    let n = THETA_GRID_POINTS;
    (1..=n)
        .map(|j| std::f64::consts::PI * j as f64 / (n + 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwParams {
    pub a: QComplex,
    pub b: QComplex,
    pub c: QComplex,
    pub d: QComplex,
    pub q: Base,
}

impl AwParams {
    pub fn new(a: QComplex, b: QComplex, c: QComplex, d: QComplex, q: Base) -> Self {
        AwParams { a, b, c, d, q }
    }

    pub fn real(a: f64, b: f64, cc: f64, d: f64, q: f64) -> Result<Self> {
        Ok(AwParams::new(c(a), c(b), c(cc), c(d), Base::new(q)?))
    }

    pub fn as_array(&self) -> [QComplex; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Parameters reordered as `[p[perm[0]], ..., p[perm[3]]]`.
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        let p = self.as_array();
        AwParams::new(p[perm[0]], p[perm[1]], p[perm[2]], p[perm[3]], self.q)
    }

    /// `a` and `d` interchanged.
    pub fn swap_ad(&self) -> Self {
        self.permuted([3, 1, 2, 0])
    }

    pub fn is_real(&self) -> bool {
        self.as_array().iter().all(|z| z.im == 0.0)
    }

    fn abcd(&self) -> QComplex {
        self.a * self.b * self.c * self.d
    }

    pub fn require_polydisc(&self) -> Result<()> {
        require_unit_polydisc(&self.as_array(), "the Askey-Wilson integral (Prop 1.2)")
    }
}

/// Askey-Wilson polynomial `p_n(x; a, b, c, d|q)`, `n <= AW_DEGREE_CAP`.
///
/// Evaluated by the three-term recurrence; see [`aw_poly_definition`] for the
/// literal `4phi3` form, which loses roughly a digit per degree.
pub fn aw_poly(n: usize, x: f64, p: &AwParams) -> Result<EvalResult> {
    if n > AW_DEGREE_CAP {
        return Err(QError::DegreeCap(n));
    }
    let mut seq = aw_poly_sequence(n, x, p)?;
    Ok(seq.pop().expect("sequence has n + 1 entries"))
}

/// `p_n(x) = (ab, ac, ad; q)_n a^{-n}
///  4phi3(q^{-n}, abcd q^{n-1}, a e^{i theta}, a e^{-i theta}; ab, ac, ad; q, q)`.
///
/// The terminating sum cancels heavily as `n` grows; the error estimate
/// tracks that loss.
pub fn aw_poly_definition(n: usize, x: f64, p: &AwParams) -> Result<EvalResult> {
    if n > AW_DEGREE_CAP {
        return Err(QError::DegreeCap(n));
    }
    if p.a == c(0.0) {
        return Err(QError::Domain("Askey-Wilson polynomial needs a != 0 (a^-n prefactor)".into()));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(QError::Domain(format!("Askey-Wilson polynomial needs -1 <= x <= 1, got {x}")));
    }
    let q = p.q;
    let e = QComplex::from_polar(1.0, x.acos());
    let (a, b, cc, d) = (p.a, p.b, p.c, p.d);
    let series = terminating_sum(
        n,
        &[p.abcd() * q.get().powi(n as i32 - 1), a / e, a * e],
        &[a * b, a * cc, a * d],
        q,
        c(q.get()),
    )?;
    let mut pre = EvalResult::exact(a.powi(-(n as i32)));
    for f in [a * b, a * cc, a * d] {
        pre = pre.mul(qpoch(f, q, PochhammerOrder::Finite(n))?);
    }
    let mut r = pre.mul(series);
    r.terms_used = n + 1;
    r.terminated = true;
    if p.is_real() {
        r.value = c(r.real_part()?);
    }
    Ok(r)
}

/// Three-term recurrence for `p_n` in its standard normalisation,
/// `2x p_n = A_n p_{n+1} + B_n p_n + C_n p_{n-1}`.
///
/// `A_n` and `C_n` are symmetric in the four parameters; `B_n` is formed
/// around the parameter of largest modulus, which keeps the `1/a` in it harmless.
struct Recurrence {
    pivot: QComplex,
    others: [QComplex; 3],
    abcd: QComplex,
    q: f64,
}

impl Recurrence {
    fn new(p: &AwParams) -> Self {
        let arr = p.as_array();
        let (i, _) = arr
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bm), (i, z)| if z.norm() > bm { (i, z.norm()) } else { (bi, bm) });
        let others: Vec<QComplex> = (0..4).filter(|&j| j != i).map(|j| arr[j]).collect();
        Recurrence {
            pivot: arr[i],
            others: [others[0], others[1], others[2]],
            abcd: p.abcd(),
            q: p.q.get(),
        }
    }

    /// `(A_n, B_n, C_n)`.
    fn coefficients(&self, n: usize) -> (QComplex, QComplex, QComplex) {
        let q = self.q;
        let qn = q.powi(n as i32);
        let qn1 = q.powi(n as i32 - 1);
        let one = c(1.0);
        let a = self.pivot;
        let [b, cc, d] = self.others;
        let abcd = self.abcd;
        let den_a = (one - abcd * q.powi(2 * n as i32 - 1)) * (one - abcd * q.powi(2 * n as i32));
        let den_c = (one - abcd * q.powi(2 * n as i32 - 2)) * (one - abcd * q.powi(2 * n as i32 - 1));
        let big_a = (one - abcd * qn1) / den_a;
        let pair = (one - b * cc * qn1) * (one - b * d * qn1) * (one - cc * d * qn1);
        let with_a = (one - a * b * qn1) * (one - a * cc * qn1) * (one - a * d * qn1);
        let big_c = if n == 0 { c(0.0) } else { (1.0 - qn) * pair * with_a / den_c };
        if a == c(0.0) {
            // all four parameters vanish: continuous q-Hermite
            return (big_a, c(0.0), big_c);
        }
        let an = (one - a * b * qn) * (one - a * cc * qn) * (one - a * d * qn) * (one - abcd * qn1) / (a * den_a);
        let cn = if n == 0 { c(0.0) } else { a * (1.0 - qn) * pair / den_c };
        (big_a, a + one / a - an - cn, big_c)
    }
}

/// `p_0(x), ..., p_{n_max}(x)` from the three-term recurrence, each with a
/// roundoff estimate.
pub fn aw_poly_sequence(n_max: usize, x: f64, p: &AwParams) -> Result<Vec<EvalResult>> {
    let mut it = AwPolyIter::new(x, p)?;
    (0..=n_max).map(|_| it.next_poly()).collect()
}

/// Incremental evaluation of `p_n(x)` for `n = 0, 1, 2, ...`.
pub struct AwPolyIter {
    rec: Recurrence,
    x: f64,
    n: usize,
    prev: QComplex,
    cur: QComplex,
    max_abs: f64,
    real: bool,
}

impl AwPolyIter {
    pub fn new(x: f64, p: &AwParams) -> Result<Self> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(QError::Domain(format!("Askey-Wilson polynomial needs -1 <= x <= 1, got {x}")));
        }
        Ok(AwPolyIter {
            rec: Recurrence::new(p),
            x,
            n: 0,
            prev: c(0.0),
            cur: c(1.0),
            max_abs: 1.0,
            real: p.is_real(),
        })
    }

    /// Returns `p_n` and advances to `n + 1`.
    pub fn next_poly(&mut self) -> Result<EvalResult> {
        let n = self.n;
        let value = if self.real { c(self.cur.re) } else { self.cur };
        let out = EvalResult {
            value,
            err_estimate: 8.0 * EPS * (n + 1) as f64 * self.max_abs,
            terms_used: n + 1,
            terminated: true,
            heuristic: false,
        };
        let (a, b, cc) = self.rec.coefficients(n);
        if a.norm() == 0.0 || !a.re.is_finite() {
            return Err(QError::DenominatorPole {
                param: "abcd".into(),
                index: n,
            });
        }
        let next = ((2.0 * self.x) * self.cur - b * self.cur - cc * self.prev) / a;
        self.prev = self.cur;
        self.cur = ensure_finite(next, "Askey-Wilson recurrence")?;
        self.max_abs = self.max_abs.max(self.cur.norm());
        self.n += 1;
        Ok(out)
    }
}

/// `h(cos 2 theta; 1|q) / h(cos theta; a, b, c, d|q)` for possibly complex parameters.
pub fn aw_weight_complex(theta: f64, p: &AwParams) -> Result<QComplex> {
    let q = p.q;
    let x = theta.cos();
    let mut den = c(1.0);
    for a in p.as_array() {
        den *= h_fast(x, a, q);
    }
    if den.norm() == 0.0 {
        return Err(QError::DenominatorPole {
            param: "h(cos theta; a, b, c, d)".into(),
            index: 0,
        });
    }
    ensure_finite(h_fast((2.0 * theta).cos(), c(1.0), q) / den, "Askey-Wilson weight")
}

/// The Askey-Wilson weight `W(cos theta)`; requires a real value.
pub fn aw_weight(theta: f64, p: &AwParams) -> Result<f64> {
    let w = aw_weight_complex(theta, p)?;
    if w.im.abs() > 1e-10 * w.norm() {
        return Err(QError::NotReal { im: w.im, abs: w.norm() });
    }
    Ok(w.re)
}

/// `K(a,b,c,d|q) (1 - abcd/q)(q, ab, ac, ad, bc, bd, cd; q)_n / ((1 - abcd q^{2n-1})(abcd/q; q)_n)`.
pub fn aw_norm(n: usize, p: &AwParams) -> Result<EvalResult> {
    p.require_polydisc()?;
    let k = aw_constant(p.a, p.b, p.c, p.d, p.q)?;
    if n == 0 {
        return Ok(k);
    }
    let (a, b, cc, d) = (p.a, p.b, p.c, p.d);
    let qv = p.q.get();
    let abcd = p.abcd();
    let edge = c(1.0) - abcd * qv.powi(2 * n as i32 - 1);
    if edge.norm() < 1e-14 {
        return Err(QError::Domain("aw_norm: abcd q^(2n-1) = 1".into()));
    }
    // (1 - abcd/q) / (abcd/q; q)_n = 1 / (abcd; q)_{n-1}
    let ratio = crate::qcore::product_ratio_n(&[c(qv), a * b, a * cc, a * d, b * cc, b * d, cc * d], &[], p.q, n)?
        .div(qpoch(abcd, p.q, PochhammerOrder::Finite(n - 1))?);
    Ok(k.mul(ratio).scale(c(1.0) / edge))
}

/// `Delta_n(t)` of the generating function, for `d`-form (`variant = D`) or
/// with `a` and `d` interchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSeq {
    pub params: AwParams,
    pub t: QComplex,
    pub n: usize,
}

/// `(1 - abcd q^{2n-1})(abcd/q, 1/t; q)_n (dt)^n / ((1 - abcd/q)(q, ad, bd, cd, abcdt; q)_n)`.
///
/// `(1/t; q)_n t^n` is formed as `prod (t - q^k)` so `t = 0` is allowed, and
/// `(1 - abcd/q)` is cancelled against `(abcd/q; q)_n`.
pub fn delta_seq(ds: &DeltaSeq) -> Result<QComplex> {
    let p = &ds.params;
    let n = ds.n;
    if n == 0 {
        return Ok(c(1.0));
    }
    let qv = p.q.get();
    let abcd = p.abcd();
    let (a, b, cc, d) = (p.a, p.b, p.c, p.d);
    let mut top = (c(1.0) - abcd * qv.powi(2 * n as i32 - 1)) * d.powi(n as i32);
    let mut bottom = c(1.0);
    let mut qk = 1.0;
    for k in 0..n {
        if k + 1 < n {
            top *= c(1.0) - abcd * qk;
        }
        top *= ds.t - qk;
        for f in [c(qv), a * d, b * d, cc * d, abcd * ds.t] {
            let g = c(1.0) - f * qk;
            if g.norm() < 1e-14 {
                return Err(QError::DenominatorPole {
                    param: format!("{f}"),
                    index: k,
                });
            }
            bottom *= g;
        }
        qk *= qv;
    }
    ensure_finite(top / bottom, "Delta_n(t)")
}

/// Which generating function: the `d`-form or the `a`-form with `a`, `d` interchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenFuncVariant {
    DForm,
    AForm,
}

/// Closed product side of the generating function.
pub fn gen_func_rhs(theta: f64, p: &AwParams, t: QComplex, variant: GenFuncVariant) -> Result<EvalResult> {
    let pp = match variant {
        GenFuncVariant::DForm => *p,
        GenFuncVariant::AForm => p.swap_ad(),
    };
    let (a, b, cc, d) = (pp.a, pp.b, pp.c, pp.d);
    if (d * t).norm() >= 1.0 {
        return Err(QError::Domain(format!(
            "generating function requires |{}t| < 1",
            if variant == GenFuncVariant::DForm { "d" } else { "a" }
        )));
    }
    let e = QComplex::from_polar(1.0, theta);
    let abcd = a * b * cc * d;
    product_ratio(
        &[abcd, a * d * t, b * d * t, cc * d * t, d * e, d / e],
        &[abcd * t, a * d, b * d, cc * d, d * t * e, d * t / e],
        p.q,
    )
}

/// Series side `sum_n Delta_n(t) p_n(cos theta)` summed to relative `target`.
pub fn gen_func_series(theta: f64, p: &AwParams, t: QComplex, variant: GenFuncVariant, target: f64) -> Result<EvalResult> {
    let pp = match variant {
        GenFuncVariant::DForm => *p,
        GenFuncVariant::AForm => p.swap_ad(),
    };
    if (pp.d * t).norm() >= 1.0 {
        return Err(QError::Domain("generating function series needs |dt| < 1".into()));
    }
    // p_n is symmetric in the parameters, so the original order is used for it
    let mut polys = AwPolyIter::new(theta.cos(), p)?;
    outer_sum(
        |n| {
            let pn = polys.next_poly()?;
            let delta = delta_seq(&DeltaSeq { params: pp, t, n })?;
            Ok(OuterTerm::observed(delta * pn.value, delta.norm() * pn.err_estimate))
        },
        OuterSumOptions {
            target,
            ..OuterSumOptions::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AwParams {
        AwParams::real(0.3, 0.2, 0.1, 0.4, 0.5).unwrap()
    }

    #[test]
    fn degree_zero_and_caps() {
        let p = sample();
        assert_eq!(aw_poly(0, 0.3, &p).unwrap().value, c(1.0));
        assert_eq!(aw_poly_definition(0, 0.3, &p).unwrap().value, c(1.0));
        assert!(matches!(aw_poly(65, 0.3, &p), Err(QError::DegreeCap(65))));
        assert!(matches!(aw_poly_definition(65, 0.3, &p), Err(QError::DegreeCap(65))));
        let z = AwParams::real(0.0, 0.2, 0.1, 0.4, 0.5).unwrap();
        assert!(aw_poly_definition(2, 0.3, &z).is_err());
        assert!(aw_poly(2, 0.3, &z).is_ok());
        assert!(aw_poly(2, 1.3, &p).is_err());
    }

    #[test]
    fn degree_one_by_hand() {
        // p_1 = [(1-ab)(1-ac)(1-ad) - (1-abcd)(1 - 2ax + a^2)] / a, expanded
        let p = sample();
        let (a, b, cc, d) = (0.3, 0.2, 0.1, 0.4);
        for &x in &[-0.9, -0.2, 0.0, 0.45, 1.0] {
            let expect = 2.0 * (1.0 - a * b * cc * d) * x + a * b * cc + a * b * d + a * cc * d + b * cc * d - a - b - cc - d;
            for got in [aw_poly(1, x, &p).unwrap().value, aw_poly_definition(1, x, &p).unwrap().value] {
                assert!((got.re - expect).abs() < 1e-14, "{x}");
                assert_eq!(got.im, 0.0);
            }
        }
    }

    #[test]
    fn recurrence_matches_definition() {
        for p in [sample(), AwParams::real(-0.45, 0.3, 0.25, 0.05, 0.7).unwrap()] {
            for &x in &[-0.8, 0.1, 0.77] {
                let seq = aw_poly_sequence(8, x, &p).unwrap();
                for (n, r) in seq.iter().enumerate() {
                    let direct = aw_poly_definition(n, x, &p).unwrap();
                    // the definition carries its own (growing) roundoff estimate
                    let diff = (direct.value - r.value).norm();
                    assert!(diff <= 2.0 * direct.err_estimate + 1e-14, "n={n} x={x}: {diff:e}");
                    if n <= 3 {
                        assert!(diff < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn q_hermite_limit() {
        let p = AwParams::real(0.0, 0.0, 0.0, 0.0, 0.5).unwrap();
        let x: f64 = 0.3;
        let seq = aw_poly_sequence(3, x, &p).unwrap();
        // 2x H_n = H_{n+1} + (1 - q^n) H_{n-1}
        let h2 = 4.0 * x * x - 0.5;
        let h3 = 2.0 * x * h2 - 0.75 * 2.0 * x;
        assert!((seq[2].value.re - h2).abs() < 1e-15);
        assert!((seq[3].value.re - h3).abs() < 1e-15);
    }

    #[test]
    fn symmetric_in_parameters() {
        let p = sample();
        let perms = [[1, 0, 2, 3], [3, 2, 1, 0], [2, 3, 0, 1], [0, 3, 1, 2]];
        for n in 0..=8 {
            let x = 0.37;
            let base = aw_poly(n, x, &p).unwrap().value;
            for perm in perms {
                let other = aw_poly(n, x, &p.permuted(perm)).unwrap().value;
                assert!((base - other).norm() <= 1e-10 * base.norm().max(1.0), "n={n} {perm:?}");
            }
        }
    }

    #[test]
    fn weight_endpoints_and_sign() {
        let p = sample();
        assert_eq!(aw_weight(0.0, &p).unwrap(), 0.0);
        assert!(aw_weight(std::f64::consts::PI, &p).unwrap().abs() < 1e-14);
        for th in theta_grid() {
            assert!(aw_weight(th, &p).unwrap() > 0.0);
        }
        let zero = AwParams::real(0.0, 0.0, 0.0, 0.0, 0.5).unwrap();
        let th = 0.8f64;
        let w = aw_weight(th, &zero).unwrap();
        let e2 = QComplex::from_polar(1.0, 2.0 * th);
        let expect = qpoch(e2, zero.q, PochhammerOrder::Infinity).unwrap().value
            * qpoch(e2.conj(), zero.q, PochhammerOrder::Infinity).unwrap().value;
        assert!((w - expect.re).abs() < 1e-13);
    }

    #[test]
    fn norm_at_zero_is_constant() {
        let p = sample();
        let k = aw_constant(p.a, p.b, p.c, p.d, p.q).unwrap().value;
        assert_eq!(aw_norm(0, &p).unwrap().value, k);
        assert!(aw_norm(3, &p).unwrap().value.re > 0.0);
    }

    #[test]
    fn delta_sequence_basics() {
        let p = sample();
        assert_eq!(delta_seq(&DeltaSeq { params: p, t: c(0.7), n: 0 }).unwrap(), c(1.0));
        for n in 1..6 {
            assert_eq!(delta_seq(&DeltaSeq { params: p, t: c(1.0), n }).unwrap(), c(0.0));
        }
    }

    #[test]
    fn generating_function_t_zero() {
        let p = sample();
        let th = 1.1;
        let rhs = gen_func_rhs(th, &p, c(0.0), GenFuncVariant::DForm).unwrap().value;
        let e = QComplex::from_polar(1.0, th);
        let (a, b, cc, d) = (p.a, p.b, p.c, p.d);
        let expect = product_ratio(&[a * b * cc * d, d * e, d / e], &[a * d, b * d, cc * d], p.q).unwrap().value;
        assert!((rhs - expect).norm() < 1e-14 * expect.norm());
        let series = gen_func_series(th, &p, c(0.0), GenFuncVariant::DForm, 1e-15).unwrap().value;
        assert!((series - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn generating_function_forms() {
        let p = sample();
        let t = c(0.9);
        for th in theta_grid() {
            for v in [GenFuncVariant::DForm, GenFuncVariant::AForm] {
                let rhs = gen_func_rhs(th, &p, t, v).unwrap().value;
                let lhs = gen_func_series(th, &p, t, v, 1e-15).unwrap().value;
                assert!((rhs - lhs).norm() < 1e-11 * rhs.norm(), "{th} {v:?}");
            }
            let swapped = gen_func_rhs(th, &p.swap_ad(), t, GenFuncVariant::DForm).unwrap().value;
            let aform = gen_func_rhs(th, &p, t, GenFuncVariant::AForm).unwrap().value;
            assert_eq!(swapped, aform);
        }
    }
}
