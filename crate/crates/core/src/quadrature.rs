//! Periodic trapezoid quadrature on `[0, pi]` and the q-beta integrands.
//!
//! Every integrand here is even and `2 pi`-periodic in `theta` and analytic
//! for in-domain parameters, so the closed trapezoid rule on `[0, pi]`
//! converges geometrically. Nodes are doubled (old nodes reused) until two
//! successive estimates agree.

use std::f64::consts::PI;

use crate::error::{QError, Result};
use crate::hyperseries::{phi_eval, SeriesSpec};
use crate::par::{map_indexed, ExecMode};
use crate::qcore::{h_fast, qpoch_inf, require_unit_polydisc};
use crate::scalar::{c, ensure_finite, Base, EvalResult, QComplex, DEFAULT_TARGET};

/// Initial number of subintervals.
pub const INITIAL_INTERVALS: usize = 64;

/// Largest number of nodes before giving up.
pub const NODE_BUDGET: usize = 1 << 18;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub value: QComplex,
    /// The last refinement delta `|T_{2N} - T_N|`.
    pub err_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
    /// Refinement deltas, coarsest first.
    pub deltas: Vec<f64>,
}

impl QuadResult {
    pub fn to_eval(&self) -> EvalResult {
        EvalResult {
            value: self.value,
            err_estimate: self.err_estimate,
            terms_used: self.nodes_used,
            terminated: false,
            heuristic: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub target: f64,
    pub initial_intervals: usize,
    pub max_nodes: usize,
    pub mode: ExecMode,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            target: 1e-13,
            initial_intervals: INITIAL_INTERVALS,
            max_nodes: NODE_BUDGET,
            mode: ExecMode::Parallel,
        }
    }
}

/// `int_0^pi f(theta) d theta` to relative accuracy `target`.
pub fn integrate<F>(f: F, target: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<QComplex> + Sync + Send,
{
    integrate_with(
        f,
        &QuadOptions {
            target,
            ..QuadOptions::default()
        },
    )
}

/// Samples `f` at `theta_j = (offset + step j) pi / denom`, in index order.
fn sample<F>(f: &F, count: usize, offset: usize, step: usize, denom: usize, mode: ExecMode) -> Result<Vec<QComplex>>
where
    F: Fn(f64) -> Result<QComplex> + Sync + Send,
{
    let vals = map_indexed(count, mode, |j| {
        let theta = PI * (offset + step * j) as f64 / denom as f64;
        f(theta).and_then(|v| ensure_finite(v, "integrand"))
    });
    vals.into_iter().collect()
}

pub fn integrate_with<F>(f: F, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<QComplex> + Sync + Send,
{
    if !(opts.target > 0.0) || opts.initial_intervals == 0 {
        return Err(QError::Domain("quadrature needs a positive target and at least one interval".into()));
    }
    let mut n = opts.initial_intervals;
    let first = sample(&f, n + 1, 0, 1, n, opts.mode)?;
    let mut sum = (first[0] + first[n]) * 0.5;
    let mut abs_sum = 0.5 * (first[0].norm() + first[n].norm());
    for v in &first[1..n] {
        sum += v;
        abs_sum += v.norm();
    }
    let mut estimate = sum * (PI / n as f64);
    let mut deltas = Vec::new();
    loop {
        if 2 * n + 1 > opts.max_nodes {
            return Err(QError::QuadratureNotConverged {
                nodes: n + 1,
                delta: deltas.last().copied().unwrap_or(f64::INFINITY),
            });
        }
        // odd nodes of the doubled grid
        let fresh = sample(&f, n, 1, 2, 2 * n, opts.mode)?;
        for v in &fresh {
            sum += v;
            abs_sum += v.norm();
        }
        n *= 2;
        let refined = sum * (PI / n as f64);
        let delta = (refined - estimate).norm();
        deltas.push(delta);
        estimate = refined;
        let scale = refined.norm().max(abs_sum * PI / n as f64);
        if delta <= opts.target * scale {
            return Ok(QuadResult {
                value: refined,
                err_estimate: delta,
                nodes_used: n + 1,
                converged: true,
                deltas,
            });
        }
    }
}

/// Optional basic hypergeometric factor
/// `phi(a e^{i theta}, a e^{-i theta}, extra...; den; q, argument)` of a kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSeries {
    pub a: QComplex,
    pub extra: Vec<QComplex>,
    pub den: Vec<QComplex>,
    pub argument: QComplex,
}

/// `h(cos 2 theta; 1) h(cos theta; numer) / h(cos theta; denom)`, optionally
/// times a [`KernelSeries`]: the shape shared by every integral here.
#[derive(Debug, Clone, PartialEq)]
pub struct HKernel {
    pub q: Base,
    pub numer: Vec<QComplex>,
    pub denom: Vec<QComplex>,
    pub series: Option<KernelSeries>,
}

impl HKernel {
    pub fn weight(q: Base, numer: Vec<QComplex>, denom: Vec<QComplex>) -> Self {
        HKernel {
            q,
            numer,
            denom,
            series: None,
        }
    }

    pub fn eval(&self, theta: f64) -> Result<QComplex> {
        let x = theta.cos();
        let mut v = h_fast((2.0 * theta).cos(), c(1.0), self.q);
        for &a in &self.numer {
            v *= h_fast(x, a, self.q);
        }
        let mut den = c(1.0);
        for &a in &self.denom {
            den *= h_fast(x, a, self.q);
        }
        if den.norm() == 0.0 {
            return Err(QError::DenominatorPole {
                param: "h(cos theta; ...)".into(),
                index: 0,
            });
        }
        v /= den;
        if let Some(s) = &self.series {
            let e = QComplex::from_polar(1.0, theta);
            let mut num = vec![s.a * e, s.a / e];
            num.extend_from_slice(&s.extra);
            let spec = SeriesSpec::new(num, s.den.clone(), self.q, s.argument)?;
            v *= phi_eval(&spec, DEFAULT_TARGET)?.value;
        }
        ensure_finite(v, "integrand")
    }

    pub fn integrate(&self, target: f64) -> Result<QuadResult> {
        integrate(|t| self.eval(t), target)
    }
}

/// `h(cos 2 theta; 1) h(cos theta; d) / h(cos theta; a, b, c, u, v)`.
#[allow(clippy::too_many_arguments)]
pub fn nr_integrand(
    theta: f64,
    a: QComplex,
    b: QComplex,
    cc: QComplex,
    u: QComplex,
    v: QComplex,
    d: QComplex,
    q: Base,
) -> Result<QComplex> {
    require_unit_polydisc(&[a, b, cc, u, v], "Thm 2.1")?;
    HKernel::weight(q, vec![d], vec![a, b, cc, u, v]).eval(theta)
}

/// Integrand of the twelve-parameter integral: the weight
/// `h(cos 2theta; 1)/h(cos theta; a, b, c, d, r)` times
/// `_4phi_3(a e^{i theta}, a e^{-i theta}, beta, delta; s, t, h; q, bcdrz)`.
pub fn thm18_integrand(theta: f64, p: &crate::identities::ParameterPoint) -> Result<QComplex> {
    crate::identities::formulas::thm18_kernel(p)?.eval(theta)
}

/// `A_k(theta) = h(cos 2 theta; 1) h(cos theta; w) (t e^{i theta}, t e^{-i theta}; q)_k
///  / h(cos theta; a, b, c, d, u)`, bounded in `theta` for parameters in the unit polydisc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedKernel {
    pub denom: [QComplex; 5],
    pub w: QComplex,
    pub t: QComplex,
    pub k: usize,
    pub q: Base,
}

impl BoundedKernel {
    pub fn new(denom: [QComplex; 5], w: QComplex, t: QComplex, k: usize, q: Base) -> Result<Self> {
        require_unit_polydisc(&denom, "Prop 3.3")?;
        Ok(BoundedKernel { denom, w, t, k, q })
    }

    pub fn eval(&self, theta: f64) -> Result<QComplex> {
        let mut v = HKernel::weight(self.q, vec![self.w], self.denom.to_vec()).eval(theta)?;
        let e = QComplex::from_polar(1.0, theta);
        let qv = self.q.get();
        let mut qk = 1.0;
        for _ in 0..self.k {
            v *= (c(1.0) - self.t * e * qk) * (c(1.0) - self.t / e * qk);
            qk *= qv;
        }
        ensure_finite(v, "bounded kernel")
    }

    /// Explicit `theta`-independent bound
    /// `(-1, -1, -|w|, -|w|, -|t|, -|t|; q)_inf / prod_j (|a_j|; q)_inf^2`.
    pub fn majorant(&self) -> Result<f64> {
        let pinf = |x: f64| -> Result<f64> { Ok(qpoch_inf(c(x), self.q, DEFAULT_TARGET)?.value.re) };
        let mut top = pinf(-1.0)?.powi(2) * pinf(-self.w.norm())?.powi(2) * pinf(-self.t.norm())?.powi(2);
        for a in &self.denom {
            top /= pinf(a.norm())?.powi(2);
        }
        Ok(top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{aw_constant, h_product, h_product_multi};

    fn q(v: f64) -> Base {
        Base::new(v).unwrap()
    }

    #[test]
    fn constant_and_cosine() {
        let r = integrate(|_| Ok(c(1.0)), 1e-14).unwrap();
        assert!((r.value.re - PI).abs() < 1e-15);
        let r = integrate(|t| Ok(c(t.cos())), 1e-14).unwrap();
        assert!(r.value.norm() < 1e-15);
    }

    #[test]
    fn weight_integrates_to_constant() {
        let qq = q(0.5);
        let p = [c(0.3), c(0.2), c(0.1), c(0.4)];
        let r = HKernel::weight(qq, vec![], p.to_vec()).integrate(1e-13).unwrap();
        let k = aw_constant(p[0], p[1], p[2], p[3], qq).unwrap().value;
        assert!((r.value - k).norm() < 1e-10 * k.norm());
        assert!(r.converged);
        // geometric convergence once resolved
        let d = &r.deltas;
        if d.len() >= 2 {
            assert!(d[d.len() - 1] < 0.2 * d[d.len() - 2]);
        }
    }

    #[test]
    fn modes_give_identical_bits() {
        let kern = HKernel::weight(q(0.7), vec![c(0.5)], vec![c(0.6), c(-0.5), c(0.3), c(0.55), c(0.45)]);
        let par = integrate_with(|t| kern.eval(t), &QuadOptions::default()).unwrap();
        let seq = integrate_with(
            |t| kern.eval(t),
            &QuadOptions {
                mode: ExecMode::Sequential,
                ..QuadOptions::default()
            },
        )
        .unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn non_convergence_and_bad_samples() {
        let opts = QuadOptions {
            max_nodes: 200,
            ..QuadOptions::default()
        };
        let r = integrate_with(|t| Ok(c((40.0 * t).sin().abs())), &opts);
        assert!(matches!(r, Err(QError::QuadratureNotConverged { .. })));
        let r = integrate(|t| Ok(c(if t > 1.0 { f64::NAN } else { 1.0 })), 1e-10);
        assert!(r.is_err());
    }

    #[test]
    fn nr_integrand_compositions() {
        let qq = q(0.5);
        let (a, b, cc, u, v) = (c(0.3), c(0.2), c(0.25), c(0.1), c(0.35));
        let th = PI / 2.0;
        let direct = h_product(0.0f64.max(th.cos()), c(0.15), qq).unwrap().value * h_product((2.0 * th).cos(), c(1.0), qq).unwrap().value
            / h_product_multi(th.cos(), &[a, b, cc, u, v], qq).unwrap().value;
        let got = nr_integrand(th, a, b, cc, u, v, c(0.15), qq).unwrap();
        assert!((got - direct).norm() < 1e-13 * direct.norm());
        let d0 = nr_integrand(0.7, a, b, cc, u, v, c(0.0), qq).unwrap();
        let isv = HKernel::weight(qq, vec![], vec![a, b, cc, u, v]).eval(0.7).unwrap();
        assert_eq!(d0, isv);
        assert!(nr_integrand(0.7, c(1.2), b, cc, u, v, c(0.0), qq).is_err());
    }

    #[test]
    fn integrands_are_even_about_endpoints() {
        let kern = HKernel::weight(q(0.5), vec![c(0.4)], vec![c(0.3), c(0.2), c(0.1), c(0.35), c(0.15)]);
        for &t in &[0.1, 0.7, 1.3] {
            let here = kern.eval(t).unwrap();
            assert!((here - kern.eval(-t).unwrap()).norm() < 1e-15);
            assert!((kern.eval(PI - t).unwrap() - kern.eval(PI + t).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn thm18_integrand_special_cases() {
        use crate::identities::{ParameterPoint, Slot};
        let base = ParameterPoint::new(q(0.5))
            .with_real(Slot::A, 0.3)
            .with_real(Slot::B, 0.2)
            .with_real(Slot::C, 0.1)
            .with_real(Slot::D, 0.4)
            .with_real(Slot::R, 0.25)
            .with_real(Slot::S, 0.35)
            .with_real(Slot::T, 0.15)
            .with_real(Slot::H, 0.45)
            .with_real(Slot::Beta, 0.2)
            .with_real(Slot::Delta, 0.3)
            .with_real(Slot::Z, 0.5);
        let w = HKernel::weight(q(0.5), vec![], vec![c(0.3), c(0.2), c(0.1), c(0.4)]);
        let flat = base.clone().with_real(Slot::R, 0.0);
        for th in [0.2, 1.1, 2.9] {
            let v = thm18_integrand(th, &flat).unwrap();
            assert!((v - w.eval(th).unwrap()).norm() < 1e-14 * v.norm());
        }
        // beta = s and delta = t cancel, leaving (a e^{i theta}, a e^{-i theta}; h) as a 2phi1
        let cancel = base.clone().with_real(Slot::Beta, 0.35).with_real(Slot::Delta, 0.15);
        let th = 0.7;
        let e = QComplex::from_polar(1.0, th);
        let arg = c(0.2 * 0.1 * 0.4 * 0.25 * 0.5);
        let spec = SeriesSpec::new(vec![0.3 * e, 0.3 / e], vec![c(0.45)], q(0.5), arg).unwrap();
        let two = phi_eval(&spec, 1e-16).unwrap();
        let w5 = HKernel::weight(q(0.5), vec![], vec![c(0.3), c(0.2), c(0.1), c(0.4), c(0.25)]);
        let expect = w5.eval(th).unwrap() * two.value;
        let got = thm18_integrand(th, &cancel).unwrap();
        assert!((got - expect).norm() < 1e-13 * expect.norm(), "{got} vs {expect}");
        assert!(thm18_integrand(th, &base.with_real(Slot::H, 1.5)).is_err());
    }

    #[test]
    fn bounded_kernel_below_majorant() {
        let bk = BoundedKernel::new([c(0.3), c(0.2), c(0.45), c(0.1), c(0.4)], c(0.5), c(0.6), 7, q(0.5)).unwrap();
        let m = bk.majorant().unwrap();
        for j in 0..256 {
            let th = PI * j as f64 / 255.0;
            assert!(bk.eval(th).unwrap().norm() <= m);
        }
    }
}
