//! Left- and right-hand evaluators of every registered identity.
//!
//! Each side is computed from its own formula: integrals by quadrature,
//! series by summation, products by `qcore`. Nothing on one side is derived
//! from the other.

use std::f64::consts::PI;

use crate::askey_wilson::{aw_norm, aw_poly_sequence, aw_weight_complex, gen_func_rhs, gen_func_series, AwParams, GenFuncVariant};
use crate::error::{QError, Result};
use crate::hyperseries::{
    outer_sum, phi_eval, rescaled_uniform_bound, terminating_abs_sum, terminating_rescaled, terminating_sum, vwp_eval, OuterSumOptions, OuterTerm,
    SeriesSpec, VwpSpec,
};
use crate::qcore::{aw_constant, max_modulus, product_ratio, product_ratio_n, qpoch_inf, require_unit_polydisc};
use crate::quadrature::{integrate, HKernel, KernelSeries};
use crate::scalar::{c, Base, EvalResult, QComplex, DEFAULT_TARGET, EPS};

use super::summations::{andrews_watson_sum, q_chu_sum, q_gauss_sum, q_saalschutz_sum, verma_jain_sum};
use super::{ParameterPoint, Slot};

/// Relative accuracy requested from quadrature inside identity checks.
pub const QUAD_TARGET: f64 = 1e-13;

fn quad(kernel: &HKernel) -> Result<EvalResult> {
    kernel.integrate(QUAD_TARGET).map(|r| r.to_eval())
}

fn two_pi(r: EvalResult) -> EvalResult {
    r.scale(c(2.0 * PI))
}

fn get(p: &ParameterPoint, slots: &[Slot]) -> Result<Vec<QComplex>> {
    slots.iter().map(|&s| p.get(s)).collect()
}

/// Running ratio `(num...; q)_n / (den...; q)_n`, advanced one index at a time.
pub(crate) struct PochRun {
    num: Vec<QComplex>,
    den: Vec<QComplex>,
    q: f64,
    qk: f64,
    value: QComplex,
}

impl PochRun {
    pub(crate) fn new(num: Vec<QComplex>, den: Vec<QComplex>, q: Base) -> Self {
        PochRun {
            num,
            den,
            q: q.get(),
            qk: 1.0,
            value: c(1.0),
        }
    }

    pub(crate) fn value(&self) -> QComplex {
        self.value
    }

    pub(crate) fn advance(&mut self) -> Result<()> {
        let mut top = c(1.0);
        for &a in &self.num {
            top *= c(1.0) - a * self.qk;
        }
        let mut bottom = c(1.0);
        for &b in &self.den {
            let f = c(1.0) - b * self.qk;
            if f.norm() < 1e-14 {
                return Err(QError::DenominatorPole {
                    param: format!("{b}"),
                    index: 0,
                });
            }
            bottom *= f;
        }
        self.value *= top / bottom;
        self.qk *= self.q;
        Ok(())
    }
}

/// Sums explicitly given terms; the stopping rule uses the observed magnitudes.
fn explicit_series<F>(mut term: F) -> Result<EvalResult>
where
    F: FnMut(usize) -> Result<QComplex>,
{
    outer_sum(
        |n| {
            let v = term(n)?;
            Ok(OuterTerm::observed(v, 16.0 * EPS * (n + 1) as f64 * v.norm()))
        },
        OuterSumOptions::default(),
    )
}

/// `sum_n coeff(n) q^{n(n-1)/2} _{r+1}phi_r(q^{-n}, alpha q^n, rest; den; q, q z)`,
/// with the uniform bound on the rescaled inner series as the term majorant
/// whenever `|z| < 1`.
fn terminating_outer<F>(mut coeff: F, alpha: QComplex, rest: &[QComplex], den: &[QComplex], q: Base, z: QComplex) -> Result<EvalResult>
where
    F: FnMut(usize) -> Result<QComplex>,
{
    let bound = if z.norm() < 1.0 && max_modulus(den) < 1.0 {
        Some(rescaled_uniform_bound(alpha, rest, den, q, z.norm().max(1e-3))?)
    } else {
        None
    };
    let qv = q.get();
    let mut others = Vec::with_capacity(rest.len() + 1);
    outer_sum(
        |n| {
            let cn = coeff(n)?;
            others.clear();
            others.push(alpha * qv.powi(n as i32));
            others.extend_from_slice(rest);
            let t = terminating_rescaled(n, &others, den, q, z)?;
            let value = cn * t.value;
            let err = cn.norm() * t.err_estimate + EPS * value.norm();
            Ok(match bound {
                Some(b) => OuterTerm {
                    value,
                    err,
                    majorant: cn.norm() * b + err,
                    heuristic: false,
                },
                None => OuterTerm::observed(value, err),
            })
        },
        OuterSumOptions::default(),
    )
}

// ---------------------------------------------------------------------------
// Askey-Wilson family

fn aw_params(p: &ParameterPoint) -> Result<AwParams> {
    Ok(AwParams::new(p.get(Slot::A)?, p.get(Slot::B)?, p.get(Slot::C)?, p.get(Slot::D)?, p.q))
}

pub fn aw_integral_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let w = aw_params(p)?;
    quad(&HKernel::weight(p.q, vec![], w.as_array().to_vec()))
}

pub fn aw_integral_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let w = aw_params(p)?;
    aw_constant(w.a, w.b, w.c, w.d, w.q)
}

pub fn aw_orthogonality_lhs(m: usize, n: usize, p: &ParameterPoint) -> Result<EvalResult> {
    let w = aw_params(p)?;
    w.require_polydisc()?;
    let top = m.max(n);
    integrate(
        |theta| {
            let seq = aw_poly_sequence(top, theta.cos(), &w)?;
            Ok(aw_weight_complex(theta, &w)? * seq[m].value * seq[n].value)
        },
        QUAD_TARGET,
    )
    .map(|r| r.to_eval())
}

pub fn aw_orthogonality_rhs(m: usize, n: usize, p: &ParameterPoint) -> Result<EvalResult> {
    let w = aw_params(p)?;
    if m == n {
        aw_norm(n, &w)
    } else {
        w.require_polydisc()?;
        Ok(EvalResult::exact(c(0.0)))
    }
}

pub fn aw_orthogonality_floor(m: usize, n: usize, p: &ParameterPoint) -> Result<EvalResult> {
    aw_norm(m.max(n), &aw_params(p)?)
}

pub fn genfunc_lhs(variant: GenFuncVariant, p: &ParameterPoint) -> Result<EvalResult> {
    gen_func_series(p.theta()?, &aw_params(p)?, p.get(Slot::T)?, variant, 1e-15)
}

pub fn genfunc_rhs(variant: GenFuncVariant, p: &ParameterPoint) -> Result<EvalResult> {
    gen_func_rhs(p.theta()?, &aw_params(p)?, p.get(Slot::T)?, variant)
}

// ---------------------------------------------------------------------------
// Rogers summation and its extensions

pub fn rogers_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let [al, b, cc, d] = get(p, &[Slot::Alpha, Slot::B, Slot::C, Slot::D])?[..] else { unreachable!() };
    let spec = VwpSpec::new(al, vec![b, cc, d], p.q, al * p.q.get() / (b * cc * d))?;
    vwp_eval(&spec, DEFAULT_TARGET)
}

pub fn rogers_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let [al, b, cc, d] = get(p, &[Slot::Alpha, Slot::B, Slot::C, Slot::D])?[..] else { unreachable!() };
    let aq = al * p.q.get();
    product_ratio(
        &[aq, aq / (b * cc), aq / (b * d), aq / (cc * d)],
        &[aq / b, aq / cc, aq / d, aq / (b * cc * d)],
        p.q,
    )
}

fn ext_rogers_gamma(p: &ParameterPoint) -> QComplex {
    p.gamma.unwrap_or(c(0.0))
}

/// Sum of `(1 - alpha q^{2n})(alpha, q/a, q/b, q/c)_n / (q, alpha a, alpha b, alpha c)_n
/// (alpha abc/q^2)^n _4phi_3(q^{-n}, alpha q^n, beta, gamma; q/a, q/b, alpha beta gamma ab/q; q, q)`.
pub fn ext_rogers_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let [al, a, b, cc, be] = get(p, &[Slot::Alpha, Slot::A, Slot::B, Slot::C, Slot::Beta])?[..] else { unreachable!() };
    let ga = ext_rogers_gamma(p);
    let q = p.q;
    let qv = q.get();
    let x = al * a * b * cc / (qv * qv);
    let den = [qv / a, qv / b, al * be * ga * a * b / qv];
    let mut run = PochRun::new(vec![al, qv / a, qv / b, qv / cc], vec![c(qv), al * a, al * b, al * cc], q);
    outer_sum(
        |n| {
            if n > 0 {
                run.advance()?;
            }
            let cn = run.value() * (c(1.0) - al * qv.powi(2 * n as i32)) * x.powi(n as i32);
            let inner = terminating_sum(n, &[al * qv.powi(n as i32), be, ga], &den, q, c(qv))?;
            let v = cn * inner.value;
            Ok(OuterTerm::observed(v, cn.norm() * inner.err_estimate + EPS * v.norm()))
        },
        OuterSumOptions::default(),
    )
}

pub fn ext_rogers_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let [al, a, b, cc, be] = get(p, &[Slot::Alpha, Slot::A, Slot::B, Slot::C, Slot::Beta])?[..] else { unreachable!() };
    let ga = ext_rogers_gamma(p);
    let qv = p.q.get();
    let q2 = qv * qv;
    product_ratio(
        &[
            al,
            al * a * cc / qv,
            al * b * cc / qv,
            al * be * a * b / qv,
            al * ga * a * b / qv,
            al * be * ga * a * b * cc / q2,
        ],
        &[
            al * a,
            al * b,
            al * cc,
            al * be * a * b * cc / q2,
            al * ga * a * b * cc / q2,
            al * be * ga * a * b / qv,
        ],
        p.q,
    )
}

/// The substituted form `c -> qt`, `(a, b) -> (q/ab, q/ac)`; `(1/t; q)_n t^n`
/// is formed as `prod (t - q^k)` so `t` may be small.
pub fn ext_rogers_sub_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let [al, a, b, cc, t, be, ga] = get(p, &[Slot::Alpha, Slot::A, Slot::B, Slot::C, Slot::T, Slot::Beta, Slot::Gamma])?[..] else {
        unreachable!()
    };
    let q = p.q;
    let qv = q.get();
    let a2bc = a * a * b * cc;
    let x = al * qv / a2bc;
    let den = [a * b, a * cc, qv * al * be * ga / a2bc];
    let mut run = PochRun::new(vec![al, a * b, a * cc], vec![c(qv), qv * al / (a * b), qv * al / (a * cc), al * t * qv], q);
    let mut tpow = c(1.0);
    outer_sum(
        |n| {
            if n > 0 {
                run.advance()?;
                tpow *= t - qv.powi(n as i32 - 1);
            }
            let cn = run.value() * tpow * x.powi(n as i32) * (c(1.0) - al * qv.powi(2 * n as i32)) / (c(1.0) - al);
            let inner = terminating_sum(n, &[al * qv.powi(n as i32), be, ga], &den, q, c(qv))?;
            let v = cn * inner.value;
            Ok(OuterTerm::observed(v, cn.norm() * inner.err_estimate + EPS * v.norm()))
        },
        OuterSumOptions::default(),
    )
}

pub fn ext_rogers_sub_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let [al, a, b, cc, t, be, ga] = get(p, &[Slot::Alpha, Slot::A, Slot::B, Slot::C, Slot::T, Slot::Beta, Slot::Gamma])?[..] else {
        unreachable!()
    };
    let qv = p.q.get();
    let x = qv * al / (a * a * b * cc);
    product_ratio(
        &[qv * al, qv * al * t / (a * b), qv * al * t / (a * cc), x * be, x * ga, x * be * ga * t],
        &[qv * al / (a * b), qv * al / (a * cc), qv * al * t, x * be * t, x * ga * t, x * be * ga],
        p.q,
    )
}

// ---------------------------------------------------------------------------
// Five-parameter q-beta integrals

fn five(p: &ParameterPoint) -> Result<[QComplex; 5]> {
    let v = get(p, &[Slot::A, Slot::B, Slot::C, Slot::U, Slot::V])?;
    Ok([v[0], v[1], v[2], v[3], v[4]])
}

/// `(q, ab, ac, au, av, bc, bu, bv, cu, cv)`: the pair products shared by the integrals.
fn five_pairs(x: &[QComplex; 5], q: Base) -> Vec<QComplex> {
    let [a, b, cc, u, v] = *x;
    vec![c(q.get()), a * b, a * cc, a * u, a * v, b * cc, b * u, b * v, cc * u, cc * v]
}

pub fn nr_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let x = five(p)?;
    require_unit_polydisc(&x, "Thm 2.1")?;
    quad(&HKernel::weight(p.q, vec![p.get(Slot::D)?], x.to_vec()))
}

/// `_8W_7(abcd/q; ab, ac, bc, d/u, d/v; q, uv)` written without square roots:
/// `sum_k (1 - a1 q^{2k})/(1 - a1) (a1, ab, ac, bc)_k prod_{j<k}(u - d q^j)(v - d q^j)
///  / (q, cd, bd, ad, abcu, abcv)_k`, `a1 = abcd/q`. Valid for `d = 0` as well.
pub fn nr_series(a: QComplex, b: QComplex, cc: QComplex, d: QComplex, u: QComplex, v: QComplex, q: Base) -> Result<EvalResult> {
    let qv = q.get();
    let a1 = a * b * cc * d / qv;
    let mut run = PochRun::new(
        vec![a1, a * b, a * cc, b * cc],
        vec![c(qv), cc * d, b * d, a * d, a * b * cc * u, a * b * cc * v],
        q,
    );
    let mut uv = c(1.0);
    explicit_series(|k| {
        if k > 0 {
            run.advance()?;
            let dq = d * qv.powi(k as i32 - 1);
            uv *= (u - dq) * (v - dq);
        }
        Ok(run.value() * uv * (c(1.0) - a1 * qv.powi(2 * k as i32)) / (c(1.0) - a1))
    })
}

pub fn nr_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let x = five(p)?;
    let d = p.get(Slot::D)?;
    let [a, b, cc, u, v] = x;
    let mut den = five_pairs(&x, p.q);
    den.insert(1, a * b * cc * d);
    let pre = product_ratio(&[a * b * cc * u, a * b * cc * v, a * d, b * d, cc * d], &den, p.q)?;
    Ok(two_pi(pre).mul(nr_series(a, b, cc, d, u, v, p.q)?))
}

pub fn rahman_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let x = five(p)?;
    require_unit_polydisc(&x, "Thm 2.2")?;
    let [a, b, cc, u, v] = x;
    quad(&HKernel::weight(p.q, vec![a * b * cc * u * v], x.to_vec()))
}

pub fn rahman_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let x = five(p)?;
    let [a, b, cc, u, v] = x;
    let mut den = five_pairs(&x, p.q);
    den.push(u * v);
    let pre = product_ratio(
        &[a * b * cc * u, a * b * cc * v, a * b * u * v, a * cc * u * v, b * cc * u * v],
        &den,
        p.q,
    )?;
    Ok(two_pi(pre))
}

pub fn isv_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let x = five(p)?;
    require_unit_polydisc(&x, "Thm 2.3")?;
    quad(&HKernel::weight(p.q, vec![], x.to_vec()))
}

pub fn isv_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let x = five(p)?;
    let [a, b, cc, u, v] = x;
    let pre = product_ratio(&[a * b * cc * u, a * b * cc * v], &five_pairs(&x, p.q), p.q)?;
    let spec = SeriesSpec::new(vec![a * b, a * cc, b * cc], vec![a * b * cc * u, a * b * cc * v], p.q, u * v)?;
    Ok(two_pi(pre).mul(phi_eval(&spec, DEFAULT_TARGET)?))
}

// ---------------------------------------------------------------------------
// Twelve-parameter family

/// The five weight parameters of the twelve-parameter integral with the
/// derived `alpha = a^2 bcdr / q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twelve {
    pub a: QComplex,
    pub b: QComplex,
    pub c: QComplex,
    pub d: QComplex,
    pub r: QComplex,
    pub q: Base,
    pub alpha: QComplex,
}

impl Twelve {
    pub fn from_point(p: &ParameterPoint) -> Result<Self> {
        let [a, b, cc, d, r] = get(p, &[Slot::A, Slot::B, Slot::C, Slot::D, Slot::R])?[..] else { unreachable!() };
        Ok(Twelve {
            a,
            b,
            c: cc,
            d,
            r,
            q: p.q,
            alpha: a * a * b * cc * d * r / p.q.get(),
        })
    }

    pub fn bcdr(&self) -> QComplex {
        self.b * self.c * self.d * self.r
    }

    fn weight(&self) -> Vec<QComplex> {
        vec![self.a, self.b, self.c, self.d, self.r]
    }

    fn require(&self, what: &str) -> Result<()> {
        require_unit_polydisc(&self.weight(), what)
    }

    /// `2 pi (abcd, abcr, abdr, acdr)_inf / (q, ab, ac, ad, ar, bc, bd, br, cd, cr, dr, q alpha)_inf`.
    pub fn integral_prefactor(&self) -> Result<EvalResult> {
        let Twelve { a, b, c: cc, d, r, q, alpha } = *self;
        let pre = product_ratio(
            &[a * b * cc * d, a * b * cc * r, a * b * d * r, a * cc * d * r],
            &[
                c(q.get()),
                a * b,
                a * cc,
                a * d,
                a * r,
                b * cc,
                b * d,
                b * r,
                cc * d,
                cc * r,
                d * r,
                alpha * q.get(),
            ],
            q,
        )?;
        Ok(two_pi(pre))
    }

    /// `(abdr, acdr)_inf / (dr, q alpha)_inf`.
    pub fn series_prefactor(&self) -> Result<EvalResult> {
        let Twelve { a, b, c: cc, d, r, q, alpha } = *self;
        product_ratio(&[a * b * d * r, a * cc * d * r], &[d * r, alpha * q.get()], q)
    }

    /// `(alpha, ab, ac, ad, ar)_n / (q, abcd, abcr, abdr, acdr)_n`, plus extra factors.
    fn outer_run(&self, extra_num: &[QComplex], extra_den: &[QComplex]) -> PochRun {
        let Twelve { a, b, c: cc, d, r, q, alpha } = *self;
        let mut num = vec![alpha, a * b, a * cc, a * d, a * r];
        num.extend_from_slice(extra_num);
        let mut den = vec![c(q.get()), a * b * cc * d, a * b * cc * r, a * b * d * r, a * cc * d * r];
        den.extend_from_slice(extra_den);
        PochRun::new(num, den, q)
    }

    /// `(1 - alpha q^{2n}) / (1 - alpha)`.
    fn well_poised(&self, n: usize) -> QComplex {
        (c(1.0) - self.alpha * self.q.get().powi(2 * n as i32)) / (c(1.0) - self.alpha)
    }

    /// Kernel `h(cos 2t; 1) / h(cos t; a, b, c, d, r)` times `phi(a e^{it}, a e^{-it}, extra; den; q, arg)`.
    pub fn kernel(&self, numer: Vec<QComplex>, series: Option<(Vec<QComplex>, Vec<QComplex>, QComplex)>) -> HKernel {
        HKernel {
            q: self.q,
            numer,
            denom: self.weight(),
            series: series.map(|(extra, den, argument)| KernelSeries {
                a: self.a,
                extra,
                den,
                argument,
            }),
        }
    }

    /// `sum_n (extra_num, ab, ac, ad, ar)_n (bcdr z)^n / (q, extra_den, abcd, abcr)_n
    ///  _3phi_2(ab q^n, ac q^n, bc; abcd q^n, abcr q^n; q, dr)`, with the inner series
    /// dominated uniformly in `n` by `(-|ab|, -|ac|, -|bc|)_inf / (|abcd|, |abcr|, |dr|)_inf`.
    pub fn double_sum(&self, extra_num: &[QComplex], extra_den: &[QComplex], z: QComplex) -> Result<EvalResult> {
        let Twelve { a, b, c: cc, d, r, q, .. } = *self;
        let qv = q.get();
        let pinf = |x: f64| -> Result<f64> { Ok(qpoch_inf(c(x), q, DEFAULT_TARGET)?.value.re) };
        let (ab, ac, bc, abcd, abcr, dr) = (a * b, a * cc, b * cc, a * b * cc * d, a * b * cc * r, d * r);
        let g = pinf(-ab.norm())? * pinf(-ac.norm())? * pinf(-bc.norm())?
            / (pinf(abcd.norm())? * pinf(abcr.norm())? * pinf(dr.norm())?);
        let mut num = extra_num.to_vec();
        num.extend_from_slice(&[ab, ac, a * d, a * r]);
        let mut den = vec![c(qv)];
        den.extend_from_slice(extra_den);
        den.extend_from_slice(&[abcd, abcr]);
        let mut run = PochRun::new(num, den, q);
        let x = self.bcdr() * z;
        let certified = max_modulus(&[ab, ac, bc, abcd, abcr, dr]) < 1.0;
        outer_sum(
            |n| {
                if n > 0 {
                    run.advance()?;
                }
                let qn = qv.powi(n as i32);
                let cn = run.value() * x.powi(n as i32);
                let spec = SeriesSpec::new(vec![ab * qn, ac * qn, bc], vec![abcd * qn, abcr * qn], q, dr)?;
                let inner = phi_eval(&spec, DEFAULT_TARGET)?;
                let value = cn * inner.value;
                let err = cn.norm() * inner.err_estimate + EPS * value.norm();
                Ok(if certified {
                    OuterTerm {
                        value,
                        err,
                        majorant: cn.norm() * g + err,
                        heuristic: inner.heuristic,
                    }
                } else {
                    OuterTerm::observed(value, err)
                })
            },
            OuterSumOptions::default(),
        )
    }

    /// `_8W_7(a^2bcdr/q; ab, ac, ad, ar, 1/z; q, bcdr z)`.
    pub fn vwp_8w7(&self, z: QComplex) -> Result<EvalResult> {
        let Twelve { a, b, c: cc, d, r, q, alpha } = *self;
        if z.norm() == 0.0 {
            return Err(QError::Domain("z must be nonzero".into()));
        }
        let spec = VwpSpec::new(alpha, vec![a * b, a * cc, a * d, a * r, c(1.0) / z], q, self.bcdr() * z)?;
        vwp_eval(&spec, DEFAULT_TARGET)
    }
}

struct Inner4 {
    beta: QComplex,
    delta: QComplex,
    den: [QComplex; 3],
    z: QComplex,
}

fn inner4(p: &ParameterPoint) -> Result<Inner4> {
    let v = get(p, &[Slot::Beta, Slot::Delta, Slot::S, Slot::T, Slot::H, Slot::Z])?;
    Ok(Inner4 {
        beta: v[0],
        delta: v[1],
        den: [v[2], v[3], v[4]],
        z: v[5],
    })
}

/// The integrand of the twelve-parameter integral at `theta`.
pub fn thm18_kernel(p: &ParameterPoint) -> Result<HKernel> {
    let t = Twelve::from_point(p)?;
    let i = inner4(p)?;
    t.require("Thm 1.8")?;
    require_unit_polydisc(&i.den, "Thm 1.8")?;
    Ok(t.kernel(vec![], Some((vec![i.beta, i.delta], i.den.to_vec(), t.bcdr() * i.z))))
}

pub fn thm18_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    quad(&thm18_kernel(p)?)
}

/// The outer sum shared by both twelve-parameter identities:
/// `sum_n (1 - alpha q^{2n})(alpha, ab, ac, ad, ar)_n / ((1 - alpha)(q, abcd, abcr, abdr, acdr)_n)
///  (-bcdr)^n q^{n(n-1)/2} _4phi_3(q^{-n}, alpha q^n, beta, delta; s, t, h; q, qz)`.
pub fn twelve_outer_sum(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    let i = inner4(p)?;
    let mut run = t.outer_run(&[], &[]);
    let x = -t.bcdr();
    terminating_outer(
        |n| {
            if n > 0 {
                run.advance()?;
            }
            Ok(run.value() * t.well_poised(n) * x.powi(n as i32))
        },
        t.alpha,
        &[i.beta, i.delta],
        &i.den,
        t.q,
        i.z,
    )
}

pub fn thm19_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    let i = inner4(p)?;
    t.require("Thm 1.9")?;
    t.double_sum(&[i.beta, i.delta], &i.den, i.z)
}

/// Integral side rescaled by the ratio of the two prefactors, to be compared
/// with the double sum.
pub fn thm18_scaled_to_thm19(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    let ratio = t.series_prefactor()?.div(t.integral_prefactor()?);
    Ok(thm18_lhs(p)?.mul(ratio))
}

pub fn thm61_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    t.require("Thm 6.1")?;
    let z = p.get(Slot::Z)?;
    quad(&t.kernel(vec![t.a * t.bcdr() * z], None))
}

pub fn thm61_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    let z = p.get(Slot::Z)?;
    let Twelve { a, b, c: cc, d, r, q, .. } = t;
    let a2bcdr = a * a * b * cc * d * r;
    let pre = product_ratio(
        &[a * b * cc * d, a * b * cc * r, a * b * d * r, a * cc * d * r, a2bcdr * z, t.bcdr() * z],
        &[
            c(q.get()),
            a * b,
            a * cc,
            a * d,
            a * r,
            b * cc,
            b * d,
            b * r,
            cc * d,
            cc * r,
            d * r,
            a2bcdr,
        ],
        q,
    )?;
    Ok(two_pi(pre).mul(t.vwp_8w7(z)?))
}

pub fn thm62_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    t.require("Thm 6.2")?;
    let z = p.get(Slot::Z)?;
    t.double_sum(&[], &[t.alpha * t.q.get() * z], z)
}

pub fn thm62_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    Ok(t.series_prefactor()?.mul(t.vwp_8w7(p.get(Slot::Z)?)?))
}

fn uv(p: &ParameterPoint) -> Result<(QComplex, QComplex)> {
    Ok((p.get(Slot::U)?, p.get(Slot::V)?))
}

pub fn thm63_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    t.require("Thm 6.3")?;
    let (u, v) = uv(p)?;
    let al = t.alpha;
    quad(&t.kernel(vec![], Some((vec![al * u * v / t.q.get()], vec![al * u, al * v], t.bcdr()))))
}

/// `sum_n (1 - alpha q^{2n})(alpha, ab, ac, ad, ar, q/u, q/v)_n
///  / ((1 - alpha)(q, abcd, abcr, abdr, acdr, alpha u, alpha v)_n) (-alpha bcdr uv/q)^n q^{n(n-1)/2}`.
fn saalschutz_outer(t: &Twelve, u: QComplex, v: QComplex) -> Result<EvalResult> {
    let qv = t.q.get();
    let mut run = t.outer_run(&[qv / u, qv / v], &[t.alpha * u, t.alpha * v]);
    let x = -t.alpha * t.bcdr() * u * v / qv;
    explicit_series(|n| {
        if n > 0 {
            run.advance()?;
        }
        Ok(run.value() * t.well_poised(n) * x.powi(n as i32) * t.q.pow_binom2(n))
    })
}

pub fn thm63_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    let (u, v) = uv(p)?;
    Ok(t.integral_prefactor()?.mul(saalschutz_outer(&t, u, v)?))
}

pub fn thm64_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    t.require("Thm 6.4")?;
    let (u, v) = uv(p)?;
    let al = t.alpha;
    t.double_sum(&[al * u * v / t.q.get()], &[al * u, al * v], c(1.0))
}

pub fn thm64_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    let (u, v) = uv(p)?;
    Ok(t.series_prefactor()?.mul(saalschutz_outer(&t, u, v)?))
}

fn sqrt_q_alpha(t: &Twelve) -> QComplex {
    (t.alpha * t.q.get()).sqrt()
}

/// Sum over even indices `2n` with `(alpha, ab, ac, ad, ar)_{2n} / (q, abcd, abcr, abdr, acdr)_{2n}`
/// times `extra(n)`.
fn even_outer<F>(t: &Twelve, mut extra: F) -> Result<EvalResult>
where
    F: FnMut(usize) -> Result<QComplex>,
{
    let Twelve { a, b, c: cc, d, r, q, alpha } = *t;
    let num = [alpha, a * b, a * cc, a * d, a * r];
    let den = [c(q.get()), a * b * cc * d, a * b * cc * r, a * b * d * r, a * cc * d * r];
    let x = t.bcdr() * t.bcdr();
    explicit_series(|n| {
        let r2n = product_ratio_n(&num, &den, q, 2 * n)?.value;
        let wp = (c(1.0) - alpha * q.get().powi(4 * n as i32)) / (c(1.0) - alpha);
        Ok(r2n * wp * x.powi(n as i32) * extra(n)?)
    })
}

pub fn thm65_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    t.require("Thm 6.5")?;
    let s = sqrt_q_alpha(&t);
    quad(&t.kernel(vec![], Some((vec![c(0.0)], vec![s, -s], t.bcdr()))))
}

/// `sum_n ... (q; q^2)_n / (q alpha; q^2)_n (-alpha)^n (bcdr)^{2n} q^{3n^2 - n}`.
fn verma_jain_outer(t: &Twelve) -> Result<EvalResult> {
    let q = t.q;
    let qv = q.get();
    even_outer(t, |n| {
        let r = product_ratio_n(&[c(qv)], &[t.alpha * qv], q.squared(), n)?.value;
        let e = 3.0 * (n * n) as f64 - n as f64;
        Ok(r * (-t.alpha).powi(n as i32) * qv.powf(e))
    })
}

pub fn thm65_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    Ok(t.integral_prefactor()?.mul(verma_jain_outer(&t)?))
}

pub fn thm66_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    t.require("Thm 6.6")?;
    let s = sqrt_q_alpha(&t);
    t.double_sum(&[], &[s, -s], c(1.0))
}

pub fn thm66_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    Ok(t.series_prefactor()?.mul(verma_jain_outer(&t)?))
}

pub fn thm67_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    t.require("Thm 6.7")?;
    let la = p.get(Slot::Lambda)?;
    let (s, sl) = (sqrt_q_alpha(&t), la.sqrt());
    quad(&t.kernel(vec![], Some((vec![sl, -sl], vec![s, -s, la], t.bcdr()))))
}

/// `sum_n ... (q, q alpha/lambda; q^2)_n / (q alpha, q lambda; q^2)_n (bcdr)^{2n} lambda^n q^{2n^2 - n}`.
fn andrews_outer(t: &Twelve, la: QComplex) -> Result<EvalResult> {
    let q = t.q;
    let qv = q.get();
    even_outer(t, |n| {
        let r = product_ratio_n(&[c(qv), qv * t.alpha / la], &[qv * t.alpha, qv * la], q.squared(), n)?.value;
        let e = 2.0 * (n * n) as f64 - n as f64;
        Ok(r * la.powi(n as i32) * qv.powf(e))
    })
}

pub fn thm67_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    let la = p.get(Slot::Lambda)?;
    Ok(t.integral_prefactor()?.mul(andrews_outer(&t, la)?))
}

pub fn thm68_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    t.require("Thm 6.8")?;
    let la = p.get(Slot::Lambda)?;
    let (s, sl) = (sqrt_q_alpha(&t), la.sqrt());
    t.double_sum(&[sl, -sl], &[s, -s, la], c(1.0))
}

pub fn thm68_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let t = Twelve::from_point(p)?;
    let la = p.get(Slot::Lambda)?;
    Ok(t.series_prefactor()?.mul(andrews_outer(&t, la)?))
}

// ---------------------------------------------------------------------------
// The general A_n transformation

/// A sequence `A_n` fed to the general transformation.
pub type Sequence<'a> = &'a (dyn Fn(usize) -> QComplex + Sync);

/// `(alpha q, alpha uv/q)_inf / (alpha u, alpha v)_inf`.
fn transformation_prefactor(al: QComplex, u: QComplex, v: QComplex, q: Base) -> Result<EvalResult> {
    let qv = q.get();
    product_ratio(&[al * qv, al * u * v / qv], &[al * u, al * v], q)
}

/// `(alpha q, alpha uv/q)_inf / (alpha u, alpha v)_inf sum_n A_n (q/u; q)_n (alpha u)^n`.
pub fn prop41_lhs(al: QComplex, u: QComplex, v: QComplex, q: Base, seq: Sequence) -> Result<EvalResult> {
    let qv = q.get();
    let mut run = PochRun::new(vec![qv / u], vec![], q);
    let s = explicit_series(|n| {
        if n > 0 {
            run.advance()?;
        }
        Ok(seq(n) * run.value() * (al * u).powi(n as i32))
    })?;
    Ok(transformation_prefactor(al, u, v, q)?.mul(s))
}

/// `sum_n (1 - alpha q^{2n})(alpha, q/u, q/v)_n (-alpha uv/q)^n / ((1 - alpha)(q, alpha u, alpha v)_n)
///  sum_k (-1)^k q^{(n-k)(n-k-1)/2} (q^{n-k+1}; q)_k (alpha q^n; q)_k (q/v)^k / (q/v; q)_k A_k`,
/// the inner sum being `q^{n(n-1)/2}` times the original one.
pub fn prop41_rhs(al: QComplex, u: QComplex, v: QComplex, q: Base, seq: Sequence) -> Result<EvalResult> {
    let qv = q.get();
    let mut run = PochRun::new(vec![al, qv / u, qv / v], vec![c(qv), al * u, al * v], q);
    let x = -al * u * v / qv;
    let w = c(qv) / v;
    let mut qq = vec![1.0];
    explicit_series(|n| {
        if n > 0 {
            run.advance()?;
            qq.push(qq[n - 1] * (1.0 - qv.powi(n as i32)));
        }
        let aqn = al * qv.powi(n as i32);
        let mut inner = c(0.0);
        // (alpha q^n; q)_k (q/v)^k / (q/v; q)_k
        let mut ratio = c(1.0);
        let mut qk = 1.0;
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            inner += ratio * seq(k) * (sign * q.pow_binom2(n - k) * qq[n] / qq[n - k]);
            if k < n {
                let f = c(1.0) - w * qk;
                if f.norm() < 1e-14 {
                    return Err(QError::DenominatorPole {
                        param: format!("{w}"),
                        index: k,
                    });
                }
                ratio *= (c(1.0) - aqn * qk) * w / f;
                qk *= qv;
            }
        }
        Ok(run.value() * x.powi(n as i32) * inner * (c(1.0) - al * qv.powi(2 * n as i32)) / (c(1.0) - al))
    })
}

fn prop41_params(p: &ParameterPoint) -> Result<(QComplex, QComplex, QComplex)> {
    Ok((p.get(Slot::Alpha)?, p.get(Slot::U)?, p.get(Slot::V)?))
}

pub fn prop41_geometric_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let (al, u, v) = prop41_params(p)?;
    let z = p.get(Slot::Z)?;
    prop41_lhs(al, u, v, p.q, &|k| z.powi(k as i32))
}

pub fn prop41_geometric_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let (al, u, v) = prop41_params(p)?;
    let z = p.get(Slot::Z)?;
    prop41_rhs(al, u, v, p.q, &|k| z.powi(k as i32))
}

fn inverse_q_factorial(q: Base) -> impl Fn(usize) -> QComplex + Sync {
    move |k| {
        let mut f = 1.0;
        for j in 1..=k {
            f *= 1.0 - q.get().powi(j as i32);
        }
        c(1.0 / f)
    }
}

pub fn prop41_qinv_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let (al, u, v) = prop41_params(p)?;
    prop41_lhs(al, u, v, p.q, &inverse_q_factorial(p.q))
}

pub fn prop41_qinv_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let (al, u, v) = prop41_params(p)?;
    prop41_rhs(al, u, v, p.q, &inverse_q_factorial(p.q))
}

struct Prop42 {
    al: QComplex,
    u: QComplex,
    v: QComplex,
    inner: Inner4,
}

fn prop42_params(p: &ParameterPoint) -> Result<Prop42> {
    let (al, u, v) = prop41_params(p)?;
    Ok(Prop42 {
        al,
        u,
        v,
        inner: inner4(p)?,
    })
}

pub fn prop42_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let Prop42 { al, u, v, inner: i } = prop42_params(p)?;
    let qv = p.q.get();
    let spec = SeriesSpec::new(vec![qv / u, qv / v, i.beta, i.delta], i.den.to_vec(), p.q, al * u * v * i.z / qv)?;
    Ok(transformation_prefactor(al, u, v, p.q)?.mul(phi_eval(&spec, DEFAULT_TARGET)?))
}

pub fn prop42_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let Prop42 { al, u, v, inner: i } = prop42_params(p)?;
    let q = p.q;
    let qv = q.get();
    let mut run = PochRun::new(vec![al, qv / u, qv / v], vec![c(qv), al * u, al * v], q);
    let x = -al * u * v / qv;
    terminating_outer(
        |n| {
            if n > 0 {
                run.advance()?;
            }
            Ok(run.value() * x.powi(n as i32) * (c(1.0) - al * qv.powi(2 * n as i32)) / (c(1.0) - al))
        },
        al,
        &[i.beta, i.delta],
        &i.den,
        q,
        i.z,
    )
}

// ---------------------------------------------------------------------------
// Closed summations

pub fn qgauss_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let [a, b, cc] = get(p, &[Slot::A, Slot::B, Slot::C])?[..] else { unreachable!() };
    let spec = SeriesSpec::new(vec![a, b], vec![cc], p.q, cc / (a * b))?;
    phi_eval(&spec, DEFAULT_TARGET)
}

pub fn qgauss_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let [a, b, cc] = get(p, &[Slot::A, Slot::B, Slot::C])?[..] else { unreachable!() };
    q_gauss_sum(a, b, cc, p.q)
}

pub fn qchu_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let (b, cc) = (p.get(Slot::B)?, p.get(Slot::C)?);
    terminating_sum(p.degree()?, &[b], &[cc], p.q, c(p.q.get()))
}

pub fn qchu_floor(p: &ParameterPoint) -> Result<EvalResult> {
    let (b, cc) = (p.get(Slot::B)?, p.get(Slot::C)?);
    abs_floor(terminating_abs_sum(p.degree()?, &[b], &[cc], p.q, c(p.q.get())))
}

pub fn qchu_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let (b, cc) = (p.get(Slot::B)?, p.get(Slot::C)?);
    Ok(EvalResult::exact(q_chu_sum(p.degree()?, b, cc, p.q)?))
}

pub fn qsaalschutz_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let (al, u, v) = prop41_params(p)?;
    let n = p.degree()?;
    let qv = p.q.get();
    terminating_sum(n, &[al * qv.powi(n as i32), al * u * v / qv], &[al * u, al * v], p.q, c(qv))
}

pub fn qsaalschutz_floor(p: &ParameterPoint) -> Result<EvalResult> {
    let (al, u, v) = prop41_params(p)?;
    let n = p.degree()?;
    let qv = p.q.get();
    abs_floor(terminating_abs_sum(n, &[al * qv.powi(n as i32), al * u * v / qv], &[al * u, al * v], p.q, c(qv)))
}

pub fn qsaalschutz_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let (al, u, v) = prop41_params(p)?;
    Ok(EvalResult::exact(q_saalschutz_sum(p.degree()?, al, u, v, p.q)?))
}

pub fn verma_jain_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let al = p.get(Slot::Alpha)?;
    let n = p.degree()?;
    let qv = p.q.get();
    let s = (al * qv).sqrt();
    terminating_sum(n, &[al * qv.powi(n as i32), c(0.0)], &[s, -s], p.q, c(qv))
}

pub fn verma_jain_floor(p: &ParameterPoint) -> Result<EvalResult> {
    let al = p.get(Slot::Alpha)?;
    let n = p.degree()?;
    let qv = p.q.get();
    let s = (al * qv).sqrt();
    abs_floor(terminating_abs_sum(n, &[al * qv.powi(n as i32), c(0.0)], &[s, -s], p.q, c(qv)))
}

pub fn verma_jain_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    Ok(EvalResult::exact(verma_jain_sum(p.degree()?, p.get(Slot::Alpha)?, p.q)?))
}

pub fn andrews_watson_lhs(p: &ParameterPoint) -> Result<EvalResult> {
    let (al, la) = (p.get(Slot::Alpha)?, p.get(Slot::Lambda)?);
    let n = p.degree()?;
    let qv = p.q.get();
    let (s, sl) = ((al * qv).sqrt(), la.sqrt());
    terminating_sum(n, &[al * qv.powi(n as i32), sl, -sl], &[s, -s, la], p.q, c(qv))
}

pub fn andrews_watson_floor(p: &ParameterPoint) -> Result<EvalResult> {
    let (al, la) = (p.get(Slot::Alpha)?, p.get(Slot::Lambda)?);
    let n = p.degree()?;
    let qv = p.q.get();
    let (s, sl) = ((al * qv).sqrt(), la.sqrt());
    abs_floor(terminating_abs_sum(n, &[al * qv.powi(n as i32), sl, -sl], &[s, -s, la], p.q, c(qv)))
}

fn abs_floor(scale: Result<f64>) -> Result<EvalResult> {
    Ok(EvalResult::exact(c(scale?)))
}

pub fn andrews_watson_rhs(p: &ParameterPoint) -> Result<EvalResult> {
    let n = p.degree()?;
    Ok(EvalResult::exact(andrews_watson_sum(n, p.get(Slot::Alpha)?, p.get(Slot::Lambda)?, p.q)?))
}
