//! The concrete identity list.

use std::sync::Arc;

use crate::askey_wilson::{theta_grid, GenFuncVariant};
use crate::error::{QError, Result};
use crate::qcore::max_modulus;
use crate::scalar::{c, Base, EvalResult, QComplex};

use super::formulas as f;
use super::{Draw, IdentitySpec, Kind, ParameterPoint, Reduction, Slot};

use Slot::*;

/// Largest orthogonality degree registered.
pub const ORTHOGONALITY_MAX_DEGREE: usize = 5;

struct Builder(IdentitySpec);

impl Builder {
    fn new(id: &str, citation: &str, kind: Kind, tol: f64, slots: &[Slot]) -> Self {
        Builder(IdentitySpec {
            id: id.to_string(),
            citation: citation.to_string(),
            slots: slots.to_vec(),
            domain: String::new(),
            kind,
            default_tolerance: tol,
            derived_alpha: false,
            predicate: Arc::new(|_| Ok(())),
            lhs: Arc::new(|_| Err(QError::Domain("no left side".into()))),
            rhs: Arc::new(|_| Err(QError::Domain("no right side".into()))),
            floor: None,
            sampler: Arc::new(|d: &mut Draw| ParameterPoint::new(d.q)),
            denominators: Arc::new(|_| Ok(Vec::new())),
        })
    }

    fn derived_alpha(mut self) -> Self {
        self.0.derived_alpha = true;
        self
    }

    fn domain(mut self, text: &str, pred: impl Fn(&ParameterPoint) -> Result<()> + Send + Sync + 'static) -> Self {
        self.0.domain = text.to_string();
        self.0.predicate = Arc::new(pred);
        self
    }

    fn sides(
        mut self,
        lhs: impl Fn(&ParameterPoint) -> Result<EvalResult> + Send + Sync + 'static,
        rhs: impl Fn(&ParameterPoint) -> Result<EvalResult> + Send + Sync + 'static,
    ) -> Self {
        self.0.lhs = Arc::new(lhs);
        self.0.rhs = Arc::new(rhs);
        self
    }

    fn sampler(mut self, s: impl Fn(&mut Draw) -> ParameterPoint + Send + Sync + 'static) -> Self {
        self.0.sampler = Arc::new(s);
        self
    }

    fn denominators(mut self, d: impl Fn(&ParameterPoint) -> Result<Vec<QComplex>> + Send + Sync + 'static) -> Self {
        self.0.denominators = Arc::new(d);
        self
    }

    fn floor(mut self, fl: impl Fn(&ParameterPoint) -> Result<EvalResult> + Send + Sync + 'static) -> Self {
        self.0.floor = Some(Arc::new(fl));
        self
    }

    fn done(self) -> IdentitySpec {
        self.0
    }
}

fn vals(p: &ParameterPoint, slots: &[Slot]) -> Result<Vec<QComplex>> {
    slots.iter().map(|&s| p.get(s)).collect()
}

fn polydisc(p: &ParameterPoint, slots: &[Slot], what: &str) -> Result<()> {
    let m = max_modulus(&vals(p, slots)?);
    if m < 1.0 {
        Ok(())
    } else {
        Err(QError::Domain(format!("{what} requires max modulus < 1, got {m}")))
    }
}

fn nonzero(p: &ParameterPoint, slots: &[Slot], what: &str) -> Result<()> {
    for &s in slots {
        if p.get(s)?.norm() == 0.0 {
            return Err(QError::Domain(format!("{what} requires {s} != 0")));
        }
    }
    Ok(())
}

fn below_one(x: QComplex, label: &str, what: &str) -> Result<()> {
    if x.norm() < 1.0 {
        Ok(())
    } else {
        Err(QError::Domain(format!("{what} requires |{label}| < 1, got {}", x.norm())))
    }
}

fn point(d: &Draw, slots: &[(Slot, QComplex)]) -> ParameterPoint {
    let mut p = ParameterPoint::new(d.q);
    for &(s, v) in slots {
        p.set(s, v);
    }
    p
}

fn std_point(d: &mut Draw, slots: &[Slot]) -> ParameterPoint {
    let mut p = ParameterPoint::new(d.q);
    for &s in slots {
        let v = d.std();
        p.set(s, v);
    }
    p
}

// ---------------------------------------------------------------------------

fn aw_family(out: &mut Vec<IdentitySpec>) {
    const ABCD: [Slot; 4] = [A, B, C, D];
    out.push(
        Builder::new("aw-integral", "Prop 1.2", Kind::SeriesIntegral, 1e-7, &ABCD)
            .domain("max(|a|,|b|,|c|,|d|) < 1", |p| polydisc(p, &ABCD, "the Askey-Wilson integral (Prop 1.2)"))
            .sides(f::aw_integral_lhs, f::aw_integral_rhs)
            .sampler(|d| std_point(d, &ABCD))
            .done(),
    );
    for m in 0..=ORTHOGONALITY_MAX_DEGREE {
        for n in 0..=ORTHOGONALITY_MAX_DEGREE {
            out.push(
                Builder::new(&format!("aw-orthogonality({m},{n})"), "Thm 1.3", Kind::SeriesIntegral, 1e-8, &ABCD)
                    .domain("max(|a|,|b|,|c|,|d|) < 1; error relative to the norm of degree max(m,n)", |p| {
                        polydisc(p, &ABCD, "Askey-Wilson orthogonality (Thm 1.3)")
                    })
                    .sides(move |p| f::aw_orthogonality_lhs(m, n, p), move |p| f::aw_orthogonality_rhs(m, n, p))
                    .floor(move |p| f::aw_orthogonality_floor(m, n, p))
                    .sampler(|d| std_point(d, &ABCD))
                    .denominators(|p| {
                        let abcd = vals(p, &ABCD)?.iter().product::<QComplex>();
                        Ok(vec![abcd, abcd / p.q.get()])
                    })
                    .done(),
            );
        }
    }
    for (id, citation, variant, lead) in [
        ("genfunc-d", "Prop 1.5", GenFuncVariant::DForm, D),
        ("genfunc-a", "Prop 1.7", GenFuncVariant::AForm, A),
    ] {
        const SLOTS: [Slot; 6] = [A, B, C, D, T, Theta];
        let text = format!("max(|a|,|b|,|c|,|d|) < 1, |{lead}t| < 1, theta in [0, pi]");
        out.push(
            Builder::new(id, citation, Kind::SeriesSeries, 1e-8, &SLOTS)
                .domain(&text, move |p| {
                    polydisc(p, &ABCD, "the generating function")?;
                    below_one(p.get(lead)? * p.get(T)?, &format!("{lead}t"), citation)?;
                    let th = p.theta()?;
                    if (0.0..=std::f64::consts::PI).contains(&th) {
                        Ok(())
                    } else {
                        Err(QError::Domain(format!("theta = {th} outside [0, pi]")))
                    }
                })
                .sides(move |p| f::genfunc_lhs(variant, p), move |p| f::genfunc_rhs(variant, p))
                .sampler(move |d| {
                    let mut p = std_point(d, &ABCD);
                    let m = p.get(lead).unwrap().norm();
                    let t = d.param(0.05, (0.5 / m).min(2.0));
                    let th = d.pick(&theta_grid());
                    p.set(T, t);
                    p.with_theta(th)
                })
                .denominators(move |p| {
                    let [a, b, cc, dd, t] = vals(p, &[A, B, C, D, T])?[..] else { unreachable!() };
                    let abcd = a * b * cc * dd;
                    Ok(vec![abcd * t, a * dd, b * dd, cc * dd, a * b, a * cc, abcd / p.q.get()])
                })
                .done(),
        );
    }
}

fn rogers_family(out: &mut Vec<IdentitySpec>) {
    const R6: [Slot; 4] = [Alpha, B, C, D];
    out.push(
        Builder::new("rogers-6w5", "Prop 1.4", Kind::SeriesSeries, 1e-8, &R6)
            .domain("|q alpha / bcd| < 1; b, c, d nonzero", |p| {
                nonzero(p, &[Alpha, B, C, D], "Prop 1.4")?;
                let [al, b, cc, d] = vals(p, &R6)?[..] else { unreachable!() };
                below_one(al * p.q.get() / (b * cc * d), "q alpha/bcd", "Prop 1.4")
            })
            .sides(f::rogers_lhs, f::rogers_rhs)
            .sampler(|d| {
                let (b, cc, dd) = (d.std(), d.std(), d.std());
                let x = d.range(0.05, 0.8);
                let al = b * cc * dd * x / d.q.get() * d.phase();
                point(d, &[(Alpha, al), (B, b), (C, cc), (D, dd)])
            })
            .denominators(|p| {
                let [al, b, cc, d] = vals(p, &R6)?[..] else { unreachable!() };
                let aq = al * p.q.get();
                Ok(vec![aq / b, aq / cc, aq / d, aq / (b * cc * d), al.sqrt(), -al.sqrt()])
            })
            .done(),
    );

    const ER: [Slot; 6] = [Alpha, A, B, C, Beta, Gamma];
    fn ext_pred(p: &ParameterPoint) -> Result<()> {
        nonzero(p, &[A, B, C], "Thm 1.4")?;
        let [al, a, b, cc, be] = vals(p, &[Alpha, A, B, C, Beta])?[..] else { unreachable!() };
        let ga = p.gamma.unwrap_or(c(0.0));
        let q2 = p.q.get() * p.q.get();
        below_one(al * be * a * b * cc / q2, "alpha beta abc/q^2", "Thm 1.4")?;
        below_one(al * ga * a * b * cc / q2, "alpha gamma abc/q^2", "Thm 1.4")
    }
    fn ext_dens(p: &ParameterPoint) -> Result<Vec<QComplex>> {
        let [al, a, b, cc, be] = vals(p, &[Alpha, A, B, C, Beta])?[..] else { unreachable!() };
        let ga = p.gamma.unwrap_or(c(0.0));
        let qv = p.q.get();
        let q2 = qv * qv;
        Ok(vec![
            al * a,
            al * b,
            al * cc,
            qv / a,
            qv / b,
            al * be * ga * a * b / qv,
            al * be * a * b * cc / q2,
            al * ga * a * b * cc / q2,
        ])
    }
    fn ext_sample(d: &mut Draw, gamma: bool) -> ParameterPoint {
        let mut p = point(d, &[]);
        for s in [A, B, C, Beta] {
            let v = d.std();
            p.set(s, v);
        }
        // keep |alpha abc/q^2| <= 1/2 so the outer series converges briskly
        let abc = (p.get(A).unwrap() * p.get(B).unwrap() * p.get(C).unwrap()).norm();
        let q2 = d.q.get() * d.q.get();
        let al = d.param(0.05, 0.5 * q2 / abc);
        p.set(Alpha, al);
        if gamma {
            let v = d.std();
            p.set(Gamma, v);
        }
        p
    }
    out.push(
        Builder::new("ext-rogers", "Thm 1.4", Kind::SeriesSeries, 1e-8, &ER)
            .domain("max(|alpha beta abc/q^2|, |alpha gamma abc/q^2|) < 1", ext_pred)
            .sides(f::ext_rogers_lhs, f::ext_rogers_rhs)
            .sampler(|d| ext_sample(d, true))
            .denominators(ext_dens)
            .done(),
    );
    out.push(
        Builder::new("ext-rogers-gamma0", "Thm 1.4 (gamma = 0)", Kind::SeriesSeries, 1e-8, &ER[..5])
            .domain("|alpha beta abc/q^2| < 1; gamma = 0", ext_pred)
            .sides(f::ext_rogers_lhs, f::ext_rogers_rhs)
            .sampler(|d| ext_sample(d, false))
            .denominators(ext_dens)
            .done(),
    );

    const ES: [Slot; 7] = [Alpha, A, B, C, T, Beta, Gamma];
    out.push(
        Builder::new("ext-rogers-sub", "Thm 1.4 (c -> qt substitution)", Kind::SeriesSeries, 1e-8, &ES)
            .domain("|q alpha beta t/a^2bc|, |q alpha gamma t/a^2bc| < 1; |alpha t q/a^2bc| < 1", |p| {
                nonzero(p, &[A, B, C, T], "Thm 1.4")?;
                let [al, a, b, cc, t, be, ga] = vals(p, &ES)?[..] else { unreachable!() };
                let x = p.q.get() * al / (a * a * b * cc);
                below_one(x * be * t, "q alpha beta t/a^2bc", "Thm 1.4")?;
                below_one(x * ga * t, "q alpha gamma t/a^2bc", "Thm 1.4")?;
                below_one(x * t, "alpha t q/a^2bc", "Thm 1.4")
            })
            .sides(f::ext_rogers_sub_lhs, f::ext_rogers_sub_rhs)
            .sampler(|d| {
                // alpha is drawn relative to a^2bc/q so the outer argument stays small
                let [a, b, cc] = [d.param(0.3, 0.5), d.param(0.3, 0.5), d.param(0.3, 0.5)];
                let al = a * a * b * cc / d.q.get() * d.range(0.02, 0.2) * d.phase();
                let t = d.std();
                let (be, ga) = (d.std(), d.std());
                point(d, &[(Alpha, al), (A, a), (B, b), (C, cc), (T, t), (Beta, be), (Gamma, ga)])
            })
            .denominators(|p| {
                let [al, a, b, cc, t, be, ga] = vals(p, &ES)?[..] else { unreachable!() };
                let qv = p.q.get();
                let x = qv * al / (a * a * b * cc);
                Ok(vec![
                    qv * al / (a * b),
                    qv * al / (a * cc),
                    qv * al * t,
                    x * be * t,
                    x * ga * t,
                    x * be * ga,
                    a * b,
                    a * cc,
                ])
            })
            .done(),
    );
}

const FIVE: [Slot; 5] = [A, B, C, U, V];

fn five_dens(p: &ParameterPoint) -> Result<Vec<QComplex>> {
    let [a, b, cc, u, v] = vals(p, &FIVE)?[..] else { unreachable!() };
    Ok(vec![a * b * cc * u, a * b * cc * v, a * b, a * cc, b * cc])
}

fn q_beta_family(out: &mut Vec<IdentitySpec>) {
    const NR: [Slot; 6] = [A, B, C, U, V, D];
    out.push(
        Builder::new("nassrallah-rahman", "Thm 2.1", Kind::SeriesIntegral, 1e-7, &NR)
            .domain("max(|a|,|b|,|c|,|u|,|v|) < 1; u, v nonzero", |p| {
                polydisc(p, &FIVE, "Thm 2.1")?;
                nonzero(p, &[U, V], "Thm 2.1")
            })
            .sides(f::nr_lhs, f::nr_rhs)
            .sampler(|d| std_point(d, &NR))
            .denominators(|p| {
                let mut v = five_dens(p)?;
                let [a, b, cc, d] = vals(p, &[A, B, C, D])?[..] else { unreachable!() };
                v.extend([a * b * cc * d, a * d, b * d, cc * d]);
                Ok(v)
            })
            .done(),
    );
    out.push(
        Builder::new("rahman", "Thm 2.2", Kind::SeriesIntegral, 1e-7, &FIVE)
            .domain("max(|a|,|b|,|c|,|u|,|v|) < 1", |p| polydisc(p, &FIVE, "Thm 2.2"))
            .sides(f::rahman_lhs, f::rahman_rhs)
            .sampler(|d| std_point(d, &FIVE))
            .done(),
    );
    out.push(
        Builder::new("isv", "Thm 2.3", Kind::SeriesIntegral, 1e-7, &FIVE)
            .domain("max(|a|,|b|,|c|,|u|,|v|) < 1", |p| polydisc(p, &FIVE, "Thm 2.3"))
            .sides(f::isv_lhs, f::isv_rhs)
            .sampler(|d| std_point(d, &FIVE))
            .denominators(five_dens)
            .done(),
    );
}

const WEIGHT5: [Slot; 5] = [A, B, C, D, R];

fn twelve_dens(p: &ParameterPoint) -> Result<Vec<QComplex>> {
    let [a, b, cc, d, r] = vals(p, &WEIGHT5)?[..] else { unreachable!() };
    let al = a * a * b * cc * d * r / p.q.get();
    Ok(vec![al, a * b * cc * d, a * b * cc * r, a * b * d * r, a * cc * d * r, d * r])
}

fn twelve_sample(d: &mut Draw, hi: f64) -> ParameterPoint {
    let mut p = ParameterPoint::new(d.q);
    for s in WEIGHT5 {
        let v = d.param(0.05, hi);
        p.set(s, v);
    }
    p
}

const T18: [Slot; 11] = [A, B, C, D, R, S, T, H, Z, Beta, Delta];

fn thm18_family(out: &mut Vec<IdentitySpec>) {
    fn pred(what: &'static str) -> impl Fn(&ParameterPoint) -> Result<()> + Send + Sync {
        move |p| {
            polydisc(p, &[A, B, C, D, R, S, T, H], what)?;
            let z = p.get(Z)?.norm();
            if z <= 1.0 {
                Ok(())
            } else {
                Err(QError::Domain(format!("{what} requires |z| <= 1, got {z}")))
            }
        }
    }
    fn sample(d: &mut Draw) -> ParameterPoint {
        let mut p = twelve_sample(d, 0.4);
        for s in [S, T, H, Beta, Delta] {
            let v = d.param(0.05, 0.4);
            p.set(s, v);
        }
        let z = d.param(0.05, 0.5);
        p.with(Z, z)
    }
    fn dens(p: &ParameterPoint) -> Result<Vec<QComplex>> {
        let mut v = twelve_dens(p)?;
        v.extend(vals(p, &[S, T, H])?);
        Ok(v)
    }
    let text = "max(|a|,|b|,|c|,|d|,|r|,|s|,|t|,|h|) < 1, |z| <= 1 (|z| > 0.95 experimental); alpha = a^2bcdr/q";
    // both identities hold the same outer-sum evaluator
    let outer: Arc<dyn Fn(&ParameterPoint) -> Result<EvalResult> + Send + Sync> = Arc::new(f::twelve_outer_sum);
    let o18 = outer.clone();
    out.push(
        Builder::new("thm18", "Thm 1.8", Kind::SeriesIntegral, 1e-7, &T18)
            .derived_alpha()
            .domain(text, pred("Thm 1.8"))
            .sides(f::thm18_lhs, move |p| {
                let t = f::Twelve::from_point(p)?;
                Ok(t.integral_prefactor()?.mul(o18(p)?))
            })
            .sampler(sample)
            .denominators(dens)
            .done(),
    );
    let o19 = outer;
    out.push(
        Builder::new("thm19", "Thm 1.9", Kind::SeriesSeries, 1e-8, &T18)
            .derived_alpha()
            .domain(text, pred("Thm 1.9"))
            .sides(f::thm19_lhs, move |p| {
                let t = f::Twelve::from_point(p)?;
                Ok(t.series_prefactor()?.mul(o19(p)?))
            })
            .sampler(sample)
            .denominators(dens)
            .done(),
    );
    out.push(
        Builder::new("thm18-vs-thm19", "Thm 1.8 / Thm 1.9", Kind::SeriesIntegral, 1e-7, &T18)
            .derived_alpha()
            .domain(text, pred("Thm 1.8"))
            .sides(f::thm18_scaled_to_thm19, f::thm19_lhs)
            .sampler(sample)
            .denominators(dens)
            .done(),
    );
}

fn section6_family(out: &mut Vec<IdentitySpec>) {
    const W6Z: [Slot; 6] = [A, B, C, D, R, Z];
    fn z_pred(what: &'static str) -> impl Fn(&ParameterPoint) -> Result<()> + Send + Sync {
        move |p| {
            polydisc(p, &WEIGHT5, what)?;
            nonzero(p, &[Z], what)?;
            let [_, b, cc, d, r, z] = vals(p, &W6Z)?[..] else { unreachable!() };
            below_one(b * cc * d * r * z, "bcdrz", what)
        }
    }
    fn z_sample(d: &mut Draw) -> ParameterPoint {
        let z = d.std();
        twelve_sample(d, 0.5).with(Z, z)
    }
    fn z_dens(p: &ParameterPoint) -> Result<Vec<QComplex>> {
        let mut v = twelve_dens(p)?;
        let [a, b, cc, d, r, z] = vals(p, &W6Z)?[..] else { unreachable!() };
        v.push(a * a * b * cc * d * r * z);
        Ok(v)
    }
    out.push(
        Builder::new("thm61", "Thm 6.1", Kind::SeriesIntegral, 1e-7, &W6Z)
            .derived_alpha()
            .domain("max(|a|,|b|,|c|,|d|,|r|) < 1; z nonzero, |bcdrz| < 1", z_pred("Thm 6.1"))
            .sides(f::thm61_lhs, f::thm61_rhs)
            .sampler(z_sample)
            .denominators(z_dens)
            .done(),
    );
    out.push(
        Builder::new("thm62", "Thm 6.2", Kind::SeriesSeries, 1e-8, &W6Z)
            .derived_alpha()
            .domain("max(|a|,|b|,|c|,|d|,|r|) < 1; z nonzero, |bcdrz| < 1", z_pred("Thm 6.2"))
            .sides(f::thm62_lhs, f::thm62_rhs)
            .sampler(z_sample)
            .denominators(z_dens)
            .done(),
    );

    const W6UV: [Slot; 7] = [A, B, C, D, R, U, V];
    fn uv_pred(what: &'static str) -> impl Fn(&ParameterPoint) -> Result<()> + Send + Sync {
        move |p| {
            polydisc(p, &WEIGHT5, what)?;
            nonzero(p, &[U, V], what)
        }
    }
    fn uv_sample(d: &mut Draw) -> ParameterPoint {
        let (u, v) = (d.param(0.3, 0.9), d.param(0.3, 0.9));
        twelve_sample(d, 0.5).with(U, u).with(V, v)
    }
    fn uv_dens(p: &ParameterPoint) -> Result<Vec<QComplex>> {
        let mut d = twelve_dens(p)?;
        let al = d[0];
        let (u, v) = (p.get(U)?, p.get(V)?);
        d.extend([al * u, al * v]);
        Ok(d)
    }
    out.push(
        Builder::new("thm63", "Thm 6.3", Kind::SeriesIntegral, 1e-7, &W6UV)
            .derived_alpha()
            .domain("max(|a|,|b|,|c|,|d|,|r|) < 1; u, v nonzero", uv_pred("Thm 6.3"))
            .sides(f::thm63_lhs, f::thm63_rhs)
            .sampler(uv_sample)
            .denominators(uv_dens)
            .done(),
    );
    out.push(
        Builder::new("thm64", "Thm 6.4", Kind::SeriesSeries, 1e-8, &W6UV)
            .derived_alpha()
            .domain("max(|a|,|b|,|c|,|d|,|r|) < 1; u, v nonzero", uv_pred("Thm 6.4"))
            .sides(f::thm64_lhs, f::thm64_rhs)
            .sampler(uv_sample)
            .denominators(uv_dens)
            .done(),
    );

    fn sqrt_dens(p: &ParameterPoint) -> Result<Vec<QComplex>> {
        let mut d = twelve_dens(p)?;
        let s = (d[0] * p.q.get()).sqrt();
        d.extend([s, -s, d[0] * p.q.get()]);
        Ok(d)
    }
    let text = "max(|a|,|b|,|c|,|d|,|r|) < 1; alpha = a^2bcdr/q";
    out.push(
        Builder::new("thm65", "Thm 6.5", Kind::SeriesIntegral, 1e-7, &WEIGHT5)
            .derived_alpha()
            .domain(text, |p| polydisc(p, &WEIGHT5, "Thm 6.5"))
            .sides(f::thm65_lhs, f::thm65_rhs)
            .sampler(|d| twelve_sample(d, 0.5))
            .denominators(sqrt_dens)
            .done(),
    );
    out.push(
        Builder::new("thm66", "Thm 6.6", Kind::SeriesSeries, 1e-8, &WEIGHT5)
            .derived_alpha()
            .domain(text, |p| polydisc(p, &WEIGHT5, "Thm 6.6"))
            .sides(f::thm66_lhs, f::thm66_rhs)
            .sampler(|d| twelve_sample(d, 0.5))
            .denominators(sqrt_dens)
            .done(),
    );

    const W6L: [Slot; 6] = [A, B, C, D, R, Lambda];
    fn l_pred(what: &'static str) -> impl Fn(&ParameterPoint) -> Result<()> + Send + Sync {
        move |p| {
            polydisc(p, &W6L, what)?;
            nonzero(p, &[Lambda], what)
        }
    }
    fn l_sample(d: &mut Draw) -> ParameterPoint {
        let la = d.std();
        twelve_sample(d, 0.5).with(Lambda, la)
    }
    fn l_dens(p: &ParameterPoint) -> Result<Vec<QComplex>> {
        let mut d = sqrt_dens(p)?;
        let la = p.get(Lambda)?;
        d.extend([la, la * p.q.get()]);
        Ok(d)
    }
    out.push(
        Builder::new("thm67", "Thm 6.7", Kind::SeriesIntegral, 1e-7, &W6L)
            .derived_alpha()
            .domain("max(|a|,|b|,|c|,|d|,|r|,|lambda|) < 1; lambda nonzero", l_pred("Thm 6.7"))
            .sides(f::thm67_lhs, f::thm67_rhs)
            .sampler(l_sample)
            .denominators(l_dens)
            .done(),
    );
    out.push(
        Builder::new("thm68", "Thm 6.8", Kind::SeriesSeries, 1e-8, &W6L)
            .derived_alpha()
            .domain("max(|a|,|b|,|c|,|d|,|r|,|lambda|) < 1; lambda nonzero", l_pred("Thm 6.8"))
            .sides(f::thm68_lhs, f::thm68_rhs)
            .sampler(l_sample)
            .denominators(l_dens)
            .done(),
    );
}

fn transformation_family(out: &mut Vec<IdentitySpec>) {
    fn base_pred(p: &ParameterPoint, what: &str) -> Result<()> {
        nonzero(p, &[U, V], what)?;
        let [al, u, v] = vals(p, &[Alpha, U, V])?[..] else { unreachable!() };
        below_one(al * u, "alpha u", what)?;
        below_one(al * v, "alpha v", what)?;
        below_one(al * u * v / p.q.get(), "alpha uv/q", what)
    }
    fn base_sample(d: &mut Draw) -> ParameterPoint {
        let al = d.std();
        let (u, v) = (d.param(0.3, 0.9), d.param(0.3, 0.9));
        point(d, &[(Alpha, al), (U, u), (V, v)])
    }
    fn base_dens(p: &ParameterPoint) -> Result<Vec<QComplex>> {
        let [al, u, v] = vals(p, &[Alpha, U, V])?[..] else { unreachable!() };
        let qv = p.q.get();
        Ok(vec![al * u, al * v, qv / v, al])
    }
    out.push(
        Builder::new("prop41", "Prop 4.1 (A_n = z^n)", Kind::SeriesSeries, 1e-8, &[Alpha, U, V, Z])
            .domain("|alpha u|, |alpha v|, |alpha uv/q|, |alpha u z| < 1", |p| {
                base_pred(p, "Prop 4.1")?;
                below_one(p.get(Alpha)? * p.get(U)? * p.get(Z)?, "alpha u z", "Prop 4.1")
            })
            .sides(f::prop41_geometric_lhs, f::prop41_geometric_rhs)
            .sampler(|d| {
                let z = d.std();
                base_sample(d).with(Z, z)
            })
            .denominators(base_dens)
            .done(),
    );
    out.push(
        Builder::new("prop41-qinv", "Prop 4.1 (A_n = 1/(q;q)_n)", Kind::SeriesSeries, 1e-8, &[Alpha, U, V])
            .domain("|alpha u|, |alpha v|, |alpha uv/q| < 1", |p| base_pred(p, "Prop 4.1"))
            .sides(f::prop41_qinv_lhs, f::prop41_qinv_rhs)
            .sampler(base_sample)
            .denominators(base_dens)
            .done(),
    );
    const P42: [Slot; 9] = [Alpha, U, V, Z, Beta, Delta, S, T, H];
    out.push(
        Builder::new("prop42", "Prop 4.2", Kind::SeriesSeries, 1e-8, &P42)
            .domain("|alpha u|, |alpha v|, |alpha uvz/q| < 1; |z| < 1; max(|s|,|t|,|h|) < 1", |p| {
                base_pred(p, "Prop 4.2")?;
                polydisc(p, &[S, T, H, Z], "Prop 4.2")?;
                below_one(p.get(Alpha)? * p.get(U)? * p.get(V)? * p.get(Z)? / p.q.get(), "alpha uvz/q", "Prop 4.2")
            })
            .sides(f::prop42_lhs, f::prop42_rhs)
            .sampler(|d| {
                let mut p = base_sample(d);
                for s in [Z, Beta, Delta, S, T, H] {
                    let v = d.std();
                    p.set(s, v);
                }
                p
            })
            .denominators(|p| {
                let mut d = base_dens(p)?;
                d.extend(vals(p, &[S, T, H])?);
                Ok(d)
            })
            .done(),
    );
}

/// Largest terminating degree sampled for the closed summations at base `q`:
/// the terms of a `q^{-n}` series reach `q^{-n(n-1)/2}` before cancelling.
fn summation_degree_cap(q: Base) -> u32 {
    let mut n = 0u32;
    while n < 12 && q.pow_binom2(n as usize + 1) > 1e-6 {
        n += 1;
    }
    n
}

fn summation_family(out: &mut Vec<IdentitySpec>) {
    fn degree(p: &ParameterPoint) -> Result<()> {
        let n = p.degree()?;
        if n <= 60 {
            Ok(())
        } else {
            Err(QError::Domain(format!("terminating degree {n} above 60")))
        }
    }
    out.push(
        Builder::new("qgauss", "q-Gauss summation", Kind::SeriesSeries, 1e-8, &[A, B, C])
            .domain("|c/ab| < 1; a, b nonzero", |p| {
                nonzero(p, &[A, B], "q-Gauss")?;
                below_one(p.get(C)? / (p.get(A)? * p.get(B)?), "c/ab", "q-Gauss")
            })
            .sides(f::qgauss_lhs, f::qgauss_rhs)
            .sampler(|d| {
                let (a, b) = (d.std(), d.std());
                let cc = a * b * d.range(0.05, 0.9) * d.phase();
                point(d, &[(A, a), (B, b), (C, cc)])
            })
            .denominators(|p| {
                let [a, b, cc] = vals(p, &[A, B, C])?[..] else { unreachable!() };
                Ok(vec![cc, cc / (a * b)])
            })
            .done(),
    );
    out.push(
        Builder::new("qchu", "q-Chu-Vandermonde summation", Kind::SeriesSeries, 1e-8, &[B, C, N])
            .domain("n <= 60", degree)
            .sides(f::qchu_lhs, f::qchu_rhs)
            .floor(f::qchu_floor)
            .sampler(|d| {
                let (b, cc) = (d.std(), d.std());
                let n = d.int(0, summation_degree_cap(d.q));
                point(d, &[(B, b), (C, cc)]).with_n(n)
            })
            .denominators(|p| Ok(vec![p.get(C)?]))
            .done(),
    );
    out.push(
        Builder::new("qsaalschutz", "q-Pfaff-Saalschutz summation", Kind::SeriesSeries, 1e-8, &[Alpha, U, V, N])
            .domain("n <= 60; u, v nonzero", |p| {
                degree(p)?;
                nonzero(p, &[U, V], "q-Pfaff-Saalschutz")
            })
            .sides(f::qsaalschutz_lhs, f::qsaalschutz_rhs)
            .floor(f::qsaalschutz_floor)
            .sampler(|d| {
                let al = d.std();
                let (u, v) = (d.param(0.3, 0.9), d.param(0.3, 0.9));
                let n = d.int(0, summation_degree_cap(d.q));
                point(d, &[(Alpha, al), (U, u), (V, v)]).with_n(n)
            })
            .denominators(|p| {
                let [al, u, v] = vals(p, &[Alpha, U, V])?[..] else { unreachable!() };
                Ok(vec![al * u, al * v])
            })
            .done(),
    );
    out.push(
        Builder::new("verma-jain", "Verma-Jain summation", Kind::SeriesSeries, 1e-8, &[Alpha, N])
            .domain("n <= 60", degree)
            .sides(f::verma_jain_lhs, f::verma_jain_rhs)
            .floor(f::verma_jain_floor)
            .sampler(|d| {
                let al = d.std();
                let n = d.int(0, summation_degree_cap(d.q));
                point(d, &[(Alpha, al)]).with_n(n)
            })
            .denominators(|p| {
                let al = p.get(Alpha)?;
                let s = (al * p.q.get()).sqrt();
                Ok(vec![s, -s, al * p.q.get()])
            })
            .done(),
    );
    out.push(
        Builder::new("andrews-watson", "Andrews q-Watson summation", Kind::SeriesSeries, 1e-8, &[Alpha, Lambda, N])
            .domain("n <= 60; lambda nonzero", |p| {
                degree(p)?;
                nonzero(p, &[Lambda], "Andrews q-Watson")
            })
            .sides(f::andrews_watson_lhs, f::andrews_watson_rhs)
            .floor(f::andrews_watson_floor)
            .sampler(|d| {
                let (al, la) = (d.std(), d.std());
                let n = d.int(0, summation_degree_cap(d.q));
                point(d, &[(Alpha, al), (Lambda, la)]).with_n(n)
            })
            .denominators(|p| {
                let (al, la) = (p.get(Alpha)?, p.get(Lambda)?);
                let qv = p.q.get();
                let s = (al * qv).sqrt();
                Ok(vec![s, -s, la, al * qv, la * qv])
            })
            .done(),
    );
}

fn reductions() -> Vec<Reduction> {
    fn red(
        parent: &str,
        child: &str,
        embedding: &str,
        tol: f64,
        embed: impl Fn(&ParameterPoint) -> Result<ParameterPoint> + Send + Sync + 'static,
    ) -> Reduction {
        Reduction {
            name: format!("{parent}@{}->{child}", embedding.replace(' ', "")),
            parent: parent.to_string(),
            child: child.to_string(),
            embedding: embedding.to_string(),
            default_tolerance: tol,
            embed: Arc::new(embed),
        }
    }
    vec![
        red("thm18", "aw-integral", "r = 0", 1e-9, |p| {
            // the remaining slots are arbitrary in-domain values: with r = 0 the
            // inner series has argument 0 and drops out
            Ok(p.clone()
                .with_real(R, 0.0)
                .with_real(S, 0.3)
                .with_real(T, 0.2)
                .with_real(H, 0.1)
                .with_real(Beta, 0.25)
                .with_real(Delta, 0.15)
                .with_real(Z, 0.4))
        }),
        red("nassrallah-rahman", "rahman", "d = abcuv", 1e-9, |p| {
            let [a, b, cc, u, v] = vals(p, &FIVE)?[..] else { unreachable!() };
            Ok(p.clone().with(D, a * b * cc * u * v))
        }),
        red("nassrallah-rahman", "isv", "d = 0", 1e-9, |p| Ok(p.clone().with_real(D, 0.0))),
        red("thm61", "rahman", "z = 1", 1e-9, |p| {
            let [a, b, cc, u, v] = vals(p, &FIVE)?[..] else { unreachable!() };
            Ok(ParameterPoint::new(p.q)
                .with(A, a)
                .with(B, b)
                .with(C, cc)
                .with(D, u)
                .with(R, v)
                .with_real(Z, 1.0))
        }),
    ]
}

pub(super) fn build() -> (Vec<IdentitySpec>, Vec<Reduction>) {
    let mut out = Vec::new();
    rogers_family(&mut out);
    aw_family(&mut out);
    q_beta_family(&mut out);
    thm18_family(&mut out);
    transformation_family(&mut out);
    section6_family(&mut out);
    summation_family(&mut out);
    (out, reductions())
}
