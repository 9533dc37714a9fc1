//! Registry of verifiable identities: each one a left side, a right side and
//! a domain, evaluated independently and compared.

mod catalog;
pub mod formulas;
pub mod sampling;
pub mod summations;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result, Side};
use crate::scalar::{relative_difference, Base, EvalResult, QComplex};

pub use sampling::{sample_point, Draw, Profile};

/// `|z|` above which the twelve-parameter identities are marked experimental.
pub const EXPERIMENTAL_Z: f64 = 0.95;

/// A named parameter slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    A,
    B,
    C,
    D,
    R,
    S,
    T,
    H,
    U,
    V,
    Z,
    Beta,
    Gamma,
    Delta,
    Lambda,
    Alpha,
    Theta,
    N,
}

impl Slot {
    pub const ALL: [Slot; 18] = [
        Slot::A,
        Slot::B,
        Slot::C,
        Slot::D,
        Slot::R,
        Slot::S,
        Slot::T,
        Slot::H,
        Slot::U,
        Slot::V,
        Slot::Z,
        Slot::Beta,
        Slot::Gamma,
        Slot::Delta,
        Slot::Lambda,
        Slot::Alpha,
        Slot::Theta,
        Slot::N,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Slot::A => "a",
            Slot::B => "b",
            Slot::C => "c",
            Slot::D => "d",
            Slot::R => "r",
            Slot::S => "s",
            Slot::T => "t",
            Slot::H => "h",
            Slot::U => "u",
            Slot::V => "v",
            Slot::Z => "z",
            Slot::Beta => "beta",
            Slot::Gamma => "gamma",
            Slot::Delta => "delta",
            Slot::Lambda => "lambda",
            Slot::Alpha => "alpha",
            Slot::Theta => "theta",
            Slot::N => "n",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of one identity instance. Unused slots stay unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub q: Base,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<QComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

impl ParameterPoint {
    pub fn new(q: Base) -> Self {
        ParameterPoint {
            q,
            a: None,
            b: None,
            c: None,
            d: None,
            r: None,
            s: None,
            t: None,
            h: None,
            u: None,
            v: None,
            z: None,
            beta: None,
            gamma: None,
            delta: None,
            lambda: None,
            alpha: None,
            theta: None,
            n: None,
        }
    }

    fn slot_ref(&self, slot: Slot) -> Option<&Option<QComplex>> {
        Some(match slot {
            Slot::A => &self.a,
            Slot::B => &self.b,
            Slot::C => &self.c,
            Slot::D => &self.d,
            Slot::R => &self.r,
            Slot::S => &self.s,
            Slot::T => &self.t,
            Slot::H => &self.h,
            Slot::U => &self.u,
            Slot::V => &self.v,
            Slot::Z => &self.z,
            Slot::Beta => &self.beta,
            Slot::Gamma => &self.gamma,
            Slot::Delta => &self.delta,
            Slot::Lambda => &self.lambda,
            Slot::Alpha => &self.alpha,
            Slot::Theta | Slot::N => return None,
        })
    }

    fn slot_mut(&mut self, slot: Slot) -> Option<&mut Option<QComplex>> {
        Some(match slot {
            Slot::A => &mut self.a,
            Slot::B => &mut self.b,
            Slot::C => &mut self.c,
            Slot::D => &mut self.d,
            Slot::R => &mut self.r,
            Slot::S => &mut self.s,
            Slot::T => &mut self.t,
            Slot::H => &mut self.h,
            Slot::U => &mut self.u,
            Slot::V => &mut self.v,
            Slot::Z => &mut self.z,
            Slot::Beta => &mut self.beta,
            Slot::Gamma => &mut self.gamma,
            Slot::Delta => &mut self.delta,
            Slot::Lambda => &mut self.lambda,
            Slot::Alpha => &mut self.alpha,
            Slot::Theta | Slot::N => return None,
        })
    }

    /// Value of a complex slot.
    pub fn get(&self, slot: Slot) -> Result<QComplex> {
        self.slot_ref(slot)
            .and_then(|v| *v)
            .ok_or(QError::MissingSlot(slot.name()))
    }

    /// Sets a complex slot; `theta` and `n` have their own setters.
    pub fn set(&mut self, slot: Slot, value: QComplex) -> &mut Self {
        if let Some(s) = self.slot_mut(slot) {
            *s = Some(value);
        }
        self
    }

    pub fn with(mut self, slot: Slot, value: QComplex) -> Self {
        self.set(slot, value);
        self
    }

    pub fn with_real(self, slot: Slot, value: f64) -> Self {
        self.with(slot, QComplex::new(value, 0.0))
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn theta(&self) -> Result<f64> {
        self.theta.ok_or(QError::MissingSlot("theta"))
    }

    pub fn degree(&self) -> Result<usize> {
        self.n.map(|n| n as usize).ok_or(QError::MissingSlot("n"))
    }

    pub fn is_set(&self, slot: Slot) -> bool {
        match slot {
            Slot::Theta => self.theta.is_some(),
            Slot::N => self.n.is_some(),
            s => self.slot_ref(s).is_some_and(|v| v.is_some()),
        }
    }

    pub fn set_slots(&self) -> Vec<Slot> {
        Slot::ALL.iter().copied().filter(|&s| self.is_set(s)).collect()
    }
}

/// What the two sides of an identity are made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kind {
    #[serde(rename = "series=series")]
    SeriesSeries,
    #[serde(rename = "series=integral")]
    SeriesIntegral,
    #[serde(rename = "integral=integral")]
    IntegralIntegral,
}

impl Kind {
    pub fn uses_quadrature(self) -> bool {
        !matches!(self, Kind::SeriesSeries)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::SeriesSeries => "series=series",
            Kind::SeriesIntegral => "series=integral",
            Kind::IntegralIntegral => "integral=integral",
        }
    }
}

pub(crate) type Evaluator = Arc<dyn Fn(&ParameterPoint) -> Result<EvalResult> + Send + Sync>;
pub(crate) type Predicate = Arc<dyn Fn(&ParameterPoint) -> Result<()> + Send + Sync>;
pub(crate) type Sampler = Arc<dyn Fn(&mut Draw) -> ParameterPoint + Send + Sync>;
pub(crate) type Denominators = Arc<dyn Fn(&ParameterPoint) -> Result<Vec<QComplex>> + Send + Sync>;

/// One registered identity.
pub struct IdentitySpec {
    pub id: String,
    /// Citation of the statement, e.g. `"Thm 1.8"`.
    pub citation: String,
    pub slots: Vec<Slot>,
    /// Human-readable domain.
    pub domain: String,
    pub kind: Kind,
    pub default_tolerance: f64,
    /// `alpha` is derived as `a^2 bcdr / q` and may not be supplied.
    pub derived_alpha: bool,
    pub(crate) predicate: Predicate,
    pub(crate) lhs: Evaluator,
    pub(crate) rhs: Evaluator,
    /// Scale floor for the relative error (orthogonality off-diagonals).
    pub(crate) floor: Option<Evaluator>,
    pub(crate) sampler: Sampler,
    /// Denominator parameters `x` of `(x; q)_k` factors, kept away from poles when sampling.
    pub(crate) denominators: Denominators,
}

impl fmt::Debug for IdentitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentitySpec")
            .field("id", &self.id)
            .field("citation", &self.citation)
            .field("slots", &self.slots)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

impl IdentitySpec {
    /// Declared slots set, nothing else set, domain predicate satisfied.
    pub fn validate(&self, p: &ParameterPoint) -> Result<()> {
        if self.derived_alpha && p.alpha.is_some() {
            return Err(QError::Domain(format!(
                "{}: alpha is derived as a^2bcdr/q and must not be set",
                self.id
            )));
        }
        for s in &self.slots {
            if !p.is_set(*s) {
                return Err(QError::MissingSlot(s.name()));
            }
        }
        if let Some(extra) = p.set_slots().into_iter().find(|s| !self.slots.contains(s)) {
            return Err(QError::Domain(format!("{}: slot {extra} is not a parameter of this identity", self.id)));
        }
        (self.predicate)(p)
    }

    pub fn lhs(&self, p: &ParameterPoint) -> Result<EvalResult> {
        self.validate(p)?;
        (self.lhs)(p).map_err(|e| side_error(Side::Lhs, e))
    }

    pub fn rhs(&self, p: &ParameterPoint) -> Result<EvalResult> {
        self.validate(p)?;
        (self.rhs)(p).map_err(|e| side_error(Side::Rhs, e))
    }

    pub fn slot_list(&self) -> String {
        self.slots.iter().map(|s| s.name()).collect::<Vec<_>>().join(",")
    }

    /// Flags points outside the certified domain of the twelve-parameter family.
    fn experimental(&self, p: &ParameterPoint) -> bool {
        self.slots.contains(&Slot::Z)
            && self.derived_alpha
            && p.z.is_some_and(|z| z.norm() > EXPERIMENTAL_Z)
    }
}

fn side_error(side: Side, e: QError) -> QError {
    match e {
        QError::Evaluator { .. } => e,
        other => QError::Evaluator {
            side,
            source: Box::new(other),
        },
    }
}

/// A registered specialization: the parent identity at an embedded point
/// must reproduce the child identity at the original point.
pub struct Reduction {
    /// e.g. `"thm18@r=0->aw-integral"`.
    pub name: String,
    pub parent: String,
    pub child: String,
    /// Human-readable embedding, e.g. `"r = 0"`.
    pub embedding: String,
    pub default_tolerance: f64,
    pub(crate) embed: Arc<dyn Fn(&ParameterPoint) -> Result<ParameterPoint> + Send + Sync>,
}

impl fmt::Debug for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Reduction").field("name", &self.name).finish_non_exhaustive()
    }
}

impl Reduction {
    pub fn embed(&self, p: &ParameterPoint) -> Result<ParameterPoint> {
        (self.embed)(p)
    }
}

/// One `(identity, point)` comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub index: usize,
    pub point: ParameterPoint,
    pub lhs_value: Option<QComplex>,
    pub rhs_value: Option<QComplex>,
    pub relative_error: Option<f64>,
    pub lhs_err_estimate: Option<f64>,
    pub rhs_err_estimate: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// The combined error estimates are themselves below the tolerance.
    pub resolved: bool,
    /// Some error estimate is a heuristic rather than a certified bound.
    pub heuristic: bool,
    /// The point lies outside the theorem's strict hypotheses (|z| near 1).
    pub experimental: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl IdentityReport {
    /// A record for a comparison that could not be carried out.
    pub fn failed(id: &str, index: usize, point: ParameterPoint, tolerance: f64, error: String) -> Self {
        IdentityReport {
            id: id.to_string(),
            index,
            point,
            lhs_value: None,
            rhs_value: None,
            relative_error: None,
            lhs_err_estimate: None,
            rhs_err_estimate: None,
            tolerance,
            pass: false,
            resolved: false,
            heuristic: false,
            experimental: false,
            error: Some(error),
            wall_time_ms: None,
        }
    }

    fn compare(id: &str, point: ParameterPoint, lhs: EvalResult, rhs: EvalResult, floor: f64, tol: f64) -> Self {
        let rel = relative_difference(lhs.value, rhs.value, floor);
        let scale = lhs.value.norm().max(rhs.value.norm()).max(floor).max(1e-300);
        let est = (lhs.err_estimate + rhs.err_estimate) / scale;
        IdentityReport {
            id: id.to_string(),
            index: 0,
            point,
            lhs_value: Some(lhs.value),
            rhs_value: Some(rhs.value),
            relative_error: Some(rel),
            lhs_err_estimate: Some(lhs.err_estimate),
            rhs_err_estimate: Some(rhs.err_estimate),
            tolerance: tol,
            pass: rel <= tol,
            resolved: est <= tol,
            heuristic: lhs.heuristic || rhs.heuristic,
            experimental: false,
            error: None,
            wall_time_ms: None,
        }
    }
}

/// The immutable identity catalogue.
pub struct Registry {
    specs: Vec<IdentitySpec>,
    reductions: Vec<Reduction>,
}

impl Registry {
    pub fn specs(&self) -> &[IdentitySpec] {
        &self.specs
    }

    pub fn reductions(&self) -> &[Reduction] {
        &self.reductions
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.specs.iter().map(|s| s.id.as_str())
    }

    pub fn get(&self, id: &str) -> Result<&IdentitySpec> {
        self.specs
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| QError::UnknownIdentity(id.to_string()))
    }

    pub fn reduction(&self, name: &str) -> Result<&Reduction> {
        self.reductions
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| QError::UnknownReduction(name.to_string()))
    }

    pub fn find_reduction(&self, parent: &str, child: &str) -> Result<&Reduction> {
        self.reductions
            .iter()
            .find(|r| r.parent == parent && r.child == child)
            .ok_or_else(|| QError::UnknownReduction(format!("{parent}->{child}")))
    }
}

/// The process-wide registry, built on first use.
pub fn registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let (specs, reductions) = catalog::build();
        Registry { specs, reductions }
    })
}

/// Evaluates both sides of `id` at `point` and compares them.
pub fn check(id: &str, point: &ParameterPoint, tol: Option<f64>) -> Result<IdentityReport> {
    let spec = registry().get(id)?;
    check_spec(spec, point, tol)
}

pub fn check_spec(spec: &IdentitySpec, point: &ParameterPoint, tol: Option<f64>) -> Result<IdentityReport> {
    spec.validate(point)?;
    let tol = tol.unwrap_or(spec.default_tolerance);
    let lhs = spec.lhs(point)?;
    let rhs = spec.rhs(point)?;
    let floor = match &spec.floor {
        Some(f) => f(point).map_err(|e| side_error(Side::Rhs, e))?.value.norm(),
        None => 0.0,
    };
    let mut report = IdentityReport::compare(&spec.id, point.clone(), lhs, rhs, floor, tol);
    if spec.experimental(point) {
        report.experimental = true;
        report.heuristic = true;
    }
    Ok(report)
}

/// Evaluates the parent identity at the embedded point and the child at
/// `point`; the reported error is the worse of the two side comparisons.
pub fn reduce_check(parent: &str, child: &str, point: &ParameterPoint, tol: Option<f64>) -> Result<IdentityReport> {
    let red = registry().find_reduction(parent, child)?;
    reduce_check_with(red, point, tol)
}

pub fn reduce_check_with(red: &Reduction, point: &ParameterPoint, tol: Option<f64>) -> Result<IdentityReport> {
    let reg = registry();
    let parent = reg.get(&red.parent)?;
    let child = reg.get(&red.child)?;
    let tol = tol.unwrap_or(red.default_tolerance);
    child.validate(point)?;
    let embedded = red.embed(point)?;
    parent.validate(&embedded)?;
    let pl = parent.lhs(&embedded)?;
    let pr = parent.rhs(&embedded)?;
    let cl = child.lhs(point)?;
    let cr = child.rhs(point)?;
    let left = IdentityReport::compare(&red.name, point.clone(), pl, cl, 0.0, tol);
    let right = IdentityReport::compare(&red.name, point.clone(), pr, cr, 0.0, tol);
    let worst = if left.relative_error >= right.relative_error { left.clone() } else { right.clone() };
    Ok(IdentityReport {
        pass: left.pass && right.pass,
        resolved: left.resolved && right.resolved,
        heuristic: left.heuristic || right.heuristic,
        ..worst
    })
}

#[cfg(test)]
mod tests;
