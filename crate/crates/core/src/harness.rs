//! Suite runner: samples points for every matching identity (and reduction),
//! checks them, and renders the report as JSON or CSV.
//!
//! Records are sorted by `(id, index)` before rendering, so a report depends
//! only on its configuration and never on thread scheduling. Timings are
//! recorded only on request because they break that byte-for-byte property.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{QError, Result};
use crate::identities::{
    check_spec, reduce_check_with, registry, sample_point, IdentityReport, IdentitySpec, ParameterPoint, Profile, Reduction,
    Slot,
};
use crate::par::{map_slice, ExecMode};
use crate::scalar::{Base, QComplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(QError::Config(format!("unknown format {other:?} (expected json or csv)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Glob over identity ids and reduction names.
    pub ids: String,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub q: Vec<f64>,
    pub cap: f64,
    pub profile: Profile,
    /// Where the report goes; not part of the report itself.
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
    pub timings: bool,
    #[serde(skip)]
    pub mode: ExecMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ids: "*".into(),
            samples: 20,
            seed: 42,
            tolerance: None,
            q: vec![0.3, 0.5, 0.7],
            cap: 0.5,
            profile: Profile::Real,
            output: None,
            format: Format::Json,
            timings: false,
            mode: ExecMode::Parallel,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| QError::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|x| parse(key, x.trim())).collect()
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(QError::Config("samples must be at least 1".into()));
        }
        if self.q.is_empty() {
            return Err(QError::Config("the q list is empty".into()));
        }
        for &q in &self.q {
            Base::new(q).map_err(|_| QError::Config(format!("q = {q} outside (0, 1)")))?;
        }
        if !(self.cap > 0.0 && self.cap < 1.0) {
            return Err(QError::Config(format!("modulus cap {} outside (0, 1)", self.cap)));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(QError::Config(format!("tolerance {t} must be positive")));
            }
        }
        glob::Pattern::new(&self.ids).map_err(|e| QError::Config(format!("ids pattern {:?}: {e}", self.ids)))?;
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "ids" => self.ids = value.to_string(),
            "samples" => self.samples = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "tolerance" | "tol" => self.tolerance = Some(parse(key, value)?),
            "q" => self.q = parse_list(key, value)?,
            "cap" | "modulus_cap" => self.cap = parse(key, value)?,
            "profile" => self.profile = value.parse().map_err(|e: QError| QError::Config(e.to_string()))?,
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "timings" => self.timings = parse(key, value)?,
            other => return Err(QError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parses a config file: one `key = value` per line, `#` comments.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| QError::Config(format!("line {}: expected key = value", no + 1)))?;
            let v = v.trim().trim_matches('"');
            cfg.set(k.trim(), v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub header: Header,
    pub records: Vec<IdentityReport>,
    pub summary: Summary,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityReport> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    pub fn to_csv(&self) -> String {
        render_csv(&self.records)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

enum Target<'a> {
    Identity(&'a IdentitySpec),
    Reduction(&'a Reduction),
}

impl Target<'_> {
    fn id(&self) -> &str {
        match self {
            Target::Identity(s) => &s.id,
            Target::Reduction(r) => &r.name,
        }
    }

    fn tolerance(&self, over: Option<f64>) -> f64 {
        over.unwrap_or(match self {
            Target::Identity(s) => s.default_tolerance,
            Target::Reduction(r) => r.default_tolerance,
        })
    }
}

/// Identity ids and reduction names matching `pattern`.
pub fn matching(pattern: &str) -> Result<Vec<String>> {
    Ok(targets(pattern)?.iter().map(|t| t.id().to_string()).collect())
}

fn targets(pattern: &str) -> Result<Vec<Target<'static>>> {
    let pat = glob::Pattern::new(pattern).map_err(|e| QError::Config(format!("ids pattern {pattern:?}: {e}")))?;
    let reg = registry();
    // an exact id always matches, even when it contains glob metacharacters
    let hit = |name: &str| name == pattern || pat.matches(name);
    let mut out: Vec<Target> = reg.specs().iter().filter(|s| hit(&s.id)).map(Target::Identity).collect();
    out.extend(reg.reductions().iter().filter(|r| hit(&r.name)).map(Target::Reduction));
    if out.is_empty() {
        return Err(QError::UnknownIdentity(pattern.to_string()));
    }
    Ok(out)
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".into()
    }
}

fn run_one(target: &Target, index: usize, cfg: &RunConfig) -> IdentityReport {
    let q = Base::new(cfg.q[index % cfg.q.len()]).expect("validated q list");
    let tol = target.tolerance(cfg.tolerance);
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<IdentityReport> {
        match target {
            Target::Identity(spec) => {
                let p = sample_point(spec, q, cfg.seed, index, cfg.profile, cfg.cap)?;
                check_spec(spec, &p, cfg.tolerance)
            }
            Target::Reduction(red) => {
                let child = registry().get(&red.child)?;
                let p = sample_point(child, q, cfg.seed, index, cfg.profile, cfg.cap)?;
                reduce_check_with(red, &p, cfg.tolerance)
            }
        }
    }));
    let mut rec = match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => IdentityReport::failed(target.id(), index, ParameterPoint::new(q), tol, e.to_string()),
        Err(p) => IdentityReport::failed(
            target.id(),
            index,
            ParameterPoint::new(q),
            tol,
            format!("evaluator panicked: {}", panic_message(p)),
        ),
    };
    rec.id = target.id().to_string();
    rec.index = index;
    if cfg.timings {
        rec.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    rec
}

/// Runs every matching identity and reduction at `cfg.samples` points.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let targets = targets(&cfg.ids)?;
    let jobs: Vec<(usize, usize)> = (0..targets.len())
        .flat_map(|t| (0..cfg.samples).map(move |i| (t, i)))
        .collect();
    let mut records = map_slice(&jobs, cfg.mode, |&(t, i)| run_one(&targets[t], i, cfg));
    records.sort_by(|a, b| a.id.cmp(&b.id).then(a.index.cmp(&b.index)));
    let passed = records.iter().filter(|r| r.pass).count();
    let max_rel_error = records
        .iter()
        .filter_map(|r| r.relative_error)
        .filter(|e| e.is_finite())
        .fold(0.0, f64::max);
    Ok(Report {
        header: Header {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
        },
        summary: Summary {
            total: records.len(),
            passed,
            failed: records.len() - passed,
            max_rel_error,
        },
        records,
    })
}

/// `re+imi` form used in CSV cells, e.g. `0.5+0i`, `0.25-1.5i`.
pub fn complex_string(z: QComplex) -> String {
    format!("{}{}{}i", z.re, if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { "-" } else { "+" }, z.im.abs())
}

fn point_string(p: &ParameterPoint) -> String {
    let mut s = format!("q={}", p.q.get());
    for slot in p.set_slots() {
        if let Ok(v) = p.get(slot) {
            let _ = write!(s, ";{}={}", slot.name(), complex_string(v));
        }
    }
    if let Some(th) = p.theta {
        let _ = write!(s, ";{}={th}", Slot::Theta.name());
    }
    if let Some(n) = p.n {
        let _ = write!(s, ";{}={n}", Slot::N.name());
    }
    s
}

pub const CSV_HEADER: [&str; 15] = [
    "id",
    "index",
    "point",
    "lhs_value",
    "rhs_value",
    "relative_error",
    "lhs_err_estimate",
    "rhs_err_estimate",
    "tolerance",
    "pass",
    "resolved",
    "heuristic",
    "experimental",
    "error",
    "wall_time_ms",
];

pub fn render_csv(records: &[IdentityReport]) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.id.clone(),
            r.index.to_string(),
            point_string(&r.point),
            r.lhs_value.map(complex_string).unwrap_or_default(),
            r.rhs_value.map(complex_string).unwrap_or_default(),
            opt(r.relative_error),
            opt(r.lhs_err_estimate),
            opt(r.rhs_err_estimate),
            format!("{:e}", r.tolerance),
            r.pass.to_string(),
            r.resolved.to_string(),
            r.heuristic.to_string(),
            r.experimental.to_string(),
            r.error.clone().unwrap_or_default(),
            opt(r.wall_time_ms),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn kv_config_round_trip() {
        let cfg = RunConfig::from_kv_str(
            "# suite\nids = thm6*\nsamples = 3\nseed = 9\nq = 0.3, 0.6\ncap = 0.4\nprofile = complex\nformat = csv\n",
        )
        .unwrap();
        assert_eq!(cfg.ids, "thm6*");
        assert_eq!(cfg.samples, 3);
        assert_eq!(cfg.q, vec![0.3, 0.6]);
        assert_eq!(cfg.profile, Profile::Complex);
        assert_eq!(cfg.format, Format::Csv);
        for bad in ["samples = 0", "q = 1.5", "cap = 1", "nope = 1", "just text", "tolerance = -1"] {
            assert!(matches!(RunConfig::from_kv_str(bad), Err(QError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn complex_cells() {
        assert_eq!(complex_string(c(0.5)), "0.5+0i");
        assert_eq!(complex_string(QComplex::new(0.25, -1.5)), "0.25-1.5i");
    }

    #[test]
    fn run_is_deterministic_across_modes() {
        let mut cfg = RunConfig {
            ids: "thm6[12]".into(),
            samples: 4,
            ..RunConfig::default()
        };
        let a = run(&cfg).unwrap();
        cfg.mode = ExecMode::Sequential;
        let b = run(&cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.summary.total, 8);
        assert!(a.all_passed());
        let ids: Vec<_> = a.records.iter().map(|r| (r.id.as_str(), r.index)).collect();
        assert_eq!(ids[0], ("thm61", 0));
        assert_eq!(ids[4], ("thm62", 0));
        let csv = a.to_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("id,index,point,"));
    }

    #[test]
    fn reductions_match_by_name_and_unknown_ids_fail() {
        let names = matching("*->rahman").unwrap();
        assert_eq!(names.len(), 2);
        assert!(matching("aw-orthogonality(1,2)").unwrap().len() == 1);
        assert!(matches!(matching("nosuch"), Err(QError::UnknownIdentity(_))));
    }
}
