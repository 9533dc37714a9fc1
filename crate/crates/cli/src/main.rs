//! `qseries`: run identity suites, evaluate single quantities, list the catalogue.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use qseries::askey_wilson::{aw_poly, AwParams};
use qseries::harness::{run, Format, RunConfig};
use qseries::hyperseries::{phi_eval, vwp_eval, SeriesSpec, VwpSpec};
use qseries::identities::{check, registry, IdentityReport, ParameterPoint, Profile, Slot};
use qseries::par::ExecMode;
use qseries::qcore::qpoch;
use qseries::{Base, EvalResult, PochhammerOrder, QError};

const EVAL_TARGET: f64 = 1e-15;

#[derive(Parser)]
#[command(name = "qseries", version, about = "Numerical q-series identities: check, evaluate, list")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check identities at seeded sample points and write a report.
    Check(CheckArgs),
    /// Evaluate one quantity.
    Eval(EvalArgs),
    /// List registered identities and reductions.
    List {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct CheckArgs {
    /// key = value file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Glob over identity ids and reduction names.
    #[arg(long)]
    ids: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, alias = "tolerance")]
    tol: Option<f64>,
    /// Comma-separated bases, cycled over the sample index.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    /// Record per-point wall time (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expr {
    Qpoch,
    Phi,
    Vwp,
    Awpoly,
    IntegralId,
}

#[derive(Args)]
struct EvalArgs {
    expr: Expr,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    q: Option<f64>,
    /// Identity id (vwp, integral-id).
    #[arg(long)]
    id: Option<String>,
    /// Order for qpoch (`inf` for the infinite product) or degree for awpoly.
    #[arg(long)]
    n: Option<String>,
    /// Numerator parameters of phi, comma-separated.
    #[arg(long)]
    num: Option<String>,
    /// Denominator parameters of phi, comma-separated.
    #[arg(long)]
    den: Option<String>,
    /// Leading parameter of vwp.
    #[arg(long)]
    a1: Option<String>,
    /// Remaining vwp parameters, comma-separated.
    #[arg(long)]
    tail: Option<String>,
    /// Series argument for phi / vwp; the z slot otherwise.
    #[arg(long)]
    z: Option<String>,
    /// Evaluation point for awpoly.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
}

enum Failure {
    Usage(String),
    Eval(String),
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        match e {
            QError::UnknownIdentity(id) => Failure::Usage(format!("unknown identity {id:?}")),
            QError::UnknownReduction(r) => Failure::Usage(format!("unknown reduction {r:?}")),
            QError::Config(m) => Failure::Usage(format!("invalid configuration: {m}")),
            QError::MissingSlot(s) => Failure::Usage(format!("missing argument --{s}")),
            other => Failure::Eval(other.to_string()),
        }
    }
}

/// Parses `0.3`, `0.3+0.1i`, `-0.2-1e-3i`, `0.5i`.
fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::Usage(format!("cannot parse complex number {s:?}"));
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            let im = body[k..].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, im))
        }
        None => body.parse::<f64>().map(|im| Complex64::new(0.0, im)).map_err(|_| bad()),
    }
}

fn parse_list(s: &Option<String>, flag: &str) -> Result<Vec<Complex64>, Failure> {
    match s {
        None => Ok(Vec::new()),
        Some(s) if s.trim().is_empty() => Ok(Vec::new()),
        Some(s) => s.split(',').map(parse_complex).collect::<Result<_, _>>().map_err(|e| match e {
            Failure::Usage(m) => Failure::Usage(format!("--{flag}: {m}")),
            other => other,
        }),
    }
}

fn need<'a, T>(x: &'a Option<T>, flag: &str) -> Result<&'a T, Failure> {
    x.as_ref().ok_or_else(|| Failure::Usage(format!("missing argument --{flag}")))
}

fn complex_of(x: &Option<String>, flag: &str) -> Result<Complex64, Failure> {
    parse_complex(need(x, flag)?)
}

fn base(q: Option<f64>) -> Result<Base, Failure> {
    Base::new(*need(&q, "q")?).map_err(|e| Failure::Usage(e.to_string()))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn cell(z: Complex64) -> String {
    qseries::harness::complex_string(z)
}

fn print_value(e: &EvalResult, json_out: bool, extra: &[(&str, String)]) {
    if json_out {
        let mut obj = json!({
            "value": [e.value.re, e.value.im],
            "err_estimate": e.err_estimate,
            "terms_used": e.terms_used,
            "terminated": e.terminated,
            "heuristic": e.heuristic,
        });
        for (k, v) in extra {
            obj[*k] = json!(v);
        }
        println!("{obj}");
    } else {
        println!("value        {}", cell(e.value));
        println!("err_estimate {:e}", e.err_estimate);
        println!("terms_used   {}", e.terms_used);
        for (k, v) in extra {
            println!("{k:12} {v}");
        }
    }
}

fn print_sides(r: &IdentityReport, lhs_label: &str, rhs_label: &str, json_out: bool) {
    let pair = |z: Option<Complex64>| z.map(|z| json!([z.re, z.im])).unwrap_or(json!(null));
    let diff = match (r.lhs_value, r.rhs_value) {
        (Some(l), Some(rr)) => Some(l - rr),
        _ => None,
    };
    if json_out {
        println!(
            "{}",
            json!({
                "id": r.id,
                "lhs": pair(r.lhs_value),
                "rhs": pair(r.rhs_value),
                "lhs_kind": lhs_label,
                "rhs_kind": rhs_label,
                "difference": pair(diff),
                "relative_error": r.relative_error,
                "lhs_err_estimate": r.lhs_err_estimate,
                "rhs_err_estimate": r.rhs_err_estimate,
                "pass": r.pass,
            })
        );
    } else {
        let show = |z: Option<Complex64>| z.map(cell).unwrap_or_else(|| "-".into());
        println!("{}", r.id);
        println!("  lhs ({lhs_label})  {}  ± {:e}", show(r.lhs_value), r.lhs_err_estimate.unwrap_or(0.0));
        println!("  rhs ({rhs_label})  {}  ± {:e}", show(r.rhs_value), r.rhs_err_estimate.unwrap_or(0.0));
        println!("  difference      {}", show(diff));
        println!("  relative error  {:e}", r.relative_error.unwrap_or(f64::NAN));
        println!("  pass            {}", r.pass);
    }
}

fn point_from_args(args: &EvalArgs) -> Result<ParameterPoint, Failure> {
    let mut p = ParameterPoint::new(base(args.q)?);
    let slots: [(Slot, &Option<String>); 16] = [
        (Slot::A, &args.a),
        (Slot::B, &args.b),
        (Slot::C, &args.c),
        (Slot::D, &args.d),
        (Slot::R, &args.r),
        (Slot::S, &args.s),
        (Slot::T, &args.t),
        (Slot::H, &args.h),
        (Slot::U, &args.u),
        (Slot::V, &args.v),
        (Slot::Z, &args.z),
        (Slot::Beta, &args.beta),
        (Slot::Gamma, &args.gamma),
        (Slot::Delta, &args.delta),
        (Slot::Lambda, &args.lambda),
        (Slot::Alpha, &args.alpha),
    ];
    for (slot, value) in slots {
        if let Some(v) = value {
            p.set(slot, parse_complex(v)?);
        }
    }
    if let Some(th) = args.theta {
        p = p.with_theta(th);
    }
    if let Some(n) = &args.n {
        p = p.with_n(n.parse().map_err(|_| Failure::Usage(format!("--n: cannot parse {n:?}")))?);
    }
    Ok(p)
}

fn identity_sides(args: &EvalArgs, integral: bool) -> Result<(), Failure> {
    let id = need(&args.id, "id")?;
    let spec = registry().get(id)?;
    if integral && !spec.kind.uses_quadrature() {
        return Err(Failure::Usage(format!("{id} has no integral side (kind {})", spec.kind.as_str())));
    }
    let p = point_from_args(args)?;
    let report = check(id, &p, None)?;
    let (l, r) = if integral { ("quadrature", "series") } else { ("series", "closed form") };
    print_sides(&report, l, r, args.json);
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    match args.expr {
        Expr::Qpoch => {
            let q = base(args.q)?;
            let a = complex_of(&args.a, "a")?;
            let n = match args.n.as_deref() {
                None | Some("inf") | Some("infinity") => PochhammerOrder::Infinity,
                Some(n) => PochhammerOrder::Finite(n.parse().map_err(|_| Failure::Usage(format!("--n: cannot parse {n:?}")))?),
            };
            print_value(&qpoch(a, q, n)?, args.json, &[]);
        }
        Expr::Phi => {
            let q = base(args.q)?;
            let spec = SeriesSpec::new(parse_list(&args.num, "num")?, parse_list(&args.den, "den")?, q, complex_of(&args.z, "z")?)?;
            print_value(&phi_eval(&spec, EVAL_TARGET)?, args.json, &[]);
        }
        Expr::Vwp => {
            if args.id.is_some() {
                return identity_sides(args, false);
            }
            let q = base(args.q)?;
            let spec = VwpSpec::new(complex_of(&args.a1, "a1")?, parse_list(&args.tail, "tail")?, q, complex_of(&args.z, "z")?)?;
            print_value(&vwp_eval(&spec, EVAL_TARGET)?, args.json, &[]);
        }
        Expr::Awpoly => {
            let q = base(args.q)?;
            let n: usize = need(&args.n, "n")?
                .parse()
                .map_err(|_| Failure::Usage("--n must be a non-negative integer".into()))?;
            let x = *need(&args.x, "x")?;
            let p = AwParams::new(
                complex_of(&args.a, "a")?,
                complex_of(&args.b, "b")?,
                complex_of(&args.c, "c")?,
                complex_of(&args.d, "d")?,
                q,
            );
            print_value(&aw_poly(n, x, &p)?, args.json, &[]);
        }
        Expr::IntegralId => return identity_sides(args, true),
    }
    Ok(())
}

fn config_from(args: &CheckArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            RunConfig::from_kv_str(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = &args.ids {
        cfg.ids = v.clone();
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.tol {
        cfg.tolerance = Some(v);
    }
    if let Some(v) = &args.q {
        cfg.set("q", v)?;
    }
    if let Some(v) = args.cap {
        cfg.cap = v;
    }
    if let Some(v) = &args.profile {
        cfg.profile = v.parse::<Profile>().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if let Some(v) = &args.output {
        cfg.output = Some(v.clone());
    }
    if let Some(v) = &args.format {
        cfg.format = v.parse::<Format>()?;
    }
    cfg.timings |= args.timings;
    if args.sequential {
        cfg.mode = ExecMode::Sequential;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_check(args: &CheckArgs) -> Result<bool, Failure> {
    let cfg = config_from(args)?;
    let report = run(&cfg)?;
    let text = report.render(cfg.format);
    match &cfg.output {
        Some(path) => std::fs::write(path, if text.ends_with('\n') { text } else { text + "\n" })
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => emit(&if text.ends_with('\n') { text } else { text + "\n" }),
    }
    for r in report.failures() {
        eprintln!(
            "FAIL {} #{}: relative error {} (tolerance {:e}){}",
            r.id,
            r.index,
            r.relative_error.map(|e| format!("{e:e}")).unwrap_or_else(|| "-".into()),
            r.tolerance,
            r.error.as_deref().map(|e| format!(": {e}")).unwrap_or_default()
        );
    }
    let s = &report.summary;
    eprintln!("{} records, {} passed, {} failed, max relative error {:e}", s.total, s.passed, s.failed, s.max_rel_error);
    Ok(report.all_passed())
}

fn cmd_list(json_out: bool) {
    let reg = registry();
    if json_out {
        let ids: Vec<_> = reg
            .specs()
            .iter()
            .map(|s| {
                json!({
                    "id": s.id,
                    "citation": s.citation,
                    "slots": s.slots.iter().map(|x| x.name()).collect::<Vec<_>>(),
                    "domain": s.domain,
                    "kind": s.kind.as_str(),
                    "default_tolerance": s.default_tolerance,
                })
            })
            .collect();
        let reds: Vec<_> = reg
            .reductions()
            .iter()
            .map(|r| json!({"name": r.name, "parent": r.parent, "child": r.child, "embedding": r.embedding}))
            .collect();
        emit(&serde_json::to_string_pretty(&json!({"identities": ids, "reductions": reds})).unwrap());
        return;
    }
    let mut out = String::new();
    let _ = writeln!(out, "{:24} {:32} {:14} {:32} domain", "id", "citation", "kind", "slots");
    for s in reg.specs() {
        let _ = writeln!(out, "{:24} {:32} {:14} {:32} {}", s.id, s.citation, s.kind.as_str(), s.slot_list(), s.domain);
    }
    out.push('\n');
    out.push_str("reductions:\n");
    for r in reg.reductions() {
        let _ = writeln!(out, "  {:40} {} at {} -> {}", r.name, r.parent, r.embedding, r.child);
    }
    out.push('\n');
    let _ = writeln!(out, "{} identities, {} reductions", reg.specs().len(), reg.reductions().len());
    emit(&out);
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Check(args) => cmd_check(args).map(|ok| if ok { 0 } else { 1 }),
        Command::Eval(args) => cmd_eval(args).map(|_| 0),
        Command::List { json } => {
            cmd_list(*json);
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Eval(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        let ok = |s: &str| match parse_complex(s) {
            Ok(z) => z,
            Err(_) => panic!("{s}"),
        };
        assert_eq!(ok("0.5"), Complex64::new(0.5, 0.0));
        assert_eq!(ok("0.3+0.1i"), Complex64::new(0.3, 0.1));
        assert_eq!(ok("-0.2-1e-3i"), Complex64::new(-0.2, -1e-3));
        assert_eq!(ok("1e-2+2E+1i"), Complex64::new(0.01, 20.0));
        assert_eq!(ok("0.5i"), Complex64::new(0.0, 0.5));
        assert_eq!(ok("-0.5i"), Complex64::new(0.0, -0.5));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+i").is_err());
    }
}
