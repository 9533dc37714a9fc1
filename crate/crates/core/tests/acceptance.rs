//! Acceptance suite: one line per criterion, then a single verdict.

use std::time::{Duration, Instant};

use qseries::askey_wilson::{aw_norm, theta_grid, AwParams};
use qseries::harness::{run, RunConfig};
use qseries::hyperseries::{rescaled_uniform_bound, terminating_rescaled};
use qseries::identities::formulas::{aw_orthogonality_lhs, twelve_outer_sum, Twelve};
use qseries::identities::{check, reduce_check_with, registry, sample_point, Draw, ParameterPoint, Profile, Slot};
use qseries::par::ExecMode;
use qseries::qcore::qpoch;
use qseries::quadrature::BoundedKernel;
use qseries::{c, Base, PochhammerOrder, QComplex};

const Q_LIST: [f64; 3] = [0.3, 0.5, 0.7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, budget_s: f64) -> bool {
    elapsed.as_secs_f64() <= budget_s
}

/// Runs the harness over `ids` and summarises it as one outcome.
fn suite(ids: &str, samples: usize, tol: Option<f64>, cap: f64) -> Outcome {
    let cfg = RunConfig {
        ids: ids.into(),
        samples,
        tolerance: tol,
        cap,
        ..RunConfig::default()
    };
    match run(&cfg) {
        Ok(r) => {
            let worst = r.failures().next().map(|f| format!("; first failure {} #{}", f.id, f.index)).unwrap_or_default();
            outcome(
                r.all_passed(),
                format!("{ids}: {}/{} passed, max rel {:.1e}{worst}", r.summary.passed, r.summary.total, r.summary.max_rel_error),
            )
        }
        Err(e) => outcome(false, format!("{ids}: {e}")),
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let pass = parts.iter().all(|o| o.pass);
    outcome(pass, parts.into_iter().map(|o| o.detail).collect::<Vec<_>>().join(" | "))
}

fn base(q: f64) -> Base {
    Base::new(q).unwrap()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let o = suite("aw-integral", 50, Some(1e-9), 0.5);
    let el = t.elapsed();
    outcome(o.pass && within(el, 10.0), format!("{} in {:.2}s", o.detail, el.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let p = ParameterPoint::new(base(0.5))
        .with_real(Slot::A, 0.3)
        .with_real(Slot::B, 0.2)
        .with_real(Slot::C, 0.1)
        .with_real(Slot::D, 0.4);
    let aw = AwParams::real(0.3, 0.2, 0.1, 0.4, 0.5).unwrap();
    let mut worst_off: f64 = 0.0;
    let mut worst_diag: f64 = 0.0;
    for m in 0..=5 {
        for n in 0..=5 {
            let v = aw_orthogonality_lhs(m, n, &p).unwrap().value;
            let norm = aw_norm(m.max(n), &aw).unwrap().value.norm();
            if m == n {
                worst_diag = worst_diag.max((v - aw_norm(n, &aw).unwrap().value).norm() / norm);
            } else {
                worst_off = worst_off.max(v.norm() / norm);
            }
        }
    }
    let el = t.elapsed();
    outcome(
        worst_off <= 1e-8 && worst_diag <= 1e-8 && within(el, 30.0),
        format!("off-diagonal {worst_off:.1e}, diagonal {worst_diag:.1e} (relative to the norm) in {:.2}s", el.as_secs_f64()),
    )
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let o = all(
        ["rogers-6w5", "ext-rogers", "ext-rogers-gamma0", "ext-rogers-sub"]
            .iter()
            .map(|id| suite(id, 20, Some(1e-10), 0.5))
            .collect(),
    );
    let el = t.elapsed();
    outcome(o.pass && within(el, 2.0), format!("{} in {:.2}s", o.detail, el.as_secs_f64()))
}

fn criterion_4() -> Outcome {
    let reg = registry();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for id in ["genfunc-d", "genfunc-a"] {
        let spec = reg.get(id).unwrap();
        let lead = if id == "genfunc-d" { Slot::D } else { Slot::A };
        for i in 0..10 {
            let p = sample_point(spec, base(Q_LIST[i % 3]), 42, i, Profile::Real, 0.5).unwrap();
            let scaled = (p.get(lead).unwrap() * p.get(Slot::T).unwrap()).norm();
            if scaled > 0.5 {
                failures.push(format!("{id} #{i}: |{lead}t| = {scaled}"));
            }
            for th in theta_grid() {
                let r = check(id, &p.clone().with_theta(th), Some(1e-9)).unwrap();
                checked += 1;
                worst = worst.max(r.relative_error.unwrap());
                if !r.pass {
                    failures.push(format!("{id} #{i} theta {th}"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} pointwise checks, max rel {worst:.1e}{}", failures.first().map(|f| format!("; {f}")).unwrap_or_default()),
    )
}

fn criterion_5() -> Outcome {
    all(vec![
        suite("nassrallah-rahman", 20, Some(1e-7), 0.5),
        suite("rahman", 20, Some(1e-7), 0.5),
        suite("isv", 20, Some(1e-7), 0.5),
        suite("nassrallah-rahman@*", 10, Some(1e-9), 0.5),
    ])
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let o = all(vec![suite("thm18", 20, Some(1e-7), 0.4), suite("thm18@*", 10, Some(1e-9), 0.5)]);
    let el = t.elapsed();
    outcome(o.pass && within(el, 60.0), format!("{} in {:.2}s", o.detail, el.as_secs_f64()))
}

fn criterion_7() -> Outcome {
    let spec = registry().get("thm19").unwrap();
    // both right sides are prefactor x the same outer sum
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let p = sample_point(spec, base(Q_LIST[i % 3]), 42, i, Profile::Real, 0.4).unwrap();
        let tw = Twelve::from_point(&p).unwrap();
        let outer = twelve_outer_sum(&p).unwrap().value;
        let r18 = spec_rhs("thm18", &p) / tw.integral_prefactor().unwrap().value;
        let r19 = spec_rhs("thm19", &p) / tw.series_prefactor().unwrap().value;
        worst = worst.max((r18 - outer).norm() / outer.norm()).max((r19 - outer).norm() / outer.norm());
    }
    let shared = outcome(worst <= 1e-13, format!("shared outer sum agrees to {worst:.1e}"));
    all(vec![
        suite("thm19", 20, Some(1e-8), 0.4),
        suite("thm18-vs-thm19", 20, Some(1e-7), 0.4),
        shared,
    ])
}

fn spec_rhs(id: &str, p: &ParameterPoint) -> QComplex {
    check(id, p, None).unwrap().rhs_value.unwrap()
}

fn criterion_8() -> Outcome {
    let mut parts: Vec<Outcome> = ["thm6?", "qgauss", "qchu", "qsaalschutz", "verma-jain", "andrews-watson"]
        .iter()
        .map(|id| suite(id, 20, None, 0.5))
        .collect();
    let red = registry().reductions().iter().find(|r| r.parent == "thm61").unwrap();
    let child = registry().get(&red.child).unwrap();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for i in 0..20 {
        let p = sample_point(child, base(Q_LIST[i % 3]), 42, i, Profile::Real, 0.5).unwrap();
        let r = reduce_check_with(red, &p, Some(1e-9)).unwrap();
        ok &= r.pass;
        worst = worst.max(r.relative_error.unwrap());
    }
    parts.push(outcome(ok, format!("{}: max rel {worst:.1e}", red.name)));
    all(parts)
}

fn criterion_9() -> Outcome {
    // first family of inequalities on a 20 x 20 x 12 grid of (a, b, k)
    let mut grid_fail = 0usize;
    let mut grid_count = 0usize;
    for &qv in &Q_LIST {
        let q = base(qv);
        for i in 0..20 {
            let a = 2.0 * i as f64 / 19.0;
            let neg_inf = qpoch(c(-a), q, PochhammerOrder::Infinity).unwrap().value.re;
            let pos_inf = (a <= 1.0).then(|| qpoch(c(a), q, PochhammerOrder::Infinity).unwrap().value.re);
            for j in 0..20 {
                let b = j as f64 / 19.0;
                for k in 0..12 {
                    grid_count += 1;
                    let lhs = qpoch(c(-a * b), q, PochhammerOrder::Finite(k)).unwrap().value.re;
                    if lhs > neg_inf * (1.0 + 1e-14) {
                        grid_fail += 1;
                    }
                    if let Some(pi) = pos_inf {
                        let v = qpoch(c(a * b), q, PochhammerOrder::Finite(k)).unwrap().value.re;
                        if v < pi - 1e-14 {
                            grid_fail += 1;
                        }
                    }
                }
            }
        }
    }
    // uniform bound on the rescaled terminating 4phi3
    let mut bound_fail = 0usize;
    let mut tightest: f64 = 0.0;
    for i in 0..10 {
        let q = base(Q_LIST[i % 3]);
        let mut d = Draw::new(1000 + i as u64, Profile::Complex, 0.9, q);
        let a1 = d.param(0.05, 0.9);
        let rest = [d.param(0.05, 0.9), d.param(0.05, 0.9)];
        let den = [d.param(0.05, 0.9), d.param(0.05, 0.9), d.param(0.05, 0.9)];
        let lambda = d.range(0.1, 0.9);
        let x = d.param(0.0, lambda);
        let bound = rescaled_uniform_bound(a1, &rest, &den, q, lambda).unwrap();
        for n in 0..=30 {
            let others = [a1 * q.get().powi(n as i32), rest[0], rest[1]];
            let v = terminating_rescaled(n, &others, &den, q, x).unwrap().value.norm();
            tightest = tightest.max(v / bound);
            if v > bound {
                bound_fail += 1;
            }
        }
    }
    // boundedness of the kernel family on a 256-point theta grid
    let mut kernel_fail = 0usize;
    let mut kernel_ratio: f64 = 0.0;
    for i in 0..10 {
        let q = base(Q_LIST[i % 3]);
        let mut d = Draw::new(2000 + i as u64, Profile::Complex, 0.9, q);
        let denom = [d.std(), d.std(), d.std(), d.std(), d.std()];
        let (w, t) = (d.param(0.05, 0.9), d.param(0.05, 0.9));
        let k = d.int(0, 30) as usize;
        let ker = BoundedKernel::new(denom, w, t, k, q).unwrap();
        let m = ker.majorant().unwrap();
        for j in 0..256 {
            let th = std::f64::consts::PI * j as f64 / 255.0;
            let v = ker.eval(th).unwrap().norm();
            kernel_ratio = kernel_ratio.max(v / m);
            if !(v.is_finite() && v <= m) {
                kernel_fail += 1;
            }
        }
    }
    outcome(
        grid_fail == 0 && bound_fail == 0 && kernel_fail == 0,
        format!(
            "grid: {grid_fail} violations of {grid_count} (a,b,k,q) cells; 4phi3 bound: {bound_fail} violations, max ratio {tightest:.2}; kernel: {kernel_fail} violations, max ratio {kernel_ratio:.2}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let cfg = RunConfig {
        samples: 3,
        seed: 20240601,
        ..RunConfig::default()
    };
    let records = |cfg: &RunConfig| serde_json::to_vec(&run(cfg).unwrap().records).unwrap();
    let first = records(&cfg);
    let second = records(&cfg);
    let sequential = records(&RunConfig {
        mode: ExecMode::Sequential,
        ..cfg.clone()
    });
    outcome(
        first == second && first == sequential,
        format!("{} bytes of records, identical across two runs and the sequential path", first.len()),
    )
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        let o = f();
        println!("criterion {n}: {} — {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
