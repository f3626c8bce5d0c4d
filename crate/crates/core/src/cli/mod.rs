//! The `hamrep` command line.
//!
//! Exit codes: `0` pass, `2` a condition on the model fails (e.g. BLC),
//! `3` an audit fails or cannot complete, `64` usage error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bolza::{
    gronwall_radius, reduction, reduction_records, solve_control, solve_variational, value_function_control,
    value_function_variational, value_records, BolzaSpec, EndCost,
};
use crate::epigraph::{EpigraphSection, SectionOptions};
use crate::error::Error;
use crate::io::{fmt_num, write_atomic};
use crate::models::{
    catalog, check_blc, check_h1_h4, check_hlc, check_llc_elc, find_example, BlcOptions, ExampleCatalogEntry,
    SamplePlan, SampledHamiltonian,
};
use crate::report::{CheckRecord, Report};
use crate::representation::{
    audit_lipschitz_a1, control_cloud, random_ball_point, sample_state, trace_csv, A1Options, RepOptions,
    Representation,
};
use crate::stability::{set_limit_check, stability_audit_e, PerturbationFamily, PerturbationRule, SetSequenceProbe};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONDITION: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "hamrep",
    version,
    about = "Compact-control representations of convex Hamiltonians",
    args_override_self = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Catalog entry (see `hamrep catalog`).
    #[arg(long)]
    example: Option<String>,
    /// CSV of `x,p,H` samples on a tensor grid.
    #[arg(long = "model-file")]
    model_file: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Flat `key = value` file; keys are flag names without dashes.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build the representation and audit it.
    Represent {
        #[command(flatten)]
        src: Source,
        /// Low-discrepancy controls per state.
        #[arg(long, default_value_t = 10_000)]
        controls: usize,
        /// Pairs for the Lipschitz audit.
        #[arg(long, default_value_t = 2_000)]
        pairs: usize,
        /// States on `[−1, 1]` (per axis).
        #[arg(long = "mesh-x", default_value_t = 9)]
        mesh_x: usize,
        #[arg(long = "tol-sup", default_value_t = 5e-2)]
        tol_sup: f64,
    },
    /// Check H1–H4, HLC, LLC, ELC and BLC on a sample plan.
    Verify {
        #[command(flatten)]
        src: Source,
        /// One of H1, H2, H3, H4, HLC, LLC, ELC, BLC, all.
        #[arg(long, default_value = "all")]
        check: String,
        /// Radius `R` of the state ball.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Plan as JSON (see `SamplePlan`).
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Convergence of the construction along a perturbation family.
    Stability {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value = "shift")]
        rule: String,
        #[arg(long, default_value_t = 64)]
        imax: usize,
        #[arg(long, default_value_t = 9)]
        points: usize,
        #[arg(long = "tol-stab", default_value_t = 1e-2)]
        tol_stab: f64,
    },
    /// Variational and control Bolza problems on a grid.
    Bolza {
        #[command(flatten)]
        src: Source,
        #[arg(long = "Nt", default_value_t = 50)]
        nt: usize,
        #[arg(long = "Nx", default_value_t = 201)]
        nx: usize,
        /// Initial cost: free, fixed:<x0>, abs, abs:<c>.
        #[arg(long, default_value = "fixed:0")]
        start: String,
        /// Terminal cost, same syntax.
        #[arg(long, default_value = "free")]
        terminal: String,
        /// State grid radius; defaults to the Gronwall radius.
        #[arg(long)]
        radius: Option<f64>,
        /// Low-discrepancy controls per node, added to the graph controls.
        #[arg(long, default_value_t = 256)]
        controls: usize,
        /// Added to `3(h_t + h_x)` in the reduction check.
        #[arg(long = "tol-gap", default_value_t = 0.0)]
        tol_gap: f64,
    },
    /// List the built-in examples.
    Catalog {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Condition(String),
    Audit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Input(_) | Error::Dimension { .. } | Error::Csv(_) | Error::Json(_) => Failure::Usage(e.to_string()),
            Error::BlcRequired(_) => Failure::Condition(e.to_string()),
            _ => Failure::Audit(e.to_string()),
        }
    }
}

type Out<T> = std::result::Result<T, Failure>;

/// Splices `--config` files into the argument list right after the
/// subcommand, so flags given on the command line win.
fn expand_config(args: Vec<OsString>) -> Out<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    let mut i = 0;
    while i < strs.len() {
        if strs[i] == "--config" {
            path = strs.get(i + 1).cloned();
            i += 1;
        } else if let Some(p) = strs[i].strip_prefix("--config=") {
            path = Some(p.to_string());
        }
        i += 1;
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("config {path}: {e}")))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("config {path}:{}: expected `key = value`", n + 1)))?;
        let k = k.trim();
        if k == "config" || k.is_empty() || k.starts_with('-') {
            return Err(Failure::Usage(format!("config {path}:{}: bad key `{k}`", n + 1)));
        }
        extra.push(format!("--{k}"));
        extra.push(v.trim().to_string());
    }
    let sub = strs.iter().skip(1).position(|a| !a.starts_with('-')).map_or(strs.len(), |p| p + 2);
    let mut out: Vec<OsString> = args[..sub.min(args.len())].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend_from_slice(&args[sub.min(args.len())..]);
    Ok(out)
}

fn set_threads() -> Out<()> {
    if let Ok(v) = std::env::var("HAMREP_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Failure::Usage(format!("HAMREP_THREADS must be a positive integer, got `{v}`")))?;
        // a pool that already exists (tests) keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let res = (|| -> Out<i32> {
        set_threads()?;
        let args = expand_config(args)?;
        let cli = match Cli::try_parse_from(args) {
            Ok(c) => c,
            Err(e) => {
                let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
                let _ = e.print();
                return Ok(code);
            }
        };
        match cli.cmd {
            Cmd::Represent { src, controls, pairs, mesh_x, tol_sup } => {
                represent(&src, controls, pairs, mesh_x, tol_sup)
            }
            Cmd::Verify { src, check, radius, plan } => verify(&src, &check, radius, plan.as_deref()),
            Cmd::Stability { src, rule, imax, points, tol_stab } => stability(&src, &rule, imax, points, tol_stab),
            Cmd::Bolza { src, nt, nx, start, terminal, radius, controls, tol_gap } => {
                bolza(&src, nt, nx, &start, &terminal, radius, controls, tol_gap)
            }
            Cmd::Catalog { out } => list_catalog(out.as_deref()),
        }
    })();
    match res {
        Ok(c) => c,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Condition(m)) => {
            eprintln!("condition violated: {m}");
            EXIT_CONDITION
        }
        Err(Failure::Audit(m)) => {
            eprintln!("audit failed: {m}");
            EXIT_AUDIT
        }
    }
}

fn load(src: &Source) -> Out<ExampleCatalogEntry> {
    match (&src.example, &src.model_file) {
        (Some(_), Some(_)) => Err(Failure::Usage("give either --example or --model-file".into())),
        (None, None) => Err(Failure::Usage("one of --example or --model-file is required".into())),
        (Some(name), None) => find_example(name).ok_or_else(|| Failure::Usage(format!("unknown example `{name}`"))),
        (None, Some(p)) => {
            let f = std::fs::File::open(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            Ok(SampledHamiltonian::from_csv(f)?.entry("MODEL"))
        }
    }
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_num(v))
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Out<()> {
    write_atomic(&dir.join(name), body.as_bytes()).map_err(|e| Failure::Audit(e.to_string()))
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Out<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Audit(e.to_string()))? + "\n";
    write(dir, name, &s)
}

/// Merges records with the same condition, keeping first-seen order.
fn merged(records: Vec<CheckRecord>) -> Report {
    let mut out: Vec<CheckRecord> = Vec::new();
    for r in records {
        match out.iter().position(|o| o.condition == r.condition) {
            Some(i) => {
                let o = out.remove(i);
                out.insert(i, o.merge(r));
            }
            None => out.push(r),
        }
    }
    Report { records: out }
}

fn summary(report: &Report) {
    for r in &report.records {
        println!(
            "{:<16} {} worst={} tol={}{}",
            r.condition,
            if r.pass { "PASS" } else { "FAIL" },
            fmt_num(r.worst_violation),
            fmt_num(r.tolerance),
            r.empirical_constant.map(|c| format!(" constant={}", fmt_num(c))).unwrap_or_default()
        );
    }
}

fn default_plan(e: &ExampleCatalogEntry, r: f64) -> SamplePlan {
    SamplePlan::default_for(e.hamiltonian.n, r, e.hamiltonian.horizon)
}

fn blc_gate(e: &ExampleCatalogEntry, src: &Source, file: &str, command: &str) -> Out<Option<i32>> {
    let rec = check_blc(&e.lagrangian, &default_plan(e, 1.0), BlcOptions::default())?;
    if rec.pass && e.lagrangian.has_lambda() {
        return Ok(None);
    }
    let v = json!({
        "command": command,
        "model": e.name,
        "status": "BLC_VIOLATED",
        "reason": "BLC_VIOLATED",
        "records": [serde_json::to_value(&rec).map_err(|e| Failure::Audit(e.to_string()))?],
    });
    write_json(&src.out, file, &v)?;
    println!("reason: BLC_VIOLATED ({})", rec.note);
    Ok(Some(EXIT_CONDITION))
}

fn state_mesh(n: usize, per: usize) -> Vec<Vec<f64>> {
    let per = per.max(2);
    let node = |i: usize| -1.0 + 2.0 * i as f64 / (per - 1) as f64;
    if n == 1 {
        return (0..per).map(|i| vec![node(i)]).collect();
    }
    (0..per * per)
        .map(|k| vec![node(k / per), node(k % per)])
        .filter(|x: &Vec<f64>| x[0].hypot(x[1]) <= 1.0 + 1e-12)
        .collect()
}

fn dual_mesh(n: usize) -> Vec<Vec<f64>> {
    let ps: Vec<f64> = (0..11).map(|i| -3.0 + 0.6 * i as f64).collect();
    if n == 1 {
        return ps.into_iter().map(|p| vec![p]).collect();
    }
    let mut out = Vec::new();
    for k in 0..8 {
        let th = std::f64::consts::TAU * k as f64 / 8.0;
        for p in &ps {
            if *p >= 0.0 {
                out.push(vec![p * th.cos(), p * th.sin()]);
            }
        }
    }
    out
}

fn time_mesh(e: &ExampleCatalogEntry) -> Vec<f64> {
    if e.hamiltonian.autonomous {
        vec![0.0]
    } else {
        (0..5).map(|i| e.hamiltonian.horizon * i as f64 / 4.0).collect()
    }
}

fn represent(src: &Source, controls: usize, pairs: usize, mesh_x: usize, tol_sup: f64) -> Out<i32> {
    let e = load(src)?;
    if let Some(code) = blc_gate(&e, src, "audit.json", "represent")? {
        return Ok(code);
    }
    let n = e.hamiltonian.n;
    let rep = Representation::new(&e.hamiltonian, &e.lagrangian, RepOptions::default())?;
    let cloud = control_cloud(n + 1, controls, src.seed);
    let ps = dual_mesh(n);
    let ts = time_mesh(&e);
    let xs = state_mesh(n, mesh_x);
    let mut recs = Vec::new();
    let mut worst_sup: f64 = 0.0;
    for t in &ts {
        for x in &xs {
            let samples = sample_state(&rep, *t, x, &cloud)?;
            let s = samples.sup_audit(&rep, &ps);
            for i in 0..ps.len() {
                worst_sup = worst_sup.max(s.residual(i));
            }
            recs.extend(s.records(tol_sup));
            recs.extend(samples.sandwich_records(&rep)?);
        }
    }
    recs.extend(audit_lipschitz_a1(&rep, A1Options { pairs, seed: src.seed, ..A1Options::default() })?);
    let report = merged(recs);

    let x0 = &xs[xs.len() / 2];
    let mut ctrl: Vec<Vec<f64>> = cloud.iter().take(256).cloned().collect();
    ctrl.extend(rep.graph_controls(ts[0], x0)?.into_iter().step_by(8));
    let traces = ctrl.iter().map(|a| rep.construct(ts[0], x0, a)).collect::<crate::Result<Vec<_>>>()?;
    write(&src.out, "representation_trace.csv", &trace_csv(&traces))?;

    let status = if report.all_pass() { "pass" } else { "fail" };
    let v = json!({
        "command": "represent",
        "model": e.name,
        "status": status,
        "controls": controls,
        "pairs": pairs,
        "states": xs.len() * ts.len(),
        "max_sup_residual": num(worst_sup),
        "records": serde_json::to_value(&report.records).map_err(|e| Failure::Audit(e.to_string()))?,
    });
    write_json(&src.out, "audit.json", &v)?;
    write(&src.out, "audit.csv", &report.to_csv())?;
    summary(&report);
    Ok(if report.all_pass() { EXIT_PASS } else { EXIT_AUDIT })
}

const CHECKS: [&str; 8] = ["H1", "H2", "H3", "H4", "HLC", "LLC", "ELC", "BLC"];

fn verify(src: &Source, check: &str, radius: f64, plan: Option<&Path>) -> Out<i32> {
    let e = load(src)?;
    let check = check.to_ascii_uppercase();
    if check != "ALL" && !CHECKS.contains(&check.as_str()) {
        return Err(Failure::Usage(format!("unknown check `{check}`")));
    }
    let want = |c: &str| check == "ALL" || check == c;
    let plan = match plan {
        Some(p) => {
            let s = std::fs::read_to_string(p).map_err(|err| Failure::Usage(format!("{}: {err}", p.display())))?;
            SamplePlan::from_json(&s)?
        }
        None => default_plan(&e, radius),
    };
    let h = &e.hamiltonian;
    let mut report = Report::new();
    if ["H1", "H2", "H3", "H4"].iter().any(|c| want(c)) {
        report.extend(check_h1_h4(h, &plan)?.into_iter().filter(|r| want(&r.condition)));
    }
    if want("HLC") {
        report.push(check_hlc(h, radius, &plan, None)?);
    }
    if want("LLC") || want("ELC") {
        let k = plan.ts.iter().map(|t| h.modulus(radius, *t)).fold(0.0, f64::max);
        report.extend(check_llc_elc(&e.lagrangian, radius, k, &plan)?.into_iter().filter(|r| want(&r.condition)));
    }
    if want("BLC") {
        report.push(check_blc(&e.lagrangian, &plan, BlcOptions::default())?);
    }
    let v = json!({
        "command": "verify",
        "model": e.name,
        "status": if report.all_pass() { "pass" } else { "fail" },
        "radius": radius,
        "records": serde_json::to_value(&report.records).map_err(|e| Failure::Audit(e.to_string()))?,
    });
    write_json(&src.out, "verify.json", &v)?;
    write(&src.out, "verify.csv", &report.to_csv())?;
    summary(&report);
    match report.first_failure() {
        None => Ok(EXIT_PASS),
        Some(r) if r.condition == "BLC" => {
            println!("reason: BLC_VIOLATED");
            Ok(EXIT_CONDITION)
        }
        Some(_) => Ok(EXIT_CONDITION),
    }
}

fn stability(src: &Source, rule: &str, imax: usize, npoints: usize, tol: f64) -> Out<i32> {
    let e = load(src)?;
    let rule: PerturbationRule = rule.parse()?;
    if let Some(code) = blc_gate(&e, src, "stability.json", "stability")? {
        return Ok(code);
    }
    let fam = PerturbationFamily::new(&e.hamiltonian, &e.lagrangian, rule, imax)?;
    let n = e.hamiltonian.n;
    let mut rng = ChaCha8Rng::seed_from_u64(src.seed);
    let npoints = npoints.max(2);
    let points: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..npoints)
        .map(|k| {
            let s = -0.9 + 1.8 * k as f64 / (npoints - 1) as f64;
            let x = if n == 1 { vec![s] } else { vec![s / 2f64.sqrt(), s / 2f64.sqrt()] };
            (0.0, x, random_ball_point(&mut rng, n + 1))
        })
        .collect();
    let audit = stability_audit_e(&fam, &points, RepOptions::default())?;
    let mut report = Report::new();
    report.extend(audit.records(tol));

    // sections along x_i = 1/i against the section at 0, on a common window
    let zero = vec![0.0; n];
    let target = EpigraphSection::new(&e.hamiltonian, &e.lagrangian, 0.0, &zero, SectionOptions::default())?;
    let w = target.window();
    let bodies = fam
        .schedule
        .iter()
        .map(|i| {
            let x: Vec<f64> = zero.iter().map(|_| 1.0 / *i as f64).collect();
            let s = EpigraphSection::new(
                &e.hamiltonian,
                &e.lagrangian,
                0.0,
                &x,
                SectionOptions { dom_nodes: None, window: Some(w) },
            )?;
            Ok(s.to_body().clone())
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut probes = vec![[vec![0.0; n], vec![-(w.eta_lo.abs() - 0.5)]].concat()];
    probes.push([vec![0.5 * w.v; n], vec![0.0]].concat());
    probes.push([vec![-0.5 * w.v; n], vec![1.0]].concat());
    let k = 2.0 * e.hamiltonian.modulus(1.0, 0.0).max(1.0);
    let last = *fam.schedule.last().unwrap() as f64;
    let sl = set_limit_check(
        &SetSequenceProbe { bodies, target: target.to_body().clone(), probes },
        k * n as f64 / last + 1e-9,
    )?;
    report.push(sl.record);

    write(&src.out, "stability.csv", &audit.to_csv())?;
    let v = json!({
        "command": "stability",
        "model": e.name,
        "rule": rule.to_string(),
        "imax": imax,
        "status": if report.all_pass() { "pass" } else { "fail" },
        "rate": num(audit.rate),
        "r2": num(audit.r2),
        "final_deviation": num(*audit.deviation.last().unwrap()),
        "records": serde_json::to_value(&report.records).map_err(|e| Failure::Audit(e.to_string()))?,
    });
    write_json(&src.out, "stability.json", &v)?;
    summary(&report);
    println!("fitted rate C = {} (R2 = {})", fmt_num(audit.rate), fmt_num(audit.r2));
    Ok(if report.all_pass() { EXIT_PASS } else { EXIT_AUDIT })
}

#[allow(clippy::too_many_arguments)]
fn bolza(
    src: &Source,
    nt: usize,
    nx: usize,
    start: &str,
    terminal: &str,
    radius: Option<f64>,
    controls: usize,
    tol_gap: f64,
) -> Out<i32> {
    let e = load(src)?;
    if e.hamiltonian.n != 1 {
        return Err(Failure::Usage("bolza supports n = 1 only".into()));
    }
    if nt == 0 || nx < 3 || nx % 2 == 0 {
        return Err(Failure::Usage("need Nt ≥ 1 and an odd Nx ≥ 3".into()));
    }
    if let Some(code) = blc_gate(&e, src, "bolza.json", "bolza")? {
        return Ok(code);
    }
    let start: EndCost = start.parse()?;
    let terminal: EndCost = terminal.parse()?;
    let h = &e.hamiltonian;
    let fixed = [start, terminal].iter().find_map(|c| match c {
        EndCost::Fixed(x0) => Some(x0.abs()),
        _ => None,
    });
    let Some(m) = fixed else {
        return value_tables(src, &e, nt, nx, start, terminal, radius.unwrap_or(2.0), controls);
    };
    let radius = match radius {
        Some(r) => r,
        None => {
            let m = match (start, terminal) {
                (EndCost::Fixed(a), EndCost::Fixed(b)) => a.abs().min(b.abs()),
                _ => m,
            };
            let cs: Vec<f64> = (0..=nt).map(|k| h.growth(k as f64 / nt as f64)).collect();
            gronwall_radius(m, &cs, 1.0 / nt as f64)?.max(1.0)
        }
    };
    let spec = BolzaSpec { t0: 0.0, t1: 1.0, nt, x_radius: radius, nx, start, terminal };
    let fine = BolzaSpec { nt: 2 * nt, nx: 2 * nx - 1, ..spec };
    let rep = Representation::new(h, &e.lagrangian, RepOptions::default())?;
    let cloud = control_cloud(2, controls, src.seed);

    let sample_gap = {
        let xs = spec.state_grid()?;
        let mut g: f64 = 0.0;
        for j in 0..xs.len {
            g = g.max(rep.section(0.0, &[xs.node(j)])?.node_spacing());
        }
        g
    };
    let var = solve_variational(&spec, h, &e.lagrangian)?;
    let ctl = solve_control(&spec, &rep, &cloud)?;
    let coarse = crate::bolza::Reduction {
        min_variational: var.min,
        min_control: ctl.min,
        lower_bound: spec.lower_bound(h)?,
        ht: spec.ht(),
        hx: spec.hx(),
    };
    let refined = reduction(&fine, h, &e.lagrangian, &rep, &cloud)?;
    let mut report = Report::new();
    report.extend(reduction_records(&coarse, &refined, sample_gap + tol_gap));
    report.extend(value_records(&spec, &var.table, &ctl.table));

    write(&src.out, "value_variational.csv", &var.table.to_csv())?;
    write(&src.out, "value_control.csv", &ctl.table.to_csv())?;
    write(&src.out, "arc_variational.csv", &var.arc_csv())?;
    write(&src.out, "arc_control.csv", &ctl.arc_csv())?;
    let res = |r: &crate::bolza::Reduction| {
        json!({
            "ht": num(r.ht), "hx": num(r.hx),
            "min_variational": num(r.min_variational), "min_control": num(r.min_control),
            "gap": num(r.gap()), "lower_bound": num(r.lower_bound),
        })
    };
    let feasible = var.feasible() && ctl.feasible();
    let v = json!({
        "command": "bolza",
        "model": e.name,
        "status": if !feasible { "INFEASIBLE" } else if report.all_pass() { "pass" } else { "fail" },
        "start": start.to_string(),
        "terminal": terminal.to_string(),
        "radius": num(radius),
        "sample_gap": num(sample_gap),
        "coarse": res(&coarse),
        "refined": res(&refined),
        "records": serde_json::to_value(&report.records).map_err(|e| Failure::Audit(e.to_string()))?,
    });
    write_json(&src.out, "bolza.json", &v)?;
    summary(&report);
    println!(
        "|min Gamma - min Lambda| = {} (tolerance {}), refined {}",
        fmt_num(coarse.gap()),
        fmt_num(3.0 * (coarse.ht + coarse.hx) + sample_gap + tol_gap),
        fmt_num(refined.gap())
    );
    Ok(if feasible && report.all_pass() { EXIT_PASS } else { EXIT_AUDIT })
}

/// Value tables of both sources when no endpoint is fixed; the minimum over
/// free endpoints needs no a priori bound on the table itself.
#[allow(clippy::too_many_arguments)]
fn value_tables(
    src: &Source,
    e: &ExampleCatalogEntry,
    nt: usize,
    nx: usize,
    start: EndCost,
    terminal: EndCost,
    radius: f64,
    controls: usize,
) -> Out<i32> {
    let spec = BolzaSpec { t0: 0.0, t1: 1.0, nt, x_radius: radius, nx, start, terminal };
    let rep = Representation::new(&e.hamiltonian, &e.lagrangian, RepOptions::default())?;
    let cloud = control_cloud(2, controls, src.seed);
    let var = value_function_variational(&spec, &e.hamiltonian, &e.lagrangian)?;
    let ctl = value_function_control(&spec, &rep, &cloud)?;
    let mut report = Report::new();
    report.extend(value_records(&spec, &var, &ctl));
    write(&src.out, "value_variational.csv", &var.to_csv())?;
    write(&src.out, "value_control.csv", &ctl.to_csv())?;
    let v = json!({
        "command": "bolza",
        "model": e.name,
        "mode": "value",
        "status": if report.all_pass() { "pass" } else { "fail" },
        "start": start.to_string(),
        "terminal": terminal.to_string(),
        "radius": num(radius),
        "ht": num(spec.ht()),
        "hx": num(spec.hx()),
        "records": serde_json::to_value(&report.records).map_err(|e| Failure::Audit(e.to_string()))?,
    });
    write_json(&src.out, "bolza.json", &v)?;
    summary(&report);
    Ok(if report.all_pass() { EXIT_PASS } else { EXIT_AUDIT })
}

fn list_catalog(out: Option<&Path>) -> Out<i32> {
    let mut csv = String::from("name,n,blc,autonomous,description\n");
    for e in catalog() {
        println!("{:<5} n={} blc={:<5} {}", e.name, e.hamiltonian.n, e.blc, e.description);
        csv.push_str(&format!(
            "{},{},{},{},\"{}\"\n",
            e.name, e.hamiltonian.n, e.blc, e.hamiltonian.autonomous, e.description
        ));
    }
    if let Some(dir) = out {
        write(dir, "catalog.csv", &csv)?;
    }
    Ok(EXIT_PASS)
}
