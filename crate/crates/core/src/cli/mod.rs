//! Experiment runner behind the `aniso` binary.
//!
//! Every subcommand reads one config file (TOML, or JSON by extension),
//! validates it completely, then writes a report whose header echoes the
//! effective config. Exit codes: 0 success, 1 failed check, 2 invalid input.

pub mod config;
pub mod report;
pub mod verify;

use crate::counting::{brute, factor_kernel_unchecked, EvalOptions, FormSpec};
use crate::error::{Error, Result, Warning};
use crate::exec;
use crate::grid::GridField;
use crate::multiscale::{decompose, error_ladder_sum, lambda0_sweep, SweepPlan};
use crate::spherical::{Shell, Surrogate};
use clap::{Args, Parser, Subcommand};
use config::{sweep_variants, Experiment, ExperimentConfig};
use report::{write_csv, Header};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(name = "aniso", version, about = "Counting forms and multiscale experiments on periodic grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites; JSON-lines report.
    Verify(RunArgs),
    /// Evaluate a counting form over a λ × ε grid; CSV report.
    Count(RunArgs),
    /// λ₀ sweep with stability variants; CSV report.
    Sweep(RunArgs),
    /// N¹, Nᵉ − N¹ and N⁰ − Nᵉ per (λ, ε), optionally over a lacunary ladder; CSV report.
    Decompose(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Report path; stdout when absent and the config names none.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Overrides every seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Verify(a) => ("verify", a),
            Command::Count(a) => ("count", a),
            Command::Sweep(a) => ("sweep", a),
            Command::Decompose(a) => ("decompose", a),
        }
    }
}

enum Outcome {
    Done,
    ChecksFailed(usize),
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::ChecksFailed(n)) => {
            eprintln!("{n} check(s) failed");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let (name, args) = cli.command.parts();
    let mut config = ExperimentConfig::load(&args.config)?;
    config.apply_seed(args.seed);
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    let exp = Experiment::validate(config, name)?;
    let out_path = args.out.clone().or_else(|| exp.config.output.clone());
    let mut buf = Vec::new();
    let start = Instant::now();
    let outcome = exec::with_workers(exp.config.workers, || -> Result<Outcome> {
        match name {
            "verify" => run_verify(&exp, &mut buf),
            "count" => run_count(&exp, &mut buf).map(|_| Outcome::Done),
            "sweep" => run_sweep(&exp, &mut buf).map(|_| Outcome::Done),
            _ => run_decompose(&exp, &mut buf).map(|_| Outcome::Done),
        }
    })?;
    eprintln!("{name}: finished in {:.3}s", start.elapsed().as_secs_f64());
    match out_path {
        Some(p) => std::fs::write(&p, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(outcome)
}

fn report_warnings(warnings: &mut Vec<Warning>) {
    warnings.dedup();
    for w in warnings.iter() {
        eprintln!("warning: {w}");
    }
}

fn form_name(form: &FormSpec) -> &'static str {
    match form {
        FormSpec::Box(_) => "box",
        FormSpec::Tree(_) => "tree",
        FormSpec::Simplex(_) => "simplex",
    }
}

fn eval_options(exp: &Experiment) -> EvalOptions {
    EvalOptions { surrogate: exp.config.surrogate, coverage: exp.config.coverage }
}

fn run_verify(exp: &Experiment, out: &mut Vec<u8>) -> Result<Outcome> {
    let header = Header::new("verify", &exp.config);
    header.write_json_line(out)?;
    let v = exp.verify_config();
    let seed = exp.config.seed.unwrap_or(0);
    let mut failed = 0;
    let mut total = 0;
    for suite in &v.suites {
        let t = Instant::now();
        for r in verify::run_suite(suite, v.trials, seed)? {
            total += 1;
            if !r.pass {
                failed += 1;
            }
            writeln!(out, "{}", serde_json::to_string(&r).map_err(|e| Error::Serde(e.to_string()))?)?;
        }
        eprintln!("suite {suite}: {:.3}s", t.elapsed().as_secs_f64());
    }
    writeln!(out, "{}", serde_json::json!({ "kind": "summary", "checks": total, "failed": failed }))?;
    Ok(if failed == 0 { Outcome::Done } else { Outcome::ChecksFailed(failed) })
}

#[derive(Serialize)]
struct CountRow {
    form: &'static str,
    lambda: f64,
    eps: f64,
    value: f64,
    stderr: Option<f64>,
    oracle: Option<f64>,
}

/// Direct nested sum with the same kernels the fast path uses.
fn oracle_value(exp: &Experiment, f: &GridField, form: &FormSpec, lambda: f64, eps: f64) -> Result<Option<f64>> {
    if !exp.config.oracle {
        return Ok(None);
    }
    let plane = crate::grid::Geometry::new(2, exp.geometry.side, exp.geometry.cells)?;
    let kernels = |shells: &[Shell], params: &crate::counting::AnisotropyParams| -> Result<Vec<GridField>> {
        (0..params.len())
            .map(|k| factor_kernel_unchecked(shells[k], params.law(k), lambda, eps, exp.config.surrogate, plane))
            .collect()
    };
    Ok(match form {
        FormSpec::Box(s) => Some(brute::box_form(f, &kernels(&s.shells, &s.params)?)?),
        FormSpec::Tree(s) => Some(brute::tree_form(f, s, &kernels(&vec![Shell::Sphere; s.params.len()], &s.params)?)?),
        FormSpec::Simplex(_) => None,
    })
}

fn run_count(exp: &Experiment, out: &mut Vec<u8>) -> Result<()> {
    let form = exp.form.as_ref().expect("validated");
    let f = exp.config.set.build(exp.geometry)?;
    let opts = eval_options(exp);
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &lambda in &exp.lambdas {
        for &eps in &exp.config.eps {
            let t = Instant::now();
            // the oracle grid is below the resolution guards, so evaluate its kernels unchecked too
            let (value, stderr) = if exp.config.oracle {
                let v = oracle_fast(exp, &f, form, lambda, eps)?;
                (v, None)
            } else {
                let c = form.evaluate(&f, lambda, eps, &opts, exp.config.monte_carlo)?;
                warnings.extend(c.warnings);
                (c.value, c.stderr)
            };
            let oracle = oracle_value(exp, &f, form, lambda, eps)?;
            eprintln!("count λ={lambda} ε={eps}: {:.3}s", t.elapsed().as_secs_f64());
            rows.push(CountRow { form: form_name(form), lambda, eps, value, stderr, oracle });
        }
    }
    report_warnings(&mut warnings);
    write_csv(out, &Header::new("count", &exp.config), &[], &rows)
}

fn oracle_fast(exp: &Experiment, f: &GridField, form: &FormSpec, lambda: f64, eps: f64) -> Result<f64> {
    let plane = crate::grid::Geometry::new(2, exp.geometry.side, exp.geometry.cells)?;
    let kernel = |shell: Shell, k: usize, p: &crate::counting::AnisotropyParams| {
        factor_kernel_unchecked(shell, p.law(k), lambda, eps, exp.config.surrogate, plane)
    };
    match form {
        FormSpec::Box(s) => {
            let ks = (0..s.n()).map(|k| kernel(s.shells[k], k, &s.params)).collect::<Result<Vec<_>>>()?;
            crate::counting::box_form_with_kernels(f, &ks, exp.config.coverage)
        }
        FormSpec::Tree(s) => {
            let ks = (0..s.params.len()).map(|k| kernel(Shell::Sphere, k, &s.params)).collect::<Result<Vec<_>>>()?;
            crate::counting::tree_form_with_kernels(f, s, &ks)
        }
        FormSpec::Simplex(_) => Err(Error::Config("no brute-force oracle for simplex forms".into())),
    }
}

#[derive(Serialize)]
struct SweepRow {
    variant: usize,
    cells: usize,
    width: Option<f64>,
    eps: f64,
    lambda: f64,
    count: f64,
    stderr: Option<f64>,
    positive: bool,
}

fn run_sweep(exp: &Experiment, out: &mut Vec<u8>) -> Result<()> {
    let form = exp.form.as_ref().expect("validated");
    let c = &exp.config;
    let plan = SweepPlan {
        dim: c.grid.dim,
        side: c.grid.side,
        lambdas: exp.lambdas.clone(),
        variants: sweep_variants(c)?,
        coverage: c.coverage,
        mc: c.monte_carlo,
    };
    let mut report = lambda0_sweep(|g| c.set.build(g), form, &plan)?;
    report_warnings(&mut report.warnings);
    let mut rows = Vec::new();
    for (i, s) in report.series.iter().enumerate() {
        let thr = crate::multiscale::POSITIVITY_THRESHOLD * c.grid.side.powi(c.grid.dim as i32);
        let width = match s.variant.surrogate {
            Surrogate::Annulus { width } => Some(width),
            Surrogate::Spectral => None,
        };
        for (k, &lambda) in report.lambdas.iter().enumerate() {
            rows.push(SweepRow {
                variant: i,
                cells: s.variant.cells,
                width,
                eps: s.variant.eps,
                lambda,
                count: s.counts[k],
                stderr: s.stderr[k],
                positive: s.counts[k] > thr,
            });
        }
    }
    let show = |v: Option<f64>| v.map_or("none within sweep".to_string(), |l| l.to_string());
    let mut extra = vec![
        ("lambda0".to_string(), show(report.lambda0)),
        ("stable".to_string(), report.stable.to_string()),
        ("threshold".to_string(), report.threshold.to_string()),
    ];
    for (i, s) in report.series.iter().enumerate() {
        extra.push((format!("variant {i}"), format!("lambda0={} zero_windows={}", show(s.lambda0), s.zero_windows)));
    }
    write_csv(out, &Header::new("sweep", c), &extra, &rows)
}

#[derive(Serialize)]
struct DecomposeRow {
    lambda: f64,
    eps: f64,
    n1: f64,
    ne: f64,
    n0: f64,
    error: f64,
    uniform: f64,
    n1_stderr: Option<f64>,
    ne_stderr: Option<f64>,
    n0_stderr: Option<f64>,
}

fn run_decompose(exp: &Experiment, out: &mut Vec<u8>) -> Result<()> {
    let form = exp.form.as_ref().expect("validated");
    let c = &exp.config;
    let f = c.set.build(exp.geometry)?;
    let opts = eval_options(exp);
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &lambda in &exp.lambdas {
        for &eps in &c.eps {
            let t = Instant::now();
            let r = decompose(&f, form, lambda, eps, &opts, c.monte_carlo)?;
            warnings.extend(r.warnings);
            let r = r.value;
            eprintln!("decompose λ={lambda} ε={eps}: {:.3}s", t.elapsed().as_secs_f64());
            rows.push(DecomposeRow {
                lambda,
                eps,
                n1: r.n1,
                ne: r.ne,
                n0: r.n0,
                error: r.error,
                uniform: r.uniform,
                n1_stderr: r.stderr.map(|s| s[0]),
                ne_stderr: r.stderr.map(|s| s[1]),
                n0_stderr: r.stderr.map(|s| s[2]),
            });
        }
    }
    let mut extra = Vec::new();
    if let Some(ladder) = &exp.ladder {
        let s = error_ladder_sum(&f, form, ladder, &opts, c.monte_carlo)?;
        warnings.extend(s.warnings);
        let s = s.value;
        let terms: Vec<String> = s.per_scale.iter().map(|v| v.to_string()).collect();
        extra.push(("ladder_scales".to_string(), format!("{:?}", ladder.scales())));
        extra.push(("ladder_terms".to_string(), terms.join(" ")));
        extra.push(("ladder_total".to_string(), s.total.to_string()));
        extra.push(("ladder_growth_slope".to_string(), s.growth_slope.map_or("none".into(), |v| v.to_string())));
    }
    report_warnings(&mut warnings);
    write_csv(out, &Header::new("decompose", c), &extra, &rows)
}
