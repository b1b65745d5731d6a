//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use aniso::cli::verify::run_suite;
use aniso::counting::{
    box_form_with_kernels, count_boxes, factor_kernel_unchecked, tree_form_with_kernels, AnisotropyParams,
    BoxSpec, FormSpec, McBudget, TreeSpec,
};
use aniso::grid::{Geometry, GridField};
use aniso::kernels::DilationLaw;
use aniso::multiscale::{lambda0_sweep, SweepPlan, SweepReport, SweepVariant};
use aniso::sets::SetSpec;
use aniso::spherical::{sphere_fourier, Shell, Surrogate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;
type Criterion = (&'static str, fn() -> Outcome);

fn suite(name: &str, trials: usize) -> Outcome {
    let records = run_suite(name, trials, 0)?;
    let failed: Vec<String> = records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} = {:e} (needs {} {:e})", r.name, r.value, r.relation, r.bound))
        .collect();
    let detail = if failed.is_empty() {
        format!("{} checks", records.len())
    } else {
        format!("{} of {} checks failed: {}", failed.len(), records.len(), failed.join("; "))
    };
    Ok((failed.is_empty(), detail))
}

fn gaussian_identities() -> Outcome {
    suite("gaussian-identities", 0)
}

fn fourier_decay() -> Outcome {
    let (ok, detail) = suite("fourier-decay", 0)?;
    // closed forms evaluated here, not by the library
    let mut worst2 = 0.0f64;
    let mut worst3 = 0.0f64;
    for k in 0..200 {
        let rho = 0.05 * k as f64;
        let r = 1.3;
        let xi2 = [rho * 0.6, rho * 0.8];
        worst2 = worst2.max((sphere_fourier(2, r, &xi2)? - common::bessel_j0(2.0 * PI * r * rho)).abs());
        let xi3 = [rho * 0.48, rho * 0.6, rho * 0.64];
        let arg = 2.0 * PI * r * rho;
        let sinc = if arg == 0.0 { 1.0 } else { arg.sin() / arg };
        worst3 = worst3.max((sphere_fourier(3, r, &xi3)? - sinc).abs());
    }
    let direct = worst2 < 1e-8 && worst3 < 1e-12;
    Ok((ok && direct, format!("{detail}; series J0 gap {worst2:.1e}, sinc gap {worst3:.1e}")))
}

fn martingale() -> Outcome {
    suite("martingale", 1000)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let plane = Geometry::new(2, 8.0, 8)?;
    let space = Geometry::new(4, 8.0, 8)?;
    let mut kernel = |annulus: bool| -> aniso::Result<GridField> {
        let a = rng.random_range(0.5..2.0);
        let lambda: f64 = rng.random_range(1.0..2.0);
        let b = rng.random_range(if annulus { 4.0..6.0 } else { 1.0..2.0 }) / lambda.powf(a);
        let law = DilationLaw::new(a, b)?;
        if annulus {
            factor_kernel_unchecked(Shell::Sphere, law, lambda, 0.0, Surrogate::Annulus { width: 1.0 }, plane)
        } else {
            let eps = rng.random_range(0.0..=1.0);
            factor_kernel_unchecked(Shell::Sphere, law, lambda, eps, Surrogate::Spectral, plane)
        }
    };
    let path = TreeSpec::path(AnisotropyParams::isotropic(2))?;
    let star = TreeSpec::star(AnisotropyParams::isotropic(3))?;
    let names = ["box n=1", "box n=2", "path", "3-leaf star", "annulus box n=2", "annulus path"];
    let mut worst = [0.0f64; 6];
    for case in 0..20 {
        let f2 = common::random_field(plane, 100 + case);
        let f4 = common::random_field(space, 200 + case);
        let k: Vec<GridField> = (0..3).map(|_| kernel(false)).collect::<aniso::Result<_>>()?;
        let ka: Vec<GridField> = (0..2).map(|_| kernel(true)).collect::<aniso::Result<_>>()?;
        let pairs = [
            (box_form_with_kernels(&f2, &k[..1], 1.0)?, common::box_one(&f2, &k[0])),
            (box_form_with_kernels(&f4, &k[..2], 1.0)?, common::box_two(&f4, &k[0], &k[1])),
            (tree_form_with_kernels(&f2, &path, &k[..2])?, common::tree(&f2, &path.edges, &k[..2])),
            (tree_form_with_kernels(&f2, &star, &k)?, common::tree(&f2, &star.edges, &k)),
            (box_form_with_kernels(&f4, &ka, 1.0)?, common::box_two(&f4, &ka[0], &ka[1])),
            (tree_form_with_kernels(&f2, &path, &ka)?, common::tree(&f2, &path.edges, &ka)),
        ];
        for (w, (fast, slow)) in worst.iter_mut().zip(pairs) {
            *w = w.max(common::relative(fast, slow));
        }
    }
    let ok = worst.iter().all(|&w| w < 1e-8);
    let detail = names.iter().zip(worst).map(|(n, w)| format!("{n} {w:.1e}")).collect::<Vec<_>>().join(", ");
    Ok((ok, format!("20 cases each, worst relative gap: {detail}")))
}

fn representation() -> Outcome {
    suite("representation", 0)
}

fn multiscale_identities() -> Outcome {
    suite("multiscale-identities", 0)
}

fn covering() -> Outcome {
    suite("covering", 0)
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn uniform_scaling() -> Outcome {
    let g = Geometry::new(2, 1.0, 1024)?;
    let disk = GridField::from_fn(g, |x| if (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2) < 0.09 { 1.0 } else { 0.0 });
    let lambda: f64 = 2.0;
    let mut ok = true;
    let mut detail = Vec::new();
    for a in [1.0, 2.0] {
        let spec = BoxSpec::new(AnisotropyParams::new(vec![a], vec![0.125 / lambda.powf(a)])?)?;
        let n0 = count_boxes(&disk, &spec, lambda, 0.0)?.value;
        let mut points = Vec::new();
        for k in 1..=5 {
            let eps = 0.5f64.powi(k);
            let ne = count_boxes(&disk, &spec, lambda, eps)?.value;
            points.push((eps.ln(), (n0 - ne).abs().ln()));
        }
        let s = slope(&points);
        let need = a / 2.0 - 0.15;
        ok &= s >= need;
        detail.push(format!("a={a}: slope {s:.3} (needs >= {need:.2})"));
    }
    Ok((ok, detail.join(", ")))
}

fn describe(report: &SweepReport) -> String {
    report
        .series
        .iter()
        .map(|s| {
            let w = match s.variant.surrogate {
                Surrogate::Annulus { width } => width,
                Surrogate::Spectral => 0.0,
            };
            format!("N={} w={w}: λ₀ {:?}, zero windows {}", s.variant.cells, s.lambda0, s.zero_windows)
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn variants(cells: usize, coarse: usize) -> Vec<SweepVariant> {
    let base = SweepVariant { cells, surrogate: Surrogate::Annulus { width: 1.0 }, eps: 0.0 };
    vec![
        base,
        SweepVariant { cells: coarse, ..base },
        SweepVariant { surrogate: Surrogate::Annulus { width: 2.0 }, ..base },
    ]
}

fn tree_demonstration() -> Outcome {
    let form = FormSpec::Tree(TreeSpec::path(AnisotropyParams::new(vec![1.0, 2.0], vec![1.0, 1.0])?)?);
    let set = SetSpec::BallLattice { period: 1.0, radius: 0.4 };
    let plan = SweepPlan {
        dim: 2,
        side: 64.0,
        lambdas: (0..=24).map(|i| 1.0 + 3.0 * i as f64 / 24.0).collect(),
        variants: variants(1024, 512),
        coverage: 1.0,
        mc: McBudget::default(),
    };
    let report = lambda0_sweep(|g| set.build(g), &form, &plan)?;
    let ok = report.lambda0.is_some() && report.stable && report.series.iter().all(|s| s.lambda0.is_some());
    Ok((ok, format!("stable {}; {}", report.stable, describe(&report))))
}

fn strip_counterexample() -> Outcome {
    let strips = SetSpec::Strips { width: 0.2, period: 1.0, axis: 0 };
    let lambdas: Vec<f64> = (0..=75).map(|i| 0.5 + 7.5 * i as f64 / 75.0).collect();
    let sweep = |shell: Shell, variants: Vec<SweepVariant>| {
        let form = FormSpec::Box(BoxSpec::with_shells(AnisotropyParams::isotropic(1), vec![shell])?);
        let plan = SweepPlan { dim: 2, side: 32.0, lambdas: lambdas.clone(), variants, coverage: 1.0, mc: McBudget::default() };
        lambda0_sweep(|g| strips.build(g), &form, &plan)
    };
    let axis = sweep(Shell::AxisPair { axis: 0 }, variants(1024, 512))?;
    let sphere = sweep(Shell::Sphere, variants(1024, 512)[..1].to_vec())?;
    let ok = axis.series.iter().all(|s| s.lambda0.is_none() && s.zero_windows >= 2) && sphere.lambda0.is_some();
    Ok((ok, format!("axis pair: {}; sphere contrast: {}", describe(&axis), describe(&sphere))))
}

fn run_cli(config: &Path, command: &str, workers: usize) -> Result<Vec<u8>, Box<dyn std::error::Error>> {
    let out = Command::new(env!("CARGO_BIN_EXE_aniso"))
        .args([command, "--config"])
        .arg(config)
        .args(["--workers", &workers.to_string()])
        .output()?;
    if !out.status.success() {
        return Err(format!("{command} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)).into());
    }
    Ok(out.stdout)
}

const DETERMINISM_CONFIGS: [(&str, &str); 5] = [
    (
        "count",
        r#"
lambdas = [1.0, 1.5]
eps = [0.0, 0.5]
[grid]
dim = 2
side = 64.0
cells = 256
[set]
kind = "random"
density = 0.4
seed = 7
[form]
kind = "box"
exponents = [1.0]
coefficients = [10.0]
"#,
    ),
    (
        "count",
        r#"
lambdas = [1.0]
eps = [0.5]
seed = 11
[grid]
dim = 3
side = 16.0
cells = 64
[set]
kind = "ball-lattice"
period = 4.0
radius = 1.5
[form]
kind = "simplex"
directions = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
exponents = [1.0, 1.0]
coefficients = [3.0, 3.0]
[monte_carlo]
samples = 200
seed = 5
"#,
    ),
    (
        "sweep",
        r#"
lambdas = { start = 0.5, stop = 2.0, count = 7 }
[grid]
dim = 2
side = 32.0
cells = 256
[set]
kind = "strips"
width = 0.2
period = 1.0
axis = 0
[form]
kind = "box"
exponents = [1.0]
coefficients = [1.0]
shells = [{ axis-pair = { axis = 0 } }]
"#,
    ),
    (
        "decompose",
        r#"
lambdas = [1.0]
eps = [0.25, 0.5]
[grid]
dim = 2
side = 64.0
cells = 256
[set]
kind = "random"
density = 0.5
seed = 3
[form]
kind = "tree"
vertices = 3
edges = [[0, 1], [1, 2]]
exponents = [1.0, 2.0]
coefficients = [2.0, 2.0]
[ladder]
first = 1.0
ratio = 2.0
count = 2
eps = 0.5
"#,
    ),
    (
        "verify",
        r#"
seed = 9
[grid]
dim = 2
side = 1.0
cells = 8
[verify]
suites = ["covering", "martingale"]
trials = 50
"#,
    ),
];

fn determinism() -> Outcome {
    let dir = tempfile::tempdir()?;
    let mut checked = Vec::new();
    for (i, (command, text)) in DETERMINISM_CONFIGS.iter().enumerate() {
        let path = dir.path().join(format!("run{i}.toml"));
        std::fs::write(&path, text)?;
        let reference = run_cli(&path, command, 1)?;
        for workers in [1, 2, 3] {
            if run_cli(&path, command, workers)? != reference {
                return Ok((false, format!("{command} config {i} differs at {workers} workers")));
            }
        }
        checked.push(format!("{command} ({} bytes)", reference.len()));
    }
    Ok((true, format!("identical across repeats and 1/2/3 workers: {}", checked.join(", "))))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("gaussian identities", gaussian_identities),
        ("fourier decay", fourier_decay),
        ("martingale inequalities", martingale),
        ("oracle equivalence", oracle_equivalence),
        ("representation equivalence", representation),
        ("multiscale identities", multiscale_identities),
        ("covering multiplicity", covering),
        ("uniform-part scaling", uniform_scaling),
        ("tree demonstration", tree_demonstration),
        ("strip counterexample", strip_counterexample),
        ("determinism", determinism),
    ];
    let started = Instant::now();
    let mut failures = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {title}: {} [{:.1}s] {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 11 passed in {:.1}s", 11 - failures, started.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
