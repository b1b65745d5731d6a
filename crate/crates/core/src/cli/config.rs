use crate::counting::{AnisotropyParams, BoxSpec, FormSpec, McBudget, SimplexSpec, TreeSpec};
use crate::error::{Error, Result};
use crate::grid::Geometry;
use crate::multiscale::{check_form_scales, ScaleLadder, SweepVariant};
use crate::sets::SetSpec;
use crate::spherical::{Shell, Surrogate};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub side: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FormConfig {
    Box {
        exponents: Vec<f64>,
        coefficients: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shells: Option<Vec<Shell>>,
    },
    Tree {
        vertices: usize,
        edges: Vec<(usize, usize)>,
        exponents: Vec<f64>,
        coefficients: Vec<f64>,
        #[serde(default)]
        root: usize,
    },
    Simplex {
        directions: Vec<Vec<f64>>,
        exponents: Vec<f64>,
        coefficients: Vec<f64>,
    },
}

impl FormConfig {
    pub fn build(&self) -> Result<FormSpec> {
        Ok(match self {
            FormConfig::Box { exponents, coefficients, shells } => {
                let p = AnisotropyParams::new(exponents.clone(), coefficients.clone())?;
                FormSpec::Box(match shells {
                    Some(s) => BoxSpec::with_shells(p, s.clone())?,
                    None => BoxSpec::new(p)?,
                })
            }
            FormConfig::Tree { vertices, edges, exponents, coefficients, root } => {
                let p = AnisotropyParams::new(exponents.clone(), coefficients.clone())?;
                FormSpec::Tree(TreeSpec::new(*vertices, edges.clone(), p, *root)?)
            }
            FormConfig::Simplex { directions, exponents, coefficients } => {
                let p = AnisotropyParams::new(exponents.clone(), coefficients.clone())?;
                FormSpec::Simplex(SimplexSpec::new(directions.clone(), p)?)
            }
        })
    }
}

/// Either an explicit list or `count` evenly spaced values (log-spaced if `log`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaGrid {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl LambdaGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match *self {
            LambdaGrid::List(ref v) => v.clone(),
            LambdaGrid::Range { start, stop, count, log } => {
                if count < 2 || !(start > 0.0 && stop > start) {
                    return Err(Error::Config("lambda range needs 0 < start < stop and count >= 2".into()));
                }
                (0..count)
                    .map(|i| {
                        let u = i as f64 / (count - 1) as f64;
                        if log {
                            start * (stop / start).powf(u)
                        } else {
                            start + (stop - start) * u
                        }
                    })
                    .collect()
            }
        };
        if v.is_empty() || v.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::Config("lambdas must be non-empty, positive and finite".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Resolutions; the first is the reference.
    #[serde(default)]
    pub cells: Vec<usize>,
    /// Annulus widths (cells); the first is the reference.
    #[serde(default)]
    pub widths: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub first: f64,
    pub ratio: f64,
    pub count: usize,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "all_suites")]
    pub suites: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { suites: all_suites(), trials: default_trials() }
    }
}

pub const SUITES: [&str; 7] = [
    "gaussian-identities",
    "fourier-decay",
    "martingale",
    "counting-oracles",
    "representation",
    "multiscale-identities",
    "covering",
];

fn all_suites() -> Vec<String> {
    SUITES.iter().map(|s| s.to_string()).collect()
}

fn default_trials() -> usize {
    1000
}

fn default_eps() -> Vec<f64> {
    vec![0.0]
}

fn default_coverage() -> f64 {
    0.999
}

/// The experiment record: parsed from TOML or JSON and echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub grid: GridConfig,
    #[serde(default = "full_set")]
    pub set: SetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<FormConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<LambdaGrid>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub surrogate: Surrogate,
    #[serde(default = "default_coverage")]
    pub coverage: f64,
    #[serde(default)]
    pub monte_carlo: McBudget,
    /// Overrides every generator and Monte Carlo seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Thread count; results do not depend on it, so reports leave it out.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    /// Emit a brute-force column next to each count (tiny grids only).
    #[serde(default)]
    pub oracle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<LadderConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn full_set() -> SetSpec {
    SetSpec::Full
}

impl ExperimentConfig {
    pub fn parse(text: &str, json: bool) -> Result<Self> {
        if json {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
        } else {
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid config: {}", e.message())))
        }
    }

    /// Reads `.json` as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path.extension().is_some_and(|e| e == "json"))
    }

    /// Applies a seed override to the config itself so the echo records it.
    pub fn apply_seed(&mut self, seed: Option<u64>) {
        if let Some(s) = seed.or(self.seed) {
            self.seed = Some(s);
            self.set = self.set.with_seed(s);
            self.monte_carlo.seed = s;
        }
    }
}

/// A configuration checked against every module precondition.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub geometry: Geometry,
    pub form: Option<FormSpec>,
    pub lambdas: Vec<f64>,
    pub ladder: Option<ScaleLadder>,
}

fn require<'a, T>(v: &'a Option<T>, key: &str, command: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Config(format!("missing key `{key}` required by `{command}`")))
}

impl Experiment {
    pub fn validate(config: ExperimentConfig, command: &str) -> Result<Self> {
        if let Some(c) = &config.command {
            if c != command {
                return Err(Error::Config(format!("config is for `{c}`, invoked as `{command}`")));
            }
        }
        let g = config.grid;
        let geometry = Geometry::new(g.dim, g.side, g.cells)?;
        config.set.validate(&geometry)?;
        if config.eps.is_empty() || config.eps.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::Config("eps values must lie in [0,1]".into()));
        }
        if !(config.coverage > 0.0 && config.coverage <= 1.0) {
            return Err(Error::Config(format!("coverage must lie in (0,1], got {}", config.coverage)));
        }
        if let Surrogate::Annulus { width } = config.surrogate {
            if !(width >= 1.0) {
                return Err(Error::Config(format!("annulus width must be at least one cell, got {width}")));
            }
        }
        if config.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        if command == "verify" {
            if let Some(v) = &config.verify {
                if let Some(bad) = v.suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
                    return Err(Error::Config(format!("unknown suite `{bad}`; known: {}", SUITES.join(", "))));
                }
            }
            return Ok(Experiment { config, geometry, form: None, lambdas: Vec::new(), ladder: None });
        }
        let form = require(&config.form, "form", command)?.build()?;
        let lambdas = require(&config.lambdas, "lambdas", command)?.values()?;
        if matches!(form, FormSpec::Simplex(_)) && config.monte_carlo.samples < 100 {
            return Err(Error::Config("monte_carlo.samples must be at least 100".into()));
        }
        let ladder = match (command, &config.ladder) {
            ("decompose", Some(l)) => {
                let last = *form.params().exponents.last().expect("non-empty");
                Some(ScaleLadder::geometric(l.first, l.ratio, l.count, l.eps, last)?)
            }
            _ => None,
        };
        let mut grids = vec![geometry];
        let mut widths = Vec::new();
        if command == "sweep" {
            for v in sweep_variants(&config)? {
                grids.push(Geometry::new(g.dim, g.side, v.cells)?);
                if let Surrogate::Annulus { width } = v.surrogate {
                    widths.push(width);
                }
            }
        }
        let mut scales: Vec<f64> = lambdas.clone();
        if let Some(l) = &ladder {
            scales.extend_from_slice(l.scales());
        }
        for geom in &grids {
            for &l in &scales {
                check_form_scales(&form, l, geom)?;
                check_resolved(&form, l, geom, &config)?;
            }
        }
        if widths.iter().any(|w| *w < 1.0) {
            return Err(Error::Config("annulus widths must be at least one cell".into()));
        }
        if config.oracle {
            let per_plane = match form {
                FormSpec::Simplex(_) => return Err(Error::Config("no brute-force oracle for simplex forms".into())),
                _ => g.cells,
            };
            if per_plane > 8 {
                return Err(Error::Config(format!("oracle column needs at most 8 cells per axis, got {per_plane}")));
            }
        }
        Ok(Experiment { config, geometry, form: Some(form), lambdas, ladder })
    }

    pub fn verify_config(&self) -> VerifyConfig {
        self.config.verify.clone().unwrap_or_default()
    }
}

/// Shell surrogates need their radius resolved by the grid.
fn check_resolved(form: &FormSpec, lambda: f64, geom: &Geometry, config: &ExperimentConfig) -> Result<()> {
    if matches!(form, FormSpec::Simplex(_)) || !matches!(config.surrogate, Surrogate::Annulus { .. }) {
        return Ok(());
    }
    let p = form.params();
    let h = geom.spacing();
    for k in 0..p.len() {
        let r = p.scale(k, lambda);
        if r < 4.0 * h && !config.oracle {
            return Err(Error::Config(format!("factor scale {r} at λ = {lambda} is below four cells ({})", 4.0 * h)));
        }
    }
    Ok(())
}

/// Reference variant first, then each extra resolution, then each extra width.
pub fn sweep_variants(config: &ExperimentConfig) -> Result<Vec<SweepVariant>> {
    let sweep = config.sweep.clone().unwrap_or(SweepConfig { cells: Vec::new(), widths: Vec::new() });
    let base_cells = config.grid.cells;
    let cells = if sweep.cells.is_empty() { vec![base_cells, 2 * base_cells] } else { sweep.cells.clone() };
    let eps = config.eps[0];
    let mut out = Vec::new();
    match config.surrogate {
        Surrogate::Annulus { width } => {
            let widths = if sweep.widths.is_empty() { vec![width, 2.0 * width] } else { sweep.widths.clone() };
            let base = SweepVariant { cells: cells[0], surrogate: Surrogate::Annulus { width: widths[0] }, eps };
            out.push(base);
            out.extend(cells[1..].iter().map(|&c| SweepVariant { cells: c, ..base }));
            out.extend(widths[1..].iter().map(|&w| SweepVariant { surrogate: Surrogate::Annulus { width: w }, ..base }));
        }
        Surrogate::Spectral => {
            let base = SweepVariant { cells: cells[0], surrogate: Surrogate::Spectral, eps };
            out.push(base);
            out.extend(cells[1..].iter().map(|&c| SweepVariant { cells: c, ..base }));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        [grid]
        dim = 2
        side = 16.0
        cells = 64

        [form]
        kind = "box"
        exponents = [1.0]
        coefficients = [1.0]
    "#;

    #[test]
    fn missing_grid_is_named() {
        let e = ExperimentConfig::parse("lambdas = [1.0]", false).unwrap_err();
        assert!(e.to_string().contains("grid"), "{e}");
        let e = ExperimentConfig::parse(r#"{"lambdas": [1.0]}"#, true).unwrap_err();
        assert!(e.to_string().contains("grid"), "{e}");
    }

    #[test]
    fn validation_before_compute() {
        let mut c = ExperimentConfig::parse(BASE, false).unwrap();
        assert!(Experiment::validate(c.clone(), "count").unwrap_err().to_string().contains("lambdas"));
        c.lambdas = Some(LambdaGrid::List(vec![1.0, 5.0]));
        assert!(matches!(Experiment::validate(c.clone(), "count"), Err(Error::Wraparound(_))));
        c.lambdas = Some(LambdaGrid::Range { start: 1.0, stop: 4.0, count: 4, log: false });
        let e = Experiment::validate(c.clone(), "count").unwrap();
        assert_eq!(e.lambdas, vec![1.0, 2.0, 3.0, 4.0]);
        // the doubled sweep grid is fine, the lambda grid is what matters
        assert!(Experiment::validate(c, "sweep").is_ok());
    }

    #[test]
    fn seed_override_reaches_generators() {
        let mut c = ExperimentConfig::parse(BASE, false).unwrap();
        c.set = SetSpec::Random { density: 0.4, seed: 1 };
        c.apply_seed(Some(9));
        assert_eq!(c.set.seed(), Some(9));
        assert_eq!(c.monte_carlo.seed, 9);
    }
}
