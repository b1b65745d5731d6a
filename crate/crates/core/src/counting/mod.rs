//! Counting forms for boxes on `(R²)ⁿ`, distance trees in `R²` and simplices
//! in `R^{n+1}`.
//!
//! Smoothing follows one convention throughout: the factor at scale
//! `ρ = λ^a b` and smoothing level `ε` is the shell measure of radius `ρ`
//! convolved with `g_{ε^a ρ}`; `ε = 0` is the unsmoothed surrogate and
//! `ε = 1` the fully smooth form.

mod boxes;
pub mod brute;
mod simplex;
mod structured;
mod tree;

pub use boxes::{box_form_with_kernels, count_boxes, count_boxes_with, coverage_rows, swap_planes, BoxSlices, BoxSpec};
pub use simplex::{count_simplex_mc, nested_simplex_form, McEstimate, SimplexSpec};
pub use structured::{structured_box_lower, StructuredBound};
pub use tree::{count_tree, count_tree_with, tree_form_with_kernels, TreeSpec};

use crate::error::{Checked, Error, Result, Warning};
use crate::grid::Geometry;
use crate::grid::GridField;
use crate::kernels::DilationLaw;
use crate::spherical::{shell_field, Shell, Surrogate};
use serde::{Deserialize, Serialize};

/// Any of the three configuration families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FormSpec {
    Box(BoxSpec),
    Tree(TreeSpec),
    Simplex(SimplexSpec),
}

/// Monte Carlo budget for simplex forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McBudget {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McBudget {
    fn default() -> Self {
        McBudget { samples: 1000, seed: 0 }
    }
}

/// One evaluated count; `stderr` only for Monte Carlo forms.
#[derive(Debug, Clone, PartialEq)]
pub struct Count {
    pub value: f64,
    pub stderr: Option<f64>,
    pub warnings: Vec<Warning>,
}

impl FormSpec {
    pub fn params(&self) -> &AnisotropyParams {
        match self {
            FormSpec::Box(s) => &s.params,
            FormSpec::Tree(s) => &s.params,
            FormSpec::Simplex(s) => &s.params,
        }
    }

    /// Grid dimension the form is evaluated on.
    pub fn grid_dim(&self) -> usize {
        match self {
            FormSpec::Box(s) => 2 * s.n(),
            FormSpec::Tree(_) => 2,
            FormSpec::Simplex(s) => s.ambient_dim(),
        }
    }

    /// Largest length scale entering the form at `λ`.
    pub fn largest_scale(&self, lambda: f64) -> f64 {
        match self {
            FormSpec::Tree(s) => s.diameter(lambda),
            FormSpec::Simplex(s) => s.diameter(lambda),
            FormSpec::Box(s) => (0..s.n()).map(|k| s.params.scale(k, lambda)).fold(0.0, f64::max),
        }
    }

    pub fn evaluate(&self, f: &GridField, lambda: f64, eps: f64, opts: &EvalOptions, mc: McBudget) -> Result<Count> {
        let plain = |c: Checked<f64>| Count { value: c.value, stderr: None, warnings: c.warnings };
        match self {
            FormSpec::Box(s) => count_boxes_with(f, s, lambda, eps, opts).map(plain),
            FormSpec::Tree(s) => count_tree_with(f, s, lambda, eps, opts).map(plain),
            FormSpec::Simplex(s) => {
                let c = count_simplex_mc(f, s, lambda, eps, mc.samples, mc.seed)?;
                Ok(Count { value: c.value.mean, stderr: Some(c.value.stderr), warnings: c.warnings })
            }
        }
    }
}

/// Exponents `a_k` and coefficients `b_k`; factor `k` lives at scale `λ^{a_k} b_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyParams {
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl AnisotropyParams {
    pub fn new(exponents: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        if exponents.len() != coefficients.len() || exponents.is_empty() {
            return Err(Error::Config(format!(
                "need matching nonempty exponent/coefficient lists, got {} and {}",
                exponents.len(),
                coefficients.len()
            )));
        }
        for (&a, &b) in exponents.iter().zip(&coefficients) {
            DilationLaw::new(a, b)?;
        }
        Ok(AnisotropyParams { exponents, coefficients })
    }

    pub fn isotropic(n: usize) -> Self {
        AnisotropyParams { exponents: vec![1.0; n], coefficients: vec![1.0; n] }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn law(&self, k: usize) -> DilationLaw {
        DilationLaw { exponent: self.exponents[k], coefficient: self.coefficients[k] }
    }

    /// `λ^{a_k} b_k`
    pub fn scale(&self, k: usize, lambda: f64) -> f64 {
        self.law(k).scale(lambda)
    }

    /// `a = Σ a_k`
    pub fn total_exponent(&self) -> f64 {
        self.exponents.iter().sum()
    }

    /// `c = min a_k`
    pub fn min_exponent(&self) -> f64 {
        self.exponents.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evaluation knobs shared by the counting forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub surrogate: Surrogate,
    /// Fraction of first-plane kernel mass retained by the two-plane box evaluation.
    pub coverage: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { surrogate: Surrogate::default(), coverage: 0.999 }
    }
}

impl EvalOptions {
    pub fn exact() -> Self {
        EvalOptions { coverage: 1.0, ..Default::default() }
    }
}

/// Rejects scales that would wrap around the torus (`scale > R/4`).
pub fn check_wraparound(what: &str, scale: f64, geom: &Geometry) -> Result<()> {
    if scale > geom.side / 4.0 {
        return Err(Error::Wraparound(format!("{what}: scale {scale} exceeds R/4 = {}", geom.side / 4.0)));
    }
    Ok(())
}

/// Kernel of one factor: shell of radius `ρ = λ^a b` smoothed at `ε^a ρ`.
///
/// Checks the wraparound guard, resolvability of the unsmoothed shell, and
/// flags under-resolved smoothing.
pub fn factor_kernel(
    shell: Shell,
    law: DilationLaw,
    lambda: f64,
    eps: f64,
    surrogate: Surrogate,
    plane: Geometry,
) -> Result<Checked<GridField>> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("smoothing level must lie in [0,1], got {eps}")));
    }
    let rho = law.scale(lambda);
    check_wraparound("factor", rho, &plane)?;
    let h = plane.spacing();
    if matches!(surrogate, Surrogate::Annulus { .. }) && rho < 4.0 * h {
        return Err(Error::Config(format!("scale {rho} below four grid cells ({})", 4.0 * h)));
    }
    let s = smoothing_scale(law, lambda, eps);
    let mut warnings = Vec::new();
    if s > 0.0 && s < 2.0 * h {
        warnings.push(Warning::UnderResolved { what: "smoothing", scale: s, spacing: h });
    }
    Ok(Checked { value: factor_kernel_unchecked(shell, law, lambda, eps, surrogate, plane)?, warnings })
}

/// `factor_kernel` without the guards, for tiny grids and oracles.
pub fn factor_kernel_unchecked(
    shell: Shell,
    law: DilationLaw,
    lambda: f64,
    eps: f64,
    surrogate: Surrogate,
    plane: Geometry,
) -> Result<GridField> {
    shell_field(shell, law.scale(lambda), smoothing_scale(law, lambda, eps), surrogate, plane)
}

/// `ε^a λ^a b`
pub fn smoothing_scale(law: DilationLaw, lambda: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        0.0
    } else {
        (eps * lambda).powf(law.exponent) * law.coefficient
    }
}

pub(crate) fn plane_of(geom: &Geometry) -> Result<Geometry> {
    Geometry::new(2, geom.side, geom.cells)
}
