use super::ScaleLadder;
use crate::counting::{check_wraparound, EvalOptions, FormSpec, McBudget};
use crate::error::{Checked, Error, Result};
use crate::grid::{Geometry, GridField};
use serde::Serialize;

/// `N⁰ = N¹ + (Nᵉ − N¹) + (N⁰ − Nᵉ)` at one `(λ, ε)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionRow {
    pub lambda: f64,
    pub eps: f64,
    pub n1: f64,
    pub ne: f64,
    pub n0: f64,
    /// `Nᵉ − N¹`
    pub error: f64,
    /// `N⁰ − Nᵉ`
    pub uniform: f64,
    /// Monte Carlo standard errors of `(N¹, Nᵉ, N⁰)` for simplex forms.
    pub stderr: Option<[f64; 3]>,
}

/// Checks every factor scale at `λ` against the wraparound guard.
pub fn check_form_scales(form: &FormSpec, lambda: f64, geom: &Geometry) -> Result<()> {
    if geom.dim != form.grid_dim() {
        return Err(Error::Dimension(format!(
            "form needs a grid of dimension {}, got {}",
            form.grid_dim(),
            geom.dim
        )));
    }
    let params = form.params();
    for k in 0..params.len() {
        check_wraparound("factor", params.scale(k, lambda), geom)?;
    }
    Ok(())
}

pub fn decompose(
    f: &GridField,
    form: &FormSpec,
    lambda: f64,
    eps: f64,
    opts: &EvalOptions,
    mc: McBudget,
) -> Result<Checked<DecompositionRow>> {
    check_form_scales(form, lambda, f.geometry())?;
    let one = form.evaluate(f, lambda, 1.0, opts, mc)?;
    let mid = if eps == 1.0 { one.clone() } else { form.evaluate(f, lambda, eps, opts, mc)? };
    let zero = form.evaluate(f, lambda, 0.0, opts, mc)?;
    let stderr = match (one.stderr, mid.stderr, zero.stderr) {
        (Some(a), Some(b), Some(c)) => Some([a, b, c]),
        _ => None,
    };
    let mut warnings = one.warnings;
    warnings.extend(mid.warnings);
    warnings.extend(zero.warnings);
    let row = DecompositionRow {
        lambda,
        eps,
        n1: one.value,
        ne: mid.value,
        n0: zero.value,
        error: mid.value - one.value,
        uniform: zero.value - mid.value,
        stderr,
    };
    Ok(Checked { value: row, warnings })
}

/// `Σ_j |Nᵉ_{λ_j} − N¹_{λ_j}|` with its per-scale terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderSum {
    pub per_scale: Vec<f64>,
    pub total: f64,
    /// Least-squares slope of `ln(cumulative sum)` against `ln j`; below 1 means sublinear growth.
    pub growth_slope: Option<f64>,
}

pub fn error_ladder_sum(
    f: &GridField,
    form: &FormSpec,
    ladder: &ScaleLadder,
    opts: &EvalOptions,
    mc: McBudget,
) -> Result<Checked<LadderSum>> {
    for &l in ladder.scales() {
        check_form_scales(form, l, f.geometry())
            .map_err(|e| Error::Wraparound(format!("infeasible ladder at λ = {l}: {e}")))?;
    }
    let mut warnings = Vec::new();
    let mut per_scale = Vec::with_capacity(ladder.len());
    for &l in ladder.scales() {
        let one = form.evaluate(f, l, 1.0, opts, mc)?;
        let mid = form.evaluate(f, l, ladder.eps(), opts, mc)?;
        per_scale.push((mid.value - one.value).abs());
        warnings.extend(one.warnings);
        warnings.extend(mid.warnings);
    }
    let total = per_scale.iter().sum();
    Ok(Checked { value: LadderSum { growth_slope: growth_slope(&per_scale), per_scale, total }, warnings })
}

fn growth_slope(terms: &[f64]) -> Option<f64> {
    let mut cum = 0.0;
    let pts: Vec<(f64, f64)> = terms
        .iter()
        .enumerate()
        .filter_map(|(j, t)| {
            cum += t;
            (cum > 0.0).then(|| (((j + 1) as f64).ln(), cum.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
