use super::decompose::check_form_scales;
use crate::counting::{EvalOptions, FormSpec, McBudget};
use crate::error::{Error, Result, Warning};
use crate::grid::{Geometry, GridField};
use crate::spherical::Surrogate;
use serde::{Deserialize, Serialize};

/// Relative positivity threshold against the count of the full set.
pub const POSITIVITY_THRESHOLD: f64 = 1e-6;
/// A positive tail shorter than this fraction of the sweep does not yield `λ₀`.
pub const MIN_TAIL_FRACTION: f64 = 0.25;

/// One discretization the sweep is repeated on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepVariant {
    pub cells: usize,
    pub surrogate: Surrogate,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSeries {
    pub variant: SweepVariant,
    pub counts: Vec<f64>,
    pub stderr: Vec<Option<f64>>,
    /// Index of the first λ of the positive tail.
    pub tail_start: Option<usize>,
    pub lambda0: Option<f64>,
    /// Maximal runs of counts at or below the threshold.
    pub zero_windows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub lambdas: Vec<f64>,
    /// Absolute threshold of the first variant.
    pub threshold: f64,
    pub series: Vec<SweepSeries>,
    /// `λ₀` of the first variant.
    pub lambda0: Option<f64>,
    /// All variants agree on `λ₀` to within one sweep step (or all find none).
    pub stable: bool,
    #[serde(skip)]
    pub warnings: Vec<Warning>,
}

/// Smallest sampled `λ` after which every count exceeds `threshold`, provided
/// that tail covers at least [`MIN_TAIL_FRACTION`] of the sweep.
pub fn positive_tail(counts: &[f64], threshold: f64) -> Option<usize> {
    let start = match counts.iter().rposition(|c| *c <= threshold) {
        Some(i) => i + 1,
        None => 0,
    };
    let tail = counts.len() - start;
    (tail > 0 && tail as f64 >= MIN_TAIL_FRACTION * counts.len() as f64).then_some(start)
}

pub fn zero_windows(counts: &[f64], threshold: f64) -> usize {
    let mut runs = 0;
    let mut inside = false;
    for c in counts {
        let zero = *c <= threshold;
        if zero && !inside {
            runs += 1;
        }
        inside = zero;
    }
    runs
}

/// What to sweep: an increasing `λ` grid on a torus of given dimension and
/// side, repeated on every variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub dim: usize,
    pub side: f64,
    pub lambdas: Vec<f64>,
    pub variants: Vec<SweepVariant>,
    pub coverage: f64,
    pub mc: McBudget,
}

/// `make_field` rebuilds the set at each variant's resolution.
pub fn lambda0_sweep(
    make_field: impl Fn(Geometry) -> Result<GridField>,
    form: &FormSpec,
    plan: &SweepPlan,
) -> Result<SweepReport> {
    let SweepPlan { dim, side, ref lambdas, ref variants, coverage, mc } = *plan;
    if lambdas.is_empty() || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("λ grid must be non-empty and strictly increasing".into()));
    }
    if variants.is_empty() {
        return Err(Error::Config("at least one sweep variant required".into()));
    }
    let mut fields = Vec::with_capacity(variants.len());
    for v in variants {
        let f = make_field(Geometry::new(dim, side, v.cells)?)?;
        check_form_scales(form, lambdas[lambdas.len() - 1], f.geometry())?;
        fields.push(f);
    }
    let mut series = Vec::with_capacity(variants.len());
    let mut warnings = Vec::new();
    let mut threshold = 0.0;
    for (i, (v, f)) in variants.iter().zip(&fields).enumerate() {
        let opts = EvalOptions { surrogate: v.surrogate, coverage };
        let thr = POSITIVITY_THRESHOLD * f.geometry().volume();
        if i == 0 {
            threshold = thr;
        }
        let mut counts = Vec::with_capacity(lambdas.len());
        let mut stderr = Vec::with_capacity(lambdas.len());
        for &l in lambdas {
            let c = form.evaluate(f, l, v.eps, &opts, mc)?;
            counts.push(c.value);
            stderr.push(c.stderr);
            warnings.extend(c.warnings);
        }
        let tail_start = positive_tail(&counts, thr);
        series.push(SweepSeries {
            variant: *v,
            lambda0: tail_start.map(|i| lambdas[i]),
            zero_windows: zero_windows(&counts, thr),
            tail_start,
            counts,
            stderr,
        });
    }
    let base = series[0].tail_start;
    let stable = series.iter().all(|s| match (base, s.tail_start) {
        (None, None) => true,
        (Some(a), Some(b)) => a.abs_diff(b) <= 1,
        _ => false,
    });
    Ok(SweepReport { lambdas: lambdas.to_vec(), threshold, lambda0: series[0].lambda0, series, stable, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{AnisotropyParams, BoxSpec};

    #[test]
    fn tail_detection() {
        assert_eq!(positive_tail(&[1.0, 0.0, 1.0, 1.0, 1.0], 0.5), Some(2));
        assert_eq!(positive_tail(&[1.0, 1.0, 1.0, 1.0, 0.0], 0.5), None);
        assert_eq!(positive_tail(&[1.0; 4], 0.5), Some(0));
        assert_eq!(positive_tail(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 0.5), None);
        assert_eq!(zero_windows(&[0.0, 1.0, 0.0, 0.0, 1.0, 0.0], 0.5), 3);
    }

    #[test]
    fn full_set_starts_at_first_lambda() {
        let form = FormSpec::Box(BoxSpec::new(AnisotropyParams::isotropic(1)).unwrap());
        let v = SweepVariant { cells: 64, surrogate: Surrogate::default(), eps: 0.0 };
        let plan = SweepPlan {
            dim: 2,
            side: 16.0,
            lambdas: vec![1.0, 2.0, 3.0],
            variants: vec![v, SweepVariant { cells: 128, ..v }],
            coverage: 1.0,
            mc: McBudget::default(),
        };
        let r = lambda0_sweep(|g| Ok(GridField::constant(g, 1.0)), &form, &plan).unwrap();
        assert_eq!(r.lambda0, Some(1.0));
        assert!(r.stable);
    }
}
