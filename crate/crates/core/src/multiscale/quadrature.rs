use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Log-uniform trapezoid rule for `ds/s` integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_decade: usize,
    /// Explicit integration band in `s`; otherwise the grid-resolvable band.
    pub band: Option<(f64, f64)>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes_per_decade: 64, band: None }
    }
}

impl QuadratureSpec {
    pub fn doubled(&self) -> Self {
        QuadratureSpec { nodes_per_decade: 2 * self.nodes_per_decade, ..*self }
    }

    pub fn with_band(self, lo: f64, hi: f64) -> Self {
        QuadratureSpec { band: Some((lo, hi)), ..self }
    }

    /// Nodes `s_i` and weights `w_i` with `Σ w_i φ(s_i) ≈ ∫_lo^hi φ(s) ds/s`; at least 16 nodes.
    pub fn nodes(&self, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Quadrature(format!("invalid band [{lo}, {hi}]")));
        }
        if self.nodes_per_decade == 0 {
            return Err(Error::Quadrature("nodes_per_decade must be positive".into()));
        }
        let span = (hi / lo).ln();
        let intervals = ((self.nodes_per_decade as f64 * (hi / lo).log10()).ceil() as usize).max(15);
        let du = span / intervals as f64;
        Ok((0..=intervals)
            .map(|i| {
                let w = if i == 0 || i == intervals { du / 2.0 } else { du };
                (lo * (i as f64 * du).exp(), w)
            })
            .collect())
    }
}

/// `r(s) = ((tλ)^{2a} − s^{2a})^{1/2a}` whenever `s < tλ`.
pub fn ladder_radius(t_lambda: f64, s: f64, a: f64) -> Option<f64> {
    let d = t_lambda.powf(2.0 * a) - s.powf(2.0 * a);
    (d > 0.0).then(|| d.powf(1.0 / (2.0 * a)))
}

/// Outcome of checking one multiscale identity numerically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Integration band in `s`.
    pub band: (f64, f64),
    pub nodes: usize,
    /// Quadrature over the band.
    pub band_integral: f64,
    /// Exact contribution of `(0, lo)`.
    pub lower_tail: f64,
    /// Exact contribution of `(hi, ∞)`.
    pub upper_tail: f64,
    /// Smallest integrand value seen at a node.
    pub min_integrand: f64,
}

impl IdentityCheck {
    pub fn residual(&self) -> f64 {
        if self.rhs == 0.0 {
            self.lhs.abs()
        } else {
            ((self.lhs - self.rhs) / self.rhs).abs()
        }
    }
}
