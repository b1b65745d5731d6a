use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::E;

/// Lacunary scales `λ₁ < … < λ_J` with `λ_{j+1} ≥ 2λ_j`, a smoothing level and
/// the covering parameter `θ = 10^{−1/a_n} e^{−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLadder {
    scales: Vec<f64>,
    eps: f64,
    theta: f64,
}

impl ScaleLadder {
    pub fn new(scales: Vec<f64>, eps: f64, last_exponent: f64) -> Result<Self> {
        if scales.is_empty() || scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::Config("ladder needs at least one positive finite scale".into()));
        }
        if let Some(w) = scales.windows(2).find(|w| w[1] < 2.0 * w[0]) {
            return Err(Error::Config(format!("ladder is not lacunary: {} follows {}", w[1], w[0])));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Domain(format!("ladder smoothing level must lie in (0,1], got {eps}")));
        }
        if !(last_exponent > 0.0) {
            return Err(Error::Domain("exponent must be positive".into()));
        }
        let theta = 10f64.powf(-1.0 / last_exponent) / E;
        Ok(ScaleLadder { scales, eps, theta })
    }

    /// `λ_j = first · ratio^{j−1}`, `j = 1..=count`.
    pub fn geometric(first: f64, ratio: f64, count: usize, eps: f64, last_exponent: f64) -> Result<Self> {
        Self::new((0..count).map(|j| first * ratio.powi(j as i32)).collect(), eps, last_exponent)
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// `[θtλ_j, eθtλ_j]` for every `j`.
    pub fn intervals(&self, t: f64) -> Vec<(f64, f64)> {
        self.scales.iter().map(|l| (self.theta * t * l, E * self.theta * t * l)).collect()
    }

    /// Number of intervals containing `s`.
    pub fn multiplicity_at(&self, t: f64, s: f64) -> usize {
        self.intervals(t).iter().filter(|(lo, hi)| *lo <= s && s <= *hi).count()
    }
}

/// Largest number of intervals `[θtλ_j, eθtλ_j]` covering any of `samples`
/// log-uniform points, plus every interval endpoint.
pub fn covering_multiplicity(ladder: &ScaleLadder, t: f64, samples: usize) -> usize {
    let iv = ladder.intervals(t);
    let lo = iv[0].0 / 2.0;
    let hi = iv[iv.len() - 1].1 * 2.0;
    let span = (hi / lo).ln();
    let grid = (0..samples).map(|i| lo * (span * (i as f64 + 0.5) / samples as f64).exp());
    let ends = iv.iter().flat_map(|&(a, b)| [a, b]);
    grid.chain(ends).map(|s| ladder.multiplicity_at(t, s)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_and_theta() {
        assert!(ScaleLadder::new(vec![1.0, 1.5], 0.5, 1.0).is_err());
        assert!(ScaleLadder::new(vec![1.0, 2.0], 0.0, 1.0).is_err());
        assert!(ScaleLadder::new(vec![], 0.5, 1.0).is_err());
        let l = ScaleLadder::new(vec![1.0, 2.0], 1.0, 2.0).unwrap();
        assert!((l.theta() - 10f64.powf(-0.5) / E).abs() < 1e-15);
    }

    #[test]
    fn covering_bounds() {
        let one = ScaleLadder::new(vec![3.0], 0.5, 1.0).unwrap();
        assert_eq!(covering_multiplicity(&one, 1.0, 1000), 1);
        let dyadic = ScaleLadder::geometric(2.0, 2.0, 10, 0.5, 1.0).unwrap();
        assert_eq!(covering_multiplicity(&dyadic, 1.0, 1000), 2);
        let sparse = ScaleLadder::geometric(1.0, E * 1.01, 8, 0.5, 1.0).unwrap();
        assert_eq!(covering_multiplicity(&sparse, 1.0, 1000), 1);
    }
}
