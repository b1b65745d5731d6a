//! Test sets on the torus as 0/1 grid fields.

use crate::error::{Error, Result};
use crate::grid::{self, Geometry, GridField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetSpec {
    Full,
    /// Every cell kept independently with probability `density`.
    Random { density: f64, seed: u64 },
    /// Balls of `radius` centred on the lattice `period·Zᵈ`.
    BallLattice { period: f64, radius: f64 },
    /// Cells whose coordinate `axis` lies within `width/2` of `period·Z`.
    Strips { width: f64, period: f64, axis: usize },
    /// Binary (`.bin`) or JSON field written by [`crate::grid`].
    FromFile { path: PathBuf },
}

fn periodic_offset(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    r.min(period - r)
}

impl SetSpec {
    pub fn validate(&self, geom: &Geometry) -> Result<()> {
        match *self {
            SetSpec::Random { density, .. } if !(0.0..=1.0).contains(&density) => {
                Err(Error::Config(format!("density must lie in [0,1], got {density}")))
            }
            SetSpec::BallLattice { period, radius } if !(period > 0.0 && radius > 0.0) => {
                Err(Error::Config("ball lattice needs positive period and radius".into()))
            }
            SetSpec::Strips { width, period, axis } => {
                if !(period > 0.0 && width > 0.0) {
                    Err(Error::Config("strips need positive width and period".into()))
                } else if axis >= geom.dim {
                    Err(Error::Config(format!("strip axis {axis} out of range for dimension {}", geom.dim)))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Seed used by the generator, if any.
    pub fn seed(&self) -> Option<u64> {
        match self {
            SetSpec::Random { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn with_seed(&self, s: u64) -> SetSpec {
        match self {
            SetSpec::Random { density, .. } => SetSpec::Random { density: *density, seed: s },
            other => other.clone(),
        }
    }

    pub fn build(&self, geom: Geometry) -> Result<GridField> {
        self.validate(&geom)?;
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        Ok(match self {
            SetSpec::Full => GridField::constant(geom, 1.0),
            SetSpec::Random { density, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let v = (0..geom.len()).map(|_| ind(rng.random::<f64>() < *density)).collect();
                GridField::from_values(geom, v)?
            }
            &SetSpec::BallLattice { period, radius } => GridField::from_fn(geom, |x| {
                ind(x.iter().map(|v| periodic_offset(*v, period).powi(2)).sum::<f64>() < radius * radius)
            }),
            &SetSpec::Strips { width, period, axis } => {
                GridField::from_fn(geom, |x| ind(periodic_offset(x[axis], period) <= width / 2.0))
            }
            SetSpec::FromFile { path } => {
                let file = std::io::BufReader::new(std::fs::File::open(path)?);
                let f = match path.extension().and_then(|e| e.to_str()) {
                    Some("json") => grid::read_json(file)?,
                    _ => grid::read_binary(file)?,
                };
                f.geometry().check_same(&geom)?;
                f
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        let g = Geometry::new(2, 8.0, 64).unwrap();
        assert_eq!(SetSpec::Full.build(g).unwrap().mean(), 1.0);
        let r = SetSpec::Random { density: 0.3, seed: 9 }.build(g).unwrap();
        assert!(r.is_indicator() && (r.mean() - 0.3).abs() < 0.05);
        assert_eq!(r, SetSpec::Random { density: 0.3, seed: 9 }.build(g).unwrap());
        let s = SetSpec::Strips { width: 0.25, period: 1.0, axis: 0 }.build(g).unwrap();
        assert!((s.mean() - 0.25).abs() < 1e-12);
        let b = SetSpec::BallLattice { period: 1.0, radius: 0.4 }.build(g).unwrap();
        assert!((b.mean() - std::f64::consts::PI * 0.16).abs() < 0.03);
        assert!(SetSpec::Strips { width: 0.2, period: 1.0, axis: 2 }.build(g).is_err());
    }

    #[test]
    fn round_trip_through_file() {
        let g = Geometry::new(2, 8.0, 16).unwrap();
        let f = SetSpec::Random { density: 0.5, seed: 1 }.build(g).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("set.json");
        grid::write_json(&f, std::fs::File::create(&p).unwrap()).unwrap();
        assert_eq!(SetSpec::FromFile { path: p }.build(g).unwrap(), f);
    }
}
