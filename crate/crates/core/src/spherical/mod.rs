//! Spherical measures, their Fourier transforms and grid surrogates.

mod rotation;
mod subsphere;

pub use rotation::{Rotation, RotationSampler};
pub use subsphere::{GramData, SubsphereMeasure};

use crate::error::{Error, Result};
use crate::grid::{Geometry, GridField, SpectrumField};
use crate::kernels::{kernel_spectrum, KernelKind};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Normalized surface measure on a sphere centred at the origin, or the
/// two-point measure `(δ_{ρe} + δ_{-ρe})/2` on one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shell {
    Sphere,
    AxisPair { axis: usize },
}

/// How a shell measure is put on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Surrogate {
    /// Sphere measure deposited with a tent `width` cells wide per axis.
    Annulus { width: f64 },
    /// Exact transform restricted to the grid frequencies.
    Spectral,
}

impl Default for Surrogate {
    fn default() -> Self {
        Surrogate::Annulus { width: 1.0 }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `σ̂_r(ξ)` for the unit-mass sphere of radius `r` in dimension 2 or 3.
pub fn sphere_fourier(dim: usize, r: f64, xi: &[f64]) -> Result<f64> {
    if xi.len() != dim {
        return Err(Error::Dimension(format!("frequency of length {} in dimension {dim}", xi.len())));
    }
    sphere_fourier_radial(dim, r * norm(xi))
}

/// `σ̂(ξ)` as a function of `ρ = |ξ|` for the unit sphere.
pub fn sphere_fourier_radial(dim: usize, rho: f64) -> Result<f64> {
    let z = 2.0 * PI * rho;
    match dim {
        2 => Ok(libm::j0(z)),
        3 => Ok(if z.abs() < 1e-8 { 1.0 - z * z / 6.0 } else { z.sin() / z }),
        _ => Err(Error::Domain(format!("sphere transform implemented for d in {{2,3}}, got {dim}"))),
    }
}

/// Transform of a shell measure of radius `r` at `xi`.
pub fn shell_fourier(shell: Shell, r: f64, xi: &[f64]) -> Result<f64> {
    match shell {
        Shell::Sphere => sphere_fourier(xi.len(), r, xi),
        Shell::AxisPair { axis } => {
            let v = xi.get(axis).ok_or_else(|| Error::Domain(format!("axis {axis} out of range")))?;
            Ok((2.0 * PI * r * v).cos())
        }
    }
}

/// `max |σ̂(ξ)|·max(1,|ξ|)^{(d-1)/2}` over the sampled radii.
pub fn decay_margin(dim: usize, radii: &[f64]) -> Result<f64> {
    let p = (dim as f64 - 1.0) / 2.0;
    let mut m = 0.0f64;
    for &rho in radii {
        m = m.max(sphere_fourier_radial(dim, rho)?.abs() * rho.max(1.0).powf(p));
    }
    Ok(m)
}

/// `decay_margin` on `points` uniformly spaced radii in `[0, xi_max]`.
pub fn decay_margin_uniform(dim: usize, xi_max: f64, points: usize) -> Result<f64> {
    let radii: Vec<f64> = (0..points).map(|i| xi_max * i as f64 / (points - 1) as f64).collect();
    decay_margin(dim, &radii)
}

/// Grid surrogate for `σ_r` (displacement layout): the sphere measure
/// deposited onto cells with a separable tent of half-width `width` cells.
/// Nonnegative, unit mass, supported within `width·√d` cells of the sphere.
pub fn discretize_sphere(dim: usize, r: f64, geom: Geometry, width: f64) -> Result<GridField> {
    if geom.dim != dim {
        return Err(Error::Dimension(format!("grid of dimension {} for a sphere in {dim}", geom.dim)));
    }
    if r < 4.0 * geom.spacing() {
        return Err(Error::Config(format!(
            "sphere radius {r} below four grid cells ({})",
            4.0 * geom.spacing()
        )));
    }
    discretize_shell(Shell::Sphere, r, geom, width)
}

/// Equal-weight quadrature points of a shell of radius `r`.
fn shell_points(shell: Shell, r: f64, dim: usize, spacing: f64) -> Result<Vec<Vec<f64>>> {
    let per_turn = |k: f64| ((k * 2.0 * PI * r / spacing).ceil() as usize).max(64).next_multiple_of(4);
    match (shell, dim) {
        (Shell::AxisPair { axis }, _) if axis < dim => {
            let mut a = vec![0.0; dim];
            let mut b = vec![0.0; dim];
            a[axis] = r;
            b[axis] = -r;
            Ok(vec![a, b])
        }
        (Shell::AxisPair { axis }, _) => Err(Error::Domain(format!("axis {axis} outside dimension {dim}"))),
        (Shell::Sphere, 1) => Ok(vec![vec![r], vec![-r]]),
        (Shell::Sphere, 2) => {
            let m = per_turn(64.0);
            Ok((0..m)
                .map(|i| {
                    let t = 2.0 * PI * (i as f64 + 0.5) / m as f64;
                    vec![r * t.cos(), r * t.sin()]
                })
                .collect())
        }
        (Shell::Sphere, 3) => {
            // z uniform in [-1,1] and φ uniform give the uniform area measure
            let mphi = per_turn(16.0);
            let mz = mphi / 2;
            let mut pts = Vec::with_capacity(mphi * mz);
            for i in 0..mz {
                let z = -1.0 + (2.0 * i as f64 + 1.0) / mz as f64;
                let rho = (1.0 - z * z).sqrt();
                for j in 0..mphi {
                    let p = 2.0 * PI * (j as f64 + 0.5) / mphi as f64;
                    pts.push(vec![r * rho * p.cos(), r * rho * p.sin(), r * z]);
                }
            }
            Ok(pts)
        }
        (Shell::Sphere, d) => Err(Error::Domain(format!("sphere surrogate implemented for d <= 3, got {d}"))),
    }
}

/// Tent deposit of any shell, without the resolvability check.
pub fn discretize_shell(shell: Shell, r: f64, geom: Geometry, width: f64) -> Result<GridField> {
    if !(width >= 1.0) {
        return Err(Error::Config(format!("shell width must be at least one cell, got {width}")));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let h = geom.spacing();
    let d = geom.dim;
    let n = geom.cells as i64;
    let pts = shell_points(shell, r, d, h)?;
    let reach = width.ceil() as i64;
    let span = (2 * reach + 1) as usize;
    let mut acc = vec![0.0; geom.len()];
    let mut w1 = vec![vec![0.0; span]; d];
    let mut idx = vec![0usize; d];
    for p in &pts {
        let base: Vec<i64> = p.iter().map(|x| (x / h).round() as i64).collect();
        for k in 0..d {
            let mut tot = 0.0;
            for (o, w) in w1[k].iter_mut().enumerate() {
                let j = base[k] - reach + o as i64;
                *w = (1.0 - (j as f64 - p[k] / h).abs() / width).max(0.0);
                tot += *w;
            }
            w1[k].iter_mut().for_each(|w| *w /= tot);
        }
        for c in 0..span.pow(d as u32) {
            let mut rem = c;
            let mut w = 1.0;
            for k in (0..d).rev() {
                let o = rem % span;
                rem /= span;
                w *= w1[k][o];
                idx[k] = (base[k] - reach + o as i64).rem_euclid(n) as usize;
            }
            if w > 0.0 {
                acc[geom.ravel(&idx)] += w;
            }
        }
    }
    let f = GridField::from_values(geom, acc)?;
    let mass = f.integral();
    if mass == 0.0 {
        return Err(Error::Config(format!("shell of radius {r} deposits no mass")));
    }
    Ok(f.scale(1.0 / mass))
}

/// Field whose spectrum is exactly `σ̂(rξ)·ĝ(sξ)` at the grid frequencies.
pub fn smoothed_sphere_field(dim: usize, r: f64, s: f64, geom: Geometry) -> Result<GridField> {
    if geom.dim != dim {
        return Err(Error::Dimension(format!("grid of dimension {} for a sphere in {dim}", geom.dim)));
    }
    smoothed_shell_field(Shell::Sphere, r, s, geom)
}

/// Spectral construction for any shell; `s = 0` gives the unsmoothed spectral surrogate.
pub fn smoothed_shell_field(shell: Shell, r: f64, s: f64, geom: Geometry) -> Result<GridField> {
    shell_fourier(shell, r, &vec![0.0; geom.dim])?;
    let spec = SpectrumField::from_fn(geom, |xi| {
        let v = shell_fourier(shell, r, xi).unwrap_or(0.0);
        Complex64::new(v, 0.0) * kernel_spectrum(KernelKind::Gauss, s, xi)
    });
    Ok(spec.inverse())
}

/// Surrogate field for a shell of radius `r`, optionally smoothed at scale `s`.
pub fn shell_field(shell: Shell, r: f64, s: f64, surrogate: Surrogate, geom: Geometry) -> Result<GridField> {
    match surrogate {
        Surrogate::Spectral => smoothed_shell_field(shell, r, s, geom),
        Surrogate::Annulus { width } => {
            let a = discretize_shell(shell, r, geom, width)?;
            if s > 0.0 {
                Ok(crate::grid::convolve_spectral(&a, |xi| kernel_spectrum(KernelKind::Gauss, s, xi).re))
            } else {
                Ok(a)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::convolve_spectral;

    fn angular_quadrature(rho: f64, nodes: usize) -> f64 {
        // (1/2π) ∫ cos(2π ρ cos θ) dθ, periodic trapezoid
        (0..nodes)
            .map(|i| (2.0 * PI * rho * (2.0 * PI * i as f64 / nodes as f64).cos()).cos())
            .sum::<f64>()
            / nodes as f64
    }

    #[test]
    fn closed_forms() {
        assert_eq!(sphere_fourier(2, 1.0, &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(sphere_fourier(3, 1.0, &[0.0, 0.0, 0.0]).unwrap(), 1.0);
        assert!(sphere_fourier(3, 1.0, &[0.5, 0.0, 0.0]).unwrap().abs() < 1e-15);
        let q = angular_quadrature(1.0, 10_000);
        assert!((sphere_fourier(2, 1.0, &[0.6, 0.8]).unwrap() - q).abs() < 1e-8);
        assert!(sphere_fourier(4, 1.0, &[0.0; 4]).is_err());
    }

    #[test]
    fn real_even_bounded() {
        for i in 0..200 {
            let x = i as f64 * 0.173;
            for d in [2, 3] {
                let a = sphere_fourier_radial(d, x).unwrap();
                assert!(a.abs() <= 1.0);
                let mut xi = vec![0.0; d];
                xi[0] = x;
                let b = sphere_fourier(d, 1.0, &xi).unwrap();
                xi[0] = -x;
                assert_eq!(b, sphere_fourier(d, 1.0, &xi).unwrap());
            }
        }
    }

    #[test]
    fn decay() {
        for d in [2, 3] {
            let m1 = decay_margin_uniform(d, 1e3, 100_001).unwrap();
            let m2 = decay_margin_uniform(d, 1e3, 200_001).unwrap();
            assert!(m1 < 2.0 && ((m1 - m2) / m2).abs() < 0.01);
        }
        let near: Vec<f64> = (0..100).map(|i| i as f64 * 0.01).collect();
        assert!(decay_margin(2, &near).unwrap() <= 1.0);
    }

    #[test]
    fn annulus_matches_transform_at_low_frequency() {
        let g = Geometry::new(2, 1.0, 256).unwrap();
        let r = 0.2;
        let a = discretize_sphere(2, r, g, 1.0).unwrap();
        assert!((a.integral() - 1.0).abs() < 1e-12);
        let s = a.spectrum();
        let mut xi = vec![0.0; 2];
        let cut = 256.0 / 8.0;
        for (i, z) in s.values().iter().enumerate() {
            g.frequency(i, &mut xi);
            if norm(&xi) <= cut {
                let want = sphere_fourier(2, r, &xi).unwrap();
                assert!((z.re - want).abs() < 0.02, "xi={xi:?} {} vs {want}", z.re);
            }
        }
        assert!(discretize_sphere(2, 3.0 / 256.0, g, 1.0).is_err());
    }

    #[test]
    fn smoothed_annulus_matches_spectral_product() {
        let g = Geometry::new(2, 1.0, 256).unwrap();
        let (r, t) = (0.2, 8.0 / 256.0);
        let a = discretize_sphere(2, r, g, 1.0).unwrap();
        let conv = convolve_spectral(&a, |xi| kernel_spectrum(KernelKind::Gauss, t, xi).re);
        let exact = smoothed_sphere_field(2, r, t, g).unwrap();
        assert!((exact.integral() - 1.0).abs() < 1e-10);
        let sup = exact.lp_norm(f64::INFINITY).unwrap();
        let err = conv.sub(&exact).unwrap().lp_norm(f64::INFINITY).unwrap();
        assert!(err < 0.01 * sup, "{err} vs {sup}");
    }

    #[test]
    fn axis_pair() {
        let g = Geometry::new(2, 4.0, 64).unwrap();
        let p = discretize_shell(Shell::AxisPair { axis: 0 }, 1.0, g, 1.0).unwrap();
        assert_eq!(p.values().iter().filter(|v| **v > 0.0).count(), 2);
        let q = discretize_shell(Shell::AxisPair { axis: 0 }, 1.03125, g, 1.0).unwrap();
        assert_eq!(q.values().iter().filter(|v| **v > 0.0).count(), 4);
        let v = shell_fourier(Shell::AxisPair { axis: 0 }, 1.0, &[0.25, 3.0]).unwrap();
        assert!(v.abs() < 1e-15);
    }
}
