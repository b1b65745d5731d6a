//! Periodic sampled fields on `[0,R)^d` tori.

mod fft;
mod io;

pub use fft::{fft_nd, Direction, FftPlan};
pub use io::{read_binary, read_json, write_binary, write_json};

use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Shape of a periodic grid: dimension, side length and cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub dim: usize,
    pub side: f64,
    pub cells: usize,
}

impl Geometry {
    pub fn new(dim: usize, side: f64, cells: usize) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::Config(format!("dimension {dim} outside 1..=4")));
        }
        if cells < 4 || !cells.is_power_of_two() {
            return Err(Error::Config(format!(
                "cells per axis must be a power of two >= 4, got {cells}"
            )));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::Config(format!("side must be positive, got {side}")));
        }
        Ok(Geometry { dim, side, cells })
    }

    /// Cell width `R/N`.
    pub fn spacing(&self) -> f64 {
        self.side / self.cells as f64
    }

    /// Volume of one cell, `(R/N)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major multi-index of flat index `i` (last axis fastest).
    pub fn unravel(&self, mut i: usize, out: &mut [usize]) {
        for k in (0..self.dim).rev() {
            out[k] = i % self.cells;
            i /= self.cells;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.cells + j)
    }

    /// Signed integer offset in `(-N/2, N/2]` for index `j`.
    pub fn signed(&self, j: usize) -> i64 {
        let n = self.cells as i64;
        let j = j as i64;
        if j > n / 2 {
            j - n
        } else {
            j
        }
    }

    /// Cell centre `(i + 1/2)·h` along each axis.
    pub fn center(&self, i: usize, out: &mut [f64]) {
        let h = self.spacing();
        let mut idx = vec![0; self.dim];
        self.unravel(i, &mut idx);
        for (o, j) in out.iter_mut().zip(idx) {
            *o = (j as f64 + 0.5) * h;
        }
    }

    /// Minimal-image displacement of index `i` from the origin cell.
    pub fn displacement(&self, i: usize, out: &mut [f64]) {
        let h = self.spacing();
        let mut idx = vec![0; self.dim];
        self.unravel(i, &mut idx);
        for (o, j) in out.iter_mut().zip(idx) {
            *o = self.signed(j) as f64 * h;
        }
    }

    /// Signed frequency `k/R` of index `i` along each axis.
    pub fn frequency(&self, i: usize, out: &mut [f64]) {
        let mut idx = vec![0; self.dim];
        self.unravel(i, &mut idx);
        for (o, j) in out.iter_mut().zip(idx) {
            *o = self.signed(j) as f64 / self.side;
        }
    }

    pub fn check_same(&self, other: &Geometry) -> Result<()> {
        if self != other {
            return Err(Error::Dimension(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Real field sampled on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    geom: Geometry,
    values: Vec<f64>,
}

impl GridField {
    pub fn from_values(geom: Geometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geom.len() {
            return Err(Error::Dimension(format!(
                "expected {} values, got {}",
                geom.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at index {i}")));
        }
        Ok(GridField { geom, values })
    }

    pub fn zeros(geom: Geometry) -> Self {
        GridField { geom, values: vec![0.0; geom.len()] }
    }

    pub fn constant(geom: Geometry, c: f64) -> Self {
        GridField { geom, values: vec![c; geom.len()] }
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(geom: Geometry, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        let values = crate::exec::map_indexed(geom.len(), |i| {
            let mut x = vec![0.0; geom.dim];
            geom.center(i, &mut x);
            f(&x)
        });
        GridField { geom, values }
    }

    /// Samples `f` at the minimal-image displacement of every cell from the origin.
    ///
    /// This is the layout convolution kernels use: index 0 holds `f(0)`.
    pub fn from_displacement_fn(geom: Geometry, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        let values = crate::exec::map_indexed(geom.len(), |i| {
            let mut x = vec![0.0; geom.dim];
            geom.displacement(i, &mut x);
            f(&x)
        });
        GridField { geom, values }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Average value, i.e. the density for indicator fields.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Integral over the torus.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.geom.cell_volume()
    }

    /// `L^p` norm with continuum normalization. Use `f64::INFINITY` for the sup norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("p must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        Ok((s * self.geom.cell_volume()).powf(1.0 / p))
    }

    /// `∫ f g` over the torus.
    pub fn inner(&self, other: &GridField) -> Result<f64> {
        self.geom.check_same(&other.geom)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s * self.geom.cell_volume())
    }

    pub fn is_indicator(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    pub fn scale(&self, c: f64) -> GridField {
        GridField { geom: self.geom, values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn add(&self, other: &GridField) -> Result<GridField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridField) -> Result<GridField> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<GridField> {
        self.geom.check_same(&other.geom)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridField { geom: self.geom, values })
    }

    /// Circular shift by an integer number of cells per axis: `out(x) = f(x - shift)`.
    pub fn roll(&self, shift: &[i64]) -> GridField {
        let g = self.geom;
        let n = g.cells as i64;
        let mut out = vec![0.0; g.len()];
        let mut idx = vec![0; g.dim];
        for (i, &v) in self.values.iter().enumerate() {
            g.unravel(i, &mut idx);
            for (j, s) in idx.iter_mut().zip(shift) {
                *j = (*j as i64 + s).rem_euclid(n) as usize;
            }
            out[g.ravel(&idx)] = v;
        }
        GridField { geom: g, values: out }
    }

    /// Forward transform with continuum normalization: `h^d · DFT(f)` at frequencies `k/R`.
    pub fn spectrum(&self) -> SpectrumField {
        let g = self.geom;
        let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_nd(&mut data, g.dim, g.cells, Direction::Forward);
        let w = g.cell_volume();
        for z in &mut data {
            *z *= w;
        }
        SpectrumField { geom: g, values: data }
    }
}

/// Fourier coefficients of a field, `F(ξ) ≈ ∫ f(x) e^{-2πi x·ξ} dx` at `ξ = k/R`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    geom: Geometry,
    values: Vec<Complex64>,
}

impl SpectrumField {
    pub fn from_values(geom: Geometry, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != geom.len() {
            return Err(Error::Dimension(format!(
                "expected {} coefficients, got {}",
                geom.len(),
                values.len()
            )));
        }
        Ok(SpectrumField { geom, values })
    }

    /// Evaluates a closed-form transform at every discrete frequency.
    pub fn from_fn(geom: Geometry, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Self {
        let values = crate::exec::map_indexed(geom.len(), |i| {
            let mut xi = vec![0.0; geom.dim];
            geom.frequency(i, &mut xi);
            f(&xi)
        });
        SpectrumField { geom, values }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn mul(&self, other: &SpectrumField) -> Result<SpectrumField> {
        self.geom.check_same(&other.geom)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(SpectrumField { geom: self.geom, values })
    }

    /// `(1/R^d) Σ |F|²`, equal to `‖f‖₂²` by Parseval.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.geom.volume()
    }

    /// Inverse transform; the imaginary part is discarded.
    pub fn inverse(&self) -> GridField {
        let g = self.geom;
        let mut data = self.values.clone();
        fft_nd(&mut data, g.dim, g.cells, Direction::Inverse);
        let w = 1.0 / g.volume();
        let values = data.iter().map(|z| z.re * w).collect();
        GridField { geom: g, values }
    }
}

/// Circular convolution `(f∗g)(x) = Σ_y f(y) g(x−y) h^d`, computed by FFT.
pub fn convolve(f: &GridField, g: &GridField) -> Result<GridField> {
    f.geom.check_same(&g.geom)?;
    Ok(f.spectrum().mul(&g.spectrum())?.inverse())
}

/// Convolution against a kernel given by its closed-form transform.
pub fn convolve_spectral(f: &GridField, kernel_hat: impl Fn(&[f64]) -> f64 + Sync) -> GridField {
    let mut s = f.spectrum();
    let g = s.geom;
    let mults = crate::exec::map_indexed(g.len(), |i| {
        let mut xi = vec![0.0; g.dim];
        g.frequency(i, &mut xi);
        kernel_hat(&xi)
    });
    for (z, m) in s.values.iter_mut().zip(mults) {
        *z *= m;
    }
    s.inverse()
}

/// Builds an indicator field: 1 on cells whose centre satisfies `pred`.
pub fn make_indicator(
    dim: usize,
    side: f64,
    cells: usize,
    pred: impl Fn(&[f64]) -> bool + Sync,
) -> Result<GridField> {
    let geom = Geometry::new(dim, side, cells)?;
    Ok(GridField::from_fn(geom, |x| if pred(x) { 1.0 } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(geom: Geometry, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..geom.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        GridField::from_values(geom, v).unwrap()
    }

    fn brute_convolve(f: &GridField, g: &GridField) -> GridField {
        let geom = *f.geometry();
        let n = geom.cells;
        let d = geom.dim;
        let mut out = vec![0.0; geom.len()];
        let (mut ix, mut iy, mut iz) = (vec![0; d], vec![0; d], vec![0; d]);
        for (x, slot) in out.iter_mut().enumerate() {
            geom.unravel(x, &mut ix);
            let mut s = 0.0;
            for y in 0..geom.len() {
                geom.unravel(y, &mut iy);
                for k in 0..d {
                    iz[k] = (ix[k] + n - iy[k]) % n;
                }
                s += f.values()[y] * g.values()[geom.ravel(&iz)];
            }
            *slot = s * geom.cell_volume();
        }
        GridField::from_values(geom, out).unwrap()
    }

    fn max_diff(a: &GridField, b: &GridField) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_bad_cells() {
        assert!(Geometry::new(2, 1.0, 6).is_err());
        assert!(Geometry::new(2, 1.0, 2).is_err());
        assert!(make_indicator(1, 1.0, 12, |_| true).is_err());
    }

    #[test]
    fn indicator_means() {
        assert_eq!(make_indicator(2, 3.0, 8, |_| true).unwrap().mean(), 1.0);
        assert_eq!(make_indicator(2, 3.0, 8, |_| false).unwrap().mean(), 0.0);
        let half = make_indicator(1, 1.0, 8, |x| x[0] < 0.5).unwrap();
        assert_eq!(half.mean(), 0.5);
        assert!(half.is_indicator());
    }

    #[test]
    fn mean_is_linear() {
        let g = Geometry::new(2, 2.0, 8).unwrap();
        let (f, h) = (random_field(g, 1), random_field(g, 2));
        let lhs = f.add(&h).unwrap().mean();
        assert!((lhs - f.mean() - h.mean()).abs() < 1e-14);
    }

    #[test]
    fn lp_norms() {
        let f = make_indicator(2, 4.0, 16, |x| x[0] < 1.0).unwrap();
        let delta = f.mean();
        let n2 = f.lp_norm(2.0).unwrap();
        assert!((n2 - (delta * 16.0).sqrt()).abs() < 1e-12);
        let z = GridField::zeros(*f.geometry());
        assert_eq!(z.lp_norm(3.0).unwrap(), 0.0);
        assert!(f.lp_norm(0.5).is_err());
        let r = random_field(*f.geometry(), 3);
        let a = r.scale(3.0).lp_norm(1.5).unwrap();
        assert!((a - 3.0 * r.lp_norm(1.5).unwrap()).abs() < 1e-12 * a);
        assert!(r.lp_norm(f64::INFINITY).unwrap() <= 1.0);
    }

    #[test]
    fn delta_is_identity() {
        let g = Geometry::new(2, 3.0, 8).unwrap();
        let f = random_field(g, 4);
        let mut d = GridField::zeros(g);
        d.values_mut()[0] = 1.0 / g.cell_volume();
        let c = convolve(&f, &d).unwrap();
        assert!(max_diff(&c, &f) < 1e-10);
    }

    #[test]
    fn convolve_matches_brute_force() {
        for (dim, n) in [(1, 4), (1, 8), (2, 4), (2, 8)] {
            let g = Geometry::new(dim, 1.7, n).unwrap();
            let f = random_field(g, 10 + n as u64);
            let h = random_field(g, 20 + n as u64);
            let fast = convolve(&f, &h).unwrap();
            let slow = brute_convolve(&f, &h);
            assert!(max_diff(&fast, &slow) < 1e-12, "d={dim} n={n}");
        }
    }

    #[test]
    fn convolution_mean_factorizes() {
        let g = Geometry::new(2, 2.5, 16).unwrap();
        let (f, h) = (random_field(g, 5), random_field(g, 6));
        let c = convolve(&f, &h).unwrap();
        let want = f.mean() * h.mean() * g.volume();
        assert!((c.mean() - want).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch() {
        let a = GridField::zeros(Geometry::new(2, 1.0, 8).unwrap());
        let b = GridField::zeros(Geometry::new(2, 1.0, 16).unwrap());
        assert!(matches!(convolve(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn round_trip() {
        let g = Geometry::new(3, 1.3, 8).unwrap();
        let f = random_field(g, 7);
        let back = f.spectrum().inverse();
        assert!(max_diff(&f, &back) < 1e-12);
    }

    #[test]
    fn roll_shifts() {
        let g = Geometry::new(1, 1.0, 8).unwrap();
        let f = GridField::from_values(g, (0..8).map(|i| i as f64).collect()).unwrap();
        assert_eq!(f.roll(&[1]).values()[1], 0.0);
        assert_eq!(f.roll(&[-1]).values()[7], 0.0);
    }
}
