use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// A proper rotation of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    m: DMatrix<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        Rotation { m: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.m[(i, j)] * v[j]).sum()).collect()
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }
}

/// Haar-distributed rotations from a seeded stream.
#[derive(Debug, Clone)]
pub struct RotationSampler {
    dim: usize,
    rng: ChaCha8Rng,
}

impl RotationSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        RotationSampler { dim, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Orthonormalizes a Gaussian matrix, fixes the signs of the QR factor
    /// and flips one column if needed to land in SO(d).
    pub fn sample(&mut self) -> Rotation {
        let d = self.dim;
        let g = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut self.rng));
        let qr = g.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for j in 0..d {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        Rotation { m: q }
    }
}
