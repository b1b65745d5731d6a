use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Projection coefficients of each direction onto the span of its predecessors.
///
/// `beta[k]` expresses the projection of `u_k` onto `span(u_0..u_{k-1})` and
/// `dist[k]` is the distance from `u_k` to that span (`dist[0] = |u_0|`).
#[derive(Debug, Clone, PartialEq)]
pub struct GramData {
    pub beta: Vec<Vec<f64>>,
    pub dist: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl GramData {
    pub fn from_directions(dirs: &[Vec<f64>]) -> Result<Self> {
        let mut beta = Vec::with_capacity(dirs.len());
        let mut dist = Vec::with_capacity(dirs.len());
        for k in 0..dirs.len() {
            let g = DMatrix::from_fn(k, k, |i, j| dot(&dirs[i], &dirs[j]));
            let rhs = DVector::from_fn(k, |i, _| dot(&dirs[i], &dirs[k]));
            let b: Vec<f64> = if k == 0 {
                Vec::new()
            } else {
                g.lu()
                    .solve(&rhs)
                    .ok_or_else(|| Error::Degenerate(format!("directions 0..{k} are dependent")))?
                    .iter()
                    .copied()
                    .collect()
            };
            let mut res = dirs[k].clone();
            for (i, bi) in b.iter().enumerate() {
                for (r, u) in res.iter_mut().zip(&dirs[i]) {
                    *r -= bi * u;
                }
            }
            let dk = dot(&res, &res).sqrt();
            if dk < 1e-12 {
                return Err(Error::Degenerate(format!("direction {k} lies in the span of its predecessors")));
            }
            beta.push(b);
            dist.push(dk);
        }
        Ok(GramData { beta, dist })
    }
}

/// Unit-mass measure on the sphere of radius `radius` centred at
/// `Σ β_i y_i/|y_i|` inside the affine plane orthogonal to every `y_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsphereMeasure {
    dim: usize,
    constraints: Vec<Vec<f64>>,
    center: Vec<f64>,
    radius: f64,
    /// orthonormal basis of span(y_i)
    basis: Vec<Vec<f64>>,
}

impl SubsphereMeasure {
    pub fn new(constraints: Vec<Vec<f64>>, beta: &[f64], radius: f64, dim: usize) -> Result<Self> {
        if beta.len() != constraints.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} constraints",
                beta.len(),
                constraints.len()
            )));
        }
        if constraints.len() >= dim {
            return Err(Error::Degenerate("constraints leave no room for a sphere".into()));
        }
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut center = vec![0.0; dim];
        for (y, b) in constraints.iter().zip(beta) {
            if y.len() != dim {
                return Err(Error::Dimension(format!("constraint of length {} in dimension {dim}", y.len())));
            }
            let n = dot(y, y).sqrt();
            let mut v = y.clone();
            for e in &basis {
                let c = dot(&v, e);
                v.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
            }
            let r = dot(&v, &v).sqrt();
            if n == 0.0 || r < 1e-12 * n {
                return Err(Error::Degenerate("constraint vectors are linearly dependent".into()));
            }
            v.iter_mut().for_each(|a| *a /= r);
            basis.push(v);
            center.iter_mut().zip(y).for_each(|(c, yi)| *c += b * yi / n);
        }
        Ok(SubsphereMeasure { dim, constraints, center, radius, basis })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn constraints(&self) -> &[Vec<f64>] {
        &self.constraints
    }

    /// Uniform point: Gaussian vector projected onto the orthogonal complement, rescaled.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let mut v: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(rng)).collect();
            for e in &self.basis {
                let c = dot(&v, e);
                v.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
            }
            let n = dot(&v, &v).sqrt();
            if n > 1e-12 {
                return v.iter().zip(&self.center).map(|(a, c)| c + self.radius * a / n).collect();
            }
        }
    }
}
