use super::{factor_kernel, plane_of, AnisotropyParams, EvalOptions};
use crate::error::{Checked, Error, Result};
use crate::grid::{GridField, SpectrumField};
use crate::spherical::Shell;
use serde::{Deserialize, Serialize};

/// A distance tree in the plane: edge `k` joins `edges[k].0` to `edges[k].1`
/// at length `λ^{a_k} b_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub params: AnisotropyParams,
    pub root: usize,
}

impl TreeSpec {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>, params: AnisotropyParams, root: usize) -> Result<Self> {
        if edges.len() + 1 != vertices {
            return Err(Error::Config(format!("a tree on {vertices} vertices has {} edges, got {}", vertices.saturating_sub(1), edges.len())));
        }
        if params.len() != edges.len() {
            return Err(Error::Config("one dilation law per edge required".into()));
        }
        if root >= vertices || edges.iter().any(|&(u, v)| u >= vertices || v >= vertices || u == v) {
            return Err(Error::Config("vertex index out of range or self-loop".into()));
        }
        let spec = TreeSpec { vertices, edges, params, root };
        if spec.order().len() != vertices {
            return Err(Error::Config("edges do not form a connected tree".into()));
        }
        Ok(spec)
    }

    /// Path `0 - 1 - … - n` rooted at vertex 0.
    pub fn path(params: AnisotropyParams) -> Result<Self> {
        let n = params.len();
        Self::new(n + 1, (0..n).map(|k| (k, k + 1)).collect(), params, 0)
    }

    /// Star with centre 0 and leaves `1..=n`, rooted at the centre.
    pub fn star(params: AnisotropyParams) -> Result<Self> {
        let n = params.len();
        Self::new(n + 1, (0..n).map(|k| (0, k + 1)).collect(), params, 0)
    }

    pub fn rerooted(&self, root: usize) -> Result<Self> {
        Self::new(self.vertices, self.edges.clone(), self.params.clone(), root)
    }

    /// Vertices in breadth-first order from the root, with (parent, edge) links.
    fn order(&self) -> Vec<(usize, Option<(usize, usize)>)> {
        let mut seen = vec![false; self.vertices];
        let mut out = vec![(self.root, None)];
        seen[self.root] = true;
        let mut i = 0;
        while i < out.len() {
            let v = out[i].0;
            for (k, &(a, b)) in self.edges.iter().enumerate() {
                let w = if a == v { b } else if b == v { a } else { continue };
                if !seen[w] {
                    seen[w] = true;
                    out.push((w, Some((v, k))));
                }
            }
            i += 1;
        }
        out
    }

    /// Largest total edge length along any path at scale `λ`.
    pub fn diameter(&self, lambda: f64) -> f64 {
        let mut best = 0.0f64;
        for start in 0..self.vertices {
            let mut dist = vec![f64::NAN; self.vertices];
            dist[start] = 0.0;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for (k, &(a, b)) in self.edges.iter().enumerate() {
                    let w = if a == v { b } else if b == v { a } else { continue };
                    if dist[w].is_nan() {
                        dist[w] = dist[v] + self.params.scale(k, lambda);
                        best = best.max(dist[w]);
                        stack.push(w);
                    }
                }
            }
        }
        best
    }
}

/// `N^ε_λ(f)` for a distance tree with the default surrogate.
pub fn count_tree(f: &GridField, spec: &TreeSpec, lambda: f64, eps: f64) -> Result<Checked<f64>> {
    count_tree_with(f, spec, lambda, eps, &EvalOptions::default())
}

pub fn count_tree_with(
    f: &GridField,
    spec: &TreeSpec,
    lambda: f64,
    eps: f64,
    opts: &EvalOptions,
) -> Result<Checked<f64>> {
    let plane = plane_of(f.geometry())?;
    if f.geometry().dim != 2 {
        return Err(Error::Dimension("tree forms live on a planar grid".into()));
    }
    let mut warnings = Vec::new();
    let mut kernels = Vec::with_capacity(spec.edges.len());
    for k in 0..spec.edges.len() {
        let c = factor_kernel(Shell::Sphere, spec.params.law(k), lambda, eps, opts.surrogate, plane)?;
        warnings.extend(c.warnings);
        kernels.push(c.value);
    }
    Ok(Checked { value: tree_form_with_kernels(f, spec, &kernels)?, warnings })
}

/// `∫ Π_k K_k(x_{u(k)} − x_{v(k)}) Π_v f(x_v) dx` by folding the tree towards its root:
/// `A_v = f · Π_children (A_c ∗ K_e)`, answer `∫ A_root`.
pub fn tree_form_with_kernels(f: &GridField, spec: &TreeSpec, kernels: &[GridField]) -> Result<f64> {
    if kernels.len() != spec.edges.len() {
        return Err(Error::Dimension("one kernel per edge required".into()));
    }
    for k in kernels {
        f.geometry().check_same(k.geometry())?;
    }
    let spectra: Vec<SpectrumField> = kernels.iter().map(|k| k.spectrum()).collect();
    let order = spec.order();
    let mut acc: Vec<Option<GridField>> = vec![None; spec.vertices];
    for &(v, link) in order.iter().rev() {
        let a = acc[v].take().unwrap_or_else(|| f.clone());
        match link {
            None => return Ok(a.integral()),
            Some((parent, k)) => {
                let mut s = a.spectrum();
                // edge (u,v) weighs x_u − x_v; folding child c into parent p needs K(x_p − x_c)
                // when p = u and K(x_c − x_p) = K̃(x_p − x_c) otherwise
                let forward = spec.edges[k].0 == parent;
                for (z, kz) in s.values_mut().iter_mut().zip(spectra[k].values()) {
                    *z *= if forward { *kz } else { kz.conj() };
                }
                let folded = s.inverse();
                let base = acc[parent].take().unwrap_or_else(|| f.clone());
                acc[parent] = Some(base.mul(&folded)?);
            }
        }
    }
    unreachable!("root is always visited")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Geometry;

    #[test]
    fn rejects_non_trees() {
        let p = AnisotropyParams::isotropic(2);
        assert!(TreeSpec::new(3, vec![(0, 1), (0, 1)], p.clone(), 0).is_err());
        assert!(TreeSpec::new(4, vec![(0, 1), (2, 3)], AnisotropyParams::isotropic(2), 0).is_err());
        assert!(TreeSpec::path(p).is_ok());
    }

    #[test]
    fn single_edge_full_set() {
        let g = Geometry::new(2, 8.0, 64).unwrap();
        let t = TreeSpec::path(AnisotropyParams::isotropic(1)).unwrap();
        let v = count_tree(&GridField::constant(g, 1.0), &t, 1.2, 0.3).unwrap().value;
        assert!((v - 64.0).abs() < 1e-8);
    }

    #[test]
    fn diameter_of_star() {
        let s = TreeSpec::star(AnisotropyParams::new(vec![1.0, 1.0, 2.0], vec![1.0, 2.0, 1.0]).unwrap()).unwrap();
        assert!((s.diameter(2.0) - 8.0).abs() < 1e-12);
    }
}
