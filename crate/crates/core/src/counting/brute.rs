//! Direct nested sums over every grid configuration. Cost grows like `M^{#points}`;
//! meant for grids with at most 8×8 cells per plane.

use super::TreeSpec;
use crate::error::{Error, Result};
use crate::grid::{Geometry, GridField};

/// Plane displacement index of `a − b`.
fn diff_index(plane: &Geometry, a: usize, b: usize) -> usize {
    let n = plane.cells;
    let (ai, aj) = (a / n, a % n);
    let (bi, bj) = (b / n, b % n);
    ((ai + n - bi) % n) * n + (aj + n - bj) % n
}

/// `h^{4n} Σ F(x) Π_k K_k(x_k⁰ − x_k¹)` over all `x`.
pub fn box_form(f: &GridField, kernels: &[GridField]) -> Result<f64> {
    let g = f.geometry();
    let plane = Geometry::new(2, g.side, g.cells)?;
    let m = plane.len();
    let h2 = plane.cell_volume();
    let v = f.values();
    match kernels.len() {
        1 => {
            let k = kernels[0].values();
            let mut s = 0.0;
            for a in 0..m {
                for b in 0..m {
                    s += v[a] * v[b] * k[diff_index(&plane, a, b)];
                }
            }
            Ok(s * h2 * h2)
        }
        2 => {
            let (k1, k2) = (kernels[0].values(), kernels[1].values());
            let mut s = 0.0;
            for a0 in 0..m {
                for a1 in 0..m {
                    let w1 = k1[diff_index(&plane, a0, a1)];
                    if w1 == 0.0 {
                        continue;
                    }
                    for b0 in 0..m {
                        let p = v[a0 * m + b0] * v[a1 * m + b0];
                        if p == 0.0 {
                            continue;
                        }
                        for b1 in 0..m {
                            s += w1 * p * v[a0 * m + b1] * v[a1 * m + b1] * k2[diff_index(&plane, b0, b1)];
                        }
                    }
                }
            }
            Ok(s * h2.powi(4))
        }
        n => Err(Error::Config(format!("box forms support n in {{1,2}}, got {n}"))),
    }
}

/// `h^{2|V|} Σ Π_k K_k(x_{u(k)} − x_{v(k)}) Π_v f(x_v)` over all vertex placements.
pub fn tree_form(f: &GridField, spec: &TreeSpec, kernels: &[GridField]) -> Result<f64> {
    let plane = *f.geometry();
    let m = plane.len();
    let nv = spec.vertices;
    let v = f.values();
    let mut pos = vec![0usize; nv];
    let mut s = 0.0;
    loop {
        let mut p: f64 = pos.iter().map(|&x| v[x]).product();
        if p != 0.0 {
            for (k, &(a, b)) in spec.edges.iter().enumerate() {
                p *= kernels[k].values()[diff_index(&plane, pos[a], pos[b])];
            }
            s += p;
        }
        let mut i = 0;
        loop {
            if i == nv {
                return Ok(s * plane.cell_volume().powi(nv as i32));
            }
            pos[i] += 1;
            if pos[i] < m {
                break;
            }
            pos[i] = 0;
            i += 1;
        }
    }
}
