//! Brute-force oracles shared by the integration tests. They work on explicit
//! lattice coordinates rather than flat indices.
#![allow(dead_code)]

use aniso::grid::{Geometry, GridField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_field(g: Geometry, seed: u64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridField::from_values(g, (0..g.len()).map(|_| rng.random::<f64>()).collect()).unwrap()
}

/// Every point of an `n × n` lattice as `(i, j)`.
fn lattice(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
}

/// Value of a displacement-layout kernel at `p − q`.
fn kernel_at(k: &GridField, n: usize, p: (usize, usize), q: (usize, usize)) -> f64 {
    let di = (p.0 as i64 - q.0 as i64).rem_euclid(n as i64) as usize;
    let dj = (p.1 as i64 - q.1 as i64).rem_euclid(n as i64) as usize;
    k.values()[di * n + dj]
}

/// `∫∫ f(x) f(y) K(x − y)` on a 2D grid.
pub fn box_one(f: &GridField, k: &GridField) -> f64 {
    let g = f.geometry();
    let n = g.cells;
    let pts = lattice(n);
    let at = |p: (usize, usize)| f.values()[p.0 * n + p.1];
    let mut s = 0.0;
    for &x in &pts {
        for &y in &pts {
            s += at(x) * at(y) * kernel_at(k, n, x, y);
        }
    }
    s * g.cell_volume().powi(2)
}

/// `∫ Π_{ω ∈ {0,1}²} f(x_{ω₁}, y_{ω₂}) K₁(x₀ − x₁) K₂(y₀ − y₁)` on a 4D grid
/// whose first two axes are the x plane and last two the y plane.
pub fn box_two(f: &GridField, k1: &GridField, k2: &GridField) -> f64 {
    let g = f.geometry();
    let n = g.cells;
    let pts = lattice(n);
    let at = |x: (usize, usize), y: (usize, usize)| f.values()[((x.0 * n + x.1) * n + y.0) * n + y.1];
    let mut s = 0.0;
    for &x0 in &pts {
        for &x1 in &pts {
            let w = kernel_at(k1, n, x0, x1);
            for &y0 in &pts {
                for &y1 in &pts {
                    s += w * kernel_at(k2, n, y0, y1) * at(x0, y0) * at(x1, y0) * at(x0, y1) * at(x1, y1);
                }
            }
        }
    }
    s * (g.spacing().powi(2)).powi(4)
}

/// `∫ Π_v f(x_v) Π_k K_k(x_{u_k} − x_{v_k})` over placements of a tree's vertices.
pub fn tree(f: &GridField, edges: &[(usize, usize)], kernels: &[GridField]) -> f64 {
    let g = f.geometry();
    let n = g.cells;
    let pts = lattice(n);
    let vertices = edges.len() + 1;
    let mut place = vec![(0, 0); vertices];
    fn walk(
        v: usize,
        place: &mut Vec<(usize, usize)>,
        pts: &[(usize, usize)],
        f: &GridField,
        n: usize,
        edges: &[(usize, usize)],
        kernels: &[GridField],
    ) -> f64 {
        if v == place.len() {
            let mut p: f64 = place.iter().map(|x| f.values()[x.0 * n + x.1]).product();
            for (k, &(a, b)) in edges.iter().enumerate() {
                p *= kernel_at(&kernels[k], n, place[a], place[b]);
            }
            return p;
        }
        let mut s = 0.0;
        for &x in pts {
            place[v] = x;
            s += walk(v + 1, place, pts, f, n, edges, kernels);
        }
        s
    }
    walk(0, &mut place, &pts, f, n, edges, kernels) * g.cell_volume().powi(vertices as i32)
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// `J₀(x) = (1/π)∫₀^π cos(x sin θ) dθ`, trapezoid rule on the periodic integrand.
pub fn bessel_j0(x: f64) -> f64 {
    let n = 2000;
    let h = std::f64::consts::PI / n as f64;
    let s: f64 = (0..n).map(|k| (x * (k as f64 * h).sin()).cos()).sum();
    s / n as f64
}

/// Block average of a field on dyadic cubes with `2^m` cubes per side, by direct sums.
pub fn block_average(f: &GridField, m: usize) -> Vec<f64> {
    let g = f.geometry();
    let side = g.cells >> m;
    let mut idx = vec![0usize; g.dim];
    let mut out = vec![0.0; g.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        g.unravel(i, &mut idx);
        let corner: Vec<usize> = idx.iter().map(|c| c / side * side).collect();
        let count = side.pow(g.dim as u32);
        let mut s = 0.0;
        let mut off = vec![0usize; g.dim];
        for o in 0..count {
            let mut r = o;
            for d in (0..g.dim).rev() {
                off[d] = corner[d] + r % side;
                r /= side;
            }
            s += f.values()[g.ravel(&off)];
        }
        *slot = s / count as f64;
    }
    out
}
