use super::{factor_kernel, plane_of, AnisotropyParams, EvalOptions};
use crate::error::{Checked, Error, Result};
use crate::exec;
use crate::grid::{Direction, FftPlan, Geometry, GridField};
use crate::spherical::Shell;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Boxes with one side in each of `n ∈ {1,2}` coordinate planes of `(R²)ⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub params: AnisotropyParams,
    /// Measure each side is drawn from; circles unless overridden.
    pub shells: Vec<Shell>,
}

impl BoxSpec {
    pub fn new(params: AnisotropyParams) -> Result<Self> {
        let shells = vec![Shell::Sphere; params.len()];
        Self::with_shells(params, shells)
    }

    pub fn with_shells(params: AnisotropyParams, shells: Vec<Shell>) -> Result<Self> {
        if !(1..=2).contains(&params.len()) {
            return Err(Error::Config(format!("box forms support n in {{1,2}}, got {}", params.len())));
        }
        if shells.len() != params.len() {
            return Err(Error::Config("one shell per plane required".into()));
        }
        Ok(BoxSpec { params, shells })
    }

    pub fn n(&self) -> usize {
        self.params.len()
    }

    /// Planes swapped together with their parameters.
    pub fn swapped(&self) -> BoxSpec {
        let mut s = self.clone();
        s.params.exponents.reverse();
        s.params.coefficients.reverse();
        s.shells.reverse();
        s
    }
}

fn check_box_grid(f: &GridField, n: usize) -> Result<()> {
    if f.geometry().dim != 2 * n {
        return Err(Error::Dimension(format!(
            "box form with n={n} needs a grid of dimension {}, got {}",
            2 * n,
            f.geometry().dim
        )));
    }
    Ok(())
}

/// `N^ε_λ(f)` for a box spec with the default surrogate and coverage.
pub fn count_boxes(f: &GridField, spec: &BoxSpec, lambda: f64, eps: f64) -> Result<Checked<f64>> {
    count_boxes_with(f, spec, lambda, eps, &EvalOptions::default())
}

pub fn count_boxes_with(
    f: &GridField,
    spec: &BoxSpec,
    lambda: f64,
    eps: f64,
    opts: &EvalOptions,
) -> Result<Checked<f64>> {
    check_box_grid(f, spec.n())?;
    let plane = plane_of(f.geometry())?;
    let mut warnings = Vec::new();
    let mut kernels = Vec::with_capacity(spec.n());
    for k in 0..spec.n() {
        let c = factor_kernel(spec.shells[k], spec.params.law(k), lambda, eps, opts.surrogate, plane)?;
        warnings.extend(c.warnings);
        kernels.push(c.value);
    }
    Ok(Checked { value: box_form_with_kernels(f, &kernels, opts.coverage)?, warnings })
}

/// `∫ F(x) Π_k K_k(x_k⁰ − x_k¹) dx` for explicit plane kernels (displacement layout).
pub fn box_form_with_kernels(f: &GridField, kernels: &[GridField], coverage: f64) -> Result<f64> {
    check_box_grid(f, kernels.len())?;
    let plane = plane_of(f.geometry())?;
    for k in kernels {
        plane.check_same(k.geometry())?;
    }
    match kernels.len() {
        1 => {
            let fs = f.spectrum();
            let ks = kernels[0].spectrum();
            let s: f64 = fs.values().iter().zip(ks.values()).map(|(a, b)| a.norm_sqr() * b.re).sum();
            Ok(s / plane.volume())
        }
        2 => {
            let rows = coverage_rows(&kernels[0], coverage);
            let slices = BoxSlices::compute(f, rows)?;
            Ok(slices.pair(&kernels[0], &kernels[1].spectrum().values().iter().map(|z| z.re).collect::<Vec<_>>()))
        }
        n => Err(Error::Config(format!("box forms support n in {{1,2}}, got {n}"))),
    }
}

/// Displacements carrying at least `coverage` of the kernel's absolute mass, ascending.
pub fn coverage_rows(kernel: &GridField, coverage: f64) -> Vec<usize> {
    let v = kernel.values();
    if coverage >= 1.0 {
        return (0..v.len()).collect();
    }
    let total: f64 = v.iter().map(|x| x.abs()).sum();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[j].abs().total_cmp(&v[i].abs()).then(i.cmp(&j)));
    let mut acc = 0.0;
    let mut keep = Vec::new();
    for i in order {
        if acc >= coverage * total {
            break;
        }
        acc += v[i].abs();
        keep.push(i);
    }
    keep.sort_unstable();
    keep
}

/// Slice spectra of the two-plane box integrand.
///
/// For each first-plane displacement `D` in `rows`,
/// `Ψ(D, ξ) = Σ_{x} |DFT_y[f(x, y) f(x − D, y)](ξ)|²`,
/// from which any pair of plane kernels is paired in `O(|rows|·M)`.
#[derive(Debug, Clone)]
pub struct BoxSlices {
    plane: Geometry,
    rows: Vec<usize>,
    psi: Vec<f64>,
}

impl BoxSlices {
    pub fn compute(f: &GridField, rows: Vec<usize>) -> Result<Self> {
        check_box_grid(f, 2)?;
        let plane = plane_of(f.geometry())?;
        let m = plane.len();
        let n = plane.cells;
        let plan = FftPlan::new(n);
        let vals = f.values();
        let parts = exec::map_indexed(rows.len(), |r| {
            let d = rows[r];
            let (di, dj) = (d / n, d % n);
            let mut acc = vec![0.0; m];
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            let mut scratch = Vec::new();
            for x0 in 0..m {
                let (p, q) = (x0 / n, x0 % n);
                let x1 = ((p + n - di) % n) * n + (q + n - dj) % n;
                let a = &vals[x0 * m..(x0 + 1) * m];
                let b = &vals[x1 * m..(x1 + 1) * m];
                if a.iter().all(|v| *v == 0.0) || b.iter().all(|v| *v == 0.0) {
                    continue;
                }
                for ((z, u), v) in buf.iter_mut().zip(a).zip(b) {
                    *z = Complex64::new(u * v, 0.0);
                }
                plan.run_serial(&mut buf, 2, Direction::Forward, &mut scratch);
                for (s, z) in acc.iter_mut().zip(&buf) {
                    *s += z.norm_sqr();
                }
            }
            acc
        });
        Ok(BoxSlices { plane, rows, psi: parts.concat() })
    }

    /// All first-plane displacements.
    pub fn full(f: &GridField) -> Result<Self> {
        let m = plane_of(f.geometry())?.len();
        Self::compute(f, (0..m).collect())
    }

    /// Slices with the roles of the two planes exchanged.
    pub fn transposed(f: &GridField) -> Result<Self> {
        Self::full(&swap_planes(f)?)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn plane(&self) -> &Geometry {
        &self.plane
    }

    /// `Ψ(rows[r], ·)`
    pub fn row(&self, r: usize) -> &[f64] {
        let m = self.plane.len();
        &self.psi[r * m..(r + 1) * m]
    }

    /// `Σ_ξ Ψ(rows[r], ξ) w(ξ)` for every row.
    pub fn row_pairings(&self, weights: &[f64]) -> Vec<f64> {
        exec::map_indexed(self.rows.len(), |r| self.row(r).iter().zip(weights).map(|(a, b)| a * b).sum())
    }

    /// `h^6/M Σ_D K₁(D) Σ_ξ Ψ(D, ξ) K̂₂(ξ)`, `K̂₂` the real part of the second kernel's spectrum.
    pub fn pair(&self, k1: &GridField, k2_hat: &[f64]) -> f64 {
        let h = self.plane.spacing();
        let m = self.plane.len() as f64;
        let inner = self.row_pairings(k2_hat);
        let k1v = k1.values();
        let s: f64 = self.rows.iter().zip(&inner).map(|(&d, v)| k1v[d] * v).sum();
        s * h.powi(6) / m
    }
}

/// `f'(y, x) = f(x, y)` on `(R²)²`.
pub fn swap_planes(f: &GridField) -> Result<GridField> {
    check_box_grid(f, 2)?;
    let m = plane_of(f.geometry())?.len();
    let v = f.values();
    let mut out = vec![0.0; v.len()];
    for a in 0..m {
        for b in 0..m {
            out[b * m + a] = v[a * m + b];
        }
    }
    GridField::from_values(*f.geometry(), out)
}
