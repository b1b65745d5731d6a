use super::{check_wraparound, AnisotropyParams};
use crate::error::{Checked, Error, Result, Warning};
use crate::exec;
use crate::grid::{convolve_spectral, Geometry, GridField};
use crate::kernels::{kernel_spectrum, KernelKind};
use crate::spherical::{GramData, RotationSampler, SubsphereMeasure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Simplex `{0, λ^{a_1}b_1 u_1, …, λ^{a_n}b_n u_n}` in `R^{n+1}`, `n ∈ {1,2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexSpec {
    pub directions: Vec<Vec<f64>>,
    pub params: AnisotropyParams,
}

impl SimplexSpec {
    /// Directions may be given in `R^n` (padded with a zero) or in `R^{n+1}`.
    pub fn new(directions: Vec<Vec<f64>>, params: AnisotropyParams) -> Result<Self> {
        let n = directions.len();
        if !(1..=2).contains(&n) {
            return Err(Error::Config(format!("simplex forms support n in {{1,2}}, got {n}")));
        }
        if params.len() != n {
            return Err(Error::Config("one dilation law per direction required".into()));
        }
        let mut dirs = Vec::with_capacity(n);
        for u in directions {
            let mut u = u;
            if u.len() == n {
                u.push(0.0);
            }
            if u.len() != n + 1 {
                return Err(Error::Dimension(format!("direction of length {} for n={n}", u.len())));
            }
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("directions must be unit vectors, got norm {norm}")));
            }
            dirs.push(u);
        }
        GramData::from_directions(&dirs)?;
        Ok(SimplexSpec { directions: dirs, params })
    }

    pub fn n(&self) -> usize {
        self.directions.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n() + 1
    }

    pub fn gram(&self) -> GramData {
        GramData::from_directions(&self.directions).expect("validated at construction")
    }

    /// Largest distance between two vertices at scale `λ`.
    pub fn diameter(&self, lambda: f64) -> f64 {
        let pts: Vec<Vec<f64>> = std::iter::once(vec![0.0; self.ambient_dim()])
            .chain(self.directions.iter().enumerate().map(|(k, u)| {
                let r = self.params.scale(k, lambda);
                u.iter().map(|v| r * v).collect()
            }))
            .collect();
        let mut best = 0.0f64;
        for a in &pts {
            for b in &pts {
                best = best.max(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt());
            }
        }
        best
    }
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    fn from_samples(v: &[f64]) -> Self {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        McEstimate { mean, stderr: (var / n).sqrt(), samples: v.len() }
    }
}

/// Multilinear-interpolation stencil for a shift of `shift` (in length units).
struct Stencil {
    /// per corner: per-axis strided index tables and the corner weight
    corners: Vec<(Vec<Vec<usize>>, f64)>,
}

impl Stencil {
    fn new(geom: &Geometry, shift: &[f64]) -> Self {
        let d = geom.dim;
        let n = geom.cells;
        let h = geom.spacing();
        let mut corners = Vec::with_capacity(1 << d);
        for c in 0..(1usize << d) {
            let mut w = 1.0;
            let mut tables = Vec::with_capacity(d);
            for (k, &dk) in shift.iter().enumerate().take(d) {
                let v = dk / h;
                let base = v.floor();
                let t = v - base;
                let bit = (c >> k) & 1;
                w *= if bit == 1 { t } else { 1.0 - t };
                let off = (base as i64 + bit as i64).rem_euclid(n as i64) as usize;
                let stride = n.pow((d - 1 - k) as u32);
                tables.push((0..n).map(|j| ((j + off) % n) * stride).collect());
            }
            if w != 0.0 {
                corners.push((tables, w));
            }
        }
        Stencil { corners }
    }

    fn eval(&self, field: &[f64], idx: &[usize]) -> f64 {
        self.corners
            .iter()
            .map(|(t, w)| w * field[t.iter().zip(idx).map(|(tab, &j)| tab[j]).sum::<usize>()])
            .sum()
    }
}

/// `h^d Σ_x f(x) Π_k f_k(x + y_k)` with interpolated shifts.
fn shifted_product(f: &GridField, factors: &[GridField], shifts: &[Vec<f64>]) -> f64 {
    let geom = *f.geometry();
    let stencils: Vec<Stencil> = shifts.iter().map(|s| Stencil::new(&geom, s)).collect();
    let mut idx = vec![0usize; geom.dim];
    let mut total = 0.0;
    for (i, &fv) in f.values().iter().enumerate() {
        if fv == 0.0 {
            continue;
        }
        geom.unravel(i, &mut idx);
        let mut p = fv;
        for (st, fk) in stencils.iter().zip(factors) {
            p *= st.eval(fk.values(), &idx);
            if p == 0.0 {
                break;
            }
        }
        total += p;
    }
    total * geom.cell_volume()
}

fn prepare(f: &GridField, spec: &SimplexSpec, lambda: f64, eps: f64, samples: usize) -> Result<Checked<Vec<GridField>>> {
    let geom = *f.geometry();
    if geom.dim != spec.ambient_dim() {
        return Err(Error::Dimension(format!(
            "simplex with n={} needs a grid of dimension {}, got {}",
            spec.n(),
            spec.ambient_dim(),
            geom.dim
        )));
    }
    if samples < 100 {
        return Err(Error::Config(format!("need at least 100 Monte Carlo samples, got {samples}")));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("smoothing level must lie in [0,1], got {eps}")));
    }
    let mut warnings = Vec::new();
    let mut factors = Vec::with_capacity(spec.n());
    for k in 0..spec.n() {
        check_wraparound("simplex edge", spec.params.scale(k, lambda), &geom)?;
        if eps == 0.0 {
            factors.push(f.clone());
        } else {
            let s = super::smoothing_scale(spec.params.law(k), lambda, eps);
            if s < 2.0 * geom.spacing() {
                warnings.push(Warning::UnderResolved { what: "smoothing", scale: s, spacing: geom.spacing() });
            }
            factors.push(convolve_spectral(f, |xi| kernel_spectrum(KernelKind::Gauss, s, xi).re));
        }
    }
    Ok(Checked { value: factors, warnings })
}

/// `N^ε_λ(f)` for a simplex, averaged over `samples` Haar rotations.
pub fn count_simplex_mc(
    f: &GridField,
    spec: &SimplexSpec,
    lambda: f64,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<Checked<McEstimate>> {
    let prep = prepare(f, spec, lambda, eps, samples)?;
    let factors = prep.value;
    let mut sampler = RotationSampler::new(spec.ambient_dim(), seed);
    let shifts: Vec<Vec<Vec<f64>>> = (0..samples)
        .map(|_| {
            let u = sampler.sample();
            spec.directions
                .iter()
                .enumerate()
                .map(|(k, dir)| {
                    let r = spec.params.scale(k, lambda);
                    u.apply(dir).into_iter().map(|v| r * v).collect()
                })
                .collect()
        })
        .collect();
    let values = exec::map_indexed(samples, |i| shifted_product(f, &factors, &shifts[i]));
    Ok(Checked { value: McEstimate::from_samples(&values), warnings: prep.warnings })
}

/// The same form through the nested representation: `y₁` uniform on the sphere
/// of radius `ρ₁`, then `y₂/ρ₂` uniform on the subsphere fixed by `y₁`.
pub fn nested_simplex_form(
    f: &GridField,
    spec: &SimplexSpec,
    lambda: f64,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<Checked<McEstimate>> {
    if spec.n() != 2 {
        return Err(Error::Config("nested representation implemented for n = 2 only".into()));
    }
    let prep = prepare(f, spec, lambda, eps, samples)?;
    let factors = prep.value;
    let gram = spec.gram();
    let (r1, r2) = (spec.params.scale(0, lambda), spec.params.scale(1, lambda));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shifts = Vec::with_capacity(samples);
    for _ in 0..samples {
        let v: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut rng)).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v: Vec<f64> = v.iter().map(|x| x / nv).collect();
        let sub = SubsphereMeasure::new(vec![v.clone()], &gram.beta[1], gram.dist[1], 3)?;
        let w = sub.sample(&mut rng);
        shifts.push(vec![v.iter().map(|x| r1 * x).collect(), w.iter().map(|x| r2 * x).collect::<Vec<f64>>()]);
    }
    let values = exec::map_indexed(samples, |i| shifted_product(f, &factors, &shifts[i]));
    Ok(Checked { value: McEstimate::from_samples(&values), warnings: prep.warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_set_is_exact() {
        let g = Geometry::new(3, 4.0, 16).unwrap();
        let spec = SimplexSpec::new(
            vec![vec![1.0, 0.0], vec![0.6, 0.8]],
            AnisotropyParams::new(vec![1.0, 2.0], vec![1.0, 0.5]).unwrap(),
        )
        .unwrap();
        let one = GridField::constant(g, 1.0);
        let e = count_simplex_mc(&one, &spec, 0.9, 0.0, 100, 1).unwrap().value;
        assert!((e.mean - 64.0).abs() < 1e-9 && e.stderr < 1e-9);
        let e = nested_simplex_form(&one, &spec, 0.9, 1.0, 100, 1).unwrap().value;
        assert!((e.mean - 64.0).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        let p = AnisotropyParams::isotropic(2);
        assert!(SimplexSpec::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]], p.clone()).is_err());
        assert!(SimplexSpec::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], p.clone()).is_err());
        let s = SimplexSpec::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], p).unwrap();
        let g = s.gram();
        assert!(g.beta[1][0].abs() < 1e-15 && (g.dist[1] - 1.0).abs() < 1e-15);
        let f = GridField::constant(Geometry::new(3, 4.0, 16).unwrap(), 1.0);
        assert!(count_simplex_mc(&f, &s, 0.5, 0.0, 99, 0).is_err());
        assert!(matches!(count_simplex_mc(&f, &s, 1.5, 0.0, 100, 0), Err(Error::Wraparound(_))));
        assert!((s.diameter(1.0) - 2f64.sqrt()).abs() < 1e-12);
    }
}
