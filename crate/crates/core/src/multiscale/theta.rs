use super::quadrature::{IdentityCheck, QuadratureSpec};
use crate::counting::{AnisotropyParams, BoxSlices};
use crate::error::{Checked, Error, Result, Warning};
use crate::exec;
use crate::grid::{Geometry, GridField};
use crate::kernels::{spectral_kernel, KernelKind};
use serde::Serialize;
use std::f64::consts::PI;

fn freq_sq(geom: &Geometry) -> Vec<f64> {
    let mut xi = vec![0.0; geom.dim];
    (0..geom.len())
        .map(|i| {
            geom.frequency(i, &mut xi);
            xi.iter().map(|v| v * v).sum()
        })
        .collect()
}

/// Band of `s` on which every `t_k = s^{a_k} c_k` lies in `[2h, R/4]`.
fn resolvable_band(geom: &Geometry, laws: &[(f64, f64)]) -> Result<(f64, f64)> {
    let h = geom.spacing();
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for &(a, c) in laws {
        lo = lo.max((2.0 * h / c).powf(1.0 / a));
        hi = hi.min((geom.side / (4.0 * c)).powf(1.0 / a));
    }
    if lo >= hi {
        return Err(Error::Quadrature(format!(
            "no common resolvable band (lower {lo} >= upper {hi}); pass an explicit band"
        )));
    }
    Ok((lo, hi))
}

fn band_warnings(geom: &Geometry, laws: &[(f64, f64)], band: (f64, f64)) -> Vec<Warning> {
    let h = geom.spacing();
    laws.iter()
        .map(|&(a, c)| band.0.powf(a) * c)
        .filter(|&t| t < 2.0 * h)
        .map(|t| Warning::UnderResolved { what: "multiscale band", scale: t, spacing: h })
        .collect()
}

/// `∫₀^∞ Σ_l ‖f ∗ h⁽ˡ⁾_{s^a b}‖² ds/s` against `(π/a)‖f‖²`.
///
/// The band integral is a log-trapezoid sum; outside the band the integral
/// telescopes to differences of `‖f ∗ g_{√2 t}‖²`, evaluated exactly in frequency.
pub fn square_identity(f: &GridField, a: f64, b: f64, quad: &QuadratureSpec) -> Result<IdentityCheck> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("dilation law needs a, b > 0, got ({a}, {b})")));
    }
    let geom = *f.geometry();
    let band = match quad.band {
        Some(b) => b,
        None => resolvable_band(&geom, &[(a, b)])?,
    };
    let nodes = quad.nodes(band.0, band.1)?;
    let xi2 = freq_sq(&geom);
    let vol = geom.volume();
    let power: Vec<f64> = f.spectrum().values().iter().map(|z| z.norm_sqr() / vol).collect();
    // Q(t) = ‖f ∗ g_t‖²
    let q = |t: f64| -> f64 { power.iter().zip(&xi2).map(|(p, x)| p * (-2.0 * PI * t * t * x).exp()).sum() };
    let values = exec::map_indexed(nodes.len(), |i| {
        let t = nodes[i].0.powf(a) * b;
        power
            .iter()
            .zip(&xi2)
            .map(|(p, x)| p * 4.0 * PI * PI * t * t * x * (-2.0 * PI * t * t * x).exp())
            .sum::<f64>()
    });
    let band_integral: f64 = nodes.iter().zip(&values).map(|((_, w), v)| w * v).sum();
    let (t_lo, t_hi) = (band.0.powf(a) * b, band.1.powf(a) * b);
    let lower_tail = PI / a * (q(0.0) - q(t_lo));
    let upper_tail = PI / a * q(t_hi);
    let rhs = PI / a * f.lp_norm(2.0)?.powi(2);
    Ok(IdentityCheck {
        lhs: band_integral + lower_tail + upper_tail,
        rhs,
        band,
        nodes: nodes.len(),
        band_integral,
        lower_tail,
        upper_tail,
        min_integrand: values.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Box form with Gaussians at the given plane scales, in the representation
/// shared by all Θ slots so that the heat-flow telescoping is exact.
enum ThetaEngine {
    One { power: Vec<f64>, xi2: Vec<f64> },
    Two { plane: Geometry, slices: BoxSlices, transposed: BoxSlices, xi2: Vec<f64> },
}

impl ThetaEngine {
    fn new(f: &GridField, n: usize) -> Result<Self> {
        let geom = *f.geometry();
        if geom.dim != 2 * n {
            return Err(Error::Dimension(format!("Θ with n={n} needs dimension {}, got {}", 2 * n, geom.dim)));
        }
        match n {
            1 => {
                let vol = geom.volume();
                let power = f.spectrum().values().iter().map(|z| z.norm_sqr() / vol).collect();
                Ok(ThetaEngine::One { power, xi2: freq_sq(&geom) })
            }
            2 => {
                let plane = Geometry::new(2, geom.side, geom.cells)?;
                Ok(ThetaEngine::Two {
                    plane,
                    slices: BoxSlices::full(f)?,
                    transposed: BoxSlices::transposed(f)?,
                    xi2: freq_sq(&plane),
                })
            }
            _ => Err(Error::Config(format!("Θ forms support n in {{1,2}}, got {n}"))),
        }
    }

    fn gauss_hat(xi2: &[f64], t: f64) -> Vec<f64> {
        xi2.iter().map(|x| (-PI * t * t * x).exp()).collect()
    }

    fn neg_laplacian_hat(xi2: &[f64], t: f64) -> Vec<f64> {
        xi2.iter().map(|x| 4.0 * PI * PI * t * t * x * (-PI * t * t * x).exp()).collect()
    }

    fn gauss_spatial(plane: &Geometry, t: f64) -> Result<GridField> {
        if t == 0.0 {
            let mut v = vec![0.0; plane.len()];
            v[0] = 1.0 / plane.cell_volume();
            return GridField::from_values(*plane, v);
        }
        Ok(spectral_kernel(KernelKind::Gauss, t, *plane)?.value)
    }

    /// `∫ F Π_k g_{t_k}(x_k⁰ − x_k¹)`; `t_k = 0` is the diagonal.
    fn form(&self, t: &[f64]) -> Result<f64> {
        match self {
            ThetaEngine::One { power, xi2 } => {
                Ok(power.iter().zip(Self::gauss_hat(xi2, t[0])).map(|(p, g)| p * g).sum())
            }
            ThetaEngine::Two { plane, slices, xi2, .. } => {
                Ok(slices.pair(&Self::gauss_spatial(plane, t[0])?, &Self::gauss_hat(xi2, t[1])))
            }
        }
    }

    /// `−∫ F k_{t_m} Π_{k≠m} g_{t_k}`, a sum of squares weighted by a Gaussian.
    fn slot(&self, m: usize, t: &[f64]) -> Result<f64> {
        match self {
            ThetaEngine::One { power, xi2 } => {
                Ok(power.iter().zip(Self::neg_laplacian_hat(xi2, t[0])).map(|(p, k)| p * k).sum())
            }
            ThetaEngine::Two { plane, slices, transposed, xi2 } => {
                let other = 1 - m;
                let g = Self::gauss_spatial(plane, t[other])?;
                let k = Self::neg_laplacian_hat(xi2, t[m]);
                Ok(if m == 1 { slices.pair(&g, &k) } else { transposed.pair(&g, &k) })
            }
        }
    }
}

/// Band value of one Θ slot with the analytic bound on what the band leaves out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaForm {
    pub band: (f64, f64),
    pub nodes: usize,
    pub band_value: f64,
    /// Contribution from outside the band: exact when `tail_exact`, an upper bound otherwise.
    pub tail: f64,
    pub tail_exact: bool,
    /// Smallest integrand value over the nodes.
    pub min_integrand: f64,
}

impl ThetaForm {
    /// Best estimate of `Θ`; the band value plus the tail (or plus half its bound).
    pub fn value(&self) -> f64 {
        if self.tail_exact {
            self.band_value + self.tail
        } else {
            self.band_value + self.tail / 2.0
        }
    }

    pub fn upper(&self) -> f64 {
        self.band_value + self.tail
    }
}

struct ThetaSetup {
    engine: ThetaEngine,
    laws: Vec<(f64, f64)>,
    band: (f64, f64),
    nodes: Vec<(f64, f64)>,
    warnings: Vec<Warning>,
}

impl ThetaSetup {
    fn new(f: &GridField, params: &AnisotropyParams, gammas: &[f64], quad: &QuadratureSpec) -> Result<Self> {
        let n = params.len();
        if gammas.len() != n || gammas.iter().any(|g| !(*g > 0.0)) {
            return Err(Error::Config(format!("need {n} positive γ values")));
        }
        let engine = ThetaEngine::new(f, n)?;
        let geom = f.geometry();
        let laws: Vec<(f64, f64)> =
            (0..n).map(|k| (params.exponents[k], params.coefficients[k] * gammas[k])).collect();
        let band = match quad.band {
            Some(b) => b,
            None => resolvable_band(geom, &laws)?,
        };
        let nodes = quad.nodes(band.0, band.1)?;
        let warnings = band_warnings(geom, &laws, band);
        Ok(ThetaSetup { engine, laws, band, nodes, warnings })
    }

    fn scales(&self, s: f64) -> Vec<f64> {
        self.laws.iter().map(|&(a, c)| s.powf(a) * c).collect()
    }

    fn slot_values(&self, m: usize) -> Result<Vec<f64>> {
        exec::map_indexed(self.nodes.len(), |i| self.engine.slot(m, &self.scales(self.nodes[i].0))).into_iter().collect()
    }

    /// `2π(N(0) − N(lo))` and `2π N(hi)`.
    fn tails(&self) -> Result<(f64, f64)> {
        let zero = vec![0.0; self.laws.len()];
        let lo = self.engine.form(&self.scales(self.band.0))?;
        let hi = self.engine.form(&self.scales(self.band.1))?;
        Ok((2.0 * PI * (self.engine.form(&zero)? - lo), 2.0 * PI * hi))
    }
}

/// `Θ^{n,m}_{γ}(f)` on `(R²)ⁿ`, slot `m` 0-based.
pub fn theta_form(
    f: &GridField,
    params: &AnisotropyParams,
    m: usize,
    gammas: &[f64],
    quad: &QuadratureSpec,
) -> Result<Checked<ThetaForm>> {
    let setup = ThetaSetup::new(f, params, gammas, quad)?;
    if m >= params.len() {
        return Err(Error::Config(format!("slot {m} out of range for n={}", params.len())));
    }
    let values = setup.slot_values(m)?;
    let band_value: f64 = setup.nodes.iter().zip(&values).map(|((_, w), v)| w * v).sum();
    let (lower, upper) = setup.tails()?;
    let a = params.exponents[m];
    let form = ThetaForm {
        band: setup.band,
        nodes: setup.nodes.len(),
        band_value,
        tail: (lower + upper) / a,
        tail_exact: params.len() == 1,
        min_integrand: values.iter().copied().fold(f64::INFINITY, f64::min),
    };
    Ok(Checked { value: form, warnings: setup.warnings })
}

/// `Σ_m a_m Θ^{n,m}_γ(f)` against `2π‖f‖^{2ⁿ}_{L^{2ⁿ}}`.
pub fn verify_theta_identity(
    f: &GridField,
    params: &AnisotropyParams,
    gammas: &[f64],
    quad: &QuadratureSpec,
) -> Result<Checked<IdentityCheck>> {
    let setup = ThetaSetup::new(f, params, gammas, quad)?;
    let n = params.len();
    let mut band_integral = 0.0;
    let mut min_integrand = f64::INFINITY;
    for m in 0..n {
        let values = setup.slot_values(m)?;
        band_integral +=
            params.exponents[m] * setup.nodes.iter().zip(&values).map(|((_, w), v)| w * v).sum::<f64>();
        min_integrand = values.iter().copied().fold(min_integrand, f64::min);
    }
    let (lower_tail, upper_tail) = setup.tails()?;
    let p = (1usize << n) as f64;
    let rhs = 2.0 * PI * f.lp_norm(p)?.powf(p);
    let check = IdentityCheck {
        lhs: band_integral + lower_tail + upper_tail,
        rhs,
        band: setup.band,
        nodes: setup.nodes.len(),
        band_integral,
        lower_tail,
        upper_tail,
        min_integrand,
    };
    Ok(Checked { value: check, warnings: setup.warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(geom: Geometry, half: f64) -> GridField {
        let c = geom.side / 2.0;
        GridField::from_fn(geom, |x| if x.iter().all(|v| (v - c).abs() < half) { 1.0 } else { 0.0 })
    }

    #[test]
    fn zero_field() {
        let g = Geometry::new(2, 16.0, 32).unwrap();
        let z = GridField::zeros(g);
        let c = square_identity(&z, 1.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        let t = theta_form(&z, &AnisotropyParams::isotropic(1), 0, &[1.0], &QuadratureSpec::default()).unwrap();
        assert_eq!(t.value.value(), 0.0);
    }

    #[test]
    fn square_identity_scales_with_exponent() {
        let g = Geometry::new(2, 16.0, 64).unwrap();
        let f = square(g, 2.0);
        let one = square_identity(&f, 1.0, 1.0, &QuadratureSpec::default()).unwrap();
        let two = square_identity(&f, 2.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!(one.residual() < 0.01 && two.residual() < 0.01);
        assert!((one.rhs / two.rhs - 2.0).abs() < 1e-12);
        assert!((one.rhs - PI * 16.0).abs() < 1e-9);
    }

    #[test]
    fn theta_one_plane_matches_norm() {
        let g = Geometry::new(2, 16.0, 64).unwrap();
        let f = square(g, 2.0);
        let p = AnisotropyParams::new(vec![1.5], vec![0.7]).unwrap();
        let t = theta_form(&f, &p, 0, &[1.3], &QuadratureSpec::default()).unwrap().value;
        let norm = f.lp_norm(2.0).unwrap().powi(2);
        assert!((1.5 * t.value() - 2.0 * PI * norm).abs() / norm < 0.01);
        assert!(t.min_integrand >= 0.0);
    }
}
