//! The Gaussian `g(x) = e^{-π|x|²}`, its partial derivatives and its
//! Laplacian, with their dilates `K_t(x) = t^{-d} K(x/t)`.

use crate::error::{Checked, Error, Result, Warning};
use crate::grid::{convolve, Geometry, GridField, SpectrumField};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Gauss,
    /// Partial derivative `∂_l g` along the zero-based axis `l`.
    GaussDeriv(usize),
    GaussLaplacian,
}

impl KernelKind {
    fn check(&self, dim: usize) -> Result<()> {
        match *self {
            KernelKind::GaussDeriv(l) if l >= dim => {
                Err(Error::Domain(format!("derivative axis {l} outside dimension {dim}")))
            }
            _ => Ok(()),
        }
    }
}

/// Anisotropic scale law `t ↦ t^a · b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationLaw {
    pub exponent: f64,
    pub coefficient: f64,
}

impl DilationLaw {
    pub fn new(exponent: f64, coefficient: f64) -> Result<Self> {
        if !(exponent > 0.0 && coefficient > 0.0) {
            return Err(Error::Domain(format!(
                "dilation law needs a > 0 and b > 0, got a={exponent}, b={coefficient}"
            )));
        }
        Ok(DilationLaw { exponent, coefficient })
    }

    pub fn scale(&self, t: f64) -> f64 {
        t.powf(self.exponent) * self.coefficient
    }
}

/// Pointwise value of the dilate `K_t(x)`.
pub fn kernel_value(kind: KernelKind, t: f64, x: &[f64]) -> f64 {
    let d = x.len() as i32;
    let r2: f64 = x.iter().map(|v| v * v).sum::<f64>() / (t * t);
    let g = (-PI * r2).exp() / t.powi(d);
    match kind {
        KernelKind::Gauss => g,
        KernelKind::GaussDeriv(l) => -2.0 * PI * x[l] / t * g,
        KernelKind::GaussLaplacian => (4.0 * PI * PI * r2 - 2.0 * PI * d as f64) * g,
    }
}

/// Closed-form Fourier transform of `K_t` at frequency `xi`.
pub fn kernel_spectrum(kind: KernelKind, t: f64, xi: &[f64]) -> Complex64 {
    let q: f64 = xi.iter().map(|v| v * v).sum::<f64>() * t * t;
    let g = (-PI * q).exp();
    match kind {
        KernelKind::Gauss => Complex64::new(g, 0.0),
        KernelKind::GaussDeriv(l) => Complex64::new(0.0, 2.0 * PI * t * xi[l] * g),
        KernelKind::GaussLaplacian => Complex64::new(-4.0 * PI * PI * q * g, 0.0),
    }
}

fn check_scale(what: &'static str, t: f64, geom: &Geometry) -> Result<Vec<Warning>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("{what}: scale must be positive, got {t}")));
    }
    let h = geom.spacing();
    Ok(if t < 2.0 * h {
        vec![Warning::UnderResolved { what, scale: t, spacing: h }]
    } else {
        Vec::new()
    })
}

/// Samples `K_t` in displacement layout (index 0 is the origin), periodized
/// over the `3^d` nearest torus images.
pub fn sample_kernel(kind: KernelKind, t: f64, geom: Geometry) -> Result<Checked<GridField>> {
    kind.check(geom.dim)?;
    let warnings = check_scale("sample_kernel", t, &geom)?;
    let d = geom.dim;
    let images = 3usize.pow(d as u32);
    let r = geom.side;
    let field = GridField::from_displacement_fn(geom, |x| {
        let mut y = vec![0.0; d];
        let mut s = 0.0;
        for m in 0..images {
            let mut c = m;
            for k in 0..d {
                y[k] = x[k] + ((c % 3) as f64 - 1.0) * r;
                c /= 3;
            }
            s += kernel_value(kind, t, &y);
        }
        s
    });
    Ok(Checked { value: field, warnings })
}

/// Band-limited version of `K_t`: the inverse transform of the closed-form
/// spectrum restricted to the grid frequencies. Exact under convolution
/// identities at every scale, including scales comparable to `R`.
pub fn spectral_kernel(kind: KernelKind, t: f64, geom: Geometry) -> Result<Checked<GridField>> {
    kind.check(geom.dim)?;
    let warnings = check_scale("spectral_kernel", t, &geom)?;
    let s = SpectrumField::from_fn(geom, |xi| kernel_spectrum(kind, t, xi));
    Ok(Checked { value: s.inverse(), warnings })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `g_α ∗ g_β − g_γ`
    pub gauss: f64,
    /// `Σ_l h_α ∗ h_β − (αβ/γ²) k_γ`
    pub deriv: f64,
    /// `k_α ∗ g_β − (α²/γ²) k_γ`
    pub laplacian: f64,
    /// `γ = √(α² + β²)`
    pub target_scale: f64,
}

fn sup_diff(a: &GridField, b: &GridField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// L∞ residuals of the three Gaussian convolution identities with sampled kernels.
pub fn verify_convolution_identities(
    alpha: f64,
    beta: f64,
    geom: Geometry,
) -> Result<Checked<IdentityResiduals>> {
    let gamma = alpha.hypot(beta);
    let mut warnings = Vec::new();
    let mut sample = |kind, t| -> Result<GridField> {
        let c = sample_kernel(kind, t, geom)?;
        warnings.extend(c.warnings);
        Ok(c.value)
    };
    let ga = sample(KernelKind::Gauss, alpha)?;
    let gb = sample(KernelKind::Gauss, beta)?;
    let gc = sample(KernelKind::Gauss, gamma)?;
    let ka = sample(KernelKind::GaussLaplacian, alpha)?;
    let kc = sample(KernelKind::GaussLaplacian, gamma)?;
    let mut hh = GridField::zeros(geom);
    for l in 0..geom.dim {
        let ha = sample(KernelKind::GaussDeriv(l), alpha)?;
        let hb = sample(KernelKind::GaussDeriv(l), beta)?;
        hh = hh.add(&convolve(&ha, &hb)?)?;
    }
    let g2 = gamma * gamma;
    let value = IdentityResiduals {
        gauss: sup_diff(&convolve(&ga, &gb)?, &gc),
        deriv: sup_diff(&hh, &kc.scale(alpha * beta / g2)),
        laplacian: sup_diff(&convolve(&ka, &gb)?, &kc.scale(alpha * alpha / g2)),
        target_scale: gamma,
    };
    warnings.dedup();
    Ok(Checked { value, warnings })
}

/// Relative L∞ residual of `∂_t g_{s(t)} = (a/2πt) k_{s(t)}` by central differences.
pub fn heat_flow_residual(law: DilationLaw, t: f64, geom: Geometry, dt: f64) -> Result<Checked<f64>> {
    if !(dt > 0.0 && t - dt > 0.0) {
        return Err(Error::Domain(format!("need 0 < dt < t, got t={t}, dt={dt}")));
    }
    let plus = sample_kernel(KernelKind::Gauss, law.scale(t + dt), geom)?;
    let minus = sample_kernel(KernelKind::Gauss, law.scale(t - dt), geom)?;
    let k = sample_kernel(KernelKind::GaussLaplacian, law.scale(t), geom)?;
    let mut warnings = plus.warnings;
    warnings.extend(minus.warnings);
    warnings.extend(k.warnings);
    warnings.dedup();
    let fd = plus.value.sub(&minus.value)?.scale(0.5 / dt);
    let rhs = k.value.scale(law.exponent / (2.0 * PI * t));
    let norm = rhs.lp_norm(f64::INFINITY)?;
    Ok(Checked { value: sup_diff(&fd, &rhs) / norm, warnings })
}

/// `∫₁^Γ g_γ(x) dγ/γ²` at `|x| = r` in dimension `dim`, trapezoid in `log γ`.
pub fn gaussian_superposition(r: f64, dim: usize, gamma_max: f64, nodes: usize) -> f64 {
    let umax = gamma_max.ln();
    let du = umax / (nodes - 1) as f64;
    let d = dim as i32;
    let mut s = 0.0;
    for i in 0..nodes {
        let u = i as f64 * du;
        let gamma = u.exp();
        // dγ/γ² = e^{-u} du
        let v = (-PI * r * r / (gamma * gamma)).exp() / gamma.powi(d) / gamma;
        let w = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
        s += w * v;
    }
    s * du
}

/// Minimum over `radii` of `∫₁^Γ g_γ(x) dγ/γ² / (1+|x|)^{-d-1}`.
///
/// Fails if doubling the node count moves any ratio by more than 1%.
pub fn schwartz_domination_margin(radii: &[f64], dim: usize, gamma_max: f64, nodes: usize) -> Result<f64> {
    let rmax = radii.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if gamma_max < 10.0 * (1.0 + rmax) {
        return Err(Error::Domain(format!(
            "gamma_max {gamma_max} below 10·(1+max|x|) = {}",
            10.0 * (1.0 + rmax)
        )));
    }
    if nodes < 2 {
        return Err(Error::Domain("need at least two quadrature nodes".into()));
    }
    let mut worst = f64::INFINITY;
    for &r in radii {
        let lhs = (1.0 + r.abs()).powi(-(dim as i32) - 1);
        let coarse = gaussian_superposition(r, dim, gamma_max, nodes) / lhs;
        let fine = gaussian_superposition(r, dim, gamma_max, 2 * nodes - 1) / lhs;
        if ((coarse - fine) / fine).abs() > 0.01 {
            return Err(Error::Quadrature(format!(
                "node doubling moved the ratio at |x|={r} from {coarse:.6e} to {fine:.6e}"
            )));
        }
        worst = worst.min(coarse);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(d: usize, n: usize) -> Geometry {
        Geometry::new(d, 1.0, n).unwrap()
    }

    #[test]
    fn masses() {
        for d in [1, 2] {
            let g = geom(d, 64);
            let m = sample_kernel(KernelKind::Gauss, 0.1, g).unwrap();
            assert!(m.is_clean());
            assert!((m.value.integral() - 1.0).abs() < 1e-8);
            for kind in [KernelKind::GaussDeriv(d - 1), KernelKind::GaussLaplacian] {
                let k = sample_kernel(kind, 0.07, g).unwrap().value;
                assert!(k.integral().abs() < 1e-10, "{kind:?}");
            }
        }
    }

    #[test]
    fn warns_when_under_resolved() {
        let k = sample_kernel(KernelKind::Gauss, 0.01, geom(1, 64)).unwrap();
        assert!(!k.is_clean());
        assert!(sample_kernel(KernelKind::Gauss, 0.0, geom(1, 64)).is_err());
        assert!(sample_kernel(KernelKind::GaussDeriv(2), 0.1, geom(2, 64)).is_err());
    }

    #[test]
    fn spectrum_values() {
        assert_eq!(kernel_spectrum(KernelKind::Gauss, 1.0, &[0.0, 0.0]).re, 1.0);
        assert_eq!(kernel_spectrum(KernelKind::GaussLaplacian, 1.0, &[0.0]).norm(), 0.0);
        let v = kernel_spectrum(KernelKind::Gauss, 2.0, &[0.6, 0.8]).re;
        assert!((v - (-4.0 * PI).exp()).abs() < 1e-18);
    }

    #[test]
    fn sampled_spectrum_matches_closed_form() {
        for d in [1, 2] {
            let g = geom(d, 64);
            for kind in [KernelKind::Gauss, KernelKind::GaussDeriv(0), KernelKind::GaussLaplacian] {
                let t = 0.08;
                let s = sample_kernel(kind, t, g).unwrap().value.spectrum();
                let exact = SpectrumField::from_fn(g, |xi| kernel_spectrum(kind, t, xi));
                let scale = exact.values().iter().fold(0.0f64, |m, z| m.max(z.norm()));
                let err = s
                    .values()
                    .iter()
                    .zip(exact.values())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-6 * scale, "{kind:?} d={d}: {err}");
            }
        }
    }

    #[test]
    fn bounded_by_schwartz_tail() {
        for d in [1usize, 2] {
            let g = geom(d, 64);
            let t = 1.0 / 16.0;
            for kind in [KernelKind::Gauss, KernelKind::GaussDeriv(0)] {
                // one global constant per dimension from the radial profile
                let c = (0..20000)
                    .map(|i| {
                        let r = i as f64 * 1e-3;
                        let mut x = vec![0.0; d];
                        x[0] = r;
                        kernel_value(kind, 1.0, &x).abs() * (1.0 + r).powi(d as i32 + 1)
                    })
                    .fold(0.0, f64::max)
                    * 1.01;
                let f = sample_kernel(kind, t, g).unwrap().value;
                let mut x = vec![0.0; d];
                for (i, v) in f.values().iter().enumerate() {
                    g.displacement(i, &mut x);
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt() / t;
                    let bound = c * t.powi(-(d as i32)) * (1.0 + r).powi(-(d as i32) - 1);
                    assert!(v.abs() <= bound, "{kind:?} d={d} r={r}");
                }
            }
        }
    }

    #[test]
    fn identities_hold() {
        let c = verify_convolution_identities(0.05, 0.05, geom(2, 128)).unwrap();
        assert!(c.is_clean());
        assert!(c.value.gauss < 1e-6 && c.value.deriv < 1e-6 && c.value.laplacian < 1e-6, "{:?}", c.value);
        let h = 0.02;
        let c = verify_convolution_identities(3.0 * h, 4.0 * h, geom(1, 64)).unwrap();
        assert!((c.value.target_scale - 5.0 * h).abs() < 1e-15);
    }

    #[test]
    fn heat_equation() {
        let law = DilationLaw::new(1.0, 1.0).unwrap();
        let r = heat_flow_residual(law, 0.1, geom(2, 64), 1e-4).unwrap();
        assert!(r.value < 1e-4);
        assert!(heat_flow_residual(law, 0.1, geom(2, 64), 0.2).is_err());
        assert!(DilationLaw::new(0.0, 1.0).is_err());
    }

    #[test]
    fn schwartz_margin() {
        let at0 = gaussian_superposition(0.0, 2, 1e3, 200);
        assert!(at0 > 0.0);
        let radii: Vec<f64> = (0..=50).map(f64::from).collect();
        let m = schwartz_domination_margin(&radii, 2, 1e3, 200).unwrap();
        assert!(m > 0.0);
        let coarse = gaussian_superposition(10.0, 2, 1e3, 200);
        let fine = gaussian_superposition(10.0, 2, 1e3, 2000);
        assert!(((coarse - fine) / fine).abs() < 0.1);
        assert!(schwartz_domination_margin(&[200.0], 2, 1e3, 200).is_err());
    }
}
