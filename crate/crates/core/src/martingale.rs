//! Dyadic filtrations, block conditional expectations and the martingale
//! inequalities used to bound averages of products from below.

use crate::error::{Checked, Error, Result, Warning};
use crate::grid::{convolve, Geometry, GridField};

/// Finest level `M = log₂ N`; level `m` has `2^{dm}` blocks of side `2^{-m}R`.
pub fn max_level(geom: &Geometry) -> usize {
    geom.cells.trailing_zeros() as usize
}

/// `E_m f`: the average of `f` over each level-`m` dyadic block.
pub fn cond_exp(f: &GridField, m: usize) -> Result<GridField> {
    let g = *f.geometry();
    let top = max_level(&g);
    if m > top {
        return Err(Error::Domain(format!("level {m} above the finest level {top}")));
    }
    let shift = top - m;
    let blocks_per_axis = 1usize << m;
    let nblocks = blocks_per_axis.pow(g.dim as u32);
    let mut sums = vec![0.0; nblocks];
    let mut idx = vec![0usize; g.dim];
    let block_of = |idx: &[usize]| idx.iter().fold(0usize, |acc, &j| acc * blocks_per_axis + (j >> shift));
    for (i, v) in f.values().iter().enumerate() {
        g.unravel(i, &mut idx);
        sums[block_of(&idx)] += v;
    }
    let size = (1usize << shift).pow(g.dim as u32) as f64;
    let mut out = vec![0.0; g.len()];
    for (i, o) in out.iter_mut().enumerate() {
        g.unravel(i, &mut idx);
        *o = sums[block_of(&idx)] / size;
    }
    GridField::from_values(g, out)
}

fn check_nonnegative(f: &GridField) -> Result<()> {
    if f.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Domain("function must be nonnegative".into()));
    }
    Ok(())
}

fn product_of(fields: &[GridField], geom: Geometry) -> GridField {
    let mut p = GridField::constant(geom, 1.0);
    for e in fields {
        p = p.mul(e).expect("same geometry");
    }
    p
}

fn min_diff(a: &GridField, b: &GridField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| x - y).fold(f64::INFINITY, f64::min)
}

/// Cellwise minimum of `E_m(f Π E_{m_i} f) − (Π_{m_i<m} E_{m_i} f)(E_m f)^{n+1−N}`,
/// `N` being the number of levels below `m`.
pub fn nested_product_margin(f: &GridField, m: usize, levels: &[usize]) -> Result<f64> {
    check_nonnegative(f)?;
    let g = *f.geometry();
    let mut cond = Vec::with_capacity(levels.len());
    for &mi in levels {
        cond.push(cond_exp(f, mi)?);
    }
    let lhs = cond_exp(&f.mul(&product_of(&cond, g))?, m)?;
    let em = cond_exp(f, m)?;
    let coarse: Vec<GridField> =
        levels.iter().zip(&cond).filter(|(mi, _)| **mi < m).map(|(_, c)| c.clone()).collect();
    let power = (levels.len() + 1 - coarse.len()) as i32;
    let rhs = product_of(&coarse, g).mul(&em.zip_with(&em, |a, _| a.powi(power))?)?;
    Ok(min_diff(&lhs, &rhs))
}

/// Replay of the induction behind the nested product bound for sorted
/// levels `m ≤ m_1 ≤ … ≤ m_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InductionChain {
    /// `min(L_0 − (E_m f)^{n+1})` with `L_0 = E_m((E_{m_1} f)^{n+1})`.
    pub basis: f64,
    /// `min(L_k − L_{k−1})` for `k = 1..n−1`.
    pub steps: Vec<f64>,
    /// `max |L_{n−1} − E_m(f Π E_{m_i} f)|`.
    pub closing: f64,
}

impl InductionChain {
    pub fn worst(&self) -> f64 {
        self.steps.iter().copied().fold(self.basis, f64::min)
    }
}

pub fn induction_chain(f: &GridField, m: usize, levels: &[usize]) -> Result<InductionChain> {
    check_nonnegative(f)?;
    if levels.is_empty() {
        return Err(Error::Domain("need at least one level".into()));
    }
    let mut lv = levels.to_vec();
    lv.sort_unstable();
    if lv[0] < m {
        return Err(Error::Domain(format!("levels must be at least m = {m}")));
    }
    let g = *f.geometry();
    let n = lv.len();
    let mut cond = Vec::with_capacity(n);
    for &mi in &lv {
        cond.push(cond_exp(f, mi)?);
    }
    let chain_term = |k: usize| -> Result<GridField> {
        let p = (n + 1 - k) as i32;
        let pow = cond[k].zip_with(&cond[k], |a, _| a.powi(p))?;
        cond_exp(&product_of(&cond[..k], g).mul(&pow)?, m)
    };
    let em = cond_exp(f, m)?;
    let floor = em.zip_with(&em, |a, _| a.powi(n as i32 + 1))?;
    let mut prev = chain_term(0)?;
    let basis = min_diff(&prev, &floor);
    let mut steps = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let cur = chain_term(k)?;
        steps.push(min_diff(&cur, &prev));
        prev = cur;
    }
    let full = cond_exp(&f.mul(&product_of(&cond, g))?, m)?;
    let closing = prev.sub(&full)?.lp_norm(f64::INFINITY)?;
    Ok(InductionChain { basis, steps, closing })
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        0 => 1.0,
        1 => 2.0,
        d => unit_ball_volume(d - 2) * 2.0 * PI / d as f64,
    }
}

/// `c_d = ((2√d)^d v_d)^{-1}`, the domination constant of ball averages over block averages.
pub fn ball_constant(dim: usize) -> f64 {
    let d = dim as f64;
    1.0 / ((2.0 * d.sqrt()).powf(d) * unit_ball_volume(dim))
}

/// Normalized indicator of the open ball `|x| < t`, displacement layout.
pub fn ball_kernel(t: f64, geom: Geometry) -> Result<Checked<GridField>> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("ball radius must be positive, got {t}")));
    }
    let h = geom.spacing();
    let warnings = if t < 2.0 * h {
        vec![Warning::UnderResolved { what: "ball_kernel", scale: t, spacing: h }]
    } else {
        Vec::new()
    };
    let b = GridField::from_displacement_fn(geom, |x| {
        if x.iter().map(|v| v * v).sum::<f64>() < t * t {
            1.0
        } else {
            0.0
        }
    });
    let mass = b.integral();
    Ok(Checked { value: b.scale(1.0 / mass), warnings })
}

/// `f ∗ φ_t` with the normalized ball kernel.
pub fn ball_average(f: &GridField, t: f64) -> Result<Checked<GridField>> {
    let k = ball_kernel(t, *f.geometry())?;
    Ok(Checked { value: convolve(f, &k.value)?, warnings: k.warnings })
}

/// Smallest level `m` with `2^{-m} R √d < t`.
pub fn domination_level(t: f64, geom: &Geometry) -> Result<usize> {
    let rd = geom.side * (geom.dim as f64).sqrt();
    (0..=max_level(geom))
        .find(|&m| rd / ((1u64 << m) as f64) < t)
        .ok_or_else(|| Error::Domain(format!("no dyadic level resolves radius {t} on this grid")))
}

/// `mean(f Π_k (f ∗ φ_{t_k})) − c_d^n mean(f)^{n+1}`.
pub fn bourgain_lower_margin(f: &GridField, radii: &[f64]) -> Result<f64> {
    let g = *f.geometry();
    if f.values().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::Domain("function must take values in [0,1]".into()));
    }
    let h = g.spacing();
    for &t in radii {
        if t < 2.0 * h || t > g.side / 2.0 {
            return Err(Error::Domain(format!("radius {t} outside [2h, R/2] = [{}, {}]", 2.0 * h, g.side / 2.0)));
        }
        domination_level(t, &g)?;
    }
    let mut p = f.clone();
    for &t in radii {
        p = p.mul(&ball_average(f, t)?.value)?;
    }
    let c = ball_constant(g.dim).powi(radii.len() as i32);
    Ok(p.mean() - c * f.mean().powi(radii.len() as i32 + 1))
}
