//! Central finite differences with Richardson extrapolation, and exterior
//! derivatives of sampled forms built on them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step, extrapolation depth and per-check tolerance budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FDConfig {
    pub h: f64,
    pub richardson: u32,
    pub budget: f64,
}

impl Default for FDConfig {
    fn default() -> Self {
        Self {
            h: 1e-4,
            richardson: 1,
            budget: 1e-4,
        }
    }
}

impl FDConfig {
    pub fn with_h(h: f64) -> Self {
        Self { h, ..Self::default() }
    }

    pub fn halved(&self) -> Self {
        Self { h: 0.5 * self.h, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.h > 0.0 && self.h.is_finite() && self.budget > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidData(format!("finite-difference config {self:?}")))
        }
    }
}

/// A vector-valued sampler on `ℝⁿ`.
pub type Sampler<'a> = dyn Fn(&[f64]) -> Result<Vec<f64>> + Sync + 'a;

fn stencil_err(e: Error) -> Error {
    match e {
        Error::Stencil(_) => e,
        other => Error::Stencil(other.to_string()),
    }
}

/// `jac[i][j] = ∂f_i/∂x_j`, central differences at steps `h, h/2, …`
/// combined by Richardson extrapolation (`richardson` levels).
pub fn fd_jacobian(f: &Sampler<'_>, x: &[f64], cfg: &FDConfig) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        cols.push(fd_directional(f, x, j, cfg)?);
    }
    let m = cols.first().map_or(0, Vec::len);
    Ok((0..m).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

/// `∂f/∂x_j` as a vector.
pub fn fd_directional(f: &Sampler<'_>, x: &[f64], j: usize, cfg: &FDConfig) -> Result<Vec<f64>> {
    let levels = cfg.richardson as usize;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels + 1);
    let mut h = cfg.h;
    let mut xp = x.to_vec();
    for _ in 0..=levels {
        xp[j] = x[j] + h;
        let fp = f(&xp).map_err(stencil_err)?;
        xp[j] = x[j] - h;
        let fm = f(&xp).map_err(stencil_err)?;
        xp[j] = x[j];
        if fp.len() != fm.len() {
            return Err(Error::Stencil("sampler changed output length".into()));
        }
        table.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect());
        h *= 0.5;
    }
    // Eliminate h², h⁴, … in turn.
    for k in 1..=levels {
        let factor = 4f64.powi(k as i32);
        for l in (k..=levels).rev() {
            let (lo, hi) = table.split_at_mut(l);
            for (fine, coarse) in hi[0].iter_mut().zip(&lo[l - 1]) {
                *fine = (factor * *fine - coarse) / (factor - 1.0);
            }
        }
    }
    Ok(table.pop().expect("at least one level"))
}

/// Exterior derivative of a 1-form field: `(dα)_{ab} = ∂_a α_b − ∂_b α_a`.
pub fn d_one_form(alpha: &Sampler<'_>, x: &[f64], cfg: &FDConfig) -> Result<DMatrix<f64>> {
    let jac = fd_jacobian(alpha, x, cfg)?;
    let n = x.len();
    Ok(DMatrix::from_fn(n, n, |a, b| jac[b][a] - jac[a][b]))
}

/// Exterior derivative of a 2-form field given as a row-major `n×n`
/// antisymmetric matrix: `(dΩ)_{abc} = ∂_a Ω_{bc} + ∂_b Ω_{ca} + ∂_c Ω_{ab}`.
/// Returns the components with `a < b < c`.
pub fn d_two_form(omega: &Sampler<'_>, x: &[f64], cfg: &FDConfig) -> Result<Vec<f64>> {
    let n = x.len();
    let jac = fd_jacobian(omega, x, cfg)?;
    let d = |a: usize, b: usize, c: usize| jac[b * n + c][a];
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push(d(a, b, c) + d(b, c, a) + d(c, a, b));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> FDConfig {
        FDConfig::default()
    }

    #[test]
    fn polynomial_one_forms() {
        // α = u dv ⇒ dα = du∧dv.
        let a = |x: &[f64]| Ok(vec![0.0, x[0]]);
        let d = d_one_form(&a, &[0.3, -0.7], &cfg()).unwrap();
        assert!((d[(0, 1)] - 1.0).abs() < 1e-10 && (d[(1, 0)] + 1.0).abs() < 1e-10);
        // α = u² dv ⇒ dα = 2u du∧dv.
        let a = |x: &[f64]| Ok(vec![0.0, x[0] * x[0]]);
        let d = d_one_form(&a, &[0.3, -0.7], &cfg()).unwrap();
        assert!((d[(0, 1)] - 0.6).abs() < 1e-10);
        // d(d(u²v)) = 0.
        let a = |x: &[f64]| Ok(vec![2.0 * x[0] * x[1], x[0] * x[0]]);
        let d = d_one_form(&a, &[0.3, -0.7], &cfg()).unwrap();
        assert!(d[(0, 1)].abs() < 1e-9);
    }

    #[test]
    fn richardson_orders() {
        let f = |x: &[f64]| Ok(vec![x[0].sin()]);
        let x = [0.4];
        let exact = 0.4f64.cos();
        let plain = fd_directional(&f, &x, 0, &FDConfig { h: 1e-2, richardson: 0, budget: 1.0 }).unwrap()[0];
        let one = fd_directional(&f, &x, 0, &FDConfig { h: 1e-2, richardson: 1, budget: 1.0 }).unwrap()[0];
        let two = fd_directional(&f, &x, 0, &FDConfig { h: 1e-2, richardson: 2, budget: 1.0 }).unwrap()[0];
        assert!((plain - exact).abs() > 1e-6);
        assert!((one - exact).abs() < 1e-9);
        assert!((two - exact).abs() < 1e-12);
    }

    #[test]
    fn closed_two_form() {
        // Ω = d(x₀ x₁ dx₂) is closed.
        let om = |x: &[f64]| {
            let mut m = vec![0.0; 9];
            m[2] = x[1]; // Ω_02
            m[6] = -x[1];
            m[5] = x[0]; // Ω_12
            m[7] = -x[0];
            Ok(m)
        };
        let d = d_two_form(&om, &[0.1, 0.2, 0.3], &cfg()).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].abs() < 1e-10);
    }

    #[test]
    fn stencil_failure() {
        let f = |x: &[f64]| if x[0] > 0.0 { Err(Error::Pole(0.0)) } else { Ok(vec![x[0]]) };
        assert!(matches!(fd_jacobian(&f, &[0.0], &cfg()), Err(Error::Stencil(_))));
    }
}
