//! Homogeneous Gibbons–Hawking structure on `W = 𝔻 × ℝ_t × S¹_θ` built
//! from holomorphic data `(Φ, ψ)`.
//!
//! Coordinates are `(u, v, t, θ)` with `z = u + iv`, indexed `0..4`. One-forms
//! are coefficient vectors and two-forms antisymmetric matrices in that basis.
//! With `φ = −1/ψ`, `ρ = e^t ρ₀` and `x = ρ·Φ(z)`:
//!
//! - `V = Im φ / ρ`
//! - `η = Re φ · dρ/ρ + ξ` with `dξ = Im φ · Φ*Vol`
//! - `Ω_i = (dθ + η)∧dx_i + V dx_j∧dx_k`
//! - `g = V⁻¹(dθ + η)² + V Σ dx_i²`

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector2, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Constant, HoloFn, I};
use crate::covering::Covering;
use crate::error::{Error, Result};
use crate::fd::{self, FDConfig};
use crate::quadrature::{integrate, QuadConfig};
use crate::sampling;

/// Index of each coordinate.
pub const U: usize = 0;
pub const V_: usize = 1;
pub const T: usize = 2;
pub const THETA: usize = 3;

/// Choice of `ρ₀`. `Gauge` multiplies the canonical choice by
/// `exp(offset + slope·(u, v))`, which moves the canonical slice to
/// `t = −(offset + slope·(u, v))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rho0Policy {
    /// `ρ₀ = Im ψ`; the canonical slice is `t = 0`.
    #[default]
    Canonical,
    Gauge { offset: f64, slope: [f64; 2] },
}

impl Rho0Policy {
    fn log_factor(&self, z: Complex) -> (f64, [f64; 2]) {
        match *self {
            Rho0Policy::Canonical => (0.0, [0.0, 0.0]),
            Rho0Policy::Gauge { offset, slope } => (offset + slope[0] * z.re + slope[1] * z.im, slope),
        }
    }
}

/// A point of `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourPoint {
    pub z: Complex,
    pub t: f64,
    pub theta: f64,
}

impl FourPoint {
    pub fn new(z: Complex, t: f64, theta: f64) -> Self {
        Self { z, t, theta }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.z.re, self.z.im, self.t, self.theta]
    }

    pub fn from_coords(c: &[f64]) -> Self {
        Self::new(Complex::new(c[0], c[1]), c[2], c[3])
    }
}

/// Holomorphic data `(Φ, ψ)` with gauge choices.
pub struct HolomorphicData {
    covering: Covering,
    psi: Arc<dyn HoloFn>,
    rho0: Rho0Policy,
    base_point: Complex,
    v_scale: f64,
    xi_tol: f64,
    xi_cache: RwLock<HashMap<(u64, u64), f64>>,
}

impl Clone for HolomorphicData {
    fn clone(&self) -> Self {
        let cache = self.xi_cache.read().map(|c| c.clone()).unwrap_or_default();
        Self {
            covering: self.covering.clone(),
            psi: Arc::clone(&self.psi),
            rho0: self.rho0,
            base_point: self.base_point,
            v_scale: self.v_scale,
            xi_tol: self.xi_tol,
            xi_cache: RwLock::new(cache),
        }
    }
}

impl fmt::Debug for HolomorphicData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HolomorphicData")
            .field("covering", &self.covering)
            .field("rho0", &self.rho0)
            .field("base_point", &self.base_point)
            .field("v_scale", &self.v_scale)
            .finish_non_exhaustive()
    }
}

/// Samples on which the data invariants are checked at construction.
const VALIDATION_SAMPLES: usize = 200;

impl HolomorphicData {
    /// Validate `Im ψ > 0`, `Im φ > 0` and `φψ = −1` on a fixed sample.
    pub fn new(covering: Covering, psi: Arc<dyn HoloFn>) -> Result<Self> {
        let data = Self {
            covering,
            psi,
            rho0: Rho0Policy::Canonical,
            base_point: Complex::new(0.0, 0.0),
            v_scale: 1.0,
            xi_tol: 1e-12,
            xi_cache: RwLock::new(HashMap::new()),
        };
        for z in sampling::disc_samples(VALIDATION_SAMPLES, 0.95, 0x6461) {
            let psi = data.psi.eval(z)?;
            let phi = -1.0 / psi;
            if !(psi.im > 0.0) || !(phi.im > 0.0) {
                return Err(Error::InvalidData(format!("psi({z}) = {psi} is not in the upper half-plane")));
            }
            if (phi * psi + 1.0).norm() > 1e-12 {
                return Err(Error::InvalidData(format!("phi*psi != -1 at {z}")));
            }
        }
        Ok(data)
    }

    /// Constant `φ ≡ i·im_phi` over the chart inclusion `w = z`: the
    /// one-centre potential `V = im_phi/ρ`, whose metric is flat.
    pub fn flat_reference(im_phi: f64) -> Result<Self> {
        if !(im_phi > 0.0) {
            return Err(Error::InvalidData(format!("Im phi = {im_phi} must be positive")));
        }
        Self::new(Covering::Chart, Arc::new(Constant(I / im_phi)))
    }

    pub fn with_rho0(mut self, rho0: Rho0Policy) -> Self {
        self.rho0 = rho0;
        self
    }

    pub fn with_base_point(mut self, z0: Complex) -> Self {
        self.base_point = z0;
        self.xi_cache = RwLock::new(HashMap::new());
        self
    }

    /// Multiply `V` by `scale`; any value other than 1 breaks the ansatz and
    /// is used to test that the checks detect it.
    pub fn with_v_scale(mut self, scale: f64) -> Self {
        self.v_scale = scale;
        self
    }

    pub fn with_xi_tolerance(mut self, tol: f64) -> Self {
        self.xi_tol = tol;
        self.xi_cache = RwLock::new(HashMap::new());
        self
    }

    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    pub fn psi_fn(&self) -> &Arc<dyn HoloFn> {
        &self.psi
    }

    pub fn rho0_policy(&self) -> Rho0Policy {
        self.rho0
    }

    pub fn v_scale(&self) -> f64 {
        self.v_scale
    }

    pub fn base_point(&self) -> Complex {
        self.base_point
    }

    pub fn is_constant(&self) -> bool {
        self.psi.is_constant()
    }

    // -- surface quantities ------------------------------------------------

    /// `∫₀¹ s·f(z₀ + s(z − z₀)) ds`, `f = Im φ · m`, memoised per `z`.
    fn xi_kernel(&self, z: Complex) -> Result<f64> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(&k) = self.xi_cache.read().expect("xi cache poisoned").get(&key) {
            return Ok(k);
        }
        let z0 = self.base_point;
        let q = integrate(
            |s| {
                let p = z0 + (z - z0) * s;
                let psi = self.psi.eval(p)?;
                let m = self.covering.phi(p)?.metric_factor;
                Ok(s * (-1.0 / psi).im * m)
            },
            0.0,
            1.0,
            &QuadConfig {
                abs_tol: self.xi_tol,
                rel_tol: self.xi_tol,
                max_subdivisions: 4000,
            },
        )
        .map_err(|e| Error::Path(format!("xi quadrature from {z0} to {z}: {e}")))?;
        self.xi_cache.write().expect("xi cache poisoned").insert(key, q.value);
        Ok(q.value)
    }

    /// Everything that depends on `z` only.
    pub fn jet(&self, z: Complex) -> Result<SurfaceJet> {
        let (psi, dpsi) = self.psi.eval_d(z)?;
        if !(psi.im > 0.0) {
            return Err(Error::InvalidData(format!("Im psi({z}) = {} is not positive", psi.im)));
        }
        let phi = -1.0 / psi;
        let dphi = dpsi / (psi * psi);
        let s = self.covering.phi(z)?;
        let (h, slope) = self.rho0.log_factor(z);
        let dlog_im_psi = [dpsi.im / psi.im, dpsi.re / psi.im];
        let k = self.xi_kernel(z)?;
        let d = z - self.base_point;
        Ok(SurfaceJet {
            z,
            psi,
            dpsi,
            phi,
            dphi,
            rho0: psi.im * h.exp(),
            dlog_rho0: [dlog_im_psi[0] + slope[0], dlog_im_psi[1] + slope[1]],
            dlog_im_psi,
            t_slice: -h,
            dt_slice: [-slope[0], -slope[1]],
            p: s.point.0,
            dp: s.dp,
            m: s.metric_factor,
            xi: [-k * d.im, k * d.re],
        })
    }

    /// `ξ` as a 1-form `(ξ_u, ξ_v)` on the disc.
    pub fn xi_form(&self, z: Complex) -> Result<[f64; 2]> {
        let k = self.xi_kernel(z)?;
        let d = z - self.base_point;
        Ok([-k * d.im, k * d.re])
    }

    pub fn momentum_map(&self, z: Complex, t: f64) -> Result<([f64; 3], f64)> {
        let j = self.jet(z)?;
        let rho = t.exp() * j.rho0;
        Ok((j.p.map(|p| rho * p), rho))
    }

    pub fn potential_v(&self, z: Complex, t: f64) -> Result<f64> {
        let j = self.jet(z)?;
        if !(j.phi.im > 0.0) {
            return Err(Error::InvalidData(format!("Im phi({z}) is not positive")));
        }
        Ok(self.v_scale * j.phi.im / (t.exp() * j.rho0))
    }

    pub fn eta_form(&self, z: Complex, t: f64) -> Result<Vector4<f64>> {
        Ok(self.assemble(FourPoint::new(z, t, 0.0))?.eta)
    }

    pub fn symplectic_forms(&self, pt: FourPoint) -> Result<[Matrix4<f64>; 3]> {
        Ok(self.assemble(pt)?.omega)
    }

    /// The metric; fails when it is not positive definite.
    pub fn metric(&self, pt: FourPoint) -> Result<Matrix4<f64>> {
        let s = self.assemble(pt)?;
        if s.g.cholesky().is_none() {
            return Err(Error::DegenerateMetric(format!("g is not positive definite at {pt:?}")));
        }
        Ok(s.g)
    }

    /// All tensors at one point.
    pub fn assemble(&self, pt: FourPoint) -> Result<FourSample> {
        let j = self.jet(pt.z)?;
        Ok(j.at(pt.t, pt.theta, self.v_scale))
    }

    // -- slice -------------------------------------------------------------

    pub fn slice_and_contact(&self, z: Complex, theta: f64) -> Result<SliceFrame> {
        let j = self.jet(z)?;
        let s = j.at(j.t_slice, theta, self.v_scale);
        let e = j.slice_embedding();
        let omega = s.omega.map(|o| e.transpose() * o.row(T).transpose());
        let beta = Vector3::new(
            j.dlog_im_psi[0] - j.psi.re * j.xi[0],
            j.dlog_im_psi[1] - j.psi.re * j.xi[1],
            -j.psi.re,
        );
        let g3 = e.transpose() * s.g * e;
        let gs = omega.iter().fold(Matrix3::zeros(), |acc, w| acc + w * w.transpose());
        Ok(SliceFrame {
            z,
            theta,
            t_slice: j.t_slice,
            omega,
            beta,
            g3,
            gs,
            rho: s.rho,
            v: s.v,
            x: s.x,
            psi: j.psi,
            phi: j.phi,
        })
    }

    /// The quotient metric on `Σ` in `(du, dv)`:
    /// `|ψ|⁻²[(d Im ψ)² + (Im ψ)²·Φ*g_{S²}]`.
    pub fn g_sigma(&self, z: Complex) -> Result<Matrix2<f64>> {
        // Needs ψ and m only; avoids the ξ quadrature near the boundary.
        let (psi, dpsi) = self.psi.eval_d(z)?;
        if !(psi.im > 0.0) {
            return Err(Error::InvalidData(format!("Im psi({z}) = {} is not positive", psi.im)));
        }
        let m = self.covering.phi(z)?.metric_factor;
        let a = Vector2::new(dpsi.im, dpsi.re);
        Ok((a * a.transpose() + Matrix2::identity() * (psi.im * psi.im * m)) / psi.norm_sqr())
    }

    /// `α_i = (∂t ⌟ Ω_i)|_{t=0}` over `(u, v, θ)`.
    pub fn alpha_forms(&self, z: Complex, theta: f64) -> Result<[Vector3<f64>; 3]> {
        let s = self.assemble(FourPoint::new(z, 0.0, theta))?;
        Ok(s.omega.map(|o| Vector3::new(o[(T, U)], o[(T, V_)], o[(T, THETA)])))
    }

    /// Least-squares fit of `dα_i = β₀∧α_i + Λ₀ α_j∧α_k` over the 3-space
    /// `(u, v, θ)`, with `dα_i` by finite differences.
    pub fn structure_coeffs(&self, z: Complex, theta: f64, cfg: &FDConfig) -> Result<StructureFit> {
        let alpha = self.alpha_forms(z, theta)?;
        let sampler = |c: &[f64]| -> Result<Vec<f64>> {
            let a = self.alpha_forms(Complex::new(c[0], c[1]), c[2])?;
            Ok(a.iter().flat_map(|v| v.iter().copied()).collect())
        };
        let jac = fd::fd_jacobian(&sampler, &[z.re, z.im, theta], cfg)?;
        let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
        let mut a = nalgebra::DMatrix::<f64>::zeros(9, 4);
        let mut b = nalgebra::DVector::<f64>::zeros(9);
        for i in 0..3 {
            let (jx, kx) = ((i + 1) % 3, (i + 2) % 3);
            for (r, &(p, q)) in pairs.iter().enumerate() {
                let row = 3 * i + r;
                // (dα_i)_{pq} = ∂_p α_{i,q} − ∂_q α_{i,p}
                b[row] = jac[3 * i + q][p] - jac[3 * i + p][q];
                // (β₀∧α_i)_{pq} = β₀_p α_{i,q} − β₀_q α_{i,p}
                a[(row, p)] += alpha[i][q];
                a[(row, q)] -= alpha[i][p];
                a[(row, 3)] = alpha[jx][p] * alpha[kx][q] - alpha[jx][q] * alpha[kx][p];
            }
        }
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-10 * smax) {
            return Err(Error::DegenerateFrame(format!("structure fit ill-conditioned at {z} (singular values {smin:e}/{smax:e})")));
        }
        let sol = svd
            .solve(&b, 1e-14)
            .map_err(|e| Error::DegenerateFrame(e.to_string()))?;
        let residual = (&a * &sol - &b).amax();
        Ok(StructureFit {
            beta0: Vector3::new(sol[0], sol[1], sol[2]),
            lambda0: sol[3],
            residual,
        })
    }

    /// Solve the 2×2 system relating `(dθ + η, ρ dρ)` to `(β, γ)` on the
    /// slice and compare with the explicit formulas.
    pub fn beta_cross_check(&self, z: Complex, theta: f64) -> Result<BetaCrossCheck> {
        let j = self.jet(z)?;
        let frame = self.slice_and_contact(z, theta)?;
        let s = j.at(j.t_slice, theta, self.v_scale);
        let e = j.slice_embedding();
        let big_theta = e.transpose() * s.theta_form;
        let rho = s.rho;
        let drho = e.transpose() * Vector4::new(rho * j.dlog_rho0[0], rho * j.dlog_rho0[1], rho, 0.0);
        let re_psi = j.psi.re;
        let m = Matrix2::new(-re_psi, -1.0, rho * rho, -re_psi);
        let det = m.determinant();
        if det.abs() < 1e-12 {
            return Err(Error::DegenerateFrame(format!("beta linear system singular at {z}")));
        }
        let inv = m.try_inverse().ok_or_else(|| Error::DegenerateFrame(format!("beta system at {z}")))?;
        let lhs_scale = j.phi.norm_sqr().recip();
        let mut beta = Vector3::zeros();
        let mut gamma = Vector3::zeros();
        for c in 0..3 {
            let sol = inv * Vector2::new(lhs_scale * big_theta[c], rho * drho[c]);
            beta[c] = sol[0];
            gamma[c] = sol[1];
        }
        let gamma_def = (0..3).fold(Vector3::zeros(), |acc, i| acc + frame.omega[i] * frame.x[i]);
        let psi_rebuilt = Complex::new(-beta[2], rho);
        Ok(BetaCrossCheck {
            beta_system: beta,
            beta_explicit: frame.beta,
            beta_residual: (beta - frame.beta).amax(),
            gamma_residual: (gamma - gamma_def).amax(),
            psi_residual: (psi_rebuilt - j.psi).norm(),
        })
    }
}

/// Everything that depends only on `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub z: Complex,
    pub psi: Complex,
    pub dpsi: Complex,
    pub phi: Complex,
    pub dphi: Complex,
    pub rho0: f64,
    pub dlog_rho0: [f64; 2],
    pub dlog_im_psi: [f64; 2],
    pub t_slice: f64,
    pub dt_slice: [f64; 2],
    pub p: [f64; 3],
    pub dp: [[f64; 3]; 2],
    pub m: f64,
    pub xi: [f64; 2],
}

impl SurfaceJet {
    /// Assemble the 4D tensors at `(z, t, θ)`.
    pub fn at(&self, t: f64, theta: f64, v_scale: f64) -> FourSample {
        let rho = t.exp() * self.rho0;
        let x = self.p.map(|p| rho * p);
        let dx: [Vector4<f64>; 3] = std::array::from_fn(|i| {
            Vector4::new(
                rho * (self.p[i] * self.dlog_rho0[0] + self.dp[0][i]),
                rho * (self.p[i] * self.dlog_rho0[1] + self.dp[1][i]),
                rho * self.p[i],
                0.0,
            )
        });
        let v = v_scale * self.phi.im / rho;
        let re_phi = self.phi.re;
        let eta = Vector4::new(
            re_phi * self.dlog_rho0[0] + self.xi[0],
            re_phi * self.dlog_rho0[1] + self.xi[1],
            re_phi,
            0.0,
        );
        let theta_form = eta + Vector4::new(0.0, 0.0, 0.0, 1.0);
        let omega: [Matrix4<f64>; 3] = std::array::from_fn(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            wedge(&theta_form, &dx[i]) + wedge(&dx[j], &dx[k]) * v
        });
        let g = theta_form * theta_form.transpose() / v + dx.iter().fold(Matrix4::zeros(), |acc, d| acc + d * d.transpose()) * v;
        FourSample {
            point: FourPoint::new(self.z, t, theta),
            x,
            rho,
            v,
            dx,
            eta,
            theta_form,
            omega,
            g,
        }
    }

    /// Columns are the pushforwards of `∂u, ∂v, ∂θ` along `t = t_slice(z)`.
    pub fn slice_embedding(&self) -> nalgebra::Matrix4x3<f64> {
        nalgebra::Matrix4x3::new(
            1.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, //
            self.dt_slice[0], self.dt_slice[1], 0.0, //
            0.0, 0.0, 1.0,
        )
    }
}

/// `(α∧β)_{ab} = α_a β_b − α_b β_a`.
pub fn wedge(a: &Vector4<f64>, b: &Vector4<f64>) -> Matrix4<f64> {
    a * b.transpose() - b * a.transpose()
}

/// The assembled tensors at a point of `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourSample {
    pub point: FourPoint,
    pub x: [f64; 3],
    pub rho: f64,
    pub v: f64,
    pub dx: [Vector4<f64>; 3],
    pub eta: Vector4<f64>,
    /// `dθ + η`.
    pub theta_form: Vector4<f64>,
    pub omega: [Matrix4<f64>; 3],
    pub g: Matrix4<f64>,
}

/// Slice quantities in coordinates `(u, v, θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceFrame {
    pub z: Complex,
    pub theta: f64,
    pub t_slice: f64,
    pub omega: [Vector3<f64>; 3],
    pub beta: Vector3<f64>,
    pub g3: Matrix3<f64>,
    /// `Σ ω_i ⊗ ω_i`.
    pub gs: Matrix3<f64>,
    pub rho: f64,
    pub v: f64,
    pub x: [f64; 3],
    pub psi: Complex,
    pub phi: Complex,
}

impl SliceFrame {
    /// `max |g₃ − g_s − β⊗β|`.
    pub fn split_residual(&self) -> f64 {
        (self.g3 - self.gs - self.beta * self.beta.transpose()).amax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureFit {
    pub beta0: Vector3<f64>,
    pub lambda0: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaCrossCheck {
    pub beta_system: Vector3<f64>,
    pub beta_explicit: Vector3<f64>,
    pub beta_residual: f64,
    pub gamma_residual: f64,
    pub psi_residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{BlaschkePsi, BlaschkeSpec};

    fn blaschke() -> HolomorphicData {
        let vertices = [Complex::new(1.0, 0.0), I, Complex::new(-1.0, 0.0)];
        let spec = BlaschkeSpec::vertex_targeted(&vertices, 10.0, 2).unwrap();
        HolomorphicData::new(Covering::default(), Arc::new(BlaschkePsi::new(spec).unwrap())).unwrap()
    }

    fn pts() -> Vec<Complex> {
        sampling::disc_samples(20, 0.8, 9)
    }

    #[test]
    fn momentum_and_potential() {
        let d = blaschke();
        for z in pts() {
            let (x, rho) = d.momentum_map(z, 0.3).unwrap();
            assert!((x.iter().map(|c| c * c).sum::<f64>().sqrt() - rho).abs() < 1e-14 * rho);
            let (x2, _) = d.momentum_map(z, 0.3 + 0.7).unwrap();
            for i in 0..3 {
                assert!((x2[i] - 0.7f64.exp() * x[i]).abs() < 1e-14 * rho.max(1.0));
            }
            let v0 = d.potential_v(z, 0.0).unwrap();
            let v1 = d.potential_v(z, 1.2).unwrap();
            assert!((v1 - (-1.2f64).exp() * v0).abs() < 1e-13 * v0);
            // On the canonical slice V = |φ|².
            let phi = -1.0 / d.psi_fn().eval(z).unwrap();
            assert!((v0 - phi.norm_sqr()).abs() < 1e-12);
        }
        // ψ = 2i gives ρ₀ = 2, so ρ = 1 at t = −ln 2.
        let flat = HolomorphicData::flat_reference(0.5).unwrap();
        assert!((flat.potential_v(Complex::new(0.2, 0.1), (0.5f64).ln()).unwrap() - 0.5).abs() < 1e-15);
        // ρ = 1 where Im ψ = 1 (flat data with Im φ = 1).
        let unit = HolomorphicData::flat_reference(1.0).unwrap();
        assert!((unit.momentum_map(Complex::new(0.3, 0.0), 0.0).unwrap().1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn xi_constant_integrand() {
        // Flat data over the chart: f = Im φ · 4/(1 + |z|²)²; near 0 this is
        // ≈ 4c, so check against the exact homotopy integral instead.
        let c = 0.5;
        let d = HolomorphicData::flat_reference(c).unwrap();
        assert_eq!(d.xi_form(Complex::new(0.0, 0.0)).unwrap(), [0.0, 0.0]);
        let z = Complex::new(0.3, -0.2);
        let r2 = z.norm_sqr();
        // ∫₀¹ s·4c/(1 + s²r²)² ds = 2c/(1 + r²).
        let k = 2.0 * c / (1.0 + r2);
        let xi = d.xi_form(z).unwrap();
        assert!((xi[0] - (-k * z.im)).abs() < 1e-13 && (xi[1] - k * z.re).abs() < 1e-13);
    }

    #[test]
    fn xi_exterior_derivative() {
        let d = blaschke();
        let cfg = FDConfig::default();
        for z in pts() {
            let a = |c: &[f64]| d.xi_form(Complex::new(c[0], c[1])).map(|x| x.to_vec());
            let dxi = fd::d_one_form(&a, &[z.re, z.im], &cfg).unwrap()[(0, 1)];
            let j = d.jet(z).unwrap();
            assert!((dxi - j.phi.im * j.m).abs() < 1e-5, "{z}: {dxi} vs {}", j.phi.im * j.m);
        }
    }

    #[test]
    fn form_identities() {
        let d = blaschke();
        for (k, z) in pts().into_iter().enumerate() {
            let pt = FourPoint::new(z, 0.1 * k as f64 - 0.5, 0.3 * k as f64);
            let s = d.assemble(pt).unwrap();
            let phi = -1.0 / d.psi_fn().eval(z).unwrap();
            assert!((s.eta[T] - phi.re).abs() < 1e-14);
            assert_eq!(s.eta[THETA], 0.0);
            for i in 0..3 {
                assert!((s.omega[i][(THETA, T)] - s.x[i]).abs() < 1e-12 * s.rho.max(1.0));
                let contraction = s.omega[i].row(THETA).transpose();
                assert!((contraction - s.dx[i]).amax() < 1e-8);
                assert_eq!(s.omega[i], -s.omega[i].transpose());
            }
            assert!((s.g[(THETA, THETA)] - 1.0 / s.v).abs() < 1e-12 / s.v);
            let gtt = phi.re * phi.re / s.v + s.v * s.rho * s.rho;
            assert!((s.g[(T, T)] - gtt).abs() < 1e-12 * gtt);
            assert!(d.metric(pt).is_ok());
            // e^t scaling and θ-invariance.
            let s0 = d.assemble(FourPoint::new(z, 0.0, 0.0)).unwrap();
            assert!((s.g - s0.g * pt.t.exp()).amax() < 1e-10 * s.g.amax());
            let st = d.assemble(FourPoint::new(z, pt.t, pt.theta + 1.0)).unwrap();
            assert_eq!(st.g, s.g);
        }
    }

    #[test]
    fn slice_identities() {
        let d = blaschke();
        for z in pts() {
            let f = d.slice_and_contact(z, 0.4).unwrap();
            assert_eq!(f.t_slice, 0.0);
            assert!((f.rho - f.psi.im).abs() < 1e-14);
            assert!((f.v - f.phi.norm_sqr()).abs() < 1e-12);
            assert!(f.split_residual() < 1e-10, "{}", f.split_residual());
            assert!(f.g3.cholesky().is_some());
            // Orbit circle length 2π|ψ|.
            assert!((f.g3[(2, 2)].sqrt() - f.psi.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn g_sigma_is_quotient_metric() {
        let d = blaschke();
        for z in pts() {
            let gs = d.g_sigma(z).unwrap();
            let f = d.slice_and_contact(z, 0.0).unwrap();
            let g = f.g3;
            let schur = Matrix2::new(
                g[(0, 0)] - g[(0, 2)] * g[(2, 0)] / g[(2, 2)],
                g[(0, 1)] - g[(0, 2)] * g[(2, 1)] / g[(2, 2)],
                g[(1, 0)] - g[(1, 2)] * g[(2, 0)] / g[(2, 2)],
                g[(1, 1)] - g[(1, 2)] * g[(2, 1)] / g[(2, 2)],
            );
            assert!((gs - schur).amax() < 1e-9 * gs.amax(), "{gs} vs {schur}");
            // Lower bound (1/2)(Im ψ/|ψ|)²·m.
            let j = d.jet(z).unwrap();
            let bound = 0.5 * (j.psi.im / j.psi.norm()).powi(2) * j.m;
            let eig = gs.symmetric_eigenvalues();
            assert!(eig.min() >= bound * (1.0 - 1e-12));
        }
    }

    #[test]
    fn gauge_moves_slice() {
        let gauge = Rho0Policy::Gauge { offset: 0.3, slope: [0.2, -0.1] };
        let d = blaschke().with_rho0(gauge);
        let cfg = FDConfig::default();
        for z in pts().into_iter().take(5) {
            let f = d.slice_and_contact(z, 0.2).unwrap();
            let want = -(0.3 + 0.2 * z.re - 0.1 * z.im);
            assert!((f.t_slice - want).abs() < 1e-14);
            assert!((f.rho - f.psi.im).abs() < 1e-13);
            assert!(f.split_residual() < 1e-10);
            let fit = d.structure_coeffs(z, 0.2, &cfg).unwrap();
            assert!((fit.lambda0.ln() - f.t_slice).abs() < 1e-4, "{} vs {}", fit.lambda0.ln(), f.t_slice);
            assert!(fit.residual < 1e-4);
        }
    }

    #[test]
    fn structure_canonical() {
        let d = blaschke();
        let cfg = FDConfig::default();
        for z in pts().into_iter().take(8) {
            let fit = d.structure_coeffs(z, 0.0, &cfg).unwrap();
            assert!((fit.lambda0 - 1.0).abs() < 1e-4, "{}", fit.lambda0);
            assert!(fit.residual < 1e-4);
        }
    }

    #[test]
    fn beta_system_agrees() {
        let d = blaschke();
        for z in pts() {
            let c = d.beta_cross_check(z, 1.0).unwrap();
            assert!(c.beta_residual < 1e-6, "{c:?}");
            assert!(c.gamma_residual < 1e-6, "{c:?}");
            assert!(c.psi_residual < 1e-6, "{c:?}");
        }
    }

    #[test]
    fn rejects_bad_data() {
        let bad: Arc<dyn HoloFn> = Arc::new(Constant(Complex::new(0.0, -1.0)));
        assert!(matches!(HolomorphicData::new(Covering::default(), bad), Err(Error::InvalidData(_))));
        assert!(HolomorphicData::flat_reference(0.0).is_err());
    }
}
