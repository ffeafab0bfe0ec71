//! Numerical checks of the hyperkähler, curvature and contact identities.
//!
//! Every check reports a residual, the budget it is held to and an estimate
//! of the numerical noise floor. A check passes only when the residual is
//! under budget and the budget exceeds ten times the noise floor.

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{FourPoint, HolomorphicData, SliceFrame};
use crate::complex::{Complex, I};
use crate::error::{Error, Result};
use crate::fd::{self, FDConfig};
use crate::sampling;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub residual: f64,
    pub budget: f64,
    pub noise_floor: f64,
    pub passed: bool,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CheckReport {
    pub fn new(name: &str, residual: f64, budget: f64, noise_floor: f64, samples: usize) -> Self {
        Self {
            name: name.to_string(),
            residual,
            budget,
            noise_floor,
            passed: residual.is_finite() && residual < budget && budget > 10.0 * noise_floor,
            samples,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// A check that could not be evaluated.
    pub fn failed(name: &str, budget: f64, err: &Error) -> Self {
        Self {
            name: name.to_string(),
            residual: f64::INFINITY,
            budget,
            noise_floor: 0.0,
            passed: false,
            samples: 0,
            note: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckReport>,
    pub all_passed: bool,
}

impl SuiteReport {
    pub fn new(checks: Vec<CheckReport>) -> Self {
        let all_passed = checks.iter().all(|c| c.passed);
        Self { checks, all_passed }
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

// ---------------------------------------------------------------------------
// Elementary residuals

/// `|∂f/∂z̄| = ½|f_u + i f_v|` by finite differences.
pub fn cauchy_riemann_residual(f: &(dyn Fn(Complex) -> Result<Complex> + Sync), z: Complex, cfg: &FDConfig) -> Result<f64> {
    let sampler = |c: &[f64]| {
        let w = f(Complex::new(c[0], c[1]))?;
        Ok(vec![w.re, w.im])
    };
    let jac = fd::fd_jacobian(&sampler, &[z.re, z.im], cfg)?;
    let fu = Complex::new(jac[0][0], jac[1][0]);
    let fv = Complex::new(jac[0][1], jac[1][1]);
    Ok(0.5 * (fu + I * fv).norm())
}

/// Components of `dη + *dV` in `(u, v, t)`, with `*` taken in the flat metric
/// and orientation of `(x₁, x₂, x₃)` and pulled back by `x(u, v, t)`.
pub fn curl_residual(data: &HolomorphicData, z: Complex, t: f64, cfg: &FDConfig) -> Result<f64> {
    let sampler = |c: &[f64]| -> Result<Vec<f64>> {
        let s = data.assemble(FourPoint::new(Complex::new(c[0], c[1]), c[2], 0.0))?;
        Ok(vec![s.eta[0], s.eta[1], s.eta[2], s.v])
    };
    let jac = fd::fd_jacobian(&sampler, &[z.re, z.im, t], cfg)?;
    let s = data.assemble(FourPoint::new(z, t, 0.0))?;
    // A[i][a] = ∂x_i/∂y_a.
    let a = Matrix3::from_fn(|i, k| s.dx[i][k]);
    let grad_y = Vector3::new(jac[3][0], jac[3][1], jac[3][2]);
    let a_inv_t = a
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateFrame(format!("momentum map not a local chart at {z}")))?;
    let grad_x = a_inv_t * grad_y;
    // (*dV)_{jk} = ε_{ijk} ∂_i V in x-coordinates.
    let star_x = Matrix3::new(0.0, grad_x[2], -grad_x[1], -grad_x[2], 0.0, grad_x[0], grad_x[1], -grad_x[0], 0.0);
    let star_y = a.transpose() * star_x * a;
    let d_eta = Matrix3::from_fn(|p, q| jac[q][p] - jac[p][q]);
    Ok((d_eta + star_y).amax())
}

/// The two halves of the holomorphic-data criterion at `z` (with `t = 0`):
/// `|dξ − ρV·m du∧dv|` and the Cauchy–Riemann residual of
/// `φ_A = η(∂t) + iρV` assembled from the tensors.
pub fn xi_residuals(data: &HolomorphicData, z: Complex, cfg: &FDConfig) -> Result<(f64, f64)> {
    let xi = |c: &[f64]| data.xi_form(Complex::new(c[0], c[1])).map(|x| x.to_vec());
    let dxi = fd::d_one_form(&xi, &[z.re, z.im], cfg)?[(0, 1)];
    let s = data.assemble(FourPoint::new(z, 0.0, 0.0))?;
    let m = data.covering().phi(z)?.metric_factor;
    let dxi_res = (dxi - s.rho * s.v * m).abs();
    let phi_a = |w: Complex| -> Result<Complex> {
        let s = data.assemble(FourPoint::new(w, 0.0, 0.0))?;
        Ok(Complex::new(s.eta[2], s.rho * s.v))
    };
    let cr = cauchy_riemann_residual(&phi_a, z, cfg)?;
    Ok((dxi_res, cr))
}

/// Residuals of the quaternion relations for `J_i = g⁻¹Ω_iᵀ`, so that
/// `Ω_i(X, Y) = g(J_i X, Y)`. Operator norms are taken with respect to `g`,
/// i.e. in the orthonormal frame of its Cholesky factor `g = LLᵀ`, where
/// `J_i` becomes `Lᵀ J_i L⁻ᵀ = L⁻¹Ω_iᵀL⁻ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuaternionResidual {
    /// `max_i ‖J_i² + 1‖`.
    pub squares: f64,
    /// `‖J₁J₂ − J₃‖`.
    pub product: f64,
    /// `max_i ‖J_iᵀ J_i − 1‖`: each `J_i` is a `g`-isometry.
    pub orthogonality: f64,
}

impl QuaternionResidual {
    pub fn max(&self) -> f64 {
        self.squares.max(self.product).max(self.orthogonality)
    }
}

fn op_norm(m: &Matrix4<f64>) -> f64 {
    m.singular_values().max()
}

pub fn quaternion_check(g: &Matrix4<f64>, omega: &[Matrix4<f64>; 3]) -> Result<QuaternionResidual> {
    let chol = g
        .cholesky()
        .ok_or_else(|| Error::DegenerateMetric("g is not positive definite".into()))?;
    let l = chol.l();
    let frame = |w: &Matrix4<f64>| -> Result<Matrix4<f64>> {
        let a = l
            .solve_lower_triangular(&w.transpose())
            .ok_or_else(|| Error::DegenerateMetric("singular Cholesky factor".into()))?;
        let b = l
            .solve_lower_triangular(&a.transpose())
            .ok_or_else(|| Error::DegenerateMetric("singular Cholesky factor".into()))?;
        Ok(b.transpose())
    };
    let j = [frame(&omega[0])?, frame(&omega[1])?, frame(&omega[2])?];
    let id = Matrix4::identity();
    let squares = j.iter().map(|ji| op_norm(&(ji * ji + id))).fold(0.0, f64::max);
    let product = op_norm(&(j[0] * j[1] - j[2]));
    let orthogonality = j.iter().map(|ji| op_norm(&(ji.transpose() * ji - id))).fold(0.0, f64::max);
    Ok(QuaternionResidual {
        squares,
        product,
        orthogonality,
    })
}

/// `max_i max |dΩ_i|` at a point, by finite differences over all four coordinates.
pub fn closedness(data: &HolomorphicData, pt: FourPoint, cfg: &FDConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let sampler = |c: &[f64]| -> Result<Vec<f64>> {
            let s = data.assemble(FourPoint::from_coords(c))?;
            Ok(s.omega[i].iter().copied().collect())
        };
        // nalgebra stores column-major, so entry (r, c) sits at c*4 + r;
        // transposing an antisymmetric form only flips the sign.
        let d = fd::d_two_form(&sampler, &pt.coords(), cfg)?;
        worst = d.iter().fold(worst, |w, x| w.max(x.abs()));
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Curvature

/// A metric given pointwise in some coordinate system on `ℝ⁴`.
pub type MetricSampler<'a> = dyn Fn(&[f64]) -> Result<Matrix4<f64>> + Sync + 'a;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub point: [f64; 4],
    /// `Γ^a_{bc}` flattened as `a*16 + b*4 + c`.
    pub christoffel: Vec<f64>,
    pub max_riemann: f64,
    pub ricci_norm: f64,
    /// `max |R(h) − R(h/2)|` over all-lower Riemann components.
    pub noise_floor: f64,
    pub h: f64,
}

fn christoffel(metric: &MetricSampler<'_>, x: &[f64], cfg: &FDConfig) -> Result<Vec<f64>> {
    let g = metric(x)?;
    let ginv = g
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric(format!("singular metric at {x:?}")))?;
    let sampler = |c: &[f64]| -> Result<Vec<f64>> { Ok(metric(c)?.iter().copied().collect()) };
    let jac = fd::fd_jacobian(&sampler, x, cfg)?;
    // ∂_e g_{ab} = jac[b*4 + a][e] (column-major storage, symmetric anyway).
    let dg = |e: usize, a: usize, b: usize| jac[b * 4 + a][e];
    let mut gamma = vec![0.0; 64];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let mut sum = 0.0;
                for d in 0..4 {
                    sum += ginv[(a, d)] * (dg(b, d, c) + dg(c, d, b) - dg(d, b, c));
                }
                gamma[a * 16 + b * 4 + c] = 0.5 * sum;
            }
        }
    }
    Ok(gamma)
}

/// All-lower Riemann tensor `R_{abcd}` flattened as `a*64 + b*16 + c*4 + d`,
/// plus the Christoffel symbols at the point.
fn riemann(metric: &MetricSampler<'_>, x: &[f64], cfg: &FDConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let gamma = christoffel(metric, x, cfg)?;
    let sampler = |c: &[f64]| christoffel(metric, c, cfg);
    let dgamma = fd::fd_jacobian(&sampler, x, cfg)?;
    let g = metric(x)?;
    let gm = |a: usize, b: usize, c: usize| gamma[a * 16 + b * 4 + c];
    let dgm = |e: usize, a: usize, b: usize, c: usize| dgamma[a * 16 + b * 4 + c][e];
    let mut upper = vec![0.0; 256];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut r = dgm(c, a, d, b) - dgm(d, a, c, b);
                    for e in 0..4 {
                        r += gm(a, c, e) * gm(e, d, b) - gm(a, d, e) * gm(e, c, b);
                    }
                    upper[a * 64 + b * 16 + c * 4 + d] = r;
                }
            }
        }
    }
    let mut lower = vec![0.0; 256];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    lower[a * 64 + b * 16 + c * 4 + d] = (0..4).map(|e| g[(a, e)] * upper[e * 64 + b * 16 + c * 4 + d]).sum();
                }
            }
        }
    }
    Ok((lower, gamma))
}

fn ricci_from_lower(lower: &[f64], ginv: &Matrix4<f64>) -> Matrix4<f64> {
    // Ric_{bd} = g^{ac} R_{abcd}.
    Matrix4::from_fn(|b, d| {
        let mut s = 0.0;
        for a in 0..4 {
            for c in 0..4 {
                s += ginv[(a, c)] * lower[a * 64 + b * 16 + c * 4 + d];
            }
        }
        s
    })
}

/// Curvature at `x` with a noise floor from re-running at `h/2`.
pub fn curvature(metric: &MetricSampler<'_>, x: &[f64], cfg: &FDConfig) -> Result<CurvatureReport> {
    let (lower, gamma) = riemann(metric, x, cfg)?;
    let (lower_half, _) = riemann(metric, x, &cfg.halved())?;
    let ginv = metric(x)?
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric(format!("singular metric at {x:?}")))?;
    let ric = ricci_from_lower(&lower, &ginv);
    let noise_floor = lower.iter().zip(&lower_half).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(CurvatureReport {
        point: [x[0], x[1], x[2], x[3]],
        christoffel: gamma,
        max_riemann: lower.iter().fold(0.0, |m, r| m.max(r.abs())),
        ricci_norm: ric.norm(),
        noise_floor,
        h: cfg.h,
    })
}

/// Metric sampler for holomorphic data in coordinates `(u, v, t, θ)`.
pub fn data_metric(data: &HolomorphicData) -> impl Fn(&[f64]) -> Result<Matrix4<f64>> + Sync + '_ {
    move |c: &[f64]| Ok(data.assemble(FourPoint::from_coords(c))?.g)
}

/// Curvature at each point, in input order.
pub fn curvature_scan(data: &HolomorphicData, pts: &[FourPoint], cfg: &FDConfig) -> Result<Vec<CurvatureReport>> {
    let g = data_metric(data);
    pts.par_iter().map(|p| curvature(&g, &p.coords(), cfg)).collect()
}

/// `max|R|(h) / max|R|(h/2)` for a metric whose exact curvature vanishes,
/// where the computed tensor is pure truncation error.
pub fn flat_convergence_ratio(metric: &MetricSampler<'_>, x: &[f64], cfg: &FDConfig) -> Result<f64> {
    let coarse = riemann(metric, x, cfg)?.0;
    let fine = riemann(metric, x, &cfg.halved())?.0;
    let max = |v: &[f64]| v.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(max(&coarse) / max(&fine))
}

// ---------------------------------------------------------------------------
// Contact structure

/// Coefficient of `α∧dα` on `du∧dv∧dθ`.
fn three_form(alpha: &Vector3<f64>, dalpha: &DMatrix<f64>) -> f64 {
    alpha[0] * dalpha[(1, 2)] - alpha[1] * dalpha[(0, 2)] + alpha[2] * dalpha[(0, 1)]
}

fn slice_sampler<'a>(data: &'a HolomorphicData, pick: impl Fn(&SliceFrame) -> Vec<f64> + Sync + 'a) -> impl Fn(&[f64]) -> Result<Vec<f64>> + Sync + 'a {
    move |c: &[f64]| Ok(pick(&data.slice_and_contact(Complex::new(c[0], c[1]), c[2])?))
}

/// `max_i max |dω_i − β∧ω_i − ω_j∧ω_k|` on the slice.
pub fn structure_residual(data: &HolomorphicData, z: Complex, theta: f64, cfg: &FDConfig) -> Result<f64> {
    let frame = data.slice_and_contact(z, theta)?;
    let sampler = slice_sampler(data, |f| f.omega.iter().flat_map(|w| w.iter().copied()).collect());
    let jac = fd::fd_jacobian(&sampler, &[z.re, z.im, theta], cfg)?;
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let d = jac[3 * i + q][p] - jac[3 * i + p][q];
            let w = |a: &Vector3<f64>, b: &Vector3<f64>| a[p] * b[q] - a[q] * b[p];
            let r = d - w(&frame.beta, &frame.omega[i]) - w(&frame.omega[j], &frame.omega[k]);
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

/// Spread of `ω_c∧dω_c` over unit directions `c`, relative to its size.
pub fn tautness_residual(data: &HolomorphicData, z: Complex, theta: f64, cfg: &FDConfig) -> Result<f64> {
    let frame = data.slice_and_contact(z, theta)?;
    let sampler = slice_sampler(data, |f| f.omega.iter().flat_map(|w| w.iter().copied()).collect());
    let jac = fd::fd_jacobian(&sampler, &[z.re, z.im, theta], cfg)?;
    let s3 = 1.0 / 3f64.sqrt();
    let dirs = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [s3, s3, s3]];
    let vols: Vec<f64> = dirs
        .iter()
        .map(|c| {
            let alpha = frame.omega[0] * c[0] + frame.omega[1] * c[1] + frame.omega[2] * c[2];
            let dalpha = DMatrix::from_fn(3, 3, |p, q| (0..3).map(|i| c[i] * (jac[3 * i + q][p] - jac[3 * i + p][q])).sum());
            three_form(&alpha, &dalpha)
        })
        .collect();
    let scale = vols[0].abs().max(1.0);
    Ok(vols.iter().map(|v| (v - vols[0]).abs()).fold(0.0, f64::max) / scale)
}

/// `β∧dβ / (ω₁∧ω₂∧ω₃)` and `|b|²` with `β = Σ b_i ω_i`.
pub fn contact_ratio(data: &HolomorphicData, z: Complex, theta: f64, cfg: &FDConfig) -> Result<(f64, f64)> {
    let frame = data.slice_and_contact(z, theta)?;
    let sampler = slice_sampler(data, |f| f.beta.iter().copied().collect());
    let dbeta = fd::d_one_form(&sampler, &[z.re, z.im, theta], cfg)?;
    let w = Matrix3::from_rows(&[frame.omega[0].transpose(), frame.omega[1].transpose(), frame.omega[2].transpose()]);
    let vol = w.determinant();
    if vol.abs() < 1e-300 {
        return Err(Error::DegenerateFrame(format!("omega frame degenerate at {z}")));
    }
    let b = w
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateFrame(format!("omega frame degenerate at {z}")))?
        * frame.beta;
    Ok((three_form(&frame.beta, &dbeta) / vol, b.norm_squared()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaAnalysis {
    /// Common zeros of `d Im ψ` and `Re ψ`.
    pub roots: Vec<Complex>,
    /// Critical points of `ψ` found where `Re ψ ≠ 0`.
    pub critical_points: Vec<Complex>,
    pub seeds: usize,
    pub skipped_seeds: usize,
    pub min_separation: f64,
    /// Worst `|ratio + |b|²| / max(1, |b|²)` over non-root samples.
    pub identity_residual: f64,
    /// Largest (least negative) ratio over non-root samples.
    pub max_ratio: f64,
    pub contact_samples: usize,
}

/// Radius inside which zero-locus roots are reported.
pub const BETA_ROOT_RADIUS: f64 = 0.95;

/// Locate the zero locus of `β` by damped Newton on `ψ' = 0` from an
/// `n × n` seed grid, keep roots with `Re ψ = 0`, and sample the contact
/// identity at `contact_samples` points.
pub fn beta_analysis(data: &HolomorphicData, n: usize, contact_samples: usize, seed: u64, cfg: &FDConfig) -> Result<BetaAnalysis> {
    if data.is_constant() {
        return Err(Error::InvalidData("beta analysis requires non-constant phi".into()));
    }
    let psi = data.psi_fn().clone();
    let seeds = sampling::square_grid(n, BETA_ROOT_RADIUS, BETA_ROOT_RADIUS);
    let newton = |mut z: Complex| -> Option<Complex> {
        let h = 1e-5;
        for _ in 0..60 {
            let d = psi.deriv(z).ok()?;
            if d.norm() < 1e-13 {
                return Some(z);
            }
            let dd = (psi.deriv(z + h).ok()? - psi.deriv(z - h).ok()?) / (2.0 * h);
            if dd.norm() == 0.0 {
                return None;
            }
            let mut step = -d / dd;
            // Damping: halve until |ψ'| decreases and the iterate stays inside.
            let mut accepted = false;
            for _ in 0..30 {
                let cand = z + step;
                if cand.norm() < 0.999 {
                    if let Ok(dc) = psi.deriv(cand) {
                        if dc.norm() < d.norm() {
                            z = cand;
                            accepted = true;
                            break;
                        }
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                return None;
            }
            if step.norm() < 1e-14 {
                return Some(z);
            }
        }
        psi.deriv(z).ok().filter(|d| d.norm() < 1e-9).map(|_| z)
    };
    let results: Vec<Option<Complex>> = seeds.par_iter().map(|&s| newton(s)).collect();
    let skipped_seeds = results.iter().filter(|r| r.is_none()).count();
    let mut critical: Vec<Complex> = Vec::new();
    for z in results.into_iter().flatten() {
        if z.norm() < BETA_ROOT_RADIUS && !critical.iter().any(|c| (c - z).norm() < 1e-6) {
            critical.push(z);
        }
    }
    critical.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let (roots, critical_points): (Vec<Complex>, Vec<Complex>) = critical
        .into_iter()
        .partition(|&z| psi.eval(z).map(|p| p.re.abs() < 1e-8).unwrap_or(false));
    let mut min_separation = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            min_separation = min_separation.min((a - b).norm());
        }
    }

    let samples = sampling::disc_samples(contact_samples, 0.9, seed);
    let ratios: Vec<Result<(f64, f64)>> = samples
        .par_iter()
        .filter(|z| roots.iter().all(|r| (*r - **z).norm() > 1e-3))
        .map(|&z| contact_ratio(data, z, 0.0, cfg))
        .collect();
    let mut identity_residual: f64 = 0.0;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut count = 0;
    for r in ratios {
        let (ratio, b2) = r?;
        identity_residual = identity_residual.max((ratio + b2).abs() / b2.max(1.0));
        max_ratio = max_ratio.max(ratio);
        count += 1;
    }
    Ok(BetaAnalysis {
        roots,
        critical_points,
        seeds: seeds.len(),
        skipped_seeds,
        min_separation,
        identity_residual,
        max_ratio,
        contact_samples: count,
    })
}

// ---------------------------------------------------------------------------
// Suite

/// Per-check budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    pub quaternion: f64,
    pub closedness: f64,
    pub curl: f64,
    pub cauchy_riemann: f64,
    pub xi: f64,
    pub slice: f64,
    pub split: f64,
    pub structure: f64,
    pub lambda0: f64,
    pub beta: f64,
    pub psi_identity: f64,
    pub tautness: f64,
    pub contact: f64,
    /// Flat reference: bound on `max |R|` and on its noise floor.
    pub flat_riemann: f64,
    pub flat_noise: f64,
    /// Non-flat data: `‖Ric‖` bound relative to `max |R|`, used where the
    /// noise floor itself is not resolved.
    pub ricci_relative: f64,
    /// Agreement of `g₃` and `g_s` lengths on projected-horizontal paths.
    pub horizontal: f64,
    /// Minimum `g₃ − g_s` length gap on the non-horizontal control path.
    pub control_gap: f64,
    /// Slack in the log-variation inequality.
    pub log_variation_slack: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            quaternion: 1e-8,
            closedness: 1e-4,
            curl: 1e-4,
            cauchy_riemann: 1e-8,
            xi: 1e-5,
            slice: 1e-8,
            split: 1e-10,
            structure: 1e-4,
            lambda0: 1e-4,
            beta: 1e-6,
            psi_identity: 1e-6,
            tautness: 1e-4,
            contact: 1e-4,
            flat_riemann: 1e-3,
            flat_noise: 1e-4,
            ricci_relative: 1e-4,
            horizontal: 1e-8,
            control_gap: 1e-3,
            log_variation_slack: 1e-3,
        }
    }
}

impl Budgets {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.quaternion,
            self.closedness,
            self.curl,
            self.cauchy_riemann,
            self.xi,
            self.slice,
            self.split,
            self.structure,
            self.lambda0,
            self.beta,
            self.psi_identity,
            self.tautness,
            self.contact,
            self.flat_riemann,
            self.flat_noise,
            self.ricci_relative,
            self.horizontal,
            self.control_gap,
            self.log_variation_slack,
        ];
        if all.iter().all(|b| *b > 0.0 && b.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidData("all tolerance budgets must be positive".into()))
        }
    }
}

/// Sampling radius of the suite. Deep inside horoballs `|dΦ|²` falls below
/// `1e-8` and the `(u, v, t, θ)` chart is numerically degenerate, so the
/// algebraic residuals degrade like `ε/|dΦ|²`; at 0.6 the sample stays
/// above `|dΦ|² ≈ 1e-5`.
pub const DEFAULT_SUITE_RADIUS: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    /// Interior sample count for the point checks.
    pub points: usize,
    pub radius: f64,
    pub seed: u64,
    pub fd: FDConfig,
    pub budgets: Budgets,
    /// Seed grid resolution for the β zero locus (0 disables).
    pub beta_grid: usize,
    pub contact_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            points: 50,
            radius: DEFAULT_SUITE_RADIUS,
            seed: 2024,
            fd: FDConfig::default(),
            budgets: Budgets::default(),
            beta_grid: 40,
            contact_samples: 100,
        }
    }
}

/// Max of a per-point residual at `h` with the noise floor from `h/2`.
fn fd_check<F>(name: &str, budget: f64, pts: &[FourPoint], cfg: &FDConfig, f: F) -> CheckReport
where
    F: Fn(&FourPoint, &FDConfig) -> Result<f64> + Sync + Send,
{
    let half = cfg.halved();
    let out: Result<Vec<(f64, f64)>> = pts
        .par_iter()
        .map(|p| {
            let r = f(p, cfg)?;
            let r2 = f(p, &half)?;
            Ok((r, (r - r2).abs()))
        })
        .collect();
    match out {
        Ok(v) => {
            let residual = v.iter().map(|x| x.0).fold(0.0, f64::max);
            let floor = v.iter().map(|x| x.1).fold(0.0, f64::max);
            CheckReport::new(name, residual, budget, floor, pts.len())
        }
        Err(e) => CheckReport::failed(name, budget, &e),
    }
}

/// Max of an algebraic per-point residual `(absolute, scale)`, measured
/// relative to `max(1, scale)`; the noise floor is rounding.
fn algebraic_check<F>(name: &str, budget: f64, pts: &[FourPoint], f: F) -> CheckReport
where
    F: Fn(&FourPoint) -> Result<(f64, f64)> + Sync + Send,
{
    let out: Result<Vec<f64>> = pts.par_iter().map(|p| f(p).map(|(r, s)| r / s.max(1.0))).collect();
    match out {
        Ok(v) => {
            let residual = v.into_iter().fold(0.0, f64::max);
            CheckReport::new(name, residual, budget, 64.0 * f64::EPSILON, pts.len())
        }
        Err(e) => CheckReport::failed(name, budget, &e),
    }
}

/// The full identity suite for one set of holomorphic data.
pub fn run_suite(data: &HolomorphicData, cfg: &SuiteConfig) -> SuiteReport {
    let zs = sampling::disc_samples(cfg.points, cfg.radius, cfg.seed);
    let ts = sampling::uniform_samples(cfg.points, -1.0, 1.0, cfg.seed ^ 0x74);
    let thetas = sampling::uniform_samples(cfg.points, 0.0, std::f64::consts::TAU, cfg.seed ^ 0x7468);
    let pts: Vec<FourPoint> = (0..cfg.points).map(|k| FourPoint::new(zs[k], ts[k], thetas[k])).collect();
    let slice_pts: Vec<FourPoint> = pts.iter().map(|p| FourPoint::new(p.z, 0.0, p.theta)).collect();
    let b = &cfg.budgets;
    let fdc = &cfg.fd;
    let mut checks = Vec::new();

    checks.push(algebraic_check("quaternion", b.quaternion, &pts, |p| {
        let s = data.assemble(*p)?;
        let q = quaternion_check(&s.g, &s.omega)?;
        Ok((q.max(), 1.0))
    }));
    checks.push(fd_check("closedness", b.closedness, &pts, fdc, |p, c| closedness(data, *p, c)));
    checks.push(fd_check("curl", b.curl, &pts, fdc, |p, c| curl_residual(data, p.z, p.t, c)));
    checks.push(fd_check("xi_exterior_derivative", b.xi, &pts, fdc, |p, c| Ok(xi_residuals(data, p.z, c)?.0)));
    checks.push(fd_check("cauchy_riemann_phi", b.cauchy_riemann, &pts, fdc, |p, c| {
        let psi = data.psi_fn().clone();
        let phi = move |z: Complex| psi.eval(z).map(|w| -1.0 / w);
        cauchy_riemann_residual(&phi, p.z, c)
    }));
    checks.push(fd_check("cauchy_riemann_assembled", b.cauchy_riemann, &pts, fdc, |p, c| Ok(xi_residuals(data, p.z, c)?.1)));
    checks.push(algebraic_check("slice_identities", b.slice, &slice_pts, |p| {
        let f = data.slice_and_contact(p.z, p.theta)?;
        let canonical_t = if matches!(data.rho0_policy(), crate::ansatz::Rho0Policy::Canonical) {
            f.t_slice.abs()
        } else {
            0.0
        };
        let r = (f.v - f.phi.norm_sqr()).abs().max((f.rho - f.psi.im).abs()).max(canonical_t);
        Ok((r, f.v.max(f.rho)))
    }));
    checks.push(algebraic_check("slice_split", b.split, &slice_pts, |p| {
        let f = data.slice_and_contact(p.z, p.theta)?;
        Ok((f.split_residual(), f.g3.amax()))
    }));
    checks.push(fd_check("structure_lambda0", b.lambda0, &slice_pts, fdc, |p, c| {
        let fit = data.structure_coeffs(p.z, p.theta, c)?;
        let t = data.slice_and_contact(p.z, p.theta)?.t_slice;
        if fit.residual > b.structure {
            return Err(Error::DegenerateFrame(format!("structure fit residual {:e} at {}", fit.residual, p.z)));
        }
        Ok((fit.lambda0 - t.exp()).abs())
    }));
    checks.push(fd_check("structure_equations", b.structure, &slice_pts, fdc, |p, c| structure_residual(data, p.z, p.theta, c)));
    checks.push(fd_check("tautness", b.tautness, &slice_pts, fdc, |p, c| tautness_residual(data, p.z, p.theta, c)));
    checks.push(algebraic_check("beta_linear_system", b.beta, &slice_pts, |p| {
        let c = data.beta_cross_check(p.z, p.theta)?;
        Ok((c.beta_residual.max(c.gamma_residual), c.beta_explicit.amax()))
    }));
    checks.push(algebraic_check("psi_beta_identity", b.psi_identity, &slice_pts, |p| {
        let c = data.beta_cross_check(p.z, p.theta)?;
        Ok((c.psi_residual, 1.0))
    }));
    if cfg.beta_grid > 0 && !data.is_constant() {
        let res = beta_analysis(data, cfg.beta_grid, cfg.contact_samples, cfg.seed, fdc).and_then(|a1| {
            let a2 = beta_analysis(data, cfg.beta_grid, cfg.contact_samples, cfg.seed, &fdc.halved())?;
            Ok((a1, a2))
        });
        match res {
            Ok((a, a2)) => {
                let floor = (a.identity_residual - a2.identity_residual).abs();
                let mut r = CheckReport::new("contact_sign", a.identity_residual, b.contact, floor, a.contact_samples).with_note(format!(
                    "roots={} min_separation={:.3e} max_ratio={:.3e} skipped_seeds={}",
                    a.roots.len(),
                    a.min_separation,
                    a.max_ratio,
                    a.skipped_seeds
                ));
                r.passed &= a.max_ratio < 0.0 && (a.roots.len() < 2 || a.min_separation > 1e-3);
                checks.push(r);
            }
            Err(e) => checks.push(CheckReport::failed("contact_sign", b.contact, &e)),
        }
    }
    SuiteReport::new(checks)
}
