//! The covering map `Φ = λ ∘ cayley : 𝔻 → S² ∖ {p₁, p₂, p₃}`.
//!
//! `λ = θ₂⁴/θ₃⁴` is evaluated after reducing `τ` into the standard
//! fundamental domain of `SL₂(ℤ)`, so `Im τ' ≥ √3/2` and the theta series
//! converge in a handful of terms. Each reduction step acts on `λ` by an
//! anharmonic Möbius map, which is tracked as an integer matrix so that
//! `w = λ(τ)` is available in homogeneous form `N/D`. Near the cusps this
//! keeps both `w` and `1/w` accurate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, I};
use crate::error::{Error, Result};
use crate::tessellation::{cayley, nearest_cusp, Farey, Tessellation};

/// Series guard on `Im τ`.
pub const MIN_IM_TAU: f64 = 0.05;

/// Truncation rule for the theta series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThetaConfig {
    pub threshold: f64,
    pub max_terms: usize,
}

impl Default for ThetaConfig {
    fn default() -> Self {
        Self {
            threshold: 1e-16,
            max_terms: 64,
        }
    }
}

impl ThetaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threshold > 0.0 && self.max_terms > 0 {
            Ok(())
        } else {
            Err(Error::InvalidData(format!("theta config {self:?}")))
        }
    }
}

fn guard(tau: Complex) -> Result<()> {
    if tau.im > MIN_IM_TAU {
        Ok(())
    } else {
        Err(Error::Convergence(tau))
    }
}

/// `Σ_{n≥1} sign(n)·exp(iπτ·e(n))` until a term drops below the threshold.
fn q_series(tau: Complex, cfg: &ThetaConfig, exponent: impl Fn(f64) -> f64, sign: impl Fn(usize) -> f64) -> Result<Complex> {
    let mut sum = Complex::new(0.0, 0.0);
    for n in 1..=cfg.max_terms {
        let term = (I * PI * tau * exponent(n as f64)).exp() * sign(n);
        sum += term;
        if term.norm() < cfg.threshold {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(tau))
}

/// `θ₃(τ) = 1 + 2 Σ q^{n²}`, `q = e^{iπτ}`.
pub fn theta3(tau: Complex, cfg: &ThetaConfig) -> Result<Complex> {
    guard(tau)?;
    Ok(1.0 + 2.0 * q_series(tau, cfg, |n| n * n, |_| 1.0)?)
}

/// `θ₄(τ) = 1 + 2 Σ (−1)ⁿ q^{n²}`.
pub fn theta4(tau: Complex, cfg: &ThetaConfig) -> Result<Complex> {
    guard(tau)?;
    Ok(1.0 + 2.0 * q_series(tau, cfg, |n| n * n, |n| if n % 2 == 1 { -1.0 } else { 1.0 })?)
}

/// `θ₂(τ) = 2 Σ_{n≥0} q^{(n+½)²}`.
pub fn theta2(tau: Complex, cfg: &ThetaConfig) -> Result<Complex> {
    guard(tau)?;
    let lead = (I * PI * tau * 0.25).exp();
    Ok(2.0 * (lead + q_series(tau, cfg, |n| (n + 0.5) * (n + 0.5), |_| 1.0)?))
}

/// `θ₂⁴ + θ₄⁴ − θ₃⁴`, zero by Jacobi's identity.
pub fn jacobi_residual(tau: Complex, cfg: &ThetaConfig) -> Result<Complex> {
    Ok(theta2(tau, cfg)?.powi(4) + theta4(tau, cfg)?.powi(4) - theta3(tau, cfg)?.powi(4))
}

/// `λ` in homogeneous form with its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaValue {
    /// `λ(τ) = num/den`.
    pub num: Complex,
    pub den: Complex,
    /// `±1`; `dλ/dτ = det·x'/den²` and `d(1/λ)/dτ = −det·x'/num²`.
    pub det: f64,
    /// `x' = d λ(τ_red)/dτ · dτ_red/dτ`.
    pub dx: Complex,
}

impl LambdaValue {
    pub fn value(&self) -> Complex {
        self.num / self.den
    }

    pub fn derivative(&self) -> Complex {
        self.dx * self.det / (self.den * self.den)
    }
}

// λ(τ+1) = λ/(λ−1) and λ(−1/τ) = 1 − λ, as matrices acting on λ.
const STEP_T: [[f64; 2]; 2] = [[1.0, 0.0], [1.0, -1.0]];
const STEP_S: [[f64; 2]; 2] = [[-1.0, 1.0], [0.0, 1.0]];

fn mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Evaluate `λ` and `dλ/dτ` through fundamental-domain reduction.
pub fn lambda_eval(tau: Complex, cfg: &ThetaConfig) -> Result<LambdaValue> {
    if !(tau.im > 0.0) || !tau.re.is_finite() {
        return Err(Error::Puncture(tau));
    }
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    let mut t = tau;
    let mut dt = Complex::new(1.0, 0.0);
    let mut reduced = false;
    for _ in 0..10_000 {
        let n = t.re.round();
        if n != 0.0 {
            t -= n;
            if (n as i64).rem_euclid(2) == 1 {
                m = mul(m, STEP_T);
            }
        }
        if t.norm_sqr() < 1.0 - 1e-15 {
            dt /= t * t;
            t = -1.0 / t;
            m = mul(m, STEP_S);
        } else {
            reduced = true;
            break;
        }
    }
    if !reduced || !(t.im > 0.0) {
        return Err(Error::Puncture(tau));
    }
    let t2 = theta2(t, cfg)?;
    let t3 = theta3(t, cfg)?;
    let t3_4 = t3.powi(4);
    let x = t2.powi(4) / t3_4;
    let dx_red = I * PI * x * (1.0 - x) * t3_4;
    Ok(LambdaValue {
        num: x * m[0][0] + m[0][1],
        den: x * m[1][0] + m[1][1],
        det: m[0][0] * m[1][1] - m[0][1] * m[1][0],
        dx: dx_red * dt,
    })
}

/// `λ(τ) = θ₂⁴/θ₃⁴`.
pub fn lambda_map(tau: Complex, cfg: &ThetaConfig) -> Result<Complex> {
    let l = lambda_eval(tau, cfg)?;
    if l.den.norm() == 0.0 {
        return Err(Error::Puncture(tau));
    }
    Ok(l.value())
}

/// `dλ/dτ = iπ·λ(1 − λ)·θ₃⁴`, transported through the reduction.
pub fn lambda_prime(tau: Complex, cfg: &ThetaConfig) -> Result<Complex> {
    let l = lambda_eval(tau, cfg)?;
    if l.den.norm() == 0.0 {
        return Err(Error::Puncture(tau));
    }
    Ok(l.derivative())
}

// ---------------------------------------------------------------------------
// Sphere

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint(pub [f64; 3]);

impl SpherePoint {
    pub fn dot(&self, other: &SpherePoint) -> f64 {
        (0..3).map(|i| self.0[i] * other.0[i]).sum()
    }

    /// Great-circle distance, accurate for nearby and antipodal points.
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        let (a, b) = (self.0, other.0);
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let s = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        s.atan2(self.dot(other))
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// Stereographic coordinate: `w` or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StereoCoord {
    Finite(Complex),
    Infinity,
}

impl StereoCoord {
    pub fn finite(self) -> Option<Complex> {
        match self {
            StereoCoord::Finite(w) => Some(w),
            StereoCoord::Infinity => None,
        }
    }

    /// The coordinate in the opposite chart, `1/w`.
    pub fn inverted(self) -> StereoCoord {
        match self {
            StereoCoord::Infinity => StereoCoord::Finite(Complex::new(0.0, 0.0)),
            StereoCoord::Finite(w) if w.norm() == 0.0 => StereoCoord::Infinity,
            StereoCoord::Finite(w) => StereoCoord::Finite(1.0 / w),
        }
    }
}

/// Which chart a homogeneous value is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `w = N/D`, used when `|N| ≤ |D|`.
    W,
    /// `ζ = 1/w = D/N`.
    Zeta,
}

/// Lift of `w` to the sphere: `(2 Re w, −2 Im w, |w|² − 1)/(|w|² + 1)`.
///
/// The sign on the second component makes the lift orientation preserving,
/// so holomorphic maps into the `w` chart preserve the outward orientation.
pub fn stereo_lift(w: StereoCoord) -> SpherePoint {
    match w {
        StereoCoord::Infinity => SpherePoint([0.0, 0.0, 1.0]),
        StereoCoord::Finite(w) if w.norm() > 1.0 => lift_chart(Chart::Zeta, 1.0 / w).0,
        StereoCoord::Finite(w) => lift_chart(Chart::W, w).0,
    }
}

/// Inverse of [`stereo_lift`].
pub fn stereo_project(p: &SpherePoint) -> StereoCoord {
    let [x, y, z] = p.0;
    if z >= 1.0 {
        return StereoCoord::Infinity;
    }
    StereoCoord::Finite(Complex::new(x, -y) / (1.0 - z))
}

/// Lift in a chart plus the partials of `p` in the chart's real coordinates.
fn lift_chart(chart: Chart, c: Complex) -> (SpherePoint, [[f64; 3]; 2]) {
    let (a, b) = (c.re, c.im);
    let s = 1.0 + a * a + b * b;
    let s2 = s * s;
    let (p, da, db) = match chart {
        Chart::W => (
            [2.0 * a / s, -2.0 * b / s, (a * a + b * b - 1.0) / s],
            [2.0 / s - 4.0 * a * a / s2, 4.0 * a * b / s2, 4.0 * a / s2],
            [-4.0 * a * b / s2, -2.0 / s + 4.0 * b * b / s2, 4.0 * b / s2],
        ),
        Chart::Zeta => (
            [2.0 * a / s, 2.0 * b / s, (1.0 - a * a - b * b) / s],
            [2.0 / s - 4.0 * a * a / s2, -4.0 * a * b / s2, -4.0 * a / s2],
            [-4.0 * a * b / s2, 2.0 / s - 4.0 * b * b / s2, -4.0 * b / s2],
        ),
    };
    (SpherePoint(p), [da, db])
}

/// The three punctures: lifts of `w = 0, 1, ∞`.
pub fn punctures() -> [SpherePoint; 3] {
    [
        SpherePoint([0.0, 0.0, -1.0]),
        SpherePoint([1.0, 0.0, 0.0]),
        SpherePoint([0.0, 0.0, 1.0]),
    ]
}

/// Puncture index (1, 2, 3) approached near a cusp: `Γ(2)` has three cusp
/// classes, `∞ ↦ w = 0`, `0 ↦ w = 1`, `1 ↦ w = ∞`.
pub fn puncture_of(cusp: Farey) -> usize {
    if cusp.q.rem_euclid(2) == 0 {
        1
    } else if cusp.p.rem_euclid(2) == 0 {
        2
    } else {
        3
    }
}

// ---------------------------------------------------------------------------
// The covering map

/// The local biholomorphism `Φ` used by the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Covering {
    /// `Φ = λ ∘ cayley`, the universal covering of the thrice-punctured sphere.
    Modular(ThetaConfig),
    /// `w = z`: the disc sits in one stereographic chart. Not a covering;
    /// used for flat reference data.
    Chart,
}

impl Default for Covering {
    fn default() -> Self {
        Covering::Modular(ThetaConfig::default())
    }
}

/// Everything the ansatz needs from `Φ` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSample {
    pub w: StereoCoord,
    pub point: SpherePoint,
    /// `dw/dz`; infinite when `w = ∞`.
    pub dw_dz: Complex,
    pub chart: Chart,
    /// `w` or `1/w` according to `chart`, with its `z`-derivative.
    pub chart_value: Complex,
    pub chart_derivative: Complex,
    /// `∂p/∂u` and `∂p/∂v`.
    pub dp: [[f64; 3]; 2],
    /// `m = |dw/dz|²·4/(1 + |w|²)²`.
    pub metric_factor: f64,
}

impl Covering {
    pub fn phi(&self, z: Complex) -> Result<PhiSample> {
        if !(z.norm() < 1.0) {
            return Err(Error::Puncture(z));
        }
        match self {
            Covering::Chart => Ok(sample_from_homogeneous(z, Complex::new(1.0, 0.0), 1.0, Complex::new(1.0, 0.0))),
            Covering::Modular(cfg) => {
                let tau = cayley(z).finite().ok_or(Error::Puncture(z))?;
                let l = lambda_eval(tau, cfg)?;
                let one = Complex::new(1.0, 0.0);
                let dtau_dz = -2.0 * I / ((one + z) * (one + z));
                Ok(sample_from_homogeneous(l.num, l.den, l.det, l.dx * dtau_dz))
            }
        }
    }

    pub fn pullback_factors(&self, z: Complex) -> Result<(f64, f64)> {
        let m = self.phi(z)?.metric_factor;
        Ok((m, m))
    }

    /// Distance from `Φ(z)` to puncture `j` compared with `r` (or `2r`);
    /// members are attributed to the enumerated vertex `z_n` whose cusp is
    /// nearest.
    pub fn hororegion_test(
        &self,
        tess: &Tessellation,
        z: Complex,
        j: usize,
        r: f64,
        doubled: bool,
    ) -> Result<(bool, Option<usize>)> {
        if !(1..=3).contains(&j) {
            return Err(Error::Domain(format!("puncture index {j} must be 1, 2 or 3")));
        }
        if !(r > 0.0 && r < std::f64::consts::FRAC_PI_4) {
            return Err(Error::Domain(format!("ball radius {r} must lie in (0, pi/4)")));
        }
        let p = self.phi(z)?.point;
        let radius = if doubled { 2.0 * r } else { r };
        if p.distance(&punctures()[j - 1]) >= radius {
            return Ok((false, None));
        }
        let vertex = nearest_cusp(z)
            .filter(|(cusp, _)| puncture_of(*cusp) == j)
            .and_then(|(cusp, _)| tess.vertex_index(cusp));
        Ok((true, vertex))
    }
}

impl PhiSample {
    /// The coordinate of `Φ(z)` in the given chart.
    pub fn value_in(&self, chart: Chart) -> Complex {
        if chart == self.chart {
            self.chart_value
        } else {
            1.0 / self.chart_value
        }
    }
}

fn sample_from_homogeneous(num: Complex, den: Complex, det: f64, dx: Complex) -> PhiSample {
    let (chart, value, deriv) = if num.norm() <= den.norm() {
        (Chart::W, num / den, dx * det / (den * den))
    } else {
        (Chart::Zeta, den / num, -dx * det / (num * num))
    };
    let (point, [da, db]) = lift_chart(chart, value);
    let mut dp = [[0.0; 3]; 2];
    for i in 0..3 {
        dp[0][i] = da[i] * deriv.re + db[i] * deriv.im;
        dp[1][i] = -da[i] * deriv.im + db[i] * deriv.re;
    }
    let scale = num.norm_sqr() + den.norm_sqr();
    let metric_factor = 4.0 * det * det * dx.norm_sqr() / (scale * scale);
    let (w, dw_dz) = if den.norm() == 0.0 {
        (StereoCoord::Infinity, Complex::new(f64::INFINITY, 0.0))
    } else {
        (StereoCoord::Finite(num / den), dx * det / (den * den))
    };
    PhiSample {
        w,
        point,
        dw_dz,
        chart,
        chart_value: value,
        chart_derivative: deriv,
        dp,
        metric_factor,
    }
}
