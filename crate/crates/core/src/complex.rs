//! Complex-analytic building blocks: holomorphic functions with derivatives,
//! Blaschke factors and products, the right-half-plane square root, and the
//! functions `ψ = i·√(1 − B)` and `ψ_μ = μ ∘ ψ` that feed the ansatz.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling;

pub type Complex = num_complex::Complex64;

/// The imaginary unit.
pub const I: Complex = Complex::new(0.0, 1.0);

/// Denominators below this modulus are treated as poles.
pub const POLE_THRESHOLD: f64 = 1e-300;

/// A holomorphic function on (a subset of) the unit disc together with its
/// complex derivative.
pub trait HoloFn: Send + Sync {
    /// Value and complex derivative at `z`.
    fn eval_d(&self, z: Complex) -> Result<(Complex, Complex)>;

    fn eval(&self, z: Complex) -> Result<Complex> {
        self.eval_d(z).map(|(f, _)| f)
    }

    fn deriv(&self, z: Complex) -> Result<Complex> {
        self.eval_d(z).map(|(_, df)| df)
    }

    /// Domain predicate. The default is the open unit disc.
    fn contains(&self, z: Complex) -> bool {
        z.norm() < 1.0
    }

    /// True when the function is known to be constant.
    fn is_constant(&self) -> bool {
        false
    }
}

impl<T: HoloFn + ?Sized> HoloFn for Arc<T> {
    fn eval_d(&self, z: Complex) -> Result<(Complex, Complex)> {
        (**self).eval_d(z)
    }
    fn contains(&self, z: Complex) -> bool {
        (**self).contains(z)
    }
    fn is_constant(&self) -> bool {
        (**self).is_constant()
    }
}

/// A constant function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub Complex);

impl HoloFn for Constant {
    fn eval_d(&self, _z: Complex) -> Result<(Complex, Complex)> {
        Ok((self.0, Complex::new(0.0, 0.0)))
    }
    fn is_constant(&self) -> bool {
        true
    }
}

/// A holomorphic function given by a pair of closures (value, derivative).
pub struct FnHolo<F, D> {
    f: F,
    df: D,
}

impl<F, D> FnHolo<F, D>
where
    F: Fn(Complex) -> Complex + Send + Sync,
    D: Fn(Complex) -> Complex + Send + Sync,
{
    pub fn new(f: F, df: D) -> Self {
        Self { f, df }
    }
}

impl<F, D> HoloFn for FnHolo<F, D>
where
    F: Fn(Complex) -> Complex + Send + Sync,
    D: Fn(Complex) -> Complex + Send + Sync,
{
    fn eval_d(&self, z: Complex) -> Result<(Complex, Complex)> {
        Ok(((self.f)(z), (self.df)(z)))
    }
}

// ---------------------------------------------------------------------------
// Blaschke factors and products

/// One zero of a Blaschke product with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeZero {
    pub a: Complex,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

impl BlaschkeZero {
    pub fn simple(a: Complex) -> Self {
        Self { a, multiplicity: 1 }
    }
}

/// A finite Blaschke product `z^m · ∏ B_{a_k}(z)^{mult_k}`.
///
/// When `truncation_residual` is set the product is a truncation of an
/// infinite product and the field carries `Σ mult·(1 − |a|)` over the
/// omitted zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BlaschkeSpec {
    #[serde(default)]
    pub power: u32,
    #[serde(default)]
    pub zeros: Vec<BlaschkeZero>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_residual: Option<f64>,
}

/// Result of evaluating a (possibly truncated) Blaschke product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlaschkeValue {
    pub value: Complex,
    /// Bound on `|B_∞(z) − value|` for a declared truncation; zero otherwise.
    pub tail_bound: f64,
}

impl BlaschkeSpec {
    pub fn new(power: u32, zeros: Vec<BlaschkeZero>) -> Result<Self> {
        let spec = Self {
            power,
            zeros,
            truncation_residual: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Simple zeros at the given points.
    pub fn with_zeros(power: u32, zeros: &[Complex]) -> Result<Self> {
        Self::new(power, zeros.iter().copied().map(BlaschkeZero::simple).collect())
    }

    pub fn validate(&self) -> Result<()> {
        for zero in &self.zeros {
            let r = zero.a.norm();
            if !(r > 0.0 && r < 1.0) || zero.multiplicity == 0 {
                return Err(Error::InvalidZero(zero.a));
            }
        }
        if let Some(res) = self.truncation_residual {
            if !(res >= 0.0 && res.is_finite()) {
                return Err(Error::InvalidData(format!("truncation residual {res}")));
            }
        }
        Ok(())
    }

    /// Zeros placed radially towards each target boundary vertex:
    /// `a = (1 − base^{−j})·z_n` for `j = 1..=levels`.
    ///
    /// This truncates an infinite zero sequence; the omitted Blaschke sum
    /// is the geometric tail `Σ_{j>levels} base^{−j}` per vertex.
    pub fn vertex_targeted(vertices: &[Complex], base: f64, levels: u32) -> Result<Self> {
        if !(base > 1.0) {
            return Err(Error::InvalidData(format!("placement base {base} must exceed 1")));
        }
        let mut zeros = Vec::new();
        for &v in vertices {
            let unit = v / v.norm();
            for j in 1..=levels {
                let r = 1.0 - base.powi(-(j as i32));
                if r < 1.0 {
                    zeros.push(BlaschkeZero::simple(unit * r));
                }
            }
        }
        let tail = vertices.len() as f64 * base.powi(-(levels as i32)) / (base - 1.0);
        let spec = Self {
            power: 0,
            zeros,
            truncation_residual: Some(tail),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `Σ mult·(1 − |a|)` over the zeros present.
    pub fn blaschke_sum(&self) -> f64 {
        self.zeros
            .iter()
            .map(|z| z.multiplicity as f64 * (1.0 - z.a.norm()))
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.power + self.zeros.iter().map(|z| z.multiplicity).sum::<u32>()
    }
}

fn check_closed_disc(z: Complex) -> Result<()> {
    if z.norm() > 1.0 + 1e-12 {
        Err(Error::Domain(format!("{z} lies outside the closed unit disc")))
    } else {
        Ok(())
    }
}

/// `B_a(z) = (ā/|a|)·(a − z)/(1 − ā z)`.
pub fn blaschke_factor(a: Complex, z: Complex) -> Result<Complex> {
    blaschke_factor_d(a, z).map(|(b, _)| b)
}

/// Blaschke factor and its derivative `(ā/|a|)(|a|² − 1)/(1 − ā z)²`.
pub fn blaschke_factor_d(a: Complex, z: Complex) -> Result<(Complex, Complex)> {
    let r = a.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidZero(a));
    }
    check_closed_disc(z)?;
    let den = Complex::new(1.0, 0.0) - a.conj() * z;
    let dn = den.norm();
    if dn < POLE_THRESHOLD {
        return Err(Error::Pole(dn));
    }
    let unit = a.conj() / r;
    let value = unit * (a - z) / den;
    let deriv = unit * (r * r - 1.0) / (den * den);
    Ok((value, deriv))
}

/// Evaluate the product and the truncation tail bound.
pub fn blaschke_eval(spec: &BlaschkeSpec, z: Complex) -> Result<BlaschkeValue> {
    let (value, _) = blaschke_eval_d(spec, z)?;
    Ok(BlaschkeValue {
        value,
        tail_bound: tail_bound(spec, z),
    })
}

fn tail_bound(spec: &BlaschkeSpec, z: Complex) -> f64 {
    match spec.truncation_residual {
        None => 0.0,
        Some(res) => {
            let gap = 1.0 - z.norm();
            if gap <= 0.0 {
                f64::INFINITY
            } else {
                2.0 / gap * res
            }
        }
    }
}

/// Product value and derivative, accumulated by the product rule so that the
/// derivative stays finite at the zeros themselves.
pub fn blaschke_eval_d(spec: &BlaschkeSpec, z: Complex) -> Result<(Complex, Complex)> {
    check_closed_disc(z)?;
    let m = spec.power as i32;
    let (mut p, mut dp) = if m == 0 {
        (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0))
    } else {
        (z.powi(m), z.powi(m - 1) * m as f64)
    };
    for zero in &spec.zeros {
        let (f, df) = blaschke_factor_d(zero.a, z)?;
        for _ in 0..zero.multiplicity {
            dp = dp * f + p * df;
            p *= f;
        }
    }
    Ok((p, dp))
}

/// Principal square root restricted to the right half-plane, with values in
/// the quadrant `arg ∈ (−π/4, π/4)`.
pub fn sqrt_right_halfplane(w: Complex) -> Result<Complex> {
    if !(w.re > 0.0) || !w.im.is_finite() {
        return Err(Error::BranchDomain(w));
    }
    Ok(w.sqrt())
}

/// `ψ(z) = i·√(1 − B(z))`.
pub fn psi_from_blaschke(spec: &BlaschkeSpec, z: Complex) -> Result<Complex> {
    BlaschkePsi::new(spec.clone())?.eval(z)
}

/// The holomorphic function `B` of a spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Blaschke(pub BlaschkeSpec);

impl HoloFn for Blaschke {
    fn eval_d(&self, z: Complex) -> Result<(Complex, Complex)> {
        blaschke_eval_d(&self.0, z)
    }
    fn is_constant(&self) -> bool {
        self.0.degree() == 0
    }
}

/// `ψ = i·√(1 − B)` for a Blaschke spec; takes values in the quadrant
/// `Q₂ = {arg ∈ (π/4, 3π/4)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkePsi {
    spec: BlaschkeSpec,
}

impl BlaschkePsi {
    pub fn new(spec: BlaschkeSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &BlaschkeSpec {
        &self.spec
    }
}

impl HoloFn for BlaschkePsi {
    fn eval_d(&self, z: Complex) -> Result<(Complex, Complex)> {
        let (b, db) = blaschke_eval_d(&self.spec, z)?;
        let root = sqrt_right_halfplane(Complex::new(1.0, 0.0) - b)?;
        let psi = I * root;
        let dpsi = -I * db / (2.0 * root);
        Ok((psi, dpsi))
    }
    fn is_constant(&self) -> bool {
        self.spec.degree() == 0
    }
}

// ---------------------------------------------------------------------------
// Post-composition maps μ

/// Post-composition map `μ` with `μ(0) = 0`, used to form `ψ_μ = μ ∘ ψ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MuSpec {
    /// `μ(w) = c·w`, `c > 0`.
    Scale { c: f64 },
    /// `μ(w) = w + ε·w²`.
    Perturb { eps: f64 },
    /// `μ(w) = Σ coeffs[k]·w^k`; derivative by Richardson-extrapolated
    /// central differences.
    Table { coeffs: Vec<Complex> },
}

impl Default for MuSpec {
    fn default() -> Self {
        MuSpec::Scale { c: 1.0 }
    }
}

impl fmt::Display for MuSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuSpec::Scale { c } => write!(f, "scale({c})"),
            MuSpec::Perturb { eps } => write!(f, "perturb({eps})"),
            MuSpec::Table { coeffs } => write!(f, "table({} coeffs)", coeffs.len()),
        }
    }
}

const VALIDATION_SAMPLES: usize = 500;
const VALIDATION_RADIUS: f64 = 0.99;
const VALIDATION_SEED: u64 = 0x6d75;

impl MuSpec {
    pub fn value(&self, w: Complex) -> Complex {
        match self {
            MuSpec::Scale { c } => w * *c,
            MuSpec::Perturb { eps } => w + w * w * *eps,
            MuSpec::Table { coeffs } => coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * w + c),
        }
    }

    pub fn derivative(&self, w: Complex) -> Complex {
        match self {
            MuSpec::Scale { c } => Complex::new(*c, 0.0),
            MuSpec::Perturb { eps } => Complex::new(1.0, 0.0) + w * (2.0 * eps),
            MuSpec::Table { .. } => richardson_derivative(|x| self.value(x), w),
        }
    }

    /// Check `μ(0) = 0`, parameter sanity, and `μ(ψ(z)) ∈ Q₂` on `samples`.
    pub fn validate(&self, psi: &dyn HoloFn, samples: &[Complex]) -> Result<()> {
        match self {
            MuSpec::Scale { c } if !(*c > 0.0 && c.is_finite()) => {
                return Err(Error::InvalidMu(format!("scale {c} must be positive")))
            }
            MuSpec::Perturb { eps } if !eps.is_finite() => {
                return Err(Error::InvalidMu(format!("perturbation {eps} not finite")))
            }
            MuSpec::Table { coeffs } if coeffs.is_empty() => {
                return Err(Error::InvalidMu("empty coefficient table".into()))
            }
            _ => {}
        }
        let at_zero = self.value(Complex::new(0.0, 0.0));
        if at_zero.norm() > 1e-14 {
            return Err(Error::InvalidMu(format!("mu(0) = {at_zero}, expected 0")));
        }
        for &z in samples {
            let w = self.value(psi.eval(z)?);
            if !in_q2(w) {
                return Err(Error::InvalidMu(format!(
                    "mu(psi({z})) = {w} has argument {:.6} outside (pi/4, 3pi/4)",
                    w.arg()
                )));
            }
        }
        Ok(())
    }
}

/// `arg w ∈ (π/4, 3π/4)`, equivalently `|Re w| < Im w`.
pub fn in_q2(w: Complex) -> bool {
    let a = w.arg();
    a > FRAC_PI_4 && a < 3.0 * FRAC_PI_4
}

/// `arg w ∈ (−π/4, π/4)`.
pub fn in_q1(w: Complex) -> bool {
    let a = w.arg();
    a > -FRAC_PI_4 && a < FRAC_PI_4
}

fn richardson_derivative(f: impl Fn(Complex) -> Complex, w: Complex) -> Complex {
    let h = 1e-3 * w.norm().max(1.0);
    let d = |h: f64| (f(w + h) - f(w - h)) / (2.0 * h);
    (d(0.5 * h) * 4.0 - d(h)) / 3.0
}

/// `ψ_μ = μ ∘ ψ`, with derivative by the chain rule.
#[derive(Clone)]
pub struct MuComposed {
    mu: MuSpec,
    inner: Arc<dyn HoloFn>,
}

impl fmt::Debug for MuComposed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MuComposed").field("mu", &self.mu).finish_non_exhaustive()
    }
}

impl MuComposed {
    pub fn mu(&self) -> &MuSpec {
        &self.mu
    }
}

impl HoloFn for MuComposed {
    fn eval_d(&self, z: Complex) -> Result<(Complex, Complex)> {
        let (w, dw) = self.inner.eval_d(z)?;
        Ok((self.mu.value(w), self.mu.derivative(w) * dw))
    }
    fn contains(&self, z: Complex) -> bool {
        self.inner.contains(z)
    }
    fn is_constant(&self) -> bool {
        self.inner.is_constant()
    }
}

/// Compose `psi` with `mu` after validating the `Q₂` condition on a fixed
/// deterministic sample of the disc.
pub fn apply_mu(mu: MuSpec, psi: Arc<dyn HoloFn>) -> Result<MuComposed> {
    let samples = sampling::disc_samples(VALIDATION_SAMPLES, VALIDATION_RADIUS, VALIDATION_SEED);
    apply_mu_on(mu, psi, &samples)
}

/// As [`apply_mu`] with a caller-supplied validation sample.
pub fn apply_mu_on(mu: MuSpec, psi: Arc<dyn HoloFn>, samples: &[Complex]) -> Result<MuComposed> {
    mu.validate(psi.as_ref(), samples)?;
    Ok(MuComposed { mu, inner: psi })
}

/// Argument of `w` normalised to `(−π, π]`, re-exported for callers that
/// check quadrant membership with a margin.
pub fn arg(w: Complex) -> f64 {
    let a = w.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn factor_examples() {
        assert!(blaschke_factor(c(0.5, 0.0), c(0.5, 0.0)).unwrap().norm() < 1e-15);
        assert_relative_eq!(blaschke_factor(c(0.5, 0.0), c(0.0, 0.0)).unwrap().re, 0.5, epsilon = 1e-15);
        // (0.5 − (−0.5)) / (1 + 0.25) = 0.8
        let v = blaschke_factor(c(0.5, 0.0), c(-0.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, 0.8, epsilon = 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn factor_errors() {
        assert_eq!(blaschke_factor(c(0.0, 0.0), c(0.1, 0.0)), Err(Error::InvalidZero(c(0.0, 0.0))));
        assert!(matches!(blaschke_factor(c(1.0, 0.0), c(0.1, 0.0)), Err(Error::InvalidZero(_))));
        assert!(matches!(blaschke_factor(c(0.3, 0.3), c(2.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn factor_modulus_on_circle() {
        let a = c(0.3, -0.6);
        for k in 0..32 {
            let z = Complex::from_polar(1.0, k as f64 * 0.2);
            assert!((blaschke_factor(a, z).unwrap().norm() - 1.0).abs() < 1e-12);
            assert!(blaschke_factor(a, z * 0.9).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn product_examples() {
        let empty = BlaschkeSpec::default();
        let v = blaschke_eval(&empty, c(0.3, 0.4)).unwrap();
        assert_eq!(v.value, c(1.0, 0.0));
        assert_eq!(v.tail_bound, 0.0);

        let spec = BlaschkeSpec::with_zeros(1, &[c(0.5, 0.0)]).unwrap();
        assert!(blaschke_eval(&spec, c(0.5, 0.0)).unwrap().value.norm() < 1e-15);
    }

    #[test]
    fn two_zero_radial_value() {
        // Direct arithmetic: B_0.9(0.999)·B_0.99(0.999) = (−0.099/0.1009)(−0.009/0.01099).
        let oracle = (-0.099 / 0.1009) * (-0.009 / 0.01099);
        for angle in [0.0, 1.1, 2.5] {
            let z1 = Complex::from_polar(1.0, angle);
            let spec = BlaschkeSpec::with_zeros(0, &[z1 * 0.9, z1 * 0.99]).unwrap();
            let b = blaschke_eval(&spec, z1 * 0.999).unwrap().value;
            assert_relative_eq!(b.re, oracle, epsilon = 1e-12);
            assert!(b.im.abs() < 1e-12);
            // The value is 0.8035..., so |1 − B| is about 0.196 rather than small.
            assert!((1.0 - b).norm() > 0.19);
        }
    }

    #[test]
    fn sqrt_branch() {
        assert_eq!(sqrt_right_halfplane(c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert!(matches!(sqrt_right_halfplane(c(0.0, 2.0)), Err(Error::BranchDomain(_))));
        assert!(matches!(sqrt_right_halfplane(c(-1.0, 0.1)), Err(Error::BranchDomain(_))));
        // Polar oracle: sqrt(r)·e^{iθ/2} with r = |0.5 + 0.5i|, θ = π/4.
        let r: f64 = (0.5f64 * 0.5 + 0.5 * 0.5).sqrt();
        let oracle = Complex::from_polar(r.sqrt(), PI / 8.0);
        let s = sqrt_right_halfplane(c(0.5, 0.5)).unwrap();
        assert_relative_eq!(s.re, oracle.re, epsilon = 1e-15);
        assert_relative_eq!(s.im, oracle.im, epsilon = 1e-15);
        assert_relative_eq!(s.norm(), 0.840_896_415_253_714_5, epsilon = 1e-15);
    }

    #[test]
    fn psi_examples() {
        let spec = BlaschkeSpec::with_zeros(0, &[c(0.5, 0.0)]).unwrap();
        let psi = psi_from_blaschke(&spec, c(0.5, 0.0)).unwrap();
        assert!((psi - I).norm() < 1e-15);
        assert!(matches!(
            psi_from_blaschke(&BlaschkeSpec::default(), c(0.1, 0.0)),
            Err(Error::BranchDomain(_))
        ));
    }

    #[test]
    fn psi_small_near_targeted_vertex() {
        // |ψ|² = |1 − B|, so |ψ| < 1/4 exactly when |1 − B| < 1/16.
        let spec = BlaschkeSpec::vertex_targeted(&[c(1.0, 0.0)], 10.0, 4).unwrap();
        let f = BlaschkePsi::new(spec.clone()).unwrap();
        for r in [0.3, 0.7, 0.95, 0.995, 0.9995] {
            let z = c(r, 0.0);
            let b = blaschke_eval(&spec, z).unwrap().value;
            let p = f.eval(z).unwrap();
            assert!(((1.0 - b).norm().sqrt() - p.norm()).abs() < 1e-14);
            assert_eq!(p.norm() < 0.25, (1.0 - b).norm() < 1.0 / 16.0);
        }
    }

    #[test]
    fn mu_examples() {
        let spec = BlaschkeSpec::vertex_targeted(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)], 10.0, 3).unwrap();
        let psi: Arc<dyn HoloFn> = Arc::new(BlaschkePsi::new(spec).unwrap());
        let id = apply_mu(MuSpec::Scale { c: 1.0 }, psi.clone()).unwrap();
        let two = apply_mu(MuSpec::Scale { c: 2.0 }, psi.clone()).unwrap();
        for z in sampling::disc_samples(50, 0.95, 3) {
            let p = psi.eval(z).unwrap();
            assert_eq!(id.eval(z).unwrap(), p);
            assert!((two.eval(z).unwrap() - p * 2.0).norm() < 1e-15);
        }
        let mu = MuSpec::Perturb { eps: 0.05 };
        assert!((mu.value(I) - c(-0.05, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn mu_rejections() {
        let psi: Arc<dyn HoloFn> = Arc::new(Constant(I));
        assert!(matches!(apply_mu(MuSpec::Scale { c: -1.0 }, psi.clone()), Err(Error::InvalidMu(_))));
        // A rotation by e^{iπ/3} pushes i out of Q₂.
        let rot = MuSpec::Table {
            coeffs: vec![c(0.0, 0.0), Complex::from_polar(1.0, PI / 3.0)],
        };
        assert!(matches!(apply_mu(rot, psi.clone()), Err(Error::InvalidMu(_))));
        let shifted = MuSpec::Table {
            coeffs: vec![c(0.1, 0.0), c(1.0, 0.0)],
        };
        assert!(matches!(apply_mu(shifted, psi), Err(Error::InvalidMu(_))));
    }

    #[test]
    fn table_derivative_fallback() {
        let mu = MuSpec::Table {
            coeffs: vec![c(0.0, 0.0), c(1.0, 0.0), c(0.1, -0.05), c(0.0, 0.02)],
        };
        for w in [c(0.1, 0.9), c(-0.3, 0.5), c(0.0, 1.3)] {
            let exact = c(1.0, 0.0) + w * c(0.2, -0.1) + w * w * c(0.0, 0.06);
            assert!((mu.derivative(w) - exact).norm() < 1e-10);
        }
    }

    #[test]
    fn vertex_targeting_layout() {
        let spec = BlaschkeSpec::vertex_targeted(&[c(0.0, 1.0)], 10.0, 3).unwrap();
        let radii: Vec<f64> = spec.zeros.iter().map(|z| z.a.norm()).collect();
        assert_relative_eq!(radii[0], 0.9, epsilon = 1e-15);
        assert_relative_eq!(radii[2], 0.999, epsilon = 1e-15);
        assert!(spec.zeros.iter().all(|z| z.a.re.abs() < 1e-15));
        assert_relative_eq!(spec.truncation_residual.unwrap(), 1e-3 / 9.0, epsilon = 1e-18);
    }
}
