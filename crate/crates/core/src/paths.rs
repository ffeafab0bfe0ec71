//! Path-length experiments: divergence along boundary-bound paths, the
//! hexagon constants bounding crossings, the log-variation bound inside
//! hororegions, horizontal lengths on the slice and radial-graph
//! fingerprints.
//!
//! Lengths are adaptive Simpson quadratures of `√(g(γ′, γ′))` with velocities
//! from central differences. Proper paths (those reaching `|z| = 1` as
//! `s → 1`) are integrated in `σ = −ln(1 − s)` so that stencils never leave
//! the disc.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::HolomorphicData;
use crate::complex::{Complex, HoloFn};
use crate::covering::{self, Covering, SpherePoint, StereoCoord, ThetaConfig};
use crate::error::{Error, Result};
use crate::fd::{self, FDConfig};
use crate::quadrature;
use crate::tessellation::{cayley_inv, Tessellation};

/// Absolute tolerance of every length quadrature.
pub const LENGTH_TOLERANCE: f64 = 1e-6;
/// Initial Simpson panels per integration interval.
pub const INITIAL_PANELS: usize = 16;
/// Parameter step for path velocities.
pub const VELOCITY_STEP: f64 = 1e-4;

/// A point of a path: a disc point, with a fibre angle when on the slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub z: Complex,
    #[serde(default)]
    pub theta: f64,
}

impl PathPoint {
    pub fn disc(z: Complex) -> Self {
        Self { z, theta: 0.0 }
    }
}

type PathFn = dyn Fn(f64) -> Result<PathPoint> + Send + Sync;

/// A piecewise-C¹ path `s ∈ [0, 1] → PathPoint`.
#[derive(Clone)]
pub struct ParamPath {
    label: String,
    map: Arc<PathFn>,
    proper: bool,
    breaks: Vec<f64>,
}

impl fmt::Debug for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamPath")
            .field("label", &self.label)
            .field("proper", &self.proper)
            .field("breaks", &self.breaks)
            .finish_non_exhaustive()
    }
}

impl ParamPath {
    /// A path defined on a neighbourhood of `[0, 1]`.
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> Result<PathPoint> + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            map: Arc::new(f),
            proper: false,
            breaks: Vec::new(),
        }
    }

    /// A path defined on `[0, 1)` with `|z(s)| → 1` as `s → 1`.
    pub fn proper(label: impl Into<String>, f: impl Fn(f64) -> Result<PathPoint> + Send + Sync + 'static) -> Self {
        Self {
            proper: true,
            ..Self::new(label, f)
        }
    }

    /// `s ↦ s·e^{iα}`, proper.
    pub fn radial(angle: f64) -> Self {
        let dir = Complex::from_polar(1.0, angle);
        Self::proper(format!("radial({angle:.6})"), move |s| Ok(PathPoint::disc(dir * s)))
    }

    /// Straight segment `a → b` in the disc.
    pub fn segment(a: Complex, b: Complex) -> Self {
        Self::new(format!("segment({a}, {b})"), move |s| Ok(PathPoint::disc(a + (b - a) * s)))
    }

    /// Circle of radius `r` about `c`, once around.
    pub fn circle(c: Complex, r: f64) -> Self {
        Self::new(format!("circle({c}, {r})"), move |s| {
            Ok(PathPoint::disc(c + Complex::from_polar(r, std::f64::consts::TAU * s)))
        })
    }

    /// The fibre circle `θ ∈ [0, 2π]` over a fixed `z` on the slice.
    pub fn theta_circle(z: Complex) -> Self {
        Self::new(format!("theta_circle({z})"), move |s| {
            Ok(PathPoint {
                z,
                theta: std::f64::consts::TAU * s,
            })
        })
    }

    /// The constant path at `p`.
    pub fn constant(p: PathPoint) -> Self {
        Self::new("constant", move |_| Ok(p))
    }

    /// The horizontal line `τ = x + i·height`, `x ∈ [0, k]`, in the disc.
    pub fn crossing(k: u32, height: f64) -> Self {
        let k = f64::from(k);
        Self::new(format!("crossing({k}, {height})"), move |s| {
            Ok(PathPoint::disc(cayley_inv(Complex::new(k * s, height))))
        })
    }

    /// `self` on `[0, ½]` followed by `other` on `[½, 1]`; neither may be proper.
    pub fn concat(&self, other: &ParamPath) -> Result<ParamPath> {
        if self.proper || other.proper {
            return Err(Error::Path("cannot concatenate proper paths".into()));
        }
        let (a, b) = (Arc::clone(&self.map), Arc::clone(&other.map));
        let mut breaks: Vec<f64> = self.breaks.iter().map(|s| 0.5 * s).collect();
        breaks.push(0.5);
        breaks.extend(other.breaks.iter().map(|s| 0.5 + 0.5 * s));
        Ok(ParamPath {
            label: format!("{}+{}", self.label, other.label),
            map: Arc::new(move |s| if s <= 0.5 { a(2.0 * s) } else { b(2.0 * s - 1.0) }),
            proper: false,
            breaks,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_proper(&self) -> bool {
        self.proper
    }

    pub fn point(&self, s: f64) -> Result<PathPoint> {
        if self.proper && !(s < 1.0) {
            return Err(Error::Path(format!("proper path {} evaluated at s = {s}", self.label)));
        }
        let p = (self.map)(s)?;
        if p.z.norm() >= 1.0 {
            return Err(Error::Path(format!("path {} leaves the disc at s = {s}", self.label)));
        }
        Ok(p)
    }

    /// Integration variable for parameter `s`.
    fn var(&self, s: f64) -> f64 {
        if self.proper {
            -(1.0 - s).ln()
        } else {
            s
        }
    }

    fn at_var(&self, x: f64) -> Result<PathPoint> {
        if self.proper {
            self.point(-(-x).exp_m1())
        } else {
            self.point(x)
        }
    }

    /// Point and velocity `(u̇, v̇, θ̇)` with respect to the integration
    /// variable, for `x` in the smooth piece `[lo, hi]`. Stencils never
    /// cross the piece boundary: near an end they turn one-sided.
    fn jet_var(&self, x: f64, lo: f64, hi: f64) -> Result<(PathPoint, Vector3<f64>)> {
        let p = self.at_var(x)?;
        let h = VELOCITY_STEP;
        let sample = |y: f64| -> Result<Vector3<f64>> {
            let q = self.at_var(y)?;
            Ok(Vector3::new(q.z.re, q.z.im, q.theta))
        };
        let interior = x - h >= lo && x + h <= hi;
        if interior || hi - lo < 2.0 * h {
            let sampler = |c: &[f64]| -> Result<Vec<f64>> { Ok(sample(c[0])?.as_slice().to_vec()) };
            let cfg = FDConfig::with_h(VELOCITY_STEP);
            let d = fd::fd_directional(&sampler, &[x], 0, &cfg).map_err(|e| Error::Path(e.to_string()))?;
            return Ok((p, Vector3::new(d[0], d[1], d[2])));
        }
        let dir = if x + 2.0 * h <= hi { 1.0 } else { -1.0 };
        let f0 = sample(x)?;
        // Second-order one-sided difference, one Richardson level.
        let one_sided = |step: f64| -> Result<Vector3<f64>> {
            let s = dir * step;
            Ok(((sample(x + s)? - f0) * 4.0 - (sample(x + 2.0 * s)? - f0)) / (2.0 * s))
        };
        let (coarse, fine) = (one_sided(h)?, one_sided(0.5 * h)?);
        Ok((p, (fine * 4.0 - coarse) / 3.0))
    }

    /// Integration intervals covering parameters `[s0, s1]`, split at breaks.
    fn intervals(&self, s0: f64, s1: f64) -> Vec<(f64, f64)> {
        let mut cuts = vec![s0];
        cuts.extend(self.breaks.iter().copied().filter(|b| *b > s0 && *b < s1));
        cuts.push(s1);
        cuts.windows(2).map(|w| (self.var(w[0]), self.var(w[1]))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricTag {
    Euclidean,
    /// The quotient metric `g_𝔻` on the disc.
    Disc,
    /// `Φ*g_{S²}`.
    SpherePullback,
    /// `g₃` on the slice.
    Slice,
    /// `g_s = Σ ω_i²` on the slice.
    Short,
}

impl fmt::Display for MetricTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricTag::Euclidean => "euclidean",
            MetricTag::Disc => "g_disc",
            MetricTag::SpherePullback => "phi_sphere",
            MetricTag::Slice => "g3",
            MetricTag::Short => "g_short",
        })
    }
}

/// A metric with the data it needs.
#[derive(Debug, Clone, Copy)]
pub enum Metric<'a> {
    Euclidean,
    Disc(&'a HolomorphicData),
    SpherePullback(&'a Covering),
    Slice(&'a HolomorphicData),
    Short(&'a HolomorphicData),
}

impl Metric<'_> {
    pub fn tag(&self) -> MetricTag {
        match self {
            Metric::Euclidean => MetricTag::Euclidean,
            Metric::Disc(_) => MetricTag::Disc,
            Metric::SpherePullback(_) => MetricTag::SpherePullback,
            Metric::Slice(_) => MetricTag::Slice,
            Metric::Short(_) => MetricTag::Short,
        }
    }

    /// `√(g(w, w))` at `p` for `w = (u̇, v̇, θ̇)`.
    pub fn speed(&self, p: &PathPoint, w: &Vector3<f64>) -> Result<f64> {
        let planar = nalgebra::Vector2::new(w[0], w[1]);
        let q = match self {
            Metric::Euclidean => planar.norm_squared(),
            Metric::SpherePullback(c) => c.phi(p.z)?.metric_factor * planar.norm_squared(),
            Metric::Disc(d) => (planar.transpose() * d.g_sigma(p.z)? * planar)[0],
            Metric::Slice(d) => (w.transpose() * d.slice_and_contact(p.z, p.theta)?.g3 * w)[0],
            Metric::Short(d) => (w.transpose() * d.slice_and_contact(p.z, p.theta)?.gs * w)[0],
        };
        Ok(q.max(0.0).sqrt())
    }
}

fn path_err(path: &ParamPath, e: Error) -> Error {
    match e {
        Error::Path(_) => e,
        other => Error::Path(format!("metric evaluation on {} failed: {other}", path.label())),
    }
}

/// Length of `path` over parameters `[s0, s1]`.
pub fn path_length_between(path: &ParamPath, metric: &Metric<'_>, s0: f64, s1: f64) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in path.intervals(s0, s1) {
        let integrand = |x: f64| -> Result<f64> {
            let (p, w) = path.jet_var(x, a, b)?;
            metric.speed(&p, &w)
        };
        total += quadrature::simpson(integrand, a, b, LENGTH_TOLERANCE, INITIAL_PANELS).map_err(|e| path_err(path, e))?;
    }
    Ok(total)
}

/// Length of `path` over `[0, r]`.
pub fn path_length(path: &ParamPath, metric: &Metric<'_>, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) || (path.is_proper() && r >= 1.0) {
        return Err(Error::Path(format!("truncation parameter {r} outside the path domain")));
    }
    path_length_between(path, metric, 0.0, r)
}

/// Accumulated lengths along a truncation ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthProfile {
    pub metric: MetricTag,
    /// `(r, L(r))`, `r` increasing.
    pub points: Vec<(f64, f64)>,
}

impl LengthProfile {
    pub fn increments(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[1].1 - w[0].1).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 >= w[0].1)
    }
}

/// `L(r)` for each ladder value, accumulated interval by interval.
pub fn length_profile(path: &ParamPath, metric: &Metric<'_>, ladder: &[f64]) -> Result<LengthProfile> {
    let mut points = Vec::with_capacity(ladder.len());
    let (mut prev, mut total) = (0.0, 0.0);
    for &r in ladder {
        if r < prev {
            return Err(Error::Path("truncation ladder must increase".into()));
        }
        total += path_length_between(path, metric, prev, r)?;
        points.push((r, total));
        prev = r;
    }
    Ok(LengthProfile {
        metric: metric.tag(),
        points,
    })
}

// ---------------------------------------------------------------------------
// Hexagon constants

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionConstants {
    pub r: f64,
    /// Minimum distance between even sides of the truncated hexagon.
    pub c1: f64,
    /// Minimum distance between distinct balls.
    pub c2: f64,
    /// Ball radius.
    pub c3: f64,
    pub points_per_side: usize,
    pub refinements: usize,
}

/// Sides of the base triangle in `τ`, by hyperbolic arclength `s`.
fn side_point(side: usize, s: f64) -> Complex {
    match side {
        0 => Complex::new(0.0, s.exp()),
        1 => Complex::new(1.0, s.exp()),
        _ => Complex::new(0.5 + 0.5 * s.tanh(), 0.5 / s.cosh()),
    }
}

/// `Φ` in `τ`, with underflow to a puncture where `λ` is unrepresentable.
pub fn sphere_point_tau(tau: Complex, cfg: &ThetaConfig) -> Result<SpherePoint> {
    let l = covering::lambda_eval(tau, cfg)?;
    let w = if l.den.norm() == 0.0 {
        StereoCoord::Infinity
    } else {
        StereoCoord::Finite(l.num / l.den)
    };
    Ok(covering::stereo_lift(w))
}

const SIDE_RANGE: f64 = 8.0;

fn side_samples(side: usize, lo: f64, hi: f64, n: usize, r: f64, cfg: &ThetaConfig) -> Result<Vec<(f64, SpherePoint)>> {
    let punct = covering::punctures();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let s = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        let p = sphere_point_tau(side_point(side, s), cfg)?;
        if punct.iter().all(|q| p.distance(q) >= r) {
            out.push((s, p));
        }
    }
    Ok(out)
}

fn closest(a: &[(f64, SpherePoint)], b: &[(f64, SpherePoint)]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for (i, (_, p)) in a.iter().enumerate() {
        for (j, (_, q)) in b.iter().enumerate() {
            let d = p.distance(q);
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

/// `c₃ = r`, `c₂ = π/2 − 2r`, and `c₁` by discretized minimization of the
/// distance between the images of pairs of triangle sides outside the balls.
pub fn region_constants(r: f64) -> Result<RegionConstants> {
    if !(r > 0.0 && r < FRAC_PI_4) {
        return Err(Error::Domain(format!("ball radius {r} must lie in (0, pi/4)")));
    }
    const N: usize = 512;
    const REFINEMENTS: usize = 4;
    let cfg = ThetaConfig::default();
    let punct = covering::punctures();
    let mut min_puncture = f64::INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            min_puncture = min_puncture.min(punct[i].distance(&punct[j]));
        }
    }
    let mut c1 = f64::INFINITY;
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        let (mut ra, mut rb) = ((-SIDE_RANGE, SIDE_RANGE), (-SIDE_RANGE, SIDE_RANGE));
        let mut best = f64::INFINITY;
        for _ in 0..=REFINEMENTS {
            let sa = side_samples(a, ra.0, ra.1, N, r, &cfg)?;
            let sb = side_samples(b, rb.0, rb.1, N, r, &cfg)?;
            if sa.is_empty() || sb.is_empty() {
                break;
            }
            let (d, i, j) = closest(&sa, &sb);
            best = best.min(d);
            let (wa, wb) = (2.0 * (ra.1 - ra.0) / (N - 1) as f64, 2.0 * (rb.1 - rb.0) / (N - 1) as f64);
            ra = (sa[i].0 - wa, sa[i].0 + wa);
            rb = (sb[j].0 - wb, sb[j].0 + wb);
        }
        c1 = c1.min(best);
    }
    Ok(RegionConstants {
        r,
        c1,
        c2: min_puncture - 2.0 * r,
        c3: r,
        points_per_side: N,
        refinements: REFINEMENTS,
    })
}

// ---------------------------------------------------------------------------
// Divergence sweeps

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    /// A boundary angle.
    Generic { angle: f64 },
    /// An enumerated tessellation vertex.
    Vertex { index: usize },
}

impl Target {
    /// The boundary point `cayley⁻¹(golden ratio)`: its continued fraction
    /// is all ones, so radial paths toward it stay out of deep horoballs.
    pub fn golden() -> Self {
        let x = 0.5 * (1.0 + 5f64.sqrt());
        Target::Generic {
            angle: cayley_inv(Complex::new(x, 0.0)).arg(),
        }
    }

    pub fn angle(&self, tess: &Tessellation) -> Result<f64> {
        match *self {
            Target::Generic { angle } => Ok(angle),
            Target::Vertex { index } => tess
                .vertices
                .get(index)
                .map(|v| v.z.arg())
                .ok_or_else(|| Error::Domain(format!("no vertex {index} at depth {}", tess.depth))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Generic { angle } => write!(f, "generic({angle:.6})"),
            Target::Vertex { index } => write!(f, "vertex({index})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    DivergentEvidence,
    BoundedEvidence,
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evidence::DivergentEvidence => "divergent-evidence",
            Evidence::BoundedEvidence => "bounded-evidence",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub ladder: Vec<f64>,
    /// Minimum length increment per ladder step for divergent evidence.
    pub floor: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ladder: vec![0.9, 0.99, 0.999, 0.9999, 0.99999],
            floor: 0.05,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let increasing = self.ladder.windows(2).all(|w| w[1] > w[0]);
        let inside = self.ladder.iter().all(|r| *r > 0.0 && *r < 1.0);
        if self.ladder.len() < 2 || !increasing || !inside {
            return Err(Error::InvalidData("sweep ladder must increase within (0, 1) and have two values".into()));
        }
        if !(self.floor > 0.0) {
            return Err(Error::InvalidData("sweep floor must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub target: Target,
    pub angle: f64,
    pub profile: LengthProfile,
    pub evidence: Evidence,
}

pub fn classify(profile: &LengthProfile, floor: f64) -> Evidence {
    if profile.increments().iter().all(|d| *d > floor) {
        Evidence::DivergentEvidence
    } else {
        Evidence::BoundedEvidence
    }
}

/// Length profile of the radial path toward `target`.
pub fn divergence_sweep(target: Target, metric: &Metric<'_>, tess: &Tessellation, cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let angle = target.angle(tess)?;
    let profile = length_profile(&ParamPath::radial(angle), metric, &cfg.ladder)?;
    Ok(SweepResult {
        target,
        angle,
        evidence: classify(&profile, cfg.floor),
        profile,
    })
}

/// Sweeps over several `(target, metric)` pairs, in input order.
pub fn divergence_sweeps(jobs: &[(Target, Metric<'_>)], tess: &Tessellation, cfg: &SweepConfig) -> Result<Vec<SweepResult>> {
    jobs.par_iter().map(|(t, m)| divergence_sweep(*t, m, tess, cfg)).collect()
}

// ---------------------------------------------------------------------------
// Log-variation bound

/// A hororegion `D_n` (or its double) about puncture `j` with ball radius `r`.
#[derive(Debug, Clone, Copy)]
pub struct Hororegion<'a> {
    pub tess: &'a Tessellation,
    pub puncture: usize,
    pub r: f64,
    pub doubled: bool,
}

/// Samples at which region membership of a path is enforced.
pub const REGION_SAMPLES: usize = 65;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogVariation {
    /// `g_𝔻` length.
    pub lhs: f64,
    /// `(1/√2)·TV(log Im ψ)`.
    pub rhs: f64,
    /// The vertex `z_n` whose region contains the path.
    pub vertex: Option<usize>,
}

impl LogVariation {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs >= self.rhs - slack
    }
}

/// Compare the `g_𝔻` length of `path` with the total variation of
/// `log Im ψ` along it. The path must stay in one component of the region.
pub fn log_variation_check(path: &ParamPath, data: &HolomorphicData, region: &Hororegion<'_>) -> Result<LogVariation> {
    if path.is_proper() {
        return Err(Error::Path("log-variation check needs a compact path".into()));
    }
    let mut vertex = None;
    for k in 0..REGION_SAMPLES {
        let z = path.point(k as f64 / (REGION_SAMPLES - 1) as f64)?.z;
        let (inside, n) = data.covering().hororegion_test(region.tess, z, region.puncture, region.r, region.doubled)?;
        if !inside || (k > 0 && n != vertex) {
            return Err(Error::Region(format!("path {} leaves the hororegion at {z}", path.label())));
        }
        vertex = n;
    }
    let psi = data.psi_fn();
    let metric = Metric::Disc(data);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (a, b) in path.intervals(0.0, 1.0) {
        let (l, r) = quadrature::simpson_pair(
            |x| {
                let (p, w) = path.jet_var(x, a, b)?;
                let (f, df) = psi.eval_d(p.z)?;
                if !(f.im > 0.0) {
                    return Err(Error::Region(format!("Im psi <= 0 at {}", p.z)));
                }
                let dv = (df * Complex::new(w[0], w[1])).im;
                Ok((metric.speed(&p, &w)?, FRAC_1_SQRT_2 * dv.abs() / f.im))
            },
            a,
            b,
            LENGTH_TOLERANCE,
            INITIAL_PANELS,
        )?;
        lhs += l;
        rhs += r;
    }
    Ok(LogVariation { lhs, rhs, vertex })
}

// ---------------------------------------------------------------------------
// Horizontal lengths

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizontalLengths {
    pub g3_length: f64,
    pub short_length: f64,
    /// `max |β(γ′)|` over quadrature nodes, after any projection.
    pub max_beta: f64,
    /// `max |β(γ′)|` before projection.
    pub max_beta_raw: f64,
    /// Set when `β` vanished at a node and the velocity was left unprojected.
    pub rerouted: bool,
}

/// `g₃` and `g_s` lengths of a slice path. With `project`, velocities are
/// replaced by their `g₃`-orthogonal projections onto `ker β`.
pub fn horizontal_length(path: &ParamPath, data: &HolomorphicData, project: bool) -> Result<HorizontalLengths> {
    use std::sync::Mutex;
    let stats = Mutex::new((0.0f64, 0.0f64, false));
    let mut g3_length = 0.0;
    let mut short_length = 0.0;
    for (a, b) in path.intervals(0.0, 1.0) {
        let (l3, ls) = quadrature::simpson_pair(
            |x| {
                let (p, mut w) = path.jet_var(x, a, b)?;
                let f = data.slice_and_contact(p.z, p.theta)?;
                let raw = f.beta.dot(&w);
                let mut rerouted = false;
                if project {
                    let ginv_beta = f
                        .g3
                        .cholesky()
                        .ok_or_else(|| Error::DegenerateMetric(format!("g3 at {}", p.z)))?
                        .solve(&f.beta);
                    let norm2 = f.beta.dot(&ginv_beta);
                    if norm2 > 1e-24 {
                        w -= ginv_beta * (raw / norm2);
                    } else {
                        rerouted = true;
                    }
                }
                let after = f.beta.dot(&w);
                let mut s = stats.lock().expect("stats lock");
                s.0 = s.0.max(after.abs());
                s.1 = s.1.max(raw.abs());
                s.2 |= rerouted;
                let q3 = (w.transpose() * f.g3 * w)[0].max(0.0).sqrt();
                let qs = (w.transpose() * f.gs * w)[0].max(0.0).sqrt();
                Ok((q3, qs))
            },
            a,
            b,
            LENGTH_TOLERANCE,
            INITIAL_PANELS,
        )
        .map_err(|e| path_err(path, e))?;
        g3_length += l3;
        short_length += ls;
    }
    let (max_beta, max_beta_raw, rerouted) = stats.into_inner().expect("stats lock");
    Ok(HorizontalLengths {
        g3_length,
        short_length,
        max_beta,
        max_beta_raw,
        rerouted,
    })
}

// ---------------------------------------------------------------------------
// Fingerprints

/// `Im ψ_μ` at each sample.
pub fn radial_graph_fingerprint(psi_mu: &dyn HoloFn, samples: &[Complex]) -> Result<Vec<f64>> {
    samples.iter().map(|&z| psi_mu.eval(z).map(|w| w.im)).collect()
}

/// `sup |f₁ − f₂|` over a common sample.
pub fn fingerprint_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidData(format!("fingerprints of lengths {} and {} differ", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Lower bound `k·c₁` for a path crossing `k` hexagons between even sides.
pub fn crossing_bound(k: u32, constants: &RegionConstants) -> f64 {
    f64::from(k) * constants.c1
}

/// Minimum distance between distinct punctures (`π/2`).
pub const MIN_PUNCTURE_DISTANCE: f64 = FRAC_PI_2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{BlaschkePsi, BlaschkeSpec, FnHolo, I};
    use crate::tessellation;

    #[test]
    fn euclidean_examples() {
        let seg = ParamPath::segment(Complex::new(-0.2, 0.1), Complex::new(0.1, 0.5));
        assert!((path_length(&seg, &Metric::Euclidean, 1.0).unwrap() - 0.5).abs() < 1e-9);
        let c = ParamPath::circle(Complex::new(0.1, 0.0), 0.3);
        let l = path_length(&c, &Metric::Euclidean, 1.0).unwrap();
        assert!((l - std::f64::consts::TAU * 0.3).abs() < 1e-6);
    }

    #[test]
    fn region_constant_values() {
        let c = region_constants(0.1).unwrap();
        assert_eq!(c.c3, 0.1);
        assert!((c.c2 - (FRAC_PI_2 - 0.2)).abs() < 1e-12);
        // Adjacent sides lie on one great circle through the punctures.
        assert!(c.c1 > 0.0 && (c.c1 - 0.2).abs() < 1e-3, "{}", c.c1);
        assert!(region_constants(0.8).is_err());
    }

    #[test]
    fn generic_radial_grows() {
        let cov = Covering::default();
        let m = Metric::SpherePullback(&cov);
        let p = ParamPath::radial(0.7);
        let l = [0.9, 0.99, 0.999].map(|r| path_length(&p, &m, r).unwrap());
        assert!(l[2] > l[1] && l[1] > l[0], "{l:?}");
    }

    #[test]
    fn log_variation_synthetic() {
        // ψ = 2i(1 − z): Im ψ falls from 0.2 to 0.02 on [0.9, 0.99].
        let psi = FnHolo::new(|z: Complex| 2.0 * I * (1.0 - z), |_z: Complex| -2.0 * I);
        let data = HolomorphicData::new(Covering::default(), Arc::new(psi)).unwrap();
        let tess = tessellation::enumerate(2).unwrap();
        let region = Hororegion {
            tess: &tess,
            puncture: 2,
            r: 0.1,
            doubled: true,
        };
        let path = ParamPath::segment(Complex::new(0.9, 0.0), Complex::new(0.99, 0.0));
        let lv = log_variation_check(&path, &data, &region).unwrap();
        assert!((lv.rhs - 10f64.ln() * FRAC_1_SQRT_2).abs() < 1e-6, "{lv:?}");
        assert!(lv.lhs >= 1.627, "{lv:?}");
        let outside = ParamPath::segment(Complex::new(0.0, 0.0), Complex::new(0.5, 0.0));
        assert!(matches!(log_variation_check(&outside, &data, &region), Err(Error::Region(_))));
    }

    #[test]
    fn horizontal_projection() {
        let spec = BlaschkeSpec::vertex_targeted(&[Complex::new(1.0, 0.0), I, Complex::new(-1.0, 0.0)], 10.0, 2).unwrap();
        let data = HolomorphicData::new(Covering::default(), Arc::new(BlaschkePsi::new(spec).unwrap())).unwrap();
        let z = Complex::new(0.2, 0.3);
        let c = ParamPath::theta_circle(z);
        let raw = horizontal_length(&c, &data, false).unwrap();
        let re_psi = data.psi_fn().eval(z).unwrap().re;
        // β(∂θ) = −Re ψ and θ̇ = 2π.
        assert!((raw.max_beta_raw - std::f64::consts::TAU * re_psi.abs()).abs() < 1e-8);
        assert!(raw.g3_length > raw.short_length + 1e-3);
        let h = horizontal_length(&c, &data, true).unwrap();
        assert!(h.max_beta < 1e-10 && (h.g3_length - h.short_length).abs() < 1e-8, "{h:?}");
        let zero = horizontal_length(&ParamPath::constant(PathPoint { z, theta: 0.4 }), &data, true).unwrap();
        assert_eq!((zero.g3_length, zero.short_length, zero.max_beta), (0.0, 0.0, 0.0));
    }

    #[test]
    fn fingerprints() {
        let a = vec![0.1, 0.5, 0.3];
        assert_eq!(fingerprint_distance(&a, &a).unwrap(), 0.0);
        let b: Vec<f64> = a.iter().map(|x| 2.0 * x).collect();
        assert!((fingerprint_distance(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        assert!(fingerprint_distance(&a, &b[..2]).is_err());
    }
}
