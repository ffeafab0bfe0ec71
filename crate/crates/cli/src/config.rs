//! Experiment configuration: one JSON document drives every command.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use gh_ansatz::ansatz::{HolomorphicData, Rho0Policy};
use gh_ansatz::complex::{apply_mu, BlaschkePsi, BlaschkeSpec, BlaschkeZero, HoloFn, MuSpec};
use gh_ansatz::covering::Covering;
use gh_ansatz::fd::FDConfig;
use gh_ansatz::paths::{SweepConfig, Target};
use gh_ansatz::verify::{Budgets, SuiteConfig, DEFAULT_SUITE_RADIUS};
use gh_ansatz::{Complex, Error};
use serde::{Deserialize, Serialize};

/// How `ψ` is specified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiSpec {
    /// Constant `φ ≡ i·im_phi` over the chart inclusion.
    Flat { im_phi: f64 },
    /// `ψ = i√(1 − B)` for an explicit Blaschke product.
    Blaschke {
        #[serde(default)]
        power: u32,
        zeros: Vec<BlaschkeZero>,
    },
    /// Zeros `(1 − base^{−j})·v` for each vertex `v` and `j = 1..=levels`.
    VertexTargeted { vertices: Vec<Complex>, base: f64, levels: u32 },
}

impl Default for PsiSpec {
    fn default() -> Self {
        PsiSpec::VertexTargeted {
            vertices: vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(-1.0, 0.0)],
            base: 10.0,
            levels: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSpec {
    pub psi: PsiSpec,
    /// Post-composition `ψ ↦ μ∘ψ`; absent means the identity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<MuSpec>,
    pub covering: Covering,
    pub rho0: Rho0Policy,
    /// Multiplier on `V`; 1 except to exercise failure detection.
    pub v_scale: f64,
    pub base_point: Complex,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            psi: PsiSpec::default(),
            mu: None,
            covering: Covering::default(),
            rho0: Rho0Policy::Canonical,
            v_scale: 1.0,
            base_point: Complex::new(0.0, 0.0),
        }
    }
}

impl DataSpec {
    pub fn is_flat(&self) -> bool {
        matches!(self.psi, PsiSpec::Flat { .. })
    }

    /// `ψ` before any `μ`.
    pub fn base_psi(&self) -> Result<Arc<dyn HoloFn>, Error> {
        Ok(match &self.psi {
            PsiSpec::Flat { im_phi } => {
                if !(*im_phi > 0.0) {
                    return Err(Error::InvalidData(format!("im_phi = {im_phi} must be positive")));
                }
                Arc::new(gh_ansatz::complex::Constant(Complex::new(0.0, 1.0 / im_phi)))
            }
            PsiSpec::Blaschke { power, zeros } => Arc::new(BlaschkePsi::new(BlaschkeSpec::new(*power, zeros.clone())?)?),
            PsiSpec::VertexTargeted { vertices, base, levels } => {
                Arc::new(BlaschkePsi::new(BlaschkeSpec::vertex_targeted(vertices, *base, *levels)?)?)
            }
        })
    }

    /// `μ∘ψ` for a given `μ`.
    pub fn psi_with(&self, mu: &MuSpec) -> Result<Arc<dyn HoloFn>, Error> {
        Ok(Arc::new(apply_mu(mu.clone(), self.base_psi()?)?))
    }

    pub fn build(&self) -> Result<HolomorphicData, Error> {
        let psi = match &self.mu {
            Some(mu) => self.psi_with(mu)?,
            None => self.base_psi()?,
        };
        let covering = if self.is_flat() { Covering::Chart } else { self.covering };
        Ok(HolomorphicData::new(covering, psi)?
            .with_rho0(self.rho0)
            .with_base_point(self.base_point)
            .with_v_scale(self.v_scale))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Points per axis for grid sweeps.
    pub resolution: usize,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { resolution: 24, seed: 2024 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    pub points: usize,
    pub radius: f64,
    pub beta_grid: usize,
    pub contact_samples: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            points: 50,
            radius: DEFAULT_SUITE_RADIUS,
            beta_grid: 40,
            contact_samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvatureSpec {
    pub fd: FDConfig,
    /// The scan covers `|z| ≤ radius` on a `resolution²` grid at each `t`.
    pub radius: f64,
    pub resolution: usize,
    pub t_values: Vec<f64>,
    pub theta_values: Vec<f64>,
}

impl Default for CurvatureSpec {
    fn default() -> Self {
        Self {
            fd: FDConfig::with_h(1e-3),
            radius: 0.5,
            resolution: 5,
            t_values: vec![-0.5, 0.0, 0.5],
            theta_values: vec![0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub ladder: SweepConfig,
    pub targets: Vec<Target>,
    /// Number of sampled hororegion paths for the log-variation bound.
    pub log_variation_paths: usize,
    /// Number of projected-horizontal slice paths.
    pub horizontal_paths: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            ladder: SweepConfig::default(),
            targets: vec![Target::golden(), Target::Vertex { index: 0 }],
            log_variation_paths: 10,
            horizontal_paths: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerprintSpec {
    pub mus: Vec<MuSpec>,
    pub samples: usize,
    pub radius: f64,
    /// Minimum pairwise distance for distinct fingerprints.
    pub separation: f64,
}

impl Default for FingerprintSpec {
    fn default() -> Self {
        Self {
            mus: vec![MuSpec::Scale { c: 1.0 }, MuSpec::Scale { c: 2.0 }, MuSpec::Perturb { eps: 0.05 }],
            samples: 100,
            radius: 0.9,
            separation: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataSpec,
    /// Radius `r` of the puncture balls defining hororegions.
    pub ball_radius: f64,
    pub depth: usize,
    pub grid: GridSpec,
    pub fd: FDConfig,
    pub budgets: Budgets,
    pub verify: VerifySpec,
    pub curvature: CurvatureSpec,
    pub sweep: SweepSpec,
    pub fingerprint: FingerprintSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            data: DataSpec::default(),
            ball_radius: 0.1,
            depth: 3,
            grid: GridSpec::default(),
            fd: FDConfig::default(),
            budgets: Budgets::default(),
            verify: VerifySpec::default(),
            curvature: CurvatureSpec::default(),
            sweep: SweepSpec::default(),
            fingerprint: FingerprintSpec::default(),
            output_dir: None,
        }
    }
}

/// A configuration problem; maps to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.ball_radius > 0.0 && self.ball_radius < std::f64::consts::FRAC_PI_4) {
            return bad(format!("ball_radius {} must lie in (0, pi/4)", self.ball_radius));
        }
        if self.depth > gh_ansatz::tessellation::MAX_DEPTH {
            return bad(format!("depth {} exceeds {}", self.depth, gh_ansatz::tessellation::MAX_DEPTH));
        }
        if self.grid.resolution < 2 || self.grid.resolution > 2000 {
            return bad(format!("grid resolution {} must lie in [2, 2000]", self.grid.resolution));
        }
        if !(self.data.v_scale > 0.0 && self.data.v_scale.is_finite()) {
            return bad(format!("v_scale {} must be positive", self.data.v_scale));
        }
        if self.data.base_point.norm() >= 1.0 {
            return bad("base_point must lie in the unit disc".into());
        }
        self.fd.validate()?;
        self.curvature.fd.validate()?;
        self.budgets.validate()?;
        self.sweep.ladder.validate()?;
        if self.curvature.t_values.is_empty() || self.curvature.theta_values.is_empty() {
            return bad("curvature t_values and theta_values must be non-empty".into());
        }
        if self.curvature.resolution < 2 || self.curvature.resolution > 200 {
            return bad(format!("curvature resolution {} must lie in [2, 200]", self.curvature.resolution));
        }
        if !(self.curvature.radius > 0.0 && self.curvature.radius < 1.0) {
            return bad("curvature radius must lie in (0, 1)".into());
        }
        if !(self.verify.radius > 0.0 && self.verify.radius < 1.0) || self.verify.points == 0 {
            return bad("verify needs points > 0 and radius in (0, 1)".into());
        }
        if !(self.fingerprint.radius > 0.0 && self.fingerprint.radius < 1.0) || self.fingerprint.samples == 0 {
            return bad("fingerprint needs samples > 0 and radius in (0, 1)".into());
        }
        if !(self.fingerprint.separation > 0.0) {
            return bad("fingerprint separation must be positive".into());
        }
        if let PsiSpec::Flat { im_phi } = self.data.psi {
            if !(im_phi > 0.0) {
                return bad(format!("im_phi = {im_phi} must be positive"));
            }
        }
        // Building validates ψ, μ and the Blaschke data on a sample.
        self.data.build()?;
        Ok(())
    }

    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            points: self.verify.points,
            radius: self.verify.radius,
            seed: self.grid.seed,
            fd: self.fd,
            budgets: self.budgets,
            beta_grid: self.verify.beta_grid,
            contact_samples: self.verify.contact_samples,
        }
    }
}
