//! Command dispatch. Each command reads the config, writes its artifacts and
//! returns named residuals plus the checks that failed.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::fmt::Display;
use std::io;
use std::path::Path;

use gh_ansatz::ansatz::{FourPoint, HolomorphicData};
use gh_ansatz::covering::{puncture_of, Covering};
use gh_ansatz::fd::FDConfig;
use gh_ansatz::paths::{
    self, crossing_bound, divergence_sweeps, fingerprint_distance, horizontal_length, region_constants, log_variation_check,
    path_length_between, radial_graph_fingerprint, Evidence, Hororegion, Metric, MetricTag, ParamPath, PathPoint, SweepResult,
    Target, MIN_PUNCTURE_DISTANCE,
};
use gh_ansatz::sampling::{disc_samples, square_grid, uniform_samples};
use gh_ansatz::tessellation::{self, Tessellation};
use gh_ansatz::verify::{self, run_suite};
use gh_ansatz::{Complex, Error};
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig};
use crate::manifest::{sha256_hex, Artifacts, CommandRecord, RunManifest, Status};
use crate::svg::Svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Enumerate the ideal triangle tessellation.
    Tessellate,
    /// Classify a disc grid by hororegion membership.
    Hororegions,
    /// Sample the assembled metric and slice quantities.
    Build,
    /// Run the identity suite.
    Verify,
    /// Finite-difference curvature on a grid.
    CurvatureScan,
    /// Divergence sweeps, region constants and slice path lengths.
    Sweep,
    /// Radial-graph fingerprints of the post-composition family.
    Fingerprint,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tessellate => "tessellate",
            Command::Hororegions => "hororegions",
            Command::Build => "build",
            Command::Verify => "verify",
            Command::CurvatureScan => "curvature-scan",
            Command::Sweep => "sweep",
            Command::Fingerprint => "fingerprint",
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub depth: Option<usize>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    /// `--grid` sets the resolution the invoked command actually uses.
    pub fn apply(&self, cfg: &mut ExperimentConfig, cmd: Command) -> Result<(), ConfigError> {
        if let Some(d) = self.depth {
            cfg.depth = d;
        }
        if let Some(s) = self.seed {
            cfg.grid.seed = s;
        }
        if let Some(n) = self.grid {
            match cmd {
                Command::CurvatureScan => cfg.curvature.resolution = n,
                _ => cfg.grid.resolution = n,
            }
        }
        cfg.validate()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("output error: {0}")]
    Io(#[from] io::Error),
    #[error("computation failed: {0}")]
    Numeric(#[from] Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Numeric(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub residuals: BTreeMap<String, f64>,
    pub failed: Vec<String>,
}

impl Outcome {
    fn value(&mut self, name: &str, v: f64) {
        self.residuals.insert(name.to_string(), v);
    }

    fn check(&mut self, cmd: Command, name: &str, passed: bool, residual: f64, budget: f64) {
        self.value(name, residual);
        diag(&[
            ("command", &cmd.name()),
            ("check", &name),
            ("status", &if passed { "pass" } else { "fail" }),
            ("residual", &f(residual)),
            ("budget", &f(budget)),
        ]);
        if !passed {
            self.failed.push(name.to_string());
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed.is_empty() {
            0
        } else {
            1
        }
    }
}

/// One structured diagnostic line on standard error.
pub fn diag(pairs: &[(&str, &dyn Display)]) {
    let line: Vec<String> = pairs
        .iter()
        .map(|(k, v)| {
            let v = v.to_string();
            if v.is_empty() || v.contains(char::is_whitespace) || v.contains('"') {
                format!("{k}={v:?}")
            } else {
                format!("{k}={v}")
            }
        })
        .collect();
    eprintln!("{}", line.join(" "));
}

/// Run `cmd`, write its artifacts into `out` and update the manifest there.
pub fn execute(cmd: Command, cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    cfg.validate()?;
    let mut art = Artifacts::new(out)?;
    let outcome = match cmd {
        Command::Tessellate => tessellate(cfg, &mut art),
        Command::Hororegions => hororegions(cfg, &mut art),
        Command::Build => build(cfg, &mut art),
        Command::Verify => verify_cmd(cfg, &mut art),
        Command::CurvatureScan => curvature_scan(cfg, &mut art),
        Command::Sweep => sweep(cfg, &mut art),
        Command::Fingerprint => fingerprint(cfg, &mut art),
    }?;
    let files = art.finish();
    let hash = sha256_hex(cfg.to_json().as_bytes());
    let mut manifest = RunManifest::open(out, &hash);
    let record = CommandRecord {
        status: if outcome.failed.is_empty() { Status::Ok } else { Status::CheckFailed },
        exit_code: outcome.exit_code(),
        residuals: outcome.residuals.clone(),
        failed_checks: outcome.failed.clone(),
        files: files.iter().map(|(n, _)| n.clone()).collect(),
    };
    manifest.record(cmd.name(), record, files);
    manifest.write(out)?;
    diag(&[
        ("command", &cmd.name()),
        ("status", &if outcome.failed.is_empty() { "ok" } else { "check_failed" }),
        ("failed", &outcome.failed.join(",")),
        ("out", &out.display()),
    ]);
    Ok(outcome)
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e15)`.
pub fn f(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Eigenvalue ratio below which the sampled metric is numerically degenerate.
pub const DEGENERATE_RATIO: f64 = 1e-12;

fn tessellation_svg(tess: &Tessellation) -> Svg {
    let mut svg = Svg::disc();
    let mut seen = BTreeSet::new();
    for t in &tess.triangles {
        for k in 0..3 {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            let mut key = [t.labels[a].to_string(), t.labels[b].to_string()];
            key.sort();
            if seen.insert(key) {
                svg.geodesic(&t.sides[k], t.vertices[a], t.vertices[b], "steelblue");
            }
        }
    }
    svg
}

// ---------------------------------------------------------------------------

fn tessellate(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let cmd = Command::Tessellate;
    let tess = tessellation::enumerate(cfg.depth)?;
    let rows = tess.triangles.iter().enumerate().map(|(i, t)| {
        let mut row = vec![i.to_string(), t.word.clone(), t.depth.to_string()];
        row.extend(t.labels.iter().map(|l| l.to_string()));
        for v in &t.vertices {
            row.push(f(v.re));
            row.push(f(v.im));
        }
        row
    });
    art.csv(
        "triangles.csv",
        &["index", "word", "depth", "label0", "label1", "label2", "v0_re", "v0_im", "v1_re", "v1_im", "v2_re", "v2_im"],
        rows,
    )?;
    let rows = tess.vertices.iter().enumerate().map(|(i, v)| {
        vec![i.to_string(), v.label.to_string(), f(v.z.re), f(v.z.im), puncture_of(v.label).to_string()]
    });
    art.csv("vertices.csv", &["index", "label", "re", "im", "puncture"], rows)?;
    art.text("tessellation.svg", &tessellation_svg(&tess).render())?;

    let mut out = Outcome::default();
    // A reduced word of length d ≥ 1 has 3·2^{d−1} choices.
    let expected = 1 + 3 * ((1usize << cfg.depth) - 1);
    out.value("vertices", tess.vertices.len() as f64);
    out.value("max_boundary_gap", tess.max_boundary_gap());
    let count = tess.triangles.len();
    out.check(cmd, "triangle_count", count == expected, count as f64, expected as f64);
    Ok(out)
}

// ---------------------------------------------------------------------------

/// Membership of one grid point: `(puncture, vertex)` for radius `r` and `2r`.
type Membership = (Option<(usize, Option<usize>)>, Option<(usize, Option<usize>)>);

fn membership(cov: &Covering, tess: &Tessellation, z: Complex, r: f64) -> Result<(Membership, usize), Error> {
    let mut inner = None;
    let mut outer = None;
    let mut hits = 0;
    for j in 1..=3 {
        let (a, va) = cov.hororegion_test(tess, z, j, r, false)?;
        let (b, vb) = cov.hororegion_test(tess, z, j, r, true)?;
        if a {
            inner = Some((j, va));
        }
        if b {
            outer = Some((j, vb));
            hits += 1;
        }
    }
    Ok(((inner, outer), hits))
}

fn hororegions(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let cmd = Command::Hororegions;
    let tess = tessellation::enumerate(cfg.depth)?;
    let cov = cfg.data.covering;
    let r = cfg.ball_radius;
    let pts = square_grid(cfg.grid.resolution, 1.0, 0.995);
    let results: Vec<_> = pts.par_iter().map(|&z| membership(&cov, &tess, z, r)).collect();

    let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
    let mut nesting = 0usize;
    let mut overlaps = 0usize;
    let mut unresolved = 0usize;
    let mut svg = tessellation_svg(&tess);
    let mut rows = Vec::with_capacity(pts.len());
    for (z, res) in pts.iter().zip(&results) {
        let tri = opt(tess.locate(*z));
        match res {
            Ok(((inner, outer), hits)) => {
                if inner.is_some() && inner.map(|m| m.0) != outer.map(|m| m.0) {
                    nesting += 1;
                }
                if *hits > 1 {
                    overlaps += 1;
                }
                if inner.is_some() {
                    svg.dot(*z, "firebrick");
                } else if outer.is_some() {
                    svg.dot(*z, "orange");
                }
                rows.push(vec![
                    f(z.re),
                    f(z.im),
                    tri,
                    opt(inner.map(|m| m.0)),
                    opt(inner.and_then(|m| m.1)),
                    opt(outer.map(|m| m.0)),
                    opt(outer.and_then(|m| m.1)),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                unresolved += 1;
                diag(&[("command", &cmd.name()), ("point", z), ("status", &"unresolved"), ("error", e)]);
                rows.push(vec![f(z.re), f(z.im), tri, String::new(), String::new(), String::new(), String::new(), "unresolved".into()]);
            }
        }
    }
    art.csv(
        "hororegions.csv",
        &["re", "im", "triangle", "puncture_r", "vertex_r", "puncture_2r", "vertex_2r", "status"],
        rows,
    )?;
    art.text("hororegions.svg", &svg.render())?;

    let mut out = Outcome::default();
    out.value("points", pts.len() as f64);
    out.value("unresolved", unresolved as f64);
    out.check(cmd, "region_nesting", nesting == 0, nesting as f64, 1.0);
    out.check(cmd, "ball_disjointness", overlaps == 0, overlaps as f64, 1.0);
    Ok(out)
}

// ---------------------------------------------------------------------------

fn build(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let cmd = Command::Build;
    let data = cfg.data.build()?;
    let zs = square_grid(cfg.grid.resolution, 0.9, 0.9);
    let ts = &cfg.curvature.t_values;
    let pts: Vec<FourPoint> = ts.iter().flat_map(|&t| zs.iter().map(move |&z| FourPoint::new(z, t, 0.0))).collect();
    let samples: Vec<_> = pts
        .par_iter()
        .map(|p| {
            data.assemble(*p).map(|s| {
                let eig = s.g.symmetric_eigen().eigenvalues;
                (s, eig.min() / eig.amax(), s.g.determinant())
            })
        })
        .collect();
    let mut bad = 0usize;
    let mut degenerate = 0usize;
    let mut unresolved = 0usize;
    let mut rows = Vec::with_capacity(pts.len());
    for (p, s) in pts.iter().zip(&samples) {
        match s {
            Ok((s, min_eig, det)) => {
                // Deep in a horoball |dΦ|² underflows relative to V and two
                // eigenvalues sit at rounding level; that is not a sign defect.
                let status = if !(s.v > 0.0 && s.v.is_finite() && *min_eig >= -DEGENERATE_RATIO) {
                    bad += 1;
                    "negative"
                } else if *min_eig <= DEGENERATE_RATIO {
                    degenerate += 1;
                    "degenerate"
                } else {
                    "ok"
                };
                rows.push(vec![
                    f(p.z.re),
                    f(p.z.im),
                    f(p.t),
                    f(s.v),
                    f(s.rho),
                    f(s.x[0]),
                    f(s.x[1]),
                    f(s.x[2]),
                    f(*det),
                    f(*min_eig),
                    status.into(),
                ]);
            }
            Err(e) => {
                unresolved += 1;
                diag(&[("command", &cmd.name()), ("point", &p.z), ("t", &p.t), ("status", &"unresolved"), ("error", e)]);
                let mut row = vec![f(p.z.re), f(p.z.im), f(p.t)];
                row.extend(std::iter::repeat_n(String::new(), 7));
                row.push("unresolved".into());
                rows.push(row);
            }
        }
    }
    art.csv(
        "samples.csv",
        &["re", "im", "t", "v", "rho", "x1", "x2", "x3", "g_det", "g_eig_ratio", "status"],
        rows,
    )?;

    let frames: Vec<_> = zs.par_iter().map(|&z| data.slice_and_contact(z, 0.0)).collect();
    let mut max_split: f64 = 0.0;
    let mut rows = Vec::with_capacity(zs.len());
    for (z, fr) in zs.iter().zip(&frames) {
        match fr {
            Ok(fr) => {
                let split = fr.split_residual() / fr.g3.amax().max(1.0);
                max_split = max_split.max(split);
                rows.push(vec![
                    f(z.re),
                    f(z.im),
                    f(fr.t_slice),
                    f(fr.rho),
                    f(fr.v),
                    f(fr.psi.re),
                    f(fr.psi.im),
                    f(fr.beta[0]),
                    f(fr.beta[1]),
                    f(fr.beta[2]),
                    f(split),
                    "ok".into(),
                ]);
            }
            Err(_) => {
                unresolved += 1;
                let mut row = vec![f(z.re), f(z.im)];
                row.extend(std::iter::repeat_n(String::new(), 9));
                row.push("unresolved".into());
                rows.push(row);
            }
        }
    }
    art.csv(
        "slice.csv",
        &["re", "im", "t_slice", "rho", "v", "psi_re", "psi_im", "beta_u", "beta_v", "beta_theta", "split_residual", "status"],
        rows,
    )?;

    let mut out = Outcome::default();
    out.value("unresolved", unresolved as f64);
    out.value("degenerate", degenerate as f64);
    out.check(cmd, "metric_positive", bad == 0, bad as f64, 1.0);
    out.check(cmd, "slice_split", max_split < cfg.budgets.split, max_split, cfg.budgets.split);
    Ok(out)
}

// ---------------------------------------------------------------------------

fn verify_cmd(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let cmd = Command::Verify;
    let data = cfg.data.build()?;
    let report = run_suite(&data, &cfg.suite());
    let rows = report.checks.iter().map(|c| {
        vec![
            c.name.clone(),
            f(c.residual),
            f(c.budget),
            f(c.noise_floor),
            c.samples.to_string(),
            c.passed.to_string(),
            c.note.clone(),
        ]
    });
    art.csv("verify.csv", &["check", "residual", "budget", "noise_floor", "samples", "passed", "note"], rows)?;
    art.json("verify.json", &report)?;
    let mut out = Outcome::default();
    for c in &report.checks {
        out.check(cmd, &c.name, c.passed, c.residual, c.budget);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

/// Step used for the flat convergence ratio; large enough that truncation
/// error dominates rounding.
pub const CONVERGENCE_STEP: f64 = 0.02;

fn linspace(n: usize, half: f64) -> Vec<f64> {
    (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
}

fn curvature_scan(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let cmd = Command::CurvatureScan;
    let data = cfg.data.build()?;
    let c = &cfg.curvature;
    let axis = linspace(c.resolution, c.radius / std::f64::consts::SQRT_2);
    let mut pts = Vec::new();
    for &t in &c.t_values {
        for &theta in &c.theta_values {
            for &v in &axis {
                for &u in &axis {
                    pts.push(FourPoint::new(Complex::new(u, v), t, theta));
                }
            }
        }
    }
    let metric = verify::data_metric(&data);
    let reports: Vec<_> = pts.par_iter().map(|p| verify::curvature(&metric, &p.coords(), &c.fd)).collect();

    let mut rows = Vec::with_capacity(pts.len());
    let mut failures = 0usize;
    let (mut max_r, mut max_noise, mut max_ric_rel) = (0.0f64, 0.0f64, 0.0f64);
    let mut separated = 0usize;
    for (p, rep) in pts.iter().zip(&reports) {
        match rep {
            Ok(r) => {
                max_r = max_r.max(r.max_riemann);
                max_noise = max_noise.max(r.noise_floor);
                max_ric_rel = max_ric_rel.max(r.ricci_norm / r.max_riemann.max(f64::MIN_POSITIVE));
                if r.ricci_norm < 10.0 * r.noise_floor && r.max_riemann > 100.0 * r.noise_floor {
                    separated += 1;
                }
                rows.push(vec![
                    f(p.z.re),
                    f(p.z.im),
                    f(p.t),
                    f(p.theta),
                    f(r.max_riemann),
                    f(r.ricci_norm),
                    f(r.noise_floor),
                    f(r.h),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                failures += 1;
                diag(&[("command", &cmd.name()), ("point", &p.z), ("t", &p.t), ("status", &"unresolved"), ("error", e)]);
                rows.push(vec![
                    f(p.z.re),
                    f(p.z.im),
                    f(p.t),
                    f(p.theta),
                    String::new(),
                    String::new(),
                    String::new(),
                    f(c.fd.h),
                    "unresolved".into(),
                ]);
            }
        }
    }
    art.csv(
        "curvature.csv",
        &["re", "im", "t", "theta", "max_riemann", "ricci_norm", "noise_floor", "h", "status"],
        rows,
    )?;

    let mut out = Outcome::default();
    out.value("points", pts.len() as f64);
    out.value("max_riemann", max_r);
    out.value("max_noise_floor", max_noise);
    out.value("max_ricci_relative", max_ric_rel);
    out.check(cmd, "curvature_evaluation", failures == 0, failures as f64, 1.0);
    let b = &cfg.budgets;
    if cfg.data.is_flat() {
        out.check(cmd, "flat_riemann", max_r < b.flat_riemann, max_r, b.flat_riemann);
        out.check(cmd, "flat_noise", max_noise < b.flat_noise, max_noise, b.flat_noise);
        let step = FDConfig {
            h: CONVERGENCE_STEP,
            ..c.fd
        };
        let centre = pts.first().map(|p| p.coords()).unwrap_or([0.0; 4]);
        let ratio = verify::flat_convergence_ratio(&metric, &centre, &step)?;
        out.check(cmd, "convergence_ratio", ratio >= 4.0, ratio, 4.0);
    } else {
        out.check(cmd, "ricci_separation", separated > 0, separated as f64, 1.0);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

/// Height of the horizontal crossing lines in the upper half plane; above
/// the Farey semicircles and below the ball about the cusp at infinity.
pub const CROSSING_HEIGHT: f64 = 0.8;
/// Attempts per requested log-variation path before giving up.
const LOGVAR_ATTEMPTS: usize = 50;
/// Radius and fibre-angle window of the horizontal slice paths.
const HORIZONTAL_RADIUS: f64 = 0.6;
const CONTROL_POINT: Complex = Complex::new(0.3, 0.2);

fn expected_evidence(target: &Target, metric: MetricTag) -> Option<Evidence> {
    match (target, metric) {
        (Target::Generic { .. }, _) => Some(Evidence::DivergentEvidence),
        (Target::Vertex { .. }, MetricTag::SpherePullback) => Some(Evidence::BoundedEvidence),
        (Target::Vertex { .. }, MetricTag::Disc) => Some(Evidence::DivergentEvidence),
        _ => None,
    }
}

fn sweep(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let cmd = Command::Sweep;
    let data = cfg.data.build()?;
    let cov = cfg.data.covering;
    let tess = tessellation::enumerate(cfg.depth)?;
    let b = &cfg.budgets;
    let mut out = Outcome::default();

    // Divergence sweeps.
    let mut jobs = Vec::new();
    for t in &cfg.sweep.targets {
        jobs.push((*t, Metric::SpherePullback(&cov)));
        jobs.push((*t, Metric::Disc(&data)));
    }
    let results = divergence_sweeps(&jobs, &tess, &cfg.sweep.ladder)?;
    sweep_tables(art, &results)?;
    let constant = data.is_constant();
    let mut mismatches = 0usize;
    for r in &results {
        let expected = expected_evidence(&r.target, r.profile.metric);
        let ok = constant || expected.is_none_or(|e| e == r.evidence);
        diag(&[
            ("command", &cmd.name()),
            ("target", &r.target),
            ("metric", &r.profile.metric),
            ("evidence", &r.evidence),
            ("status", &if ok { "pass" } else { "fail" }),
        ]);
        if !ok {
            mismatches += 1;
        }
    }
    out.check(cmd, "sweep_evidence", mismatches == 0, mismatches as f64, 1.0);

    // Region constants and crossing bounds.
    let consts = region_constants(cfg.ball_radius)?;
    art.json("region_constants.json", &consts)?;
    let c2_exact = MIN_PUNCTURE_DISTANCE - 2.0 * cfg.ball_radius;
    out.value("c1", consts.c1);
    out.value("c2", consts.c2);
    out.value("c3", consts.c3);
    let positive = consts.c1 > 0.0 && consts.c2 > 0.0 && consts.c3 > 0.0;
    out.check(cmd, "region_constants_positive", positive, consts.c1.min(consts.c2).min(consts.c3), 0.0);
    let c2_err = (consts.c2 - c2_exact).abs();
    out.check(cmd, "region_c2_exact", c2_err == 0.0, c2_err, 0.0);

    let mut rows = Vec::new();
    let mut crossing_ok = true;
    for k in [3u32, 5] {
        let path = ParamPath::crossing(k, CROSSING_HEIGHT);
        let len = path_length_between(&path, &Metric::SpherePullback(&cov), 0.0, 1.0)?;
        let bound = crossing_bound(k, &consts);
        crossing_ok &= len >= bound;
        rows.push(vec![k.to_string(), f(CROSSING_HEIGHT), f(len), f(bound)]);
        out.value(&format!("crossing_{k}_length"), len);
    }
    art.csv("crossing.csv", &["k", "height", "phi_sphere_length", "bound"], rows)?;
    out.check(cmd, "crossing_bound", crossing_ok, 0.0, 0.0);

    // Log-variation inequality on sampled hororegion paths.
    let (rows, worst, accepted) = log_variation_paths(cfg, &data, &tess)?;
    art.csv("logvar.csv", &["path", "vertex", "puncture", "lhs", "rhs", "margin", "holds"], rows)?;
    out.value("log_variation_paths", accepted as f64);
    let enough = accepted == cfg.sweep.log_variation_paths;
    // Residual is the largest violation `rhs − lhs`, clamped at zero.
    let violation = (-worst).max(0.0);
    out.check(cmd, "log_variation", enough && violation <= b.log_variation_slack, violation, b.log_variation_slack);

    // Horizontal and control paths on the slice.
    let (rows, max_gap, control) = horizontal_paths(cfg, &data)?;
    art.csv(
        "horizontal.csv",
        &["path", "kind", "g3_length", "short_length", "difference", "max_beta", "max_beta_raw", "rerouted"],
        rows,
    )?;
    out.check(cmd, "horizontal_agreement", max_gap < b.horizontal, max_gap, b.horizontal);
    if let Some(gap) = control {
        out.check(cmd, "control_gap", gap > b.control_gap, gap, b.control_gap);
    }

    art.text("sweep.svg", &sweep_svg(&results).render())?;
    Ok(out)
}

fn sweep_tables(art: &mut Artifacts, results: &[SweepResult]) -> io::Result<()> {
    let mut rows = Vec::new();
    for r in results {
        for (radius, len) in &r.profile.points {
            rows.push(vec![r.target.to_string(), r.profile.metric.to_string(), f(r.angle), f(*radius), f(*len)]);
        }
    }
    art.csv("sweep.csv", &["target", "metric", "angle", "r", "length"], rows)?;
    let rows = results.iter().map(|r| {
        let inc: Vec<String> = r.profile.increments().iter().map(|d| f(*d)).collect();
        vec![r.target.to_string(), r.profile.metric.to_string(), r.evidence.to_string(), inc.join(";")]
    });
    art.csv("sweep_summary.csv", &["target", "metric", "evidence", "increments"], rows)
}

fn sweep_svg(results: &[SweepResult]) -> Svg {
    let mut svg = Svg::new();
    let lmax = results
        .iter()
        .flat_map(|r| r.profile.points.iter().map(|p| p.1))
        .fold(f64::MIN_POSITIVE, f64::max);
    for r in results {
        let n = r.profile.points.len().max(2) - 1;
        let pts: Vec<(f64, f64)> = r.profile.points.iter().enumerate().map(|(i, p)| (i as f64 / n as f64, p.1 / lmax)).collect();
        let colour = match r.profile.metric {
            MetricTag::Disc => "firebrick",
            _ => "steelblue",
        };
        svg.plot_line(&pts, colour);
    }
    svg
}

type Rows = Vec<Vec<String>>;

/// Radial segments near the base vertices, resampled until they stay in
/// one hororegion component. Returns rows, the worst `lhs − rhs` and the
/// number of accepted paths.
fn log_variation_paths(cfg: &ExperimentConfig, data: &HolomorphicData, tess: &Tessellation) -> Result<(Rows, f64, usize), RunError> {
    // The three base vertices lie over the three punctures.
    let vertices: Vec<usize> = (0..tess.vertices.len().min(3)).collect();
    let wanted = cfg.sweep.log_variation_paths;
    let draws = uniform_samples(3 * wanted * LOGVAR_ATTEMPTS, 0.0, 1.0, cfg.grid.seed ^ 0x6c6f67);
    let mut rows = Vec::new();
    let mut worst = f64::INFINITY;
    let mut attempt = 0usize;
    let mut accepted = 0usize;
    while accepted < wanted && attempt < wanted * LOGVAR_ATTEMPTS {
        let (a, bb, c) = (draws[3 * attempt], draws[3 * attempt + 1], draws[3 * attempt + 2]);
        attempt += 1;
        let vi = vertices[accepted % vertices.len()];
        let v = tess.vertices[vi];
        let r0 = 0.6 + 0.3 * a;
        let r1 = r0 + (1.0 - r0) * (0.5 + 0.4 * bb);
        let angle = v.z.arg() + (c - 0.5) * (1.0 - r1);
        let path = ParamPath::segment(Complex::from_polar(r0, angle), Complex::from_polar(r1, angle));
        let region = Hororegion {
            tess,
            puncture: puncture_of(v.label),
            r: cfg.ball_radius,
            doubled: false,
        };
        let lv = match log_variation_check(&path, data, &region) {
            Ok(lv) => lv,
            Err(Error::Region(_)) => continue,
            Err(e) => {
                diag(&[("command", &"sweep"), ("path", &path.label()), ("status", &"rejected"), ("error", &e)]);
                continue;
            }
        };
        let margin = lv.lhs - lv.rhs;
        worst = worst.min(margin);
        rows.push(vec![
            path.label().to_string(),
            vi.to_string(),
            region.puncture.to_string(),
            f(lv.lhs),
            f(lv.rhs),
            f(margin),
            lv.holds(cfg.budgets.log_variation_slack).to_string(),
        ]);
        accepted += 1;
    }
    Ok((rows, if accepted == 0 { f64::NEG_INFINITY } else { worst }, accepted))
}

/// Projected horizontal segments plus an unprojected fibre circle. Returns
/// rows, the largest `|g₃ − g_s|` over horizontal paths and the control gap
/// (absent for constant data, where the gap vanishes identically).
fn horizontal_paths(cfg: &ExperimentConfig, data: &HolomorphicData) -> Result<(Rows, f64, Option<f64>), RunError> {
    let n = cfg.sweep.horizontal_paths;
    let ends = disc_samples(2 * n, HORIZONTAL_RADIUS, cfg.grid.seed ^ 0x686f72);
    let angles = uniform_samples(2 * n, 0.0, TAU, cfg.grid.seed ^ 0x746865);
    let jobs: Vec<ParamPath> = (0..n)
        .map(|k| {
            let (a, b) = (ends[2 * k], ends[2 * k + 1]);
            let (ta, tb) = (angles[2 * k], angles[2 * k + 1]);
            ParamPath::new(format!("horizontal({k})"), move |s| {
                Ok(PathPoint {
                    z: a + (b - a) * s,
                    theta: ta + (tb - ta) * s,
                })
            })
        })
        .collect();
    let lengths: Vec<_> = jobs.par_iter().map(|p| horizontal_length(p, data, true)).collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut max_gap: f64 = 0.0;
    for (p, l) in jobs.iter().zip(&lengths) {
        let gap = (l.g3_length - l.short_length).abs();
        max_gap = max_gap.max(gap);
        rows.push(horizontal_row(p, "horizontal", l));
    }
    let control = if data.is_constant() {
        None
    } else {
        let p = ParamPath::theta_circle(CONTROL_POINT);
        let l = horizontal_length(&p, data, false)?;
        rows.push(horizontal_row(&p, "control", &l));
        Some(l.g3_length - l.short_length)
    };
    Ok((rows, max_gap, control))
}

fn horizontal_row(p: &ParamPath, kind: &str, l: &paths::HorizontalLengths) -> Vec<String> {
    vec![
        p.label().to_string(),
        kind.to_string(),
        f(l.g3_length),
        f(l.short_length),
        f(l.g3_length - l.short_length),
        f(l.max_beta),
        f(l.max_beta_raw),
        l.rerouted.to_string(),
    ]
}

// ---------------------------------------------------------------------------

fn fingerprint(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let cmd = Command::Fingerprint;
    let fp = &cfg.fingerprint;
    let samples = disc_samples(fp.samples, fp.radius, cfg.grid.seed);
    let prints: Vec<Vec<f64>> = fp
        .mus
        .iter()
        .map(|mu| {
            let psi = cfg.data.psi_with(mu)?;
            radial_graph_fingerprint(psi.as_ref(), &samples)
        })
        .collect::<Result<_, _>>()?;

    let mut header: Vec<String> = vec!["index".into(), "re".into(), "im".into()];
    header.extend(fp.mus.iter().map(|m| m.to_string()));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = samples.iter().enumerate().map(|(i, z)| {
        let mut row = vec![i.to_string(), f(z.re), f(z.im)];
        row.extend(prints.iter().map(|p| f(p[i])));
        row
    });
    art.csv("fingerprints.csv", &header_refs, rows)?;

    let mut rows = Vec::new();
    let mut min_dist = f64::INFINITY;
    for i in 0..prints.len() {
        for j in i + 1..prints.len() {
            let d = fingerprint_distance(&prints[i], &prints[j])?;
            min_dist = min_dist.min(d);
            rows.push(vec![fp.mus[i].to_string(), fp.mus[j].to_string(), f(d)]);
        }
    }
    art.csv("distances.csv", &["mu_a", "mu_b", "distance"], rows)?;
    let mut out = Outcome::default();
    out.value("families", prints.len() as f64);
    out.check(cmd, "fingerprint_separation", prints.len() >= 2 && min_dist > fp.separation, min_dist, fp.separation);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_target_the_invoked_command() {
        let o = Overrides {
            depth: Some(2),
            grid: Some(7),
            seed: Some(5),
        };
        let mut cfg = ExperimentConfig::default();
        o.apply(&mut cfg, Command::CurvatureScan).unwrap();
        assert_eq!((cfg.depth, cfg.curvature.resolution, cfg.grid.resolution, cfg.grid.seed), (2, 7, 24, 5));
        let mut cfg = ExperimentConfig::default();
        o.apply(&mut cfg, Command::Hororegions).unwrap();
        assert_eq!(cfg.grid.resolution, 7);
        let bad = Overrides {
            grid: Some(1),
            ..Overrides::default()
        };
        assert!(bad.apply(&mut ExperimentConfig::default(), Command::Build).is_err());
    }

    #[test]
    fn tessellate_depth_two() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            depth: 2,
            ..ExperimentConfig::default()
        };
        let out = execute(Command::Tessellate, &cfg, dir.path()).unwrap();
        assert_eq!(out.exit_code(), 0);
        assert_eq!(out.residuals["triangle_count"], 10.0);
        let csv = std::fs::read_to_string(dir.path().join("triangles.csv")).unwrap();
        assert_eq!(csv.lines().count(), 11);
    }

    #[test]
    fn diagnostics_quote_spaces() {
        // Smoke test for the formatting path; output goes to stderr.
        diag(&[("k", &"a b"), ("n", &1.5)]);
    }
}
