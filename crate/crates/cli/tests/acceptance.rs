//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Criteria 1 to 8 drive the library, criterion 9 the binary.

use std::fs;
use std::path::Path;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use gh_ansatz::ansatz::{FourPoint, HolomorphicData};
use gh_ansatz::fd::FDConfig;
use gh_ansatz::verify::{self, beta_analysis, run_suite, SuiteReport};
use gh_ansatz::Complex;
use ghlab_cli::config::PsiSpec;
use ghlab_cli::{execute, Command, ExperimentConfig, Outcome};

struct Line {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn report(lines: &[Line]) -> bool {
    for l in lines {
        println!(
            "{} criterion {} {}: {} ({:.1}s)",
            if l.passed { "PASS" } else { "FAIL" },
            l.id,
            l.name,
            l.detail,
            l.elapsed.as_secs_f64()
        );
    }
    lines.iter().all(|l| l.passed)
}

fn flat_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.data.psi = PsiSpec::Flat { im_phi: 0.5 };
    cfg
}

fn run(cmd: Command, cfg: &ExperimentConfig, dir: &Path) -> Outcome {
    execute(cmd, cfg, dir).unwrap_or_else(|e| {
        let mut o = Outcome::default();
        o.failed.push(format!("error: {e}"));
        o
    })
}

fn check(report: &SuiteReport, name: &str, bound: f64) -> (bool, String) {
    match report.get(name) {
        Some(c) => (c.passed && c.residual < bound, format!("{name}={:.2e}", c.residual)),
        None => (false, format!("{name}=missing")),
    }
}

fn all(checks: &[(bool, String)]) -> (bool, String) {
    (checks.iter().all(|c| c.0), checks.iter().map(|c| c.1.as_str()).collect::<Vec<_>>().join(" "))
}

fn criterion1(dir: &Path) -> Line {
    let t = Instant::now();
    let cfg = flat_config();
    let o = run(Command::CurvatureScan, &cfg, dir);
    let r = |k: &str| o.residuals.get(k).copied().unwrap_or(f64::NAN);
    let grid = cfg.curvature.resolution.pow(2) * cfg.curvature.t_values.len() * cfg.curvature.theta_values.len();
    let elapsed = t.elapsed();
    Line {
        id: 1,
        name: "flat reference",
        passed: o.failed.is_empty() && grid == 75 && r("max_riemann") < 1e-3 && r("max_noise_floor") < 1e-4 && elapsed.as_secs() < 120,
        detail: format!("points={grid} max_riemann={:.2e} noise={:.2e}", r("max_riemann"), r("max_noise_floor")),
        elapsed,
    }
}

fn criterion3(data: &HolomorphicData) -> Line {
    let t = Instant::now();
    let metric = verify::data_metric(data);
    let probe = FourPoint::new(Complex::new(0.3, 0.2), 0.1, 0.0).coords();
    let rep = verify::curvature(&metric, &probe, &FDConfig::with_h(1e-3));
    let flat = HolomorphicData::flat_reference(0.5).expect("flat data");
    let flat_metric = verify::data_metric(&flat);
    let ratio = verify::flat_convergence_ratio(&flat_metric, &[0.1, 0.05, 0.0, 0.0], &FDConfig::with_h(0.02));
    let (passed, detail) = match (rep, ratio) {
        (Ok(r), Ok(q)) => (
            r.ricci_norm < 10.0 * r.noise_floor && r.max_riemann > 100.0 * r.noise_floor && q >= 4.0,
            format!(
                "ricci={:.2e} riemann={:.3} noise={:.2e} flat_ratio={q:.2}",
                r.ricci_norm, r.max_riemann, r.noise_floor
            ),
        ),
        (a, b) => (false, format!("evaluation failed: {:?} {:?}", a.err(), b.err())),
    };
    Line {
        id: 3,
        name: "ricci-flat and non-flat",
        passed,
        detail,
        elapsed: t.elapsed(),
    }
}

fn main() {
    let root = tempfile::tempdir().expect("tempdir");
    let mut lines = Vec::new();

    lines.push(criterion1(&root.path().join("c1")));

    // Criteria 2, 4 and 5 share one suite run on 100 interior points.
    let t = Instant::now();
    let cfg = ExperimentConfig::default();
    let data = cfg.data.build().expect("default data");
    let mut suite = cfg.suite();
    suite.points = 100;
    let rep = run_suite(&data, &suite);
    let suite_time = t.elapsed();
    let samples_ok = ["quaternion", "closedness", "curl", "cauchy_riemann_phi"]
        .iter()
        .all(|n| rep.get(n).is_some_and(|c| c.samples >= 50));
    let (ok, detail) = all(&[
        check(&rep, "quaternion", 1e-8),
        check(&rep, "closedness", 1e-4),
        check(&rep, "curl", 1e-4),
        check(&rep, "cauchy_riemann_phi", 1e-8),
    ]);
    let zeros = match &cfg.data.psi {
        PsiSpec::VertexTargeted { vertices, levels, .. } => vertices.len() * *levels as usize,
        _ => 0,
    };
    lines.push(Line {
        id: 2,
        name: "hyperkahler identities",
        passed: ok && samples_ok && zeros >= 6 && suite_time.as_secs() < 300,
        detail: format!("zeros={zeros} points={} {detail}", suite.points),
        elapsed: suite_time,
    });

    lines.push(criterion3(&data));

    let (ok, detail) = all(&[check(&rep, "slice_identities", 1e-8), check(&rep, "structure_lambda0", 1e-4)]);
    let slice_samples = rep.get("slice_identities").map_or(0, |c| c.samples);
    lines.push(Line {
        id: 4,
        name: "slice identities",
        passed: ok && slice_samples >= 100,
        detail: format!("samples={slice_samples} {detail}"),
        elapsed: suite_time,
    });

    let t = Instant::now();
    let (ok, detail) = all(&[
        check(&rep, "structure_equations", 1e-4),
        check(&rep, "beta_linear_system", 1e-6),
        check(&rep, "psi_beta_identity", 1e-6),
        check(&rep, "contact_sign", 1e-4),
    ]);
    let (locus_ok, locus) = match beta_analysis(&data, suite.beta_grid, suite.contact_samples, suite.seed, &suite.fd) {
        Ok(a) => (
            a.max_ratio < 0.0 && (a.roots.len() < 2 || a.min_separation > 1e-3),
            format!("beta_zeros={} max_ratio={:.3e}", a.roots.len(), a.max_ratio),
        ),
        Err(e) => (false, format!("beta analysis failed: {e}")),
    };
    lines.push(Line {
        id: 5,
        name: "contact suite",
        passed: ok && locus_ok,
        detail: format!("{detail} {locus}"),
        elapsed: t.elapsed(),
    });

    let t = Instant::now();
    let sweep = run(Command::Sweep, &cfg, &root.path().join("sweep"));
    let sweep_time = t.elapsed();
    let failed = |names: &[&str]| names.iter().filter(|n| sweep.failed.iter().any(|f| f == *n)).count();
    let missing = |names: &[&str]| names.iter().filter(|n| !sweep.residuals.contains_key(**n)).count();
    let c6 = ["sweep_evidence", "log_variation", "region_constants_positive", "region_c2_exact"];
    let paths = sweep.residuals.get("log_variation_paths").copied().unwrap_or(0.0);
    lines.push(Line {
        id: 6,
        name: "completeness mechanism",
        passed: failed(&c6) == 0 && missing(&c6) == 0 && paths >= 10.0 && sweep.failed.iter().all(|f| !f.starts_with("error")),
        detail: format!(
            "log_variation_paths={paths} c1={:.4} c2={:.6}",
            sweep.residuals.get("c1").copied().unwrap_or(f64::NAN),
            sweep.residuals.get("c2").copied().unwrap_or(f64::NAN)
        ),
        elapsed: sweep_time,
    });
    let c7 = ["horizontal_agreement", "control_gap"];
    lines.push(Line {
        id: 7,
        name: "carnot-caratheodory",
        passed: failed(&c7) == 0 && missing(&c7) == 0,
        detail: format!(
            "horizontal_gap={:.2e} control_gap={:.2e}",
            sweep.residuals.get("horizontal_agreement").copied().unwrap_or(f64::NAN),
            sweep.residuals.get("control_gap").copied().unwrap_or(f64::NAN)
        ),
        elapsed: sweep_time,
    });

    let t = Instant::now();
    let fp = run(Command::Fingerprint, &cfg, &root.path().join("fp"));
    let families = fp.residuals.get("families").copied().unwrap_or(0.0);
    let min_d = fp.residuals.get("fingerprint_separation").copied().unwrap_or(0.0);
    lines.push(Line {
        id: 8,
        name: "post-composition family",
        passed: fp.failed.is_empty() && families >= 3.0 && min_d > 1e-4 && cfg.fingerprint.samples == 100,
        detail: format!("families={families} min_distance={min_d:.3e}"),
        elapsed: t.elapsed(),
    });

    lines.push(criterion9(root.path()));

    if !report(&lines) {
        std::process::exit(1);
    }
}

fn ghlab(args: &[&str]) -> (i32, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_ghlab")).args(args).output().expect("run ghlab");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

fn criterion9(root: &Path) -> Line {
    let t = Instant::now();
    let mut notes = Vec::new();
    let commands = ["tessellate", "hororegions", "build", "verify", "curvature-scan", "sweep", "fingerprint"];
    let dirs = [root.join("run_a"), root.join("run_b")];
    let mut codes_ok = true;
    for d in &dirs {
        for c in commands {
            codes_ok &= ghlab(&[c, "--out", d.to_str().unwrap()]).0 == 0;
        }
    }
    let (a, b) = (csvs(&dirs[0]), csvs(&dirs[1]));
    let identical = !a.is_empty() && a == b;
    notes.push(format!("csv_files={} identical={identical}", a.len()));

    let bad = root.join("corrupted.json");
    fs::write(&bad, r#"{"data": {"v_scale": 1.01}}"#).unwrap();
    let (code, err) = ghlab(&["verify", "--config", bad.to_str().unwrap(), "--out", root.join("bad").to_str().unwrap()]);
    let named = err.lines().any(|l| l.contains("check=curl ") && l.contains("status=fail"));
    notes.push(format!("corrupted_exit={code} curl_named={named}"));

    let flat = root.join("flat.json");
    fs::write(&flat, r#"{"data": {"psi": {"kind": "flat", "im_phi": 0.5}}}"#).unwrap();
    let (flat_code, _) = ghlab(&["verify", "--config", flat.to_str().unwrap(), "--out", root.join("flat").to_str().unwrap()]);
    notes.push(format!("flat_exit={flat_code}"));

    let tdir = root.join("tess");
    let (tcode, _) = ghlab(&["tessellate", "--depth", "2", "--out", tdir.to_str().unwrap()]);
    let triangles = fs::read_to_string(tdir.join("triangles.csv")).map_or(0, |s| s.lines().count().saturating_sub(1));
    let svg = tdir.join("tessellation.svg").exists();
    notes.push(format!("depth2_triangles={triangles}"));

    Line {
        id: 9,
        name: "infrastructure",
        passed: codes_ok && identical && code == 1 && named && flat_code == 0 && tcode == 0 && triangles == 10 && svg,
        detail: notes.join(" "),
        elapsed: t.elapsed(),
    }
}
