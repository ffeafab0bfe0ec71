use std::fs;
use std::process::Command as Process;

use ghlab_cli::config::PsiSpec;
use ghlab_cli::manifest::{sha256_hex, RunManifest, MANIFEST_NAME};
use ghlab_cli::{execute, Command, ExperimentConfig};

fn ghlab(args: &[&str]) -> (i32, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_ghlab")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.data.psi = PsiSpec::Blaschke {
        power: 1,
        zeros: vec![gh_ansatz::complex::BlaschkeZero::simple(gh_ansatz::Complex::new(0.5, 0.1))],
    };
    cfg.data.mu = Some(gh_ansatz::complex::MuSpec::Perturb { eps: 0.1 });
    cfg.grid.seed = 7;
    let path = dir.path().join("cfg.json");
    fs::write(&path, cfg.to_json()).unwrap();
    let back = ExperimentConfig::load(&path).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.to_json(), cfg.to_json());
}

#[test]
fn manifest_lists_every_file_with_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        depth: 2,
        ..ExperimentConfig::default()
    };
    execute(Command::Tessellate, &cfg, dir.path()).unwrap();
    execute(Command::Fingerprint, &cfg, dir.path()).unwrap();
    let m: RunManifest = serde_json::from_str(&fs::read_to_string(dir.path().join(MANIFEST_NAME)).unwrap()).unwrap();
    assert_eq!(m.config_hash, sha256_hex(cfg.to_json().as_bytes()));
    assert_eq!(m.commands.len(), 2);
    for entry in fs::read_dir(dir.path()).unwrap() {
        let name = entry.unwrap().file_name().to_string_lossy().into_owned();
        if name == MANIFEST_NAME {
            continue;
        }
        let rec = &m.files[&name];
        assert_eq!(rec.sha256, sha256_hex(&fs::read(dir.path().join(&name)).unwrap()));
        if name.ends_with(".csv") {
            assert!(!rec.columns.is_empty());
        }
    }
}

#[test]
fn library_reruns_are_byte_identical() {
    let cfg = ExperimentConfig {
        depth: 2,
        ..ExperimentConfig::default()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        execute(Command::Hororegions, &cfg, d.path()).unwrap();
        execute(Command::Build, &cfg, d.path()).unwrap();
    }
    for name in ["hororegions.csv", "samples.csv", "slice.csv", MANIFEST_NAME] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let (code, err) = ghlab(&["tessellate", "--depth", "2", "--out", out]);
    assert_eq!(code, 0, "{err}");
    assert!(err.lines().all(|l| l.split(' ').all(|kv| kv.contains('='))), "{err}");
    assert_eq!(fs::read_to_string(dir.path().join("out/triangles.csv")).unwrap().lines().count(), 11);

    let (code, err) = ghlab(&["tessellate", "--depth", "99", "--out", out]);
    assert_eq!(code, 2, "{err}");
    let missing = dir.path().join("nope.json");
    assert_eq!(ghlab(&["verify", "--config", missing.to_str().unwrap(), "--out", out]).0, 2);
    assert_eq!(ghlab(&["no-such-command"]).0, 2);
}

#[test]
fn grid_override_changes_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(ghlab(&["hororegions", "--grid", "5", "--depth", "1", "--out", out]).0, 0);
    let rows = fs::read_to_string(dir.path().join("hororegions.csv")).unwrap().lines().count() - 1;
    // Of the 5×5 grid on [−1, 1]² only the inner 3×3 block has |z| ≤ 0.995.
    assert_eq!(rows, 9);
}
