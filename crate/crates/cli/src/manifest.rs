//! Artifact writing and the run manifest.
//!
//! Every file a command emits goes through [`Artifacts`], which records its
//! SHA-256 and, for CSVs, the column order. The manifest carries no
//! timestamps, so identical configs give identical manifests.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub sha256: String,
    pub bytes: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    CheckFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandRecord {
    pub status: Status,
    pub exit_code: i32,
    pub residuals: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed_checks: Vec<String>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub versions: BTreeMap<String, String>,
    pub commands: BTreeMap<String, CommandRecord>,
    pub files: BTreeMap<String, FileRecord>,
}

impl RunManifest {
    /// The manifest in `dir` if it was produced from the same config,
    /// otherwise a fresh one.
    pub fn open(dir: &Path, config_hash: &str) -> Self {
        let existing = fs::read_to_string(dir.join(MANIFEST_NAME))
            .ok()
            .and_then(|s| serde_json::from_str::<RunManifest>(&s).ok())
            .filter(|m| m.config_hash == config_hash);
        let mut m = existing.unwrap_or_else(|| RunManifest {
            config_hash: config_hash.to_string(),
            ..Default::default()
        });
        m.versions.insert("gh-ansatz".into(), gh_ansatz::VERSION.into());
        m.versions.insert("ghlab".into(), env!("CARGO_PKG_VERSION").into());
        m
    }

    pub fn record(&mut self, command: &str, record: CommandRecord, files: Vec<(String, FileRecord)>) {
        for (name, f) in files {
            self.files.insert(name, f);
        }
        self.commands.insert(command.to_string(), record);
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(dir.join(MANIFEST_NAME), text + "\n")
    }
}

/// Writer for one command's outputs.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<(String, FileRecord)>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn put(&mut self, name: &str, bytes: Vec<u8>, columns: Vec<String>) -> io::Result<()> {
        fs::write(self.dir.join(name), &bytes)?;
        self.written.retain(|(n, _)| n != name);
        self.written.push((
            name.to_string(),
            FileRecord {
                sha256: sha256_hex(&bytes),
                bytes: bytes.len(),
                columns,
            },
        ));
        Ok(())
    }

    /// A CSV with a header row.
    pub fn csv<R, I>(&mut self, name: &str, header: &[&str], rows: R) -> io::Result<()>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        self.put(name, bytes, header.iter().map(|s| s.to_string()).collect())
    }

    pub fn text(&mut self, name: &str, content: &str) -> io::Result<()> {
        self.put(name, content.as_bytes().to_vec(), Vec::new())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        self.put(name, (text + "\n").into_bytes(), Vec::new())
    }

    pub fn finish(self) -> Vec<(String, FileRecord)> {
        self.written
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_value() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn csv_records_columns_and_checksums() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::new(dir.path()).unwrap();
        a.csv("t.csv", &["a", "b"], vec![vec!["1".to_string(), "x,y".to_string()]]).unwrap();
        let files = a.finish();
        let bytes = fs::read(dir.path().join("t.csv")).unwrap();
        assert_eq!(String::from_utf8(bytes.clone()).unwrap(), "a,b\n1,\"x,y\"\n");
        assert_eq!(files[0].1.sha256, sha256_hex(&bytes));
        assert_eq!(files[0].1.columns, vec!["a", "b"]);
    }

    #[test]
    fn manifest_resets_on_new_config() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::open(dir.path(), "h1");
        m.record(
            "tessellate",
            CommandRecord {
                status: Status::Ok,
                exit_code: 0,
                residuals: BTreeMap::new(),
                failed_checks: vec![],
                files: vec![],
            },
            vec![],
        );
        m.write(dir.path()).unwrap();
        assert!(RunManifest::open(dir.path(), "h1").commands.contains_key("tessellate"));
        assert!(RunManifest::open(dir.path(), "h2").commands.is_empty());
    }
}
