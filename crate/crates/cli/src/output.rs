//! Deterministic file emission: sorted-key JSON, LF-terminated CSV, atomic writes and
//! a manifest with SHA-256 digests of everything written.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        format!("{v}")
    }
}

/// Pretty JSON with object keys in lexicographic order and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    // `serde_json::Map` is a `BTreeMap` without the `preserve_order` feature, so keys come out sorted.
    let v: Value = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn hex_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn floats(&mut self, values: &[f64]) {
        self.row(&values.iter().map(|&v| float(v)).collect::<Vec<_>>());
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Files emitted by one command, relative to the output directory.
pub struct Emitter {
    dir: PathBuf,
    pub files: BTreeMap<String, String>,
}

impl Emitter {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Emitter { dir: dir.to_path_buf(), files: BTreeMap::new() })
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        write_atomic(&self.dir.join(name), text.as_bytes())?;
        self.files.insert(name.to_string(), hex_digest(text.as_bytes()));
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.text(name, &to_json(value)?)
    }

    pub fn csv(&mut self, name: &str, csv: Csv) -> Result<(), CliError> {
        self.text(name, &csv.into_string())
    }
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct CommandRecord {
    pub status: String,
    pub exit_code: i32,
    pub error: Option<String>,
    pub wall_seconds: f64,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct FileRecord {
    pub sha256: String,
    pub bytes: u64,
}

/// Inventory of a run directory, merged across commands.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: Value,
    pub commands: BTreeMap<String, CommandRecord>,
    pub files: BTreeMap<String, FileRecord>,
}

impl RunManifest {
    /// Loads the manifest in `dir`, or starts an empty one when there is none or it does not parse.
    pub fn load_or_new(dir: &Path, config: Value) -> Self {
        let existing = fs::read_to_string(dir.join(MANIFEST)).ok().and_then(|s| serde_json::from_str::<RunManifest>(&s).ok());
        let mut m = existing.unwrap_or_else(|| RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: Value::Null,
            commands: BTreeMap::new(),
            files: BTreeMap::new(),
        });
        m.version = env!("CARGO_PKG_VERSION").to_string();
        m.config = config;
        m
    }

    /// Records a command and re-hashes every listed file, dropping ones that no longer exist.
    pub fn record(&mut self, dir: &Path, command: &str, rec: CommandRecord) -> Result<(), CliError> {
        self.commands.insert(command.to_string(), rec);
        let names: Vec<String> = self.commands.values().flat_map(|c| c.files.iter().cloned()).collect();
        self.files.clear();
        for name in names {
            let path = dir.join(&name);
            if let Ok(bytes) = fs::read(&path) {
                self.files.insert(name, FileRecord { sha256: hex_digest(&bytes), bytes: bytes.len() as u64 });
            }
        }
        write_atomic(&dir.join(MANIFEST), to_json(self)?.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, -0.0] {
            assert_eq!(float(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(float(2.0), "2.0");
    }

    #[test]
    fn json_keys_are_sorted() {
        let mut m = BTreeMap::new();
        m.insert("zeta", 1);
        m.insert("alpha", 2);
        let s = to_json(&serde_json::json!({"b": 1, "a": {"d": 2, "c": 3}})).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"c\"").unwrap() < s.find("\"d\"").unwrap());
        assert!(to_json(&m).unwrap().ends_with("}\n"));
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(hex_digest(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
