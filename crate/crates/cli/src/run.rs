//! Output directory handling and the per-run manifest.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use fspec_miner::artifact;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const THREADS_ENV: &str = "FSPEC_MINER_THREADS";

#[derive(Debug)]
pub enum Failure {
    /// Exit 1: the input was analysed and found wanting.
    Validation,
    /// Exit 2: bad arguments or unusable input.
    Usage(String),
}

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Sizes the global pool from `FSPEC_MINER_THREADS`; 0 or unset lets rayon decide.
pub fn configure_threads() -> Result<usize, Failure> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| usage(format!("{THREADS_ENV} must be a number, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(rayon::current_num_threads())
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    threads: usize,
    inputs: &'a [FileDigest],
    outputs: &'a [FileDigest],
    created_at: String,
}

pub struct Run {
    out: PathBuf,
    threads: usize,
    pub seed: u64,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn files_under(p: &Path, acc: &mut Vec<PathBuf>) -> std::io::Result<()> {
    if p.is_dir() {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(p)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
        entries.sort();
        for e in entries {
            files_under(&e, acc)?;
        }
    } else {
        acc.push(p.to_path_buf());
    }
    Ok(())
}

impl Run {
    pub fn new(out: &Path, threads: usize) -> Result<Run, Failure> {
        Ok(Run { out: out.to_path_buf(), threads, seed: 0, inputs: Vec::new(), outputs: Vec::new() })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    /// Records the digest of a file, or of every file below a directory.
    pub fn input(&mut self, p: &Path) -> Result<(), Failure> {
        let mut files = Vec::new();
        files_under(p, &mut files).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        for f in files {
            let bytes = std::fs::read(&f).map_err(|e| usage(format!("{}: {e}", f.display())))?;
            if !self.inputs.iter().any(|d| Path::new(&d.path) == f) {
                self.inputs.push(FileDigest { path: f.display().to_string(), sha256: sha256(&bytes) });
            }
        }
        Ok(())
    }

    pub fn read(&mut self, p: &Path) -> Result<String, Failure> {
        let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        self.input(p)?;
        Ok(text)
    }

    pub fn write(&mut self, name: &str, content: &str) -> Result<PathBuf, Failure> {
        std::fs::create_dir_all(&self.out).map_err(|e| usage(format!("{}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        std::fs::write(&path, content).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        self.outputs.push(FileDigest { path: name.to_string(), sha256: sha256(content.as_bytes()) });
        Ok(path)
    }

    pub fn write_artifact<T: Serialize>(&mut self, name: &str, kind: &str, body: &T) -> Result<PathBuf, Failure> {
        self.write(name, &artifact::to_json(kind, body))
    }

    /// Writes `<command>.manifest.json`, the only file that carries a timestamp.
    pub fn finish(&mut self, command: &str) -> Result<(), Failure> {
        let m = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: self.seed,
            threads: self.threads,
            inputs: &self.inputs,
            outputs: &self.outputs,
            created_at: chrono::Utc::now().to_rfc3339(),
        };
        let text = artifact::to_json("run_manifest", &m);
        let path = self.out.join(format!("{command}.manifest.json"));
        std::fs::create_dir_all(&self.out).map_err(|e| usage(format!("{}: {e}", self.out.display())))?;
        std::fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}
