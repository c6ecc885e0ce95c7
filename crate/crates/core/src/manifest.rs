//! Run manifests: what produced an output directory and digests of every
//! file in it.

use std::fs;
use std::io;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> io::Result<String> {
    let mut hasher = Sha256::new();
    let mut file = fs::File::open(path)?;
    io::copy(&mut file, &mut hasher)?;
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub scenario_sha256: Option<String>,
    pub seed: Option<u64>,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub files: Vec<FileEntry>,
}

/// Wall-clock milliseconds since the Unix epoch.
pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

impl RunManifest {
    pub fn new(command: &str, scenario_sha256: Option<String>, seed: Option<u64>, started_unix_ms: u64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            scenario_sha256,
            seed,
            started_unix_ms,
            finished_unix_ms: started_unix_ms,
            files: Vec::new(),
        }
    }

    /// Inventories every regular file under `dir` except the manifest
    /// itself, in sorted path order.
    pub fn inventory(&mut self, dir: &Path) -> io::Result<()> {
        let mut files = Vec::new();
        collect(dir, dir, &mut files)?;
        files.sort_by(|a, b| a.path.cmp(&b.path));
        self.files = files;
        Ok(())
    }

    /// True when every listed file exists with the recorded digest.
    pub fn verify(&self, dir: &Path) -> io::Result<bool> {
        for f in &self.files {
            let p = dir.join(&f.path);
            if !p.is_file() || file_sha256(&p)? != f.sha256 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same as `self` with timestamps zeroed, for comparing runs.
    pub fn without_timestamps(&self) -> Self {
        Self { started_unix_ms: 0, finished_unix_ms: 0, ..self.clone() }
    }

    /// Inventories `dir` and writes the manifest through a temporary file
    /// and a rename, so readers never see a partial manifest.
    pub fn finalize(mut self, dir: &Path) -> io::Result<Self> {
        self.inventory(dir)?;
        self.finished_unix_ms = unix_now().max(self.started_unix_ms);
        let text = serde_json::to_string_pretty(&self).map_err(io::Error::other)?;
        let tmp = dir.join(format!(".{MANIFEST_FILE}.tmp"));
        fs::write(&tmp, text + "\n")?;
        fs::rename(&tmp, dir.join(MANIFEST_FILE))?;
        Ok(self)
    }

    pub fn load(dir: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        serde_json::from_str(&text).map_err(io::Error::other)
    }
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<FileEntry>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        let ty = entry.file_type()?;
        if ty.is_dir() {
            collect(root, &path, out)?;
        } else if ty.is_file() {
            let rel = path.strip_prefix(root).expect("walk stays under root");
            let name = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            if name == MANIFEST_FILE || name.starts_with(&format!(".{MANIFEST_FILE}")) {
                continue;
            }
            out.push(FileEntry { path: name, bytes: entry.metadata()?.len(), sha256: file_sha256(&path)? });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_input() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn inventory_verify_and_atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("sub")).unwrap();
        fs::write(dir.path().join("b.csv"), "x\n").unwrap();
        fs::write(dir.path().join("sub/a.txt"), "hello").unwrap();
        let m = RunManifest::new("test", Some(sha256_hex(b"s")), Some(3), unix_now()).finalize(dir.path()).unwrap();
        let names: Vec<&str> = m.files.iter().map(|f| f.path.as_str()).collect();
        assert_eq!(names, ["b.csv", "sub/a.txt"]);
        assert!(m.verify(dir.path()).unwrap());
        let loaded = RunManifest::load(dir.path()).unwrap();
        assert_eq!(loaded, m);
        assert!(!dir.path().join(".manifest.json.tmp").exists());

        // rewriting keeps the manifest out of its own inventory
        let again = RunManifest::new("test", m.scenario_sha256.clone(), Some(3), unix_now()).finalize(dir.path()).unwrap();
        assert_eq!(again.without_timestamps(), m.without_timestamps());

        fs::write(dir.path().join("b.csv"), "y\n").unwrap();
        assert!(!m.verify(dir.path()).unwrap());
    }
}
