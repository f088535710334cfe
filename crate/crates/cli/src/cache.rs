//! Report cache: one JSON file keyed by canonical spec and engine version.
//!
//! Writers take a lock file created with `create_new` and give up after a
//! short wait; the file itself is replaced by rename, so readers never see a
//! partial write.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::thread::sleep;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use dedekind_core::invariants::InvariantReport;
use dedekind_core::ENGINE_VERSION;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub spec: String,
    pub engine_version: String,
    pub timestamp: u64,
    pub report: InvariantReport,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CacheFile {
    entries: BTreeMap<String, CacheEntry>,
}

pub struct Cache {
    path: PathBuf,
}

fn key(spec: &str) -> String {
    format!("{spec}@{ENGINE_VERSION}")
}

struct Lock(PathBuf);

impl Lock {
    fn acquire(path: &Path) -> Result<Self, CliError> {
        let lock = path.with_extension("lock");
        for _ in 0..100 {
            match OpenOptions::new().write(true).create_new(true).open(&lock) {
                Ok(_) => return Ok(Lock(lock)),
                Err(e) if e.kind() == ErrorKind::AlreadyExists => sleep(Duration::from_millis(20)),
                Err(e) => return Err(e.into()),
            }
        }
        Err(CliError::Cache(format!(
            "{} is held by another process",
            lock.display()
        )))
    }
}

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl Cache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Cache { path: path.into() }
    }

    fn read(&self) -> Result<CacheFile, CliError> {
        match fs::read_to_string(&self.path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| CliError::Cache(format!("{}: {e}", self.path.display()))),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(CacheFile::default()),
            Err(e) => Err(e.into()),
        }
    }

    /// A cached report for `spec` from this engine version.
    pub fn lookup(&self, spec: &str) -> Result<Option<InvariantReport>, CliError> {
        let file = self.read()?;
        Ok(file
            .entries
            .get(&key(spec))
            .filter(|e| e.engine_version == ENGINE_VERSION)
            .map(|e| e.report.clone()))
    }

    pub fn store(&self, report: &InvariantReport) -> Result<(), CliError> {
        let _lock = Lock::acquire(&self.path)?;
        let mut file = self.read()?;
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        file.entries.insert(
            key(&report.spec),
            CacheEntry {
                spec: report.spec.clone(),
                engine_version: ENGINE_VERSION.to_string(),
                timestamp,
                report: report.clone(),
            },
        );
        let tmp = self.path.with_extension("tmp");
        fs::write(
            &tmp,
            serde_json::to_string_pretty(&file).expect("cache serializes"),
        )?;
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}
