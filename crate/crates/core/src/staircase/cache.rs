//! Persistent store of locking intervals, one JSON record per line.
//!
//! Records carry the solver settings that produced them; only records matching the active
//! settings are loaded. Two matching records for the same height that disagree, or a line
//! that does not parse, make the file unusable.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

use super::circle::{CircleSolverConfig, LockingInterval};
use crate::error::{Error, Result};
use crate::farey::Fraction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Record {
    q: u64,
    p: u64,
    omega_minus: f64,
    omega_plus: f64,
    residual: f64,
    omega_tol: f64,
    phase_grid: usize,
    refine_iters: usize,
}

impl Record {
    fn matches(&self, cfg: &CircleSolverConfig) -> bool {
        self.omega_tol == cfg.omega_tol
            && self.phase_grid == cfg.phase_grid
            && self.refine_iters == cfg.refine_iters
    }
}

pub struct TongueCache {
    cfg: CircleSolverConfig,
    path: Option<PathBuf>,
    map: RwLock<HashMap<(u64, u64), LockingInterval>>,
    writer: Mutex<Option<File>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl TongueCache {
    pub fn in_memory(cfg: CircleSolverConfig) -> Self {
        TongueCache {
            cfg,
            path: None,
            map: RwLock::new(HashMap::new()),
            writer: Mutex::new(None),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        }
    }

    /// Loads the matching records of `path` (created if absent) and appends new ones to it.
    pub fn open(path: &Path, cfg: CircleSolverConfig) -> Result<Self> {
        let mut map = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (lineno, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: Record = serde_json::from_str(&line)
                    .map_err(|e| Error::Cache(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
                if !rec.matches(&cfg) {
                    continue;
                }
                let interval = to_interval(&rec)?;
                match map.get(&(rec.q, rec.p)) {
                    Some(old) if *old != interval => {
                        return Err(Error::Cache(format!(
                            "{}:{}: conflicting records for {}/{}",
                            path.display(),
                            lineno + 1,
                            rec.q,
                            rec.p
                        )))
                    }
                    _ => {
                        map.insert((rec.q, rec.p), interval);
                    }
                }
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        Ok(TongueCache {
            cfg,
            path: Some(path.to_path_buf()),
            map: RwLock::new(map),
            writer: Mutex::new(Some(file)),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        })
    }

    pub fn config(&self) -> &CircleSolverConfig {
        &self.cfg
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, q: u64, p: u64) -> Option<LockingInterval> {
        let found = self.map.read().expect("cache lock").get(&(q, p)).cloned();
        let counter = if found.is_some() {
            &self.hits
        } else {
            &self.misses
        };
        counter.fetch_add(1, Ordering::Relaxed);
        found
    }

    /// Lookup that leaves the hit and miss counters alone.
    pub(crate) fn peek(&self, q: u64, p: u64) -> Option<LockingInterval> {
        self.map.read().expect("cache lock").get(&(q, p)).cloned()
    }

    /// Stores converged intervals; the file gets them in the given order.
    pub fn insert_all(&self, items: &[LockingInterval]) -> Result<()> {
        let mut lines = String::new();
        {
            let mut map = self.map.write().expect("cache lock");
            for it in items.iter().filter(|it| it.converged) {
                let (q, p) = it.height.to_u64_pair().expect("solver heights fit in u64");
                if map.insert((q, p), it.clone()).is_none() {
                    let rec = Record {
                        q,
                        p,
                        omega_minus: it.omega_minus,
                        omega_plus: it.omega_plus,
                        residual: it.residual,
                        omega_tol: self.cfg.omega_tol,
                        phase_grid: self.cfg.phase_grid,
                        refine_iters: self.cfg.refine_iters,
                    };
                    lines.push_str(&serde_json::to_string(&rec).expect("plain record"));
                    lines.push('\n');
                }
            }
        }
        if lines.is_empty() {
            return Ok(());
        }
        let mut writer = self.writer.lock().expect("cache writer lock");
        if let Some(file) = writer.as_mut() {
            file.write_all(lines.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|e| Error::Cache(e.to_string()))?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(hits, misses)` since construction.
    pub fn stats(&self) -> (usize, usize) {
        (
            self.hits.load(Ordering::Relaxed),
            self.misses.load(Ordering::Relaxed),
        )
    }
}

fn to_interval(rec: &Record) -> Result<LockingInterval> {
    if rec.p == 0 || !(rec.omega_minus < rec.omega_plus) {
        return Err(Error::Cache(format!(
            "invalid record for {}/{}",
            rec.q, rec.p
        )));
    }
    Ok(LockingInterval {
        height: Fraction::from_u64(rec.q, rec.p),
        omega_minus: rec.omega_minus,
        omega_plus: rec.omega_plus,
        width: rec.omega_plus - rec.omega_minus,
        converged: true,
        residual: rec.residual,
    })
}
