//! Store of objective values keyed by the decoded candidate.
//!
//! The persisted form is an append-only text file: a header naming the
//! variables, then one `v1,...,vn,value` record per candidate. A file that
//! does not parse is discarded and rebuilt from empty.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use rayon::prelude::*;

use crate::bbo::Objective;
use crate::error::{Error, Result};
use crate::model::{DesignCandidate, DesignVariableSpec};
use crate::objective::DiscreteObjective;

const MAGIC: &str = "# rcbbo-cache v1";

#[derive(Default)]
pub struct EvalCache {
    map: RwLock<HashMap<Vec<usize>, f64>>,
    file: Option<Mutex<BufWriter<File>>>,
    path: Option<PathBuf>,
}

fn header(spec: &DesignVariableSpec) -> String {
    format!("{MAGIC} {}", spec.csv_header())
}

fn parse_store(text: &str, spec: &DesignVariableSpec) -> std::result::Result<HashMap<Vec<usize>, f64>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header(spec) => {}
        Some(h) => return Err(format!("unexpected header `{h}`")),
        None => return Ok(HashMap::new()),
    }
    let mut map = HashMap::new();
    for (no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != spec.len() + 1 {
            return Err(format!("record {} has {} fields", no + 2, fields.len()));
        }
        let mut key = Vec::with_capacity(spec.len());
        for (f, var) in fields.iter().zip(&spec.variables) {
            let v: f64 = f.parse().map_err(|_| format!("record {}: bad number `{f}`", no + 2))?;
            let idx = var
                .values
                .iter()
                .position(|x| *x == v)
                .ok_or_else(|| format!("record {}: {v} is not a candidate of `{}`", no + 2, var.name))?;
            key.push(idx);
        }
        let value: f64 = fields[spec.len()]
            .parse()
            .map_err(|_| format!("record {}: bad value", no + 2))?;
        map.insert(key, value);
    }
    Ok(map)
}

impl EvalCache {
    pub fn in_memory() -> Self {
        EvalCache::default()
    }

    /// Opens or creates a persistent cache. The second element carries a
    /// warning when an unreadable store was discarded.
    pub fn open(path: &Path, spec: &DesignVariableSpec) -> Result<(Self, Option<String>)> {
        let mut warning = None;
        let mut map = HashMap::new();
        let mut fresh = true;
        if path.exists() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            match parse_store(&text, spec) {
                Ok(m) => {
                    fresh = text.is_empty();
                    map = m;
                }
                Err(reason) => {
                    let msg = format!("cache {} is corrupt ({reason}); rebuilding from empty", path.display());
                    log::warn!("{msg}");
                    warning = Some(msg);
                }
            }
        }
        let file = if fresh {
            let mut f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            writeln!(f, "{}", header(spec))?;
            f
        } else {
            OpenOptions::new()
                .append(true)
                .open(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
        };
        Ok((
            EvalCache {
                map: RwLock::new(map),
                file: Some(Mutex::new(BufWriter::new(file))),
                path: Some(path.to_path_buf()),
            },
            warning,
        ))
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &[usize]) -> Option<f64> {
        self.map.read().expect("cache lock").get(key).copied()
    }

    /// Stores new records; keys already present are left untouched.
    pub fn insert_many(&self, records: &[(&DesignCandidate, f64)]) -> Result<()> {
        let mut map = self.map.write().expect("cache lock");
        let mut lines = String::new();
        for (c, v) in records {
            if map.contains_key(c.key()) {
                continue;
            }
            map.insert(c.key().to_vec(), *v);
            lines.push_str(&c.csv_row());
            lines.push(',');
            lines.push_str(&v.to_string());
            lines.push('\n');
        }
        if let Some(file) = &self.file {
            let mut f = file.lock().expect("cache file lock");
            f.write_all(lines.as_bytes())?;
            f.flush()?;
        }
        Ok(())
    }
}

/// Genome objective that consults the cache before evaluating.
pub struct CachedObjective<'c, D> {
    inner: D,
    cache: &'c EvalCache,
    calls: AtomicU64,
    hits: AtomicU64,
}

impl<'c, D: DiscreteObjective> CachedObjective<'c, D> {
    pub fn new(inner: D, cache: &'c EvalCache) -> Self {
        CachedObjective {
            inner,
            cache,
            calls: AtomicU64::new(0),
            hits: AtomicU64::new(0),
        }
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }

    /// Evaluations of the inner objective.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    fn decode(&self, genome: &[f64]) -> DesignCandidate {
        self.inner
            .spec()
            .decode(genome)
            .expect("genome length follows the spec dimension")
    }
}

impl<D: DiscreteObjective> Objective for CachedObjective<'_, D> {
    fn dimension(&self) -> usize {
        self.inner.spec().len()
    }

    fn evaluate(&self, genome: &[f64]) -> f64 {
        self.evaluate_batch(&[genome.to_vec()])[0]
    }

    fn evaluate_batch(&self, genomes: &[Vec<f64>]) -> Vec<f64> {
        let candidates: Vec<DesignCandidate> = genomes.iter().map(|g| self.decode(g)).collect();
        let mut seen = HashSet::new();
        let misses: Vec<&DesignCandidate> = candidates
            .iter()
            .filter(|c| self.cache.get(c.key()).is_none() && seen.insert(c.key().to_vec()))
            .collect();
        self.hits
            .fetch_add((candidates.len() - misses.len()) as u64, Ordering::Relaxed);
        self.calls.fetch_add(misses.len() as u64, Ordering::Relaxed);
        let values: Vec<f64> = misses.par_iter().map(|c| self.inner.evaluate_candidate(c)).collect();
        let fresh: HashMap<&[usize], f64> = misses.iter().map(|c| c.key()).zip(values.iter().copied()).collect();
        let records: Vec<(&DesignCandidate, f64)> = misses.iter().copied().zip(values.iter().copied()).collect();
        if let Err(e) = self.cache.insert_many(&records) {
            log::warn!("cannot persist cache records: {e}");
        }
        candidates
            .iter()
            .map(|c| {
                fresh
                    .get(c.key())
                    .copied()
                    .or_else(|| self.cache.get(c.key()))
                    .expect("value computed or cached")
            })
            .collect()
    }
}

/// Reads every record of a persisted cache.
pub fn load_records(path: &Path, spec: &DesignVariableSpec) -> Result<Vec<(Vec<usize>, f64)>> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut text = String::new();
    for line in BufReader::new(f).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    let map = parse_store(&text, spec).map_err(Error::Input)?;
    let mut out: Vec<_> = map.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}
