// SPDX-License-Identifier: MIT OR Apache-2.0

//! Monte Carlo calibration of the breaking threshold.
//!
//! Under "no change" the MOSUM field converges to
//! `L(t, h) = ((W(t+h) - W(t)) - (W(t) - W(t-h))) / sqrt(2h)` for a standard
//! Brownian motion `W`. The threshold `kappa` is the `(1 - alpha)`-quantile
//! of `sup |L|` over the integer lattice of the triangle.

use crate::error::{MscpError, Result};
use crate::field::{Field, TrianglePoint, TriangleSpec};
use crate::rng::{derive_seed, SeededRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const DEFAULT_REPLICATES: usize = 10_000;
pub const MIN_REPLICATES: usize = 100;
/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "MSCP_CACHE_DIR";
const CACHE_FILE: &str = "kappa.json";

/// One Brownian path at unit steps and the induced limit field.
#[derive(Clone, Debug)]
pub struct LimitProcessSample {
    spec: TriangleSpec,
    /// `W(0) = 0, W(1), ..., W(T)`.
    pub brownian: Vec<f64>,
    pub sup_abs: f64,
}

impl LimitProcessSample {
    pub fn draw(spec: TriangleSpec, rng: &mut SeededRng) -> Self {
        let brownian = brownian_path(spec.horizon, rng);
        let sup_abs = sup_abs(&brownian, &spec);
        Self {
            spec,
            brownian,
            sup_abs,
        }
    }
}

impl Field for LimitProcessSample {
    fn spec(&self) -> &TriangleSpec {
        &self.spec
    }

    fn value(&self, p: TrianglePoint) -> f64 {
        let w = &self.brownian;
        (w[p.t + p.h] - 2.0 * w[p.t] + w[p.t - p.h]) / (2.0 * p.h as f64).sqrt()
    }
}

fn brownian_path(horizon: usize, rng: &mut SeededRng) -> Vec<f64> {
    let mut w = Vec::with_capacity(horizon + 1);
    let mut acc = 0.0;
    w.push(acc);
    for _ in 0..horizon {
        acc += rng.standard_normal();
        w.push(acc);
    }
    w
}

fn sup_abs(w: &[f64], spec: &TriangleSpec) -> f64 {
    let mut sup = 0.0f64;
    for h in spec.delta..=spec.h_max() {
        let scale = 1.0 / (2.0 * h as f64).sqrt();
        let count = spec.row_len(h);
        let left = &w[0..count];
        let mid = &w[h..h + count];
        let right = &w[2 * h..2 * h + count];
        let row_max = left
            .iter()
            .zip(mid)
            .zip(right)
            .fold(0.0f64, |m, ((a, b), c)| m.max((c - 2.0 * b + a).abs()));
        sup = sup.max(row_max * scale);
    }
    sup
}

/// One draw of `sup |L|` over the lattice of `spec`.
pub fn simulate_sup(spec: &TriangleSpec, rng: &mut SeededRng) -> f64 {
    sup_abs(&brownian_path(spec.horizon, rng), spec)
}

/// Sorted Monte Carlo draws of `sup |L|`.
#[derive(Clone, Debug)]
pub struct SupSample {
    pub horizon: usize,
    pub delta: usize,
    pub seed: u64,
    draws: Vec<f64>,
}

impl SupSample {
    /// Draw `r` uses the stream `derive_seed(seed, r)`; replicates run in parallel.
    pub fn simulate(horizon: usize, delta: usize, replicates: usize, seed: u64) -> Result<Self> {
        let spec = TriangleSpec::new(horizon, delta).map_err(|e| MscpError::config(e.to_string()))?;
        if replicates < MIN_REPLICATES {
            return Err(MscpError::config(format!(
                "at least {MIN_REPLICATES} replicates are required, got {replicates}"
            )));
        }
        let mut draws: Vec<f64> = (0..replicates)
            .into_par_iter()
            .map(|r| simulate_sup(&spec, &mut SeededRng::new(derive_seed(seed, r as u64))))
            .collect();
        draws.sort_by(f64::total_cmp);
        Ok(Self {
            horizon,
            delta,
            seed,
            draws,
        })
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    pub fn replicates(&self) -> usize {
        self.draws.len()
    }

    /// Order statistic `ceil((1 - alpha) R)` (1-based).
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(self.draws[self.rank(alpha) - 1])
    }

    fn rank(&self, alpha: f64) -> usize {
        let r = self.draws.len();
        (((1.0 - alpha) * r as f64).ceil() as usize).clamp(1, r)
    }

    /// Half the spread between the order statistics one binomial standard
    /// deviation below and above the quantile's rank.
    pub fn standard_error(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let r = self.draws.len();
        let k = ((r as f64 * alpha * (1.0 - alpha)).sqrt().ceil() as usize).max(1);
        let rank = self.rank(alpha);
        let lo = rank.saturating_sub(k).max(1);
        let hi = (rank + k).min(r);
        Ok((self.draws[hi - 1] - self.draws[lo - 1]) / 2.0)
    }

    pub fn record(&self, alpha: f64) -> Result<KappaRecord> {
        Ok(KappaRecord {
            horizon: self.horizon,
            delta: self.delta,
            alpha,
            replicates: self.draws.len(),
            lattice_step: 1,
            seed: self.seed,
            kappa: self.quantile(alpha)?,
            standard_error: self.standard_error(alpha)?,
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(MscpError::config(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaRecord {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub delta: usize,
    pub alpha: f64,
    pub replicates: usize,
    pub lattice_step: usize,
    pub seed: u64,
    pub kappa: f64,
    pub standard_error: f64,
}

impl KappaRecord {
    fn matches(&self, key: &KappaKey) -> bool {
        self.horizon == key.horizon
            && self.delta == key.delta
            && self.alpha == key.alpha
            && self.replicates == key.replicates
            && self.lattice_step == 1
            && self.seed == key.seed
    }
}

/// Calibrates `kappa` for `(T, delta, alpha)` from `replicates` draws.
pub fn calibrate_kappa(horizon: usize, delta: usize, alpha: f64, replicates: usize, seed: u64) -> Result<KappaRecord> {
    check_alpha(alpha)?;
    SupSample::simulate(horizon, delta, replicates, seed)?.record(alpha)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaKey {
    pub horizon: usize,
    pub delta: usize,
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
}

/// JSON array of [`KappaRecord`]s on disk.
#[derive(Clone, Debug)]
pub struct KappaCache {
    path: PathBuf,
}

impl KappaCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    /// `$MSCP_CACHE_DIR/kappa.json`, or `.mscp-cache/kappa.json`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".mscp-cache"));
        Self::new(dir.join(CACHE_FILE))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// All records; an unreadable or corrupt file yields an empty table.
    pub fn load(&self) -> Vec<KappaRecord> {
        let text = match std::fs::read_to_string(&self.path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Vec::new(),
            Err(e) => {
                log::warn!("cannot read kappa cache {}: {e}; recalibrating", self.path.display());
                return Vec::new();
            }
        };
        serde_json::from_str(&text).unwrap_or_else(|e| {
            log::warn!("kappa cache {} is corrupt ({e}); recalibrating", self.path.display());
            Vec::new()
        })
    }

    pub fn lookup(&self, key: &KappaKey) -> Option<KappaRecord> {
        self.load().into_iter().find(|r| r.matches(key))
    }

    /// Inserts or replaces `record`, writing through a temporary file and rename.
    pub fn store(&self, record: &KappaRecord) -> Result<()> {
        let key = KappaKey {
            horizon: record.horizon,
            delta: record.delta,
            alpha: record.alpha,
            replicates: record.replicates,
            seed: record.seed,
        };
        let mut records = self.load();
        records.retain(|r| !r.matches(&key));
        records.push(record.clone());
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        std::fs::create_dir_all(&dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
        serde_json::to_writer_pretty(&mut tmp, &records)?;
        tmp.write_all(b"\n")?;
        tmp.persist(&self.path).map_err(|e| MscpError::Io(e.error))?;
        Ok(())
    }

    /// Cached record for `key`, calibrating and storing it on a miss.
    /// The flag is `true` on a cache hit.
    pub fn get_or_calibrate(&self, key: KappaKey) -> Result<(KappaRecord, bool)> {
        if let Some(hit) = self.lookup(&key) {
            return Ok((hit, true));
        }
        let record = calibrate_kappa(key.horizon, key.delta, key.alpha, key.replicates, key.seed)?;
        self.store(&record)?;
        Ok((record, false))
    }
}
