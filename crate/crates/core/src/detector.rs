// SPDX-License-Identifier: MIT OR Apache-2.0

//! Iterative multiscale change-point detection.
//!
//! Starting points on a coarse grid are ranked by `(n h)^(-1/2) |D|`. The
//! best one launches a zigzag path whose endpoint is a candidate. Candidates
//! within `2 (delta - 1)` of an earlier estimate are dropped, a path whose
//! statistic never reaches the threshold ends the search, and every
//! processed endpoint has its cone cut from the remaining starts.

use crate::error::{MscpError, Result};
use crate::field::{in_cone, Field, MosumStatistic, TrianglePoint, TriangleSpec};
use crate::rng::SeededRng;
use crate::zigzag::{run_path, ZigzagPath};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DELTA: usize = 20;
pub const DEFAULT_ALPHA: f64 = 0.01;
/// Threshold growth exponent for `n > 1`; irrelevant at `n = 1`.
pub const DEFAULT_BETA: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Minimal bandwidth.
    pub delta: usize,
    /// Mesh of the starting grid.
    pub grid: usize,
    /// Breaking threshold at `n = 1`.
    pub kappa: f64,
    /// Level `kappa` was calibrated for; informational.
    pub alpha: Option<f64>,
    /// The threshold is `kappa * n^beta`.
    pub beta: f64,
    /// Scale factor `n`; the series must have `n * T` values.
    pub scale: usize,
    /// Known minimal spacing of change points; enables the spacing break.
    pub delta_c_hint: Option<usize>,
    /// Seed for the uniform choice among tied starting points.
    pub seed: u64,
    /// Moment order `p` of the data, for the record only.
    pub p_doc: Option<f64>,
    /// Rate exponent `v`, for the record only.
    pub v_doc: Option<f64>,
}

impl DetectorConfig {
    /// Defaults: `delta = 20`, `g = delta`, `n = 1`.
    pub fn new(kappa: f64) -> Self {
        Self {
            delta: DEFAULT_DELTA,
            grid: DEFAULT_DELTA,
            kappa,
            alpha: None,
            beta: DEFAULT_BETA,
            scale: 1,
            delta_c_hint: None,
            seed: 0,
            p_doc: None,
            v_doc: None,
        }
    }

    /// Sets `delta` and resets the grid mesh to it.
    pub fn with_delta(mut self, delta: usize) -> Self {
        self.delta = delta;
        self.grid = delta;
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_scale(mut self, scale: usize, beta: f64) -> Self {
        self.scale = scale;
        self.beta = beta;
        self
    }

    /// Effective threshold `kappa * n^beta`; exactly `kappa` when `n = 1`.
    pub fn threshold(&self) -> f64 {
        if self.scale == 1 {
            self.kappa
        } else {
            self.kappa * (self.scale as f64).powf(self.beta)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta == 0 {
            return Err(MscpError::config("delta must be at least 1"));
        }
        if self.grid == 0 {
            return Err(MscpError::config("grid mesh g must be at least 1"));
        }
        if !(self.kappa > 0.0) {
            return Err(MscpError::config(format!("kappa must be positive, got {}", self.kappa)));
        }
        if self.scale == 0 {
            return Err(MscpError::config("scale factor n must be at least 1"));
        }
        if !(0.0..0.5).contains(&self.beta) {
            return Err(MscpError::config(format!("beta must lie in [0, 1/2), got {}", self.beta)));
        }
        Ok(())
    }

    /// Triangle for a series of `len` observations.
    pub fn triangle(&self, len: usize) -> Result<TriangleSpec> {
        self.validate()?;
        if !len.is_multiple_of(self.scale) {
            return Err(MscpError::config(format!(
                "series length {len} is not a multiple of n = {}",
                self.scale
            )));
        }
        let horizon = len / self.scale;
        if horizon < 2 * self.delta {
            return Err(MscpError::config(format!(
                "series of length {len} is too short for delta = {} (needs at least {})",
                self.delta,
                2 * self.delta * self.scale
            )));
        }
        TriangleSpec::scaled(horizon, self.delta, self.scale)
            .map_err(|e| MscpError::config(e.to_string()))
    }
}

/// Grid of candidate starting points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartSet {
    pub points: Vec<TrianglePoint>,
}

impl StartSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: TrianglePoint) -> bool {
        self.points.contains(&p)
    }
}

/// Lattice points whose coordinates are both multiples of `g`.
pub fn build_grid(spec: &TriangleSpec, g: usize) -> Result<StartSet> {
    if g == 0 {
        return Err(MscpError::config("grid mesh g must be at least 1"));
    }
    let first_h = spec.delta.div_ceil(g) * g;
    let points: Vec<TrianglePoint> = (first_h..=spec.h_max())
        .step_by(g)
        .flat_map(|h| {
            let first_t = h.div_ceil(g) * g;
            (first_t..=spec.horizon - h)
                .step_by(g)
                .map(move |t| TrianglePoint::new(t, h))
        })
        .collect();
    if points.is_empty() {
        return Err(MscpError::config(format!(
            "grid mesh g = {g} leaves no starting point in the triangle (T={}, delta={})",
            spec.horizon, spec.delta
        )));
    }
    Ok(StartSet { points })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    Accepted,
    /// Endpoint within `2 (delta - 1)` of an earlier estimate.
    RejectedDuplicate,
    /// Path statistic stayed below the threshold.
    BreakTriggered,
    /// Endpoint closer to an estimate than the known spacing allows.
    BreakSpacing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    #[serde(flatten)]
    pub path: ZigzagPath,
    pub disposition: Disposition,
    /// Whether the start was drawn uniformly among exact ties.
    #[serde(default)]
    pub tie_sampled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSummary {
    /// First observation (1-based).
    pub start: usize,
    /// Last observation (inclusive).
    pub end: usize,
    pub mean: f64,
    /// Variance with divisor equal to the section length.
    pub var: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub delta: usize,
    pub g: usize,
    pub kappa: f64,
    pub alpha: Option<f64>,
    pub seed: u64,
    pub n: usize,
    pub beta: f64,
    /// Threshold actually applied, `kappa * n^beta`.
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_c: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub config: ConfigEcho,
    /// Estimates in lattice units, ascending.
    pub change_points: Vec<usize>,
    pub segments: Vec<SegmentSummary>,
    /// Every path in the order it was run.
    pub paths: Vec<PathRecord>,
    /// Run manifest that produced this report, when written by the CLI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
}

impl DetectionReport {
    /// Accepted estimates in discovery order.
    pub fn discovery_order(&self) -> Vec<usize> {
        self.paths
            .iter()
            .filter(|r| r.disposition == Disposition::Accepted)
            .map(|r| r.path.end)
            .collect()
    }

    /// Checks spacing of estimates and that segments tile `1..=len`.
    pub fn check(&self, len: usize) -> Result<()> {
        let min_gap = 2 * self.config.delta.saturating_sub(1);
        if self.change_points.windows(2).any(|w| w[1] - w[0] <= min_gap) {
            return Err(MscpError::Invariant(format!(
                "estimates {:?} closer than 2(delta-1) = {min_gap}",
                self.change_points
            )));
        }
        let mut next = 1;
        for s in &self.segments {
            if s.start != next || s.end < s.start {
                return Err(MscpError::Invariant(format!("segments do not tile 1..={len}")));
            }
            next = s.end + 1;
        }
        if next != len + 1 {
            return Err(MscpError::Invariant(format!("segments do not tile 1..={len}")));
        }
        Ok(())
    }
}

/// Per-section mean and variance for sections split at `change_points`
/// (an estimate `c` ends a section at observation `c`).
pub fn segment_moments(values: &[f64], change_points: &[usize]) -> Result<Vec<SegmentSummary>> {
    let len = values.len();
    if change_points.windows(2).any(|w| w[0] >= w[1])
        || change_points.first().is_some_and(|&c| c == 0)
        || change_points.last().is_some_and(|&c| c >= len)
    {
        return Err(MscpError::domain(format!(
            "change points {change_points:?} must be strictly increasing in 1..{len}"
        )));
    }
    let starts = std::iter::once(0).chain(change_points.iter().copied());
    let ends = change_points.iter().copied().chain(std::iter::once(len));
    Ok(starts
        .zip(ends)
        .map(|(a, b)| {
            let section = &values[a..b];
            let k = section.len() as f64;
            let mean = section.iter().sum::<f64>() / k;
            let var = section.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k;
            SegmentSummary {
                start: a + 1,
                end: b,
                mean,
                var,
            }
        })
        .collect())
}

struct Run {
    estimates: Vec<usize>,
    paths: Vec<PathRecord>,
}

fn run<F: Field>(field: &F, config: &DetectorConfig, first_only: bool) -> Result<Run> {
    let spec = *field.spec();
    let grid = build_grid(&spec, config.grid)?;
    let n = spec.scale as f64;
    let mut starts: Vec<(TrianglePoint, f64)> = grid
        .points
        .into_iter()
        .map(|p| (p, field.value(p).abs() / (n * p.h as f64).sqrt()))
        .collect();
    let threshold = config.threshold();
    let duplicate_radius = 2 * (config.delta - 1);
    let mut rng = SeededRng::new(config.seed);
    let mut estimates: Vec<usize> = Vec::new();
    let mut paths = Vec::new();

    while !starts.is_empty() {
        let best = starts.iter().fold(f64::NEG_INFINITY, |m, &(_, s)| m.max(s));
        let tied: Vec<usize> = (0..starts.len()).filter(|&i| starts[i].1 == best).collect();
        let tie_sampled = tied.len() > 1;
        let start = starts[tied[if tie_sampled { rng.below(tied.len()) } else { 0 }]].0;

        let path = run_path(field, start)?;
        let end = path.end;
        let nearest = estimates.iter().map(|&c| c.abs_diff(end)).min();

        let disposition = if nearest.is_some_and(|d| d <= duplicate_radius) {
            Disposition::RejectedDuplicate
        } else if path.max_stat < threshold {
            Disposition::BreakTriggered
        } else if matches!((nearest, config.delta_c_hint),
            (Some(d), Some(dc)) if (d as i64) < dc as i64 - duplicate_radius as i64)
        {
            Disposition::BreakSpacing
        } else {
            Disposition::Accepted
        };
        paths.push(PathRecord {
            path,
            disposition,
            tie_sampled,
        });
        match disposition {
            Disposition::BreakTriggered | Disposition::BreakSpacing => break,
            Disposition::Accepted => estimates.push(end),
            Disposition::RejectedDuplicate => {}
        }
        // The start always lies in the endpoint's cone when delta >= 2; it is
        // removed explicitly so the loop also terminates for delta = 1.
        starts.retain(|&(p, _)| p != start && !in_cone(end, p));
        if first_only {
            break;
        }
    }
    Ok(Run { estimates, paths })
}

/// Runs the detector on `values` (length `n * T`).
pub fn detect(values: &[f64], config: &DetectorConfig) -> Result<DetectionReport> {
    let spec = config.triangle(values.len())?;
    let field = MosumStatistic::new(values, spec)?;
    let Run { mut estimates, paths } = run(&field, config, false)?;
    estimates.sort_unstable();
    let scaled: Vec<usize> = estimates.iter().map(|c| c * spec.scale).collect();
    let segments = segment_moments(values, &scaled)?;
    Ok(DetectionReport {
        config: ConfigEcho {
            horizon: spec.horizon,
            delta: config.delta,
            g: config.grid,
            kappa: config.kappa,
            alpha: config.alpha,
            seed: config.seed,
            n: config.scale,
            beta: config.beta,
            threshold: config.threshold(),
            delta_c: config.delta_c_hint,
        },
        change_points: estimates,
        segments,
        paths,
        manifest: None,
    })
}

/// Runs the detector on a precomputed field; returns estimates and audit.
pub fn detect_on_field<F: Field>(field: &F, config: &DetectorConfig) -> Result<(Vec<usize>, Vec<PathRecord>)> {
    config.validate()?;
    let Run { mut estimates, paths } = run(field, config, false)?;
    estimates.sort_unstable();
    Ok((estimates, paths))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisOutcome {
    /// `true` iff the detector returns at least one change point.
    pub reject: bool,
    pub max_stat_on_first_path: f64,
}

/// Test of "no change" at the level `kappa` was calibrated for.
///
/// The first path can neither be a duplicate nor trip the spacing rule, so
/// the detector returns a change point exactly when that path reaches the
/// threshold; only the first iteration is run.
pub fn hypothesis_test(values: &[f64], config: &DetectorConfig) -> Result<HypothesisOutcome> {
    let spec = config.triangle(values.len())?;
    let field = MosumStatistic::new(values, spec)?;
    let Run { estimates, paths } = run(&field, config, true)?;
    Ok(HypothesisOutcome {
        reject: !estimates.is_empty(),
        max_stat_on_first_path: paths.first().map_or(0.0, |r| r.path.max_stat),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Geometry;
    use crate::rng::SeededRng;
    use crate::synth::{generate, standard_scenario};

    #[test]
    fn grid_on_small_triangle() {
        let spec = TriangleSpec::new(200, 20).unwrap();
        let grid = build_grid(&spec, 20).unwrap();
        assert!(grid.contains(TrianglePoint::new(40, 20)));
        assert!(!grid.contains(TrianglePoint::new(20, 40)));
        // brute-force predicate enumeration
        let mut expected = Vec::new();
        for h in (0..=200).step_by(20) {
            for t in (0..=200).step_by(20) {
                let p = TrianglePoint::new(t, h);
                if spec.contains(p) {
                    expected.push(p);
                }
            }
        }
        assert_eq!(grid.points, expected);
        let full = build_grid(&spec, 1).unwrap();
        assert_eq!(full.len(), spec.len());
        assert!(build_grid(&TriangleSpec::new(40, 20).unwrap(), 30).is_err());
    }

    #[test]
    fn grid_is_sufficient_for_1a() {
        let s = standard_scenario("1a").unwrap();
        let spec = TriangleSpec::new(1000, 20).unwrap();
        let grid = build_grid(&spec, 20).unwrap();
        let g = Geometry::new(&s.change_points, spec).unwrap();
        for u in 0..s.change_points.len() {
            assert!(grid.points.iter().any(|&p| g.in_attraction(u, p)), "A_{u} has no start");
        }
    }

    #[test]
    fn constant_series_has_no_change() {
        let report = detect(&[2.5; 200], &DetectorConfig::new(3.0)).unwrap();
        assert!(report.change_points.is_empty());
        assert_eq!(report.paths.len(), 1);
        assert_eq!(report.paths[0].disposition, Disposition::BreakTriggered);
        assert_eq!(report.segments.len(), 1);
        // every start ties at zero
        assert!(report.paths[0].tie_sampled);
    }

    #[test]
    fn finds_a_large_jump() {
        let mut rng = SeededRng::new(5);
        let xs: Vec<f64> = (0..60)
            .map(|i| rng.normal(if i < 30 { 0.0 } else { 10.0 }, 1.0))
            .collect();
        let cfg = DetectorConfig::new(3.0).with_delta(5);
        let report = detect(&xs, &cfg).unwrap();
        assert_eq!(report.change_points.len(), 1);
        assert!(report.change_points[0].abs_diff(30) <= 4);
        report.check(60).unwrap();
    }

    #[test]
    fn config_errors() {
        assert!(detect(&[0.0; 39], &DetectorConfig::new(3.0)).is_err());
        assert!(detect(&[0.0; 100], &DetectorConfig::new(0.0)).is_err());
        assert!(detect(&[0.0; 101], &DetectorConfig::new(1.0).with_scale(2, 0.25)).is_err());
        assert!(detect(&[0.0; 100], &DetectorConfig::new(1.0).with_grid(0)).is_err());
    }

    #[test]
    fn segments() {
        let s = segment_moments(&[0.0, 0.0, 5.0, 5.0, 5.0], &[2]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].mean, s[0].var, s[1].mean, s[1].var), (0.0, 0.0, 5.0, 0.0));
        assert_eq!((s[1].start, s[1].end), (3, 5));
        let whole = segment_moments(&[1.0, 3.0], &[]).unwrap();
        assert_eq!((whole[0].mean, whole[0].var), (2.0, 1.0));
        assert!(segment_moments(&[1.0; 5], &[3, 2]).is_err());
        assert!(segment_moments(&[1.0; 5], &[5]).is_err());
    }

    #[test]
    fn threshold_scaling() {
        let cfg = DetectorConfig::new(2.0);
        assert_eq!(cfg.threshold(), 2.0);
        let scaled = cfg.clone().with_scale(4, 0.5 - 1e-9);
        assert!((scaled.threshold() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn infinite_kappa_never_rejects() {
        let s = standard_scenario("1a").unwrap();
        let series = generate(&s, 1, &mut SeededRng::new(1)).unwrap();
        let out = hypothesis_test(&series.values, &DetectorConfig::new(f64::INFINITY)).unwrap();
        assert!(!out.reject);
        assert!(out.max_stat_on_first_path > 10.0);
    }

    #[test]
    fn spacing_hint_breaks_early() {
        let s = standard_scenario("1a").unwrap();
        let series = generate(&s, 1, &mut SeededRng::new(2)).unwrap();
        let mut cfg = DetectorConfig::new(3.5);
        let plain = detect(&series.values, &cfg).unwrap();
        cfg.delta_c_hint = Some(10_000);
        let hinted = detect(&series.values, &cfg).unwrap();
        assert_eq!(hinted.change_points.len(), 1);
        assert_eq!(hinted.paths.last().unwrap().disposition, Disposition::BreakSpacing);
        assert!(plain.change_points.len() >= 5);
    }
}
