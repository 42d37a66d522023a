// SPDX-License-Identifier: MIT OR Apache-2.0

//! Replicated simulation benchmark.
//!
//! An estimate `c_hat` is correct at tolerance `V` if its distance to the
//! nearest true change point is at most `V`. Per case the table reports the
//! total number of estimates, the number of correct ones for `V = 10, 5, 2`
//! and their mean distance (`None` when nothing is correct).

use crate::detector::{detect, DetectorConfig};
use crate::error::{MscpError, Result};
use crate::rng::{derive_seed, SeededRng};
use crate::synth::{generate, Scenario, Variant};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};

pub const TOLERANCES: [usize; 3] = [10, 5, 2];

/// One row of the metrics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scenario: String,
    pub distribution: String,
    pub replicates: usize,
    pub total: usize,
    pub corr10: usize,
    pub mad10: Option<f64>,
    pub corr5: usize,
    pub mad5: Option<f64>,
    pub corr2: usize,
    pub mad2: Option<f64>,
}

impl BenchRow {
    /// Number of true change points summed over replicates.
    pub fn truth_total(&self, scenario: &Scenario) -> usize {
        self.replicates * scenario.change_points.len()
    }
}

/// Counts over one or more replicates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tally {
    pub total: usize,
    pub correct: [usize; 3],
    pub distance: [usize; 3],
}

impl Tally {
    /// Scores `estimates` against `truth` (same units).
    pub fn score(estimates: &[usize], truth: &[usize]) -> Self {
        let mut tally = Tally {
            total: estimates.len(),
            ..Tally::default()
        };
        for &c in estimates {
            let Some(m) = truth.iter().map(|&u| c.abs_diff(u)).min() else {
                continue;
            };
            for (i, &v) in TOLERANCES.iter().enumerate() {
                if m <= v {
                    tally.correct[i] += 1;
                    tally.distance[i] += m;
                }
            }
        }
        tally
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.total += other.total;
        for i in 0..3 {
            self.correct[i] += other.correct[i];
            self.distance[i] += other.distance[i];
        }
        self
    }

    fn mad(&self, i: usize) -> Option<f64> {
        (self.correct[i] > 0).then(|| self.distance[i] as f64 / self.correct[i] as f64)
    }
}

/// Stable per-case seed so filtering cases does not change their streams.
fn case_seed(master: u64, scenario: &str, distribution: &str) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in scenario.bytes().chain([0u8]).chain(distribution.bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    derive_seed(master, h)
}

/// Runs `replicates` detections per case; replicate `r` of a case draws from
/// `derive_seed(case_seed, r)` and uses the same value as the tie-break seed.
pub fn benchmark(
    cases: &[(Variant, Scenario)],
    replicates: usize,
    config: &DetectorConfig,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    if replicates == 0 {
        return Err(MscpError::config("at least one replicate is required"));
    }
    config.validate()?;
    let mut rows = Vec::with_capacity(cases.len());
    for (variant, scenario) in cases {
        let base = case_seed(seed, &scenario.label, variant.name());
        let done = AtomicUsize::new(0);
        let tallies: Vec<Tally> = (0..replicates)
            .into_par_iter()
            .map(|r| {
                let stream = derive_seed(base, r as u64);
                let series = generate(scenario, config.scale, &mut SeededRng::new(stream))?;
                let report = detect(&series.values, &config.clone().with_seed(stream))?;
                let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                if finished.is_multiple_of(100) || finished == replicates {
                    log::info!("{} {}: {finished}/{replicates}", scenario.label, variant);
                }
                Ok(Tally::score(&report.change_points, &scenario.change_points))
            })
            .collect::<Result<_>>()?;
        let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);
        rows.push(BenchRow {
            scenario: scenario.label.clone(),
            distribution: variant.name().to_string(),
            replicates,
            total: tally.total,
            corr10: tally.correct[0],
            mad10: tally.mad(0),
            corr5: tally.correct[1],
            mad5: tally.mad(1),
            corr2: tally.correct[2],
            mad2: tally.mad(2),
        });
    }
    Ok(rows)
}

/// CSV with header; an undefined mean distance is an empty field.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, rows)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::standard_scenario;

    #[test]
    fn scoring() {
        let t = Tally::score(&[98, 205, 303, 700], &[100, 200, 300]);
        assert_eq!(t.total, 4);
        assert_eq!(t.correct, [3, 3, 1]);
        assert_eq!(t.distance, [10, 10, 2]);
        assert_eq!(t.mad(0), Some(10.0 / 3.0));
        let empty = Tally::score(&[500], &[100]);
        assert_eq!(empty.correct, [0, 0, 0]);
        assert_eq!(empty.mad(2), None);
    }

    #[test]
    fn single_replicate_and_csv() {
        let s = standard_scenario("1a").unwrap();
        let config = DetectorConfig::new(3.5);
        let rows = benchmark(&[(Variant::Normal, s.clone())], 1, &config, 9).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].corr10 <= s.change_points.len());
        let again = benchmark(&[(Variant::Normal, s)], 1, &config, 9).unwrap();
        assert_eq!(rows, again);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "scenario,distribution,replicates,total,corr10,mad10,corr5,mad5,corr2,mad2\n"
        ));
        assert!(benchmark(&[], 0, &config, 0).is_err());
    }
}
