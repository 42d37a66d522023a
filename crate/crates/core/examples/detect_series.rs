// SPDX-License-Identifier: MIT OR Apache-2.0

//! Detects change points in a series.
//!
//! ```text
//! cargo run --release --example detect_series [values.csv]
//! ```
//!
//! Without an argument a seeded realization of the demo scenario is used.
//! The threshold is calibrated at alpha = 0.01 and cached on disk.

use mscp::calibrate::KappaKey;
use mscp::cli::read_series;
use mscp::{detect, demo_scenario, generate, DetectorConfig, KappaCache, SeededRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let values = match std::env::args().nth(1) {
        Some(path) => read_series(path.as_ref())?,
        None => generate(&demo_scenario(), 1, &mut SeededRng::new(2021))?.values,
    };
    let delta = 20;
    let alpha = 0.01;
    let key = KappaKey { horizon: values.len(), delta, alpha, replicates: 10_000, seed: 0 };
    let (record, hit) = KappaCache::from_env().get_or_calibrate(key)?;
    println!(
        "kappa = {:.4} +/- {:.4} ({})",
        record.kappa,
        record.standard_error,
        if hit { "cached" } else { "calibrated" }
    );

    let config = DetectorConfig::new(record.kappa).with_delta(delta);
    let report = detect(&values, &config)?;
    println!("change points: {:?}", report.change_points);
    println!("{:>6} {:>6} {:>9} {:>9}", "start", "end", "mean", "sd");
    for s in &report.segments {
        println!("{:>6} {:>6} {:>9.3} {:>9.3}", s.start, s.end, s.mean, s.var.sqrt());
    }
    Ok(())
}
