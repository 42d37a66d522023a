// SPDX-License-Identifier: MIT OR Apache-2.0

//! Scores the detector on tabulated scenarios and prints the CSV table.
//!
//! ```text
//! cargo run --release --example benchmark_scenarios [replicates] [label...]
//! ```

use mscp::bench::{benchmark, write_csv};
use mscp::synth::Variant;
use mscp::{calibrate_kappa, standard_scenario, DetectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let replicates: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50);
    let mut labels: Vec<String> = args.collect();
    if labels.is_empty() {
        labels = vec!["1a".into(), "2c".into(), "3e".into()];
    }

    let kappa = calibrate_kappa(1000, 20, 0.01, 2000, 0)?.kappa;
    let config = DetectorConfig::new(kappa);
    let mut cases = Vec::new();
    for label in &labels {
        let scenario = standard_scenario(label)?;
        for variant in [Variant::Normal, Variant::Mix] {
            cases.push((variant, scenario.with_variant(variant)?));
        }
    }
    let rows = benchmark(&cases, replicates, &config, 11)?;
    write_csv(&rows, std::io::stdout())?;
    Ok(())
}
