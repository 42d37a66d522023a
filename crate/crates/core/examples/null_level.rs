// SPDX-License-Identifier: MIT OR Apache-2.0

//! Empirical rejection rate of the no-change test under several laws.
//!
//! ```text
//! cargo run --release --example null_level [replicates]
//! ```

use mscp::rng::derive_seed;
use mscp::synth::NullLaw;
use mscp::{calibrate_kappa, hypothesis_test, null_series, DetectorConfig, SeededRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let replicates: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(200);
    let (horizon, delta) = (1000, 20);
    for alpha in [0.05, 0.01] {
        let kappa = calibrate_kappa(horizon, delta, alpha, 4000, 0)?.kappa;
        let config = DetectorConfig::new(kappa).with_delta(delta);
        println!("alpha {alpha} (kappa {kappa:.3})");
        for (name, law) in NullLaw::level_study() {
            let mut rejects = 0;
            for r in 0..replicates {
                let series = null_series(law, horizon, &mut SeededRng::new(derive_seed(5, r)))?;
                rejects += hypothesis_test(&series.values, &config)?.reject as u64;
            }
            println!("  {name:<11} {:.3}", rejects as f64 / replicates as f64);
        }
    }
    Ok(())
}
