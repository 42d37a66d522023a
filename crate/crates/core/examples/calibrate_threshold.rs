// SPDX-License-Identifier: MIT OR Apache-2.0

//! Simulates the supremum of the limiting field and reads off thresholds.
//!
//! ```text
//! cargo run --release --example calibrate_threshold [T] [delta] [replicates]
//! ```

use mscp::SupSample;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>());
    let horizon = args.next().transpose()?.unwrap_or(1000);
    let delta = args.next().transpose()?.unwrap_or(20);
    let replicates = args.next().transpose()?.unwrap_or(4000);

    let sample = SupSample::simulate(horizon, delta, replicates, 7)?;
    println!("T = {horizon}, delta = {delta}, {replicates} draws");
    for alpha in [0.10, 0.05, 0.01] {
        println!(
            "  alpha {alpha:<5} kappa {:.4} (se {:.4})",
            sample.quantile(alpha)?,
            sample.standard_error(alpha)?
        );
    }
    let draws = sample.draws();
    println!("  median sup {:.4}, largest {:.4}", draws[draws.len() / 2], draws[draws.len() - 1]);
    Ok(())
}
