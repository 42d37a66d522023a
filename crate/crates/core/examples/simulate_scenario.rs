// SPDX-License-Identifier: MIT OR Apache-2.0

//! Generates a realization of a tabulated scenario under a chosen family.
//!
//! ```text
//! cargo run --example simulate_scenario [label] [normal|gamma|poisson|binomial|mix] [seed]
//! ```

use mscp::synth::Variant;
use mscp::{generate, standard_scenario, SeededRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let label = args.next().unwrap_or_else(|| "3e".into());
    let variant: Variant = match args.next() {
        Some(name) => serde_json::from_value(serde_json::Value::String(name))?,
        None => Variant::Normal,
    };
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let scenario = standard_scenario(&label)?.with_variant(variant)?;
    let series = generate(&scenario, 1, &mut SeededRng::new(seed))?;
    println!("scenario {} ({variant}), T = {}", scenario.label, scenario.horizon);
    println!("change points: {:?}", scenario.change_points);

    let mut lo = 0;
    let bounds = scenario.change_points.iter().copied().chain([scenario.horizon]);
    for (segment, hi) in scenario.segments.iter().zip(bounds) {
        let part = &series.values[lo..hi];
        let mean = part.iter().sum::<f64>() / part.len() as f64;
        println!(
            "  ({lo:>4}, {hi:>4}]  {:?}  mean {:>6.3} (target {:>6.3})",
            segment.family,
            mean,
            segment.mean()
        );
        lo = hi;
    }
    Ok(())
}
