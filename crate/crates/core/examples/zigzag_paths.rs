// SPDX-License-Identifier: MIT OR Apache-2.0

//! Follows zigzag paths on an observed field and on its deterministic limit.
//!
//! ```text
//! cargo run --example zigzag_paths
//! ```

use mscp::field::{centering_field, compute_field, ChangeModel, Geometry, TriangleSpec};
use mscp::{demo_scenario, generate, oracle_path, run_path, SeededRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = demo_scenario();
    let series = generate(&scenario, 1, &mut SeededRng::new(3))?;
    let spec = TriangleSpec::new(scenario.horizon, 20)?;
    let observed = compute_field(&series.values, spec)?;
    let model = ChangeModel::from_scenario(&scenario);
    let limit = centering_field(&model, spec)?;
    println!("true change points {:?}", scenario.change_points);
    println!("max |D| = {:.2}, max |d| = {:.2}", observed.max_abs(), limit.max_abs());

    let geometry = Geometry::new(&scenario.change_points, spec)?;
    for u in 0..scenario.change_points.len() {
        // widest start in the area attracted to change point u
        let Some(start) = geometry.attraction(u).into_iter().max_by_key(|p| (p.h, p.t)) else {
            continue;
        };
        let path = run_path(&observed, start)?;
        let oracle = oracle_path(&model, spec, start)?;
        println!(
            "start ({}, {}): observed ends at {} in {} steps (max {:.2}); limit ends at {}",
            start.t,
            start.h,
            path.end,
            path.steps.len(),
            path.max_stat,
            oracle.end
        );
    }
    Ok(())
}
