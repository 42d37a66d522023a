// SPDX-License-Identifier: MIT OR Apache-2.0

//! Writes the centering field of the demo scenario and summarizes the
//! attraction regions, cones and remainder of the triangle.
//!
//! ```text
//! cargo run --example field_geometry > centering.tsv
//! ```

use std::io::Write;

use mscp::field::{centering_field, ChangeModel, Geometry, TriangleSpec};
use mscp::demo_scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = demo_scenario();
    let spec = TriangleSpec::new(scenario.horizon, 20)?;
    let model = ChangeModel::from_scenario(&scenario);
    let field = centering_field(&model, spec)?;
    let geometry = Geometry::new(&scenario.change_points, spec)?.export();

    eprintln!("{} lattice points", spec.len());
    for (u, c) in geometry.change_points.iter().enumerate() {
        eprintln!(
            "  c = {c:>3}: attraction {:>5}, inner {:>5}, cone {:>5}",
            geometry.attraction[u].len(),
            geometry.inner[u].len(),
            geometry.cones[u].len()
        );
    }
    let off = geometry.remainder.iter().filter(|&&p| field.get(p) != Some(0.0)).count();
    eprintln!("  remainder {} points, {off} with nonzero centering", geometry.remainder.len());

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    field.write_tsv(&mut out)?;
    out.flush()?;
    Ok(())
}
