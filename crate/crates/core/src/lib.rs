// SPDX-License-Identifier: MIT OR Apache-2.0

//! Multiscale change-point detection (MSCP) for univariate sequences.
//!
//! The MOSUM (Welch two-sample) statistic is evaluated for every time `t`
//! and every bandwidth `h` of a triangle. Zigzag paths descend through the
//! triangle to change-point estimates; the [`detector`] launches them from
//! a grid, removes duplicates by cutting cones and stops once a path's
//! statistic stays below a threshold calibrated by Monte Carlo simulation
//! of the limiting Gaussian field ([`calibrate`]).
//!
//! ```no_run
//! use mscp::{detect, DetectorConfig};
//! # let values: Vec<f64> = vec![0.0; 200];
//! let report = detect(&values, &DetectorConfig::new(3.6))?;
//! println!("{:?}", report.change_points);
//! # Ok::<(), mscp::MscpError>(())
//! ```

pub mod bench;
pub mod calibrate;
pub mod cli;
pub mod detector;
pub mod error;
pub mod field;
pub mod rng;
pub mod synth;
pub mod zigzag;

pub use calibrate::{calibrate_kappa, simulate_sup, KappaCache, KappaRecord, SupSample};
pub use detector::{
    build_grid, detect, hypothesis_test, segment_moments, DetectionReport, DetectorConfig,
    Disposition, StartSet,
};
pub use error::{MscpError, Result};
pub use field::{
    centering_field, compute_field, mosum_at, ChangeModel, Field, Geometry, MosumField,
    TrianglePoint, TriangleSpec,
};
pub use rng::SeededRng;
pub use synth::{demo_scenario, generate, null_series, standard_scenario, standard_scenarios, Scenario, Series};
pub use zigzag::{oracle_path, run_path, ZigzagPath};
