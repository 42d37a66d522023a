// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::error::{MscpError, Result};
use serde::{Deserialize, Serialize};

/// Largest horizon a dense field may be built for.
pub const DEFAULT_MAX_HORIZON: usize = 100_000;

/// Integer lattice point: time `t` and bandwidth `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrianglePoint {
    pub t: usize,
    pub h: usize,
}

impl TrianglePoint {
    pub fn new(t: usize, h: usize) -> Self {
        Self { t, h }
    }
}

/// The lattice `{(t, h): delta <= h <= T/2, h <= t <= T - h}`.
///
/// `scale` stretches the windows behind every lattice point: point `(t, h)`
/// reads the observations `scale*t - scale*h + 1 ..= scale*t + scale*h`,
/// so a series attached to this triangle must have `scale * horizon` values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleSpec {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub delta: usize,
    #[serde(rename = "n", default = "one")]
    pub scale: usize,
}

fn one() -> usize {
    1
}

impl TriangleSpec {
    pub fn new(horizon: usize, delta: usize) -> Result<Self> {
        Self::scaled(horizon, delta, 1)
    }

    pub fn scaled(horizon: usize, delta: usize, scale: usize) -> Result<Self> {
        if horizon < 2 {
            return Err(MscpError::domain(format!("T must be at least 2, got {horizon}")));
        }
        if delta == 0 || delta > horizon / 2 {
            return Err(MscpError::domain(format!(
                "delta must lie in 1..={} for T={horizon}, got {delta}",
                horizon / 2
            )));
        }
        if scale == 0 {
            return Err(MscpError::domain("scale factor n must be at least 1"));
        }
        Ok(Self {
            horizon,
            delta,
            scale,
        })
    }

    pub fn h_max(&self) -> usize {
        self.horizon / 2
    }

    /// Admissible times on row `h`.
    pub fn t_range(&self, h: usize) -> std::ops::RangeInclusive<usize> {
        h..=self.horizon - h
    }

    pub fn contains(&self, p: TrianglePoint) -> bool {
        p.h >= self.delta && p.h <= self.h_max() && p.t >= p.h && p.t + p.h <= self.horizon
    }

    pub fn check(&self, p: TrianglePoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(MscpError::domain(format!(
                "({}, {}) lies outside the triangle T={}, delta={}",
                p.t, p.h, self.horizon, self.delta
            )))
        }
    }

    pub fn row_len(&self, h: usize) -> usize {
        self.horizon - 2 * h + 1
    }

    /// Number of lattice points.
    pub fn len(&self) -> usize {
        (self.delta..=self.h_max()).map(|h| self.row_len(h)).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All lattice points, row by row from `h = delta` upwards.
    pub fn points(&self) -> impl Iterator<Item = TrianglePoint> + '_ {
        (self.delta..=self.h_max())
            .flat_map(move |h| self.t_range(h).map(move |t| TrianglePoint { t, h }))
    }

    /// Number of observations a series on this triangle must have.
    pub fn series_len(&self) -> usize {
        self.horizon * self.scale
    }
}
