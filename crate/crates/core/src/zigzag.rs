// SPDX-License-Identifier: MIT OR Apache-2.0

//! Zigzag down-paths through the triangle.
//!
//! From a start `(t_s, h_s)` the path first picks the best of
//! `t_s - 1, t_s, t_s + 1` on the start row, then descends one row at a
//! time, each time moving to the maximizer of `|f|` among the previous
//! position and its two neighbours. Ties go to the smallest `t`.

use crate::error::{MscpError, Result};
use crate::field::{centering_at, ChangeModel, Field, Geometry, TrianglePoint, TriangleSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZigzagPath {
    pub start: TrianglePoint,
    /// `t` after step `k = 0 ..= h_s - delta`; step `k` lies on row `h_s - k`.
    pub steps: Vec<usize>,
    pub end: usize,
    pub max_stat: f64,
    /// `|f|` at every visited point.
    pub stat_values: Vec<f64>,
}

impl ZigzagPath {
    fn from_steps(start: TrianglePoint, steps: Vec<usize>, stat_values: Vec<f64>) -> Self {
        let end = *steps.last().expect("a path has at least one step");
        let max_stat = stat_values.iter().fold(0.0f64, |m, &v| m.max(v));
        Self {
            start,
            steps,
            end,
            max_stat,
            stat_values,
        }
    }

    /// Visited lattice points in order.
    pub fn points(&self) -> impl Iterator<Item = TrianglePoint> + '_ {
        self.steps
            .iter()
            .enumerate()
            .map(move |(k, &t)| TrianglePoint::new(t, self.start.h - k))
    }

    /// Checks the step bound and domain containment.
    pub fn check(&self, spec: &TriangleSpec) -> Result<()> {
        let bad = |why: String| Err(MscpError::Invariant(format!("zigzag path from {:?}: {why}", self.start)));
        if self.steps.len() != self.start.h + 1 - spec.delta {
            return bad(format!("{} steps for h_s = {}", self.steps.len(), self.start.h));
        }
        if self.start.t.abs_diff(self.steps[0]) > 1 {
            return bad("first step moved by more than one".into());
        }
        if self.steps.windows(2).any(|w| w[0].abs_diff(w[1]) > 1) {
            return bad("a step moved by more than one".into());
        }
        if let Some(p) = self.points().find(|&p| !spec.contains(p)) {
            return bad(format!("visits {p:?} outside the triangle"));
        }
        if self.end != *self.steps.last().unwrap_or(&usize::MAX) {
            return bad("end differs from the last step".into());
        }
        Ok(())
    }
}

/// Smallest maximizer of `|f|` over the in-row neighbours of `t` on row `h`.
#[inline]
fn best_neighbour<F: Field + ?Sized>(field: &F, t: usize, h: usize) -> (usize, f64) {
    let horizon = field.spec().horizon;
    let lo = t.saturating_sub(1).max(h);
    let hi = (t + 1).min(horizon - h);
    let mut best_t = lo;
    let mut best = field.value(TrianglePoint::new(lo, h)).abs();
    for cand in lo + 1..=hi {
        let v = field.value(TrianglePoint::new(cand, h)).abs();
        if v > best {
            best = v;
            best_t = cand;
        }
    }
    (best_t, best)
}

/// Runs the zigzag down-path on `field` from `start`.
pub fn run_path<F: Field + ?Sized>(field: &F, start: TrianglePoint) -> Result<ZigzagPath> {
    let spec = *field.spec();
    spec.check(start)?;
    let len = start.h + 1 - spec.delta;
    let mut steps = Vec::with_capacity(len);
    let mut stats = Vec::with_capacity(len);
    let mut t = start.t;
    for k in 0..len {
        // Candidates outside [h, T - h] are dropped. For k >= 1 they never
        // are, since the previous row's range is strictly inside this one.
        let (next, stat) = best_neighbour(field, t, start.h - k);
        t = next;
        steps.push(t);
        stats.push(stat);
    }
    Ok(ZigzagPath::from_steps(start, steps, stats))
}

/// Closed-form path on the centering field for a start in an attraction area.
///
/// The path walks one step per row towards `c_u` (the start row included)
/// and stays once it gets there. Steps are derived from the geometry alone;
/// `stat_values` are filled from the change model for reference.
pub fn oracle_path(model: &ChangeModel, spec: TriangleSpec, start: TrianglePoint) -> Result<ZigzagPath> {
    let geometry = Geometry::new(&model.change_points, spec)?;
    let u = geometry.attraction_of(start).ok_or_else(|| {
        MscpError::domain(format!("{start:?} lies in no area of attraction"))
    })?;
    let c = model.change_points[u];
    let len = start.h + 1 - spec.delta;
    let mut steps = Vec::with_capacity(len);
    let mut t = start.t;
    for _ in 0..len {
        if t < c {
            t += 1;
        } else if t > c {
            t -= 1;
        }
        steps.push(t);
    }
    let stats = steps
        .iter()
        .enumerate()
        .map(|(k, &t)| centering_at(model, t, start.h - k, spec.scale).abs())
        .collect();
    Ok(ZigzagPath::from_steps(start, steps, stats))
}
