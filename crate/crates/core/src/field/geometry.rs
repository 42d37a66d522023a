// SPDX-License-Identifier: MIT OR Apache-2.0

//! Regions of the triangle relative to a change set.
//!
//! For change point `c_u` (with `c_0 = 0`, `c_{|C|+1} = T`):
//! * attraction `A_u`: `c_{u-1} <= t-h < c_u <= t+h < c_{u+1}`
//! * inner set `B_u`: points of `A_u` with `|t - c_u| <= h - delta + 1`
//! * cone `K_{t0}`: `t-h < t0 <= t+h`
//! * remainder `R`: points in no cone of a change point.

use super::triangle::{TrianglePoint, TriangleSpec};
use crate::error::{MscpError, Result};
use serde::{Deserialize, Serialize};

/// Whether `p`'s double window overlaps `t0`.
#[inline]
pub fn in_cone(t0: usize, p: TrianglePoint) -> bool {
    p.t < t0 + p.h && t0 <= p.t + p.h
}

#[derive(Clone, Debug)]
pub struct Geometry {
    spec: TriangleSpec,
    change_points: Vec<usize>,
}

impl Geometry {
    pub fn new(change_points: &[usize], spec: TriangleSpec) -> Result<Self> {
        if change_points.windows(2).any(|w| w[0] >= w[1])
            || change_points.first().is_some_and(|&c| c == 0)
            || change_points.last().is_some_and(|&c| c >= spec.horizon)
        {
            return Err(MscpError::domain(format!(
                "change points must be strictly increasing in 1..{}",
                spec.horizon
            )));
        }
        Ok(Self {
            spec,
            change_points: change_points.to_vec(),
        })
    }

    pub fn spec(&self) -> &TriangleSpec {
        &self.spec
    }

    pub fn change_points(&self) -> &[usize] {
        &self.change_points
    }

    fn neighbours(&self, u: usize) -> (usize, usize, usize) {
        let prev = if u == 0 { 0 } else { self.change_points[u - 1] };
        let next = self
            .change_points
            .get(u + 1)
            .copied()
            .unwrap_or(self.spec.horizon);
        (prev, self.change_points[u], next)
    }

    /// Membership in the attraction area of the `u`-th change point (0-based).
    pub fn in_attraction(&self, u: usize, p: TrianglePoint) -> bool {
        if !self.spec.contains(p) {
            return false;
        }
        let (prev, c, next) = self.neighbours(u);
        prev + p.h <= p.t && p.t < c + p.h && c <= p.t + p.h && p.t + p.h < next
    }

    pub fn in_inner(&self, u: usize, p: TrianglePoint) -> bool {
        let c = self.change_points[u];
        self.in_attraction(u, p) && p.t.abs_diff(c) + self.spec.delta <= p.h + 1
    }

    pub fn in_cone_of(&self, t0: usize, p: TrianglePoint) -> bool {
        self.spec.contains(p) && in_cone(t0, p)
    }

    pub fn in_remainder(&self, p: TrianglePoint) -> bool {
        self.spec.contains(p) && !self.change_points.iter().any(|&c| in_cone(c, p))
    }

    /// Index of the attraction area containing `p`, if any.
    pub fn attraction_of(&self, p: TrianglePoint) -> Option<usize> {
        (0..self.change_points.len()).find(|&u| self.in_attraction(u, p))
    }

    pub fn attraction(&self, u: usize) -> Vec<TrianglePoint> {
        self.spec.points().filter(|&p| self.in_attraction(u, p)).collect()
    }

    pub fn inner(&self, u: usize) -> Vec<TrianglePoint> {
        self.spec.points().filter(|&p| self.in_inner(u, p)).collect()
    }

    pub fn cone(&self, t0: usize) -> Vec<TrianglePoint> {
        self.spec.points().filter(|&p| in_cone(t0, p)).collect()
    }

    pub fn remainder(&self) -> Vec<TrianglePoint> {
        self.spec.points().filter(|&p| self.in_remainder(p)).collect()
    }

    /// Region lists for test tooling and plotting.
    pub fn export(&self) -> GeometryExport {
        let n = self.change_points.len();
        GeometryExport {
            spec: self.spec,
            change_points: self.change_points.clone(),
            attraction: (0..n).map(|u| self.attraction(u)).collect(),
            inner: (0..n).map(|u| self.inner(u)).collect(),
            cones: self.change_points.iter().map(|&c| self.cone(c)).collect(),
            remainder: self.remainder(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryExport {
    pub spec: TriangleSpec,
    pub change_points: Vec<usize>,
    pub attraction: Vec<Vec<TrianglePoint>>,
    pub inner: Vec<Vec<TrianglePoint>>,
    pub cones: Vec<Vec<TrianglePoint>>,
    pub remainder: Vec<TrianglePoint>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::centering::{centering_field, ChangeModel};
    use crate::field::mosum::Field;

    #[test]
    fn no_changes_means_all_remainder() {
        let spec = TriangleSpec::new(80, 5).unwrap();
        let g = Geometry::new(&[], spec).unwrap();
        assert_eq!(g.remainder().len(), spec.len());
    }

    #[test]
    fn cone_by_brute_force() {
        let spec = TriangleSpec::new(100, 4).unwrap();
        let g = Geometry::new(&[50], spec).unwrap();
        let cone = g.cone(50);
        // brute force over the full (t, h) rectangle
        let mut expected = Vec::new();
        for h in 0..=100usize {
            for t in 0..=100usize {
                let p = TrianglePoint::new(t, h);
                let overlaps = (t as i64 - h as i64) < 50 && 50 <= t + h;
                if spec.contains(p) && overlaps {
                    expected.push(p);
                }
            }
        }
        expected.sort_by_key(|p| (p.h, p.t));
        assert_eq!(cone, expected);
    }

    #[test]
    fn inclusion_chain_and_zero_remainder() {
        let spec = TriangleSpec::new(200, 20).unwrap();
        let cps = [65, 105, 145];
        let g = Geometry::new(&cps, spec).unwrap();
        let model = ChangeModel::new(
            200,
            cps.to_vec(),
            vec![1.0, 4.0, 1.0, -2.0],
            vec![1.0, 0.64, 1.0, 0.25],
        )
        .unwrap();
        let d = centering_field(&model, spec).unwrap();
        for p in spec.points() {
            for (u, &c) in cps.iter().enumerate() {
                if g.in_inner(u, p) {
                    assert!(g.in_attraction(u, p));
                }
                if g.in_attraction(u, p) {
                    assert!(g.in_cone_of(c, p));
                }
            }
            if g.in_remainder(p) {
                assert_eq!(d.value(p), 0.0);
            }
        }
        assert!(!g.attraction(0).is_empty());
        let export = g.export();
        assert_eq!(export.cones.len(), 3);
        let json = serde_json::to_string(&export).unwrap();
        assert_eq!(serde_json::from_str::<GeometryExport>(&json).unwrap(), export);
    }

    #[test]
    fn rejects_unsorted() {
        let spec = TriangleSpec::new(100, 4).unwrap();
        assert!(Geometry::new(&[50, 40], spec).is_err());
        assert!(Geometry::new(&[100], spec).is_err());
    }
}
