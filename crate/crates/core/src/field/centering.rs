// SPDX-License-Identifier: MIT OR Apache-2.0

//! The noise-free signal surface under a known change model.
//!
//! Each window `(a, b]` sees a mixture of the sections it overlaps, weighted
//! by the time spent in each. The mixture mean and variance replace the
//! sample moments in the Welch contrast to give the centering value.

use super::mosum::{FieldKind, MosumField};
use super::triangle::{TrianglePoint, TriangleSpec};
use crate::error::{MscpError, Result};
use crate::synth::Scenario;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Change points with the first two moments of every section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangeModel {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub change_points: Vec<usize>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl ChangeModel {
    pub fn new(horizon: usize, change_points: Vec<usize>, means: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        let sections = change_points.len() + 1;
        if means.len() != sections || variances.len() != sections {
            return Err(MscpError::parameter(format!(
                "{} change points need {sections} means and variances",
                change_points.len()
            )));
        }
        if change_points.windows(2).any(|w| w[0] >= w[1])
            || change_points.first().is_some_and(|&c| c == 0)
            || change_points.last().is_some_and(|&c| c >= horizon)
        {
            return Err(MscpError::parameter(format!(
                "change points must be strictly increasing in 1..{horizon}"
            )));
        }
        if variances.iter().any(|&v| !(v > 0.0)) {
            return Err(MscpError::parameter("section variances must be positive"));
        }
        Ok(Self {
            horizon,
            change_points,
            means,
            variances,
        })
    }

    pub fn from_scenario(scenario: &Scenario) -> Self {
        Self {
            horizon: scenario.horizon,
            change_points: scenario.change_points.clone(),
            means: scenario.means(),
            variances: scenario.variances(),
        }
    }

    /// Section boundaries `(c_{u-1}, c_u]` with `c_0 = 0`, `c_{|C|+1} = T`.
    fn sections(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let starts = std::iter::once(0).chain(self.change_points.iter().copied());
        let ends = self
            .change_points
            .iter()
            .copied()
            .chain(std::iter::once(self.horizon));
        starts.zip(ends).enumerate().map(|(u, (a, b))| (u, a, b))
    }

    /// `(section index, overlap length)` for every section meeting `(lo, hi]`.
    pub fn overlaps(&self, lo: usize, hi: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sections().filter_map(move |(u, a, b)| {
            let start = a.max(lo);
            let end = b.min(hi);
            (end > start).then(|| (u, end - start))
        })
    }
}

/// Weighted limits of the window moments and the split of the mixture
/// variance into pure section variance and mean-violation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitDecomposition {
    pub mu_tilde: f64,
    pub sigma_tilde_sq: f64,
    pub sigma_tilde2_sq: f64,
    pub err_sq: f64,
}

/// Limits for the window `(lo, hi]`.
pub fn limit_decomposition(model: &ChangeModel, lo: usize, hi: usize) -> LimitDecomposition {
    let h = (hi - lo) as f64;
    let mut mu_tilde = 0.0;
    let mut sigma_tilde2_sq = 0.0;
    for (u, len) in model.overlaps(lo, hi) {
        let w = len as f64 / h;
        mu_tilde += w * model.means[u];
        sigma_tilde2_sq += w * model.variances[u];
    }
    let err_sq: f64 = model
        .overlaps(lo, hi)
        .map(|(u, len)| len as f64 / h * (mu_tilde - model.means[u]).powi(2))
        .sum();
    LimitDecomposition {
        mu_tilde,
        sigma_tilde_sq: sigma_tilde2_sq + err_sq,
        sigma_tilde2_sq,
        err_sq,
    }
}

/// Centering value at `(t, h)` for windows stretched by `scale`.
pub fn centering_at(model: &ChangeModel, t: usize, h: usize, scale: usize) -> f64 {
    let left = limit_decomposition(model, t - h, t);
    let right = limit_decomposition(model, t, t + h);
    let denom = left.sigma_tilde_sq + right.sigma_tilde_sq;
    (right.mu_tilde - left.mu_tilde) / (denom / (scale * h) as f64).sqrt()
}

/// Dense centering field over `spec`.
pub fn centering_field(model: &ChangeModel, spec: TriangleSpec) -> Result<MosumField> {
    if model.horizon != spec.horizon {
        return Err(MscpError::config(format!(
            "change model horizon {} differs from triangle horizon {}",
            model.horizon, spec.horizon
        )));
    }
    let rows = (spec.delta..=spec.h_max())
        .into_par_iter()
        .map(|h| {
            spec.t_range(h)
                .map(|t| (centering_at(model, t, h, spec.scale), false))
                .collect()
        })
        .collect();
    Ok(MosumField::from_rows(spec, FieldKind::Centering, rows, None))
}

/// Decomposition of both windows at a lattice point.
pub fn decomposition_at(model: &ChangeModel, p: TrianglePoint) -> (LimitDecomposition, LimitDecomposition) {
    (
        limit_decomposition(model, p.t - p.h, p.t),
        limit_decomposition(model, p.t, p.t + p.h),
    )
}

/// Slope constants `(kappa_a, kappa_b)` bounding `|d/dt g|` for the
/// single-change shape `g`, where the centering field near `c` is
/// `sqrt(n h) * g((c - t) / h)`.
pub fn slope_bounds(mu: f64, mu_next: f64, sigma: f64, sigma_next: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.0 && sigma_next > 0.0) {
        return Err(MscpError::domain("standard deviations must be positive"));
    }
    let jump = mu_next - mu;
    if jump == 0.0 {
        return Err(MscpError::domain("equal means: there is no change"));
    }
    let var_min = (sigma * sigma).min(sigma_next * sigma_next);
    let var_max = (sigma * sigma).max(sigma_next * sigma_next);
    let a = jump.abs();
    let kappa_a = a * 2.0 * var_min / (2.0 * var_max + jump * jump / 4.0).powf(1.5);
    let kappa_b = a * (2.0 * var_max + jump * jump) / (2.0 * var_min).powf(1.5);
    Ok((kappa_a, kappa_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(c: usize, horizon: usize, mu: (f64, f64), sd: (f64, f64)) -> ChangeModel {
        ChangeModel::new(horizon, vec![c], vec![mu.0, mu.1], vec![sd.0 * sd.0, sd.1 * sd.1]).unwrap()
    }

    #[test]
    fn value_at_the_change() {
        let m = single(100, 200, (0.0, 1.0), (1.0, 1.0));
        for h in [5usize, 20, 64, 100] {
            let d = centering_at(&m, 100, h, 1);
            assert!((d - (h as f64).sqrt() / 2f64.sqrt()).abs() < 1e-12);
            let (l, r) = decomposition_at(&m, TrianglePoint::new(100, h));
            assert_eq!(l.err_sq + r.err_sq, 0.0);
        }
    }

    #[test]
    fn zero_without_overlap() {
        let m = single(100, 200, (0.0, 1.0), (1.0, 1.0));
        assert_eq!(centering_at(&m, 50, 20, 1), 0.0);
        assert_eq!(centering_at(&m, 150, 50, 1), 0.0);
    }

    #[test]
    fn scaling_is_sqrt_n() {
        let m = single(100, 200, (0.0, 3.0), (1.0, 2.0));
        let a = centering_at(&m, 95, 20, 1);
        let b = centering_at(&m, 95, 20, 16);
        assert!((b - 4.0 * a).abs() < 1e-12);
    }

    #[test]
    fn hat_shape() {
        let m = single(100, 200, (1.0, 4.0), (1.0, 0.5));
        let h = 30;
        let d: Vec<f64> = (100 - h..=100 + h).map(|t| centering_at(&m, t, h, 1)).collect();
        for w in d[..=h].windows(2) {
            assert!(w[1] > w[0]);
        }
        for w in d[h..].windows(2) {
            assert!(w[1] < w[0]);
        }
        let flipped = single(100, 200, (4.0, 1.0), (1.0, 0.5));
        assert!(centering_at(&flipped, 100, h, 1) < 0.0);
    }

    #[test]
    fn error_term_peaks_at_half_window() {
        let m = single(100, 200, (0.0, 2.0), (1.0, 1.0));
        let h = 20;
        let err = |t: usize| {
            let (l, r) = decomposition_at(&m, TrianglePoint::new(t, h));
            l.err_sq + r.err_sq
        };
        assert_eq!(err(100), 0.0);
        assert_eq!(err(80), 0.0);
        assert_eq!(err(120), 0.0);
        for t in 80..=120 {
            assert!(err(90) >= err(t) && err(110) >= err(t));
        }
    }

    #[test]
    fn kappa_constants() {
        let (ka, kb) = slope_bounds(1.0, 4.0, 1.0, 1.0).unwrap();
        assert!((ka - 6.0 / 4.25f64.powf(1.5)).abs() < 1e-12);
        assert!((ka - 0.6848).abs() < 1e-4);
        assert!((kb - 33.0 / 2f64.powf(1.5)).abs() < 1e-12);
        let (sa, sb) = slope_bounds(4.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!((ka, kb), (sa, sb));
        let (ua, ub) = slope_bounds(0.0, 2.0, 0.5, 1.5).unwrap();
        let (va, vb) = slope_bounds(2.0, 0.0, 1.5, 0.5).unwrap();
        assert_eq!((ua, ub), (va, vb));
        assert!(ua > 0.0 && ua < ub);
        assert!(slope_bounds(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn unit_slopes_within_inverse_sqrt_h_bounds() {
        let mut rng = crate::rng::SeededRng::new(11);
        for _ in 0..200 {
            let mu = (rng.normal(0.0, 3.0), rng.normal(0.0, 3.0));
            let sd = (0.2 + 2.0 * rng.uniform(), 0.2 + 2.0 * rng.uniform());
            let h = 5 + rng.below(60);
            let c = 2 * h;
            let m = single(c, 4 * h, mu, sd);
            let (ka, kb) = slope_bounds(mu.0, mu.1, sd.0, sd.1).unwrap();
            let s = 1.0 / (h as f64).sqrt();
            let slopes = (c - h + 1..c - 1).chain(c..c + h - 1).map(|t| {
                (centering_at(&m, t + 1, h, 1) - centering_at(&m, t, h, 1)).abs()
            });
            for slope in slopes {
                assert!(slope >= s * ka - 1e-9 && slope <= s * kb + 1e-9, "{slope} vs [{}, {}]", s * ka, s * kb);
            }
        }
    }

    #[test]
    fn model_validation() {
        assert!(ChangeModel::new(10, vec![5], vec![0.0], vec![1.0]).is_err());
        assert!(ChangeModel::new(10, vec![10], vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(ChangeModel::new(10, vec![5], vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
    }
}
