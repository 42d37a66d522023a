// SPDX-License-Identifier: MIT OR Apache-2.0

//! Cumulative sums behind O(1) window moments.
//!
//! Values are shifted by the first observation before accumulating, which
//! keeps integer-valued data exact and removes most of the cancellation in
//! `E[X^2] - E[X]^2`. Each running sum is carried as an unevaluated pair
//! `hi + lo` updated with error-free TwoSum, so window sums stay accurate
//! to a few ulps of the window sum itself even for very long series.

use crate::error::{MscpError, Result};
use serde::{Deserialize, Serialize};

/// Which half of the double window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Mean, raw second moment and biased variance (divisor = window length).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowMoments {
    pub mu1: f64,
    pub mu2: f64,
    pub var: f64,
    pub side: Side,
}

#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    fn add(self, x: f64) -> Self {
        let s = self.hi + x;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (x - bp);
        Self {
            hi: s,
            lo: self.lo + err,
        }
    }

    fn minus(self, other: Self) -> f64 {
        (self.hi - other.hi) + (self.lo - other.lo)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Prefix sums `S1[k] = sum_{i<=k} X_i` and `S2[k] = sum_{i<=k} X_i^2`.
#[derive(Clone, Debug)]
pub struct PrefixSums {
    shift: f64,
    s1: Vec<Compensated>,
    s2: Vec<Compensated>,
}

/// Relative size below which a window variance is rounding noise.
const VARIANCE_FLOOR: f64 = 16.0 * f64::EPSILON;

impl PrefixSums {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(MscpError::domain("cannot build prefix sums of an empty series"));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(MscpError::domain(format!(
                "observation {} is not finite ({})",
                i + 1,
                values[i]
            )));
        }
        let shift = values[0];
        let mut s1 = Vec::with_capacity(values.len() + 1);
        let mut s2 = Vec::with_capacity(values.len() + 1);
        let mut a = Compensated::default();
        let mut b = Compensated::default();
        s1.push(a);
        s2.push(b);
        for &x in values {
            let y = x - shift;
            a = a.add(y);
            b = b.add(y * y);
            s1.push(a);
            s2.push(b);
        }
        Ok(Self { shift, s1, s2 })
    }

    /// Builds prefix sums after checking the series covers a `2 * delta` window.
    pub fn for_window(values: &[f64], delta: usize) -> Result<Self> {
        if values.len() < 2 * delta {
            return Err(MscpError::domain(format!(
                "series of length {} is shorter than 2*delta = {}",
                values.len(),
                2 * delta
            )));
        }
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.s1.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `S1[k]` in original units.
    pub fn sum(&self, k: usize) -> f64 {
        self.s1[k].value() + k as f64 * self.shift
    }

    /// `S2[k]` in original units.
    pub fn sum_sq(&self, k: usize) -> f64 {
        let s1 = self.s1[k].value();
        self.s2[k].value() + 2.0 * self.shift * s1 + k as f64 * self.shift * self.shift
    }

    /// Shifted mean and biased variance of observations `start+1 ..= start+len`.
    fn shifted(&self, start: usize, len: usize) -> (f64, f64) {
        let end = start + len;
        let inv = 1.0 / len as f64;
        let m1 = self.s1[end].minus(self.s1[start]) * inv;
        let m2 = self.s2[end].minus(self.s2[start]) * inv;
        let var = m2 - m1 * m1;
        let var = if var <= VARIANCE_FLOOR * m2 { 0.0 } else { var };
        (m1, var)
    }

    /// Mean and biased variance of observations `start+1 ..= start+len` (1-based).
    pub fn range_moments(&self, start: usize, len: usize) -> Result<(f64, f64)> {
        if len == 0 || start + len > self.len() {
            return Err(MscpError::domain(format!(
                "window {}..={} is outside 1..={}",
                start + 1,
                start + len,
                self.len()
            )));
        }
        let (m1, var) = self.shifted(start, len);
        Ok((m1 + self.shift, var))
    }

    /// Moments of the left window `t-h+1 ..= t` or right window `t+1 ..= t+h`.
    pub fn window_moments(&self, t: usize, h: usize, side: Side) -> Result<WindowMoments> {
        let start = match side {
            Side::Left => t.checked_sub(h).ok_or_else(|| {
                MscpError::domain(format!("left window of (t={t}, h={h}) starts before 1"))
            })?,
            Side::Right => t,
        };
        let (mu1, var) = self.range_moments(start, h)?;
        Ok(WindowMoments {
            mu1,
            mu2: var + mu1 * mu1,
            var,
            side,
        })
    }

    /// Welch contrast `(mean_r - mean_l) / sqrt((var_r + var_l) / h)` over
    /// the double window at observation `t` with half-width `h`, or `None`
    /// when both variances vanish. No bounds checks.
    #[inline]
    pub(crate) fn welch(&self, t: usize, h: usize) -> Option<f64> {
        let (ml, vl) = self.shifted(t - h, h);
        let (mr, vr) = self.shifted(t, h);
        let denom = vr + vl;
        if denom > 0.0 {
            Some((mr - ml) / (denom / h as f64).sqrt())
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn small_prefix_sums() {
        let p = PrefixSums::new(&[1.0, 2.0]).unwrap();
        let s1: Vec<f64> = (0..=2).map(|k| p.sum(k)).collect();
        let s2: Vec<f64> = (0..=2).map(|k| p.sum_sq(k)).collect();
        assert_eq!(s1, vec![0.0, 1.0, 3.0]);
        assert_eq!(s2, vec![0.0, 1.0, 5.0]);
        let z = PrefixSums::new(&[0.0; 10]).unwrap();
        assert!((0..=10).all(|k| z.sum(k) == 0.0 && z.sum_sq(k) == 0.0));
    }

    #[test]
    fn too_short_for_delta() {
        assert!(PrefixSums::for_window(&[1.0; 9], 5).is_err());
        assert!(PrefixSums::for_window(&[1.0; 10], 5).is_ok());
        assert!(PrefixSums::new(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn hand_computed_window() {
        let p = PrefixSums::new(&[0.0, 2.0, 1.0, 3.0]).unwrap();
        let left = p.window_moments(2, 2, Side::Left).unwrap();
        assert_eq!(left.mu1, 1.0);
        assert_eq!(left.var, 1.0);
        assert_eq!(left.mu2, 2.0);
        let right = p.window_moments(2, 2, Side::Right).unwrap();
        assert_eq!(right.mu1, 2.0);
        assert_eq!(right.var, 1.0);
        assert!(p.window_moments(1, 2, Side::Left).is_err());
        assert!(p.window_moments(3, 2, Side::Right).is_err());
    }

    #[test]
    fn constant_window_has_zero_variance() {
        let p = PrefixSums::new(&[3.7, 0.1, 0.1, 0.1, 0.1, 9.0]).unwrap();
        let m = p.window_moments(5, 4, Side::Left).unwrap();
        assert_eq!(m.var, 0.0);
        assert!((m.mu1 - 0.1).abs() < 1e-15);
    }

    #[test]
    fn matches_two_pass_mean() {
        let mut rng = SeededRng::new(77);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.normal(3.0, 2.0)).collect();
        let p = PrefixSums::new(&xs).unwrap();
        for _ in 0..2000 {
            let len = 1 + rng.below(2000);
            let start = rng.below(xs.len() - len + 1);
            let w = &xs[start..start + len];
            let mean = w.iter().sum::<f64>() / len as f64;
            let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / len as f64;
            let (m, v) = p.range_moments(start, len).unwrap();
            assert!((m - mean).abs() <= 1e-9 * (1.0 + mean.abs()));
            assert!((v - var).abs() <= 1e-9 * (1.0 + var));
        }
    }

    #[test]
    fn large_sample_variance() {
        let mut rng = SeededRng::new(3);
        let xs: Vec<f64> = (0..1_000_000).map(|_| rng.standard_normal()).collect();
        let p = PrefixSums::new(&xs).unwrap();
        let m = p.window_moments(500_000, 500_000, Side::Left).unwrap();
        assert!((m.var - 1.0).abs() < 0.01);
        assert!((m.var - (m.mu2 - m.mu1 * m.mu1)).abs() <= 1e-9 * m.var);
    }
}
