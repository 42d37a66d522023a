// SPDX-License-Identifier: MIT OR Apache-2.0

use super::prefix::PrefixSums;
use super::triangle::{TrianglePoint, TriangleSpec, DEFAULT_MAX_HORIZON};
use crate::error::{MscpError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Read access to a real-valued field over a triangle.
///
/// Implemented by the dense [`MosumField`] and by the on-demand
/// [`MosumStatistic`], so paths and the detector work with either.
pub trait Field: Sync {
    fn spec(&self) -> &TriangleSpec;

    /// Value at `p`. Callers guarantee `self.spec().contains(p)`.
    fn value(&self, p: TrianglePoint) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// The MOSUM statistic of an observed series.
    Empirical,
    /// The deterministic limit under a known change model.
    Centering,
}

/// Welch statistic at `(t, h)` for an unscaled series; 0 when both window
/// variances vanish.
pub fn mosum_at(prefix: &PrefixSums, t: usize, h: usize) -> Result<f64> {
    if h == 0 || t < h || t + h > prefix.len() {
        return Err(MscpError::domain(format!(
            "double window at (t={t}, h={h}) does not fit a series of length {}",
            prefix.len()
        )));
    }
    Ok(prefix.welch(t, h).unwrap_or(0.0))
}

/// The MOSUM statistic evaluated on demand from prefix sums.
#[derive(Clone, Debug)]
pub struct MosumStatistic {
    spec: TriangleSpec,
    prefix: PrefixSums,
}

impl MosumStatistic {
    pub fn new(values: &[f64], spec: TriangleSpec) -> Result<Self> {
        if values.len() != spec.series_len() {
            return Err(MscpError::config(format!(
                "series has {} values but the triangle expects n*T = {}*{} = {}",
                values.len(),
                spec.scale,
                spec.horizon,
                spec.series_len()
            )));
        }
        Ok(Self {
            spec,
            prefix: PrefixSums::for_window(values, spec.delta * spec.scale)?,
        })
    }

    pub fn prefix(&self) -> &PrefixSums {
        &self.prefix
    }

    /// Value and whether the variance denominator vanished.
    #[inline]
    fn eval(&self, p: TrianglePoint) -> (f64, bool) {
        let n = self.spec.scale;
        match self.prefix.welch(n * p.t, n * p.h) {
            Some(v) => (v, false),
            None => (0.0, true),
        }
    }

    pub fn at(&self, p: TrianglePoint) -> Result<f64> {
        self.spec.check(p)?;
        Ok(self.eval(p).0)
    }
}

impl Field for MosumStatistic {
    fn spec(&self) -> &TriangleSpec {
        &self.spec
    }

    #[inline]
    fn value(&self, p: TrianglePoint) -> f64 {
        self.eval(p).0
    }
}

/// Dense field over every lattice point, stored row by row from `h = delta`.
#[derive(Clone, Debug)]
pub struct MosumField {
    spec: TriangleSpec,
    kind: FieldKind,
    values: Vec<f64>,
    row_offsets: Vec<usize>,
    degenerate: Vec<bool>,
    prefix: Option<PrefixSums>,
}

impl MosumField {
    pub(crate) fn from_rows(
        spec: TriangleSpec,
        kind: FieldKind,
        rows: Vec<Vec<(f64, bool)>>,
        prefix: Option<PrefixSums>,
    ) -> Self {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut values = Vec::with_capacity(spec.len());
        let mut degenerate = Vec::with_capacity(spec.len());
        row_offsets.push(0);
        for row in rows {
            for (v, d) in row {
                values.push(v);
                degenerate.push(d);
            }
            row_offsets.push(values.len());
        }
        Self {
            spec,
            kind,
            values,
            row_offsets,
            degenerate,
            prefix,
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn prefix(&self) -> Option<&PrefixSums> {
        self.prefix.as_ref()
    }

    #[inline]
    fn index(&self, p: TrianglePoint) -> usize {
        self.row_offsets[p.h - self.spec.delta] + (p.t - p.h)
    }

    pub fn get(&self, p: TrianglePoint) -> Option<f64> {
        self.spec.contains(p).then(|| self.values[self.index(p)])
    }

    /// Whether the variance denominator vanished at `p` (value forced to 0).
    pub fn is_degenerate(&self, p: TrianglePoint) -> bool {
        self.spec.contains(p) && self.degenerate[self.index(p)]
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|&&d| d).count()
    }

    /// Values on row `h`, for `t = h ..= T - h`.
    pub fn row(&self, h: usize) -> &[f64] {
        let r = h - self.spec.delta;
        &self.values[self.row_offsets[r]..self.row_offsets[r + 1]]
    }

    pub fn iter(&self) -> impl Iterator<Item = (TrianglePoint, f64)> + '_ {
        self.spec.points().zip(self.values.iter().copied())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Writes `t\th\tvalue` rows with a header line.
    pub fn write_tsv<W: Write>(&self, out: W) -> Result<()> {
        write_field_tsv(self, out)
    }
}

impl Field for MosumField {
    fn spec(&self) -> &TriangleSpec {
        &self.spec
    }

    #[inline]
    fn value(&self, p: TrianglePoint) -> f64 {
        self.values[self.index(p)]
    }
}

/// Writes any field as `t\th\tvalue` rows.
pub fn write_field_tsv<F: Field + ?Sized, W: Write>(field: &F, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(out);
    w.write_record(["t", "h", "value"])?;
    for p in field.spec().points() {
        w.write_record([p.t.to_string(), p.h.to_string(), field.value(p).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Dense empirical field with a memory guard on `T`.
pub fn compute_field(values: &[f64], spec: TriangleSpec) -> Result<MosumField> {
    compute_field_capped(values, spec, DEFAULT_MAX_HORIZON)
}

pub fn compute_field_capped(values: &[f64], spec: TriangleSpec, max_horizon: usize) -> Result<MosumField> {
    if spec.horizon > max_horizon {
        return Err(MscpError::config(format!(
            "T = {} exceeds the dense field cap of {max_horizon}",
            spec.horizon
        )));
    }
    let stat = MosumStatistic::new(values, spec)?;
    let rows: Vec<Vec<(f64, bool)>> = (spec.delta..=spec.h_max())
        .into_par_iter()
        .map(|h| {
            spec.t_range(h)
                .map(|t| stat.eval(TrianglePoint { t, h }))
                .collect()
        })
        .collect();
    Ok(MosumField::from_rows(
        spec,
        FieldKind::Empirical,
        rows,
        Some(stat.prefix),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn hand_computed_statistic() {
        let p = PrefixSums::new(&[0.0, 2.0, 1.0, 3.0]).unwrap();
        assert_eq!(mosum_at(&p, 2, 2).unwrap(), 1.0);
        assert!(mosum_at(&p, 3, 2).is_err());
    }

    #[test]
    fn constant_series_is_zero_everywhere() {
        let spec = TriangleSpec::new(60, 3).unwrap();
        let f = compute_field(&[4.25; 60], spec).unwrap();
        assert!(f.iter().all(|(_, v)| v == 0.0));
        assert_eq!(f.degenerate_count(), spec.len());
    }

    #[test]
    fn dense_equals_pointwise() {
        let mut rng = SeededRng::new(8);
        let xs: Vec<f64> = (0..57).map(|_| rng.standard_normal()).collect();
        let spec = TriangleSpec::new(57, 2).unwrap();
        let f = compute_field(&xs, spec).unwrap();
        let p = PrefixSums::new(&xs).unwrap();
        for (pt, v) in f.iter() {
            assert_eq!(v, mosum_at(&p, pt.t, pt.h).unwrap());
            assert_eq!(f.get(pt), Some(v));
        }
        assert_eq!(f.row(2).len(), 54);
        assert_eq!(f.get(TrianglePoint::new(1, 2)), None);
    }

    #[test]
    fn affine_and_sign() {
        let mut rng = SeededRng::new(21);
        let xs: Vec<f64> = (0..120).map(|_| rng.normal(1.0, 3.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 5.0 * x + 7.0).collect();
        let zs: Vec<f64> = xs.iter().map(|x| -x).collect();
        let spec = TriangleSpec::new(120, 4).unwrap();
        let fx = compute_field(&xs, spec).unwrap();
        let fy = compute_field(&ys, spec).unwrap();
        let fz = compute_field(&zs, spec).unwrap();
        for ((p, a), (_, b)) in fx.iter().zip(fy.iter()) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{p:?}");
            assert!((fz.value(p) + a).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn scaled_field_reads_stretched_windows() {
        let mut rng = SeededRng::new(4);
        let xs: Vec<f64> = (0..300).map(|_| rng.standard_normal()).collect();
        let spec = TriangleSpec::scaled(100, 5, 3).unwrap();
        let f = compute_field(&xs, spec).unwrap();
        let p = PrefixSums::new(&xs).unwrap();
        let v = f.value(TrianglePoint::new(40, 7));
        assert_eq!(v, mosum_at(&p, 120, 21).unwrap());
        assert!(compute_field(&xs[..299], spec).is_err());
    }

    #[test]
    fn memory_guard() {
        let spec = TriangleSpec::new(100, 10).unwrap();
        assert!(compute_field_capped(&[0.0; 100], spec, 99).is_err());
    }

    #[test]
    fn tsv_layout() {
        let spec = TriangleSpec::new(6, 3).unwrap();
        let f = compute_field(&[0.0, 2.0, 1.0, 3.0, 5.0, 4.0], spec).unwrap();
        let mut buf = Vec::new();
        f.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t\th\tvalue"));
        assert!(lines.next().unwrap().starts_with("3\t3\t"));
        assert_eq!(lines.next(), None);
    }
}
