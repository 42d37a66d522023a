// SPDX-License-Identifier: MIT OR Apache-2.0

//! Piecewise i.i.d. sequences with changes in expectation.
//!
//! A [`Scenario`] describes change points on `1..T` and one [`SegmentSpec`]
//! per section. [`generate`] realizes it at scale `n`: every section is
//! stretched `n`-fold, so the series has `n * T` values and true change
//! points `n * c_u`.

use crate::error::{MscpError, Result};
use crate::rng::SeededRng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Distribution family of one section.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Normal,
    /// Shape-rate gamma matched to `(mu, sigma)`: shape = mu^2/sigma^2, rate = mu/sigma^2.
    Gamma,
    /// Poisson(mu); `sigma` is ignored.
    Poisson,
    /// Binomial(10, mu/10); `sigma` is ignored.
    Binomial10,
}

impl Family {
    /// Whether the variance is implied by the mean.
    pub fn variance_implied(self) -> bool {
        matches!(self, Family::Poisson | Family::Binomial10)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    /// Section length in units of the unscaled horizon. Derived from the
    /// change points when a scenario is built; may be omitted in files.
    #[serde(default)]
    pub length: usize,
    pub family: Family,
    pub mu: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

fn default_sigma() -> f64 {
    1.0
}

impl SegmentSpec {
    pub fn new(family: Family, mu: f64, sigma: f64) -> Self {
        Self {
            length: 0,
            family,
            mu,
            sigma,
        }
    }

    /// Realized mean.
    pub fn mean(&self) -> f64 {
        self.mu
    }

    /// Realized variance.
    pub fn variance(&self) -> f64 {
        match self.family {
            Family::Normal | Family::Gamma => self.sigma * self.sigma,
            Family::Poisson => self.mu,
            Family::Binomial10 => {
                let p = self.mu / 10.0;
                10.0 * p * (1.0 - p)
            }
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let fail = |why: &str| {
            Err(MscpError::parameter(format!(
                "segment {} ({:?}, mu={}, sigma={}): {why}",
                index + 1,
                self.family,
                self.mu,
                self.sigma
            )))
        };
        if self.length == 0 {
            return fail("length must be at least 1");
        }
        if !self.mu.is_finite() {
            return fail("mu must be finite");
        }
        if !self.family.variance_implied() && !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return fail("sigma must be positive");
        }
        match self.family {
            Family::Normal => Ok(()),
            Family::Gamma | Family::Poisson if self.mu <= 0.0 => fail("mu must be positive"),
            Family::Binomial10 if !(self.mu > 0.0 && self.mu < 10.0) => {
                fail("mu must lie in (0, 10)")
            }
            _ => Ok(()),
        }
    }

    fn sample(&self, rng: &mut SeededRng) -> f64 {
        match self.family {
            Family::Normal => rng.normal(self.mu, self.sigma),
            Family::Gamma => {
                let var = self.sigma * self.sigma;
                rng.gamma(self.mu * self.mu / var, self.mu / var)
            }
            Family::Poisson => rng.poisson(self.mu),
            Family::Binomial10 => rng.binomial(10, self.mu / 10.0),
        }
    }
}

/// Change set and per-section laws on the horizon `1..=T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile")]
pub struct Scenario {
    pub label: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub change_points: Vec<usize>,
    pub segments: Vec<SegmentSpec>,
}

#[derive(Deserialize)]
struct ScenarioFile {
    label: String,
    #[serde(rename = "T")]
    horizon: usize,
    change_points: Vec<usize>,
    segments: Vec<SegmentSpec>,
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = MscpError;

    fn try_from(file: ScenarioFile) -> Result<Self> {
        Scenario::new(file.label, file.horizon, file.change_points, file.segments)
    }
}

impl Scenario {
    /// Builds a scenario, deriving section lengths from the change points.
    ///
    /// Lengths already present on `segments` must agree with the derived ones.
    pub fn new(
        label: impl Into<String>,
        horizon: usize,
        change_points: Vec<usize>,
        mut segments: Vec<SegmentSpec>,
    ) -> Result<Self> {
        let label = label.into();
        if horizon < 2 {
            return Err(MscpError::parameter(format!(
                "scenario {label}: T must be at least 2, got {horizon}"
            )));
        }
        if segments.len() != change_points.len() + 1 {
            return Err(MscpError::parameter(format!(
                "scenario {label}: {} change points need {} segments, got {}",
                change_points.len(),
                change_points.len() + 1,
                segments.len()
            )));
        }
        let mut last = 0usize;
        for (i, &c) in change_points.iter().enumerate() {
            if c == 0 || c >= horizon || c <= last && i > 0 {
                return Err(MscpError::parameter(format!(
                    "scenario {label}: change points must be strictly increasing in 1..{horizon}, got {change_points:?}"
                )));
            }
            last = c;
        }
        let bounds = section_bounds(&change_points, horizon);
        for (i, (segment, (lo, hi))) in segments.iter_mut().zip(bounds).enumerate() {
            let derived = hi - lo;
            if segment.length != 0 && segment.length != derived {
                return Err(MscpError::parameter(format!(
                    "scenario {label}: segment {} declares length {} but the change points imply {derived}",
                    i + 1,
                    segment.length
                )));
            }
            segment.length = derived;
            segment.validate(i)?;
        }
        Ok(Self {
            label,
            horizon,
            change_points,
            segments,
        })
    }

    /// Minimal distance of adjacent change points including the borders 0 and T.
    pub fn min_spacing(&self) -> usize {
        section_bounds(&self.change_points, self.horizon)
            .map(|(lo, hi)| hi - lo)
            .min()
            .unwrap_or(self.horizon)
    }

    pub fn means(&self) -> Vec<f64> {
        self.segments.iter().map(SegmentSpec::mean).collect()
    }

    pub fn variances(&self) -> Vec<f64> {
        self.segments.iter().map(SegmentSpec::variance).collect()
    }

    /// Same change set with families assigned by `variant`.
    pub fn with_variant(&self, variant: Variant) -> Result<Self> {
        let segments = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| SegmentSpec {
                length: s.length,
                family: variant.family_for(i),
                mu: s.mu,
                sigma: s.sigma,
            })
            .collect();
        Scenario::new(
            self.label.clone(),
            self.horizon,
            self.change_points.clone(),
            segments,
        )
    }
}

/// `(c_{u-1}, c_u)` pairs with `c_0 = 0` and `c_{|C|+1} = T`.
fn section_bounds(change_points: &[usize], horizon: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    let starts = std::iter::once(0).chain(change_points.iter().copied());
    let ends = change_points.iter().copied().chain(std::iter::once(horizon));
    starts.zip(ends)
}

/// Distribution variants crossed with every tabulated scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Normal,
    Gamma,
    Poisson,
    Binomial,
    /// Sections cycle through normal, gamma, Poisson, binomial, normal, gamma.
    Mix,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Normal,
        Variant::Gamma,
        Variant::Poisson,
        Variant::Binomial,
        Variant::Mix,
    ];

    pub fn family_for(self, section: usize) -> Family {
        const MIX: [Family; 4] = [
            Family::Normal,
            Family::Gamma,
            Family::Poisson,
            Family::Binomial10,
        ];
        match self {
            Variant::Normal => Family::Normal,
            Variant::Gamma => Family::Gamma,
            Variant::Poisson => Family::Poisson,
            Variant::Binomial => Family::Binomial10,
            Variant::Mix => MIX[section % MIX.len()],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Normal => "normal",
            Variant::Gamma => "gamma",
            Variant::Poisson => "poisson",
            Variant::Binomial => "binomial",
            Variant::Mix => "mix",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = MscpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "a" => Ok(Variant::Normal),
            "gamma" | "b" => Ok(Variant::Gamma),
            "poisson" | "c" => Ok(Variant::Poisson),
            "binomial" | "d" => Ok(Variant::Binomial),
            "mix" | "e" => Ok(Variant::Mix),
            other => Err(MscpError::parameter(format!("unknown distribution variant '{other}'"))),
        }
    }
}

/// Observed sequence with optional ground truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change_points: Option<Vec<usize>>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            change_points: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Draws one realization of `scenario` stretched by `n`.
pub fn generate(scenario: &Scenario, n: usize, rng: &mut SeededRng) -> Result<Series> {
    if n == 0 {
        return Err(MscpError::parameter("scale factor n must be at least 1"));
    }
    for (i, segment) in scenario.segments.iter().enumerate() {
        segment.validate(i)?;
    }
    let mut values = Vec::with_capacity(n * scenario.horizon);
    for segment in &scenario.segments {
        for _ in 0..n * segment.length {
            values.push(segment.sample(rng));
        }
    }
    Ok(Series {
        values,
        change_points: Some(scenario.change_points.iter().map(|c| n * c).collect()),
    })
}

const TABLE_HORIZON: usize = 1000;
const SPACING_200: [usize; 5] = [100, 300, 500, 700, 900];
const SPACING_100: [usize; 5] = [300, 400, 500, 600, 700];
const MULTISCALE: [usize; 5] = [200, 500, 550, 600, 750];
const MU_A: [f64; 6] = [1.0, 4.0, 1.0, 8.0, 1.0, 4.0];
const MU_HALF: [f64; 6] = [0.5, 2.0, 0.5, 4.0, 0.5, 2.0];
const MU_STAIR: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 4.0, 2.0];
const SIGMA_ONE: [f64; 6] = [1.0; 6];
const SIGMA_ALT: [f64; 6] = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0];

/// The eleven tabulated simulation scenarios (T = 1000, five changes), all normal.
pub fn standard_scenarios() -> Vec<Scenario> {
    let rows: [(&str, &[usize; 5], &[f64; 6], &[f64; 6]); 11] = [
        ("1a", &SPACING_200, &MU_A, &SIGMA_ONE),
        ("1b", &SPACING_200, &MU_A, &SIGMA_ALT),
        ("1c", &SPACING_200, &MU_HALF, &SIGMA_ONE),
        ("2a", &SPACING_100, &MU_A, &SIGMA_ONE),
        ("2b", &SPACING_100, &MU_A, &SIGMA_ALT),
        ("2c", &SPACING_100, &MU_HALF, &SIGMA_ONE),
        ("3a", &MULTISCALE, &MU_A, &SIGMA_ONE),
        ("3b", &MULTISCALE, &MU_A, &SIGMA_ALT),
        ("3c", &MULTISCALE, &MU_HALF, &SIGMA_ONE),
        ("3d", &MULTISCALE, &MU_HALF, &SIGMA_ALT),
        ("3e", &MULTISCALE, &MU_STAIR, &SIGMA_ONE),
    ];
    rows.iter()
        .map(|(label, cps, mus, sigmas)| {
            let segments = mus
                .iter()
                .zip(sigmas.iter())
                .map(|(&mu, &sigma)| SegmentSpec::new(Family::Normal, mu, sigma))
                .collect();
            Scenario::new(*label, TABLE_HORIZON, cps.to_vec(), segments)
                .expect("tabulated scenarios are valid")
        })
        .collect()
}

/// Small normal example: `T = 200`, changes at 65, 105 and 145.
pub fn demo_scenario() -> Scenario {
    let segments = [(1.0, 1.0), (4.0, 0.8), (1.0, 1.0), (-2.0, 0.5)]
        .into_iter()
        .map(|(mu, sigma)| SegmentSpec::new(Family::Normal, mu, sigma))
        .collect();
    Scenario::new("demo".to_string(), 200, vec![65, 105, 145], segments).expect("demo scenario is valid")
}

/// Looks up a tabulated scenario by label, e.g. `"3e"`, or `"demo"`.
pub fn standard_scenario(label: &str) -> Result<Scenario> {
    standard_scenarios()
        .into_iter()
        .chain(std::iter::once(demo_scenario()))
        .find(|s| s.label.eq_ignore_ascii_case(label))
        .ok_or_else(|| MscpError::parameter(format!("unknown scenario label '{label}'")))
}

/// Every tabulated scenario crossed with every distribution variant.
pub fn standard_grid() -> Vec<(Variant, Scenario)> {
    standard_scenarios()
        .iter()
        .flat_map(|s| {
            Variant::ALL
                .iter()
                .map(move |&v| (v, s.with_variant(v).expect("tabulated means fit every family")))
        })
        .collect()
}

/// Laws used for the no-change (level) study.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum NullLaw {
    Normal { mean: f64, sd: f64 },
    Poisson { lambda: f64 },
    Exponential { rate: f64 },
    Binomial { trials: u32, p: f64 },
    /// Shape-rate parameterization.
    Gamma { shape: f64, rate: f64 },
}

impl NullLaw {
    /// N(0,1), Pois(1), exp(1), b(10,1/2), gamma(0.5,2), gamma(2,2).
    pub fn level_study() -> [(&'static str, NullLaw); 6] {
        [
            ("N01", NullLaw::Normal { mean: 0.0, sd: 1.0 }),
            ("Pois1", NullLaw::Poisson { lambda: 1.0 }),
            ("exp1", NullLaw::Exponential { rate: 1.0 }),
            ("b10_0.5", NullLaw::Binomial { trials: 10, p: 0.5 }),
            ("gamma0.5_2", NullLaw::Gamma { shape: 0.5, rate: 2.0 }),
            ("gamma2_2", NullLaw::Gamma { shape: 2.0, rate: 2.0 }),
        ]
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            NullLaw::Normal { mean, sd } => mean.is_finite() && sd > 0.0,
            NullLaw::Poisson { lambda } => lambda > 0.0,
            NullLaw::Exponential { rate } => rate > 0.0,
            NullLaw::Binomial { trials, p } => trials > 0 && (0.0..=1.0).contains(&p),
            NullLaw::Gamma { shape, rate } => shape > 0.0 && rate > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(MscpError::parameter(format!("invalid null law parameters {self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            NullLaw::Normal { mean, .. } => mean,
            NullLaw::Poisson { lambda } => lambda,
            NullLaw::Exponential { rate } => 1.0 / rate,
            NullLaw::Binomial { trials, p } => trials as f64 * p,
            NullLaw::Gamma { shape, rate } => shape / rate,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            NullLaw::Normal { sd, .. } => sd * sd,
            NullLaw::Poisson { lambda } => lambda,
            NullLaw::Exponential { rate } => 1.0 / (rate * rate),
            NullLaw::Binomial { trials, p } => trials as f64 * p * (1.0 - p),
            NullLaw::Gamma { shape, rate } => shape / (rate * rate),
        }
    }

    pub fn sample(&self, rng: &mut SeededRng) -> f64 {
        match *self {
            NullLaw::Normal { mean, sd } => rng.normal(mean, sd),
            NullLaw::Poisson { lambda } => rng.poisson(lambda),
            NullLaw::Exponential { rate } => rng.exponential(rate),
            NullLaw::Binomial { trials, p } => rng.binomial(trials, p),
            NullLaw::Gamma { shape, rate } => rng.gamma(shape, rate),
        }
    }
}

impl FromStr for NullLaw {
    type Err = MscpError;

    /// Accepts the level-study names (`N01`, `Pois1`, `exp1`, `b10_0.5`,
    /// `gamma0.5_2`, `gamma2_2`), case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        NullLaw::level_study()
            .into_iter()
            .find(|(name, _)| name.eq_ignore_ascii_case(s))
            .map(|(_, law)| law)
            .ok_or_else(|| MscpError::parameter(format!("unknown null family '{s}'")))
    }
}

/// i.i.d. series of length `horizon` without changes.
pub fn null_series(law: NullLaw, horizon: usize, rng: &mut SeededRng) -> Result<Series> {
    if horizon < 2 {
        return Err(MscpError::parameter(format!(
            "null series needs T >= 2, got {horizon}"
        )));
    }
    law.validate()?;
    Ok(Series {
        values: (0..horizon).map(|_| law.sample(rng)).collect(),
        change_points: Some(Vec::new()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_moments(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn scenario_1a_has_five_changes() {
        let s = standard_scenario("1a").unwrap();
        let series = generate(&s, 1, &mut SeededRng::new(1)).unwrap();
        assert_eq!(series.len(), 1000);
        assert_eq!(series.change_points.as_deref(), Some(&[100, 300, 500, 700, 900][..]));
        assert_eq!(s.min_spacing(), 100);
    }

    #[test]
    fn single_segment_has_no_changes() {
        let s = Scenario::new("flat", 50, vec![], vec![SegmentSpec::new(Family::Normal, 0.0, 1.0)])
            .unwrap();
        let series = generate(&s, 1, &mut SeededRng::new(3)).unwrap();
        assert_eq!(series.len(), 50);
        assert_eq!(series.change_points, Some(vec![]));
    }

    #[test]
    fn table_lookups() {
        let e = standard_scenario("3e").unwrap();
        assert_eq!(e.change_points, vec![200, 500, 550, 600, 750]);
        assert_eq!(e.means(), vec![1.0, 2.0, 4.0, 8.0, 4.0, 2.0]);
        assert!(e.segments.iter().all(|s| s.sigma == 1.0));
        let b = standard_scenario("1b").unwrap();
        let sigmas: Vec<f64> = b.segments.iter().map(|s| s.sigma).collect();
        assert_eq!(sigmas, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        assert_eq!(standard_scenarios().len(), 11);
        assert_eq!(standard_grid().len(), 55);
        assert!(standard_scenario("9z").is_err());
    }

    #[test]
    fn mix_variant_cycles_families() {
        let mix = standard_scenario("2a").unwrap().with_variant(Variant::Mix).unwrap();
        let families: Vec<Family> = mix.segments.iter().map(|s| s.family).collect();
        assert_eq!(
            families,
            vec![
                Family::Normal,
                Family::Gamma,
                Family::Poisson,
                Family::Binomial10,
                Family::Normal,
                Family::Gamma
            ]
        );
        // sigma is implied for the count sections
        assert_eq!(mix.variances()[2], 1.0);
        assert!((mix.variances()[3] - 10.0 * 0.8 * 0.2).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters_name_the_segment() {
        let err = Scenario::new(
            "bad",
            10,
            vec![5],
            vec![
                SegmentSpec::new(Family::Normal, 0.0, 1.0),
                SegmentSpec::new(Family::Poisson, -1.0, 1.0),
            ],
        )
        .unwrap_err();
        assert!(err.to_string().contains("segment 2"), "{err}");
        assert!(Scenario::new("b", 10, vec![5, 5], vec![SegmentSpec::new(Family::Normal, 0.0, 1.0); 3]).is_err());
        assert!(Scenario::new("b", 10, vec![10], vec![SegmentSpec::new(Family::Normal, 0.0, 1.0); 2]).is_err());
        let binom = SegmentSpec { length: 3, ..SegmentSpec::new(Family::Binomial10, 10.0, 1.0) };
        assert!(binom.validate(0).is_err());
    }

    #[test]
    fn gamma_moment_mapping() {
        let s = Scenario::new("g", 1_000_000, vec![], vec![SegmentSpec::new(Family::Gamma, 2.0, 1.0)])
            .unwrap();
        let series = generate(&s, 1, &mut SeededRng::new(11)).unwrap();
        let (mean, var) = sample_moments(&series.values);
        assert!((mean - 2.0).abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn every_family_matches_its_moments() {
        let cases = [
            SegmentSpec::new(Family::Normal, -3.0, 2.0),
            SegmentSpec::new(Family::Gamma, 0.5, 2.0),
            SegmentSpec::new(Family::Poisson, 8.0, 0.0),
            SegmentSpec::new(Family::Binomial10, 4.0, 0.0),
        ];
        for (k, spec) in cases.into_iter().enumerate() {
            let s = Scenario::new("m", 1_000_000, vec![], vec![spec]).unwrap();
            let series = generate(&s, 1, &mut SeededRng::new(100 + k as u64)).unwrap();
            let (mean, var) = sample_moments(&series.values);
            let n = series.len() as f64;
            let seg = &s.segments[0];
            let se_mean = (seg.variance() / n).sqrt();
            assert!((mean - seg.mean()).abs() < 5.0 * se_mean, "{:?}: {mean}", seg.family);
            // fourth central moments are bounded by ~40 sigma^4 for these laws
            let se_var = (40.0 * seg.variance().powi(2) / n).sqrt();
            assert!((var - seg.variance()).abs() < 5.0 * se_var, "{:?}: {var}", seg.family);
        }
    }

    #[test]
    fn null_laws() {
        let mut rng = SeededRng::new(2);
        let s = null_series(NullLaw::Normal { mean: 0.0, sd: 1.0 }, 1000, &mut rng).unwrap();
        assert_eq!(s.len(), 1000);
        assert_eq!(s.change_points, Some(vec![]));
        assert_eq!(null_series("exp1".parse().unwrap(), 2, &mut rng).unwrap().len(), 2);
        assert!(null_series("exp1".parse().unwrap(), 1, &mut rng).is_err());
        assert!("cauchy".parse::<NullLaw>().is_err());
        let g: NullLaw = "gamma2_2".parse().unwrap();
        let draws = null_series(g, 1_000_000, &mut SeededRng::new(4)).unwrap();
        let (mean, _) = sample_moments(&draws.values);
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn determinism_and_scaling() {
        let s = standard_scenario("3a").unwrap();
        let a = generate(&s, 2, &mut SeededRng::new(9)).unwrap();
        let b = generate(&s, 2, &mut SeededRng::new(9)).unwrap();
        let c = generate(&s, 2, &mut SeededRng::new(10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
        assert_eq!(a.len(), 2000);
        assert_eq!(a.change_points.as_deref(), Some(&[400, 1000, 1100, 1200, 1500][..]));
    }

    #[test]
    fn scenario_json_derives_lengths() {
        let json = r#"{"label":"x","T":100,"change_points":[40],
            "segments":[{"family":"normal","mu":0,"sigma":1},{"family":"poisson","mu":3}]}"#;
        let s: Scenario = serde_json::from_str(json).unwrap();
        assert_eq!(s.segments[0].length, 40);
        assert_eq!(s.segments[1].length, 60);
        let back: Scenario = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"label":"x","T":100,"change_points":[40],
            "segments":[{"length":10,"family":"normal","mu":0,"sigma":1},{"family":"normal","mu":3}]}"#;
        assert!(serde_json::from_str::<Scenario>(bad).is_err());
    }
}
