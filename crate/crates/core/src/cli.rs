// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end: argument model, CSV ingestion and subcommands.

use crate::bench::{benchmark, write_csv, write_json};
use crate::calibrate::{KappaCache, KappaKey, DEFAULT_REPLICATES};
use crate::detector::{detect, DetectionReport, DetectorConfig, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_DELTA};
use crate::error::{MscpError, Result};
use crate::field::{centering_field, write_field_tsv, ChangeModel, Geometry, MosumStatistic, TriangleSpec};
use crate::rng::SeededRng;
use crate::synth::{generate, null_series, standard_grid, standard_scenario, standard_scenarios, NullLaw, Scenario, Variant};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "mscp", version, about = "Multiscale change-point detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect change points in a CSV series.
    Detect(DetectArgs),
    /// Generate a series from a scenario or a null law.
    Simulate(SimulateArgs),
    /// Calibrate the breaking threshold kappa.
    Calibrate(CalibrateArgs),
    /// Replicated benchmark over tabulated scenarios.
    Bench(BenchArgs),
    /// Export the tabulated scenarios as JSON.
    Scenarios(ScenariosArgs),
    /// Export the centering field and region geometry of a scenario.
    Field(FieldArgs),
}

/// Threshold selection shared by `detect` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// Level for the calibrated threshold.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Use this threshold and skip calibration.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub calib_reps: usize,
    #[arg(long, default_value_t = 0)]
    pub calib_seed: u64,
    /// Cache directory (default: $MSCP_CACHE_DIR or .mscp-cache).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

impl ThresholdArgs {
    fn cache(&self) -> KappaCache {
        match &self.cache_dir {
            Some(dir) => KappaCache::new(dir.join("kappa.json")),
            None => KappaCache::from_env(),
        }
    }

    /// `(kappa, alpha)`; alpha is `None` when kappa was given directly.
    pub fn resolve(&self, horizon: usize, delta: usize) -> Result<(f64, Option<f64>)> {
        if let Some(kappa) = self.kappa {
            return Ok((kappa, None));
        }
        let cache = self.cache();
        let (record, hit) = cache.get_or_calibrate(KappaKey {
            horizon,
            delta,
            alpha: self.alpha,
            replicates: self.calib_reps,
            seed: self.calib_seed,
        })?;
        log::info!(
            "kappa = {:.4} (se {:.4}) for T = {horizon}, delta = {delta}, alpha = {} [{}]",
            record.kappa,
            record.standard_error,
            self.alpha,
            if hit { "cached" } else { "calibrated" }
        );
        Ok((record.kappa, Some(self.alpha)))
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// CSV with one value per line, or `index,value` rows.
    pub input: PathBuf,
    #[arg(long, default_value = "mscp-out")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: usize,
    /// Grid mesh (default: delta).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Known minimal spacing; enables the spacing break rule.
    #[arg(long)]
    pub delta_c: Option<usize>,
    /// Scale factor n; the series length must be a multiple of it.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    pub beta: f64,
    /// Skip the field heatmap TSV.
    #[arg(long)]
    pub no_field: bool,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario label such as `1a`.
    pub label: Option<String>,
    /// Scenario JSON file instead of a label.
    #[arg(long, conflicts_with_all = ["label", "null"])]
    pub scenario_file: Option<PathBuf>,
    /// Null family (`N01`, `Pois1`, `exp1`, `b10_0.5`, `gamma0.5_2`, `gamma2_2`).
    #[arg(long, conflicts_with = "label")]
    pub null: Option<String>,
    #[arg(long, default_value = "normal")]
    pub dist: Variant,
    /// Length of a null series.
    #[arg(long = "T", default_value_t = 1000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "series.csv")]
    pub out: PathBuf,
    #[arg(long, default_value = "truth.json")]
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long = "T")]
    pub horizon: usize,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Scenario labels (default: all).
    #[arg(long)]
    pub scenario: Vec<String>,
    /// Distribution variants (default: all).
    #[arg(long)]
    pub dist: Vec<Variant>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: usize,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    pub beta: f64,
    /// Metrics CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
}

#[derive(Debug, Args)]
pub struct ScenariosArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    pub label: String,
    #[arg(long, default_value = "normal")]
    pub dist: Variant,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: usize,
    #[arg(long, default_value = "centering.tsv")]
    pub out: PathBuf,
    /// Region lists as JSON.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
}

/// Provenance record written next to every set of outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub config: serde_json::Value,
    pub version: String,
    pub seed: u64,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
}

struct Clock {
    started: Instant,
    unix: u64,
}

impl Clock {
    fn start() -> Self {
        Self {
            started: Instant::now(),
            unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    fn manifest(&self, subcommand: &str, inputs: &[&Path], outputs: &[&Path], config: serde_json::Value, seed: u64) -> RunManifest {
        let show = |p: &&Path| p.display().to_string();
        RunManifest {
            subcommand: subcommand.to_string(),
            inputs: inputs.iter().map(show).collect(),
            outputs: outputs.iter().map(show).collect(),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            started_unix: self.unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// Parses a series: one value per line, or several columns of which the
/// last is the value. A non-numeric first line is taken as a header; any
/// other non-numeric line is an error. Index columns are ignored and values
/// are kept in file order.
pub fn parse_series<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut values = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let Some(field) = record.iter().next_back().filter(|f| !f.is_empty()) else {
            if record.iter().all(str::is_empty) {
                continue;
            }
            return Err(MscpError::Parse {
                line,
                message: "missing value".into(),
            });
        };
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(MscpError::Parse {
                    line,
                    message: format!("non-finite value {v}"),
                })
            }
            Err(_) if first => {}
            Err(_) => {
                return Err(MscpError::Parse {
                    line,
                    message: format!("'{field}' is not a number"),
                })
            }
        }
        first = false;
    }
    if values.is_empty() {
        return Err(MscpError::Parse {
            line: 0,
            message: "input contains no values".into(),
        });
    }
    Ok(values)
}

pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    parse_series(File::open(path)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Report JSON without the manifest reference; identical for identical
/// detector input.
pub fn report_body(report: &DetectionReport) -> Result<String> {
    let mut body = report.clone();
    body.manifest = None;
    Ok(serde_json::to_string_pretty(&body)?)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Detect(args) => cmd_detect(&args).map(|_| ()),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Calibrate(args) => cmd_calibrate(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Scenarios(args) => cmd_scenarios(&args),
        Command::Field(args) => cmd_field(&args),
    }
}

/// Writes `report.json`, `segments.tsv`, `paths.tsv`, `field.tsv` and
/// `manifest.json` into the output directory.
pub fn cmd_detect(args: &DetectArgs) -> Result<DetectionReport> {
    let clock = Clock::start();
    let values = read_series(&args.input)?;
    let mut config = DetectorConfig::new(1.0)
        .with_delta(args.delta)
        .with_seed(args.seed)
        .with_scale(args.n, args.beta);
    if let Some(g) = args.grid {
        config = config.with_grid(g);
    }
    config.delta_c_hint = args.delta_c;
    let spec = config.triangle(values.len())?;
    let (kappa, alpha) = args.threshold.resolve(spec.horizon, spec.delta)?;
    config.kappa = kappa;
    config.alpha = alpha;

    let mut report = detect(&values, &config)?;
    report.check(values.len())?;
    report.manifest = Some(MANIFEST_FILE.to_string());

    let dir = &args.out_dir;
    std::fs::create_dir_all(dir)?;
    let report_path = dir.join("report.json");
    let segments_path = dir.join("segments.tsv");
    let paths_path = dir.join("paths.tsv");
    let field_path = dir.join("field.tsv");
    write_json_file(&report_path, &report)?;
    write_segments(&segments_path, &report)?;
    write_paths(&paths_path, &report)?;
    let mut outputs = vec![report_path.as_path(), segments_path.as_path(), paths_path.as_path()];
    if !args.no_field {
        let mut out = create(&field_path)?;
        writeln!(out, "# manifest: {MANIFEST_FILE}")?;
        write_field_tsv(&MosumStatistic::new(&values, spec)?, &mut out)?;
        out.flush()?;
        outputs.push(field_path.as_path());
    }
    let manifest = clock.manifest(
        "detect",
        &[args.input.as_path()],
        &outputs,
        serde_json::to_value(&report.config)?,
        args.seed,
    );
    write_json_file(&dir.join(MANIFEST_FILE), &manifest)?;
    println!("{}", serde_json::to_string(&report.change_points)?);
    Ok(report)
}

fn tsv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let mut out = create(path)?;
    writeln!(out, "# manifest: {MANIFEST_FILE}")?;
    Ok(csv::WriterBuilder::new().delimiter(b'\t').from_writer(out))
}

fn write_segments(path: &Path, report: &DetectionReport) -> Result<()> {
    let mut w = tsv_writer(path)?;
    w.write_record(["start", "end", "mean", "sd"])?;
    for s in &report.segments {
        w.write_record([
            s.start.to_string(),
            s.end.to_string(),
            s.mean.to_string(),
            s.var.sqrt().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_paths(path: &Path, report: &DetectionReport) -> Result<()> {
    let mut w = tsv_writer(path)?;
    w.write_record(["path", "disposition", "k", "t", "h", "value"])?;
    for (i, record) in report.paths.iter().enumerate() {
        let disposition = serde_json::to_value(record.disposition)?;
        let disposition = disposition.as_str().unwrap_or_default().to_string();
        for (k, (p, v)) in record.path.points().zip(&record.path.stat_values).enumerate() {
            w.write_record([
                i.to_string(),
                disposition.clone(),
                k.to_string(),
                p.t.to_string(),
                p.h.to_string(),
                v.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Truth<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<&'a Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    null: Option<&'a str>,
    n: usize,
    seed: u64,
    /// Change points in observation units (`n * c`).
    change_points: Vec<usize>,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let clock = Clock::start();
    let mut rng = SeededRng::new(args.seed);
    let (series, scenario, null) = if let Some(name) = &args.null {
        let law: NullLaw = name.parse()?;
        (null_series(law, args.horizon * args.n, &mut rng)?, None, Some(name.as_str()))
    } else {
        let scenario = match (&args.label, &args.scenario_file) {
            (_, Some(path)) => serde_json::from_reader::<_, Scenario>(File::open(path)?)?,
            (Some(label), None) => standard_scenario(label)?.with_variant(args.dist)?,
            (None, None) => return Err(MscpError::config("give a scenario label, --scenario-file or --null")),
        };
        (generate(&scenario, args.n, &mut rng)?, Some(scenario), None)
    };
    let mut out = create(&args.out)?;
    writeln!(out, "value")?;
    for v in &series.values {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    let truth = Truth {
        scenario: scenario.as_ref(),
        null,
        n: args.n,
        seed: args.seed,
        change_points: series.change_points.clone().unwrap_or_default(),
    };
    write_json_file(&args.truth, &truth)?;
    let manifest = clock.manifest(
        "simulate",
        &args.scenario_file.iter().map(PathBuf::as_path).collect::<Vec<_>>(),
        &[args.out.as_path(), args.truth.as_path()],
        serde_json::json!({
            "label": args.label, "null": args.null, "dist": args.dist,
            "T": args.horizon, "n": args.n,
        }),
        args.seed,
    );
    let manifest_path = args.truth.with_file_name("simulate.manifest.json");
    write_json_file(&manifest_path, &manifest)
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> Result<()> {
    let cache = match &args.cache_dir {
        Some(dir) => KappaCache::new(dir.join("kappa.json")),
        None => KappaCache::from_env(),
    };
    let (record, hit) = cache.get_or_calibrate(KappaKey {
        horizon: args.horizon,
        delta: args.delta,
        alpha: args.alpha,
        replicates: args.reps,
        seed: args.seed,
    })?;
    println!("{}", serde_json::to_string(&record)?);
    eprintln!(
        "kappa = {:.6} +/- {:.6} ({})",
        record.kappa,
        record.standard_error,
        if hit { "cache hit" } else { "calibrated" }
    );
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let labels: Vec<String> = args.scenario.iter().map(|s| s.to_ascii_lowercase()).collect();
    for label in &labels {
        standard_scenario(label)?;
    }
    let cases: Vec<(Variant, Scenario)> = standard_grid()
        .into_iter()
        .filter(|(v, s)| {
            (labels.is_empty() || labels.contains(&s.label.to_ascii_lowercase()))
                && (args.dist.is_empty() || args.dist.contains(v))
        })
        .collect();
    let horizon = cases.first().map_or(1000, |(_, s)| s.horizon);
    let (kappa, alpha) = args.threshold.resolve(horizon, args.delta)?;
    let mut config = DetectorConfig::new(kappa)
        .with_delta(args.delta)
        .with_scale(args.n, args.beta);
    config.alpha = alpha;
    if let Some(g) = args.grid {
        config = config.with_grid(g);
    }
    let rows = benchmark(&cases, args.reps, &config, args.seed)?;
    match &args.out {
        Some(path) => {
            let mut out = create(path)?;
            write_csv(&rows, &mut out)?;
            out.flush()?;
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    if let Some(path) = &args.json {
        let mut out = create(path)?;
        write_json(&rows, &mut out)?;
        out.flush()?;
    }
    Ok(())
}

pub fn cmd_scenarios(args: &ScenariosArgs) -> Result<()> {
    let scenarios = standard_scenarios();
    match &args.out {
        Some(path) => write_json_file(path, &scenarios),
        None => {
            println!("{}", serde_json::to_string_pretty(&scenarios)?);
            Ok(())
        }
    }
}

pub fn cmd_field(args: &FieldArgs) -> Result<()> {
    let scenario = standard_scenario(&args.label)?.with_variant(args.dist)?;
    let model = ChangeModel::from_scenario(&scenario);
    let spec = TriangleSpec::new(scenario.horizon, args.delta)?;
    let field = centering_field(&model, spec)?;
    let mut out = create(&args.out)?;
    field.write_tsv(&mut out)?;
    out.flush()?;
    if let Some(path) = &args.geometry {
        write_json_file(path, &Geometry::new(&scenario.change_points, spec)?.export())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_indexed() {
        assert_eq!(parse_series("1\n2.5\n-3\n".as_bytes()).unwrap(), vec![1.0, 2.5, -3.0]);
        assert_eq!(parse_series("value\n1\n2\n".as_bytes()).unwrap(), vec![1.0, 2.0]);
        assert_eq!(
            parse_series("idx,value\n3,10\n1,20\n2,30\n".as_bytes()).unwrap(),
            vec![10.0, 20.0, 30.0]
        );
    }

    #[test]
    fn parse_errors_carry_line() {
        match parse_series("1\n2\nabc\n4\n".as_bytes()) {
            Err(MscpError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_series("".as_bytes()), Err(MscpError::Parse { .. })));
        assert!(matches!(parse_series("header\n".as_bytes()), Err(MscpError::Parse { .. })));
    }

    #[test]
    fn cli_parses() {
        let cli = Cli::try_parse_from(["mscp", "detect", "x.csv", "--kappa", "3.1", "--delta", "10"]).unwrap();
        match cli.command {
            Command::Detect(a) => {
                assert_eq!(a.threshold.kappa, Some(3.1));
                assert_eq!(a.delta, 10);
                assert_eq!(a.threshold.alpha, 0.01);
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["mscp", "bench", "--dist", "nonsense"]).is_err());
    }
}
