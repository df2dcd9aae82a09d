//! Command-line front end. The `xextremes` binary is a thin wrapper around [`run`].
//!
//! Every subcommand that writes an artifact also writes a JSON manifest next
//! to it (`<output>.manifest.json`, or `--manifest`) echoing the resolved
//! configuration and the SHA-256 digests of all inputs and outputs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::embed::{deepx_metric, spate_metric, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::eval::{mmd_permutation_test, mmd_squared, moment_maps, marginal_band, ms_swd};
use crate::eval::{radial_psd, tensor_samples, KernelConfig, PyramidConfig};
use crate::grid::{GridMeta, Neighborhood};
use crate::lgcp::{empirical_dispersion, simulate_lgcp, LgcpConfig};
use crate::risk::{
    aggregate_country, analytic_dependent_risks, analytic_random_field, analytic_random_risks,
    build_thresholds, classify_hotspots, correlate_indicator, empirical_risks, persistence,
    read_indicators, CountryTable, EventUnit, IndicatorColumn, RandomProcessParams, RankMethod,
    RiskColumn, RiskField, ThresholdMap,
};
use crate::tail::{
    binomial_pmf, chi_rmse, cooccurrence_histogram, extremal_correlation, kendall_tau,
    spearman_rho, spectral_distribution, spectral_wasserstein, total_variation, ExtremalMatrix,
    DEFAULT_RADIAL_Q,
};
use crate::tensor::{load_tensor, save_tensor, EnsembleTensor};

#[derive(Parser, Debug)]
#[command(
    name = "xextremes",
    version,
    about = "Tail-dependence embeddings, diagnostics and unseen-extreme risks for gridded ensembles"
)]
pub struct Cli {
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, env = "X_EXTREMES_THREADS")]
    pub threads: Option<usize>,

    /// Where to write the run manifest (default: `<output>.manifest.json`).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate an LGCP count ensemble.
    SimulateLgcp(SimulateArgs),
    /// DeepX embedding of an ensemble (or the SPATE baseline with --baseline).
    Embed(EmbedArgs),
    /// Pairwise extremal correlation matrix.
    Chi(ChiArgs),
    /// Extremal-angle spectral sample for one pixel pair.
    Spectral(SpectralArgs),
    /// Rank correlation between two pixel series.
    Tau(TauArgs),
    /// Histogram of simultaneous threshold exceedances with a binomial baseline.
    Cooccur(CooccurArgs),
    /// Unbiased MMD^2 between two ensembles.
    Mmd(MmdArgs),
    /// Multi-scale sliced Wasserstein distance between two ensembles.
    Msswd(MsswdArgs),
    /// Radially averaged power spectrum.
    Psd(PsdArgs),
    /// Per-pixel mean, standard deviation and quantile maps.
    Moments(MomentsArgs),
    /// Record thresholds with rank-matched neighbor thresholds.
    Thresholds(ThresholdArgs),
    /// Empirical community / checkmate / stalemate probabilities.
    Risk(RiskArgs),
    /// Closed-form risks for random or fully dependent processes.
    RiskAnalytic(RiskAnalyticArgs),
    /// High-risk flags and their persistence between periods.
    Hotspots(HotspotArgs),
    /// Country means of a risk field.
    Country(CountryArgs),
    /// Rank correlation of country risks with an indicator table.
    Correlate(CorrelateArgs),
    /// Run the built-in self checks.
    Verify,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub samples: usize,
    #[arg(long, default_value_t = 10)]
    pub time: usize,
    #[arg(long, default_value_t = 16)]
    pub rows: usize,
    #[arg(long, default_value_t = 16)]
    pub cols: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gp_mean: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gp_variance: f64,
    #[arg(long, default_value_t = 3.0)]
    pub rho_s: f64,
    #[arg(long, default_value_t = 2.0)]
    pub rho_t: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct EmbedArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Precomputed extremal-correlation tensor; estimated from the input otherwise.
    #[arg(long)]
    pub chi: Option<PathBuf>,
    #[arg(long, default_value_t = 0.9)]
    pub q: f64,
    #[arg(long, default_value_t = 0.5)]
    pub theta_a: f64,
    #[arg(long, default_value_t = 0.5)]
    pub theta_b: f64,
    #[arg(long, default_value_t = 2.0)]
    pub length_scale: f64,
    #[arg(long, default_value_t = Neighborhood::Moore8)]
    pub neighborhood: Neighborhood,
    #[arg(long, default_value_t = 1e-8)]
    pub epsilon: f64,
    /// SPATE baseline: expectation from the space-time term only.
    #[arg(long)]
    pub baseline: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ChiArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0.9)]
    pub q: f64,
    /// Second ensemble; reports the RMSE between the two matrices.
    #[arg(long)]
    pub compare: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectralArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// First pixel as `row,col`.
    #[arg(long)]
    pub pixel_a: PixelArg,
    #[arg(long)]
    pub pixel_b: PixelArg,
    #[arg(long, default_value_t = DEFAULT_RADIAL_Q)]
    pub radial_q: f64,
    /// Angles as a one-column CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Second ensemble; reports the Wasserstein-1 distance between the two angle samples.
    #[arg(long)]
    pub compare: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct TauArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub pixel_a: PixelArg,
    #[arg(long)]
    pub pixel_b: PixelArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Kendall)]
    pub method: MethodArg,
}

#[derive(Args, Debug, Serialize)]
pub struct CooccurArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Threshold map JSON; per-pixel quantiles of the input at --quantile otherwise.
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    #[arg(long, default_value_t = 0.99)]
    pub quantile: f64,
    /// Exceedance probability of the binomial baseline (default: 1 - quantile).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MmdArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub other: PathBuf,
    /// Kernel sigma^2; the median heuristic otherwise.
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub permutations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct MsswdArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub other: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long, default_value_t = 64)]
    pub projections: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct PsdArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.5, 0.95])]
    pub quantiles: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Years covered by the reference record.
    #[arg(long)]
    pub record_length: usize,
    #[arg(long, default_value_t = Neighborhood::Moore8)]
    pub neighborhood: Neighborhood,
}

#[derive(Args, Debug, Serialize)]
pub struct RiskArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub thresholds: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = Neighborhood::Moore8)]
    pub neighborhood: Neighborhood,
    /// Count block maxima of this many snapshots as one trial.
    #[arg(long)]
    pub block_len: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct RiskAnalyticArgs {
    /// Exceedance probability of every cell.
    #[arg(long, conflicts_with = "record_length")]
    pub p: Option<f64>,
    /// Use p = 1 / record length.
    #[arg(long)]
    pub record_length: Option<usize>,
    /// Target probability when it differs from the neighbors'.
    #[arg(long)]
    pub p_target: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub neighbors: usize,
    #[arg(long, value_enum, default_value_t = ProcessArg::Random)]
    pub process: ProcessArg,
    /// With --rows/--cols, write the random-process field (truncated at the boundary).
    #[arg(long, requires_all = ["rows", "cols"])]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = Neighborhood::Moore8)]
    pub neighborhood: Neighborhood,
}

#[derive(Args, Debug, Serialize)]
pub struct HotspotArgs {
    /// Risk CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub record_length: usize,
    /// Baseline risk CSV; the analytic random field at p = 1 / record length otherwise.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Later-period risk CSV for persistence of community hotspots.
    #[arg(long)]
    pub future: Option<PathBuf>,
    #[arg(long, default_value_t = Neighborhood::Moore8)]
    pub neighborhood: Neighborhood,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CountryArgs {
    /// Risk CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Label CSV with columns pixel_row, pixel_col, country_id.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CorrelateArgs {
    /// Country CSV written by `country`.
    #[arg(long)]
    pub input: PathBuf,
    /// Indicator CSV with columns country_id, vulnerability, readiness.
    #[arg(long)]
    pub indicators: PathBuf,
    #[arg(long, value_enum, default_value_t = RiskArg::Community)]
    pub risk: RiskArg,
    #[arg(long, value_enum, default_value_t = IndicatorArg::Vulnerability)]
    pub indicator: IndicatorArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Kendall)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Kendall,
    Spearman,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessArg {
    Random,
    Dependent,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RiskArg {
    Community,
    Checkmate,
    Stalemate,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndicatorArg {
    Vulnerability,
    Readiness,
}

/// A pixel given as `row,col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PixelArg {
    pub row: usize,
    pub col: usize,
}

impl std::str::FromStr for PixelArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (r, c) = s
            .split_once(',')
            .ok_or_else(|| format!("expected row,col, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
        Ok(PixelArg {
            row: parse(r)?,
            col: parse(c)?,
        })
    }
}

impl PixelArg {
    fn flat(&self, t: &EnsembleTensor) -> Result<usize> {
        let s = t.shape();
        if self.row >= s.rows || self.col >= s.cols {
            return Err(Error::Shape(format!(
                "pixel ({}, {}) outside {}x{} grid",
                self.row, self.col, s.rows, s.cols
            )));
        }
        Ok(self.row * s.cols + self.col)
    }
}

/// What a subcommand produced.
#[derive(Default)]
struct Outcome {
    config: Value,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    /// Printed to stdout and recorded in the manifest.
    summary: Option<Value>,
}

impl Outcome {
    fn new(config: &impl Serialize) -> Result<Self> {
        Ok(Outcome {
            config: serde_json::to_value(config)?,
            ..Outcome::default()
        })
    }

    fn input(mut self, p: &Path) -> Self {
        self.inputs.push(p.to_path_buf());
        self
    }

    fn output(mut self, p: &Path) -> Self {
        self.outputs.push(p.to_path_buf());
        self
    }

    fn summary(mut self, v: Value) -> Self {
        self.summary = Some(v);
        self
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn digests(paths: &[PathBuf]) -> Result<Vec<Value>> {
    paths
        .iter()
        .map(|p| Ok(json!({ "path": p.display().to_string(), "sha256": sha256_file(p)? })))
        .collect()
}

fn write_manifest(command: &str, out: &Outcome, explicit: Option<&Path>) -> Result<()> {
    let path = match (explicit, out.outputs.first()) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(first)) => {
            let mut s = first.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        (None, None) => return Ok(()),
    };
    let manifest = json!({
        "tool": "xextremes",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": out.config,
        "inputs": digests(&out.inputs)?,
        "outputs": digests(&out.outputs)?,
        "summary": out.summary,
    });
    write_json(&path, &manifest)
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, v)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::SimulateLgcp(_) => "simulate-lgcp",
        Command::Embed(_) => "embed",
        Command::Chi(_) => "chi",
        Command::Spectral(_) => "spectral",
        Command::Tau(_) => "tau",
        Command::Cooccur(_) => "cooccur",
        Command::Mmd(_) => "mmd",
        Command::Msswd(_) => "msswd",
        Command::Psd(_) => "psd",
        Command::Moments(_) => "moments",
        Command::Thresholds(_) => "thresholds",
        Command::Risk(_) => "risk",
        Command::RiskAnalytic(_) => "risk-analytic",
        Command::Hotspots(_) => "hotspots",
        Command::Country(_) => "country",
        Command::Correlate(_) => "correlate",
        Command::Verify => "verify",
    }
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let cfg = LgcpConfig {
        time: a.time,
        rows: a.rows,
        cols: a.cols,
        gp_mean: a.gp_mean,
        gp_variance: a.gp_variance,
        rho_s: a.rho_s,
        rho_t: a.rho_t,
        seed: a.seed,
        n_samples: a.samples,
    };
    let t = simulate_lgcp(&cfg)?;
    save_tensor(&t, &a.output)?;
    let mut sidecar = a.output.clone().into_os_string();
    sidecar.push(".config.json");
    let sidecar = PathBuf::from(sidecar);
    write_json(&sidecar, &cfg)?;
    let dispersion = empirical_dispersion(&t).ok();
    Ok(Outcome::new(&cfg)?
        .output(&a.output)
        .output(&sidecar)
        .summary(json!({ "dispersion": dispersion })))
}

fn embed(a: &EmbedArgs) -> Result<Outcome> {
    let t = load_tensor(&a.input)?;
    let mut out = Outcome::new(a)?.input(&a.input);
    let field = if a.baseline {
        spate_metric(&t, a.length_scale, a.neighborhood, a.epsilon)?
    } else {
        let cfg = EmbeddingConfig {
            theta_a: a.theta_a,
            theta_b: a.theta_b,
            length_scale: a.length_scale,
            q: a.q,
            neighborhood: a.neighborhood,
            denominator_epsilon: a.epsilon,
        };
        cfg.validate()?;
        let chi = match &a.chi {
            Some(p) => {
                out = out.input(p);
                ExtremalMatrix::from_tensor(&load_tensor(p)?, a.q)?
            }
            None => extremal_correlation(&t, a.q)?,
        };
        deepx_metric(&t, &cfg, &chi)?
    };
    save_tensor(&field.to_tensor()?, &a.output)?;
    Ok(out.output(&a.output).summary(json!({
        "guarded_denominators": field.guarded_denominators,
        "degenerate_frames": field.degenerate_frames,
        "missing_chi_used": field.missing_chi_used,
    })))
}

fn chi(a: &ChiArgs) -> Result<Outcome> {
    let t = load_tensor(&a.input)?;
    let m = extremal_correlation(&t, a.q)?;
    let mut out = Outcome::new(a)?.input(&a.input);
    let mut summary = json!({ "pixels": m.n(), "q": a.q, "missing_pairs": m.n_missing() });
    if let Some(p) = &a.compare {
        let other = extremal_correlation(&load_tensor(p)?, a.q)?;
        summary["rmse"] = json!(chi_rmse(&m, &other)?);
        out = out.input(p);
    }
    if let Some(p) = &a.output {
        save_tensor(&m.to_tensor(), p)?;
        out = out.output(p);
    }
    Ok(out.summary(summary))
}

fn spectral(a: &SpectralArgs) -> Result<Outcome> {
    let sample = |t: &EnsembleTensor| -> Result<_> {
        let (i, j) = (a.pixel_a.flat(t)?, a.pixel_b.flat(t)?);
        let mut s = spectral_distribution(&t.pixel_series(i), &t.pixel_series(j), a.radial_q)?;
        s.pair = Some((i, j));
        Ok(s)
    };
    let t = load_tensor(&a.input)?;
    let s = sample(&t)?;
    let mut out = Outcome::new(a)?.input(&a.input);
    let mut summary = json!({
        "retained": s.n_retained(),
        "total": s.n_total,
        "radial_threshold": s.radial_threshold,
        "mean_angle": s.mean_angle(),
        "mass_within_0.2_0.8": s.mass_within(0.2, 0.8),
    });
    if let Some(p) = &a.compare {
        let other = sample(&load_tensor(p)?)?;
        summary["wasserstein"] = json!(spectral_wasserstein(&s, &other)?);
        out = out.input(p);
    }
    if let Some(p) = &a.output {
        let mut w = csv::Writer::from_writer(create(p)?);
        w.write_record(["angle"])?;
        for v in &s.angles {
            w.write_record([v.to_string()])?;
        }
        w.flush()?;
        out = out.output(p);
    }
    Ok(out.summary(summary))
}

fn tau(a: &TauArgs) -> Result<Outcome> {
    let t = load_tensor(&a.input)?;
    let x = t.pixel_series(a.pixel_a.flat(&t)?);
    let y = t.pixel_series(a.pixel_b.flat(&t)?);
    let r = match a.method {
        MethodArg::Kendall => kendall_tau(&x, &y)?,
        MethodArg::Spearman => spearman_rho(&x, &y)?,
    };
    Ok(Outcome::new(a)?
        .input(&a.input)
        .summary(json!({ "coef": r.coef, "p": r.p, "n": r.n })))
}

fn cooccur(a: &CooccurArgs) -> Result<Outcome> {
    let t = load_tensor(&a.input)?;
    let mut out = Outcome::new(a)?.input(&a.input);
    let thr = match &a.thresholds {
        Some(p) => {
            out = out.input(p);
            serde_json::from_reader(std::io::BufReader::new(File::open(p)?))?
        }
        None => {
            let band = marginal_band(&t, &[a.quantile])?;
            let s = t.shape();
            ThresholdMap::from_targets(s.rows, s.cols, band[0].iter().copied().collect())?
        }
    };
    let hist = cooccurrence_histogram(&t, &thr)?;
    let p = a.p.unwrap_or(1.0 - a.quantile);
    let baseline = binomial_pmf(hist.n_pixels, p)?;
    if let Some(path) = &a.output {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["count", "probability", "binomial"])?;
        for (k, (h, b)) in hist.probabilities.iter().zip(&baseline).enumerate() {
            w.write_record([k.to_string(), h.to_string(), b.to_string()])?;
        }
        w.flush()?;
        out = out.output(path);
    }
    Ok(out.summary(json!({
        "pixels": hist.n_pixels,
        "snapshots": hist.n_snapshots,
        "mean_count": hist.mean_count(),
        "total_variation": total_variation(&hist.probabilities, &baseline),
    })))
}

fn mmd(a: &MmdArgs) -> Result<Outcome> {
    let x = tensor_samples(&load_tensor(&a.input)?);
    let y = tensor_samples(&load_tensor(&a.other)?);
    let k = match a.sigma2 {
        Some(s) => KernelConfig::Bandwidth(s),
        None => KernelConfig::MedianHeuristic,
    };
    let r = mmd_squared(&x, &y, k)?;
    let mut summary = json!({ "mmd2": r.mmd2, "sigma2": r.sigma2, "m_x": r.m_x, "m_y": r.m_y });
    if a.permutations > 0 {
        let p = mmd_permutation_test(&x, &y, k, a.permutations, a.seed)?;
        summary["p"] = json!(p);
    }
    Ok(Outcome::new(a)?
        .input(&a.input)
        .input(&a.other)
        .summary(summary))
}

fn msswd(a: &MsswdArgs) -> Result<Outcome> {
    let cfg = PyramidConfig {
        levels: a.levels,
        projections: a.projections,
        seed: a.seed,
        ..PyramidConfig::default()
    };
    let d = ms_swd(&load_tensor(&a.input)?, &load_tensor(&a.other)?, &cfg)?;
    Ok(Outcome::new(a)?
        .input(&a.input)
        .input(&a.other)
        .summary(json!({ "distance": d.distance, "per_level": d.per_level })))
}

fn psd(a: &PsdArgs) -> Result<Outcome> {
    let spec = radial_psd(&load_tensor(&a.input)?)?;
    let mut w = csv::Writer::from_writer(create(&a.output)?);
    w.write_record(["wavenumber", "power", "count"])?;
    for ((k, p), c) in spec.wavenumbers.iter().zip(&spec.power).zip(&spec.counts) {
        w.write_record([k.to_string(), p.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(Outcome::new(a)?.input(&a.input).output(&a.output).summary(json!({
        "total_power": spec.total_power(),
        "peak_wavenumber": spec.peak_wavenumber(),
    })))
}

fn moments(a: &MomentsArgs) -> Result<Outcome> {
    let t = load_tensor(&a.input)?;
    let (mean, std) = moment_maps(&t);
    let bands = marginal_band(&t, &a.quantiles)?;
    let mut w = csv::Writer::from_writer(create(&a.output)?);
    let mut header = vec!["pixel_row".to_string(), "pixel_col".into(), "mean".into(), "std".into()];
    header.extend(a.quantiles.iter().map(|q| format!("q{q}")));
    w.write_record(&header)?;
    for ((r, c), m) in mean.indexed_iter() {
        let mut rec = vec![r.to_string(), c.to_string(), m.to_string(), std[[r, c]].to_string()];
        rec.extend(bands.iter().map(|b| b[[r, c]].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(Outcome::new(a)?.input(&a.input).output(&a.output))
}

fn thresholds(a: &ThresholdArgs) -> Result<Outcome> {
    let thr = build_thresholds(&load_tensor(&a.input)?, a.record_length, a.neighborhood)?;
    write_json(&a.output, &thr)?;
    Ok(Outcome::new(a)?.input(&a.input).output(&a.output))
}

fn write_risk(field: &RiskField, path: &Path) -> Result<()> {
    field.write_csv(create(path)?)
}

fn risk(a: &RiskArgs) -> Result<Outcome> {
    let t = load_tensor(&a.input)?;
    let thr: ThresholdMap =
        serde_json::from_reader(std::io::BufReader::new(File::open(&a.thresholds)?))?;
    let unit = a.block_len.map_or(EventUnit::Snapshot, EventUnit::Block);
    let field = empirical_risks(&t, &thr, a.neighborhood, unit)?;
    write_risk(&field, &a.output)?;
    Ok(Outcome::new(a)?
        .input(&a.input)
        .input(&a.thresholds)
        .output(&a.output)
        .summary(json!({
            "pixels": field.pixels.len(),
            "defined": field.n_defined(),
            "max_normalization_error": field.max_normalization_error(),
        })))
}

fn risk_analytic(a: &RiskAnalyticArgs) -> Result<Outcome> {
    let p = match (a.p, a.record_length) {
        (Some(p), _) => p,
        (None, Some(s)) => RandomProcessParams::from_record_length(s, a.neighbors)?.p_target,
        (None, None) => return Err(Error::Config("give --p or --record-length".into())),
    };
    let mut params = RandomProcessParams::uniform(p, a.neighbors);
    if let Some(pt) = a.p_target {
        params.p_target = pt;
    }
    let tri = match a.process {
        ProcessArg::Random => analytic_random_risks(&params)?,
        ProcessArg::Dependent => analytic_dependent_risks(&params)?,
    };
    let mut out = Outcome::new(a)?.summary(serde_json::to_value(tri)?);
    if let (Some(path), Some(rows), Some(cols)) = (&a.output, a.rows, a.cols) {
        write_risk(&analytic_random_field(rows, cols, p, a.neighborhood)?, path)?;
        out = out.output(path);
    }
    Ok(out)
}

fn hotspots(a: &HotspotArgs) -> Result<Outcome> {
    let risks = RiskField::read_csv(&a.input)?;
    let mut out = Outcome::new(a)?.input(&a.input);
    let baseline = match &a.baseline {
        Some(p) => {
            out = out.input(p);
            RiskField::read_csv(p)?
        }
        None => analytic_random_field(
            risks.rows,
            risks.cols,
            1.0 / a.record_length.max(1) as f64,
            a.neighborhood,
        )?,
    };
    let flags = classify_hotspots(&risks, a.record_length, &baseline)?;
    let mut summary = json!({
        "community_high": flags.n_community_high(),
        "checkmate_above_random": flags.n_checkmate_above_random(),
    });
    if let Some(p) = &a.future {
        let fut = classify_hotspots(&RiskField::read_csv(p)?, a.record_length, &baseline)?;
        summary["persistence"] =
            serde_json::to_value(persistence(&flags.community_high, &fut.community_high)?)?;
        out = out.input(p);
    }
    let mut w = csv::Writer::from_writer(create(&a.output)?);
    w.write_record(["pixel_row", "pixel_col", "community_high", "checkmate_above_random"])?;
    for (k, (c, m)) in flags
        .community_high
        .iter()
        .zip(&flags.checkmate_above_random)
        .enumerate()
    {
        w.write_record([
            (k / flags.cols).to_string(),
            (k % flags.cols).to_string(),
            c.to_string(),
            m.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(out.output(&a.output).summary(summary))
}

fn country(a: &CountryArgs) -> Result<Outcome> {
    let risks = RiskField::read_csv(&a.input)?;
    let meta = GridMeta::read_labels(risks.rows, risks.cols, &a.labels)?;
    let table = aggregate_country(&risks, &meta)?;
    table.write_csv(create(&a.output)?)?;
    Ok(Outcome::new(a)?
        .input(&a.input)
        .input(&a.labels)
        .output(&a.output)
        .summary(json!({
            "countries": table.rows.len(),
            "excluded": table.excluded,
            "with_missing_pixels": table.rows.iter().filter(|r| r.n_missing > 0)
                .map(|r| r.country_id.clone()).collect::<Vec<_>>(),
        })))
}

fn correlate(a: &CorrelateArgs) -> Result<Outcome> {
    let table = CountryTable::read_csv(&a.input)?;
    let ind = read_indicators(&a.indicators)?;
    let risk = match a.risk {
        RiskArg::Community => RiskColumn::Community,
        RiskArg::Checkmate => RiskColumn::Checkmate,
        RiskArg::Stalemate => RiskColumn::Stalemate,
    };
    let indicator = match a.indicator {
        IndicatorArg::Vulnerability => IndicatorColumn::Vulnerability,
        IndicatorArg::Readiness => IndicatorColumn::Readiness,
    };
    let method = match a.method {
        MethodArg::Kendall => RankMethod::Kendall,
        MethodArg::Spearman => RankMethod::Spearman,
    };
    let r = correlate_indicator(&table, &ind, risk, indicator, method)?;
    Ok(Outcome::new(a)?
        .input(&a.input)
        .input(&a.indicators)
        .summary(serde_json::to_value(r)?))
}

fn verify() -> Result<(Outcome, bool)> {
    let checks = crate::verify::run_checks();
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        emit(&format!("{tag}  {:width$}  {}", c.name, c.detail));
    }
    let ok = checks.iter().all(|c| c.passed);
    let passed = checks.iter().filter(|c| c.passed).count();
    emit(&format!("{passed} of {} checks passed", checks.len()));
    Ok((Outcome::new(&json!({}))?, ok))
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let out = match &cli.command {
        Command::SimulateLgcp(a) => simulate(a)?,
        Command::Embed(a) => embed(a)?,
        Command::Chi(a) => chi(a)?,
        Command::Spectral(a) => spectral(a)?,
        Command::Tau(a) => tau(a)?,
        Command::Cooccur(a) => cooccur(a)?,
        Command::Mmd(a) => mmd(a)?,
        Command::Msswd(a) => msswd(a)?,
        Command::Psd(a) => psd(a)?,
        Command::Moments(a) => moments(a)?,
        Command::Thresholds(a) => thresholds(a)?,
        Command::Risk(a) => risk(a)?,
        Command::RiskAnalytic(a) => risk_analytic(a)?,
        Command::Hotspots(a) => hotspots(a)?,
        Command::Country(a) => country(a)?,
        Command::Correlate(a) => correlate(a)?,
        Command::Verify => {
            let (out, ok) = verify()?;
            write_manifest("verify", &out, cli.manifest.as_deref())?;
            return Ok(if ok { 0 } else { 3 });
        }
    };
    write_manifest(command_name(&cli.command), &out, cli.manifest.as_deref())?;
    if let Some(s) = &out.summary {
        emit(&serde_json::to_string_pretty(s)?);
    }
    Ok(0)
}

/// Prints a line to stdout; a closed pipe is not an error.
fn emit(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn report(e: &Error) -> i32 {
    let code = e.exit_code();
    eprintln!(
        "{}",
        json!({ "error": e.kind(), "message": e.to_string(), "exit_code": code })
    );
    code
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code: 0 success, 1 usage, 2 validation, 3 numerical.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{}", e.render());
            eprintln!(
                "{}",
                json!({ "error": "usage", "message": e.kind().to_string(), "exit_code": 1 })
            );
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => return report(&Error::Config(format!("thread pool: {e}"))),
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(code) => code,
        Err(e) => report(&e),
    }
}
