//! Command line front end. Every subcommand parses its flags, calls into the
//! library and serializes the result; no statistics are computed here.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ordpat_core::coeff::{
    limit_law_rank1, limit_law_rank2, rank1_closed_form, rank2_closed_form, Coordinates, LimitLaw,
    OraclePlan, Target,
};
use ordpat_core::cov::{toeplitz_sigma, CovModel, LrdParams};
use ordpat_core::estimate::{
    standardize_rank1, standardize_rank2, target_probability, Estimate, Interpretation, SeriesView,
};
use ordpat_core::hurst::{estimate_hurst, HurstResult};
use ordpat_core::pattern::{enumerate_patterns_capped, partition_groups_capped, DEFAULT_ENUMERATION_CAP};
use ordpat_core::{Pattern, ReversalGroup};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::io::{read_cov_table, read_series, Column};
use crate::montecarlo::{run_campaign, write_report, CampaignConfig, Statistic, DEFAULT_ORACLE_SAMPLES};
use crate::par;
use crate::summary::{Bandwidth, BandwidthRule};
use crate::synth::{cumulative, FgnSynth, Method, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "ordpat", version, about = "Ordinal pattern statistics for long-range dependent series")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the patterns of an order and their reversal groups.
    Patterns(PatternsArgs),
    /// Pattern or group frequencies of a series.
    Estimate(EstimateArgs),
    /// Zero-crossing Hurst estimate of a series.
    Hurst(HurstArgs),
    /// Hermite coefficients of a pattern or group indicator.
    Coeffs(CoeffsArgs),
    /// Synthesize fractional Gaussian noise or Brownian motion paths.
    Synth(SynthArgs),
    /// Run a Monte Carlo campaign.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct PatternsArgs {
    #[arg(long)]
    pub order: usize,
    /// Largest order that may be enumerated.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Series file: one value per line, or CSV / whitespace columns.
    #[arg(long)]
    pub input: PathBuf,
    /// Column name or zero-based index.
    #[arg(long)]
    pub column: Option<Column>,
    /// Treat values as levels (default).
    #[arg(long, conflicts_with = "increments")]
    pub levels: bool,
    /// Treat values as increments.
    #[arg(long)]
    pub increments: bool,
}

impl InputArgs {
    fn interpretation(&self) -> Interpretation {
        if self.increments {
            Interpretation::Increments
        } else {
            Interpretation::Levels
        }
    }

    fn load(&self) -> Result<Vec<f64>> {
        read_series(&self.input, self.column.as_ref())
    }
}

#[derive(Debug, Args)]
#[group(id = "what", required = true, multiple = false)]
pub struct TargetArgs {
    /// Single pattern, e.g. `2,1,0`.
    #[arg(long, value_parser = parse_pattern)]
    pub pattern: Option<Pattern>,
    /// Reversal group of a pattern, e.g. `2,0,1`.
    #[arg(long, value_parser = parse_pattern)]
    pub group: Option<Pattern>,
}

impl TargetArgs {
    fn target(&self) -> Option<Target> {
        match (self.pattern, self.group) {
            (Some(p), _) => Some(Target::Pattern(p)),
            (_, Some(g)) => Some(Target::Group(ReversalGroup::of(&g))),
            _ => None,
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Covariance model: `fgn:H` or `table:PATH`.
    #[arg(long, value_parser = parse_model_spec)]
    pub model: Option<ModelSpec>,
    /// Long-range parameters `D,L` for a table model.
    #[arg(long, value_parser = parse_lrd)]
    pub lrd: Option<LrdParams>,
}

impl ModelArgs {
    fn load(&self) -> Result<Option<CovModel>> {
        match &self.model {
            None => Ok(None),
            Some(ModelSpec::Fgn(h)) => Ok(Some(CovModel::fgn(*h)?)),
            Some(ModelSpec::Table(path)) => Ok(Some(CovModel::table(read_cov_table(path)?, self.lrd)?)),
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_parser = parse_pattern, conflicts_with_all = ["group", "all", "all_groups"])]
    pub pattern: Option<Pattern>,
    #[arg(long, value_parser = parse_pattern, conflicts_with_all = ["all", "all_groups"])]
    pub group: Option<Pattern>,
    /// Every pattern of `--order`.
    #[arg(long, conflicts_with = "all_groups")]
    pub all: bool,
    /// Every reversal group of `--order`.
    #[arg(long)]
    pub all_groups: bool,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Model probability to centre on when no closed form exists.
    #[arg(long)]
    pub probability: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HurstArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Known Hurst index; enables standardization.
    #[arg(long)]
    pub true_h: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoeffMethod {
    /// Closed form when available, oracle otherwise.
    Auto,
    Closed,
    Oracle,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Lag-one correlation (orders 1 and 2 only).
    #[arg(long, conflicts_with = "model")]
    pub r1: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Hermite order: 1 (default for patterns) or 2 (default for groups).
    #[arg(long)]
    pub order: Option<u8>,
    #[arg(long, value_enum, default_value_t = CoeffMethod::Auto)]
    pub method: CoeffMethod,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub hurst: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Circulant)]
    pub method: Method,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    /// Emit fractional Brownian motion (partial sums, starting at 0).
    #[arg(long)]
    pub fbm: bool,
    /// Output CSV; a JSON sidecar is written next to it.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    #[value(name = "q_hat")]
    QHat,
    #[value(name = "p_hat")]
    PHat,
    Hurst,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML or JSON file with campaign settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub hurst: Option<f64>,
    #[arg(long, value_enum)]
    pub statistic: Option<StatisticKind>,
    #[arg(long, value_parser = parse_pattern)]
    pub pattern: Option<Pattern>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// `silverman` or a positive number.
    #[arg(long, value_parser = parse_bandwidth)]
    pub bandwidth: Option<Bandwidth>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub oracle_samples: Option<u64>,
    /// Output directory for report.json, hist.csv, kde.csv and qq.csv.
    #[arg(long)]
    pub out: PathBuf,
}

/// Campaign settings as read from a file, every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignFile {
    pub paths: Option<usize>,
    pub n: Option<usize>,
    pub hurst: Option<f64>,
    pub statistic: Option<StatisticKind>,
    pub pattern: Option<Pattern>,
    pub seed: Option<u64>,
    pub bins: Option<usize>,
    pub kde_bandwidth: Option<Bandwidth>,
    pub method: Option<Method>,
    pub oracle_samples: Option<u64>,
}

pub const DEFAULT_PATHS: usize = 2000;
pub const DEFAULT_LENGTH: usize = 1 << 16;
pub const DEFAULT_BINS: usize = 50;

impl CampaignFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }

    /// Fields of `self` win over `other`.
    pub fn or(self, other: CampaignFile) -> CampaignFile {
        CampaignFile {
            paths: self.paths.or(other.paths),
            n: self.n.or(other.n),
            hurst: self.hurst.or(other.hurst),
            statistic: self.statistic.or(other.statistic),
            pattern: self.pattern.or(other.pattern),
            seed: self.seed.or(other.seed),
            bins: self.bins.or(other.bins),
            kde_bandwidth: self.kde_bandwidth.or(other.kde_bandwidth),
            method: self.method.or(other.method),
            oracle_samples: self.oracle_samples.or(other.oracle_samples),
        }
    }

    /// Fills defaults and checks that required settings are present.
    pub fn resolve(self) -> Result<CampaignConfig> {
        let seed = self
            .seed
            .ok_or_else(|| Error::Usage("a seed is required (--seed or `seed` in the config file)".into()))?;
        let hurst = self
            .hurst
            .ok_or_else(|| Error::Usage("--hurst is required".into()))?;
        let kind = self
            .statistic
            .ok_or_else(|| Error::Usage("--statistic is required".into()))?;
        let statistic = match kind {
            StatisticKind::Hurst => Statistic::Hurst,
            StatisticKind::QHat | StatisticKind::PHat => {
                let pattern = self
                    .pattern
                    .ok_or_else(|| Error::Usage("--pattern is required for q_hat and p_hat".into()))?;
                if kind == StatisticKind::QHat {
                    Statistic::QHat { pattern }
                } else {
                    Statistic::PHat { pattern }
                }
            }
        };
        Ok(CampaignConfig {
            paths: self.paths.unwrap_or(DEFAULT_PATHS),
            n: self.n.unwrap_or(DEFAULT_LENGTH),
            hurst,
            statistic,
            seed,
            bins: self.bins.unwrap_or(DEFAULT_BINS),
            kde_bandwidth: self.kde_bandwidth.unwrap_or_default(),
            method: self.method.unwrap_or_default(),
            oracle_samples: self.oracle_samples.unwrap_or(DEFAULT_ORACLE_SAMPLES),
        })
    }
}

impl SimulateArgs {
    fn as_file(&self) -> CampaignFile {
        CampaignFile {
            paths: self.paths,
            n: self.n,
            hurst: self.hurst,
            statistic: self.statistic,
            pattern: self.pattern,
            seed: self.seed,
            bins: self.bins,
            kde_bandwidth: self.bandwidth,
            method: self.method,
            oracle_samples: self.oracle_samples,
        }
    }

    pub fn resolve(&self) -> Result<CampaignConfig> {
        let file = match &self.config {
            Some(p) => CampaignFile::load(p)?,
            None => CampaignFile::default(),
        };
        self.as_file().or(file).resolve()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Fgn(f64),
    Table(PathBuf),
}

fn parse_model_spec(s: &str) -> std::result::Result<ModelSpec, String> {
    match s.split_once(':') {
        Some(("fgn", h)) => h
            .parse()
            .map(ModelSpec::Fgn)
            .map_err(|_| format!("bad Hurst index {h:?}")),
        Some(("table", p)) if !p.is_empty() => Ok(ModelSpec::Table(PathBuf::from(p))),
        _ => Err("expected fgn:H or table:PATH".into()),
    }
}

fn parse_lrd(s: &str) -> std::result::Result<LrdParams, String> {
    let (d, l) = s.split_once(',').ok_or("expected D,L")?;
    let d: f64 = d.trim().parse().map_err(|_| format!("bad D {d:?}"))?;
    let l: f64 = l.trim().parse().map_err(|_| format!("bad L {l:?}"))?;
    LrdParams::new(d, l).map_err(|e| e.to_string())
}

pub fn parse_pattern(s: &str) -> std::result::Result<Pattern, String> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let perm = inner
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad entry {t:?}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Pattern::new(&perm).map_err(|e| e.to_string())
}

fn parse_bandwidth(s: &str) -> std::result::Result<Bandwidth, String> {
    if s.eq_ignore_ascii_case("silverman") {
        return Ok(Bandwidth::Rule(BandwidthRule::Silverman));
    }
    match s.parse::<f64>() {
        Ok(b) if b > 0.0 && b.is_finite() => Ok(Bandwidth::Fixed(b)),
        _ => Err("expected `silverman` or a positive number".into()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternEntry {
    pub index: u64,
    pub pattern: Pattern,
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternTable {
    pub order: usize,
    pub count: usize,
    pub patterns: Vec<PatternEntry>,
    pub groups: Vec<Vec<Pattern>>,
}

pub fn patterns(args: &PatternsArgs) -> Result<PatternTable> {
    let all = enumerate_patterns_capped(args.order, args.cap)?;
    let groups = partition_groups_capped(args.order, args.cap)?;
    let patterns = all
        .iter()
        .map(|p| PatternEntry {
            index: p.index(),
            pattern: *p,
            group: groups.iter().position(|g| g.contains(p)).expect("partition covers all"),
        })
        .collect();
    Ok(PatternTable {
        order: args.order,
        count: all.len(),
        patterns,
        groups: groups.iter().map(|g| g.members().to_vec()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    #[serde(flatten)]
    pub estimate: Estimate,
    pub probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub interpretation: Interpretation,
    pub order: usize,
    pub records: Vec<EstimateRecord>,
}

fn estimate_targets(args: &EstimateArgs) -> Result<Vec<Target>> {
    if let Some(p) = args.pattern {
        return Ok(vec![Target::Pattern(p)]);
    }
    if let Some(g) = args.group {
        return Ok(vec![Target::Group(ReversalGroup::of(&g))]);
    }
    let order = args
        .order
        .ok_or_else(|| Error::Usage("give --pattern, --group, or --order with --all / --all-groups".into()))?;
    if args.all_groups {
        Ok(partition_groups_capped(order, DEFAULT_ENUMERATION_CAP)?
            .into_iter()
            .map(Target::Group)
            .collect())
    } else {
        Ok(enumerate_patterns_capped(order, DEFAULT_ENUMERATION_CAP)?
            .into_iter()
            .map(Target::Pattern)
            .collect())
    }
}

pub fn estimate(args: &EstimateArgs) -> Result<EstimateReport> {
    let targets = estimate_targets(args)?;
    let order = targets[0].order();
    if let Some(o) = args.order {
        if o != order {
            return Err(Error::Usage(format!("--order {o} does not match the pattern order {order}")));
        }
    }
    let values = args.input.load()?;
    let series = SeriesView::new(&values, args.input.interpretation())?;
    let model = args.model.load()?;
    let mut records = Vec::with_capacity(targets.len());
    for target in targets {
        let mut est = par::estimate(&series, &target)?;
        let mut probability = None;
        if let Some(m) = &model {
            let p = match args.probability {
                Some(p) => p,
                None => match target_probability(&target, m.r1()?) {
                    Ok(p) => p,
                    Err(ordpat_core::Error::NotClosedForm { .. }) => {
                        return Err(ordpat_core::Error::MissingProbability.into())
                    }
                    Err(e) => return Err(e.into()),
                },
            };
            probability = Some(p);
            est.standardized = Some(match target {
                Target::Pattern(_) => standardize_rank1(&est, m, Some(p))?,
                Target::Group(_) => standardize_rank2(&est, m, Some(p))?,
            });
        }
        records.push(EstimateRecord {
            estimate: est,
            probability,
        });
    }
    Ok(EstimateReport {
        interpretation: args.input.interpretation(),
        order,
        records,
    })
}

pub fn hurst(args: &HurstArgs) -> Result<HurstResult> {
    let values = args.input.load()?;
    let series = SeriesView::new(&values, args.input.interpretation())?;
    let result = estimate_hurst(&series)?;
    match args.true_h {
        Some(h) => Ok(result.with_standardization(h)?),
        None => Ok(result),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffReport {
    pub target: Target,
    pub r1: f64,
    pub order: u8,
    pub method: String,
    pub coefficients: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub alpha_sum: f64,
    pub alpha_sum_se: Option<f64>,
    pub probability: Option<f64>,
    pub probability_se: Option<f64>,
    pub samples: Option<u64>,
    pub seed: u64,
    pub law: Option<LimitLaw>,
}

pub fn coeffs(args: &CoeffsArgs) -> Result<CoeffReport> {
    let target = args.target.target().expect("clap enforces a target");
    let h = target.order();
    let order = args.order.unwrap_or(match target {
        Target::Pattern(_) => 1,
        Target::Group(_) => 2,
    });
    if !(order == 1 || order == 2) {
        return Err(Error::Usage(format!("--order must be 1 or 2, got {order}")));
    }
    let model = args.model.load()?;
    let r1 = match (&model, args.r1) {
        (Some(m), _) => m.r1()?,
        (None, Some(r)) => r,
        (None, None) => return Err(Error::Usage("give --r1 or --model".into())),
    };
    let sigma = match &model {
        Some(m) => toeplitz_sigma(m, h)?,
        None if h <= 2 => toeplitz_sigma(&CovModel::table(vec![1.0, r1], None)?, h)?,
        None => return Err(Error::Usage(format!("order {h} needs --model for the full covariance"))),
    };
    let closed = match args.method {
        CoeffMethod::Oracle => None,
        CoeffMethod::Closed => Some(closed_form(&target, order, r1)?),
        CoeffMethod::Auto => match closed_form(&target, order, r1) {
            Ok(c) => Some(c),
            Err(Error::Core(ordpat_core::Error::NotClosedForm { .. })) => None,
            Err(e) => return Err(e),
        },
    };
    let lrd = model.as_ref().and_then(|m| m.lrd());
    let law = |alpha_sum: f64| -> Result<Option<LimitLaw>> {
        match lrd {
            None => Ok(None),
            Some(p) if order == 1 => Ok(Some(limit_law_rank1(p.d, alpha_sum)?)),
            Some(p) => match limit_law_rank2(p.d, alpha_sum) {
                Ok(l) => Ok(Some(l)),
                Err(ordpat_core::Error::OutOfRegime(_)) => Ok(None),
                Err(e) => Err(e.into()),
            },
        }
    };
    if let Some((coefficients, alpha, alpha_sum)) = closed {
        return Ok(CoeffReport {
            target: target.clone(),
            r1,
            order,
            method: "closed".into(),
            coefficients,
            stderr: None,
            alpha,
            alpha_sum,
            alpha_sum_se: None,
            probability: target_probability(&target, r1).ok(),
            probability_se: None,
            samples: None,
            seed: args.seed,
            law: law(alpha_sum)?,
        });
    }
    let plan = OraclePlan::new(target.clone(), &sigma, Coordinates::Increments, order, args.samples, args.seed)?;
    let est = par::run_plan(&plan);
    let alpha = if order == 1 {
        Some(sigma.solve(&est.coefficients)?)
    } else {
        None
    };
    Ok(CoeffReport {
        target,
        r1,
        order,
        method: "oracle".into(),
        coefficients: est.coefficients,
        stderr: Some(est.stderr),
        alpha,
        alpha_sum: est.alpha_sum,
        alpha_sum_se: Some(est.alpha_sum_se),
        probability: Some(est.probability),
        probability_se: Some(est.probability_se),
        samples: Some(est.samples),
        seed: args.seed,
        law: law(est.alpha_sum)?,
    })
}

type Closed = (Vec<f64>, Option<Vec<f64>>, f64);

fn closed_form(target: &Target, order: u8, r1: f64) -> Result<Closed> {
    match (target, order) {
        (Target::Pattern(p), 1) => {
            let c = rank1_closed_form(p, r1)?;
            Ok((c.c, Some(c.alpha), c.alpha_sum))
        }
        (Target::Group(g), 2) => {
            let c = rank2_closed_form(g, r1)?;
            Ok((c.c, None, c.alpha_sum))
        }
        _ => Err(ordpat_core::Error::NotClosedForm { order: target.order() }.into()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSidecar {
    #[serde(flatten)]
    pub config: SynthConfig,
    pub paths: usize,
    pub kind: String,
    /// Path `i` uses random stream `i` of `seed`.
    pub columns: Vec<String>,
}

pub fn synth(args: &SynthArgs) -> Result<SynthSidecar> {
    let cfg = SynthConfig {
        hurst: args.hurst,
        n: args.n,
        seed: args.seed,
        method: args.method,
    };
    if args.paths == 0 {
        return Err(Error::Usage("--paths must be at least 1".into()));
    }
    let gen = FgnSynth::from_config(&cfg)?;
    let paths: Vec<Vec<f64>> = (0..args.paths as u64)
        .map(|i| {
            let p = gen.path(cfg.seed, i);
            if args.fbm {
                cumulative(&p)
            } else {
                p
            }
        })
        .collect();
    let columns: Vec<String> = (0..args.paths).map(|i| format!("path{i}")).collect();
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in 0..paths[0].len() {
        let line: Vec<String> = paths.iter().map(|p| p[row].to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(&args.output, out).map_err(|e| Error::io(&args.output, e))?;
    let sidecar = SynthSidecar {
        config: cfg,
        paths: args.paths,
        kind: if args.fbm { "fbm" } else { "fgn" }.into(),
        columns,
    };
    let side_path = sidecar_path(&args.output);
    let text = serde_json::to_string_pretty(&sidecar)? + "\n";
    fs::write(&side_path, text).map_err(|e| Error::io(&side_path, e))?;
    Ok(sidecar)
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_os_string();
    s.push(".json");
    PathBuf::from(s)
}

pub fn simulate(args: &SimulateArgs) -> Result<serde_json::Value> {
    let cfg = args.resolve()?;
    let report = run_campaign(&cfg)?;
    write_report(&report, &args.out)?;
    let m = &report.summary.moments;
    Ok(json!({
        "out": args.out,
        "paths": cfg.paths,
        "mean": m.mean,
        "variance": m.variance,
        "skewness": m.skewness,
        "excess_kurtosis": m.excess_kurtosis,
        "theory_variance": report.theory.law.variance,
    }))
}

fn dispatch(cli: &Cli) -> Result<serde_json::Value> {
    Ok(match &cli.command {
        Command::Patterns(a) => serde_json::to_value(patterns(a)?)?,
        Command::Estimate(a) => serde_json::to_value(estimate(a)?)?,
        Command::Hurst(a) => serde_json::to_value(hurst(a)?)?,
        Command::Coeffs(a) => serde_json::to_value(coeffs(a)?)?,
        Command::Synth(a) => serde_json::to_value(synth(a)?)?,
        Command::Simulate(a) => simulate(a)?,
    })
}

fn error_code(code: i32) -> &'static str {
    match code {
        1 => "usage_error",
        2 => "input_error",
        _ => "numerical_error",
    }
}

fn report_error(err: &mut dyn Write, code: i32, message: &str) {
    let line = json!({ "code": error_code(code), "message": message });
    let _ = writeln!(err, "{line}");
}

/// Parses `argv`, runs the subcommand and returns the process exit code:
/// 0 success, 1 usage, 2 input or data, 3 numerical or regime.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            report_error(err, 1, first);
            return 1;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Error::Usage("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))
            .and_then(|pool| pool.install(|| dispatch(&cli))),
        None => dispatch(&cli),
    };
    match result {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).expect("serializable");
            let _ = writeln!(out, "{text}");
            0
        }
        Err(e) => {
            let code = e.exit_code();
            report_error(err, code, &e.to_string());
            code
        }
    }
}
