//! Simulation campaigns: many fGn paths, one standardized statistic per path,
//! and a distribution summary of the result.

use std::fs;
use std::io::Write;
use std::path::Path;

use ordpat_core::coeff::{
    limit_law_rank1, limit_law_rank2, rank1_closed_form, rank2_closed_form, LawKind, LimitLaw,
    OraclePlan, Coordinates, Target,
};
use ordpat_core::cov::{toeplitz_sigma, CovModel};
use ordpat_core::estimate::{
    standardize_rank1, standardize_rank2, target_probability, SeriesView,
};
use ordpat_core::hurst::{estimate_hurst, hurst_limit_constants, standardize_hurst};
use ordpat_core::{Pattern, ReversalGroup};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::summary::{summarize, Bandwidth, Summary};
use crate::synth::{FgnSynth, Method};

/// Oracle sample count used when a statistic has no closed form.
pub const DEFAULT_ORACLE_SAMPLES: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    /// `q_n` of a single pattern.
    QHat { pattern: Pattern },
    /// `p_n` of the reversal group containing `pattern`.
    PHat { pattern: Pattern },
    /// Zero-crossing Hurst estimate.
    Hurst,
}

impl Statistic {
    pub fn target(&self) -> Option<Target> {
        match self {
            Statistic::QHat { pattern } => Some(Target::Pattern(*pattern)),
            Statistic::PHat { pattern } => Some(Target::Group(ReversalGroup::of(pattern))),
            Statistic::Hurst => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    /// Number of paths `N`.
    pub paths: usize,
    /// Path length `n`.
    pub n: usize,
    pub hurst: f64,
    pub statistic: Statistic,
    pub seed: u64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub kde_bandwidth: Bandwidth,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_oracle_samples")]
    pub oracle_samples: u64,
}

fn default_bins() -> usize {
    50
}

fn default_oracle_samples() -> u64 {
    DEFAULT_ORACLE_SAMPLES
}

impl CampaignConfig {
    pub fn new(statistic: Statistic, hurst: f64, paths: usize, n: usize, seed: u64) -> Self {
        CampaignConfig {
            paths,
            n,
            hurst,
            statistic,
            seed,
            bins: default_bins(),
            kde_bandwidth: Bandwidth::default(),
            method: Method::default(),
            oracle_samples: default_oracle_samples(),
        }
    }
}

/// Limit law and centring used to standardize one statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    pub law: LimitLaw,
    /// Model probability of the target, or the true `H`.
    pub center: f64,
    /// Standard errors when the constants came from the Monte Carlo oracle.
    pub center_se: Option<f64>,
    pub alpha_sum_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: CampaignConfig,
    pub theory: Theory,
    /// Unstandardized per-path values (`q_n`, `p_n` or `H_n`).
    pub raw: Vec<f64>,
    pub standardized_samples: Vec<f64>,
    #[serde(flatten)]
    pub summary: Summary,
}

/// Limit law and centring for the configured statistic; errors when the
/// statistic has no standardization at this `H`.
pub fn theory(cfg: &CampaignConfig) -> Result<Theory> {
    let model = CovModel::fgn(cfg.hurst)?;
    let lrd = model.require_lrd()?;
    let r1 = model.r1()?;
    match &cfg.statistic {
        Statistic::Hurst => {
            let k = hurst_limit_constants(cfg.hurst)?;
            let turning = rank2_closed_form(&ReversalGroup::turning_points(), r1)?;
            let law = LimitLaw {
                kind: LawKind::Rosenblatt,
                scale: k.limit_scale,
                variance: k.limit_scale * k.limit_scale,
                alpha_sum: turning.alpha_sum,
                rate_exponent: lrd.d,
                slowly_varying_power: 0.0,
                constant: k.prefactor,
                rosenblatt_hurst: Some(cfg.hurst),
            };
            Ok(Theory {
                law,
                center: cfg.hurst,
                center_se: None,
                alpha_sum_se: None,
            })
        }
        stat => {
            let target = stat.target().expect("pattern statistic");
            let rank2 = matches!(stat, Statistic::PHat { .. });
            if rank2 {
                // Fail early on the regime before any oracle work.
                limit_law_rank2(lrd.d, 0.0)?;
            }
            let h = target.order();
            if h <= 2 {
                let alpha_sum = match &target {
                    Target::Pattern(p) if !rank2 => rank1_closed_form(p, r1)?.alpha_sum,
                    Target::Group(g) => rank2_closed_form(g, r1)?.alpha_sum,
                    Target::Pattern(_) => unreachable!(),
                };
                let law = if rank2 {
                    limit_law_rank2(lrd.d, alpha_sum)?
                } else {
                    limit_law_rank1(lrd.d, alpha_sum)?
                };
                return Ok(Theory {
                    law,
                    center: target_probability(&target, r1)?,
                    center_se: None,
                    alpha_sum_se: None,
                });
            }
            let sigma = toeplitz_sigma(&model, h)?;
            let order = if rank2 { 2 } else { 1 };
            let plan = OraclePlan::new(
                target,
                &sigma,
                Coordinates::Increments,
                order,
                cfg.oracle_samples,
                cfg.seed,
            )?;
            let est = par::run_plan(&plan);
            let law = if rank2 {
                limit_law_rank2(lrd.d, est.alpha_sum)?
            } else {
                limit_law_rank1(lrd.d, est.alpha_sum)?
            };
            Ok(Theory {
                law,
                center: est.probability,
                center_se: Some(est.probability_se),
                alpha_sum_se: Some(est.alpha_sum_se),
            })
        }
    }
}

fn validate(cfg: &CampaignConfig) -> Result<()> {
    if cfg.paths == 0 {
        return Err(Error::Config("paths must be at least 1".into()));
    }
    if cfg.bins == 0 {
        return Err(Error::Config("bins must be at least 1".into()));
    }
    if let Bandwidth::Fixed(b) = cfg.kde_bandwidth {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Config(format!("bandwidth must be positive, got {b}")));
        }
    }
    let order = cfg.statistic.target().map_or(2, |t| t.order());
    if cfg.n < order {
        return Err(Error::Config(format!(
            "path length {} too short for order {order}",
            cfg.n
        )));
    }
    Ok(())
}

/// Raw and standardized statistic of one fGn path.
pub fn path_statistic(cfg: &CampaignConfig, theory: &Theory, path: &[f64]) -> Result<(f64, f64)> {
    let model = CovModel::fgn(cfg.hurst)?;
    let series = SeriesView::increments(path)?;
    match &cfg.statistic {
        Statistic::Hurst => {
            let r = estimate_hurst(&series)?;
            Ok((r.h_hat, standardize_hurst(&r, cfg.hurst)?))
        }
        stat => {
            let target = stat.target().expect("pattern statistic");
            let order = target.order();
            let n = series.window_count(order)?;
            let hits = series.count_range(order, 0, n, |perm| target.matches(perm));
            let est = ordpat_core::estimate::estimate_from_count(target, n, hits);
            let z = match stat {
                Statistic::QHat { .. } => standardize_rank1(&est, &model, Some(theory.center))?,
                _ => standardize_rank2(&est, &model, Some(theory.center))?,
            };
            Ok((est.value, z))
        }
    }
}

pub fn run_campaign(cfg: &CampaignConfig) -> Result<SimReport> {
    validate(cfg)?;
    let theory = theory(cfg)?;
    let synth = FgnSynth::new(cfg.hurst, cfg.n, cfg.method)?;
    let results: Vec<Result<(f64, f64)>> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| {
            let path = synth.path(cfg.seed, i as u64);
            path_statistic(cfg, &theory, &path)
        })
        .collect();
    let mut raw = Vec::with_capacity(cfg.paths);
    let mut standardized = Vec::with_capacity(cfg.paths);
    for r in results {
        let (a, b) = r?;
        raw.push(a);
        standardized.push(b);
    }
    let summary = summarize(&standardized, cfg.bins, cfg.kde_bandwidth, cfg.seed);
    Ok(SimReport {
        config: cfg.clone(),
        theory,
        raw,
        standardized_samples: standardized,
        summary,
    })
}

fn write_two_columns(path: &Path, header: (&str, &str), rows: impl Iterator<Item = (String, String)>) -> Result<()> {
    let mut out = String::new();
    out.push_str(header.0);
    out.push(',');
    out.push_str(header.1);
    out.push('\n');
    for (a, b) in rows {
        out.push_str(&a);
        out.push(',');
        out.push_str(&b);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes `report.json`, `hist.csv`, `kde.csv` and `qq.csv` into `dir`.
pub fn write_report(report: &SimReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json = dir.join("report.json");
    let mut f = fs::File::create(&json).map_err(|e| Error::io(&json, e))?;
    serde_json::to_writer_pretty(&mut f, report)?;
    f.write_all(b"\n").map_err(|e| Error::io(&json, e))?;

    let h = &report.summary.histogram;
    write_two_columns(
        &dir.join("hist.csv"),
        ("center", "count"),
        h.centers().into_iter().zip(&h.counts).map(|(c, n)| (c.to_string(), n.to_string())),
    )?;
    let k = &report.summary.kde;
    write_two_columns(
        &dir.join("kde.csv"),
        ("x", "density"),
        k.grid.iter().zip(&k.density).map(|(x, d)| (x.to_string(), d.to_string())),
    )?;
    let q = &report.summary.qq;
    write_two_columns(
        &dir.join("qq.csv"),
        ("theoretical", "sample"),
        q.theoretical.iter().zip(&q.sample).map(|(t, s)| (t.to_string(), s.to_string())),
    )
}
