//! Distribution summaries: moments with bootstrap errors, histogram, kernel
//! density estimate and normal QQ pairs.

use ordpat_core::rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Bootstrap resamples for moment standard errors.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
/// Points on the density grid.
pub const KDE_POINTS: usize = 512;
/// Fraction trimmed from each tail before the QQ line fit.
pub const QQ_TRIM: f64 = 0.01;

const BOOTSTRAP_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bandwidth {
    /// Fixed kernel width.
    Fixed(f64),
    Rule(BandwidthRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandwidthRule {
    /// `1.06 sd N^{-1/5}`.
    Silverman,
}

impl Default for Bandwidth {
    fn default() -> Self {
        Bandwidth::Rule(BandwidthRule::Silverman)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Central-moment accumulator (one pass, numerically stable updates).
#[derive(Debug, Clone, Copy, Default)]
struct MomentAcc {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl MomentAcc {
    fn push(&mut self, x: f64) {
        let n1 = self.n;
        self.n += 1.0;
        let n = self.n;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term = delta * dn * n1;
        self.mean += dn;
        self.m4 += term * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term;
    }

    fn finish(&self) -> Moments {
        let n = self.n;
        let (skewness, excess_kurtosis) = if self.m2 > 0.0 {
            (
                n.sqrt() * self.m3 / self.m2.powf(1.5),
                n * self.m4 / (self.m2 * self.m2) - 3.0,
            )
        } else {
            (0.0, 0.0)
        };
        Moments {
            n: n as usize,
            mean: self.mean,
            variance: if n > 1.0 { self.m2 / (n - 1.0) } else { 0.0 },
            skewness,
            excess_kurtosis,
        }
    }
}

pub fn moments(samples: &[f64]) -> Moments {
    let mut acc = MomentAcc::default();
    for &x in samples {
        acc.push(x);
    }
    acc.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MomentErrors {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Standard deviations of the moments over bootstrap resamples drawn from
/// a stream fixed by `seed`.
pub fn bootstrap_errors(samples: &[f64], resamples: usize, seed: u64) -> MomentErrors {
    if samples.len() < 2 || resamples < 2 {
        return MomentErrors::default();
    }
    let mut rng = rng::stream(seed, BOOTSTRAP_STREAM);
    let pick = Uniform::new(0, samples.len()).expect("non-empty range");
    let mut acc = [ordpat_core::stats::RunningStats::new(); 4];
    for _ in 0..resamples {
        let mut m = MomentAcc::default();
        for _ in 0..samples.len() {
            m.push(samples[pick.sample(&mut rng)]);
        }
        let r = m.finish();
        for (a, v) in acc.iter_mut().zip([r.mean, r.variance, r.skewness, r.excess_kurtosis]) {
            a.push(v);
        }
    }
    let sd = |s: &ordpat_core::stats::RunningStats| s.variance().sqrt();
    MomentErrors {
        mean: sd(&acc[0]),
        variance: sd(&acc[1]),
        skewness: sd(&acc[2]),
        excess_kurtosis: sd(&acc[3]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

fn range(samples: &[f64]) -> (f64, f64) {
    samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Equal-width bins over the sample range; a constant sample gets a unit-wide
/// range centred on its value.
pub fn histogram(samples: &[f64], bins: usize) -> Histogram {
    let bins = bins.max(1);
    if samples.is_empty() {
        return Histogram {
            edges: (0..=bins).map(|i| i as f64 / bins as f64).collect(),
            counts: vec![0; bins],
        };
    }
    let (mut lo, mut hi) = range(samples);
    if hi == lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0u64; bins];
    for &x in samples {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Histogram { edges, counts }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kde {
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

/// Silverman's rule `1.06 sd N^{-1/5}`; falls back to 1 for a constant sample.
pub fn silverman(samples: &[f64]) -> f64 {
    let m = moments(samples);
    let bw = 1.06 * m.variance.sqrt() * (samples.len() as f64).powf(-0.2);
    if bw > 0.0 {
        bw
    } else {
        1.0
    }
}

/// Gaussian kernel density on a grid reaching 5 bandwidths past the data.
pub fn kde(samples: &[f64], bandwidth: Bandwidth) -> Kde {
    let bw = match bandwidth {
        Bandwidth::Fixed(b) => b,
        Bandwidth::Rule(BandwidthRule::Silverman) => silverman(samples),
    };
    if samples.is_empty() {
        return Kde {
            bandwidth: bw,
            grid: Vec::new(),
            density: Vec::new(),
        };
    }
    let (lo, hi) = range(samples);
    let (a, b) = (lo - 5.0 * bw, hi + 5.0 * bw);
    let step = (b - a) / (KDE_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..KDE_POINTS).map(|i| a + step * i as f64).collect();
    let norm = 1.0 / (samples.len() as f64 * bw * (2.0 * std::f64::consts::PI).sqrt());
    let density = grid
        .iter()
        .map(|&g| {
            samples
                .iter()
                .map(|&x| {
                    let z = (g - x) / bw;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect();
    Kde {
        bandwidth: bw,
        grid,
        density,
    }
}

/// Trapezoid integral of the density over its grid.
pub fn kde_mass(k: &Kde) -> f64 {
    k.grid
        .windows(2)
        .zip(k.density.windows(2))
        .map(|(g, d)| 0.5 * (g[1] - g[0]) * (d[0] + d[1]))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qq {
    /// Standard normal quantiles at `(i - 1/2)/N`.
    pub theoretical: Vec<f64>,
    /// Sorted sample.
    pub sample: Vec<f64>,
    /// Squared correlation of the pairs with plotting positions inside
    /// `[QQ_TRIM, 1 - QQ_TRIM]`.
    pub r2_central: f64,
}

pub fn qq_normal(samples: &[f64]) -> Qq {
    let n = samples.len();
    let mut sample = samples.to_vec();
    sample.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    let theoretical: Vec<f64> = (0..n)
        .map(|i| normal.inverse_cdf((i as f64 + 0.5) / n as f64))
        .collect();
    let central: Vec<(f64, f64)> = (0..n)
        .filter(|&i| {
            let p = (i as f64 + 0.5) / n as f64;
            (QQ_TRIM..=1.0 - QQ_TRIM).contains(&p)
        })
        .map(|i| (theoretical[i], sample[i]))
        .collect();
    Qq {
        theoretical,
        sample,
        r2_central: r_squared(&central),
    }
}

fn r_squared(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    if pairs.len() < 2 {
        return 0.0;
    }
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy * sxy / (sxx * syy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub moments: Moments,
    pub moment_errors: MomentErrors,
    pub histogram: Histogram,
    pub kde: Kde,
    pub qq: Qq,
}

pub fn summarize(samples: &[f64], bins: usize, bandwidth: Bandwidth, seed: u64) -> Summary {
    Summary {
        moments: moments(samples),
        moment_errors: bootstrap_errors(samples, BOOTSTRAP_RESAMPLES, seed),
        histogram: histogram(samples, bins),
        kde: kde(samples, bandwidth),
        qq: qq_normal(samples),
    }
}
