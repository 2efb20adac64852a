//! First- and second-order Hermite coefficients of pattern indicators.
//!
//! For an increment vector `X = (X_1, ..., X_h)` with Toeplitz covariance
//! `Sigma`, the order-1 coefficients of `f` are `c_k = E[X_k f(X)]` and the
//! order-2 coefficients are `C_ij = E[(X_i X_j - Sigma_ij) f(X)]`. Closed
//! forms exist for `h <= 2`; everything else goes through the Monte Carlo
//! oracle.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cov::{CholeskyFactor, ToeplitzCov};
use crate::error::{Error, Result};
use crate::pattern::{self, Pattern, ReversalGroup, MAX_ORDER};
use crate::rng;
use crate::stats::RunningStats;

/// Standard normal density at zero, `1 / sqrt(2 pi)`.
pub fn phi0() -> f64 {
    1.0 / libm::sqrt(2.0 * PI)
}

/// Minimum Monte Carlo sample count accepted by the oracle.
pub const MIN_ORACLE_SAMPLES: u64 = 10_000;

/// Antithetic pairs per oracle shard.
pub const SHARD_PAIRS: u64 = 1 << 16;

const PILOT_PAIRS: u64 = 4096;
const PILOT_STREAM: u64 = u64::MAX;
const SOLVE_RESIDUAL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rank1Coeffs {
    pub pattern: Pattern,
    pub r1: f64,
    pub c: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rank2Coeffs {
    pub group: ReversalGroup,
    pub r1: f64,
    /// Row-major `h x h`.
    pub c: Vec<f64>,
    /// `Sigma^{-1} C Sigma^{-1}`, row-major.
    pub a: Vec<f64>,
    pub alpha_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    Gaussian,
    Rosenblatt,
}

/// Limit of a standardized estimator: `scale * Z` where `Z` is standard
/// normal (GAUSSIAN) or a unit-variance Rosenblatt variable (ROSENBLATT).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    pub kind: LawKind,
    pub scale: f64,
    pub variance: f64,
    pub alpha_sum: f64,
    /// Exponent of `n` in the normalization.
    pub rate_exponent: f64,
    /// Exponent of `L(n)` in the normalization.
    pub slowly_varying_power: f64,
    /// `c_D` for the Gaussian case, `C_2` for the Rosenblatt case.
    pub constant: f64,
    /// Hurst index `1 - D/2` labelling the Rosenblatt variable.
    pub rosenblatt_hurst: Option<f64>,
}

impl LimitLaw {
    pub fn is_degenerate(&self) -> bool {
        self.scale == 0.0
    }
}

/// `c_D = 2 / ((1 - D)(2 - D))`.
pub fn c_d(d: f64) -> Result<f64> {
    check_d(d)?;
    Ok(2.0 / ((1.0 - d) * (2.0 - d)))
}

/// Normalizing constant making the partial sums of `H_2(X_t)` converge to a
/// unit-variance Rosenblatt variable: `C_2 = 1 / ((1 - 2D)(1 - D))`.
pub fn c2(d: f64) -> Result<f64> {
    check_d(d)?;
    if d >= 0.5 {
        return Err(out_of_regime(d));
    }
    Ok(1.0 / ((1.0 - 2.0 * d) * (1.0 - d)))
}

fn check_d(d: f64) -> Result<()> {
    if d > 0.0 && d < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "D", value: d })
    }
}

fn out_of_regime(d: f64) -> Error {
    Error::OutOfRegime(format!(
        "D = {d} >= 1/2: second-order limit is Gaussian (short-range regime), not covered"
    ))
}

pub fn limit_law_rank1(d: f64, alpha_sum: f64) -> Result<LimitLaw> {
    let cd = c_d(d)?;
    let variance = cd * alpha_sum * alpha_sum;
    Ok(LimitLaw {
        kind: LawKind::Gaussian,
        scale: libm::sqrt(variance),
        variance,
        alpha_sum,
        rate_exponent: d / 2.0,
        slowly_varying_power: 0.5,
        constant: cd,
        rosenblatt_hurst: None,
    })
}

/// Rosenblatt limit of a Hermite-rank-2 functional. The quadratic Hermite
/// projection carries a factor `1/2`, so `scale = alpha_sum / 2`.
pub fn limit_law_rank2(d: f64, alpha_sum: f64) -> Result<LimitLaw> {
    let constant = c2(d)?;
    let scale = alpha_sum / 2.0;
    Ok(LimitLaw {
        kind: LawKind::Rosenblatt,
        scale,
        variance: scale * scale,
        alpha_sum,
        rate_exponent: d,
        slowly_varying_power: 1.0,
        constant,
        rosenblatt_hurst: Some(1.0 - d / 2.0),
    })
}

fn check_r1(r1: f64) -> Result<()> {
    if r1.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "r1",
            value: r1,
        })
    }
}

fn sigma_for(order: usize, r1: f64) -> Result<ToeplitzCov> {
    match order {
        1 => ToeplitzCov::identity(1),
        _ => ToeplitzCov::lag_one(r1),
    }
}

/// Solves `Sigma alpha = c` and checks the residual.
pub fn solve_alpha(sigma: &ToeplitzCov, c: &[f64]) -> Result<Vec<f64>> {
    let alpha = sigma.solve(c)?;
    let back = sigma.mul_vec(&alpha);
    let scale = c.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if back.iter().zip(c).any(|(b, v)| (b - v).abs() > SOLVE_RESIDUAL * scale) {
        return Err(Error::NotPositiveDefinite { pivot: sigma.dim() });
    }
    Ok(alpha)
}

pub fn rank1_from_c(pattern: Pattern, r1: f64, sigma: &ToeplitzCov, c: Vec<f64>) -> Result<Rank1Coeffs> {
    if c.len() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: c.len(),
        });
    }
    let alpha = solve_alpha(sigma, &c)?;
    let alpha_sum = alpha.iter().sum();
    Ok(Rank1Coeffs {
        pattern,
        r1,
        c,
        alpha,
        alpha_sum,
    })
}

/// Relation of an order-2 pattern to one of the two base patterns
/// `(2,1,0)` and `(2,0,1)`.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Image {
    Same,
    Space,
    Time,
    Both,
}

fn locate(p: &Pattern) -> Result<(bool, Image)> {
    let up = Pattern::new(&[2, 1, 0])?;
    let turn = Pattern::new(&[2, 0, 1])?;
    for (is_up, base) in [(true, up), (false, turn)] {
        let images = [
            (base, Image::Same),
            (base.space_reverse(), Image::Space),
            (base.time_reverse(), Image::Time),
            (base.space_reverse().time_reverse(), Image::Both),
        ];
        if let Some((_, img)) = images.iter().find(|(q, _)| q == p) {
            return Ok((is_up, *img));
        }
    }
    Err(Error::NotClosedForm { order: p.order() })
}

/// Exact order-1 coefficients for `h <= 2`.
pub fn rank1_closed_form(pattern: &Pattern, r1: f64) -> Result<Rank1Coeffs> {
    check_r1(r1)?;
    let h = pattern.order();
    let p0 = phi0();
    let c = match h {
        1 => {
            // (1,0) means the single increment is nonnegative.
            let up = pattern.as_slice()[0] == 1;
            vec![if up { p0 } else { -p0 }]
        }
        2 => {
            let (is_up, image) = locate(pattern)?;
            let (c1, c2) = if is_up {
                let v = p0 * (1.0 + r1) / 2.0;
                (v, v)
            } else {
                let q = libm::sqrt((1.0 + r1) / 2.0);
                (p0 / 2.0 * (q - 1.0), p0 / 2.0 * (q - r1))
            };
            match image {
                Image::Same => vec![c1, c2],
                Image::Space => vec![-c1, -c2],
                Image::Time => vec![-c2, -c1],
                Image::Both => vec![c2, c1],
            }
        }
        _ => return Err(Error::NotClosedForm { order: h }),
    };
    let sigma = sigma_for(h, r1)?;
    rank1_from_c(*pattern, r1, &sigma, c)
}

/// Order-1 coefficients in Cholesky coordinates `X = A Y`, `Y ~ N(0, I)`:
/// `b = E[Y f]`, and `alpha = (A^{-1})^T b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CholeskyPath {
    pub b: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_sum: f64,
}

/// Closed-form Cholesky-coordinate computation for the order-2 patterns
/// `(2,1,0)`, `(2,0,1)` and their space reversals.
pub fn rank1_cholesky_path(pattern: &Pattern, r1: f64) -> Result<CholeskyPath> {
    check_r1(r1)?;
    if pattern.order() != 2 {
        return Err(Error::NotClosedForm {
            order: pattern.order(),
        });
    }
    let (is_up, image) = locate(pattern)?;
    let p0 = phi0();
    let s = libm::sqrt(1.0 - r1 * r1);
    let (b1, b2) = if is_up {
        let b2 = s / (2.0 * libm::sqrt(2.0 * PI));
        (s / (1.0 - r1) * b2, b2)
    } else {
        let b2 = libm::sqrt((1.0 - r1) / 2.0) / (2.0 * libm::sqrt(2.0 * PI));
        (p0 / 2.0 * (libm::sqrt((1.0 + r1) / 2.0) - 1.0), b2)
    };
    let b = match image {
        Image::Same => vec![b1, b2],
        Image::Space => vec![-b1, -b2],
        _ => return Err(Error::NotClosedForm { order: 2 }),
    };
    let sigma = ToeplitzCov::lag_one(r1)?;
    let mut alpha = b.clone();
    sigma.cholesky().solve_upper_transpose_in_place(&mut alpha);
    let alpha_sum = alpha.iter().sum();
    Ok(CholeskyPath { b, alpha, alpha_sum })
}

/// Exact order-2 coefficient matrix `c^pi_ij = E[(X_i X_j - Sigma_ij) 1{pi}]`
/// of a single order-2 pattern, row-major.
pub fn rank2_pattern_closed_form(pattern: &Pattern, r1: f64) -> Result<[f64; 4]> {
    check_r1(r1)?;
    if pattern.order() != 2 {
        return Err(Error::NotClosedForm {
            order: pattern.order(),
        });
    }
    let (is_up, image) = locate(pattern)?;
    let p2 = phi0() * phi0();
    let s = libm::sqrt(1.0 - r1 * r1);
    let (c11, c12, c22) = if is_up {
        (p2 * r1 * s, p2 * s, p2 * r1 * s)
    } else {
        (-p2 * s / 2.0, -p2 * s / 2.0, -p2 * s * (2.0 * r1 - 1.0) / 2.0)
    };
    Ok(match image {
        Image::Same | Image::Space => [c11, c12, c12, c22],
        Image::Time | Image::Both => [c22, c12, c12, c11],
    })
}

/// Assembles [`Rank2Coeffs`] from a symmetric `C`.
pub fn rank2_from_c(group: ReversalGroup, r1: f64, sigma: &ToeplitzCov, c: Vec<f64>) -> Result<Rank2Coeffs> {
    let h = sigma.dim();
    if c.len() != h * h {
        return Err(Error::DimensionMismatch {
            expected: h * h,
            found: c.len(),
        });
    }
    // A = Sigma^{-1} C Sigma^{-1}: solve column-wise twice.
    let mut tmp = vec![0.0; h * h];
    for j in 0..h {
        let col: Vec<f64> = (0..h).map(|i| c[i * h + j]).collect();
        let x = sigma.solve(&col)?;
        for i in 0..h {
            tmp[i * h + j] = x[i];
        }
    }
    let mut a = vec![0.0; h * h];
    for i in 0..h {
        let x = sigma.solve(&tmp[i * h..(i + 1) * h])?;
        a[i * h..(i + 1) * h].copy_from_slice(&x);
    }
    let alpha_sum = a.iter().sum();
    Ok(Rank2Coeffs {
        group,
        r1,
        c,
        a,
        alpha_sum,
    })
}

/// Exact order-2 coefficients of the group-averaged indicator
/// `(1/#g) 1{pattern in g}` for `h = 2`.
pub fn rank2_closed_form(group: &ReversalGroup, r1: f64) -> Result<Rank2Coeffs> {
    check_r1(r1)?;
    if group.order() != 2 {
        return Err(Error::NotClosedForm {
            order: group.order(),
        });
    }
    let mut c = vec![0.0; 4];
    for p in group.members() {
        let m = rank2_pattern_closed_form(p, r1)?;
        for (acc, v) in c.iter_mut().zip(m) {
            *acc += v;
        }
    }
    let k = group.len() as f64;
    c.iter_mut().for_each(|v| *v /= k);
    let sigma = ToeplitzCov::lag_one(r1)?;
    rank2_from_c(group.clone(), r1, &sigma, c)
}

/// Function whose Hermite coefficients the oracle estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// `1{pattern}`.
    Pattern(Pattern),
    /// `(1/#g) 1{pattern in g}`.
    Group(ReversalGroup),
}

impl Target {
    pub fn order(&self) -> usize {
        match self {
            Target::Pattern(p) => p.order(),
            Target::Group(g) => g.order(),
        }
    }

    #[inline]
    fn value(&self, perm: &[u8]) -> f64 {
        if self.matches(perm) {
            1.0 / self.size() as f64
        } else {
            0.0
        }
    }
}

/// How the sampled Gaussian vector is turned into a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    /// `h` increments, pattern of the cumulative path.
    Increments,
    /// `h + 1` consecutive values, pattern of the window itself.
    Levels,
}

/// Everything a shard needs; build once, run shards in any order, merge in
/// shard order for a result independent of the worker count.
#[derive(Debug, Clone)]
pub struct OraclePlan {
    target: Target,
    coords: Coordinates,
    order: u8,
    dim: usize,
    factor: CholeskyFactor,
    sigma: Vec<f64>,
    /// `Sigma^{-1} 1`.
    weights: Vec<f64>,
    /// `1^T Sigma^{-1} 1`.
    weight_norm: f64,
    pilot: f64,
    pairs: u64,
    seed: u64,
}

/// Per-shard sums; merge with [`OracleAccumulator::merge`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleAccumulator {
    entries: Vec<RunningStats>,
    alpha_sum: RunningStats,
    probability: RunningStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub order: u8,
    pub dim: usize,
    /// `c_k` (order 1) or row-major `C_ij` (order 2).
    pub coefficients: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `1^T Sigma^{-1} c` or `1^T Sigma^{-1} C Sigma^{-1} 1`.
    pub alpha_sum: f64,
    pub alpha_sum_se: f64,
    /// `E f`.
    pub probability: f64,
    pub probability_se: f64,
    pub samples: u64,
}

impl OraclePlan {
    pub fn new(
        target: Target,
        sigma: &ToeplitzCov,
        coords: Coordinates,
        order: u8,
        samples: u64,
        seed: u64,
    ) -> Result<Self> {
        if !(order == 1 || order == 2) {
            return Err(Error::OrderOutOfRange {
                order: order as usize,
                max: 2,
            });
        }
        if samples < MIN_ORACLE_SAMPLES {
            return Err(Error::TooFewSamples {
                got: samples as usize,
                min: MIN_ORACLE_SAMPLES as usize,
            });
        }
        let h = target.order();
        if h > MAX_ORDER {
            return Err(Error::OrderOutOfRange {
                order: h,
                max: MAX_ORDER,
            });
        }
        let dim = match coords {
            Coordinates::Increments => h,
            Coordinates::Levels => h + 1,
        };
        if sigma.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: sigma.dim(),
            });
        }
        let weights = sigma.solve(&vec![1.0; dim])?;
        let weight_norm = weights.iter().sum();
        let mut plan = OraclePlan {
            target,
            coords,
            order,
            dim,
            factor: sigma.cholesky().clone(),
            sigma: sigma.to_dense(),
            weights,
            weight_norm,
            pilot: 0.0,
            pairs: samples.div_ceil(2),
            seed,
        };
        plan.pilot = plan.pilot_mean();
        Ok(plan)
    }

    pub fn shards(&self) -> u64 {
        self.pairs.div_ceil(SHARD_PAIRS)
    }

    pub fn empty_accumulator(&self) -> OracleAccumulator {
        let n = match self.order {
            1 => self.dim,
            _ => self.dim * self.dim,
        };
        OracleAccumulator {
            entries: vec![RunningStats::new(); n],
            alpha_sum: RunningStats::new(),
            probability: RunningStats::new(),
        }
    }

    fn pilot_mean(&self) -> f64 {
        let mut rng = rng::stream(self.seed, PILOT_STREAM);
        let mut bufs = Buffers::new(self.dim);
        let mut total = 0.0;
        for _ in 0..PILOT_PAIRS {
            let (fp, fm) = self.draw(&mut rng, &mut bufs);
            total += fp + fm;
        }
        total / (2 * PILOT_PAIRS) as f64
    }

    /// Draws `Y`, sets `x = A Y` and returns `(f(x), f(-x))`.
    #[inline]
    fn draw(&self, rng: &mut rng::StreamRng, b: &mut Buffers) -> (f64, f64) {
        let d = self.dim;
        rng::fill_normal(rng, &mut b.y[..d]);
        self.factor.mul_vec(&b.y[..d], &mut b.x[..d]);
        let fp = self.eval(&b.x[..d], &mut b.path, &mut b.perm, 1.0);
        let fm = self.eval(&b.x[..d], &mut b.path, &mut b.perm, -1.0);
        (fp, fm)
    }

    #[inline]
    fn eval(&self, x: &[f64], path: &mut [f64], perm: &mut [u8], sign: f64) -> f64 {
        let h = self.target.order();
        let window = &mut path[..=h];
        match self.coords {
            Coordinates::Increments => {
                window[0] = 0.0;
                let mut acc = 0.0;
                for (slot, v) in window[1..].iter_mut().zip(x) {
                    acc += sign * v;
                    *slot = acc;
                }
            }
            Coordinates::Levels => {
                for (slot, v) in window.iter_mut().zip(x) {
                    *slot = sign * v;
                }
            }
        }
        pattern::encode_perm_into(window, &mut perm[..=h]);
        self.target.value(&perm[..=h])
    }

    /// Runs shard `index` (stream id `index`).
    pub fn run_shard(&self, index: u64) -> OracleAccumulator {
        let mut acc = self.empty_accumulator();
        let start = index * SHARD_PAIRS;
        if start >= self.pairs {
            return acc;
        }
        let count = SHARD_PAIRS.min(self.pairs - start);
        let mut rng = rng::stream(self.seed, index);
        let mut bufs = Buffers::new(self.dim);
        let d = self.dim;
        for _ in 0..count {
            let (fp, fm) = self.draw(&mut rng, &mut bufs);
            acc.probability.push(0.5 * (fp + fm));
            let x = &bufs.x[..d];
            let wx: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum();
            if self.order == 1 {
                // Odd Hermite polynomial: the pair average is x (f(x) - f(-x)) / 2.
                let odd = 0.5 * (fp - fm);
                for (e, v) in acc.entries.iter_mut().zip(x) {
                    e.push(v * odd);
                }
                acc.alpha_sum.push(wx * odd);
            } else {
                // Even Hermite polynomial; centring on the pilot mean leaves the
                // expectation unchanged and removes most of the variance.
                let even = 0.5 * (fp + fm) - self.pilot;
                for i in 0..d {
                    for j in 0..d {
                        let h2 = x[i] * x[j] - self.sigma[i * d + j];
                        acc.entries[i * d + j].push(h2 * even);
                    }
                }
                acc.alpha_sum.push((wx * wx - self.weight_norm) * even);
            }
        }
        acc
    }

    pub fn finish(&self, acc: &OracleAccumulator) -> OracleEstimate {
        OracleEstimate {
            order: self.order,
            dim: self.dim,
            coefficients: acc.entries.iter().map(|s| s.mean()).collect(),
            stderr: acc.entries.iter().map(|s| s.std_error()).collect(),
            alpha_sum: acc.alpha_sum.mean(),
            alpha_sum_se: acc.alpha_sum.std_error(),
            probability: acc.probability.mean(),
            probability_se: acc.probability.std_error(),
            samples: 2 * acc.probability.count(),
        }
    }
}

impl OracleAccumulator {
    pub fn merge(&mut self, other: &OracleAccumulator) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            a.merge(b);
        }
        self.alpha_sum.merge(&other.alpha_sum);
        self.probability.merge(&other.probability);
    }
}

struct Buffers {
    y: [f64; MAX_ORDER + 1],
    x: [f64; MAX_ORDER + 1],
    path: [f64; MAX_ORDER + 1],
    perm: [u8; MAX_ORDER + 1],
}

impl Buffers {
    fn new(_dim: usize) -> Self {
        Buffers {
            y: [0.0; MAX_ORDER + 1],
            x: [0.0; MAX_ORDER + 1],
            path: [0.0; MAX_ORDER + 1],
            perm: [0; MAX_ORDER + 1],
        }
    }
}

/// Runs every shard of `plan` sequentially and merges them in order.
pub fn run_plan(plan: &OraclePlan) -> OracleEstimate {
    let mut acc = plan.empty_accumulator();
    for s in 0..plan.shards() {
        acc.merge(&plan.run_shard(s));
    }
    plan.finish(&acc)
}

/// Monte Carlo estimate of the order-1 or order-2 coefficients of `target`
/// under increments with covariance `sigma` (dimension `h`).
pub fn mc_oracle(target: &Target, sigma: &ToeplitzCov, order: u8, samples: u64, seed: u64) -> Result<OracleEstimate> {
    let plan = OraclePlan::new(target.clone(), sigma, Coordinates::Increments, order, samples, seed)?;
    Ok(run_plan(&plan))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HermiteRank {
    One,
    Two,
    /// Both order-1 and order-2 coefficients vanish.
    AboveTwo,
    /// Some coefficient of this order is neither clearly zero nor clearly nonzero.
    Inconclusive { order: u8 },
}

/// Zero when every entry is within 4 SE of 0; nonzero when any entry exceeds 6 SE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Zero,
    Nonzero,
    Inconclusive,
}

pub const ZERO_SE: f64 = 4.0;
pub const NONZERO_SE: f64 = 6.0;

pub fn classify(coefficients: &[f64], stderr: &[f64]) -> Verdict {
    let z = |c: f64, se: f64| {
        if c == 0.0 {
            0.0
        } else if se == 0.0 {
            f64::INFINITY
        } else {
            c.abs() / se
        }
    };
    let worst = coefficients
        .iter()
        .zip(stderr)
        .map(|(&c, &s)| z(c, s))
        .fold(0.0f64, f64::max);
    if worst > NONZERO_SE {
        Verdict::Nonzero
    } else if worst <= ZERO_SE {
        Verdict::Zero
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankProbe {
    pub rank: HermiteRank,
    pub estimates: Vec<OracleEstimate>,
}

/// Smallest order (1 or 2) whose coefficients are detectably nonzero.
pub fn hermite_rank_probe(target: &Target, sigma: &ToeplitzCov, samples: u64, seed: u64) -> Result<RankProbe> {
    hermite_rank_probe_with(target, sigma, samples, seed, run_plan)
}

/// As [`hermite_rank_probe`] with a caller-supplied plan runner (for example a
/// parallel one).
pub fn hermite_rank_probe_with<F>(
    target: &Target,
    sigma: &ToeplitzCov,
    samples: u64,
    seed: u64,
    runner: F,
) -> Result<RankProbe>
where
    F: Fn(&OraclePlan) -> OracleEstimate,
{
    let mut estimates = Vec::new();
    for order in 1..=2u8 {
        let plan = OraclePlan::new(target.clone(), sigma, Coordinates::Increments, order, samples, seed)?;
        let est = runner(&plan);
        let verdict = classify(&est.coefficients, &est.stderr);
        estimates.push(est);
        match verdict {
            Verdict::Nonzero => {
                let rank = if order == 1 { HermiteRank::One } else { HermiteRank::Two };
                return Ok(RankProbe { rank, estimates });
            }
            Verdict::Inconclusive => {
                return Ok(RankProbe {
                    rank: HermiteRank::Inconclusive { order },
                    estimates,
                })
            }
            Verdict::Zero => {}
        }
    }
    Ok(RankProbe {
        rank: HermiteRank::AboveTwo,
        estimates,
    })
}

/// Order-1 coefficients of `1{Pi(X_0, ..., X_h) = pattern}` for the
/// stationary window itself (not its increments).
pub fn increment_alpha_sum_check(pattern: &Pattern, sigma: &ToeplitzCov, samples: u64, seed: u64) -> Result<OracleEstimate> {
    let plan = OraclePlan::new(Target::Pattern(*pattern), sigma, Coordinates::Levels, 1, samples, seed)?;
    Ok(run_plan(&plan))
}
