//! Sliding-window pattern frequencies and their standardizations.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coeff::{c2, Target};
use crate::cov::CovModel;
use crate::error::{Error, Result};
use crate::pattern::{self, pattern_count, Pattern, ReversalGroup, DEFAULT_ENUMERATION_CAP, MAX_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpretation {
    /// Observations `xi_t`; windows of `h + 1` consecutive values.
    Levels,
    /// Increments `X_t = xi_t - xi_{t-1}`; windows of `h` increments.
    Increments,
}

/// A finite series together with how its windows are read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesView<'a> {
    values: &'a [f64],
    interpretation: Interpretation,
}

impl<'a> SeriesView<'a> {
    pub fn new(values: &'a [f64], interpretation: Interpretation) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(SeriesView {
            values,
            interpretation,
        })
    }

    pub fn levels(values: &'a [f64]) -> Result<Self> {
        Self::new(values, Interpretation::Levels)
    }

    pub fn increments(values: &'a [f64]) -> Result<Self> {
        Self::new(values, Interpretation::Increments)
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    pub fn interpretation(&self) -> Interpretation {
        self.interpretation
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number `n` of complete windows of order `h`: `len - h` for levels,
    /// `len - h + 1` for increments.
    pub fn window_count(&self, order: usize) -> Result<usize> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::OrderOutOfRange {
                order,
                max: MAX_ORDER,
            });
        }
        let span = match self.interpretation {
            Interpretation::Levels => order + 1,
            Interpretation::Increments => order,
        };
        if self.values.len() < span {
            return Err(Error::SeriesTooShort {
                len: self.values.len(),
                needed: span,
            });
        }
        Ok(self.values.len() - span + 1)
    }

    /// Calls `f` with the descending position order of each window in
    /// `start..end`. Windows only read their own values, so disjoint ranges
    /// can be processed independently.
    pub fn for_each_window<F: FnMut(&[u8])>(&self, order: usize, start: usize, end: usize, mut f: F) {
        let mut path = [0.0f64; MAX_ORDER + 1];
        let mut perm = [0u8; MAX_ORDER + 1];
        for i in start..end {
            let window = match self.interpretation {
                Interpretation::Levels => &self.values[i..=i + order],
                Interpretation::Increments => {
                    pattern::cumulate(&self.values[i..i + order], &mut path[..=order]);
                    &path[..=order]
                }
            };
            pattern::encode_perm_into(window, &mut perm[..=order]);
            f(&perm[..=order]);
        }
    }

    /// Number of windows in `start..end` whose pattern satisfies `pred`.
    pub fn count_range<P: Fn(&[u8]) -> bool>(&self, order: usize, start: usize, end: usize, pred: P) -> u64 {
        let mut hits = 0u64;
        self.for_each_window(order, start, end, |perm| {
            if pred(perm) {
                hits += 1;
            }
        });
        hits
    }

    /// Pattern histogram over `start..end`, indexed by Lehmer index.
    pub fn histogram_range(&self, order: usize, start: usize, end: usize) -> Vec<u64> {
        let mut counts = vec![0u64; pattern_count(order) as usize];
        let mut path = [0.0f64; MAX_ORDER + 1];
        for i in start..end {
            let window = match self.interpretation {
                Interpretation::Levels => &self.values[i..=i + order],
                Interpretation::Increments => {
                    pattern::cumulate(&self.values[i..i + order], &mut path[..=order]);
                    &path[..=order]
                }
            };
            counts[pattern::encode_unchecked(window, order).index() as usize] += 1;
        }
        counts
    }
}

/// Relative frequency of a pattern or a reversal group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub n: usize,
    pub target: Target,
    pub standardized: Option<f64>,
}

impl Target {
    /// Membership test on a raw position order.
    pub fn matches(&self, perm: &[u8]) -> bool {
        match self {
            Target::Pattern(p) => p.as_slice() == perm,
            Target::Group(g) => g.members().iter().any(|m| m.as_slice() == perm),
        }
    }

    /// Number of patterns averaged over.
    pub fn size(&self) -> usize {
        match self {
            Target::Pattern(_) => 1,
            Target::Group(g) => g.len(),
        }
    }
}

/// Builds an [`Estimate`] from a window count and a hit count.
pub fn estimate_from_count(target: Target, n: usize, hits: u64) -> Estimate {
    let value = hits as f64 / (n as f64 * target.size() as f64);
    Estimate {
        value,
        n,
        target,
        standardized: None,
    }
}

fn count_target(series: &SeriesView, target: &Target) -> Result<(usize, u64)> {
    let order = target.order();
    let n = series.window_count(order)?;
    Ok((n, series.count_range(order, 0, n, |perm| target.matches(perm))))
}

/// `q_n(pi) = #{windows with pattern pi} / n`.
pub fn q_hat(series: &SeriesView, pattern: &Pattern) -> Result<Estimate> {
    let target = Target::Pattern(*pattern);
    let (n, hits) = count_target(series, &target)?;
    Ok(estimate_from_count(target, n, hits))
}

/// Group average `p_n = (1/#g) #{windows with pattern in g} / n`.
pub fn p_hat(series: &SeriesView, group: &ReversalGroup) -> Result<Estimate> {
    let target = Target::Group(group.clone());
    let (n, hits) = count_target(series, &target)?;
    Ok(estimate_from_count(target, n, hits))
}

/// Frequency of order-2 turning-point windows, `4 p_n` for the four-element group.
pub fn c_hat(series: &SeriesView) -> Result<f64> {
    Ok(4.0 * p_hat(series, &ReversalGroup::turning_points())?.value)
}

/// `q_n` of every pattern of the given order, indexed by Lehmer index.
pub fn q_hat_all(series: &SeriesView, order: usize) -> Result<Vec<f64>> {
    if order > DEFAULT_ENUMERATION_CAP {
        return Err(Error::OrderOutOfRange {
            order,
            max: DEFAULT_ENUMERATION_CAP,
        });
    }
    let n = series.window_count(order)?;
    let counts = series.histogram_range(order, 0, n);
    Ok(counts.iter().map(|&c| c as f64 / n as f64).collect())
}

/// Sample autocovariance `(1/N) sum_i X_i X_{i+l}` over the `N - l`
/// available pairs, without mean correction.
pub fn r_hat(series: &SeriesView, lag: usize) -> Result<f64> {
    let x = series.values();
    if x.len() <= lag {
        return Err(Error::SeriesTooShort {
            len: x.len(),
            needed: lag + 1,
        });
    }
    let s: f64 = x.iter().zip(&x[lag..]).map(|(a, b)| a * b).sum();
    Ok(s / x.len() as f64)
}

/// Probability of an ordinal pattern of a stationary Gaussian increment
/// sequence with lag-one correlation `r1`, for `h <= 2`.
pub fn pattern_probability(pattern: &Pattern, r1: f64) -> Result<f64> {
    if r1.abs() >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "r1",
            value: r1,
        });
    }
    match pattern.order() {
        1 => Ok(0.5),
        2 => {
            // P(X_1 >= 0, X_2 >= 0) = 1/4 + asin(r)/(2 pi).
            let monotone = 0.25 + libm::asin(r1) / (2.0 * PI);
            let up = Pattern::increasing(2)?;
            if *pattern == up || *pattern == up.space_reverse() {
                Ok(monotone)
            } else {
                Ok((1.0 - 2.0 * monotone) / 4.0)
            }
        }
        h => Err(Error::NotClosedForm { order: h }),
    }
}

/// Model probability `E f` of a target for `h <= 2`.
pub fn target_probability(target: &Target, r1: f64) -> Result<f64> {
    match target {
        Target::Pattern(p) => pattern_probability(p, r1),
        Target::Group(g) => {
            let mut total = 0.0;
            for m in g.members() {
                total += pattern_probability(m, r1)?;
            }
            Ok(total / g.len() as f64)
        }
    }
}

fn truth(est: &Estimate, model: &CovModel, supplied: Option<f64>) -> Result<f64> {
    if let Some(p) = supplied {
        return Ok(p);
    }
    match target_probability(&est.target, model.r1()?) {
        Ok(p) => Ok(p),
        Err(Error::NotClosedForm { .. }) => Err(Error::MissingProbability),
        Err(e) => Err(e),
    }
}

/// `n^{D/2} L^{-1/2} (q_n - p)`. `probability` overrides the closed form
/// (required for `h > 2`).
pub fn standardize_rank1(est: &Estimate, model: &CovModel, probability: Option<f64>) -> Result<f64> {
    let lrd = model.require_lrd()?;
    let p = truth(est, model, probability)?;
    let n = est.n as f64;
    Ok(libm::pow(n, lrd.d / 2.0) / libm::sqrt(lrd.l_inf) * (est.value - p))
}

/// `n^D (2 C_2)^{-1/2} L^{-1} (p_n - p)`, defined for `D < 1/2`.
pub fn standardize_rank2(est: &Estimate, model: &CovModel, probability: Option<f64>) -> Result<f64> {
    let lrd = model.require_lrd()?;
    let constant = c2(lrd.d)?;
    let p = truth(est, model, probability)?;
    let n = est.n as f64;
    Ok(libm::pow(n, lrd.d) / (libm::sqrt(2.0 * constant) * lrd.l_inf) * (est.value - p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::enumerate_patterns;

    fn pat(v: &[usize]) -> Pattern {
        Pattern::new(v).unwrap()
    }

    #[test]
    fn increasing_levels() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let s = SeriesView::levels(&x).unwrap();
        let e = q_hat(&s, &pat(&[2, 1, 0])).unwrap();
        assert_eq!((e.value, e.n), (1.0, 2));
        let g = ReversalGroup::of(&pat(&[2, 1, 0]));
        assert_eq!(p_hat(&s, &g).unwrap().value, 0.5);
        assert_eq!(c_hat(&s).unwrap(), 0.0);
    }

    #[test]
    fn alternating_is_all_turning_points() {
        let x: Vec<f64> = (0..50).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let s = SeriesView::levels(&x).unwrap();
        assert_eq!(c_hat(&s).unwrap(), 1.0);
    }

    #[test]
    fn window_counts() {
        let x = [0.0; 5];
        assert_eq!(SeriesView::levels(&x).unwrap().window_count(2).unwrap(), 3);
        assert_eq!(SeriesView::increments(&x).unwrap().window_count(2).unwrap(), 4);
        let short = [1.0, 2.0];
        assert!(matches!(
            q_hat(&SeriesView::levels(&short).unwrap(), &pat(&[2, 1, 0])),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(SeriesView::levels(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn frequencies_sum_to_one() {
        let x: Vec<f64> = (0..200).map(|i| libm::sin(i as f64 * 1.7) + 0.01 * i as f64).collect();
        let s = SeriesView::levels(&x).unwrap();
        let all = q_hat_all(&s, 3).unwrap();
        assert!((all.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for p in enumerate_patterns(3).unwrap() {
            assert_eq!(all[p.index() as usize], q_hat(&s, &p).unwrap().value);
        }
    }

    #[test]
    fn r_hat_examples() {
        let x = [2.0; 10];
        let s = SeriesView::increments(&x).unwrap();
        assert_eq!(r_hat(&s, 0).unwrap(), 4.0);
        assert!((r_hat(&s, 2).unwrap() - 4.0 * 8.0 / 10.0).abs() < 1e-15);
        assert!(r_hat(&s, 10).is_err());
    }

    #[test]
    fn probabilities() {
        for r in [-0.6, 0.0, 0.3, 0.9] {
            let total: f64 = enumerate_patterns(2)
                .unwrap()
                .iter()
                .map(|p| pattern_probability(p, r).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-15);
        }
        assert_eq!(pattern_probability(&pat(&[2, 1, 0]), 0.0).unwrap(), 0.25);
        let r = libm::exp2(0.6) - 1.0;
        let turn = target_probability(&Target::Group(ReversalGroup::turning_points()), r).unwrap();
        assert!((turn - 0.081_881_44).abs() < 1e-8);
        assert!(matches!(pattern_probability(&pat(&[3, 2, 1, 0]), 0.1), Err(Error::NotClosedForm { .. })));
    }

    #[test]
    fn standardization() {
        let model = CovModel::fgn(0.8).unwrap();
        let r = model.r1().unwrap();
        let p = pattern_probability(&pat(&[2, 1, 0]), r).unwrap();
        let mut est = estimate_from_count(Target::Pattern(pat(&[2, 1, 0])), 10_000, 0);
        est.value = p;
        assert_eq!(standardize_rank1(&est, &model, None).unwrap(), 0.0);
        est.value = p + 1e-3;
        let z = standardize_rank1(&est, &model, None).unwrap();
        assert!((z - 0.009_107_08).abs() < 1e-8, "{z}");
        let big = estimate_from_count(Target::Pattern(pat(&[3, 2, 1, 0])), 100, 3);
        assert_eq!(standardize_rank1(&big, &model, None), Err(Error::MissingProbability));
        assert!(standardize_rank1(&big, &model, Some(0.1)).is_ok());
        let g = estimate_from_count(Target::Group(ReversalGroup::turning_points()), 100, 3);
        assert!(matches!(standardize_rank2(&g, &CovModel::fgn(0.7).unwrap(), None), Err(Error::OutOfRegime(_))));
        let m9 = CovModel::fgn(0.9).unwrap();
        assert!(standardize_rank2(&g, &m9, None).is_ok());
        assert_eq!(
            standardize_rank1(&est, &CovModel::fgn(0.4).unwrap(), None),
            Err(Error::MissingLrdParams)
        );
    }
}
