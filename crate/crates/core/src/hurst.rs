//! Zero-crossing Hurst estimation, `H_n = g(c_n)`.

use core::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::coeff::phi0;
use crate::cov::{c_of_h, g_unchecked};
use crate::error::{Error, Result};
use crate::estimate::{p_hat, SeriesView};
use crate::pattern::ReversalGroup;

/// Half-width of the band around `H = 3/4` classified as [`Regime::Boundary`].
pub const BOUNDARY_HALF_WIDTH: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `H < 3/4`: Gaussian limit.
    Srd,
    /// Within [`BOUNDARY_HALF_WIDTH`] of `3/4`; no standardization offered.
    Boundary,
    /// `H > 3/4`: Rosenblatt limit.
    Lrd,
}

impl Regime {
    pub fn classify(h: f64) -> Regime {
        if (h - 0.75).abs() < BOUNDARY_HALF_WIDTH {
            Regime::Boundary
        } else if h < 0.75 {
            Regime::Srd
        } else {
            Regime::Lrd
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurstResult {
    pub h_hat: f64,
    pub c_hat: f64,
    pub n: usize,
    pub standardized: Option<f64>,
    pub regime: Regime,
}

pub fn estimate_hurst(series: &SeriesView) -> Result<HurstResult> {
    let est = p_hat(series, &ReversalGroup::turning_points())?;
    Ok(from_turning_frequency(4.0 * est.value, est.n))
}

/// Builds the result from an already counted turning-point frequency.
pub fn from_turning_frequency(c_hat: f64, n: usize) -> HurstResult {
    let h_hat = g_unchecked(c_hat);
    HurstResult {
        h_hat,
        c_hat,
        n,
        standardized: None,
        regime: Regime::classify(h_hat),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurstConstants {
    pub prefactor: f64,
    pub limit_scale: f64,
}

/// Normalization of `H_n - H` for `3/4 < H < 1`, outside the boundary band.
///
/// `prefactor * n^{2-2H} (H_n - H)` converges to `limit_scale * Z` with `Z`
/// a unit-variance Rosenblatt variable, where
/// `prefactor = sqrt(4H - 3) / (H sqrt(2(2H - 1)))` and
/// `limit_scale = (pi / ln 2) tan(pi c(H) / 2) phi(0)^2 sqrt(2^{2-2H} - 1)`.
pub fn hurst_limit_constants(hurst: f64) -> Result<HurstConstants> {
    if !(hurst > 0.75 && hurst < 1.0) || Regime::classify(hurst) == Regime::Boundary {
        return Err(Error::OutOfRegime(alloc::format!(
            "H = {hurst}: the Rosenblatt standardization needs 3/4 + {BOUNDARY_HALF_WIDTH} <= H < 1"
        )));
    }
    let prefactor = libm::sqrt(4.0 * hurst - 3.0) / (hurst * libm::sqrt(2.0 * (2.0 * hurst - 1.0)));
    let c = c_of_h(hurst)?;
    let limit_scale = PI / LN_2
        * libm::tan(PI * c / 2.0)
        * phi0()
        * phi0()
        * libm::sqrt(libm::exp2(2.0 - 2.0 * hurst) - 1.0);
    Ok(HurstConstants {
        prefactor,
        limit_scale,
    })
}

/// Derivative of `g` at `c(H)`, `-(pi / (2 ln 2)) tan(pi c(H) / 2)`.
pub fn g_prime_at(hurst: f64) -> Result<f64> {
    let c = c_of_h(hurst)?;
    Ok(-PI / (2.0 * LN_2) * libm::tan(PI * c / 2.0))
}

/// `prefactor * n^{2-2H} (H_n - H)` for a known true `H`.
pub fn standardize_hurst(result: &HurstResult, true_hurst: f64) -> Result<f64> {
    let k = hurst_limit_constants(true_hurst)?;
    let n = result.n as f64;
    Ok(k.prefactor * libm::pow(n, 2.0 - 2.0 * true_hurst) * (result.h_hat - true_hurst))
}

impl HurstResult {
    pub fn with_standardization(mut self, true_hurst: f64) -> Result<Self> {
        self.standardized = Some(standardize_hurst(&self, true_hurst)?);
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cov::g_of_x;

    #[test]
    fn monotone_series_gives_one() {
        let x: alloc::vec::Vec<f64> = (0..20).map(|i| i as f64).collect();
        let r = estimate_hurst(&SeriesView::levels(&x).unwrap()).unwrap();
        assert_eq!((r.c_hat, r.h_hat, r.n), (0.0, 1.0, 18));
        assert_eq!(r.regime, Regime::Lrd);
    }

    #[test]
    fn exact_turning_count() {
        // Levels 0,1,0,1,2,3,...: windows 0 and 1 turn, the rest are monotone.
        let mut x = alloc::vec![0.0, 1.0, 0.0];
        x.extend((1..=8).map(|i| i as f64));
        let s = SeriesView::levels(&x).unwrap();
        let r = estimate_hurst(&s).unwrap();
        assert_eq!(r.n, 9);
        assert_eq!(r.c_hat, 2.0 / 9.0);
        assert_eq!(r.h_hat, g_of_x(2.0 / 9.0).unwrap());
    }

    #[test]
    fn regimes() {
        assert_eq!(Regime::classify(0.5), Regime::Srd);
        assert_eq!(Regime::classify(0.755), Regime::Boundary);
        assert_eq!(Regime::classify(0.8), Regime::Lrd);
    }

    #[test]
    fn constants() {
        let k = hurst_limit_constants(0.9).unwrap();
        assert!((k.prefactor - 0.680_4).abs() < 1e-4);
        assert!((k.limit_scale - 0.107_4).abs() < 1e-3);
        assert!(matches!(hurst_limit_constants(0.755), Err(Error::OutOfRegime(_))));
        assert!(matches!(hurst_limit_constants(0.75), Err(Error::OutOfRegime(_))));
        assert!(g_prime_at(0.9).unwrap() < 0.0);
    }

    #[test]
    fn limit_scale_is_slope_times_group_scale() {
        // limit_scale = |g'(c(H))| * 4 * |alpha_sum| / 2 for the turning group.
        for h in [0.8, 0.9, 0.95] {
            let r = libm::exp2(2.0 * h - 1.0) - 1.0;
            let alpha = phi0() * phi0() * libm::sqrt((1.0 - r) / (1.0 + r));
            let k = hurst_limit_constants(h).unwrap();
            let want = -g_prime_at(h).unwrap() * 4.0 * alpha / 2.0;
            assert!((k.limit_scale - want).abs() < 1e-13);
        }
    }

    #[test]
    fn standardize_zero_deviation() {
        let r = HurstResult {
            h_hat: 0.9,
            c_hat: 0.0,
            n: 1000,
            standardized: None,
            regime: Regime::Lrd,
        };
        assert_eq!(standardize_hurst(&r, 0.9).unwrap(), 0.0);
        assert_eq!(r.with_standardization(0.9).unwrap().standardized, Some(0.0));
    }
}
