//! Exact synthesis of fractional Gaussian noise and fractional Brownian motion.

use std::fmt;
use std::sync::Arc;

use ordpat_core::cov::{fgn_autocov, toeplitz_sigma, CovModel, ToeplitzCov};
use ordpat_core::rng::{self, StreamRng};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest path length accepted by [`Method::Cholesky`].
pub const CHOLESKY_MAX_LEN: usize = 4096;

/// Relative floor below which a negative embedding eigenvalue is an error.
pub const EIGEN_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Circulant embedding of size `2n`, `O(n log n)` per path.
    #[default]
    Circulant,
    /// Dense Cholesky factor of the `n x n` covariance, `O(n^2)` per path.
    Cholesky,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Circulant => "circulant",
            Method::Cholesky => "cholesky",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub hurst: f64,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub method: Method,
}

enum Kernel {
    Circulant {
        /// `sqrt(lambda_k / 2n)`.
        weights: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Cholesky(ToeplitzCov),
}

/// Precomputed generator for paths of one `(H, n, method)`; build once and
/// share across threads.
pub struct FgnSynth {
    hurst: f64,
    n: usize,
    kernel: Kernel,
}

impl fmt::Debug for FgnSynth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FgnSynth")
            .field("hurst", &self.hurst)
            .field("n", &self.n)
            .field("method", &self.method())
            .finish()
    }
}

fn check(hurst: f64, n: usize) -> Result<()> {
    fgn_autocov(hurst, 0)?;
    if n == 0 {
        return Err(Error::Config("path length must be at least 1".into()));
    }
    Ok(())
}

/// First row `(r(0), ..., r(n), r(n-1), ..., r(1))` of the circulant embedding.
fn embedding_row(hurst: f64, n: usize) -> Result<Vec<f64>> {
    let mut row = Vec::with_capacity(2 * n);
    for k in 0..=n {
        row.push(fgn_autocov(hurst, k)?);
    }
    for k in (1..n).rev() {
        row.push(row[k]);
    }
    Ok(row)
}

/// Eigenvalues of the size-`2n` circulant embedding of the fGn covariance.
pub fn embedding_spectrum(hurst: f64, n: usize) -> Result<Vec<f64>> {
    check(hurst, n)?;
    let row = embedding_row(hurst, n)?;
    let mut buf: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    Ok(buf.iter().map(|c| c.re).collect())
}

impl FgnSynth {
    pub fn new(hurst: f64, n: usize, method: Method) -> Result<Self> {
        check(hurst, n)?;
        let kernel = match method {
            Method::Circulant => {
                let eig = embedding_spectrum(hurst, n)?;
                let max = eig.iter().cloned().fold(0.0f64, f64::max);
                let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
                let floor = -EIGEN_FLOOR * max;
                if min < floor {
                    return Err(Error::NegativeEigenvalue { value: min, floor });
                }
                let m = eig.len() as f64;
                let weights = eig.iter().map(|&l| (l.max(0.0) / m).sqrt()).collect();
                let fft = FftPlanner::new().plan_fft_forward(eig.len());
                Kernel::Circulant { weights, fft }
            }
            Method::Cholesky => {
                if n > CHOLESKY_MAX_LEN {
                    return Err(Error::Config(format!(
                        "cholesky synthesis is limited to n <= {CHOLESKY_MAX_LEN}, got {n}"
                    )));
                }
                Kernel::Cholesky(toeplitz_sigma(&CovModel::fgn(hurst)?, n)?)
            }
        };
        Ok(FgnSynth { hurst, n, kernel })
    }

    pub fn from_config(cfg: &SynthConfig) -> Result<Self> {
        Self::new(cfg.hurst, cfg.n, cfg.method)
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn method(&self) -> Method {
        match self.kernel {
            Kernel::Circulant { .. } => Method::Circulant,
            Kernel::Cholesky(_) => Method::Cholesky,
        }
    }

    /// Fills `out` (length `n`) with one path drawn from `rng`.
    ///
    /// Circulant: draws `(Z1_k, Z2_k)` for `k = 0..2n` in order, forms
    /// `W = FFT(w * (Z1 + i Z2))` and keeps `Re W[0..n]`. Cholesky: draws `n`
    /// normals `Y` and returns `A Y`.
    pub fn fill(&self, rng: &mut StreamRng, out: &mut [f64]) {
        assert_eq!(out.len(), self.n, "output length must equal n");
        match &self.kernel {
            Kernel::Circulant { weights, fft } => {
                let mut buf: Vec<Complex64> = weights
                    .iter()
                    .map(|&w| {
                        let re = rng::normal(rng);
                        let im = rng::normal(rng);
                        Complex64::new(w * re, w * im)
                    })
                    .collect();
                fft.process(&mut buf);
                for (o, c) in out.iter_mut().zip(&buf) {
                    *o = c.re;
                }
            }
            Kernel::Cholesky(cov) => {
                let mut y = vec![0.0; self.n];
                rng::fill_normal(rng, &mut y);
                cov.cholesky().mul_vec(&y, out);
            }
        }
    }

    /// Path `key` of the campaign seeded with `seed`.
    pub fn path(&self, seed: u64, key: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.fill(&mut rng::stream(seed, key), &mut out);
        out
    }
}

/// One fGn path (stream 0 of `seed`).
pub fn synth_fgn(cfg: &SynthConfig) -> Result<Vec<f64>> {
    Ok(FgnSynth::from_config(cfg)?.path(cfg.seed, 0))
}

/// Partial sums of [`synth_fgn`] prefixed with 0 (length `n + 1`).
pub fn synth_fbm(cfg: &SynthConfig) -> Result<Vec<f64>> {
    Ok(cumulative(&synth_fgn(cfg)?))
}

pub fn cumulative(increments: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for x in increments {
        acc += x;
        out.push(acc);
    }
    out
}
