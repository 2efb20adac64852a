//! Autocovariance models, Toeplitz covariance matrices and their Cholesky factors.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Memory parameter `D` and the limit `L` of the slowly varying factor in
/// `r(k) ~ L k^{-D}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrdParams {
    pub d: f64,
    pub l_inf: f64,
}

impl LrdParams {
    pub fn new(d: f64, l_inf: f64) -> Result<Self> {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::InvalidParameter { name: "D", value: d });
        }
        if !(l_inf > 0.0 && l_inf.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "L",
                value: l_inf,
            });
        }
        Ok(LrdParams { d, l_inf })
    }

    /// Hurst index `1 - D/2` of the matching fractional Gaussian noise.
    pub fn hurst(&self) -> f64 {
        1.0 - self.d / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CovModel {
    /// Fractional Gaussian noise with Hurst index `hurst`.
    Fgn { hurst: f64 },
    /// Explicit autocorrelations `r(0) = 1, r(1), ...`.
    Table {
        values: Vec<f64>,
        lrd: Option<LrdParams>,
    },
}

impl CovModel {
    pub fn fgn(hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        Ok(CovModel::Fgn { hurst })
    }

    /// Validates `r(0) = 1`, `|r(k)| <= 1` and positive definiteness of the
    /// Toeplitz matrix spanned by the whole table.
    pub fn table(values: Vec<f64>, lrd: Option<LrdParams>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if (values[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidTable(format!(
                "r(0) must be 1, got {}",
                values[0]
            )));
        }
        if let Some(k) = values.iter().position(|v| v.abs() > 1.0) {
            return Err(Error::InvalidTable(format!("|r({k})| exceeds 1")));
        }
        ToeplitzCov::from_row(values.clone())?;
        Ok(CovModel::Table { values, lrd })
    }

    pub fn autocov(&self, lag: usize) -> Result<f64> {
        match self {
            CovModel::Fgn { hurst } => Ok(fgn_autocov_unchecked(*hurst, lag)),
            CovModel::Table { values, .. } => values.get(lag).copied().ok_or_else(|| {
                Error::InvalidTable(format!(
                    "lag {lag} beyond table of length {}",
                    values.len()
                ))
            }),
        }
    }

    /// Long-range dependence parameters, when the model has them.
    /// For fGn these exist only for `H > 1/2`: `D = 2 - 2H`, `L = H(2H - 1)`.
    pub fn lrd(&self) -> Option<LrdParams> {
        match self {
            CovModel::Fgn { hurst } if *hurst > 0.5 => Some(LrdParams {
                d: 2.0 - 2.0 * hurst,
                l_inf: hurst * (2.0 * hurst - 1.0),
            }),
            CovModel::Fgn { .. } => None,
            CovModel::Table { lrd, .. } => *lrd,
        }
    }

    pub fn require_lrd(&self) -> Result<LrdParams> {
        self.lrd().ok_or(Error::MissingLrdParams)
    }

    pub fn r1(&self) -> Result<f64> {
        self.autocov(1)
    }
}

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "H",
            value: hurst,
        })
    }
}

/// Autocovariance of unit-variance fractional Gaussian noise,
/// `r(k) = ((k+1)^{2H} - 2k^{2H} + (k-1)^{2H}) / 2`.
pub fn fgn_autocov(hurst: f64, lag: usize) -> Result<f64> {
    check_hurst(hurst)?;
    Ok(fgn_autocov_unchecked(hurst, lag))
}

pub(crate) fn fgn_autocov_unchecked(hurst: f64, lag: usize) -> f64 {
    let a = 2.0 * hurst;
    match lag {
        0 => 1.0,
        _ if hurst == 0.5 => 0.0,
        1 => libm::exp2(a - 1.0) - 1.0,
        _ => {
            // Factor out k^{2H}; expm1/log1p keep the second difference accurate
            // at large lags where the three powers nearly cancel.
            let k = lag as f64;
            let inv = 1.0 / k;
            let up = libm::expm1(a * libm::log1p(inv));
            let down = libm::expm1(a * libm::log1p(-inv));
            0.5 * libm::pow(k, a) * (up + down)
        }
    }
}

/// Probability `c(H) = 1 - (2/pi) asin(2^{H-1})` that an order-2 window of
/// fGn increments is a turning point.
pub fn c_of_h(hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    Ok(1.0 - 2.0 / PI * libm::asin(libm::exp2(hurst - 1.0)))
}

/// Inverse of [`c_of_h`], clamped at zero: `g(x) = max(0, log2(cos(pi x / 2)) + 1)`.
pub fn g_of_x(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter { name: "x", value: x });
    }
    Ok(g_unchecked(x))
}

pub(crate) fn g_unchecked(x: f64) -> f64 {
    let v = libm::log2(libm::cos(PI * x / 2.0)) + 1.0;
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Truncated sum `sum_{|k| <= K} r_Z(k)` for the differenced process
/// `Z_j = X_j - X_{j-1}`, where `r_Z(k) = 2 r(k) - r(k-1) - r(k+1)`.
pub fn increment_antipersistence_check(model: &CovModel, truncation: usize) -> Result<f64> {
    let r = |k: i64| model.autocov(k.unsigned_abs() as usize);
    let rz = |k: i64| -> Result<f64> { Ok(2.0 * r(k)? - r(k - 1)? - r(k + 1)?) };
    let mut tail = 0.0;
    for k in (1..=truncation as i64).rev() {
        tail += rz(k)?;
    }
    Ok(rz(0)? + 2.0 * tail)
}

/// Lower-triangular Cholesky factor stored packed by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    packed: Vec<f64>,
}

impl CholeskyFactor {
    #[inline]
    fn offset(i: usize) -> usize {
        i * (i + 1) / 2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`; zero above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.packed[Self::offset(i) + j]
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let o = Self::offset(i);
        &self.packed[o..=o + i]
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let p = self.dim;
        let mut out = alloc::vec![0.0; p * p];
        for i in 0..p {
            out[i * p..i * p + i + 1].copy_from_slice(self.row(i));
        }
        out
    }

    /// `A y`.
    pub fn mul_vec(&self, y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.row(i).iter().zip(y).map(|(a, b)| a * b).sum();
        }
    }

    /// Solves `A x = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        for i in 0..self.dim {
            let row = self.row(i);
            let mut s = b[i];
            for j in 0..i {
                s -= row[j] * b[j];
            }
            b[i] = s / row[i];
        }
    }

    /// Solves `A^T x = b` in place.
    pub fn solve_upper_transpose_in_place(&self, b: &mut [f64]) {
        for i in (0..self.dim).rev() {
            let mut s = b[i];
            for (j, bj) in b.iter().enumerate().skip(i + 1) {
                s -= self.get(j, i) * bj;
            }
            b[i] = s / self.get(i, i);
        }
    }
}

/// Symmetric Toeplitz covariance `(r(|i - j|))` of dimension `p`, positive
/// definite by construction. The Cholesky factor is computed once and kept.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCov {
    row: Vec<f64>,
    factor: CholeskyFactor,
}

impl ToeplitzCov {
    /// Builds the matrix from its first row; fails if it is not positive definite.
    pub fn from_row(row: Vec<f64>) -> Result<Self> {
        if row.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if let Some(index) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if (row[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "r(0)",
                value: row[0],
            });
        }
        let factor = factorize(&row)?;
        Ok(ToeplitzCov { row, factor })
    }

    /// `2 x 2` matrix with off-diagonal `r1`.
    pub fn lag_one(r1: f64) -> Result<Self> {
        Self::from_row(alloc::vec![1.0, r1])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut row = alloc::vec![0.0; dim];
        if dim > 0 {
            row[0] = 1.0;
        }
        Self::from_row(row)
    }

    pub fn dim(&self) -> usize {
        self.row.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row[i.abs_diff(j)]
    }

    pub fn first_row(&self) -> &[f64] {
        &self.row
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let p = self.dim();
        let mut out = alloc::vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                out[i * p + j] = self.get(i, j);
            }
        }
        out
    }

    pub fn cholesky(&self) -> &CholeskyFactor {
        &self.factor
    }

    /// `Sigma v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let p = self.dim();
        (0..p)
            .map(|i| (0..p).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `Sigma^{-1} v` through the Cholesky factor.
    pub fn solve(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let mut x = v.to_vec();
        self.factor.solve_lower_in_place(&mut x);
        self.factor.solve_upper_transpose_in_place(&mut x);
        Ok(x)
    }
}

fn factorize(row: &[f64]) -> Result<CholeskyFactor> {
    let p = row.len();
    let mut packed = alloc::vec![0.0; p * (p + 1) / 2];
    for i in 0..p {
        let oi = CholeskyFactor::offset(i);
        for j in 0..=i {
            let oj = CholeskyFactor::offset(j);
            let mut s = row[i - j];
            for k in 0..j {
                s -= packed[oi + k] * packed[oj + k];
            }
            if i == j {
                if s.is_nan() || s <= 0.0 {
                    return Err(Error::NotPositiveDefinite { pivot: i });
                }
                packed[oi + i] = libm::sqrt(s);
            } else {
                packed[oi + j] = s / packed[oj + j];
            }
        }
    }
    Ok(CholeskyFactor { dim: p, packed })
}

/// Toeplitz covariance of `p` consecutive values of the model.
pub fn toeplitz_sigma(model: &CovModel, dim: usize) -> Result<ToeplitzCov> {
    let row = (0..dim).map(|k| model.autocov(k)).collect::<Result<Vec<_>>>()?;
    ToeplitzCov::from_row(row)
}

/// Lower-triangular `A` with `A A^T = Sigma`.
pub fn cholesky_lower(m: &ToeplitzCov) -> &CholeskyFactor {
    m.cholesky()
}

/// `Sigma^{-1} v`.
pub fn solve_sigma(m: &ToeplitzCov, v: &[f64]) -> Result<Vec<f64>> {
    m.solve(v)
}
