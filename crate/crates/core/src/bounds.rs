//! Bayesian information matrices for the block phase-noise and channel
//! estimators, and the per-symbol error-variance bounds extracted from
//! their inverses.
//!
//! Phase: the estimator of θ_1..θ_K over one block sees a Gaussian
//! likelihood with per-symbol information 2Es/σw² and a random-walk prior
//! with covariance [C]_{m,n} = σ²θ1 + (min(m,n)−1)·σζ². The information
//! matrix is B_PN = (2Es/σw²)·I + C⁻¹ and diag(B_PN⁻¹) lower-bounds the
//! per-symbol estimation error variance.
//!
//! Channel: stacking real and imaginary components of h into a 2K vector
//! with prior blockdiag(R, R) gives B_CH = (2Es/σw²)·I_2K + blockdiag(R,R)⁻¹
//! and the per-symbol error variance bound [B_CH⁻¹]_{k,k} + [B_CH⁻¹]_{k+K,k+K}.
//!
//! All inversions go through Cholesky; matrices are immutable once built
//! and their factorizations cached.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Gaussian-surrogate variance for the first-symbol phase: the variance of
/// a uniform draw over [0, 2π). The prior anchor decays within a few
/// symbols, so the block bound is insensitive to this choice (doubling it
/// moves mid-block variances by < 0.1%).
pub const SIGMA2_THETA1_DEFAULT: f64 = PI * PI / 3.0;

/// Which bound a variance profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Phase,
    Channel,
}

/// Per-symbol error-variance lower bounds for one block.
#[derive(Debug, Clone)]
pub struct ErrorVarianceProfile {
    /// σ²_{·,k} for k = 1..K; rad² for phase, channel power for fading.
    pub values: Vec<f64>,
    pub bound: BoundKind,
}

impl ErrorVarianceProfile {
    fn new(values: Vec<f64>, bound: BoundKind) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidValue {
                key: "error_variance".into(),
                reason: format!("bound produced a non-positive or non-finite entry {bad}"),
            });
        }
        Ok(Self { values, bound })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV body with columns (k, sigma2_eps).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sigma2_eps\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, crate::snr::fmt_csv(*v)));
        }
        out
    }
}

/// Prior covariance of the anchored random walk,
/// [C]_{m,n} = σ²θ1 + (min(m,n)−1)·σζ² (1-based m, n).
///
/// σζ² = 0 is rejected: C degenerates to rank 1 and the construction
/// requires a proper random walk. Callers wanting "no phase noise" should
/// bypass the bound and use error variance 0.
pub fn wiener_prior_covariance(k: usize, sigma2_theta1: f64, sigma2_zeta: f64) -> Result<SymMatrix> {
    assert!(k >= 1, "K must be >= 1");
    if sigma2_zeta <= 0.0 || sigma2_zeta.is_nan() {
        return Err(Error::DegeneratePrior(sigma2_zeta));
    }
    if sigma2_theta1 <= 0.0 || sigma2_theta1.is_nan() {
        return Err(Error::InvalidValue {
            key: "sigma2_theta1".into(),
            reason: format!("must be > 0, got {sigma2_theta1}"),
        });
    }
    Ok(SymMatrix::from_fn(k, |i, j| {
        sigma2_theta1 + (i.min(j) as f64) * sigma2_zeta
    }))
}

/// Phase-noise Bayesian information matrix B_PN = 2·snr_awgn·I + C⁻¹.
pub fn bim_phase(snr_awgn: f64, c: &SymMatrix) -> Result<SymMatrix> {
    let c_inv = c.inverse("phase prior covariance")?;
    let two_snr = 2.0 * snr_awgn;
    let b = SymMatrix::from_fn(c.dim(), |i, j| {
        c_inv.get(i, j) + if i == j { two_snr } else { 0.0 }
    });
    b.require_positive_definite("phase information matrix")?;
    Ok(b)
}

/// Per-symbol phase error-variance bounds, diag(B_PN⁻¹).
pub fn pn_error_variances(b: &SymMatrix) -> Result<ErrorVarianceProfile> {
    ErrorVarianceProfile::new(b.diag_of_inverse("phase information matrix")?, BoundKind::Phase)
}

/// Channel Bayesian information matrix, the 2K×2K block-diagonal
/// B_CH = 2·snr_awgn·I + blockdiag(R, R)⁻¹.
pub fn bim_channel(snr_awgn: f64, r: &SymMatrix) -> Result<SymMatrix> {
    let r_inv = r.inverse("channel correlation matrix")?;
    let k = r.dim();
    let two_snr = 2.0 * snr_awgn;
    let b = SymMatrix::from_fn(2 * k, |i, j| {
        let same_block = (i < k) == (j < k);
        let v = if same_block {
            r_inv.get(i % k, j % k)
        } else {
            0.0
        };
        v + if i == j { two_snr } else { 0.0 }
    });
    b.require_positive_definite("channel information matrix")?;
    Ok(b)
}

/// Per-symbol channel error-variance bounds,
/// [B_CH⁻¹]_{k,k} + [B_CH⁻¹]_{k+K,k+K} (= 2[B_CH⁻¹]_{k,k} by symmetry).
pub fn ch_error_variances(b_ch: &SymMatrix) -> Result<ErrorVarianceProfile> {
    let diag = b_ch.diag_of_inverse("channel information matrix")?;
    let k = diag.len() / 2;
    let values = (0..k).map(|i| diag[i] + diag[i + k]).collect();
    ErrorVarianceProfile::new(values, BoundKind::Channel)
}
