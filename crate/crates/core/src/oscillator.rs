//! Wiener phase-noise model of a free-running oscillator pair.
//!
//! The per-symbol phase θ_k is a discrete Wiener process
//! θ_k = θ_{k−1} + ζ_{k−1} with white Gaussian innovations
//! ζ ~ N(0, σζ²). Its single-sideband spectrum is Lorentzian,
//! L(f) = κ/((κπ)² + f²), fully characterized by the 3-dB single-sided
//! bandwidth f3dB = κπ, and the discrete innovation variance follows from
//! the sampling rate as σζ² = 4π·f3dB/BW.
//!
//! Technology floors: the innovation variance of a practical oscillator is
//! bounded below by π²·C/(I·V·Q0²)·f0²/BW where C is an empirical noise
//! energy constant and (I, V, Q0) come from the transistor/resonator
//! catalog. The floor grows 20 dB/dec in f0 at fixed bandwidth and
//! 10 dB/dec when the bandwidth scales proportionally with f0.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::GaussianSampler;
use crate::scenario::TechnologyParams;

/// Empirical noise energy constant of the oscillator floor, joules.
/// Roughly 4.9·kT at 290 K, i.e. thermal noise plus a ~7 dB noise figure.
pub const FLOOR_NOISE_ENERGY_J: f64 = 19.496e-21;

/// One oscillator-pair characterization: the Lorentzian parameter κ, its
/// 3-dB bandwidth, and the per-symbol innovation variance at the bandwidth
/// the parameters were resolved against.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerProcessParams {
    pub kappa_hz: f64,
    pub f3db_hz: f64,
    pub sigma2_zeta: f64,
}

impl WienerProcessParams {
    pub fn from_kappa(kappa_hz: f64, bw_hz: f64) -> Self {
        let f3db = f3db_from_kappa(kappa_hz);
        Self {
            kappa_hz,
            f3db_hz: f3db,
            sigma2_zeta: innovation_variance(f3db, bw_hz),
        }
    }

    pub fn from_f3db(f3db_hz: f64, bw_hz: f64) -> Self {
        Self {
            kappa_hz: f3db_hz / PI,
            f3db_hz,
            sigma2_zeta: innovation_variance(f3db_hz, bw_hz),
        }
    }

    pub fn from_ssb_point(level_dbc_hz: f64, offset_hz: f64, bw_hz: f64) -> Result<Self> {
        Ok(Self::from_kappa(kappa_from_ssb_point(level_dbc_hz, offset_hz)?, bw_hz))
    }
}

/// Lorentzian SSB spectrum L(f) = κ/((κπ)² + f²), linear 1/Hz.
pub fn lorentzian_ssb(kappa_hz: f64, f_offset_hz: f64) -> f64 {
    kappa_hz / ((kappa_hz * PI).powi(2) + f_offset_hz * f_offset_hz)
}

/// f3dB = κπ, the offset at which the Lorentzian drops to half its
/// carrier-side level.
pub fn f3db_from_kappa(kappa_hz: f64) -> f64 {
    kappa_hz * PI
}

/// Recovers κ from a single SSB measurement (level in dBc/Hz at the given
/// offset) by solving L·π²·κ² − κ + L·f² = 0 for the smaller positive root.
///
/// The root is evaluated in the cancellation-free form 2Lf²/(1 + √disc), so
/// substituting back into the spectrum reproduces the measured level to
/// better than 1e−12 relative. In the far-from-carrier regime this
/// degrades gracefully to the κ ≈ L·f² approximation.
pub fn kappa_from_ssb_point(level_dbc_hz: f64, offset_hz: f64) -> Result<f64> {
    let level = 10f64.powf(level_dbc_hz / 10.0);
    let discriminant = 1.0 - 4.0 * level * level * PI * PI * offset_hz * offset_hz;
    if discriminant <= 0.0 {
        return Err(Error::SsbPointInfeasible {
            level_dbc_hz,
            offset_hz,
            discriminant,
        });
    }
    Ok(2.0 * level * offset_hz * offset_hz / (1.0 + discriminant.sqrt()))
}

/// Per-symbol innovation variance σζ² = 4π·f3dB/BW, rad².
pub fn innovation_variance(f3db_hz: f64, bw_hz: f64) -> f64 {
    4.0 * PI * f3db_hz / bw_hz
}

/// Technology floor on the innovation variance,
/// σζ² ≥ π²·C/(I·V·Q0²) · f0²/BW.
pub fn technology_floor_variance(tech: &TechnologyParams, f0_hz: f64, bw_hz: f64) -> f64 {
    PI * PI * FLOOR_NOISE_ENERGY_J / (tech.i_cd * tech.v_cd * tech.q0 * tech.q0) * f0_hz * f0_hz
        / bw_hz
}

/// One realization of the discrete Wiener phase process.
#[derive(Debug, Clone)]
pub struct PhasePath {
    /// Phase samples θ_1..θ_K, rad.
    pub theta: Vec<f64>,
    pub sigma2_zeta: f64,
    pub seed: u64,
}

impl PhasePath {
    /// CSV body with columns (index, theta_rad).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,theta_rad\n");
        for (i, th) in self.theta.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, crate::snr::fmt_csv(*th)));
        }
        out
    }
}

/// Generates θ_1..θ_K with θ_k = θ_{k−1} + ζ, ζ i.i.d. N(0, σζ²).
/// `theta1 = None` draws the initial phase uniformly over [0, 2π).
/// Deterministic given the seed.
pub fn wiener_sample_path(
    block_len: usize,
    sigma2_zeta: f64,
    theta1: Option<f64>,
    seed: u64,
) -> PhasePath {
    assert!(block_len >= 1, "block_len must be >= 1");
    assert!(sigma2_zeta >= 0.0, "sigma2_zeta must be >= 0");
    let mut g = GaussianSampler::new(seed);
    let start = theta1.unwrap_or_else(|| 2.0 * PI * g.uniform());
    let std = sigma2_zeta.sqrt();
    let mut theta = Vec::with_capacity(block_len);
    theta.push(start);
    for k in 1..block_len {
        theta.push(theta[k - 1] + g.normal(std));
    }
    PhasePath {
        theta,
        sigma2_zeta,
        seed,
    }
}
