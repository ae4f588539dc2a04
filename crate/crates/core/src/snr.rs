//! Post-compensation SNR: per-symbol formulas, block averaging, and the
//! parameter sweeps.
//!
//! After de-rotating by the phase estimate, the residual error ε with
//! variance σ²ε leaves SNR = Es/(2Es(1−e^{−σ²ε/2}) + σw²); after
//! conjugate-multiplying by the channel estimate the equivalent is
//! SNR = Es/(σ²ε(Es+σw²) + σw²). Block figures are the arithmetic mean of
//! the per-symbol linear SNRs, converted to dB afterwards.
//!
//! Sweep points are independent; a failing point never aborts a sweep, it
//! is recorded against its grid value instead.

use crate::bounds::{
    bim_channel, bim_phase, ch_error_variances, pn_error_variances, wiener_prior_covariance,
    SIGMA2_THETA1_DEFAULT,
};
use crate::error::{Error, Result};
use crate::fading::{correlation_matrix, ClarkeParams, DEFAULT_LAG0_BIAS};
use crate::oscillator::technology_floor_variance;
use crate::scenario::{LinkScenario, OscillatorSpec, TechnologyParams};

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// CSV cell formatting: shortest round-trip representation, scientific
/// notation below 1e-3 in magnitude.
pub fn fmt_csv(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() < 1e-3 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// SNR of one symbol after phase-noise compensation with residual phase
/// error variance `sigma2_eps` (rad²).
pub fn snr_after_pn_compensation(es: f64, sigma2_w: f64, sigma2_eps: f64) -> f64 {
    es / (2.0 * es * (1.0 - (-sigma2_eps / 2.0).exp()) + sigma2_w)
}

/// SNR of one symbol after channel compensation with residual estimation
/// error variance `sigma2_eps` (channel power units).
pub fn snr_after_ch_compensation(es: f64, sigma2_w: f64, sigma2_eps: f64) -> f64 {
    es / (sigma2_eps * (es + sigma2_w) + sigma2_w)
}

/// Which impairment a profile describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Impairment {
    PhaseNoise,
    Channel,
}

/// Per-symbol post-compensation SNRs of one block, with the linear-domain
/// block average.
#[derive(Debug, Clone)]
pub struct SnrProfile {
    pub per_symbol: Vec<f64>,
    pub avg_linear: f64,
    pub impairment: Impairment,
}

impl SnrProfile {
    fn from_per_symbol(per_symbol: Vec<f64>, impairment: Impairment) -> Self {
        let avg_linear = per_symbol.iter().sum::<f64>() / per_symbol.len() as f64;
        Self {
            per_symbol,
            avg_linear,
            impairment,
        }
    }

    pub fn avg_db(&self) -> f64 {
        to_db(self.avg_linear)
    }

    /// dB-domain block average (mean of per-symbol dB values); kept for
    /// comparing the two averaging conventions.
    pub fn avg_db_domain(&self) -> f64 {
        self.per_symbol.iter().map(|&s| to_db(s)).sum::<f64>() / self.per_symbol.len() as f64
    }
}

/// Phase-noise block SNR from raw parameters: builds C and B_PN for the
/// given innovation variance and applies the per-symbol formula.
pub fn block_snr_phase_raw(
    block_len: usize,
    es: f64,
    sigma2_w: f64,
    sigma2_zeta: f64,
) -> Result<SnrProfile> {
    let c = wiener_prior_covariance(block_len, SIGMA2_THETA1_DEFAULT, sigma2_zeta)?;
    let b = bim_phase(es / sigma2_w, &c)?;
    let prof = pn_error_variances(&b)?;
    Ok(SnrProfile::from_per_symbol(
        prof.values
            .iter()
            .map(|&v| snr_after_pn_compensation(es, sigma2_w, v))
            .collect(),
        Impairment::PhaseNoise,
    ))
}

/// Channel block SNR from raw parameters: builds R (with the given
/// regularization bias) and B_CH and applies the per-symbol formula.
pub fn block_snr_channel_raw(
    block_len: usize,
    es: f64,
    sigma2_w: f64,
    fd_over_bw: f64,
    lag0_bias: f64,
) -> Result<SnrProfile> {
    let r = correlation_matrix(block_len, &ClarkeParams::from_normalized(fd_over_bw), lag0_bias)?;
    let b = bim_channel(es / sigma2_w, &r)?;
    let prof = ch_error_variances(&b)?;
    Ok(SnrProfile::from_per_symbol(
        prof.values
            .iter()
            .map(|&v| snr_after_ch_compensation(es, sigma2_w, v))
            .collect(),
        Impairment::Channel,
    ))
}

/// Block SNR after phase-noise compensation for a scenario; the oscillator
/// spec is resolved against the scenario's (f0, BW).
pub fn block_snr_phase(scenario: &LinkScenario, osc: &OscillatorSpec) -> Result<SnrProfile> {
    let q = osc.innovation_variance(scenario.f0_hz, scenario.bw_hz)?;
    block_snr_phase_raw(scenario.block_len, scenario.es, scenario.sigma2_w, q)
}

/// Block SNR after channel compensation with the default lag-zero bias.
pub fn block_snr_channel(scenario: &LinkScenario) -> Result<SnrProfile> {
    block_snr_channel_with_bias(scenario, DEFAULT_LAG0_BIAS)
}

pub fn block_snr_channel_with_bias(scenario: &LinkScenario, lag0_bias: f64) -> Result<SnrProfile> {
    block_snr_channel_raw(
        scenario.block_len,
        scenario.es,
        scenario.sigma2_w,
        scenario.doppler_hz() / scenario.bw_hz,
        lag0_bias,
    )
}

/// Bandwidth rule of a center-frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BwRule {
    /// Constant bandwidth, Hz.
    Fixed(f64),
    /// BW = ratio·f0.
    Proportional(f64),
}

impl BwRule {
    pub fn bw(&self, f0_hz: f64) -> f64 {
        match self {
            BwRule::Fixed(bw) => *bw,
            BwRule::Proportional(ratio) => ratio * f0_hz,
        }
    }

    pub fn label(&self) -> String {
        match self {
            BwRule::Fixed(bw) => format!("fixed:{}", fmt_csv(*bw)),
            BwRule::Proportional(r) => format!("prop:{}", fmt_csv(*r)),
        }
    }
}

/// What a center-frequency sweep evaluates at each grid point.
#[derive(Debug, Clone)]
pub enum F0SweepMode {
    /// Technology floor σζ², rad².
    FloorVariance(TechnologyParams),
    /// Block-average SNR after phase-noise compensation, dB.
    PhaseSnr(OscillatorSpec),
    /// Block-average SNR after channel compensation, dB.
    ChannelSnr,
}

/// One named series of a sweep; failed grid points carry their error text.
#[derive(Debug, Clone)]
pub struct SweepSeries {
    pub name: String,
    pub values: Vec<std::result::Result<f64, String>>,
}

/// Sweep output: a grid of the independent variable plus one or more series
/// evaluated on it.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: String,
    pub grid: Vec<f64>,
    pub series: Vec<SweepSeries>,
}

impl SweepResult {
    /// CSV body: a header row naming the independent variable and each
    /// series, one row per grid point. Failed points render as NA and are
    /// echoed in `#` comment lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for s in &self.series {
            for (x, v) in self.grid.iter().zip(&s.values) {
                if let Err(e) = v {
                    out.push_str(&format!("# failed: series={} {}={}: {}\n", s.name, self.axis, fmt_csv(*x), e));
                }
            }
        }
        out.push_str(&self.axis);
        for s in &self.series {
            out.push(',');
            out.push_str(&s.name);
        }
        out.push('\n');
        for (i, x) in self.grid.iter().enumerate() {
            out.push_str(&fmt_csv(*x));
            for s in &self.series {
                out.push(',');
                match &s.values[i] {
                    Ok(v) => out.push_str(&fmt_csv(*v)),
                    Err(_) => out.push_str("NA"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Ok-values of one series, in grid order.
    pub fn series_values(&self, idx: usize) -> Vec<f64> {
        self.series[idx]
            .values
            .iter()
            .filter_map(|v| v.as_ref().ok().copied())
            .collect()
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidValue {
            key: "grid".into(),
            reason: "must be non-empty".into(),
        });
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidValue {
            key: "grid".into(),
            reason: "must be strictly increasing".into(),
        });
    }
    Ok(())
}

/// Logarithmically spaced grid from `start` to `stop` inclusive.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > start) {
        return Err(Error::InvalidValue {
            key: "grid".into(),
            reason: format!("need 0 < start < stop, got {start}..{stop}"),
        });
    }
    if points < 2 {
        return Err(Error::InvalidValue {
            key: "grid".into(),
            reason: "need at least 2 points".into(),
        });
    }
    let (la, lb) = (start.ln(), stop.ln());
    Ok((0..points)
        .map(|i| match i {
            0 => start,
            i if i == points - 1 => stop,
            i => (la + (lb - la) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect())
}

/// Sweeps the center frequency. Each grid point re-derives the bandwidth
/// from the rule and evaluates the mode; per-point failures are recorded
/// and the sweep continues.
pub fn sweep_f0(
    template: &LinkScenario,
    grid: &[f64],
    bw_rule: BwRule,
    mode: &F0SweepMode,
) -> Result<SweepResult> {
    check_grid(grid)?;
    let name = match mode {
        F0SweepMode::FloorVariance(t) => {
            format!("sigma2_zeta:{}:{}", t.name.to_lowercase().replace(' ', "_"), bw_rule.label())
        }
        F0SweepMode::PhaseSnr(_) => format!("snr_pn_db:{}", bw_rule.label()),
        F0SweepMode::ChannelSnr => format!("snr_ch_db:{}", bw_rule.label()),
    };
    let values = grid
        .iter()
        .map(|&f0| {
            let scn = template.with_f0_bw(f0, bw_rule.bw(f0));
            match mode {
                F0SweepMode::FloorVariance(tech) => {
                    Ok(technology_floor_variance(tech, scn.f0_hz, scn.bw_hz))
                }
                F0SweepMode::PhaseSnr(osc) => block_snr_phase(&scn, osc).map(|p| p.avg_db()),
                F0SweepMode::ChannelSnr => block_snr_channel(&scn).map(|p| p.avg_db()),
            }
            .map_err(|e: Error| e.to_string())
        })
        .collect();
    Ok(SweepResult {
        axis: "f0_hz".into(),
        grid: grid.to_vec(),
        series: vec![SweepSeries { name, values }],
    })
}

/// Matched-bandwidth comparison: at each normalized frequency x = fD/BW =
/// f3dB/BW, evaluates both block SNRs with the phase process set to
/// σζ² = 4π·x and the channel to normalized Doppler x.
pub fn sweep_matched_bandwidths(grid: &[f64], scenario: &LinkScenario) -> Result<SweepResult> {
    check_grid(grid)?;
    if grid[0] <= 0.0 || *grid.last().unwrap() >= 0.5 {
        return Err(Error::InvalidValue {
            key: "grid".into(),
            reason: "normalized frequencies must lie in (0, 0.5)".into(),
        });
    }
    let (k, es, s2w) = (scenario.block_len, scenario.es, scenario.sigma2_w);
    let phase = grid
        .iter()
        .map(|&x| {
            block_snr_phase_raw(k, es, s2w, 4.0 * std::f64::consts::PI * x)
                .map(|p| p.avg_db())
                .map_err(|e| e.to_string())
        })
        .collect();
    let channel = grid
        .iter()
        .map(|&x| {
            block_snr_channel_raw(k, es, s2w, x, DEFAULT_LAG0_BIAS)
                .map(|p| p.avg_db())
                .map_err(|e| e.to_string())
        })
        .collect();
    Ok(SweepResult {
        axis: "fd_over_bw".into(),
        grid: grid.to_vec(),
        series: vec![
            SweepSeries { name: "snr_pn_db".into(), values: phase },
            SweepSeries { name: "snr_ch_db".into(), values: channel },
        ],
    })
}

/// Equal-error comparison: evaluates both per-symbol SNR formulas on the
/// same error-variance grid.
pub fn sweep_equal_error(grid: &[f64], es: f64, sigma2_w: f64) -> Result<SweepResult> {
    check_grid(grid)?;
    if grid[0] <= 0.0 {
        return Err(Error::InvalidValue {
            key: "grid".into(),
            reason: "error variances must be positive".into(),
        });
    }
    let phase = grid
        .iter()
        .map(|&v| Ok(to_db(snr_after_pn_compensation(es, sigma2_w, v))))
        .collect();
    let channel = grid
        .iter()
        .map(|&v| Ok(to_db(snr_after_ch_compensation(es, sigma2_w, v))))
        .collect();
    Ok(SweepResult {
        axis: "sigma2_eps".into(),
        grid: grid.to_vec(),
        series: vec![
            SweepSeries { name: "snr_pn_db".into(), values: phase },
            SweepSeries { name: "snr_ch_db".into(), values: channel },
        ],
    })
}
