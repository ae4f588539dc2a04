//! Independent Monte-Carlo and closed-form validators for the analytic
//! machinery: the per-symbol Fisher information, the LMMSE/channel-bound
//! equivalence, fixed-interval smoother MSE against the phase bound, and
//! the phase-error power identity.
//!
//! Independence rules: each oracle reaches its target quantity by a route
//! that shares no code with the implementation it checks (the LMMSE closed
//! form never touches the information-matrix constructors; the smoother is
//! a forward/backward recursion, not a matrix inverse). All comparisons are
//! 3-sigma with reported standard errors; every oracle is deterministic in
//! its seed.

use num_complex::Complex64;

use crate::bounds::{bim_phase, pn_error_variances, wiener_prior_covariance, SIGMA2_THETA1_DEFAULT};
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::rng::GaussianSampler;
use crate::scenario::{LinkScenario, OscillatorSpec};
use crate::snr::fmt_csv;

/// One Monte-Carlo estimate against its analytic target.
#[derive(Debug, Clone)]
pub struct McReport {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub target: f64,
}

impl McReport {
    fn from_sums(sum: f64, sum_sq: f64, trials: u64, target: f64) -> Self {
        let n = trials as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        Self {
            estimate: mean,
            std_error: (var / n).sqrt(),
            trials,
            target,
        }
    }

    /// |estimate − target| ≤ 3·SE.
    pub fn passes_3sigma(&self) -> bool {
        (self.estimate - self.target).abs() <= 3.0 * self.std_error
    }
}

/// Unit-energy-scaled QPSK: the simplest constant-modulus alphabet.
pub fn qpsk_alphabet(es: f64) -> [Complex64; 4] {
    let a = (es / 2.0).sqrt();
    [
        Complex64::new(a, a),
        Complex64::new(-a, a),
        Complex64::new(-a, -a),
        Complex64::new(a, -a),
    ]
}

fn require_constant_modulus(alphabet: &[Complex64], es: f64) -> Result<()> {
    for s in alphabet {
        let p = s.norm_sqr();
        if (p - es).abs() > 1e-12 * es {
            return Err(Error::NonConstantModulus { found: p, es });
        }
    }
    Ok(())
}

/// Monte-Carlo estimate of the diagonal of the symbol-averaged Fisher
/// information for the phase observation y = e^{jθ}s + w.
///
/// The per-sample negative second derivative of the Gaussian log-likelihood
/// is (2/σw²)·Re{y* e^{jθ} s}; averaged over draws of (s, θ, w) it must
/// reproduce 2Es/σw² in every diagonal position (and the mixed derivatives
/// vanish identically because the likelihood factorizes over symbols).
pub fn mc_modified_fim_phase(
    scenario: &LinkScenario,
    alphabet: &[Complex64],
    trials: u64,
    seed: u64,
) -> Result<Vec<McReport>> {
    require_constant_modulus(alphabet, scenario.es)?;
    let s2w = scenario.sigma2_w;
    let target = 2.0 * scenario.es / s2w;
    let noise_std = (s2w / 2.0).sqrt();
    let mut reports = Vec::with_capacity(scenario.block_len);
    let mut g = GaussianSampler::new(seed);
    for _k in 0..scenario.block_len {
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..trials {
            let s = alphabet[(g.uniform() * alphabet.len() as f64) as usize % alphabet.len()];
            let theta = 2.0 * std::f64::consts::PI * g.uniform();
            let rot = Complex64::from_polar(1.0, theta);
            let w = Complex64::new(g.normal(noise_std), g.normal(noise_std));
            let y = rot * s + w;
            let stat = 2.0 / s2w * (y.conj() * rot * s).re;
            sum += stat;
            sum_sq += stat * stat;
        }
        reports.push(McReport::from_sums(sum, sum_sq, trials, target));
    }
    Ok(reports)
}

/// LMMSE validation bundle: the exact error variances of the linear-Gaussian
/// channel estimator, plus their Monte-Carlo measurement from simulated
/// estimation runs.
#[derive(Debug, Clone)]
pub struct LmmseValidation {
    /// 2·diag(P) with P = R − R(R + r_c·I)⁻¹R, the closed-form LMMSE error
    /// covariance (r_c = σw²/(2Es) per real component).
    pub closed_form: Vec<f64>,
    /// Monte-Carlo per-symbol squared estimation error; targets are the
    /// closed-form entries.
    pub mc: Vec<McReport>,
}

/// Exact and simulated LMMSE error variances for known constant-modulus
/// symbols over a channel with per-component prior covariance R.
///
/// The closed form goes through the covariance route only, so for Gaussian
/// models it independently reproduces the information-matrix bound.
pub fn lmmse_channel_error(
    r: &SymMatrix,
    snr_awgn: f64,
    trials: u64,
    seed: u64,
) -> Result<LmmseValidation> {
    let k = r.dim();
    let r_c = 1.0 / (2.0 * snr_awgn);
    let m = SymMatrix::from_fn(k, |i, j| r.get(i, j) + if i == j { r_c } else { 0.0 });
    let m_inv = m.inverse("LMMSE observation covariance")?;
    let gain = r.as_matrix() * m_inv.as_matrix(); // W = R(R + r_c I)^{-1}
    let p = r.as_matrix() - &gain * r.as_matrix();
    let closed_form: Vec<f64> = (0..k).map(|i| 2.0 * p[(i, i)]).collect();

    let l = r.cholesky_lower("channel correlation matrix")?;
    let mut g = GaussianSampler::new(seed);
    let noise_std = r_c.sqrt();
    let mut sums = vec![0.0f64; k];
    let mut sums_sq = vec![0.0f64; k];
    let mut white = vec![0.0f64; k];
    let mut h = vec![0.0f64; k];
    let mut z = vec![0.0f64; k];
    for _ in 0..trials {
        let mut trial_err = vec![0.0f64; k];
        // Real and imaginary components are i.i.d. given the coloring.
        for _component in 0..2 {
            for w in white.iter_mut() {
                *w = g.standard_normal();
            }
            for i in 0..k {
                h[i] = (0..=i).map(|j| l[(i, j)] * white[j]).sum();
                z[i] = h[i] + g.normal(noise_std);
            }
            for i in 0..k {
                let est: f64 = (0..k).map(|j| gain[(i, j)] * z[j]).sum();
                let e = est - h[i];
                trial_err[i] += e * e;
            }
        }
        for i in 0..k {
            sums[i] += trial_err[i];
            sums_sq[i] += trial_err[i] * trial_err[i];
        }
    }
    let mc = (0..k)
        .map(|i| McReport::from_sums(sums[i], sums_sq[i], trials, closed_form[i]))
        .collect();
    Ok(LmmseValidation { closed_form, mc })
}

/// Empirical MSE of a fixed-interval (forward Kalman + backward smoothing)
/// linear estimator on the linearized phase observation model
/// z_k = θ_k + n_k, n ~ N(0, σw²/(2Es)), over simulated Wiener paths.
///
/// Targets are the phase-bound diagonals; in the linearized model the
/// smoother attains them exactly, so the Monte-Carlo MSE must straddle the
/// bound within sampling error. Requires the small-error regime
/// (Es/σw² ≥ 10 dB).
pub fn smoother_phase_mse(
    scenario: &LinkScenario,
    osc: &OscillatorSpec,
    trials: u64,
    seed: u64,
) -> Result<Vec<McReport>> {
    let snr = scenario.snr_awgn();
    if snr < 10.0 {
        return Err(Error::OraclePrecondition(format!(
            "smoother oracle needs Es/σw² >= 10 dB for the linearized model (got {:.2} dB)",
            crate::snr::to_db(snr)
        )));
    }
    let q = osc.innovation_variance(scenario.f0_hz, scenario.bw_hz)?;
    if q <= 0.0 {
        return Err(Error::DegeneratePrior(q));
    }
    let k = scenario.block_len;
    let c = wiener_prior_covariance(k, SIGMA2_THETA1_DEFAULT, q)?;
    let bound = pn_error_variances(&bim_phase(snr, &c)?)?.values;

    let r_obs = scenario.sigma2_w / (2.0 * scenario.es);
    let noise_std = r_obs.sqrt();
    let mut g = GaussianSampler::new(seed);
    let mut sums = vec![0.0f64; k];
    let mut sums_sq = vec![0.0f64; k];
    let mut x_f = vec![0.0f64; k]; // filtered means
    let mut p_f = vec![0.0f64; k]; // filtered variances
    let mut x_s = vec![0.0f64; k]; // smoothed means
    for _ in 0..trials {
        let theta1 = g.normal(SIGMA2_THETA1_DEFAULT.sqrt());
        let path = {
            // draw the path inline from the same stream
            let std = q.sqrt();
            let mut th = Vec::with_capacity(k);
            th.push(theta1);
            for i in 1..k {
                th.push(th[i - 1] + g.normal(std));
            }
            th
        };
        // Forward Kalman pass on z_k = θ_k + n_k.
        let mut pred_mean = 0.0;
        let mut pred_var = SIGMA2_THETA1_DEFAULT;
        for i in 0..k {
            let z = path[i] + g.normal(noise_std);
            let gain = pred_var / (pred_var + r_obs);
            x_f[i] = pred_mean + gain * (z - pred_mean);
            p_f[i] = (1.0 - gain) * pred_var;
            pred_mean = x_f[i];
            pred_var = p_f[i] + q;
        }
        // Backward Rauch-Tung-Striebel pass.
        x_s[k - 1] = x_f[k - 1];
        for i in (0..k - 1).rev() {
            let a = p_f[i] / (p_f[i] + q);
            x_s[i] = x_f[i] + a * (x_s[i + 1] - x_f[i]);
        }
        for i in 0..k {
            let e = x_s[i] - path[i];
            let e2 = e * e;
            sums[i] += e2;
            sums_sq[i] += e2 * e2;
        }
    }
    let reports: Vec<McReport> = (0..k)
        .map(|i| McReport::from_sums(sums[i], sums_sq[i], trials, bound[i]))
        .collect();
    // Divergence detection: an MSE an order of magnitude above the bound
    // means the estimator (or the model wiring) is broken.
    for (i, r) in reports.iter().enumerate() {
        if r.estimate > 10.0 * r.target {
            return Err(Error::OraclePrecondition(format!(
                "smoother diverged at symbol {}: MSE {} vs bound {}",
                i + 1,
                r.estimate,
                r.target
            )));
        }
    }
    Ok(reports)
}

/// Monte-Carlo check of the phase-error power identity
/// E[2(1−cos ε)] = 2(1−e^{−σ²ε/2}) for ε ~ N(0, σ²ε).
pub fn mc_phase_error_power(sigma2_eps: f64, trials: u64, seed: u64) -> McReport {
    assert!(sigma2_eps >= 0.0);
    let target = 2.0 * (1.0 - (-sigma2_eps / 2.0).exp());
    let std = sigma2_eps.sqrt();
    let mut g = GaussianSampler::new(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..trials {
        let eps = g.normal(std);
        let stat = 2.0 * (1.0 - eps.cos());
        sum += stat;
        sum_sq += stat * stat;
    }
    McReport::from_sums(sum, sum_sq, trials, target)
}

/// One line of the validation summary.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of the full oracle suite.
#[derive(Debug, Clone)]
pub struct ValidationSummary {
    pub checks: Vec<CheckResult>,
    pub seed: u64,
}

impl ValidationSummary {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {} — {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push_str(&format!(
            "{} of {} oracle checks passed (seed {})\n",
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len(),
            self.seed
        ));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,pass,detail\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},\"{}\"\n",
                c.name,
                if c.pass { "1" } else { "0" },
                c.detail.replace('"', "'")
            ));
        }
        out
    }
}

/// Runs the whole oracle suite at its default configurations. `trials`
/// overrides every oracle's default trial count when given.
pub fn run_validation_suite(trials: Option<u64>, seed: u64) -> Result<ValidationSummary> {
    let mut checks = Vec::new();

    // Per-symbol Fisher information: MC vs 2Es/σw².
    let scn = LinkScenario::from_db(20, 20.0, 10e9, 1e7, 0.0)?;
    let fim = mc_modified_fim_phase(&scn, &qpsk_alphabet(scn.es), trials.unwrap_or(100_000), seed)?;
    let worst = fim
        .iter()
        .max_by(|a, b| {
            let da = (a.estimate - a.target).abs() / a.std_error.max(1e-300);
            let db = (b.estimate - b.target).abs() / b.std_error.max(1e-300);
            da.total_cmp(&db)
        })
        .expect("non-empty");
    checks.push(CheckResult {
        name: "fim_phase_diagonal".into(),
        pass: fim.iter().all(McReport::passes_3sigma),
        detail: format!(
            "target {} worst estimate {} ± {} ({} entries, {} trials each)",
            fmt_csv(worst.target),
            fmt_csv(worst.estimate),
            fmt_csv(worst.std_error),
            fim.len(),
            worst.trials
        ),
    });

    // LMMSE: closed form vs information-route bound, then MC vs both.
    let k = 20;
    let snr = 100.0;
    let r = crate::fading::correlation_matrix(
        k,
        &crate::fading::ClarkeParams::from_normalized(0.02),
        crate::fading::DEFAULT_LAG0_BIAS,
    )?;
    let bound = crate::bounds::ch_error_variances(&crate::bounds::bim_channel(snr, &r)?)?;
    let lmmse = lmmse_channel_error(&r, snr, trials.unwrap_or(10_000), seed.wrapping_add(1))?;
    let max_rel = lmmse
        .closed_form
        .iter()
        .zip(&bound.values)
        .map(|(a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "lmmse_closed_form_equals_bound".into(),
        pass: max_rel < 1e-10,
        detail: format!("max relative difference {max_rel:.3e} (limit 1e-10)"),
    });
    checks.push(CheckResult {
        name: "lmmse_monte_carlo".into(),
        pass: lmmse.mc.iter().all(McReport::passes_3sigma),
        detail: format!(
            "{} symbols within 3σ of the closed form ({} trials)",
            lmmse.mc.iter().filter(|r| r.passes_3sigma()).count(),
            lmmse.mc[0].trials
        ),
    });

    // Smoother MSE vs the phase bound.
    let scn_sm = LinkScenario::from_db(100, 20.0, 60e9, 2.16e9, 0.0)?;
    let osc = OscillatorSpec::InnovationVariance(5.78e-6);
    let sm = smoother_phase_mse(&scn_sm, &osc, trials.unwrap_or(10_000), seed.wrapping_add(2))?;
    let above = sm
        .iter()
        .all(|r| r.estimate >= r.target - 3.0 * r.std_error);
    let mid = &sm[sm.len() / 2];
    let mid_ratio = mid.estimate / mid.target;
    checks.push(CheckResult {
        name: "smoother_mse_vs_bound".into(),
        pass: above && mid_ratio <= 1.5,
        detail: format!(
            "MSE ≥ bound − 3σ at every symbol: {above}; mid-block MSE/bound = {mid_ratio:.4} (limit 1.5)"
        ),
    });

    // Phase-error power identity.
    let pw = mc_phase_error_power(0.25, trials.unwrap_or(1_000_000), seed.wrapping_add(3));
    checks.push(CheckResult {
        name: "phase_error_power".into(),
        pass: pw.passes_3sigma(),
        detail: format!(
            "estimate {} ± {} vs 2(1−e^(−σ²/2)) = {}",
            fmt_csv(pw.estimate),
            fmt_csv(pw.std_error),
            fmt_csv(pw.target)
        ),
    });

    Ok(ValidationSummary { checks, seed })
}
