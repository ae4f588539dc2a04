//! Clarke-model Rayleigh fading: J0 autocorrelation, regularized Toeplitz
//! correlation matrices, and correlated sample-path generation.
//!
//! Channel coefficients h_k are zero-mean complex Gaussian with unit power
//! (σh² = 1), independent real/imaginary components of variance ½ each, and
//! per-component autocorrelation R(ℓ) = ½·J0(2π·fD/BW·|ℓ|). The K×K
//! correlation matrix is Toeplitz and, for small normalized Doppler,
//! numerically singular; a small lag-zero bias keeps its Cholesky
//! factorization alive.

use std::f64::consts::PI;

use crate::error::Result;
use crate::matrix::SymMatrix;
use crate::rng::GaussianSampler;

/// Default lag-zero regularization bias. Small enough not to perturb the
/// block SNR at its reported precision, large enough to stabilize the
/// factorization for fD/BW down to 1e-9 at K = 100.
pub const DEFAULT_LAG0_BIAS: f64 = 1e-6;

/// Doppler geometry of a Clarke channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarkeParams {
    /// Maximum Doppler frequency, Hz.
    pub fd_hz: f64,
    /// System bandwidth, Hz.
    pub bw_hz: f64,
}

impl ClarkeParams {
    pub fn new(fd_hz: f64, bw_hz: f64) -> Self {
        assert!(fd_hz >= 0.0 && bw_hz > 0.0);
        Self { fd_hz, bw_hz }
    }

    /// Builds the geometry directly from fD/BW.
    pub fn from_normalized(normalized_doppler: f64) -> Self {
        Self::new(normalized_doppler, 1.0)
    }

    /// fD/BW, the per-symbol normalized Doppler.
    pub fn normalized_doppler(&self) -> f64 {
        self.fd_hz / self.bw_hz
    }
}

/// Bessel function of the first kind, order zero.
///
/// Power series for |x| ≤ 8; for larger |x| an N-point midpoint rule on the
/// integral form (1/π)∫₀^π cos(x sin θ) dθ, whose error is an aliased tail
/// of Bessel terms of order ≥ 2N and vanishes super-exponentially once
/// 2N comfortably exceeds |x|. Absolute error is below 1e-13 for |x| ≤ 50
/// (checked against 50-digit references in the tests). Even in x.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 8.0 {
        j0_series(ax)
    } else {
        j0_integral(ax)
    }
}

fn j0_series(x: f64) -> f64 {
    // J0(x) = Σ_m (−1)^m (x²/4)^m / (m!)², Kahan-compensated.
    let q = 0.25 * x * x;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    for m in 1..64 {
        term *= -q / ((m * m) as f64);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn j0_integral(x: f64) -> f64 {
    let n = 64.max((0.75 * x) as usize + 30);
    let h = PI / n as f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in 0..n {
        let theta = (j as f64 + 0.5) * h;
        let y = (x * theta.sin()).cos() - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum / n as f64
}

/// Per-component autocorrelation R(ℓ) = ½·J0(2π·fD/BW·|ℓ|). Even in ℓ;
/// a static channel (fD = 0) stays at ½ for every lag.
pub fn clarke_autocorrelation(lag: i64, params: &ClarkeParams) -> f64 {
    0.5 * bessel_j0(2.0 * PI * params.normalized_doppler() * lag.unsigned_abs() as f64)
}

/// K×K symmetric Toeplitz correlation matrix
/// [R]_{m,n} = R(m−n) + bias·δ_{mn}, certified positive definite.
///
/// Fails (with the smallest-eigenvalue estimate in the error) when the bias
/// is too small to lift the numerically singular Doppler spectrum.
pub fn correlation_matrix(k: usize, params: &ClarkeParams, lag0_bias: f64) -> Result<SymMatrix> {
    assert!(k >= 1, "K must be >= 1");
    assert!(lag0_bias >= 0.0, "lag0_bias must be >= 0");
    let row: Vec<f64> = (0..k)
        .map(|l| clarke_autocorrelation(l as i64, params))
        .collect();
    let r = SymMatrix::from_fn(k, |i, j| {
        let v = row[j - i]; // from_fn only visits i <= j
        if i == j {
            v + lag0_bias
        } else {
            v
        }
    });
    r.require_positive_definite("channel correlation matrix")?;
    Ok(r)
}

/// One realization of the fading process.
#[derive(Debug, Clone)]
pub struct ChannelPath {
    /// Real components h_k^(r).
    pub re: Vec<f64>,
    /// Imaginary components h_k^(i).
    pub im: Vec<f64>,
    pub seed: u64,
}

impl ChannelPath {
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    /// CSV body with columns (index, h_real, h_imag).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,h_real,h_imag\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                i + 1,
                crate::snr::fmt_csv(self.re[i]),
                crate::snr::fmt_csv(self.im[i])
            ));
        }
        out
    }
}

/// Draws h_1..h_K with independent real and imaginary components, each a
/// zero-mean Gaussian vector with covariance R (Cholesky coloring of white
/// draws). Deterministic given the seed.
pub fn clarke_sample_path(
    k: usize,
    params: &ClarkeParams,
    lag0_bias: f64,
    seed: u64,
) -> Result<ChannelPath> {
    let r = correlation_matrix(k, params, lag0_bias)?;
    let l = r.cholesky_lower("channel correlation matrix")?;
    let mut g = GaussianSampler::new(seed);
    let mut white_re = vec![0.0; k];
    let mut white_im = vec![0.0; k];
    for i in 0..k {
        white_re[i] = g.standard_normal();
        white_im[i] = g.standard_normal();
    }
    let color = |white: &[f64]| -> Vec<f64> {
        (0..k)
            .map(|i| (0..=i).map(|j| l[(i, j)] * white[j]).sum())
            .collect()
    };
    Ok(ChannelPath {
        re: color(&white_re),
        im: color(&white_im),
        seed,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::error::Error;

    /// 50-digit reference values (independent series evaluation).
    const J0_REFERENCE: [(f64, f64); 21] = [
        (0.0, 1.0),
        (1e-8, 0.99999999999999997),
        (0.1, 0.99750156206604003),
        (0.5, 0.9384698072408129),
        (1.0, 0.76519768655796655),
        (2.0, 0.22389077914123567),
        (3.0, -0.26005195490193344),
        (5.0, -0.1775967713143383),
        (7.0, 0.3000792705195556),
        (8.0, 0.17165080713755391),
        (10.0, -0.24593576445134834),
        (12.0, 0.047689310796833537),
        (15.0, -0.014224472826780773),
        (20.0, 0.16702466434058315),
        (25.0, 0.096266783275958116),
        (30.0, -0.086367983581040211),
        (40.0, 0.0073668905842372896),
        (50.0, 0.055812327669251815),
        (2.404825557695773, -6.1087652597367304e-17),
        (5.520078110286311, -2.7522649432621831e-17),
        (8.653727912911013, -7.9484655705251616e-17),
    ];

    const J0_ZEROS: [f64; 8] = [
        2.4048255576957728,
        5.5200781102863106,
        8.6537279129110122,
        11.791534439014282,
        14.930917708487786,
        18.071063967910923,
        21.211636629879259,
        24.352471530749303,
    ];

    #[test]
    fn j0_matches_high_precision_references() {
        for &(x, expect) in &J0_REFERENCE {
            let got = bessel_j0(x);
            assert!(
                (got - expect).abs() < 1e-13,
                "J0({x}) = {got}, expected {expect}"
            );
        }
    }

    #[test]
    fn j0_zeros_and_sign_alternation() {
        for (n, &z) in J0_ZEROS.iter().enumerate() {
            assert!(bessel_j0(z).abs() < 1e-10, "zero {n} off: {}", bessel_j0(z));
        }
        // Between consecutive zeros the sign alternates, starting positive.
        let mut prev = 0.0f64;
        for (n, &z) in J0_ZEROS.iter().enumerate() {
            let mid = 0.5 * (prev + z);
            let expected_sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(bessel_j0(mid) * expected_sign > 0.0, "interval {n}");
            prev = z;
        }
    }

    #[test]
    fn j0_bounded_and_even() {
        let mut x = 0.0;
        while x < 200.0 {
            let v = bessel_j0(x);
            assert!(v.abs() <= 1.0 + 1e-14, "|J0({x})| = {v}");
            assert_eq!(v.to_bits(), bessel_j0(-x).to_bits());
            x += 0.173;
        }
    }

    #[test]
    fn j0_branch_seam_is_smooth() {
        // Series and quadrature branches agree around the switch point.
        for x in [7.9, 7.99, 8.0, 8.01, 8.1] {
            let s = j0_series(x);
            let q = j0_integral(x);
            assert!((s - q).abs() < 1e-13, "seam at {x}: {s} vs {q}");
        }
    }

    #[test]
    fn autocorrelation_values() {
        let p = ClarkeParams::from_normalized(0.01);
        assert!((clarke_autocorrelation(0, &p) - 0.5).abs() < 1e-15);
        let static_ch = ClarkeParams::new(0.0, 1e6);
        for l in [-100i64, -1, 0, 1, 5, 999] {
            assert!((clarke_autocorrelation(l, &static_ch) - 0.5).abs() < 1e-15);
        }
        // Normalized Doppler placing lag 1 at the first J0 zero.
        let x0 = 2.4048255576957728 / (2.0 * PI);
        let p0 = ClarkeParams::from_normalized(x0);
        assert!(clarke_autocorrelation(1, &p0).abs() < 1e-10);
        // Even in lag.
        for l in [1i64, 3, 17] {
            assert_eq!(
                clarke_autocorrelation(l, &p).to_bits(),
                clarke_autocorrelation(-l, &p).to_bits()
            );
        }
    }

    #[test]
    fn correlation_matrix_k1_and_structure() {
        let p = ClarkeParams::from_normalized(0.02);
        let r1 = correlation_matrix(1, &p, 1e-4).unwrap();
        assert!((r1.get(0, 0) - 0.5001).abs() < 1e-15);

        let r = correlation_matrix(12, &p, 1e-6).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                // Toeplitz + symmetric, entries bounded by 1/2 + bias.
                assert!(r.get(i, j).abs() <= 0.5 + 1e-6 + 1e-15);
                if i + 1 < 12 && j + 1 < 12 {
                    assert_eq!(r.get(i, j).to_bits(), r.get(i + 1, j + 1).to_bits());
                }
            }
        }
    }

    #[test]
    fn static_channel_needs_bias() {
        let p = ClarkeParams::new(0.0, 1e6);
        match correlation_matrix(3, &p, 0.0).unwrap_err() {
            Error::NotPositiveDefinite { min_eigenvalue, .. } => {
                assert!(min_eigenvalue.abs() < 1e-9, "min eig {min_eigenvalue}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(correlation_matrix(3, &p, 1e-6).is_ok());
    }

    #[test]
    fn wide_band_geometry_factors() {
        // fD/BW of a 60 GHz, 2.16 GHz link at walking speed.
        let p = ClarkeParams::from_normalized(1.286e-8);
        let r = correlation_matrix(100, &p, 1e-6).unwrap();
        assert!(r.is_positive_definite());
    }

    #[test]
    fn static_paths_are_numerically_constant() {
        let p = ClarkeParams::new(0.0, 1e6);
        let path = clarke_sample_path(50, &p, 1e-6, 3).unwrap();
        // With bias b the increments have variance 2b per component.
        for k in 1..50 {
            assert!((path.re[k] - path.re[0]).abs() < 0.02);
            assert!((path.im[k] - path.im[0]).abs() < 0.02);
        }
    }

    #[test]
    fn path_determinism() {
        let p = ClarkeParams::from_normalized(0.03);
        let a = clarke_sample_path(16, &p, 1e-6, 11).unwrap();
        let b = clarke_sample_path(16, &p, 1e-6, 11).unwrap();
        assert_eq!(a.re, b.re);
        assert_eq!(a.im, b.im);
    }

    #[test]
    fn ensemble_unit_power_and_component_independence() {
        let p = ClarkeParams::from_normalized(0.05);
        let (k, n_paths) = (10usize, 100_000u64);
        let mut power = vec![0.0f64; k];
        let mut cross = vec![0.0f64; k];
        for seed in 0..n_paths {
            let path = clarke_sample_path(k, &p, 1e-6, 40_000 + seed).unwrap();
            for i in 0..k {
                power[i] += path.re[i] * path.re[i] + path.im[i] * path.im[i];
                cross[i] += path.re[i] * path.im[i];
            }
        }
        let n = n_paths as f64;
        for i in 0..k {
            let e_h2 = power[i] / n;
            assert!((e_h2 - 1.0).abs() < 0.01, "E|h_{i}|^2 = {e_h2}");
            // E[hr·hi] = 0; per-draw std of the product is 1/2.
            let se = 0.5 / n.sqrt();
            assert!(cross[i].abs() / n < 3.0 * se, "cross corr {}", cross[i] / n);
        }
    }

    #[test]
    fn empirical_lag_correlation_matches_j0() {
        let p = ClarkeParams::from_normalized(0.02);
        let (k, n_paths) = (40usize, 20_000u64);
        let lags = [0usize, 1, 5, 20];
        let mut acc = [0.0f64; 4];
        let mut cnt = [0u64; 4];
        for seed in 0..n_paths {
            let path = clarke_sample_path(k, &p, 1e-6, 90_000 + seed).unwrap();
            for (li, &l) in lags.iter().enumerate() {
                for i in 0..(k - l) {
                    acc[li] += path.re[i] * path.re[i + l];
                    cnt[li] += 1;
                }
            }
        }
        for (li, &l) in lags.iter().enumerate() {
            let got = acc[li] / cnt[li] as f64;
            let expect = clarke_autocorrelation(l as i64, &p);
            // Products within one path are correlated; budget the error on
            // the per-path sample count instead of the raw pair count.
            let se = 0.5 * (2.0 / n_paths as f64).sqrt();
            assert!(
                (got - expect).abs() < 4.0 * se,
                "lag {l}: {got} vs {expect}"
            );
        }
    }
}
