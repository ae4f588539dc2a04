//! Post-compensation SNR limits of radio links impaired by oscillator phase
//! noise and Rayleigh channel fading.
//!
//! The library models the two multiplicative impairments of a block
//! transmission `y_k = e^{jθ_k} h_k s_k + w_k`:
//!
//! * [`oscillator`] — Wiener phase noise: Lorentzian SSB spectrum, the
//!   κ / f3dB / σζ² parameter chain, technology-dependent floors on the
//!   innovation variance, and sample-path generation;
//! * [`fading`] — Clarke Rayleigh fading: J0 autocorrelation, regularized
//!   Toeplitz correlation matrices, and correlated path generation;
//! * [`bounds`] — Bayesian information matrices for the block phase and
//!   channel estimators and the per-symbol error-variance bounds extracted
//!   from their inverses;
//! * [`snr`] — the post-compensation SNR formulas, block averaging, and the
//!   parameter sweeps (center frequency, matched bandwidths, equal error);
//! * [`oracle`] — independent Monte-Carlo and closed-form validators for
//!   every analytic quantity above;
//! * [`scenario`] — experiment configuration, unit conversions, and the
//!   built-in oscillator technology catalog.
//!
//! All randomness is drawn from explicitly seeded generators; every function
//! of a seed is bit-reproducible across runs.

pub mod bounds;
pub mod error;
pub mod fading;
pub mod matrix;
pub mod oracle;
pub mod oscillator;
pub mod rng;
pub mod scenario;
pub mod snr;

pub use error::{Error, Result};
pub use matrix::SymMatrix;
pub use scenario::{LinkScenario, OscillatorSpec, Scenario, TechnologyParams};
