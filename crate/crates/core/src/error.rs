//! Crate-wide error type.

/// Errors produced by scenario validation, matrix factorization, and the
/// Monte-Carlo oracles.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A required configuration key is absent.
    #[error("config: missing key `{0}`")]
    MissingKey(&'static str),

    /// A configuration or argument value violates its constraint. The key
    /// name is always included so the offending entry can be located.
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },

    /// The configuration document could not be parsed at all.
    #[error("config parse error: {0}")]
    Parse(String),

    /// Technology name not present in the built-in catalog.
    #[error("unknown technology `{0}` (known: Si CMOS, SiGe HBT, InGaP HBT, GaN HEMT, GaAs HEMT)")]
    UnknownTechnology(String),

    /// An SSB measurement point that no Lorentzian spectrum can reproduce.
    #[error(
        "SSB point ({level_dbc_hz} dBc/Hz at {offset_hz} Hz) is inconsistent with a Lorentzian \
         spectrum: discriminant {discriminant} <= 0"
    )]
    SsbPointInfeasible {
        level_dbc_hz: f64,
        offset_hz: f64,
        discriminant: f64,
    },

    /// Cholesky factorization failed; the matrix is not (numerically)
    /// positive definite. `min_eigenvalue` is an estimate of the smallest
    /// eigenvalue, reported so a too-small regularization bias is visible.
    #[error("{context}: matrix is not positive definite (smallest eigenvalue ~ {min_eigenvalue:.3e})")]
    NotPositiveDefinite {
        context: &'static str,
        min_eigenvalue: f64,
    },

    /// σζ² = 0 makes the random-walk prior covariance rank-1; the bound
    /// construction requires a proper random walk. Callers wanting "no phase
    /// noise" should bypass the bound and use error variance 0.
    #[error("degenerate prior: sigma2_zeta must be > 0 (got {0})")]
    DegeneratePrior(f64),

    /// Monte-Carlo FIM oracle requires |s|² = Es for every alphabet symbol.
    #[error("alphabet is not constant-modulus: |s|^2 = {found} deviates from Es = {es}")]
    NonConstantModulus { found: f64, es: f64 },

    /// An oracle was invoked outside its validity regime.
    #[error("oracle precondition violated: {0}")]
    OraclePrecondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
