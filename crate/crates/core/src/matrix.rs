//! Dense symmetric matrices with cached Cholesky factorization.
//!
//! `SymMatrix` houses every matrix of the bound machinery: the random-walk
//! prior covariance C, the channel correlation R and its block-diagonal Σ,
//! and the information matrices built from them. Symmetry is exact by
//! construction (entries are evaluated once for i ≤ j and mirrored), and
//! positive definiteness is certified by a successful factorization. The
//! factor is computed at most once and cached; afterwards the matrix is
//! immutable and safe to read concurrently.

use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

pub struct SymMatrix {
    data: DMatrix<f64>,
    chol: OnceLock<Option<Cholesky<f64, Dyn>>>,
}

impl Clone for SymMatrix {
    fn clone(&self) -> Self {
        Self {
            data: self.data.clone(),
            chol: OnceLock::new(),
        }
    }
}

impl std::fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SymMatrix({}x{})", self.dim(), self.dim())
    }
}

impl SymMatrix {
    /// Builds an n×n symmetric matrix; `f` is evaluated only for i ≤ j and
    /// the result mirrored, so `get(i, j) == get(j, i)` holds exactly.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Self {
            data,
            chol: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    fn factor(&self) -> Option<&Cholesky<f64, Dyn>> {
        self.chol
            .get_or_init(|| {
                // A numerically singular matrix can slip through the raw
                // factorization with rounding-level pivots, so the PD
                // certificate additionally requires every pivot to clear the
                // rank-detection threshold n·ε·max_diag.
                let max_diag = self.data.diagonal().iter().fold(0.0f64, |m, &v| m.max(v));
                let threshold = (self.dim() as f64 * f64::EPSILON * max_diag).sqrt();
                Cholesky::new(self.data.clone()).filter(|c| {
                    c.l_dirty()
                        .diagonal()
                        .iter()
                        .all(|&d| d > threshold && d.is_finite())
                })
            })
            .as_ref()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.factor().is_some()
    }

    /// Certifies positive definiteness, reporting an estimate of the
    /// smallest eigenvalue on failure so an insufficient regularization bias
    /// is visible in the error.
    pub fn require_positive_definite(&self, context: &'static str) -> Result<()> {
        if self.factor().is_some() {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite {
                context,
                min_eigenvalue: self.min_eigenvalue_estimate(),
            })
        }
    }

    /// Smallest eigenvalue via a full symmetric eigendecomposition. Only
    /// used for diagnostics; O(n³).
    pub fn min_eigenvalue_estimate(&self) -> f64 {
        self.data
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Lower-triangular Cholesky factor L with A = L Lᵀ.
    pub fn cholesky_lower(&self, context: &'static str) -> Result<DMatrix<f64>> {
        self.require_positive_definite(context)?;
        Ok(self.factor().expect("factor cached").l())
    }

    /// Solves A x = b through the cached factorization.
    pub fn solve(&self, b: &DMatrix<f64>, context: &'static str) -> Result<DMatrix<f64>> {
        self.require_positive_definite(context)?;
        Ok(self.factor().expect("factor cached").solve(b))
    }

    /// Full inverse through the Cholesky factor, re-symmetrized to kill the
    /// last-ulp asymmetry of the triangular solves.
    pub fn inverse(&self, context: &'static str) -> Result<SymMatrix> {
        self.require_positive_definite(context)?;
        let inv = self.factor().expect("factor cached").inverse();
        Ok(SymMatrix::from_fn(self.dim(), |i, j| {
            0.5 * (inv[(i, j)] + inv[(j, i)])
        }))
    }

    /// Diagonal of A⁻¹.
    pub fn diag_of_inverse(&self, context: &'static str) -> Result<Vec<f64>> {
        let inv = self.inverse(context)?;
        Ok((0..self.dim()).map(|k| inv.get(k, k)).collect())
    }
}
