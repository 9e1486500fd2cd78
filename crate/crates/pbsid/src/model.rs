//! State-space model types shared across the pipeline.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Innovation-form state-space model
///
/// ```text
/// x_{k+1} = A x_k + B u_k + K e_k
/// y_k     = C x_k + e_k
/// ```
///
/// with state order `n = A.nrows()`, input dimension `m = B.ncols()` and
/// output dimension `r = C.nrows()`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub k: DMatrix<f64>,
    /// Future window the model was estimated with, if any.
    pub f_used: Option<usize>,
    /// Past window the model was estimated with, if any.
    pub p_used: Option<usize>,
}

impl InnovationModel {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        k: DMatrix<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, expected {n}",
                b.nrows()
            )));
        }
        if c.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "C has {} columns, expected {n}",
                c.ncols()
            )));
        }
        if k.nrows() != n || k.ncols() != c.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "K is {}x{}, expected {n}x{}",
                k.nrows(),
                k.ncols(),
                c.nrows()
            )));
        }
        Ok(Self { a, b, c, k, f_used: None, p_used: None })
    }

    /// State order `n`.
    pub fn state_order(&self) -> usize {
        self.a.nrows()
    }

    /// Input dimension `m`.
    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    /// Output dimension `r`.
    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    /// Predictor-form matrices `(Ã, B̃)` with `Ã = A - K C` and `B̃ = [B K]`,
    /// so that `x_{k+1} = Ã x_k + B̃ z_k` with `z_k = [u_k; y_k]`.
    pub fn predictor_matrices(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let a_tilde = &self.a - &self.k * &self.c;
        let n = self.state_order();
        let m = self.input_dim();
        let r = self.output_dim();
        let mut b_tilde = DMatrix::zeros(n, m + r);
        b_tilde.view_mut((0, 0), (n, m)).copy_from(&self.b);
        b_tilde.view_mut((0, m), (n, r)).copy_from(&self.k);
        (a_tilde, b_tilde)
    }

    /// Eigenvalues of `A` (complex, unordered).
    pub fn eigenvalues(&self) -> Vec<nalgebra::Complex<f64>> {
        self.a.complex_eigenvalues().iter().copied().collect()
    }

    /// Spectral radius of the predictor matrix `Ã = A - K C`.
    pub fn predictor_spectral_radius(&self) -> f64 {
        let (a_tilde, _) = self.predictor_matrices();
        a_tilde.complex_eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max)
    }
}

/// Extended observability matrix `[C; C A; ...; C A^{blocks-1}]`.
pub fn observability_matrix(a: &DMatrix<f64>, c: &DMatrix<f64>, blocks: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let r = c.nrows();
    let mut out = DMatrix::zeros(r * blocks, n);
    let mut ca = c.clone();
    for i in 0..blocks {
        out.view_mut((i * r, 0), (r, n)).copy_from(&ca);
        if i + 1 < blocks {
            ca *= a;
        }
    }
    out
}

/// Reversed reachability matrix `[A^{blocks-1} B, ..., A B, B]`.
pub fn reachability_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>, blocks: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let w = b.ncols();
    let mut out = DMatrix::zeros(n, w * blocks);
    let mut ab = b.clone();
    for i in (0..blocks).rev() {
        out.view_mut((0, i * w), (n, w)).copy_from(&ab);
        if i > 0 {
            ab = a * ab;
        }
    }
    out
}

/// Estimated one-step-ahead VARX predictor: Markov-parameter matrix, residual
/// covariance and the AIC score at past window `p`.
#[derive(Debug, Clone)]
pub struct VarxEstimate {
    /// Markov parameters, `r x (m+r)p`; block `j` (left to right) multiplies
    /// `z_{k-p+j}`.
    pub markov: DMatrix<f64>,
    /// Past window.
    pub p: usize,
    /// Input dimension of the underlying data.
    pub m: usize,
    /// Output dimension of the underlying data.
    pub r: usize,
    /// Maximum-likelihood residual covariance, `r x r`.
    pub residual_cov: DMatrix<f64>,
    /// AIC score at this `p`.
    pub aic: f64,
    /// Numerical rank of the full regressor data matrix.
    pub regressor_rank: usize,
    /// True when the residual covariance had eigenvalues at or below zero and
    /// was clamped for the log-determinant.
    pub degenerate_fit: bool,
}

impl VarxEstimate {
    /// Markov-parameter block for lag offset `j` (0 = oldest, `p-1` = newest),
    /// i.e. the coefficient of `z_{k-p+j}`.
    pub fn block(&self, j: usize) -> DMatrix<f64> {
        let mr = self.m + self.r;
        self.markov.view((0, j * mr), (self.r, mr)).into_owned()
    }

    /// One-step-ahead prediction `ŷ_k = M̂ z_{k-p,k-1}` for a lifted window.
    pub fn predict(&self, lifted_window: &DVector<f64>) -> DVector<f64> {
        &self.markov * lifted_window
    }
}
