//! State-sequence recovery and system-matrix estimation — the second stage of
//! the identification method.
//!
//! The Markov-parameter estimate is rearranged into the block-shifted matrix
//! `Q̂`, whose product with the regressor data matrix spans the state row
//! space. A truncated SVD yields the state sequence; two further
//! least-squares problems recover `(Ã, B, K)` and `C`, from which
//! `A = Ã + K C`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hankel::DataMatrix;
use crate::linalg;
use crate::model::{InnovationModel, VarxEstimate};

/// Builds the `(r f) x ((m+r) p)` block-shifted Markov matrix: block-row `i`
/// is the Markov matrix truncated to its first `(m+r)(p-i)` columns, pushed
/// right by `(m+r) i` zeros.
pub fn build_q_matrix(varx: &VarxEstimate, f: usize) -> Result<DMatrix<f64>> {
    let p = varx.p;
    if f < 1 || f > p {
        return Err(Error::InvalidArgument(format!(
            "future window must satisfy 1 <= f <= p, got f={f}, p={p}"
        )));
    }
    let mr = varx.m + varx.r;
    let r = varx.r;
    let mut q = DMatrix::zeros(r * f, mr * p);
    for i in 0..f {
        let width = mr * (p - i);
        q.view_mut((i * r, i * mr), (r, width))
            .copy_from(&varx.markov.view((0, 0), (r, width)));
    }
    Ok(q)
}

/// State sequence recovered from the truncated SVD, plus the full singular
/// spectrum for order diagnostics.
#[derive(Debug, Clone)]
pub struct StateEstimate {
    /// `n x (l+1)` matrix of state estimates, one column per time step.
    pub state_sequence: DMatrix<f64>,
    /// All singular values of `Q̂ Z`, nonincreasing.
    pub singular_values: DVector<f64>,
    /// Requested order exceeds the numerical rank; the model will be
    /// over-parameterized.
    pub rank_warning: bool,
}

/// Computes the state sequence of order `n` from the SVD of `Q̂ Z`.
pub fn state_sequence(q_matrix: &DMatrix<f64>, z: &DataMatrix, n: usize) -> Result<StateEstimate> {
    if q_matrix.ncols() != z.values().nrows() {
        return Err(Error::DimensionMismatch(format!(
            "Q has {} columns, Z has {} rows",
            q_matrix.ncols(),
            z.values().nrows()
        )));
    }
    let product = q_matrix * z.values();
    let max_order = product.nrows().min(product.ncols());
    if n < 1 || n > max_order {
        return Err(Error::InvalidArgument(format!(
            "state order must satisfy 1 <= n <= min(r f, l+1) = {max_order}, got {n}"
        )));
    }
    let svd = product.clone().svd(false, true);
    let sv = svd.singular_values.clone_owned();
    let v_t = svd.v_t.expect("SVD with V^T requested");
    let tol = linalg::rank_tolerance(product.nrows(), product.ncols(), sv[0]);
    let rank = sv.iter().filter(|s| **s > tol).count();

    let mut state_sequence = v_t.rows(0, n).into_owned();
    for i in 0..n {
        let scale = sv[i].sqrt();
        state_sequence.row_mut(i).scale_mut(scale);
    }
    Ok(StateEstimate { state_sequence, singular_values: sv, rank_warning: n > rank })
}

/// System matrices estimated from a state sequence.
#[derive(Debug, Clone)]
pub struct MatrixEstimation {
    pub model: InnovationModel,
    /// Numerical rank of the stacked regressor `S = [X̂; Z]`.
    pub regressor_rank: usize,
    /// The stacked regressor was rank deficient and the pseudo-inverse path
    /// was taken.
    pub rank_deficient: bool,
}

/// Solves the two least-squares problems for `[Ã B K]` and `C`, then
/// assembles the innovation model with `A = Ã + K C`.
///
/// `x` is the state sequence (`n x (l+1)`), `z_shifted` holds `z_p..z_{p+l-1}`
/// (single-block data matrix, `l` columns) and `y` holds `y_p..y_{p+l}`.
pub fn estimate_matrices(
    x: &DMatrix<f64>,
    z_shifted: &DataMatrix,
    y: &DataMatrix,
    n: usize,
    m: usize,
    r: usize,
) -> Result<MatrixEstimation> {
    let cols = x.ncols();
    if cols < 2 {
        return Err(Error::InsufficientSamples { needed: 2, available: cols });
    }
    if x.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "state sequence has {} rows, expected n = {n}",
            x.nrows()
        )));
    }
    if z_shifted.values().nrows() != m + r || z_shifted.values().ncols() != cols - 1 {
        return Err(Error::DimensionMismatch(format!(
            "shifted regressor is {}x{}, expected {}x{}",
            z_shifted.values().nrows(),
            z_shifted.values().ncols(),
            m + r,
            cols - 1
        )));
    }
    if y.values().nrows() != r || y.values().ncols() != cols {
        return Err(Error::DimensionMismatch(format!(
            "output matrix is {}x{}, expected {r}x{cols}",
            y.values().nrows(),
            y.values().ncols()
        )));
    }

    let x_next = x.view((0, 1), (n, cols - 1)).into_owned();
    let x_prev = x.view((0, 0), (n, cols - 1)).into_owned();
    let mut s = DMatrix::zeros(n + m + r, cols - 1);
    s.view_mut((0, 0), (n, cols - 1)).copy_from(&x_prev);
    s.view_mut((n, 0), (m + r, cols - 1)).copy_from(z_shifted.values());

    let q_sol = linalg::lstsq_left(&x_next, &s);
    let c_sol = linalg::lstsq_left(y.values(), x);

    let a_tilde = q_sol.coefficients.view((0, 0), (n, n)).into_owned();
    let b = q_sol.coefficients.view((0, n), (n, m)).into_owned();
    let k = q_sol.coefficients.view((0, n + m), (n, r)).into_owned();
    let c = c_sol.coefficients;
    let a = &a_tilde + &k * &c;

    let rank_deficient = q_sol.rank < n + m + r;
    let mut model = InnovationModel::new(a, b, c, k)?;
    model.f_used = None;
    model.p_used = None;
    Ok(MatrixEstimation { model, regressor_rank: q_sol.rank, rank_deficient })
}

/// A complete second-stage result: the model together with the state sequence
/// and singular spectrum it was derived from.
#[derive(Debug, Clone)]
pub struct StateRealization {
    pub model: InnovationModel,
    pub singular_values: DVector<f64>,
    pub state_sequence: DMatrix<f64>,
}
