//! One-step-ahead VARX predictor estimation and AIC past-window selection.
//!
//! The predictor regresses `y_k` on the lifted window `z_{k-p,k-1}` with
//! `z_k = [u_k; y_k]`. The least-squares problem is solved through a
//! rank-revealing SVD rather than the normal equations; when the regressor
//! matrix is rank deficient the minimum-norm solution is returned, which
//! reproduces the data exactly whenever the regression is consistent (e.g.
//! noise-free outputs confined to a low-dimensional subspace). Insufficient
//! excitation of the *inputs* is a hard error: without it no input-output
//! model is identifiable.

use rayon::prelude::*;

use crate::dataset::SignalDataset;
use crate::error::{Error, Result};
use crate::hankel::build_data_matrix;
use crate::linalg;
use crate::model::VarxEstimate;

/// Eigenvalue floor used in the AIC log-determinant.
const LOG_DET_CLAMP: f64 = 1e-300;

/// Estimates the Markov-parameter matrix of the order-`p` predictor together
/// with its residual covariance and AIC score.
pub fn estimate_markov(dataset: &SignalDataset, p: usize) -> Result<VarxEstimate> {
    if p < 1 {
        return Err(Error::InvalidArgument("past window must be at least 1".into()));
    }
    let m = dataset.input_dim();
    let r = dataset.output_dim();
    let len = dataset.len();
    // l + 1 = len - p columns must reach (m+r)p so full row rank is possible
    let needed = (m + r + 1) * p;
    if len < needed {
        return Err(Error::InsufficientSamples { needed, available: len });
    }
    let n_last = len - 1;
    let l = n_last - p;

    let z_seq = dataset.merged();
    let z = build_data_matrix(&z_seq, 0, p - 1, l)?;
    let y = build_data_matrix(dataset.outputs(), p, p, l)?;

    // persistency of excitation: the input block-Hankel must have full row rank
    let u_hankel = build_data_matrix(dataset.inputs(), 0, p - 1, l)?;
    let u_rank = linalg::numerical_rank(u_hankel.values());
    if u_rank < m * p {
        return Err(Error::ExcitationDeficient { rank: u_rank, required: m * p });
    }

    let sol = linalg::lstsq_left(y.values(), z.values());
    let markov = sol.coefficients;
    let residual = y.values() - &markov * z.values();
    let mut residual_cov = &residual * residual.transpose() / (l + 1) as f64;
    // symmetrize away rounding skew
    residual_cov = (&residual_cov + residual_cov.transpose()) * 0.5;

    let eigs = residual_cov.clone().symmetric_eigen().eigenvalues;
    let mut log_det = 0.0;
    let mut degenerate = false;
    for lambda in eigs.iter() {
        if *lambda < LOG_DET_CLAMP {
            degenerate = true;
        }
        log_det += lambda.max(LOG_DET_CLAMP).ln();
    }
    let penalty = 2.0 / (l + 1) as f64 * (r * (m + r) * p) as f64;
    Ok(VarxEstimate {
        markov,
        p,
        m,
        r,
        residual_cov,
        aic: log_det + penalty,
        regressor_rank: sol.rank,
        degenerate_fit: degenerate,
    })
}

/// AIC value for one candidate past window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AicEntry {
    pub p: usize,
    pub aic: f64,
    /// Residual covariance had clamped (non-positive) eigenvalues.
    pub degenerate: bool,
}

/// Result of scanning past windows `1..=p_max`.
#[derive(Debug, Clone)]
pub struct AicScan {
    pub entries: Vec<AicEntry>,
    /// Smallest `p` attaining the minimal AIC.
    pub p_hat: usize,
}

/// Evaluates the AIC for every past window up to `p_max`; candidates are
/// scored independently (and in parallel), each with its own column count
/// `l + 1 = N - p + 1`.
pub fn aic_scan(dataset: &SignalDataset, p_max: usize) -> Result<AicScan> {
    if p_max < 1 {
        return Err(Error::InvalidArgument("p_max must be at least 1".into()));
    }
    let needed = (dataset.input_dim() + dataset.output_dim() + 1) * p_max;
    if dataset.len() < needed {
        return Err(Error::InsufficientSamples { needed, available: dataset.len() });
    }
    let entries: Result<Vec<AicEntry>> = (1..=p_max)
        .into_par_iter()
        .map(|p| {
            let est = estimate_markov(dataset, p)?;
            Ok(AicEntry { p, aic: est.aic, degenerate: est.degenerate_fit })
        })
        .collect();
    let entries = entries?;
    let mut p_hat = entries[0].p;
    let mut best = entries[0].aic;
    for e in &entries[1..] {
        if e.aic < best {
            best = e.aic;
            p_hat = e.p;
        }
    }
    Ok(AicScan { entries, p_hat })
}
