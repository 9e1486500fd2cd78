//! Model-structure selection over the (state order, future window) grid.
//!
//! Every admissible pair gets its own state-space realization from the
//! identification data; the candidates are then scored on a separate
//! validation record under one of three simulation regimes:
//!
//! * Method A — open-loop simulation of `(A, B, C)` driven by inputs only;
//! * Method B — simulation of the predictor form with the model's own output
//!   fed back;
//! * Method C — closed-loop one-step-ahead prediction with the measured
//!   outputs fed back.
//!
//! Grid pairs are independent and evaluated in parallel; results are merged
//! in grid order so repeated runs are identical.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::dataset::SignalDataset;
use crate::error::{Error, Result};
use crate::hankel::{build_data_matrix, lift};
use crate::linalg;
use crate::model::{observability_matrix, InnovationModel};
use crate::sid::{build_q_matrix, estimate_matrices, state_sequence, StateRealization};
use crate::varx::estimate_markov;

/// Validation simulation regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    A,
    B,
    C,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::A => write!(f, "A"),
            Method::B => write!(f, "B"),
            Method::C => write!(f, "C"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Method::A),
            "B" | "b" => Ok(Method::B),
            "C" | "c" => Ok(Method::C),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// The admissible (state order, future window) pairs: order `i` up to
/// `n_max`, window `j` from `ceil(i/r)` (so the observability matrix has at
/// least as many rows as columns) up to `f_max`.
#[derive(Debug, Clone)]
pub struct SelectionGrid {
    pub n_max: usize,
    pub f_max: usize,
    pairs: Vec<(usize, usize)>,
}

impl SelectionGrid {
    pub fn new(n_max: usize, f_max: usize, output_dim: usize) -> Result<Self> {
        if n_max < 1 || f_max < 1 {
            return Err(Error::InvalidArgument(
                "n_max and f_max must be at least 1".into(),
            ));
        }
        if output_dim < 1 {
            return Err(Error::InvalidArgument("output dimension must be positive".into()));
        }
        let mut pairs = Vec::new();
        for i in 1..=n_max {
            let f_min = i.div_ceil(output_dim);
            for j in f_min..=f_max {
                pairs.push((i, j));
            }
        }
        Ok(Self { n_max, f_max, pairs })
    }

    /// Pairs in scan order: state order ascending, then future window.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Which model form drives the initial-state estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialStateMode {
    /// `(A, B, C)` driven by the inputs — Method A.
    OpenLoop,
    /// `(Ã, [B K], C)` driven by `z = [u; y]` — Methods B and C.
    Predictor,
}

impl From<Method> for InitialStateMode {
    fn from(m: Method) -> Self {
        match m {
            Method::A => InitialStateMode::OpenLoop,
            Method::B | Method::C => InitialStateMode::Predictor,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InitialStateEstimate {
    pub state: DVector<f64>,
    /// Numerical rank of the observability matrix used.
    pub observability_rank: usize,
    /// Rank fell short of the state order; the minimum-norm solution was
    /// returned.
    pub rank_deficient: bool,
}

/// Estimates the initial state from the first `h` validation samples by
/// removing the zero-state forced response and projecting what remains onto
/// the extended observability matrix (pseudo-inverse solve).
pub fn estimate_initial_state(
    model: &InnovationModel,
    validation: &SignalDataset,
    h: usize,
    mode: InitialStateMode,
) -> Result<InitialStateEstimate> {
    if h < 1 || h > validation.len() {
        return Err(Error::InvalidArgument(format!(
            "initial-state window h={h} must lie in 1..={}",
            validation.len()
        )));
    }
    if model.output_dim() != validation.output_dim()
        || model.input_dim() != validation.input_dim()
    {
        return Err(Error::DimensionMismatch(format!(
            "model is {}-in {}-out, validation data is {}-in {}-out",
            model.input_dim(),
            model.output_dim(),
            validation.input_dim(),
            validation.output_dim()
        )));
    }
    let n = model.state_order();
    let (a_used, b_used, drive): (DMatrix<f64>, DMatrix<f64>, Vec<DVector<f64>>) = match mode {
        InitialStateMode::OpenLoop => {
            (model.a.clone(), model.b.clone(), validation.inputs().to_vec())
        }
        InitialStateMode::Predictor => {
            let (a_tilde, b_tilde) = model.predictor_matrices();
            (a_tilde, b_tilde, validation.merged())
        }
    };

    // zero-initial-state forced response over the window — the action of the
    // block-Toeplitz impulse matrix on the lifted drive
    let r = model.output_dim();
    let mut forced = DVector::zeros(r * h);
    let mut d = DVector::zeros(n);
    for k in 0..h {
        forced.rows_mut(k * r, r).copy_from(&(&model.c * &d));
        d = &a_used * &d + &b_used * &drive[k];
    }
    let y_lift = lift(validation.outputs(), 0, h - 1)?;
    let rhs = y_lift - forced;

    let obs = observability_matrix(&a_used, &model.c, h);
    let (obs_pinv, rank) = linalg::pinv(&obs);
    Ok(InitialStateEstimate {
        state: &obs_pinv * rhs,
        observability_rank: rank,
        rank_deficient: rank < n,
    })
}

/// Open-loop simulation `d_{k+1} = A d_k + B u_k`, `ŷ_k = C d_k`.
pub fn simulate_method_a(
    model: &InnovationModel,
    x0: &DVector<f64>,
    inputs: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let mut d = x0.clone();
    inputs
        .iter()
        .map(|u| {
            let y = &model.c * &d;
            d = &model.a * &d + &model.b * u;
            y
        })
        .collect()
}

/// Predictor-form simulation with the model's own output fed back:
/// `x_{k+1} = Ã x_k + B u_k + K ŷ_k` with `ŷ_k = C x_k`.
pub fn simulate_method_b(
    model: &InnovationModel,
    x0: &DVector<f64>,
    inputs: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let (a_tilde, _) = model.predictor_matrices();
    let mut x = x0.clone();
    inputs
        .iter()
        .map(|u| {
            let y = &model.c * &x;
            x = &a_tilde * &x + &model.b * u + &model.k * &y;
            y
        })
        .collect()
}

/// Closed-loop one-step-ahead prediction with measured outputs fed back:
/// `x_{k+1} = Ã x_k + B u_k + K y_k`, `ŷ_k = C x_k`.
pub fn simulate_method_c(
    model: &InnovationModel,
    x0: &DVector<f64>,
    inputs: &[DVector<f64>],
    measured_outputs: &[DVector<f64>],
) -> Result<Vec<DVector<f64>>> {
    if inputs.len() != measured_outputs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} inputs vs {} measured outputs",
            inputs.len(),
            measured_outputs.len()
        )));
    }
    let (a_tilde, _) = model.predictor_matrices();
    let mut x = x0.clone();
    Ok(inputs
        .iter()
        .zip(measured_outputs)
        .map(|(u, y_meas)| {
            let y = &model.c * &x;
            x = &a_tilde * &x + &model.b * u + &model.k * y_meas;
            y
        })
        .collect())
}

/// Relative error between the stacked measured and predicted sequences,
/// `||y - ŷ||_2 / ||y||_2`.
pub fn relative_error(measured: &[DVector<f64>], predicted: &[DVector<f64>]) -> Result<f64> {
    if measured.len() != predicted.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} measured vs {} predicted samples",
            measured.len(),
            predicted.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (y, yh) in measured.iter().zip(predicted) {
        if y.len() != yh.len() {
            return Err(Error::DimensionMismatch(format!(
                "sample dimensions differ: {} vs {}",
                y.len(),
                yh.len()
            )));
        }
        num += (y - yh).norm_squared();
        den += y.norm_squared();
    }
    if den == 0.0 {
        return Err(Error::Degenerate("relative error undefined for zero output".into()));
    }
    Ok((num / den).sqrt())
}

/// Variance accounted for, per channel, in percent and clamped at zero.
pub fn vaf(measured: &[DVector<f64>], predicted: &[DVector<f64>]) -> Result<Vec<f64>> {
    if measured.len() != predicted.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} measured vs {} predicted samples",
            measured.len(),
            predicted.len()
        )));
    }
    let n = measured.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, available: n });
    }
    let r = measured[0].len();
    let mut out = Vec::with_capacity(r);
    for c in 0..r {
        let mean_y = measured.iter().map(|y| y[c]).sum::<f64>() / n as f64;
        let var_y =
            measured.iter().map(|y| (y[c] - mean_y).powi(2)).sum::<f64>() / n as f64;
        if var_y.sqrt() <= 1e-12 * (1.0 + mean_y.abs()) {
            return Err(Error::ZeroVariance(format!("output channel {}", c + 1)));
        }
        let mean_e = measured
            .iter()
            .zip(predicted)
            .map(|(y, yh)| y[c] - yh[c])
            .sum::<f64>()
            / n as f64;
        let var_e = measured
            .iter()
            .zip(predicted)
            .map(|(y, yh)| (y[c] - yh[c] - mean_e).powi(2))
            .sum::<f64>()
            / n as f64;
        out.push((1.0 - var_e / var_y).max(0.0) * 100.0);
    }
    Ok(out)
}

/// Score of one grid pair.
#[derive(Debug, Clone)]
pub struct PairScore {
    pub n: usize,
    pub f: usize,
    /// Relative validation error; `+inf` when the simulation diverged.
    pub relative_error: f64,
    /// Per-channel VAF, absent when the simulation was non-finite.
    pub vaf: Option<Vec<f64>>,
}

/// Outcome of the full grid search.
#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub method: Method,
    /// One score per grid pair, in grid order.
    pub scores: Vec<PairScore>,
    /// Winning pair.
    pub best_n: usize,
    pub best_f: usize,
    /// Realization of the winning pair.
    pub best: StateRealization,
    /// Initial state estimated for the winning pair.
    pub initial_state: DVector<f64>,
    /// Past window used throughout.
    pub p: usize,
}

fn default_h(n: usize, r: usize, n1: usize) -> usize {
    let base = (n.div_ceil(r) + 5).max(10);
    base.min((n1 / 4).max(1))
}

/// Runs the full second stage: for every grid pair, realize a model from the
/// identification data, estimate its initial state on the validation prefix,
/// simulate under `method` and score. The best pair minimizes the relative
/// error; ties break toward smaller `n`, then smaller `f`.
pub fn grid_search(
    identification: &SignalDataset,
    validation: &SignalDataset,
    p_hat: usize,
    grid: &SelectionGrid,
    method: Method,
    h: Option<usize>,
) -> Result<SelectionResult> {
    if identification.input_dim() != validation.input_dim()
        || identification.output_dim() != validation.output_dim()
    {
        return Err(Error::DimensionMismatch(
            "identification and validation channel counts differ".into(),
        ));
    }
    let m = identification.input_dim();
    let r = identification.output_dim();
    let n_id = identification.len() - 1;
    if p_hat + 2 > n_id {
        return Err(Error::InsufficientSamples { needed: p_hat + 3, available: n_id + 1 });
    }
    let varx = estimate_markov(identification, p_hat)?;
    let l = n_id - p_hat;
    let z_seq = identification.merged();
    let z = build_data_matrix(&z_seq, 0, p_hat - 1, l)?;
    let z_shifted = build_data_matrix(&z_seq, p_hat, p_hat, l - 1)?;
    let y = build_data_matrix(identification.outputs(), p_hat, p_hat, l)?;
    let n1 = validation.len() - 1;

    struct PairOutcome {
        score: PairScore,
        realization: Option<(StateRealization, DVector<f64>)>,
    }

    let outcomes: Result<Vec<PairOutcome>> = grid
        .pairs()
        .par_iter()
        .map(|&(n, f)| {
            let q = build_q_matrix(&varx, f)?;
            let states = state_sequence(&q, &z, n)?;
            let est = estimate_matrices(&states.state_sequence, &z_shifted, &y, n, m, r)?;
            let mut model = est.model;
            model.f_used = Some(f);
            model.p_used = Some(p_hat);

            let h_eff = h.unwrap_or_else(|| default_h(n, r, n1));
            let x0 = estimate_initial_state(&model, validation, h_eff, method.into())?;
            let predicted = match method {
                Method::A => simulate_method_a(&model, &x0.state, validation.inputs()),
                Method::B => simulate_method_b(&model, &x0.state, validation.inputs()),
                Method::C => simulate_method_c(
                    &model,
                    &x0.state,
                    validation.inputs(),
                    validation.outputs(),
                )?,
            };
            let finite = predicted.iter().all(|v| v.iter().all(|x| x.is_finite()));
            let (e, vaf_values) = if finite {
                let e = relative_error(validation.outputs(), &predicted)?;
                if e.is_finite() {
                    (e, vaf(validation.outputs(), &predicted).ok())
                } else {
                    (f64::INFINITY, None)
                }
            } else {
                (f64::INFINITY, None)
            };
            let realization = StateRealization {
                model,
                singular_values: states.singular_values,
                state_sequence: states.state_sequence,
            };
            Ok(PairOutcome {
                score: PairScore { n, f, relative_error: e, vaf: vaf_values },
                realization: Some((realization, x0.state)),
            })
        })
        .collect();
    let mut outcomes = outcomes?;

    let best_idx = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.score.relative_error.is_finite())
        .min_by(|(_, a), (_, b)| {
            a.score.relative_error.partial_cmp(&b.score.relative_error).unwrap()
        })
        .map(|(i, _)| i)
        .ok_or_else(|| {
            Error::Numerical("every grid pair produced a non-finite validation error".into())
        })?;

    let (best, initial_state) = outcomes[best_idx].realization.take().expect("set above");
    let best_n = outcomes[best_idx].score.n;
    let best_f = outcomes[best_idx].score.f;
    Ok(SelectionResult {
        method,
        scores: outcomes.into_iter().map(|o| o.score).collect(),
        best_n,
        best_f,
        best,
        initial_state,
        p: p_hat,
    })
}
