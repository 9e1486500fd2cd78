//! Discrete-time simulation of innovation-form state-space models.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::SignalDataset;
use crate::error::{Error, Result};
use crate::model::InnovationModel;

/// Simulates `x_{k+1} = A x_k + B u_k + K e_k`, `y_k = C x_k + e_k` with
/// `e_k ~ N(0, sigma² I)` drawn from a seeded generator; `sigma = 0` gives the
/// deterministic plant. The result carries the given sample period.
pub fn simulate_lti(
    model: &InnovationModel,
    x0: &DVector<f64>,
    inputs: &[DVector<f64>],
    innovation_sigma: f64,
    seed: u64,
    sample_period: f64,
) -> Result<SignalDataset> {
    if x0.len() != model.state_order() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has dimension {}, model order is {}",
            x0.len(),
            model.state_order()
        )));
    }
    if inputs.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, available: 0 });
    }
    if let Some(k) = inputs.iter().position(|u| u.len() != model.input_dim()) {
        return Err(Error::DimensionMismatch(format!(
            "input {k} has dimension {}, model expects {}",
            inputs[k].len(),
            model.input_dim()
        )));
    }
    if innovation_sigma < 0.0 {
        return Err(Error::InvalidArgument("innovation sigma must be nonnegative".into()));
    }

    let r = model.output_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = x0.clone();
    let mut outputs = Vec::with_capacity(inputs.len());
    for u in inputs {
        let e = if innovation_sigma > 0.0 {
            DVector::from_fn(r, |_, _| {
                let g: f64 = StandardNormal.sample(&mut rng);
                innovation_sigma * g
            })
        } else {
            DVector::zeros(r)
        };
        let y = &model.c * &x + &e;
        outputs.push(y);
        x = &model.a * &x + &model.b * u + &model.k * &e;
    }
    SignalDataset::new(inputs.to_vec(), outputs, sample_period)
}
