//! Synthetic data generation: a finite-difference heat-rod plant and a
//! generic linear simulator, both seed-deterministic.

mod lti;
mod rod;

pub use lti::simulate_lti;
pub use rod::{
    convective_loss, rise_time_constant, sample_sensors, simulate_rod, steady_state, RodConfig,
    SensorNoise,
};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Excitation sequence of `m`-vectors with entries drawn i.i.d. uniformly
/// from `[0, 1]`; identical seeds give identical sequences.
pub fn prbs_like_inputs(m: usize, length: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..length).map(|_| DVector::from_fn(m, |_, _| rng.random_range(0.0..=1.0))).collect()
}
