//! Signal conditioning: noise filtering, detrending, spectral estimation,
//! decimation, outlier handling and step-response nonlinearity indices.

mod detrend;
mod filter;
mod nonlinearity;
mod outliers;
mod psd;

pub use detrend::{detrend, DetrendMode};
pub use filter::{butterworth_lowpass, ButterworthFilter, FilterSpec};
pub use nonlinearity::{nonlinearity_index, NonlinearityTrace};
pub use outliers::remove_outliers;
pub use psd::psd_welch;

use crate::dataset::SignalDataset;
use crate::error::{Error, Result};

/// Default Hampel window length.
pub const DEFAULT_OUTLIER_WINDOW: usize = 11;
/// Default Hampel threshold in robust standard deviations.
pub const DEFAULT_OUTLIER_THRESHOLD: f64 = 3.0;
/// Default degeneracy threshold for nonlinearity ratios, in output units.
pub const DEFAULT_NONLINEARITY_EPS: f64 = 0.5;

/// Keeps every `factor`-th sample, starting at index 0; the sample period is
/// multiplied accordingly. Anti-alias filtering is the caller's job.
pub fn downsample(dataset: &SignalDataset, factor: usize) -> Result<SignalDataset> {
    if factor == 0 {
        return Err(Error::InvalidArgument("downsample factor must be at least 1".into()));
    }
    if factor == 1 {
        return Ok(dataset.clone());
    }
    let pick = |k: usize| k % factor == 0;
    SignalDataset::from_parts(
        dataset.timestamps().iter().enumerate().filter(|(k, _)| pick(*k)).map(|(_, t)| *t).collect(),
        dataset.inputs().iter().enumerate().filter(|(k, _)| pick(*k)).map(|(_, u)| u.clone()).collect(),
        dataset.outputs().iter().enumerate().filter(|(k, _)| pick(*k)).map(|(_, y)| y.clone()).collect(),
        dataset.sample_period() * factor as f64,
        dataset.input_labels().to_vec(),
        dataset.output_labels().to_vec(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn dataset(n: usize, period: f64) -> SignalDataset {
        let inputs = (0..n).map(|k| DVector::from_element(1, k as f64)).collect();
        let outputs = (0..n).map(|k| DVector::from_element(2, 10.0 + k as f64)).collect();
        SignalDataset::new(inputs, outputs, period).unwrap()
    }

    #[test]
    fn factor_one_is_identity() {
        let ds = dataset(10, 0.5);
        assert_eq!(downsample(&ds, 1).unwrap(), ds);
    }

    #[test]
    fn factor_two_keeps_even_indices() {
        let ds = dataset(10, 1.0);
        let down = downsample(&ds, 2).unwrap();
        assert_eq!(down.len(), 5);
        assert_eq!(down.sample_period(), 2.0);
        for (j, u) in down.inputs().iter().enumerate() {
            assert_eq!(u[0], (2 * j) as f64);
        }
    }

    #[test]
    fn reaches_paper_period() {
        // 96 s period from a 577 Hz record: factor = 96 * 577
        let factor = 96 * 577;
        let ds = dataset(2 * factor + 1, 1.0 / 577.0);
        let down = downsample(&ds, factor).unwrap();
        assert!((down.sample_period() - 96.0).abs() < 1e-9);
        assert_eq!(down.len(), 3);
    }

    #[test]
    fn zero_factor_rejected() {
        assert!(downsample(&dataset(3, 1.0), 0).is_err());
    }
}
