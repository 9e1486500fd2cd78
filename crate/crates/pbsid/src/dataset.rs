//! Time-indexed multichannel input/output records.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A sampled multi-input multi-output record: inputs `u_k`, outputs `y_k`,
/// `k = 0..=N`, with uniform sampling metadata.
///
/// Inputs and outputs always have the same length, every input has dimension
/// `m` and every output dimension `r`. Instances are immutable after
/// construction, so the invariants cannot be broken downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalDataset {
    timestamps: Vec<f64>,
    inputs: Vec<DVector<f64>>,
    outputs: Vec<DVector<f64>>,
    sample_period: f64,
    input_labels: Vec<String>,
    output_labels: Vec<String>,
}

impl SignalDataset {
    /// Builds a dataset with timestamps `k * sample_period` and default
    /// channel labels `u1..um`, `y1..yr`.
    pub fn new(
        inputs: Vec<DVector<f64>>,
        outputs: Vec<DVector<f64>>,
        sample_period: f64,
    ) -> Result<Self> {
        let timestamps = (0..inputs.len()).map(|k| k as f64 * sample_period).collect();
        let (m, r) = Self::check_channels(&inputs, &outputs)?;
        let input_labels = (1..=m).map(|i| format!("u{i}")).collect();
        let output_labels = (1..=r).map(|i| format!("y{i}")).collect();
        Self::from_parts(timestamps, inputs, outputs, sample_period, input_labels, output_labels)
    }

    /// Builds a dataset from explicit timestamps and labels, validating all
    /// invariants.
    pub fn from_parts(
        timestamps: Vec<f64>,
        inputs: Vec<DVector<f64>>,
        outputs: Vec<DVector<f64>>,
        sample_period: f64,
        input_labels: Vec<String>,
        output_labels: Vec<String>,
    ) -> Result<Self> {
        let (m, r) = Self::check_channels(&inputs, &outputs)?;
        if timestamps.len() != inputs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} timestamps for {} samples",
                timestamps.len(),
                inputs.len()
            )));
        }
        if !timestamps.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument(
                "timestamps must be strictly increasing".into(),
            ));
        }
        if !(sample_period > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample_period must be positive, got {sample_period}"
            )));
        }
        if input_labels.len() != m || output_labels.len() != r {
            return Err(Error::DimensionMismatch(format!(
                "{} input labels for {m} channels, {} output labels for {r} channels",
                input_labels.len(),
                output_labels.len()
            )));
        }
        Ok(Self { timestamps, inputs, outputs, sample_period, input_labels, output_labels })
    }

    fn check_channels(inputs: &[DVector<f64>], outputs: &[DVector<f64>]) -> Result<(usize, usize)> {
        if inputs.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, available: 0 });
        }
        if inputs.len() != outputs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} input samples vs {} output samples",
                inputs.len(),
                outputs.len()
            )));
        }
        let m = inputs[0].len();
        let r = outputs[0].len();
        if let Some(k) = inputs.iter().position(|u| u.len() != m) {
            return Err(Error::DimensionMismatch(format!(
                "input sample {k} has dimension {}, expected {m}",
                inputs[k].len()
            )));
        }
        if let Some(k) = outputs.iter().position(|y| y.len() != r) {
            return Err(Error::DimensionMismatch(format!(
                "output sample {k} has dimension {}, expected {r}",
                outputs[k].len()
            )));
        }
        Ok((m, r))
    }

    /// Number of samples, `N + 1`.
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Input dimension `m`.
    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    /// Output dimension `r`.
    pub fn output_dim(&self) -> usize {
        self.outputs[0].len()
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn inputs(&self) -> &[DVector<f64>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[DVector<f64>] {
        &self.outputs
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    /// The merged sequence `z_k = [u_k; y_k]`.
    pub fn merged(&self) -> Vec<DVector<f64>> {
        self.inputs
            .iter()
            .zip(&self.outputs)
            .map(|(u, y)| {
                let mut z = DVector::zeros(u.len() + y.len());
                z.rows_mut(0, u.len()).copy_from(u);
                z.rows_mut(u.len(), y.len()).copy_from(y);
                z
            })
            .collect()
    }
}
