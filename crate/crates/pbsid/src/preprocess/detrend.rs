//! Mean and linear detrending.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetrendMode {
    Mean,
    Linear,
}

/// Removes the mean or the least-squares line from a signal.
pub fn detrend(signal: &[f64], mode: DetrendMode) -> Result<Vec<f64>> {
    match mode {
        DetrendMode::Mean => {
            if signal.is_empty() {
                return Ok(Vec::new());
            }
            let mean = signal.iter().sum::<f64>() / signal.len() as f64;
            Ok(signal.iter().map(|x| x - mean).collect())
        }
        DetrendMode::Linear => {
            let n = signal.len();
            if n < 2 {
                return Err(Error::InsufficientSamples { needed: 2, available: n });
            }
            // least-squares fit of a + b*t with t = 0..n-1, solved on the
            // centred time axis so the normal equations decouple
            let t_mean = (n - 1) as f64 / 2.0;
            let y_mean = signal.iter().sum::<f64>() / n as f64;
            let mut stt = 0.0;
            let mut sty = 0.0;
            for (k, y) in signal.iter().enumerate() {
                let dt = k as f64 - t_mean;
                stt += dt * dt;
                sty += dt * (y - y_mean);
            }
            let slope = sty / stt;
            Ok(signal
                .iter()
                .enumerate()
                .map(|(k, y)| y - (y_mean + slope * (k as f64 - t_mean)))
                .collect())
        }
    }
}
