//! Hampel-style outlier replacement.

use crate::error::{Error, Result};

const MAD_TO_SIGMA: f64 = 1.4826;

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Replaces samples deviating more than `threshold_sigmas` robust standard
/// deviations from their window median with that median. The decision is made
/// on the original signal; windows shrink at the edges.
pub fn remove_outliers(signal: &[f64], window: usize, threshold_sigmas: f64) -> Result<Vec<f64>> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "window must be odd and at least 3, got {window}"
        )));
    }
    if !(threshold_sigmas > 0.0) {
        return Err(Error::InvalidArgument("threshold must be positive".into()));
    }
    let half = window / 2;
    let n = signal.len();
    let mut out = signal.to_vec();
    let mut scratch = Vec::with_capacity(window);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n.saturating_sub(1));
        scratch.clear();
        scratch.extend_from_slice(&signal[lo..=hi]);
        let med = median(&mut scratch);
        scratch.clear();
        scratch.extend(signal[lo..=hi].iter().map(|x| (x - med).abs()));
        let sigma = MAD_TO_SIGMA * median(&mut scratch);
        if (signal[i] - med).abs() > threshold_sigmas * sigma {
            out[i] = med;
        }
    }
    Ok(out)
}
