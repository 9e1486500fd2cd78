//! Step-response ratio indices used to judge how far the plant is from linear.

use crate::error::{Error, Result};

/// Pointwise ratio trace `w(t) = (y_num(t) - y0) / (y_den(t) - y0)`.
///
/// For a linear plant excited by scaled steps the trace is the constant input
/// ratio; curvature or drift in `w` exposes nonlinearity.
#[derive(Debug, Clone)]
pub struct NonlinearityTrace {
    /// Sample times; index-valued unless the caller rescales.
    pub times: Vec<f64>,
    /// Ratio per sample; `None` where the denominator is within `eps` of `y0`.
    pub w_values: Vec<Option<f64>>,
    /// Caption such as `"90%/60%"`.
    pub label: String,
    /// Mean of the defined ratios.
    pub mean_w: f64,
}

/// Computes the ratio trace of two responses sharing the rest level `y0`.
/// Samples whose denominator magnitude does not exceed `eps` are excluded.
pub fn nonlinearity_index(
    y_num: &[f64],
    y_den: &[f64],
    y0: f64,
    eps: f64,
) -> Result<NonlinearityTrace> {
    if y_num.len() != y_den.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} numerator samples vs {} denominator samples",
            y_num.len(),
            y_den.len()
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let mut w_values = Vec::with_capacity(y_num.len());
    let mut sum = 0.0;
    let mut count = 0usize;
    for (num, den) in y_num.iter().zip(y_den) {
        let d = den - y0;
        if d.abs() > eps {
            let w = (num - y0) / d;
            sum += w;
            count += 1;
            w_values.push(Some(w));
        } else {
            w_values.push(None);
        }
    }
    if count == 0 {
        return Err(Error::Degenerate("denominator below eps everywhere".into()));
    }
    Ok(NonlinearityTrace {
        times: (0..y_num.len()).map(|k| k as f64).collect(),
        w_values,
        label: String::new(),
        mean_w: sum / count as f64,
    })
}
