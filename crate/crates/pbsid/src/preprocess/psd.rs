//! Welch-averaged power spectral density.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

/// Averaged-periodogram PSD with a Hann window.
///
/// Returns `(frequencies, power)` for the bins `0 ..= segment_len/2`. The
/// values are the two-sided density evaluated on the nonnegative frequencies
/// (no one-sided doubling), so unit-variance white noise has a flat density of
/// `1/fs` and the signal variance equals the integral over the full band,
/// i.e. twice the integral over `[0, fs/2]` up to the edge bins.
pub fn psd_welch(
    signal: &[f64],
    sample_rate_hz: f64,
    segment_len: usize,
    overlap_frac: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(sample_rate_hz > 0.0) {
        return Err(Error::InvalidArgument("sample rate must be positive".into()));
    }
    if segment_len < 2 {
        return Err(Error::InvalidArgument("segment length must be at least 2".into()));
    }
    if segment_len > signal.len() {
        return Err(Error::InsufficientSamples { needed: segment_len, available: signal.len() });
    }
    if !(0.0..1.0).contains(&overlap_frac) {
        return Err(Error::InvalidArgument(format!(
            "overlap fraction must lie in [0, 1), got {overlap_frac}"
        )));
    }

    let n = segment_len;
    let hop = ((n as f64 * (1.0 - overlap_frac)).round() as usize).max(1);
    // periodic Hann window
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()))
        .collect();
    let window_energy: f64 = window.iter().map(|w| w * w).sum();

    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let bins = n / 2 + 1;
    let mut power = vec![0.0f64; bins];
    let mut segments = 0usize;
    let mut buf = vec![Complex::new(0.0, 0.0); n];

    let mut start = 0;
    while start + n <= signal.len() {
        for i in 0..n {
            buf[i] = Complex::new(signal[start + i] * window[i], 0.0);
        }
        fft.process(&mut buf);
        for (k, p) in power.iter_mut().enumerate() {
            *p += buf[k].norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    let scale = 1.0 / (sample_rate_hz * window_energy * segments as f64);
    for p in &mut power {
        *p *= scale;
    }
    let frequencies =
        (0..bins).map(|k| k as f64 * sample_rate_hz / n as f64).collect();
    Ok((frequencies, power))
}
