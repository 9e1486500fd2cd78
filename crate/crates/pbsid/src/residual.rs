//! Residual autocorrelation analysis and the per-entry whiteness test.
//!
//! A validated model should leave residuals close to white noise. The lagged
//! autocorrelation matrices are estimated with the biased `1/N₁` normalizer;
//! each entry is tested against the 5%-level white-noise band `±2/√N₁`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative floor below which a residual channel counts as zero-variance.
const VARIANCE_FLOOR: f64 = 1e-12;

/// Elementwise residual sequence `ε_k = y_k - ŷ_k`.
pub fn residual_sequence(
    measured: &[DVector<f64>],
    predicted: &[DVector<f64>],
) -> Result<Vec<DVector<f64>>> {
    if measured.len() != predicted.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} measured vs {} predicted samples",
            measured.len(),
            predicted.len()
        )));
    }
    measured
        .iter()
        .zip(predicted)
        .map(|(y, yh)| {
            if y.len() != yh.len() {
                return Err(Error::DimensionMismatch(format!(
                    "sample dimensions differ: {} vs {}",
                    y.len(),
                    yh.len()
                )));
            }
            Ok(y - yh)
        })
        .collect()
}

/// One autocorrelation entry outside the white-noise band. Indices are
/// zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub b: usize,
    pub s: usize,
    pub lag: usize,
}

/// Lagged residual autocovariance/autocorrelation estimates with the
/// white-noise band and its violations.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// Largest lag analyzed; matrices cover lags `0..=max_lag`.
    pub max_lag: usize,
    /// `Δ̂_i`, biased covariance estimates.
    pub autocovariance: Vec<DMatrix<f64>>,
    /// `Γ̂_i`, correlation estimates normalized by the lag-0 diagonal.
    pub autocorrelation: Vec<DMatrix<f64>>,
    /// White-noise band `2/√N₁`.
    pub bound: f64,
    /// Entries with `|γ̂_{b,s}(i)| > bound` for `i > 0`.
    pub violations: Vec<Violation>,
    /// `N₁` — the residual record covers `k = 0..=N₁`.
    pub n1: usize,
}

/// Estimates the lagged autocorrelation matrices of a residual record and
/// flags every entry outside the `±2/√N₁` band.
pub fn autocorrelation(residuals: &[DVector<f64>], max_lag: usize) -> Result<ResidualReport> {
    if residuals.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, available: residuals.len() });
    }
    let n1 = residuals.len() - 1;
    if max_lag < 1 || max_lag >= n1 {
        return Err(Error::InvalidArgument(format!(
            "max lag must satisfy 1 <= l1 < N1 = {n1}, got {max_lag}"
        )));
    }
    let r = residuals[0].len();
    if residuals.iter().any(|e| e.len() != r) {
        return Err(Error::DimensionMismatch("ragged residual dimensions".into()));
    }

    // degenerate channels are detected with the true mean; the estimates
    // below keep the biased 1/N₁ normalization throughout
    for c in 0..r {
        let true_mean = residuals.iter().map(|e| e[c]).sum::<f64>() / (n1 + 1) as f64;
        let true_var = residuals.iter().map(|e| (e[c] - true_mean).powi(2)).sum::<f64>()
            / (n1 + 1) as f64;
        if true_var.sqrt() <= VARIANCE_FLOOR * (1.0 + true_mean.abs()) {
            return Err(Error::ZeroVariance(format!("residual channel {}", c + 1)));
        }
    }

    let mut mean = DVector::zeros(r);
    for e in residuals {
        mean += e;
    }
    mean /= n1 as f64;
    let centered: Vec<DVector<f64>> = residuals.iter().map(|e| e - &mean).collect();

    let mut autocovariance = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let mut acc = DMatrix::zeros(r, r);
        for k in lag..=n1 {
            acc += &centered[k] * centered[k - lag].transpose();
        }
        autocovariance.push(acc / n1 as f64);
    }

    let mut inv_scale = DVector::zeros(r);
    for c in 0..r {
        inv_scale[c] = 1.0 / autocovariance[0][(c, c)].sqrt();
    }
    let autocorrelation: Vec<DMatrix<f64>> = autocovariance
        .iter()
        .map(|delta| {
            DMatrix::from_fn(r, r, |b, s| inv_scale[b] * delta[(b, s)] * inv_scale[s])
        })
        .collect();

    let bound = 2.0 / (n1 as f64).sqrt();
    let mut violations = Vec::new();
    for (lag, gamma) in autocorrelation.iter().enumerate().skip(1) {
        for b in 0..r {
            for s in 0..r {
                if gamma[(b, s)].abs() > bound {
                    violations.push(Violation { b, s, lag });
                }
            }
        }
    }
    Ok(ResidualReport { max_lag, autocovariance, autocorrelation, bound, violations, n1 })
}

/// Per-entry-pair violation summary with an overall verdict.
#[derive(Debug, Clone)]
pub struct WhitenessVerdict {
    /// Fraction of lags `1..=max_lag` outside the band, per `(b, s)` entry.
    pub pair_fractions: DMatrix<f64>,
    /// Entry pairs whose own fraction exceeds the threshold (zero-based).
    pub flagged_pairs: Vec<(usize, usize)>,
    /// Violations over all entries and lags, as a fraction.
    pub overall_fraction: f64,
    pub threshold: f64,
    /// True when the overall fraction stays within the threshold.
    pub pass: bool,
}

/// Summarizes a residual report: violation fraction per entry pair, flagged
/// pairs, and an overall pass/fail at the given fraction threshold.
pub fn whiteness_verdict(report: &ResidualReport, threshold: f64) -> WhitenessVerdict {
    let r = report.autocorrelation[0].nrows();
    let mut counts = DMatrix::<f64>::zeros(r, r);
    for v in &report.violations {
        counts[(v.b, v.s)] += 1.0;
    }
    let pair_fractions = counts / report.max_lag as f64;
    let mut flagged_pairs = Vec::new();
    for b in 0..r {
        for s in 0..r {
            if pair_fractions[(b, s)] > threshold {
                flagged_pairs.push((b, s));
            }
        }
    }
    let total = (r * r * report.max_lag) as f64;
    let overall_fraction = report.violations.len() as f64 / total;
    WhitenessVerdict {
        pair_fractions,
        flagged_pairs,
        overall_fraction,
        threshold,
        pass: overall_fraction <= threshold,
    }
}
