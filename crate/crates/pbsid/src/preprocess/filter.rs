//! Digital Butterworth low-pass design and causal filtering.
//!
//! The filter is designed in the analog domain (Butterworth pole circle),
//! prewarped, mapped through the bilinear transform and applied as a cascade
//! of second-order sections. Cascading keeps the recursion stable at the very
//! low normalized cutoffs this application uses (fractions of a hertz against
//! sampling rates of hundreds of hertz).

use nalgebra::Complex;

use crate::error::{Error, Result};

/// Low-pass Butterworth design parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub order: usize,
    pub cutoff_hz: f64,
    pub sample_rate_hz: f64,
}

impl FilterSpec {
    /// Fourth-order design at the given cutoff.
    pub fn new(cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        Self::with_order(4, cutoff_hz, sample_rate_hz)
    }

    pub fn with_order(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidArgument("filter order must be at least 1".into()));
        }
        if !(sample_rate_hz > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if !(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0) {
            return Err(Error::InvalidArgument(format!(
                "cutoff must satisfy 0 < fc < fs/2, got fc={cutoff_hz}, fs/2={}",
                sample_rate_hz / 2.0
            )));
        }
        Ok(Self { order, cutoff_hz, sample_rate_hz })
    }

    /// Number of leading output samples dominated by the start-up transient,
    /// `ceil(3 / (fc/fs))`.
    pub fn transient_len(&self) -> usize {
        (3.0 * self.sample_rate_hz / self.cutoff_hz).ceil() as usize
    }
}

/// One second-order section; first-order sections use `b2 = a2 = 0`.
#[derive(Debug, Clone, Copy)]
struct Section {
    b: [f64; 3],
    a: [f64; 2], // a1, a2 with a0 = 1
}

/// A designed Butterworth low-pass filter as a cascade of sections.
#[derive(Debug, Clone)]
pub struct ButterworthFilter {
    spec: FilterSpec,
    sections: Vec<Section>,
}

impl ButterworthFilter {
    pub fn design(spec: FilterSpec) -> Result<Self> {
        let n = spec.order;
        let fs = spec.sample_rate_hz;
        // prewarp the cutoff so the bilinear map lands it exactly
        let omega_d = std::f64::consts::PI * spec.cutoff_hz / fs;
        let omega_a = 2.0 * fs * omega_d.tan();
        let fs2 = 2.0 * fs;

        let mut sections = Vec::new();
        for k in 0..n.div_ceil(2) {
            let theta = std::f64::consts::PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
            let real_pole = n % 2 == 1 && 2 * k + 1 == n;
            let pa = Complex::new(omega_a * theta.cos(), omega_a * theta.sin());
            let pz = (Complex::new(fs2, 0.0) + pa) / (Complex::new(fs2, 0.0) - pa);
            let mut section = if real_pole {
                Section { b: [1.0, 1.0, 0.0], a: [-pz.re, 0.0] }
            } else {
                Section { b: [1.0, 2.0, 1.0], a: [-2.0 * pz.re, pz.norm_sqr()] }
            };
            // unit DC gain per section
            let gain = (1.0 + section.a[0] + section.a[1])
                / (section.b[0] + section.b[1] + section.b[2]);
            for b in &mut section.b {
                *b *= gain;
            }
            sections.push(section);
        }
        Ok(Self { spec, sections })
    }

    pub fn spec(&self) -> &FilterSpec {
        &self.spec
    }

    /// Causal single-pass filtering from zero initial state.
    pub fn apply(&self, signal: &[f64]) -> Vec<f64> {
        let mut state = vec![[0.0f64; 2]; self.sections.len()];
        signal
            .iter()
            .map(|&x0| {
                let mut x = x0;
                for (section, s) in self.sections.iter().zip(state.iter_mut()) {
                    // direct form II transposed
                    let y = section.b[0] * x + s[0];
                    s[0] = section.b[1] * x - section.a[0] * y + s[1];
                    s[1] = section.b[2] * x - section.a[1] * y;
                    x = y;
                }
                x
            })
            .collect()
    }

    /// Complex frequency response at `hz`.
    pub fn frequency_response(&self, hz: f64) -> Complex<f64> {
        let omega = 2.0 * std::f64::consts::PI * hz / self.spec.sample_rate_hz;
        let z1 = Complex::new(omega.cos(), -omega.sin()); // z^-1
        let z2 = z1 * z1;
        let mut h = Complex::new(1.0, 0.0);
        for s in &self.sections {
            let num = Complex::new(s.b[0], 0.0) + z1 * s.b[1] + z2 * s.b[2];
            let den = Complex::new(1.0, 0.0) + z1 * s.a[0] + z2 * s.a[1];
            h *= num / den;
        }
        h
    }

    /// All poles of the cascade in the z-plane.
    pub fn poles(&self) -> Vec<Complex<f64>> {
        let mut out = Vec::new();
        for s in &self.sections {
            if s.a[1] == 0.0 {
                out.push(Complex::new(-s.a[0], 0.0));
            } else {
                // roots of z^2 + a1 z + a2
                let disc = Complex::new(s.a[0] * s.a[0] - 4.0 * s.a[1], 0.0).sqrt();
                out.push((Complex::new(-s.a[0], 0.0) + disc) / 2.0);
                out.push((Complex::new(-s.a[0], 0.0) - disc) / 2.0);
            }
        }
        out
    }
}

/// Designs and applies a causal Butterworth low-pass; output has the same
/// length as the input. The first `spec.transient_len()` samples carry the
/// start-up transient.
pub fn butterworth_lowpass(signal: &[f64], spec: FilterSpec) -> Result<Vec<f64>> {
    if signal.len() < spec.order + 1 {
        return Err(Error::InsufficientSamples {
            needed: spec.order + 1,
            available: signal.len(),
        });
    }
    Ok(ButterworthFilter::design(spec)?.apply(signal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn paper_spec() -> FilterSpec {
        FilterSpec::new(0.2, 577.0).unwrap()
    }

    fn steady_state_amplitude(spec: FilterSpec, hz: f64, len: usize, tail: usize) -> f64 {
        let fs = spec.sample_rate_hz;
        let signal: Vec<f64> =
            (0..len).map(|k| (2.0 * PI * hz * k as f64 / fs).sin()).collect();
        let filtered = butterworth_lowpass(&signal, spec).unwrap();
        filtered[len - tail..].iter().fold(0.0f64, |m, y| m.max(y.abs()))
    }

    #[test]
    fn rejects_cutoff_at_nyquist() {
        assert!(FilterSpec::new(288.5, 577.0).is_err());
        assert!(FilterSpec::new(0.0, 577.0).is_err());
        assert!(FilterSpec::with_order(0, 0.2, 577.0).is_err());
    }

    #[test]
    fn constant_signal_passes_through() {
        let spec = FilterSpec::new(0.05, 1.0).unwrap();
        let signal = vec![2.5; 1200];
        let filtered = butterworth_lowpass(&signal, spec).unwrap();
        assert!(filtered[600..].iter().all(|y| (y - 2.5).abs() < 1e-6));
    }

    #[test]
    fn unit_dc_gain() {
        for (order, fc, fs) in [(4, 0.2, 577.0), (1, 5.0, 100.0), (3, 0.01, 2.0), (6, 40.0, 577.0)]
        {
            let f =
                ButterworthFilter::design(FilterSpec::with_order(order, fc, fs).unwrap()).unwrap();
            assert_abs_diff_eq!(f.frequency_response(0.0).norm(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn cutoff_attenuation_is_3db() {
        // |H| = 1/sqrt(2) at the cutoff for any Butterworth order
        for order in [1, 2, 3, 4, 5] {
            let f = ButterworthFilter::design(FilterSpec::with_order(order, 0.2, 577.0).unwrap())
                .unwrap();
            let mag = f.frequency_response(0.2).norm();
            assert_abs_diff_eq!(mag, 1.0 / 2.0f64.sqrt(), epsilon = 1e-6);
        }
    }

    #[test]
    fn sine_at_cutoff_reaches_analytic_amplitude() {
        // analytic Butterworth magnitude at the cutoff: 10^(-3.0103/20)
        let amp = steady_state_amplitude(paper_spec(), 0.2, 40_000, 3_000);
        assert_abs_diff_eq!(amp, 0.7079, epsilon = 0.01);
    }

    #[test]
    fn mains_frequency_is_annihilated() {
        // analytic magnitude 1/sqrt(1 + (60/0.2)^8) ~ 1.2e-10
        let amp = steady_state_amplitude(paper_spec(), 60.0, 40_000, 1_000);
        assert!(amp < 1e-9, "steady-state 60 Hz amplitude {amp}");
    }

    #[test]
    fn poles_strictly_inside_unit_circle() {
        for order in 1..=8 {
            let f = ButterworthFilter::design(FilterSpec::with_order(order, 0.2, 577.0).unwrap())
                .unwrap();
            let max_mag = f.poles().iter().map(|p| p.norm()).fold(0.0f64, f64::max);
            assert!(max_mag < 1.0, "order {order}: pole magnitude {max_mag}");
            assert_eq!(f.poles().len(), order);
        }
    }

    #[test]
    fn short_signal_rejected() {
        let err = butterworth_lowpass(&[1.0, 2.0], paper_spec()).unwrap_err();
        assert!(matches!(err, Error::InsufficientSamples { .. }));
    }
}
