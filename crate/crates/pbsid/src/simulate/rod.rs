//! Finite-difference model of a heated rod: 1D conduction with lateral
//! convection losses, band heaters driven by squared voltage fractions, and
//! point temperature sensors.
//!
//! The PDE per unit length is
//!
//! ```text
//! rho c A_c dT/dt = k A_c d²T/dx² - h P (T - T_amb) + q(x, t)
//! ```
//!
//! with cross-section area `A_c`, perimeter `P`, insulated (zero-flux) ends
//! and heater power deposited uniformly over each heater's width. Time
//! stepping is backward Euler (unconditionally stable, so multi-minute sample
//! periods cost nothing), space is second-order central differences, and each
//! step solves one tridiagonal system.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::SignalDataset;
use crate::error::{Error, Result};

/// Geometry, material and discretization parameters of the rod plant.
///
/// Defaults describe a 2 m x 15 mm aluminum rod with four band heaters and
/// seven sensors; the convection coefficient is calibrated so the first
/// sensor's step response has a dominant time constant near 750 s.
#[derive(Debug, Clone, PartialEq)]
pub struct RodConfig {
    /// Rod length in meters.
    pub length: f64,
    /// Rod diameter in meters.
    pub diameter: f64,
    /// Thermal conductivity, W/(m K).
    pub conductivity: f64,
    /// Density, kg/m^3.
    pub density: f64,
    /// Specific heat, J/(kg K).
    pub specific_heat: f64,
    /// Lateral convection coefficient, W/(m^2 K).
    pub convection_coeff: f64,
    /// Ambient temperature, degrees Celsius.
    pub ambient: f64,
    /// Heater center positions in meters from the left end.
    pub heater_positions: Vec<f64>,
    /// Heater width in meters.
    pub heater_width: f64,
    /// Rated heater power in watts at full voltage.
    pub heater_max_power: f64,
    /// Sensor positions in meters from the left end.
    pub sensor_positions: Vec<f64>,
    /// Number of spatial grid nodes.
    pub grid_points: usize,
    /// Internal integration step in seconds.
    pub dt: f64,
}

impl Default for RodConfig {
    fn default() -> Self {
        Self {
            length: 2.0,
            diameter: 0.015,
            conductivity: 205.0,
            density: 2700.0,
            specific_heat: 900.0,
            convection_coeff: 9.4,
            ambient: 26.5,
            heater_positions: vec![0.25, 0.65, 1.05, 1.55],
            heater_width: 0.03,
            heater_max_power: 300.0,
            sensor_positions: vec![0.35, 0.50, 0.70, 0.90, 1.10, 1.50, 1.75],
            grid_points: 101,
            dt: 1.0,
        }
    }
}

impl RodConfig {
    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 8] = [
            ("length", self.length),
            ("diameter", self.diameter),
            ("conductivity", self.conductivity),
            ("density", self.density),
            ("specific_heat", self.specific_heat),
            ("convection_coeff", self.convection_coeff),
            ("heater_width", self.heater_width),
            ("heater_max_power", self.heater_max_power),
        ];
        for (field, value) in positive {
            if !(value > 0.0) {
                return Err(Error::InvalidConfig {
                    field,
                    reason: format!("must be positive, got {value}"),
                });
            }
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig {
                field: "dt",
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        if self.grid_points < 3 {
            return Err(Error::InvalidConfig {
                field: "grid_points",
                reason: format!("need at least 3 nodes, got {}", self.grid_points),
            });
        }
        if self.heater_positions.is_empty() {
            return Err(Error::InvalidConfig {
                field: "heater_positions",
                reason: "at least one heater required".into(),
            });
        }
        if self.sensor_positions.is_empty() {
            return Err(Error::InvalidConfig {
                field: "sensor_positions",
                reason: "at least one sensor required".into(),
            });
        }
        for (field, list) in
            [("heater_positions", &self.heater_positions), ("sensor_positions", &self.sensor_positions)]
        {
            if let Some(x) = list.iter().find(|x| **x < 0.0 || **x > self.length) {
                return Err(Error::InvalidConfig {
                    field,
                    reason: format!("position {x} outside [0, {}]", self.length),
                });
            }
        }
        Ok(())
    }

    fn dx(&self) -> f64 {
        self.length / (self.grid_points - 1) as f64
    }

    /// Convective decay rate `4h/(rho c d)`, the reciprocal of the lumped
    /// cooling time constant.
    fn beta(&self) -> f64 {
        4.0 * self.convection_coeff / (self.density * self.specific_heat * self.diameter)
    }

    fn diffusivity(&self) -> f64 {
        self.conductivity / (self.density * self.specific_heat)
    }

    fn cross_section(&self) -> f64 {
        std::f64::consts::PI * self.diameter * self.diameter / 4.0
    }

    /// Per-heater normalized deposition profiles in 1/m: integrating
    /// `profile * dx` with half-weight end nodes gives exactly one, so each
    /// heater deposits exactly its commanded power regardless of how the
    /// grid quantizes its width.
    fn heater_profiles(&self) -> Vec<Vec<f64>> {
        let g = self.grid_points;
        let dx = self.dx();
        let node_weight = |i: usize| if i == 0 || i == g - 1 { 0.5 } else { 1.0 };
        self.heater_positions
            .iter()
            .map(|&pos| {
                let mut profile = vec![0.0f64; g];
                for (i, slot) in profile.iter_mut().enumerate() {
                    let x = i as f64 * dx;
                    if (x - pos).abs() <= self.heater_width / 2.0 {
                        *slot = 1.0;
                    }
                }
                let mut total: f64 =
                    profile.iter().enumerate().map(|(i, v)| v * node_weight(i) * dx).sum();
                if total == 0.0 {
                    // heater narrower than the grid: deposit on the nearest node
                    let i = ((pos / dx).round() as usize).min(g - 1);
                    profile[i] = 1.0;
                    total = node_weight(i) * dx;
                }
                for v in &mut profile {
                    *v /= total;
                }
                profile
            })
            .collect()
    }

    fn sample_sensors(&self, temperature: &[f64]) -> Vec<f64> {
        let dx = self.dx();
        self.sensor_positions
            .iter()
            .map(|&pos| {
                let j = ((pos / dx).floor() as usize).min(self.grid_points - 2);
                let w = (pos - j as f64 * dx) / dx;
                (1.0 - w) * temperature[j] + w * temperature[j + 1]
            })
            .collect()
    }
}

/// Additive measurement disturbances applied to the sensor outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorNoise {
    /// Standard deviation of white Gaussian noise per sensor, in kelvin.
    pub gaussian_sigma: f64,
    /// Amplitude of a common sinusoidal contamination, in kelvin.
    pub mains_amplitude: f64,
    /// Frequency of the sinusoidal contamination in hertz.
    pub mains_hz: f64,
    pub seed: u64,
}

impl SensorNoise {
    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self { gaussian_sigma: sigma, mains_amplitude: 0.0, mains_hz: 60.0, seed }
    }
}

/// Solves the tridiagonal system in place (Thomas algorithm). `sub` and `sup`
/// hold the off-diagonals, `diag` the main diagonal; all are consumed.
fn solve_tridiagonal(
    mut sub: Vec<f64>,
    mut diag: Vec<f64>,
    sup: Vec<f64>,
    mut rhs: Vec<f64>,
) -> Vec<f64> {
    let n = diag.len();
    for i in 1..n {
        let w = sub[i - 1] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
        sub[i - 1] = 0.0;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    }
    x
}

/// Backward-Euler stencil coefficients for a step of length `dt`.
fn implicit_stencil(config: &RodConfig, dt: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let g = config.grid_points;
    let lambda = config.diffusivity() * dt / (config.dx() * config.dx());
    let main = 1.0 + 2.0 * lambda + config.beta() * dt;
    let mut sub = vec![-lambda; g - 1];
    let mut sup = vec![-lambda; g - 1];
    // zero-flux ends: the ghost node mirrors the interior neighbor
    sup[0] = -2.0 * lambda;
    sub[g - 2] = -2.0 * lambda;
    (sub, vec![main; g], sup)
}

/// Heating rate per node in K/s for a given voltage-fraction vector.
fn source_rate(config: &RodConfig, profiles: &[Vec<f64>], voltages: &DVector<f64>) -> Vec<f64> {
    let g = config.grid_points;
    let heat_capacity_per_len =
        config.density * config.specific_heat * config.cross_section();
    let mut rate = vec![0.0f64; g];
    for (profile, v) in profiles.iter().zip(voltages.iter()) {
        let power = config.heater_max_power * v * v;
        for (slot, phi) in rate.iter_mut().zip(profile) {
            *slot += power * phi / heat_capacity_per_len;
        }
    }
    rate
}

/// Simulates the rod under a zero-order-hold voltage schedule.
///
/// Each `voltages[k]` (fractions of full voltage, entries in `[0, 1]`, one per
/// heater) is held for `sample_period` seconds. The returned dataset contains
/// `u_k = v_k²` elementwise and the sensor temperatures sampled at
/// `t_k = k * sample_period`, before the k-th hold interval is integrated.
/// Internally the interval is covered by backward-Euler substeps no longer
/// than `config.dt`.
pub fn simulate_rod(
    config: &RodConfig,
    voltages: &[DVector<f64>],
    sample_period: f64,
    noise: Option<&SensorNoise>,
) -> Result<SignalDataset> {
    config.validate()?;
    if voltages.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, available: 0 });
    }
    if !(sample_period > 0.0) {
        return Err(Error::InvalidArgument("sample period must be positive".into()));
    }
    let heaters = config.heater_positions.len();
    for (k, v) in voltages.iter().enumerate() {
        if v.len() != heaters {
            return Err(Error::DimensionMismatch(format!(
                "voltage vector {k} has {} entries for {heaters} heaters",
                v.len()
            )));
        }
        if v.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidArgument(format!(
                "voltage fractions must lie in [0, 1], sample {k} violates this"
            )));
        }
    }

    let substeps = (sample_period / config.dt).ceil() as usize;
    let dt = sample_period / substeps as f64;
    let (sub, diag, sup) = implicit_stencil(config, dt);
    let profiles = config.heater_profiles();
    let beta = config.beta();

    let mut rng = noise.map(|n| ChaCha8Rng::seed_from_u64(n.seed));
    let mut temperature = vec![config.ambient; config.grid_points];
    let mut outputs = Vec::with_capacity(voltages.len());
    let mut inputs = Vec::with_capacity(voltages.len());

    for (k, v) in voltages.iter().enumerate() {
        let mut sensors = config.sample_sensors(&temperature);
        if let Some(spec) = noise {
            let rng = rng.as_mut().expect("rng present with noise");
            let t_k = k as f64 * sample_period;
            let mains = spec.mains_amplitude
                * (2.0 * std::f64::consts::PI * spec.mains_hz * t_k).sin();
            for s in &mut sensors {
                let e: f64 = StandardNormal.sample(rng);
                *s += spec.gaussian_sigma * e + mains;
            }
        }
        outputs.push(DVector::from_vec(sensors));
        inputs.push(v.map(|x| x * x));

        let rate = source_rate(config, &profiles, v);
        for _ in 0..substeps {
            let rhs: Vec<f64> = temperature
                .iter()
                .zip(&rate)
                .map(|(t, q)| t + dt * (beta * config.ambient + q))
                .collect();
            temperature = solve_tridiagonal(sub.clone(), diag.clone(), sup.clone(), rhs);
        }
    }
    SignalDataset::new(inputs, outputs, sample_period)
}

/// Steady-state temperature profile under a constant voltage-fraction vector,
/// from the direct solve of the stationary balance.
pub fn steady_state(config: &RodConfig, voltages: &DVector<f64>) -> Result<Vec<f64>> {
    config.validate()?;
    if voltages.len() != config.heater_positions.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} voltages for {} heaters",
            voltages.len(),
            config.heater_positions.len()
        )));
    }
    let g = config.grid_points;
    let lambda = config.diffusivity() / (config.dx() * config.dx());
    let beta = config.beta();
    let mut sub = vec![-lambda; g - 1];
    let mut sup = vec![-lambda; g - 1];
    sup[0] = -2.0 * lambda;
    sub[g - 2] = -2.0 * lambda;
    let diag = vec![2.0 * lambda + beta; g];
    let profiles = config.heater_profiles();
    let rate = source_rate(config, &profiles, voltages);
    let rhs: Vec<f64> = rate.iter().map(|q| beta * config.ambient + q).collect();
    Ok(solve_tridiagonal(sub, diag, sup, rhs))
}

/// Sensor readings for a full temperature profile.
pub fn sample_sensors(config: &RodConfig, temperature: &[f64]) -> Vec<f64> {
    config.sample_sensors(temperature)
}

/// Lateral convective loss of a temperature profile, in watts, by trapezoidal
/// quadrature of `h P (T - T_amb)` along the rod.
pub fn convective_loss(config: &RodConfig, temperature: &[f64]) -> f64 {
    let perimeter = std::f64::consts::PI * config.diameter;
    let dx = config.dx();
    let g = temperature.len();
    let mut integral = 0.0;
    for (i, t) in temperature.iter().enumerate() {
        let w = if i == 0 || i == g - 1 { 0.5 } else { 1.0 };
        integral += w * (t - config.ambient) * dx;
    }
    config.convection_coeff * perimeter * integral
}

/// Time of the first crossing of `1 - 1/e` of the total rise — the
/// first-order time-constant estimate used for step responses.
pub fn rise_time_constant(times: &[f64], response: &[f64]) -> Result<f64> {
    if times.len() != response.len() || times.len() < 2 {
        return Err(Error::InvalidArgument("need matching times and samples".into()));
    }
    let y0 = response[0];
    let y_end = *response.last().expect("nonempty");
    if (y_end - y0).abs() == 0.0 {
        return Err(Error::Degenerate("flat response has no time constant".into()));
    }
    let target = y0 + (1.0 - (-1.0f64).exp()) * (y_end - y0);
    let rising = y_end > y0;
    for (t, y) in times.iter().zip(response) {
        if (rising && *y >= target) || (!rising && *y <= target) {
            return Ok(*t);
        }
    }
    Err(Error::Degenerate("response never crossed the 63.2% level".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn step_voltages(v: f64, len: usize) -> Vec<DVector<f64>> {
        (0..len).map(|_| DVector::from_row_slice(&[v, 0.0, 0.0, 0.0])).collect()
    }

    #[test]
    fn zero_input_stays_at_ambient() {
        let config = RodConfig::default();
        let voltages = vec![DVector::zeros(4); 30];
        let ds = simulate_rod(&config, &voltages, 96.0, None).unwrap();
        for y in ds.outputs() {
            for t in y.iter() {
                assert_abs_diff_eq!(*t, config.ambient, epsilon = 1e-9);
            }
        }
        for u in ds.inputs() {
            assert_eq!(u.norm(), 0.0);
        }
    }

    #[test]
    fn discrete_steady_state_balances_energy() {
        let config = RodConfig::default();
        let v = DVector::from_row_slice(&[0.9, 0.4, 0.0, 0.7]);
        let profile = steady_state(&config, &v).unwrap();
        let input_power: f64 =
            v.iter().map(|x| config.heater_max_power * x * x).sum();
        let loss = convective_loss(&config, &profile);
        assert!(
            (loss - input_power).abs() / input_power < 1e-10,
            "loss {loss} vs input {input_power}"
        );
    }

    #[test]
    fn temperatures_never_drop_below_ambient() {
        let config = RodConfig::default();
        let mut voltages = step_voltages(0.9, 40);
        voltages.extend(step_voltages(0.0, 40));
        let ds = simulate_rod(&config, &voltages, 96.0, None).unwrap();
        for y in ds.outputs() {
            for t in y.iter() {
                assert!(*t >= config.ambient - 1e-9);
            }
        }
    }

    #[test]
    fn quadratic_power_law_in_steady_state() {
        let config = RodConfig::default();
        let rise = |v: f64| {
            let profile =
                steady_state(&config, &DVector::from_row_slice(&[v, 0.0, 0.0, 0.0])).unwrap();
            sample_sensors(&config, &profile)[0] - config.ambient
        };
        let (r3, r6, r9) = (rise(0.3), rise(0.6), rise(0.9));
        assert_abs_diff_eq!(r9 / r3, 9.0, epsilon = 9.0 * 0.02);
        assert_abs_diff_eq!(r6 / r3, 4.0, epsilon = 4.0 * 0.02);
        assert_abs_diff_eq!(r9 / r6, 2.25, epsilon = 2.25 * 0.02);
    }

    #[test]
    fn grid_refinement_changes_little() {
        let coarse = RodConfig::default();
        let fine = RodConfig { grid_points: 201, dt: 0.5, ..RodConfig::default() };
        let voltages = step_voltages(0.8, 30);
        let a = simulate_rod(&coarse, &voltages, 96.0, None).unwrap();
        let b = simulate_rod(&fine, &voltages, 96.0, None).unwrap();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for (ya, yb) in a.outputs().iter().zip(b.outputs()) {
            num += (ya - yb).norm_squared();
            den += ya
                .iter()
                .map(|t| (t - coarse.ambient) * (t - coarse.ambient))
                .sum::<f64>();
        }
        let rel = (num / den.max(1e-30)).sqrt();
        assert!(rel < 0.01, "refinement moved trajectories by {rel}");
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let config = RodConfig::default();
        let voltages = step_voltages(0.5, 10);
        let noise = SensorNoise::gaussian(0.1, 42);
        let a = simulate_rod(&config, &voltages, 96.0, Some(&noise)).unwrap();
        let b = simulate_rod(&config, &voltages, 96.0, Some(&noise)).unwrap();
        assert_eq!(a, b);
        let c =
            simulate_rod(&config, &voltages, 96.0, Some(&SensorNoise::gaussian(0.1, 43)))
                .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_config_names_field() {
        let config = RodConfig { diameter: 0.0, ..RodConfig::default() };
        match simulate_rod(&config, &step_voltages(0.1, 2), 1.0, None).unwrap_err() {
            Error::InvalidConfig { field, .. } => assert_eq!(field, "diameter"),
            other => panic!("unexpected {other:?}"),
        }
        let config = RodConfig { sensor_positions: vec![2.5], ..RodConfig::default() };
        assert!(matches!(
            steady_state(&config, &DVector::zeros(4)).unwrap_err(),
            Error::InvalidConfig { field: "sensor_positions", .. }
        ));
    }

    #[test]
    fn out_of_range_voltage_rejected() {
        let config = RodConfig::default();
        let voltages = vec![DVector::from_row_slice(&[1.2, 0.0, 0.0, 0.0])];
        assert!(simulate_rod(&config, &voltages, 1.0, None).is_err());
    }
}
