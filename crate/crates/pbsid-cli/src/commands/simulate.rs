//! `pbsid simulate` — generate identification and validation records from the
//! synthetic heat-rod plant.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Deserialize;

use pbsid::simulate::{prbs_like_inputs, simulate_rod, RodConfig, SensorNoise};

use crate::io;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Rod configuration JSON; defaults describe the 2 m aluminum rod.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for the excitation voltages and sensor noise.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving ident.csv and valid.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Identification record length in samples.
    #[arg(long, default_value_t = 180)]
    pub ident_len: usize,
    /// Validation record length in samples.
    #[arg(long, default_value_t = 120)]
    pub valid_len: usize,
    /// Sample and hold period in seconds.
    #[arg(long, default_value_t = 96.0)]
    pub sample_period: f64,
    /// Gaussian sensor noise standard deviation in kelvin.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    /// Amplitude of an additive mains-frequency sinusoid in kelvin.
    #[arg(long, default_value_t = 0.0)]
    pub mains_amplitude: f64,
}

/// Mirror of [`RodConfig`] with every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RodConfigFile {
    length: Option<f64>,
    diameter: Option<f64>,
    conductivity: Option<f64>,
    density: Option<f64>,
    specific_heat: Option<f64>,
    convection_coeff: Option<f64>,
    ambient: Option<f64>,
    heater_positions: Option<Vec<f64>>,
    heater_width: Option<f64>,
    heater_max_power: Option<f64>,
    sensor_positions: Option<Vec<f64>>,
    grid_points: Option<usize>,
    dt: Option<f64>,
}

impl RodConfigFile {
    fn into_config(self) -> RodConfig {
        let d = RodConfig::default();
        RodConfig {
            length: self.length.unwrap_or(d.length),
            diameter: self.diameter.unwrap_or(d.diameter),
            conductivity: self.conductivity.unwrap_or(d.conductivity),
            density: self.density.unwrap_or(d.density),
            specific_heat: self.specific_heat.unwrap_or(d.specific_heat),
            convection_coeff: self.convection_coeff.unwrap_or(d.convection_coeff),
            ambient: self.ambient.unwrap_or(d.ambient),
            heater_positions: self.heater_positions.unwrap_or(d.heater_positions),
            heater_width: self.heater_width.unwrap_or(d.heater_width),
            heater_max_power: self.heater_max_power.unwrap_or(d.heater_max_power),
            sensor_positions: self.sensor_positions.unwrap_or(d.sensor_positions),
            grid_points: self.grid_points.unwrap_or(d.grid_points),
            dt: self.dt.unwrap_or(d.dt),
        }
    }
}

pub fn load_rod_config(path: Option<&PathBuf>) -> Result<RodConfig> {
    match path {
        None => Ok(RodConfig::default()),
        Some(p) => {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            let file: RodConfigFile =
                serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", p.display()))?;
            Ok(file.into_config())
        }
    }
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let config = load_rod_config(args.config.as_ref())?;
    config.validate()?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    let heaters = config.heater_positions.len();
    let sensors = config.sensor_positions.len();
    let jobs = [
        ("ident.csv", args.ident_len, args.seed, args.seed.wrapping_add(2)),
        ("valid.csv", args.valid_len, args.seed.wrapping_add(1), args.seed.wrapping_add(3)),
    ];
    for (name, len, input_seed, noise_seed) in jobs {
        let path = args.out_dir.join(name);
        if len == 0 {
            io::write_empty_dataset(&path, heaters, sensors)?;
            println!("wrote {} (header only)", path.display());
            continue;
        }
        let voltages = prbs_like_inputs(heaters, len, input_seed);
        let noise = (args.noise_sigma > 0.0 || args.mains_amplitude > 0.0).then(|| SensorNoise {
            gaussian_sigma: args.noise_sigma,
            mains_amplitude: args.mains_amplitude,
            mains_hz: 60.0,
            seed: noise_seed,
        });
        let dataset = simulate_rod(&config, &voltages, args.sample_period, noise.as_ref())?;
        io::write_dataset(&path, &dataset)?;
        println!("wrote {} ({} samples, {} inputs, {} outputs)", path.display(), len, heaters, sensors);
    }
    Ok(())
}
