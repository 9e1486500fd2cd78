//! `pbsid preprocess` — condition a raw dataset: outlier removal, low-pass
//! filtering, detrending, decimation and PSD export.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use nalgebra::DVector;

use pbsid::preprocess::{
    butterworth_lowpass, detrend, downsample, psd_welch, remove_outliers, DetrendMode,
    FilterSpec, DEFAULT_OUTLIER_THRESHOLD, DEFAULT_OUTLIER_WINDOW,
};
use pbsid::SignalDataset;

use crate::io;

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Raw dataset CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Conditioned dataset CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Low-pass cutoff in hertz; enables filtering of the output channels.
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Butterworth order used with --cutoff.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Replace outliers with the local median before any filtering.
    #[arg(long)]
    pub remove_outliers: bool,
    /// Remove the mean or a least-squares line from every output channel.
    #[arg(long, value_parser = parse_detrend)]
    pub detrend: Option<DetrendMode>,
    /// Decimate to this sample period in seconds (integer multiple of the
    /// input period).
    #[arg(long)]
    pub downsample_period: Option<f64>,
    /// Write the PSD of one conditioned output channel to this CSV.
    #[arg(long)]
    pub psd_out: Option<PathBuf>,
    /// 1-based output channel for --psd-out.
    #[arg(long, default_value_t = 1)]
    pub psd_channel: usize,
}

fn parse_detrend(s: &str) -> Result<DetrendMode, String> {
    match s {
        "mean" => Ok(DetrendMode::Mean),
        "linear" => Ok(DetrendMode::Linear),
        other => Err(format!("unknown detrend mode `{other}` (use mean|linear)")),
    }
}

fn map_outputs(
    dataset: &SignalDataset,
    mut op: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<SignalDataset> {
    let r = dataset.output_dim();
    let n = dataset.len();
    let mut channels = Vec::with_capacity(r);
    for c in 0..r {
        let raw: Vec<f64> = dataset.outputs().iter().map(|y| y[c]).collect();
        channels.push(op(&raw)?);
    }
    let outputs: Vec<DVector<f64>> =
        (0..n).map(|k| DVector::from_fn(r, |c, _| channels[c][k])).collect();
    Ok(SignalDataset::from_parts(
        dataset.timestamps().to_vec(),
        dataset.inputs().to_vec(),
        outputs,
        dataset.sample_period(),
        dataset.input_labels().to_vec(),
        dataset.output_labels().to_vec(),
    )?)
}

pub fn run(args: &PreprocessArgs) -> Result<()> {
    let mut dataset = io::read_dataset(&args.input)?;
    let fs = 1.0 / dataset.sample_period();

    if args.remove_outliers {
        dataset = map_outputs(&dataset, |raw| {
            Ok(remove_outliers(raw, DEFAULT_OUTLIER_WINDOW, DEFAULT_OUTLIER_THRESHOLD)?)
        })?;
    }
    if let Some(cutoff) = args.cutoff {
        let spec = FilterSpec::with_order(args.order, cutoff, fs)?;
        dataset = map_outputs(&dataset, |raw| Ok(butterworth_lowpass(raw, spec)?))?;
    }
    if let Some(mode) = args.detrend {
        dataset = map_outputs(&dataset, |raw| Ok(detrend(raw, mode)?))?;
    }
    if let Some(period) = args.downsample_period {
        let ratio = period / dataset.sample_period();
        let factor = ratio.round();
        if factor < 1.0 || (ratio - factor).abs() > 1e-6 * ratio {
            bail!(
                "downsample period {period} s is not an integer multiple of the sample period {} s",
                dataset.sample_period()
            );
        }
        dataset = downsample(&dataset, factor as usize)?;
    }

    io::write_dataset(&args.out, &dataset)?;
    println!(
        "wrote {} ({} samples at {} s)",
        args.out.display(),
        dataset.len(),
        dataset.sample_period()
    );

    if let Some(psd_path) = &args.psd_out {
        let r = dataset.output_dim();
        if args.psd_channel < 1 || args.psd_channel > r {
            bail!("psd channel {} out of range 1..={r}", args.psd_channel);
        }
        let raw: Vec<f64> =
            dataset.outputs().iter().map(|y| y[args.psd_channel - 1]).collect();
        let fs_now = 1.0 / dataset.sample_period();
        let segment = (raw.len() / 4).clamp(2, 4096);
        let (freqs, power) = psd_welch(&raw, fs_now, segment, 0.5)?;
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["frequency_hz", "power"])?;
        for (f, p) in freqs.iter().zip(&power) {
            writer.write_record([format!("{f}"), format!("{p}")])?;
        }
        io::atomic_write(psd_path, &writer.into_inner()?)?;
        println!("wrote {} ({} bins)", psd_path.display(), freqs.len());
    }
    Ok(())
}
