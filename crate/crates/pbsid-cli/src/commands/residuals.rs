//! `pbsid residuals` — score a saved model on validation data and test the
//! residuals for whiteness.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;

use pbsid::residual::{autocorrelation, residual_sequence, whiteness_verdict};
use pbsid::select::{
    estimate_initial_state, simulate_method_a, simulate_method_b, simulate_method_c, Method,
};

use crate::io;

#[derive(Debug, Args)]
pub struct ResidualArgs {
    /// Model JSON produced by `identify`.
    #[arg(long)]
    pub model: PathBuf,
    /// Validation dataset CSV.
    #[arg(long)]
    pub valid: PathBuf,
    /// Simulation method; defaults to the one recorded in the model file.
    #[arg(long)]
    pub method: Option<Method>,
    /// Largest autocorrelation lag.
    #[arg(long, default_value_t = 20)]
    pub max_lag: usize,
    /// Violation-fraction threshold for the overall verdict.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    /// Initial-state window; derived from the state order when omitted.
    #[arg(long)]
    pub h: Option<usize>,
    /// Output CSV of per-entry autocorrelations.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &ResidualArgs) -> Result<()> {
    let model_file = io::read_model(&args.model)?;
    let model = model_file.to_model()?;
    let valid = io::read_dataset(&args.valid)?;
    if model.input_dim() != valid.input_dim() || model.output_dim() != valid.output_dim() {
        bail!(
            "dimension mismatch: model is {}-in {}-out, validation data is {}-in {}-out",
            model.input_dim(),
            model.output_dim(),
            valid.input_dim(),
            valid.output_dim()
        );
    }
    let method = match args.method {
        Some(m) => m,
        None => model_file.provenance.method.parse().unwrap_or(Method::A),
    };

    let n1 = valid.len() - 1;
    let r = model.output_dim();
    let h = args
        .h
        .unwrap_or_else(|| (model.state_order().div_ceil(r) + 5).max(10).min((n1 / 4).max(1)));
    let x0 = estimate_initial_state(&model, &valid, h, method.into())?;
    let predicted = match method {
        Method::A => simulate_method_a(&model, &x0.state, valid.inputs()),
        Method::B => simulate_method_b(&model, &x0.state, valid.inputs()),
        Method::C => simulate_method_c(&model, &x0.state, valid.inputs(), valid.outputs())?,
    };
    let residuals = residual_sequence(valid.outputs(), &predicted)?;
    let report = autocorrelation(&residuals, args.max_lag)?;
    let verdict = whiteness_verdict(&report, args.threshold);

    // long-format CSV: one row per (b, s, lag), 1-based entries
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["b", "s", "lag", "gamma", "bound", "exceeds"])?;
    for (lag, gamma) in report.autocorrelation.iter().enumerate() {
        for b in 0..r {
            for s in 0..r {
                let value = gamma[(b, s)];
                let exceeds = lag > 0 && value.abs() > report.bound;
                writer.write_record([
                    format!("{}", b + 1),
                    format!("{}", s + 1),
                    format!("{lag}"),
                    format!("{value}"),
                    format!("{}", report.bound),
                    format!("{}", u8::from(exceeds)),
                ])?;
            }
        }
    }
    io::atomic_write(&args.out, &writer.into_inner()?)?;
    println!("wrote {}", args.out.display());

    println!(
        "whiteness: bound = {:.4} (N1 = {}), violations = {} of {} ({:.1}%)",
        report.bound,
        report.n1,
        report.violations.len(),
        r * r * report.max_lag,
        verdict.overall_fraction * 100.0
    );
    for (b, s) in &verdict.flagged_pairs {
        println!(
            "  entry ({}, {}) flagged: {:.0}% of lags outside the band",
            b + 1,
            s + 1,
            verdict.pair_fractions[(*b, *s)] * 100.0
        );
    }
    println!("verdict: {}", if verdict.pass { "PASS" } else { "FAIL" });
    Ok(())
}
