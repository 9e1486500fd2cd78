//! `pbsid identify` — run the two-stage identification pipeline and persist
//! the chosen model plus a scoring report.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use serde::Serialize;

use pbsid::select::{grid_search, Method, SelectionGrid};
use pbsid::varx::aic_scan;

use crate::io::{self, ModelFile, Provenance, ScoreBlock};

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    /// Identification dataset CSV.
    #[arg(long)]
    pub ident: PathBuf,
    /// Validation dataset CSV (must be distinct data).
    #[arg(long)]
    pub valid: PathBuf,
    /// Largest past window scanned by the AIC.
    #[arg(long, default_value_t = 40)]
    pub p_max: usize,
    /// Largest state order in the selection grid.
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    /// Validation method: A (open loop), B (predictor, own output),
    /// C (predictor, measured output).
    #[arg(long, default_value = "A")]
    pub method: Method,
    /// Initial-state window; derived from the state order when omitted.
    #[arg(long)]
    pub h: Option<usize>,
    /// Output path for the model JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Output path for the report JSON; defaults to `<out>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct AicRow {
    p: usize,
    aic: f64,
    degenerate: bool,
}

#[derive(Serialize)]
struct ScoreRow {
    n: usize,
    f: usize,
    relative_error: f64,
    vaf: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct Report {
    method: String,
    p_hat: usize,
    n_hat: usize,
    f_hat: usize,
    relative_error: f64,
    vaf: Vec<f64>,
    aic: Vec<AicRow>,
    scores: Vec<ScoreRow>,
    singular_values: Vec<f64>,
}

pub fn run(args: &IdentifyArgs) -> Result<()> {
    let ident = io::read_dataset(&args.ident)?;
    let valid = io::read_dataset(&args.valid)?;
    if ident.input_dim() != valid.input_dim() || ident.output_dim() != valid.output_dim() {
        bail!(
            "channel counts differ: identification {}x{}, validation {}x{}",
            ident.input_dim(),
            ident.output_dim(),
            valid.input_dim(),
            valid.output_dim()
        );
    }
    let ident_sha = io::sha256_hex(&args.ident)?;
    let valid_sha = io::sha256_hex(&args.valid)?;
    if ident_sha == valid_sha {
        eprintln!("warning: datasets overlap — validation file is identical to identification file");
    }

    let scan = aic_scan(&ident, args.p_max)?;
    println!("p_hat = {} (AIC over 1..={})", scan.p_hat, args.p_max);

    let grid = SelectionGrid::new(args.n_max, scan.p_hat, ident.output_dim())?;
    let result = grid_search(&ident, &valid, scan.p_hat, &grid, args.method, args.h)?;
    let best_score = result
        .scores
        .iter()
        .find(|s| s.n == result.best_n && s.f == result.best_f)
        .expect("best pair is scored");
    let vaf = best_score.vaf.clone().unwrap_or_default();
    println!(
        "best model: n = {}, f = {}, relative error = {:.4}%",
        result.best_n,
        result.best_f,
        best_score.relative_error * 100.0
    );

    let provenance = Provenance {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        method: args.method.to_string(),
        identification_sha256: ident_sha,
        validation_sha256: valid_sha,
        scores: ScoreBlock { relative_error: best_score.relative_error, vaf: vaf.clone() },
    };
    io::write_model(&args.out, &ModelFile::from_model(&result.best.model, provenance))?;
    println!("wrote {}", args.out.display());

    let report = Report {
        method: args.method.to_string(),
        p_hat: scan.p_hat,
        n_hat: result.best_n,
        f_hat: result.best_f,
        relative_error: best_score.relative_error,
        vaf,
        aic: scan
            .entries
            .iter()
            .map(|e| AicRow { p: e.p, aic: e.aic, degenerate: e.degenerate })
            .collect(),
        scores: result
            .scores
            .iter()
            .map(|s| ScoreRow {
                n: s.n,
                f: s.f,
                relative_error: s.relative_error,
                vaf: s.vaf.clone(),
            })
            .collect(),
        singular_values: result.best.singular_values.iter().copied().collect(),
    };
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.out.with_extension("report.json"));
    let mut bytes = serde_json::to_vec_pretty(&report)?;
    bytes.push(b'\n');
    io::atomic_write(&report_path, &bytes)?;
    println!("wrote {}", report_path.display());
    Ok(())
}
