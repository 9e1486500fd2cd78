//! Dataset CSV and model JSON persistence.
//!
//! CSV schema: header `t,u1..um,y1..yr`, UTF-8, `.` decimal separator.
//! Floats are written in Rust's shortest round-trip form, so a dataset or a
//! model survives a save/load cycle bit for bit. All writes go through a
//! temporary file in the destination directory followed by a rename.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use pbsid::{InnovationModel, SignalDataset};

/// Writes bytes atomically: temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes).context("writing temporary file")?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn dataset_header(m: usize, r: usize) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    header.extend((1..=m).map(|i| format!("u{i}")));
    header.extend((1..=r).map(|i| format!("y{i}")));
    header
}

/// Serializes a dataset to CSV.
pub fn dataset_to_csv(dataset: &SignalDataset) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(dataset_header(dataset.input_dim(), dataset.output_dim()))?;
    for k in 0..dataset.len() {
        let mut record = vec![format!("{}", dataset.timestamps()[k])];
        record.extend(dataset.inputs()[k].iter().map(|v| format!("{v}")));
        record.extend(dataset.outputs()[k].iter().map(|v| format!("{v}")));
        writer.write_record(&record)?;
    }
    Ok(writer.into_inner()?)
}

pub fn write_dataset(path: &Path, dataset: &SignalDataset) -> Result<()> {
    atomic_write(path, &dataset_to_csv(dataset)?)
}

/// Writes a header-only CSV for a zero-length record.
pub fn write_empty_dataset(path: &Path, m: usize, r: usize) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(dataset_header(m, r))?;
    atomic_write(path, &writer.into_inner()?)
}

/// Parses a dataset CSV; parse failures carry 1-based line numbers.
pub fn read_dataset(path: &Path) -> Result<SignalDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let header = reader.headers().context("reading CSV header")?.clone();
    if header.is_empty() || header.get(0) != Some("t") {
        bail!("{}: first column must be `t`", path.display());
    }
    let m = header.iter().skip(1).take_while(|h| h.starts_with('u')).count();
    let r = header.iter().skip(1 + m).take_while(|h| h.starts_with('y')).count();
    if m == 0 || r == 0 || 1 + m + r != header.len() {
        bail!(
            "{}: header must be t,u1..um,y1..yr, got `{}`",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        );
    }

    let mut timestamps = Vec::new();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2; // header is line 1
        let record = record.with_context(|| format!("{}:{line}: malformed row", path.display()))?;
        if record.len() != 1 + m + r {
            bail!(
                "{}:{line}: expected {} fields, found {}",
                path.display(),
                1 + m + r,
                record.len()
            );
        }
        let parse = |idx: usize| -> Result<f64> {
            record[idx]
                .trim()
                .parse::<f64>()
                .with_context(|| format!("{}:{line}: bad number `{}`", path.display(), &record[idx]))
        };
        timestamps.push(parse(0)?);
        inputs.push(DVector::from_iterator(m, (1..=m).map(&parse).collect::<Result<Vec<_>>>()?));
        outputs.push(DVector::from_iterator(
            r,
            (1 + m..1 + m + r).map(&parse).collect::<Result<Vec<_>>>()?,
        ));
    }
    if timestamps.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    let sample_period =
        if timestamps.len() >= 2 { timestamps[1] - timestamps[0] } else { 1.0 };
    if !(sample_period > 0.0) {
        bail!("{}: timestamps must be increasing", path.display());
    }
    let dataset = SignalDataset::from_parts(
        timestamps,
        inputs,
        outputs,
        sample_period,
        (1..=m).map(|i| format!("u{i}")).collect(),
        (1..=r).map(|i| format!("y{i}")).collect(),
    )?;
    Ok(dataset)
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn rows_to_matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        bail!("matrix `{name}` is not {nrows}x{ncols}");
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// Summary scores recorded alongside a model.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ScoreBlock {
    pub relative_error: f64,
    pub vaf: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub tool_version: String,
    pub method: String,
    pub identification_sha256: String,
    pub validation_sha256: String,
    pub scores: ScoreBlock,
}

/// On-disk model form: explicit dimensions and row-major matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub p: usize,
    pub f: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub k: Vec<Vec<f64>>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl ModelFile {
    pub fn from_model(model: &InnovationModel, provenance: Provenance) -> Self {
        Self {
            n: model.state_order(),
            m: model.input_dim(),
            r: model.output_dim(),
            p: model.p_used.unwrap_or(0),
            f: model.f_used.unwrap_or(0),
            a: matrix_rows(&model.a),
            b: matrix_rows(&model.b),
            c: matrix_rows(&model.c),
            k: matrix_rows(&model.k),
            provenance,
        }
    }

    pub fn to_model(&self) -> Result<InnovationModel> {
        let mut model = InnovationModel::new(
            rows_to_matrix(&self.a, self.n, self.n, "A")?,
            rows_to_matrix(&self.b, self.n, self.m, "B")?,
            rows_to_matrix(&self.c, self.r, self.n, "C")?,
            rows_to_matrix(&self.k, self.n, self.r, "K")?,
        )?;
        model.p_used = (self.p > 0).then_some(self.p);
        model.f_used = (self.f > 0).then_some(self.f);
        Ok(model)
    }
}

pub fn write_model(path: &Path, file: &ModelFile) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(file)?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))
}
