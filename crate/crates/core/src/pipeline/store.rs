use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::manifest::{DatasetManifest, ManifestEntry};
use super::wgdv::{read_wgdv, write_wgdv, WgdvMatrix};
use crate::atlas::{GraphletAtlas, ORBIT_COUNT};
use crate::classify::{cross_validate, stratified_kfold, CvOptions, CvReport, FitOptions, FoldPlan, LabeledDataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::{self, corr_cc, Features, MeasureKind, Statistic};
use crate::pdb::parse_pdb;
use crate::psn::{build_psn, PsnOptions, SequencePositions, DEFAULT_CUTOFF};

pub const INDEX_FILE: &str = "index.json";
pub const VECTOR_TABLE: &str = "vectors.csv";
pub const MATRIX_DIR: &str = "matrices";
const STORE_FORMAT: &str = "wgraphlets-store";
const EXPORT_FORMAT: &str = "wgraphlets-dnn-export";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub measure: MeasureKind,
    pub cutoff: f64,
    pub statistic: Statistic,
    pub sequence_positions: SequencePositions,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            measure: MeasureKind::Graphlet35,
            cutoff: DEFAULT_CUTOFF,
            statistic: Statistic::CramerVonMises,
            sequence_positions: SequencePositions::Ordinal,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreSample {
    pub id: String,
    pub label: String,
    /// Matrix file relative to the store root, for matrix measures.
    pub file: Option<String>,
    pub rows: Option<usize>,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreIndex {
    pub format: String,
    pub format_version: u32,
    pub code_version: String,
    pub dataset: String,
    pub config: ExtractConfig,
    pub vector_table: Option<String>,
    pub samples: Vec<StoreSample>,
    pub failures: Vec<SampleFailure>,
}

impl StoreIndex {
    pub fn load(store: &Path) -> Result<Self> {
        let path = store.join(INDEX_FILE);
        let index: StoreIndex = serde_json::from_str(&fs::read_to_string(&path)?)?;
        if index.format != STORE_FORMAT {
            return Err(Error::Format { path, message: format!("not a feature store ('{}')", index.format) });
        }
        Ok(index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractSummary {
    pub store: PathBuf,
    pub succeeded: usize,
    pub failures: Vec<SampleFailure>,
}

enum Outcome {
    Vector(Vec<f64>),
    Matrix { file: String, rows: usize },
}

/// Parses, builds, measures and persists every manifest entry. A failing
/// sample is recorded in the index and does not stop the run.
pub fn extract(manifest: &DatasetManifest, config: &ExtractConfig, out: &Path) -> Result<ExtractSummary> {
    if manifest.entries.is_empty() {
        return Err(Error::Input("manifest has no samples".into()));
    }
    if !(config.cutoff > 0.0 && config.cutoff.is_finite()) {
        return Err(Error::Input(format!("cutoff must be positive, got {}", config.cutoff)));
    }
    fs::create_dir_all(out)?;
    if config.measure.is_matrix() {
        fs::create_dir_all(out.join(MATRIX_DIR))?;
    }
    let atlas = GraphletAtlas::global();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::Input(format!("worker pool: {e}")))?;
    let results: Vec<Result<Outcome>> = pool.install(|| {
        use rayon::prelude::*;
        manifest
            .entries
            .par_iter()
            .map(|entry| {
                let r = extract_one(entry, config, atlas, out);
                match &r {
                    Ok(_) => log::info!("{}: done", entry.id),
                    Err(e) => log::warn!("{}: {e}", entry.id),
                }
                r
            })
            .collect()
    });

    let mut samples = Vec::new();
    let mut failures = Vec::new();
    let mut vectors: Vec<(&ManifestEntry, Vec<f64>)> = Vec::new();
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok(Outcome::Vector(v)) => {
                samples.push(StoreSample {
                    id: entry.id.clone(),
                    label: entry.label.clone(),
                    file: None,
                    rows: None,
                    cols: v.len(),
                });
                vectors.push((entry, v));
            }
            Ok(Outcome::Matrix { file, rows }) => samples.push(StoreSample {
                id: entry.id.clone(),
                label: entry.label.clone(),
                file: Some(file),
                rows: Some(rows),
                cols: ORBIT_COUNT,
            }),
            Err(e) => failures.push(SampleFailure { id: entry.id.clone(), error: e.to_string() }),
        }
    }

    let vector_table = if config.measure.is_matrix() {
        None
    } else {
        let d = config.measure.vector_len().expect("vector measure");
        write_vector_table(&out.join(VECTOR_TABLE), d, &vectors)?;
        Some(VECTOR_TABLE.to_string())
    };

    let index = StoreIndex {
        format: STORE_FORMAT.into(),
        format_version: 1,
        code_version: env!("CARGO_PKG_VERSION").into(),
        dataset: manifest.name.clone(),
        config: *config,
        vector_table,
        samples,
        failures: failures.clone(),
    };
    write_json(&out.join(INDEX_FILE), &index)?;
    Ok(ExtractSummary { store: out.to_path_buf(), succeeded: index.samples.len(), failures })
}

fn extract_one(entry: &ManifestEntry, config: &ExtractConfig, atlas: &GraphletAtlas, out: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(&entry.pdb)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", entry.pdb.display())))?;
    let chain = parse_pdb(&text, &entry.id, entry.chain, entry.range)?;
    let psn = build_psn(
        &chain,
        PsnOptions { cutoff: config.cutoff, positions: config.sequence_positions, accelerate: true },
    )?;
    match measures::compute(psn.graph(), atlas, config.measure, config.statistic)? {
        Features::Vector(v) => Ok(Outcome::Vector(v.values)),
        Features::Matrix(m) => {
            let file = format!("{MATRIX_DIR}/{}.wgdv", entry.id);
            write_wgdv(&out.join(&file), &WgdvMatrix::from_matrix(&m.values)?)?;
            Ok(Outcome::Matrix { file, rows: m.values.rows() })
        }
    }
}

fn write_vector_table(path: &Path, dims: usize, rows: &[(&ManifestEntry, Vec<f64>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["id".to_string(), "label".to_string()];
    header.extend((0..dims).map(|k| format!("f{k}")));
    w.write_record(&header)?;
    for (entry, values) in rows {
        let mut rec = vec![entry.id.clone(), entry.label.clone()];
        rec.extend(values.iter().map(|&v| format_sig9(v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Formats like C's `%.9g`; integral values below 1e15 print as integers.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateOptions {
    pub folds: usize,
    pub seed: u64,
    pub lambda: f64,
    pub tolerance: f64,
    /// Reduce matrix measures to their column correlations first.
    pub reduce_cc: bool,
    pub allow_small_classes: bool,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        Self { folds: 5, seed: 0, lambda: 1.0, tolerance: 1e-6, reduce_cc: false, allow_small_classes: false }
    }
}

/// Loads the store's features and runs stratified cross-validation with
/// logistic regression.
pub fn evaluate(store: &Path, opts: &EvaluateOptions) -> Result<CvReport> {
    let index = StoreIndex::load(store)?;
    let kind = index.config.measure;
    let (measure, features, labels, ids) = if kind.is_matrix() {
        if !opts.reduce_cc {
            return Err(Error::Input(format!(
                "store holds the matrix measure '{kind}', but logistic regression needs fixed-length vectors; \
                 reduce it with corr_cc (--cc) or use export-dnn for the DNN trainer"
            )));
        }
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut ids = Vec::new();
        for s in &index.samples {
            let file = s.file.as_ref().ok_or_else(|| Error::Input(format!("sample '{}' has no matrix file", s.id)))?;
            let m = read_wgdv(&store.join(file))?.to_matrix();
            rows.push(corr_cc(&m)?);
            labels.push(s.label.clone());
            ids.push(s.id.clone());
        }
        (kind.cc_of().expect("matrix kind"), stack(rows, measures::cc_len(ORBIT_COUNT))?, labels, ids)
    } else {
        let table = index.vector_table.as_ref().ok_or_else(|| Error::Input("store has no vector table".into()))?;
        let (m, labels, ids) = read_vector_table(&store.join(table))?;
        (kind, m, labels, ids)
    };

    let dataset = LabeledDataset::from_named(features, &labels, ids)?;
    cross_validate(
        &dataset,
        &CvOptions {
            folds: opts.folds,
            seed: opts.seed,
            fit: FitOptions { lambda: opts.lambda, tolerance: opts.tolerance, ..FitOptions::default() },
            allow_small_classes: opts.allow_small_classes,
            dataset: index.dataset.clone(),
            measure: measure.name().into(),
            classifier: "logreg".into(),
        },
    )
}

fn stack(rows: Vec<Vec<f64>>, dims: usize) -> Result<Matrix> {
    let n = rows.len();
    let mut data = Vec::with_capacity(n * dims);
    for r in rows {
        if r.len() != dims {
            return Err(Error::DimensionMismatch { expected: dims, got: r.len() });
        }
        data.extend(r);
    }
    Ok(Matrix::from_vec(n, dims, data))
}

fn read_vector_table(path: &Path) -> Result<(Matrix, Vec<String>, Vec<String>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let dims = reader.headers()?.len().saturating_sub(2);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        ids.push(rec.get(0).unwrap_or_default().to_string());
        labels.push(rec.get(1).unwrap_or_default().to_string());
        let values = rec
            .iter()
            .skip(2)
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse { line, message: format!("bad feature value '{f}'") }))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    Ok((stack(rows, dims)?, labels, ids))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportSample {
    pub id: String,
    pub label: String,
    pub label_index: usize,
    pub file: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportIndex {
    pub format: String,
    pub format_version: u32,
    pub dataset: String,
    pub measure: MeasureKind,
    pub statistic: Statistic,
    pub cutoff: f64,
    pub cols: usize,
    pub labels: Vec<String>,
    pub samples: Vec<ExportSample>,
    /// Stratified plan over `samples`, built exactly as `evaluate` builds it.
    pub folds: Option<FoldPlan>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExportSummary {
    pub files: usize,
    pub index: ExportIndex,
}

/// Copies the store's matrices into `out` with a self-describing index for
/// the sequence-model trainer.
pub fn export_dnn(store: &Path, out: &Path, folds: usize, seed: u64) -> Result<ExportSummary> {
    let index = StoreIndex::load(store)?;
    if !index.config.measure.is_matrix() {
        return Err(Error::Input(format!(
            "store holds the vector measure '{}'; export-dnn needs egdvm or wegdvm matrices",
            index.config.measure
        )));
    }
    fs::create_dir_all(out)?;
    let mut labels: Vec<String> = index.samples.iter().map(|s| s.label.clone()).collect();
    labels.sort();
    labels.dedup();

    let mut samples = Vec::new();
    for s in &index.samples {
        let src = s.file.as_ref().ok_or_else(|| Error::Input(format!("sample '{}' has no matrix file", s.id)))?;
        let m = read_wgdv(&store.join(src))?;
        let file = format!("{}.wgdv", s.id);
        write_wgdv(&out.join(&file), &m)?;
        samples.push(ExportSample {
            id: s.id.clone(),
            label: s.label.clone(),
            label_index: labels.binary_search(&s.label).expect("label listed"),
            file,
            rows: m.rows as usize,
        });
    }

    let label_ids: Vec<usize> = samples.iter().map(|s| s.label_index).collect();
    let plan = if labels.len() >= 2 {
        match stratified_kfold(&label_ids, folds, seed, true) {
            Ok(p) => Some(p),
            Err(e) => {
                log::warn!("no fold plan exported: {e}");
                None
            }
        }
    } else {
        None
    };

    let export = ExportIndex {
        format: EXPORT_FORMAT.into(),
        format_version: 1,
        dataset: index.dataset.clone(),
        measure: index.config.measure,
        statistic: index.config.statistic,
        cutoff: index.config.cutoff,
        cols: ORBIT_COUNT,
        labels,
        samples,
        folds: plan,
    };
    write_json(&out.join(INDEX_FILE), &export)?;
    Ok(ExportSummary { files: export.samples.len(), index: export })
}
