use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use wgraphlets::atlas::GraphletAtlas;
use wgraphlets::measures::{MeasureKind, Statistic};
use wgraphlets::pdb::{parse_pdb, ResidueRange};
use wgraphlets::pipeline::{self, DatasetManifest, EvaluateOptions, ExtractConfig};
use wgraphlets::psn::{build_psn, PsnOptions, SequencePositions, DEFAULT_CUTOFF};

#[derive(Parser)]
#[command(name = "wgraphlets", version, about = "Weighted graphlet features for protein structure networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the graphlet atlas.
    Atlas {
        #[command(subcommand)]
        action: AtlasAction,
    },
    /// Build a single protein structure network.
    Psn {
        #[command(subcommand)]
        action: PsnAction,
    },
    /// Compute one measure for every sample in a manifest.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        measure: MeasureKind,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: f64,
        #[arg(long, default_value = "cvm")]
        statistic: Statistic,
        #[arg(long = "seq-positions", default_value = "ordinal")]
        seq_positions: SequencePositions,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validate logistic regression on a feature store.
    Evaluate {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        /// Reduce matrix measures to column correlations before fitting.
        #[arg(long)]
        cc: bool,
        /// Permit classes with fewer members than folds.
        #[arg(long)]
        allow_small_classes: bool,
        /// Report path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export matrix features for the sequence-model trainer.
    ExportDnn {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum AtlasAction {
    /// Print graphlets, edge orbits and ordered classes as JSON.
    Dump {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PsnAction {
    /// Write the edge list with space distances and weights.
    Build {
        #[arg(long)]
        pdb: PathBuf,
        #[arg(long)]
        chain: char,
        #[arg(long)]
        range: Option<ResidueRange>,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: f64,
        #[arg(long = "seq-positions", default_value = "ordinal")]
        seq_positions: SequencePositions,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WGRAPHLETS_LOG", "warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Atlas { action: AtlasAction::Dump { out } } => {
            let atlas = GraphletAtlas::global();
            let mut text = serde_json::to_string_pretty(&atlas.to_json())?;
            text.push('\n');
            emit(out.as_deref(), &text)
        }
        Command::Psn { action: PsnAction::Build { pdb, chain, range, cutoff, seq_positions, out } } => {
            let text = fs::read_to_string(&pdb).with_context(|| format!("reading {}", pdb.display()))?;
            let id = pdb.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let residues = parse_pdb(&text, &id, chain, range)?;
            let psn = build_psn(&residues, PsnOptions { cutoff, positions: seq_positions, accelerate: true })?;
            log::info!("{id}:{chain}: {} residues, {} edges", psn.node_count(), psn.edge_count());
            emit(out.as_deref(), &psn.to_dump())
        }
        Command::Extract { manifest, measure, cutoff, statistic, seq_positions, workers, out } => {
            let manifest = DatasetManifest::load(&manifest)?;
            let config = ExtractConfig { measure, cutoff, statistic, sequence_positions: seq_positions, workers };
            let summary = pipeline::extract(&manifest, &config, &out)?;
            for f in &summary.failures {
                eprintln!("failed: {}: {}", f.id, f.error);
            }
            eprintln!(
                "extracted {} of {} samples into {}",
                summary.succeeded,
                manifest.entries.len(),
                summary.store.display()
            );
            Ok(())
        }
        Command::Evaluate { store, folds, seed, lambda, workers, cc, allow_small_classes, out } => {
            rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build_global().ok();
            let opts = EvaluateOptions {
                folds,
                seed,
                lambda,
                reduce_cc: cc,
                allow_small_classes,
                ..EvaluateOptions::default()
            };
            let report = pipeline::evaluate(&store, &opts)?;
            eprintln!("mean error {:.4} over {} folds", report.mean_error, report.folds.len());
            emit(out.as_deref(), &report.to_json())
        }
        Command::ExportDnn { store, out, folds, seed } => {
            let summary = pipeline::export_dnn(&store, &out, folds, seed)?;
            eprintln!("exported {} matrices into {}", summary.files, out.display());
            Ok(())
        }
    }
}
