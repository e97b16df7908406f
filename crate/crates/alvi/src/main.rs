use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alvi::{
    load_feature_csv, load_report, render_reports, run_experiment, write_feature_csv,
    write_ranking_csv, ExperimentConfig, HarnessError,
};
use alvi_core::data::generate_synthetic;
use alvi_core::selection::{rank_features, selection_size, DEFAULT_BINS};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(version, about = "Active-learning benchmark over feature CSVs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Gaussian-blob feature CSV.
    Synth {
        /// Instances per class, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
        #[arg(long, default_value_t = 64)]
        dim: usize,
        #[arg(long, default_value_t = 4.0)]
        separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank the features of a CSV by mutual information with the label.
    Select {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Number of features to mark selected; defaults to round(sqrt(n)).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a full cross-validated experiment and write its reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Maximum concurrent fold runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Re-render report files from a saved report.json.
    Report {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Synth {
            counts,
            dim,
            separation,
            seed,
            out,
        } => {
            let dataset = generate_synthetic(&counts, dim, separation, seed)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            write_feature_csv(&dataset, create(&out)?).map_err(io_at(&out))?;
            log::info!("wrote {} instances to {}", dataset.len(), out.display());
        }
        Command::Select {
            input,
            bins,
            k,
            out,
        } => {
            let dataset = load_feature_csv(&input).map_err(|source| HarnessError::Data {
                path: input.clone(),
                source,
            })?;
            if bins == 0 {
                return Err(HarnessError::Config("bins must be at least 1".into()));
            }
            let k = k.unwrap_or_else(|| selection_size(dataset.len(), dataset.dim()));
            let ranking = rank_features(&dataset, bins, k.min(dataset.dim()));
            write_ranking_csv(&ranking, create(&out)?).map_err(io_at(&out))?;
        }
        Command::Run {
            config,
            seed,
            out,
            jobs,
        } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let outdir = out.or_else(|| config.output_dir.clone()).ok_or_else(|| {
                HarnessError::Config("no output directory: pass --out or set output_dir".into())
            })?;
            let report = run_experiment(&config, jobs)?;
            let files = render_reports(&report, &outdir)?;
            log::info!("wrote {} files to {}", files.len(), outdir.display());
        }
        Command::Report { from, out } => {
            let report = load_report(&from)?;
            render_reports(&report, &out)?;
        }
    }
    Ok(())
}
