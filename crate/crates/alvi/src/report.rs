//! CSV and JSON rendering of an [`ExperimentReport`].

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::experiment::{ExperimentReport, RunKey};
use crate::{ExperimentConfig, HarnessError};

pub const TABLE1: &str = "table1_auc.csv";
pub const TABLE2: &str = "table2_pvalues.csv";
pub const FIG1: &str = "fig1_curves.csv";
pub const QUARTILES: &str = "quartile_tests.csv";
pub const SUMMARY: &str = "summary.json";
/// Full report, readable by [`load_report`].
pub const REPORT: &str = "report.json";
pub const CURVES_DIR: &str = "curves";

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    seed: u64,
    fold_seeds: Vec<u64>,
    dataset: &'a crate::experiment::DatasetSummary,
    mean_auc: Vec<MeanAuc>,
}

#[derive(Serialize)]
struct MeanAuc {
    scenario: String,
    algorithm: String,
    mean: f64,
}

/// Writes every report file into `outdir`, creating it if needed, and
/// returns the written paths. Output depends only on `report`.
pub fn render_reports(
    report: &ExperimentReport,
    outdir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HarnessError::Io { path, source }
    };
    let curves_dir = outdir.join(CURVES_DIR);
    fs::create_dir_all(&curves_dir).map_err(io_err(&curves_dir))?;

    let mut written = Vec::new();
    let mut emit = |name: &Path, bytes: Vec<u8>| -> Result<(), HarnessError> {
        let path = outdir.join(name);
        fs::write(&path, bytes).map_err(io_err(&path))?;
        written.push(path);
        Ok(())
    };
    emit(
        Path::new(TABLE1),
        table1_csv(report).map_err(io_err(Path::new(TABLE1)))?,
    )?;
    emit(
        Path::new(TABLE2),
        table2_csv(report).map_err(io_err(Path::new(TABLE2)))?,
    )?;
    emit(
        Path::new(FIG1),
        fig1_csv(report).map_err(io_err(Path::new(FIG1)))?,
    )?;
    emit(
        Path::new(QUARTILES),
        quartile_csv(report).map_err(io_err(Path::new(QUARTILES)))?,
    )?;
    emit(Path::new(SUMMARY), json(&summary(report)))?;
    emit(Path::new(REPORT), json(report))?;
    for fc in &report.curves {
        let key = RunKey {
            scenario: fc.curve.scenario,
            algorithm: fc.curve.algorithm,
        };
        let name = Path::new(CURVES_DIR).join(format!("{key}_{}.csv", fc.fold));
        let bytes = curve_csv(&fc.curve).map_err(io_err(&name))?;
        emit(&name, bytes)?;
    }
    Ok(written)
}

pub fn load_report(path: &Path) -> Result<ExperimentReport, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report values serialize");
    bytes.push(b'\n');
    bytes
}

fn summary(report: &ExperimentReport) -> Summary<'_> {
    Summary {
        config: &report.config,
        seed: report.config.seed,
        fold_seeds: report.folds.iter().map(|f| f.seed).collect(),
        dataset: &report.dataset,
        mean_auc: report
            .run_keys()
            .into_iter()
            .map(|key| {
                let aucs = report.fold_aucs(key);
                MeanAuc {
                    scenario: key.scenario.to_string(),
                    algorithm: key.algorithm_label().to_owned(),
                    mean: aucs.iter().sum::<f64>() / aucs.len() as f64,
                }
            })
            .collect(),
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> io::Result<Vec<u8>> {
    w.into_inner().map_err(|e| e.into_error())
}

fn table1_csv(report: &ExperimentReport) -> io::Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(["scenario", "algorithm", "fold", "auc", "is_best"])?;
    for cell in &report.table1 {
        let best = report
            .table1
            .iter()
            .filter(|c| c.fold == cell.fold)
            .map(|c| c.auc)
            .fold(f64::NEG_INFINITY, f64::max);
        w.write_record([
            cell.key.scenario.to_string(),
            cell.key.algorithm_label().to_owned(),
            cell.fold.to_string(),
            cell.auc.to_string(),
            (cell.auc == best).to_string(),
        ])?;
    }
    finish(w)
}

fn table2_csv(report: &ExperimentReport) -> io::Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(["algorithm", "comparison", "p_value"])?;
    for cell in &report.table2 {
        w.write_record([
            cell.algorithm.to_string(),
            cell.comparison(),
            cell.p_value.to_string(),
        ])?;
    }
    finish(w)
}

fn fig1_csv(report: &ExperimentReport) -> io::Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(["scenario", "algorithm", "step", "auc_mean", "auc_var"])?;
    for p in &report.fig1 {
        w.write_record([
            p.key.scenario.to_string(),
            p.key.algorithm_label().to_owned(),
            p.step.to_string(),
            p.auc_mean.to_string(),
            p.auc_var.to_string(),
        ])?;
    }
    finish(w)
}

fn quartile_csv(report: &ExperimentReport) -> io::Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(["scenario", "algorithm", "fold", "p_value"])?;
    for q in &report.quartile_tests {
        w.write_record([
            q.key.scenario.to_string(),
            q.key.algorithm_label().to_owned(),
            q.fold.to_string(),
            q.p_value.map_or_else(String::new, |p| p.to_string()),
        ])?;
    }
    finish(w)
}

fn curve_csv(curve: &alvi_core::active::LearningCurve) -> io::Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(["step", "instance_id", "action", "score", "test_auc"])?;
    w.write_record(["0", "", "", "", &curve.initial_auc.to_string()])?;
    for e in &curve.events {
        w.write_record([
            e.step.to_string(),
            e.instance_id.clone(),
            e.action.name().to_owned(),
            e.score.to_string(),
            e.test_auc.map_or_else(String::new, |a| a.to_string()),
        ])?;
    }
    finish(w)
}
