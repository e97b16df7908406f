//! Feature CSV interchange: header `id,label,f0,...,f{d-1}`, one row per
//! instance, UTF-8 with LF line endings.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use alvi_core::data::Dataset;
use alvi_core::selection::FeatureRanking;
use alvi_core::Matrix;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("file has no header or no data rows")]
    Empty,
    #[error("bad header: {0}")]
    Header(String),
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("line {line}: non-finite value in column {column}")]
    NonFinite { line: u64, column: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: u64, id: String },
    #[error("class {class} has no instances (labels must be dense in [0, {num_classes}))")]
    LabelGap { class: usize, num_classes: usize },
    #[error(transparent)]
    Invalid(alvi_core::Error),
}

pub fn load_feature_csv(path: &Path) -> Result<Dataset, DataError> {
    read_feature_csv(File::open(path)?)
}

pub fn read_feature_csv<R: Read>(reader: R) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(DataError::Empty);
    }
    let dim = check_header(&header)?;

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut features = Matrix::with_cols(dim);
    let mut seen = HashSet::new();
    let mut row = vec![0.0; dim];
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let id = &record[0];
        if id.is_empty() {
            return Err(DataError::Malformed {
                line,
                reason: "empty id".into(),
            });
        }
        if !seen.insert(id.to_owned()) {
            return Err(DataError::DuplicateId {
                line,
                id: id.to_owned(),
            });
        }
        let label_text = &record[1];
        let label = label_text
            .bytes()
            .all(|b| b.is_ascii_digit())
            .then(|| label_text.parse::<usize>().ok())
            .flatten()
            .ok_or_else(|| DataError::Malformed {
                line,
                reason: format!("label {label_text:?} is not a non-negative integer"),
            })?;
        for (j, value) in row.iter_mut().enumerate() {
            let text = record[j + 2].trim();
            let v: f64 = text.parse().map_err(|_| DataError::Malformed {
                line,
                reason: format!("f{j} value {text:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(DataError::NonFinite {
                    line,
                    column: format!("f{j}"),
                });
            }
            *value = v;
        }
        ids.push(id.to_owned());
        labels.push(label);
        features.push_row(&row);
    }
    if ids.is_empty() {
        return Err(DataError::Empty);
    }
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    Dataset::new(ids, features, labels, num_classes).map_err(|e| match e {
        alvi_core::Error::MissingClass(class) => DataError::LabelGap { class, num_classes },
        other => DataError::Invalid(other),
    })
}

fn check_header(header: &csv::StringRecord) -> Result<usize, DataError> {
    if header.len() < 3 || &header[0] != "id" || &header[1] != "label" {
        return Err(DataError::Header(
            "expected `id,label,f0,...` with at least one feature".into(),
        ));
    }
    for (j, name) in header.iter().skip(2).enumerate() {
        if name != format!("f{j}") {
            return Err(DataError::Header(format!(
                "column {} is {name:?}, expected \"f{j}\"",
                j + 2
            )));
        }
    }
    Ok(header.len() - 2)
}

fn csv_error(e: csv::Error) -> DataError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => DataError::Io(io),
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => DataError::Malformed {
            line,
            reason: format!("{len} fields, expected {expected_len}"),
        },
        csv::ErrorKind::Utf8 { .. } => DataError::Malformed {
            line,
            reason: "invalid UTF-8".into(),
        },
        other => DataError::Malformed {
            line,
            reason: format!("{other:?}"),
        },
    }
}

fn lf_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer)
}

/// Writes `dataset` in the feature CSV schema. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_feature_csv<W: Write>(dataset: &Dataset, writer: W) -> io::Result<()> {
    let mut w = lf_writer(writer);
    let mut header = vec!["id".to_owned(), "label".to_owned()];
    header.extend((0..dataset.dim()).map(|j| format!("f{j}")));
    w.write_record(&header)?;
    for (i, row) in dataset.features().iter_rows().enumerate() {
        let mut record = vec![dataset.ids()[i].clone(), dataset.labels()[i].to_string()];
        record.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()
}

/// Ranking audit dump: `feature_index,mi_score,selected`.
pub fn write_ranking_csv<W: Write>(ranking: &FeatureRanking, writer: W) -> io::Result<()> {
    let mut w = lf_writer(writer);
    w.write_record(["feature_index", "mi_score", "selected"])?;
    for (j, score) in ranking.scores().iter().enumerate() {
        w.write_record([
            j.to_string(),
            score.to_string(),
            ranking.is_selected(j).to_string(),
        ])?;
    }
    w.flush()
}
