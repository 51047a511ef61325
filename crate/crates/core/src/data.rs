//! Censored time-to-event data model: CSV ingestion, seeded train/test
//! splitting and covariate standardization.
//!
//! One row per subject: an identifier, an observed time in whole months, an
//! event flag (`true` = event observed, `false` = right-censored), a covariate
//! vector and an optional response column (`mvi`) consumed only by the
//! regression module. Missing covariate cells are carried as `NaN`; every
//! model-fitting routine rejects incomplete rows, while regression performs
//! listwise deletion.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;

/// Column names that never become covariates.
pub const RESERVED_COLUMNS: [&str; 4] = ["id", "time", "status", "mvi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub id: String,
    /// Observed time in months, always ≥ 1.
    pub time: u32,
    /// `true` when the event was observed, `false` for right-censoring.
    pub status: bool,
    /// Covariate vector; missing cells are `NaN`.
    pub x: Vec<f64>,
    /// Optional regression response, used only by the OLS module.
    pub mvi: Option<f64>,
}

impl SurvivalRow {
    pub fn is_complete(&self) -> bool {
        self.x.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalDataset {
    rows: Vec<SurvivalRow>,
    feature_names: Vec<String>,
}

impl SurvivalDataset {
    /// Validates the structural invariants: uniform covariate dimension,
    /// positive times, unique identifiers.
    pub fn new(rows: Vec<SurvivalRow>, feature_names: Vec<String>) -> Result<Self> {
        let p = feature_names.len();
        let mut seen = HashSet::new();
        for row in &rows {
            if row.x.len() != p {
                return Err(Error::Validation(format!(
                    "row `{}` has {} covariates, expected {}",
                    row.id,
                    row.x.len(),
                    p
                )));
            }
            if row.time == 0 {
                return Err(Error::Validation(format!(
                    "row `{}` has time 0; times are positive months",
                    row.id
                )));
            }
            if !seen.insert(row.id.clone()) {
                return Err(Error::Validation(format!("duplicate id `{}`", row.id)));
            }
        }
        Ok(Self {
            rows,
            feature_names,
        })
    }

    pub fn rows(&self) -> &[SurvivalRow] {
        &self.rows
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Covariate dimension.
    pub fn p(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_events(&self) -> usize {
        self.rows.iter().filter(|r| r.status).count()
    }

    pub fn n_censored(&self) -> usize {
        self.n() - self.n_events()
    }

    pub fn times_f64(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.time as f64).collect()
    }

    pub fn statuses(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.status).collect()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    /// Errors when any row carries a missing covariate; model-fitting modules
    /// call this before touching the numbers.
    pub fn require_complete_covariates(&self) -> Result<()> {
        match self.rows.iter().find(|r| !r.is_complete()) {
            None => Ok(()),
            Some(row) => Err(Error::Validation(format!(
                "row `{}` has missing covariates; only the regression module accepts incomplete rows",
                row.id
            ))),
        }
    }
}

/// Parses the standard CSV schema `id,time,status,<features...>[,mvi]`.
///
/// Reserved columns are matched by name wherever they appear in the header;
/// every other column becomes a covariate in header order. Empty or `NA`
/// covariate cells are recorded as missing. Row numbers in parse errors are
/// 1-based file lines (the header is line 1).
pub fn parse_csv(text: &str) -> Result<SurvivalDataset> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) if line.trim().is_empty() => continue,
            Some((_, line)) => break line,
            None => return Err(Error::Validation("empty CSV input".into())),
        }
    };

    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    for required in ["id", "time", "status"] {
        if !columns.contains(&required) {
            return Err(Error::Schema(required.to_string()));
        }
    }
    let mut col_seen = HashSet::new();
    for c in &columns {
        if !col_seen.insert(*c) {
            return Err(Error::Validation(format!("duplicate column `{c}` in header")));
        }
    }

    let id_idx = columns.iter().position(|c| *c == "id").unwrap();
    let time_idx = columns.iter().position(|c| *c == "time").unwrap();
    let status_idx = columns.iter().position(|c| *c == "status").unwrap();
    let mvi_idx = columns.iter().position(|c| *c == "mvi");
    let feature_cols: Vec<usize> = (0..columns.len())
        .filter(|i| !RESERVED_COLUMNS.contains(&columns[*i]))
        .collect();
    let feature_names: Vec<String> = feature_cols.iter().map(|&i| columns[i].to_string()).collect();

    let mut rows = Vec::new();
    for (line_idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = line_idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(Error::Parse {
                row: line_no,
                message: format!("expected {} cells, found {}", columns.len(), cells.len()),
            });
        }
        let id = cells[id_idx].to_string();
        if id.is_empty() {
            return Err(Error::Parse {
                row: line_no,
                message: "empty id".into(),
            });
        }
        let time: u32 = cells[time_idx].parse().map_err(|_| Error::Parse {
            row: line_no,
            message: format!("time `{}` is not a positive integer", cells[time_idx]),
        })?;
        if time == 0 {
            return Err(Error::Parse {
                row: line_no,
                message: "time must be ≥ 1".into(),
            });
        }
        let status = match cells[status_idx] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    row: line_no,
                    message: format!("status `{other}` is not 0 or 1"),
                })
            }
        };
        let mut x = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            x.push(parse_optional_cell(cells[c], line_no, columns[c])?.unwrap_or(f64::NAN));
        }
        let mvi = match mvi_idx {
            Some(c) => parse_optional_cell(cells[c], line_no, "mvi")?,
            None => None,
        };
        rows.push(SurvivalRow {
            id,
            time,
            status,
            x,
            mvi,
        });
    }

    SurvivalDataset::new(rows, feature_names)
}

fn parse_optional_cell(cell: &str, line_no: usize, column: &str) -> Result<Option<f64>> {
    if cell.is_empty() || cell == "NA" {
        return Ok(None);
    }
    let value: f64 = cell.parse().map_err(|_| Error::Parse {
        row: line_no,
        message: format!("column `{column}`: `{cell}` is not numeric"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            row: line_no,
            message: format!("column `{column}`: `{cell}` is not finite"),
        });
    }
    Ok(Some(value))
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<SurvivalDataset> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text)
}

/// Renders the dataset back to the standard schema. The `mvi` column is
/// emitted only when some row carries a value; missing cells are empty.
pub fn write_csv(ds: &SurvivalDataset) -> String {
    let has_mvi = ds.rows.iter().any(|r| r.mvi.is_some());
    let mut out = String::from("id,time,status");
    for f in &ds.feature_names {
        out.push(',');
        out.push_str(f);
    }
    if has_mvi {
        out.push_str(",mvi");
    }
    out.push('\n');
    for row in &ds.rows {
        out.push_str(&row.id);
        out.push_str(&format!(",{},{}", row.time, u8::from(row.status)));
        for v in &row.x {
            out.push(',');
            if v.is_finite() {
                out.push_str(&format!("{v}"));
            }
        }
        if has_mvi {
            out.push(',');
            if let Some(m) = row.mvi {
                out.push_str(&format!("{m}"));
            }
        }
        out.push('\n');
    }
    out
}

pub fn save_csv(ds: &SurvivalDataset, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_csv(ds))?;
    Ok(())
}

/// Seeded uniform train/test partition. Train receives
/// `floor(fraction * n)` rows drawn without replacement; both halves keep the
/// dataset's original row order.
pub fn train_test_split(
    ds: &SurvivalDataset,
    fraction: f64,
    seed: u64,
) -> Result<(SurvivalDataset, SurvivalDataset)> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    if ds.is_empty() {
        return Err(Error::Argument("cannot split an empty dataset".into()));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Argument(format!(
            "split fraction {fraction} must lie strictly inside (0, 1)"
        )));
    }
    let n = ds.n();
    let n_train = (fraction * n as f64).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Argument(format!(
            "fraction {fraction} yields an empty train or test side for n = {n}"
        )));
    }

    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    let mut train_idx: Vec<usize> = indices[..n_train].to_vec();
    let mut test_idx: Vec<usize> = indices[n_train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    let pick = |idx: &[usize]| -> SurvivalDataset {
        SurvivalDataset {
            rows: idx.iter().map(|&i| ds.rows[i].clone()).collect(),
            feature_names: ds.feature_names.clone(),
        }
    };
    Ok((pick(&train_idx), pick(&test_idx)))
}

/// Train-derived centering and scaling, with zero-variance columns dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    /// Feature names of the dataset the scaling was fitted on, in original
    /// column order; prediction-time inputs must match these.
    #[serde(default)]
    pub source_names: Vec<String>,
    /// Per original column; indexed before dropping.
    pub means: Vec<f64>,
    /// Sample standard deviations (n−1 denominator), per original column.
    pub sds: Vec<f64>,
    /// Original column indices that survive (sd > 0).
    pub retained_columns: Vec<usize>,
    /// Names of the retained columns, in output order.
    pub retained_names: Vec<String>,
}

impl ScalingParams {
    /// Applies the transform to a raw covariate vector in original layout.
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        self.retained_columns
            .iter()
            .map(|&j| (x[j] - self.means[j]) / self.sds[j])
            .collect()
    }
}

/// Standardizes train columns to mean 0 / sample sd 1 and maps the test set
/// through the train-derived parameters. Zero-variance train columns are
/// dropped from both outputs.
pub fn standardize(
    train: &SurvivalDataset,
    test: &SurvivalDataset,
) -> Result<(SurvivalDataset, SurvivalDataset, ScalingParams)> {
    if train.is_empty() {
        return Err(Error::Argument("standardize requires a non-empty train set".into()));
    }
    if train.feature_names != test.feature_names {
        return Err(Error::Argument(
            "train and test feature names differ".into(),
        ));
    }
    train.require_complete_covariates()?;
    test.require_complete_covariates()?;

    let n = train.n() as f64;
    let p = train.p();
    let mut means = vec![0.0; p];
    let mut sds = vec![0.0; p];
    for j in 0..p {
        let sum: f64 = train.rows.iter().map(|r| r.x[j]).sum();
        means[j] = sum / n;
    }
    for j in 0..p {
        if train.n() > 1 {
            let ss: f64 = train
                .rows
                .iter()
                .map(|r| (r.x[j] - means[j]).powi(2))
                .sum();
            sds[j] = (ss / (n - 1.0)).sqrt();
        }
    }
    let retained_columns: Vec<usize> = (0..p).filter(|&j| sds[j] > 0.0).collect();
    if retained_columns.is_empty() {
        return Err(Error::Validation(
            "all covariate columns have zero variance".into(),
        ));
    }
    let retained_names: Vec<String> = retained_columns
        .iter()
        .map(|&j| train.feature_names[j].clone())
        .collect();
    let params = ScalingParams {
        source_names: train.feature_names.clone(),
        means,
        sds,
        retained_columns,
        retained_names: retained_names.clone(),
    };

    let apply = |ds: &SurvivalDataset| -> SurvivalDataset {
        SurvivalDataset {
            rows: ds
                .rows
                .iter()
                .map(|r| SurvivalRow {
                    id: r.id.clone(),
                    time: r.time,
                    status: r.status,
                    x: params.transform(&r.x),
                    mvi: r.mvi,
                })
                .collect(),
            feature_names: retained_names.clone(),
        }
    };
    Ok((apply(train), apply(test), params))
}

/// Applies previously fitted scaling to a whole dataset (prediction path).
pub fn apply_scaling(ds: &SurvivalDataset, params: &ScalingParams) -> Result<SurvivalDataset> {
    if ds.p() != params.means.len() {
        return Err(Error::Argument(format!(
            "dataset has {} covariates but scaling was fitted on {}",
            ds.p(),
            params.means.len()
        )));
    }
    if !params.source_names.is_empty() && ds.feature_names() != params.source_names {
        return Err(Error::Argument(
            "dataset feature names do not match those the scaling was fitted on".into(),
        ));
    }
    ds.require_complete_covariates()?;
    let rows = ds
        .rows
        .iter()
        .map(|r| SurvivalRow {
            id: r.id.clone(),
            time: r.time,
            status: r.status,
            x: params.transform(&r.x),
            mvi: r.mvi,
        })
        .collect();
    SurvivalDataset::new(rows, params.retained_names.clone())
}
