//! Censoring-aware concordance index and the multi-model comparison report.
//!
//! A pair (j, i) is comparable when T_j < T_i and subject j's event was
//! observed: censored data can certify an ordering only when the earlier time
//! is an event. The pair counts concordant when the earlier-event subject
//! carries the strictly higher risk score.

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Credit assigned to pairs with tied risk scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieCredit {
    /// Harrell's convention: 0.5 per tied pair, so a constant scorer lands at
    /// exactly 0.5.
    #[default]
    Half,
    /// Formula-literal mode: tied scores earn nothing.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcordanceResult {
    pub c_index: f64,
    pub concordant: u64,
    pub discordant: u64,
    pub tied_risk: u64,
    pub comparable: u64,
}

pub fn c_index(times: &[f64], status: &[bool], risk_scores: &[f64]) -> Result<ConcordanceResult> {
    c_index_with(times, status, risk_scores, TieCredit::Half)
}

pub fn c_index_with(
    times: &[f64],
    status: &[bool],
    risk_scores: &[f64],
    ties: TieCredit,
) -> Result<ConcordanceResult> {
    let n = times.len();
    if status.len() != n || risk_scores.len() != n {
        return Err(Error::Argument("times, status and scores must share a length".into()));
    }
    if n < 2 {
        return Err(Error::Argument("concordance needs at least two subjects".into()));
    }

    let mut concordant = 0u64;
    let mut discordant = 0u64;
    let mut tied_risk = 0u64;
    for j in 0..n {
        if !status[j] {
            continue;
        }
        for i in 0..n {
            if times[j] < times[i] {
                if risk_scores[j] > risk_scores[i] {
                    concordant += 1;
                } else if risk_scores[j] < risk_scores[i] {
                    discordant += 1;
                } else {
                    tied_risk += 1;
                }
            }
        }
    }
    let comparable = concordant + discordant + tied_risk;
    if comparable == 0 {
        return Err(Error::NoComparablePairs);
    }
    let credit = match ties {
        TieCredit::Half => concordant as f64 + 0.5 * tied_risk as f64,
        TieCredit::Zero => concordant as f64,
    };
    Ok(ConcordanceResult {
        c_index: credit / comparable as f64,
        concordant,
        discordant,
        tied_risk,
        comparable,
    })
}

/// Anything that can assign a risk score to a covariate vector. Implemented
/// by each fitted model; higher scores mean earlier expected events.
pub trait RiskScorer {
    fn risk(&self, x: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> RiskScorer for F {
    fn risk(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitMeta {
    pub seed: u64,
    pub fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub model: String,
    #[serde(flatten)]
    pub result: ConcordanceResult,
}

/// Per-model concordance on a shared held-out set, sorted best-first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparisonReport {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub split: SplitMeta,
    pub results: Vec<ComparisonEntry>,
}

fn default_schema_version() -> u32 {
    1
}

pub fn compare_models(
    models: &[(String, &dyn RiskScorer)],
    test: &SurvivalDataset,
    split: SplitMeta,
    ties: TieCredit,
) -> Result<ModelComparisonReport> {
    if models.is_empty() {
        return Err(Error::Argument("no models to compare".into()));
    }
    let times = test.times_f64();
    let status = test.statuses();
    let mut results = Vec::with_capacity(models.len());
    for (name, scorer) in models {
        let scores: Vec<f64> = test.rows().iter().map(|r| scorer.risk(&r.x)).collect();
        let result = c_index_with(&times, &status, &scores, ties)
            .map_err(|e| Error::for_model(name.clone(), e))?;
        results.push(ComparisonEntry {
            model: name.clone(),
            result,
        });
    }
    // descending by c-index; stable sort preserves input order on ties
    results.sort_by(|a, b| {
        b.result
            .c_index
            .partial_cmp(&a.result.c_index)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(ModelComparisonReport {
        schema_version: default_schema_version(),
        split,
        results,
    })
}

/// Aligned text rendering of a comparison report.
pub fn render_comparison(report: &ModelComparisonReport) -> String {
    let mut out = format!(
        "test set: {} rows (train {} rows, fraction {}, seed {})\n",
        report.split.n_test, report.split.n_train, report.split.fraction, report.split.seed
    );
    out.push_str(&format!("{:<12} {:>9} {:>11}\n", "model", "c_index", "comparable"));
    for e in &report.results {
        out.push_str(&format!(
            "{:<12} {:>9.6} {:>11}\n",
            e.model, e.result.c_index, e.result.comparable
        ));
    }
    out
}

/// Published comparison values for the paper's (unpublished) country dataset.
/// These are reference points for documentation, not reproduction targets.
pub const REFERENCE_C_INDEXES: [(&str, f64); 5] = [
    ("deepsurv", 0.833333),
    ("cox", 0.839286),
    ("mtlr", 0.839286),
    ("ksvm", 0.660714),
    ("rsf", 0.446429),
];
