//! Discrete-time multi-task logistic regression for survival: quantile time
//! grids, a smoothness-regularized sequence likelihood with censored-subject
//! marginalization, survival-curve prediction and the per-time weight matrix.
//!
//! The grid's m boundaries carve time into m+1 intervals. A subject's outcome
//! is one of the m+1 legal monotone sequences (0,…,0,1,…,1); the sequence for
//! an event in interval k scores exp(Σ_{j≥k} (θ_jᵀx + b_j)), normalized over
//! all legal sequences. A censored subject contributes the probability mass
//! of every sequence whose event interval lies at or after its censoring
//! interval.

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::metrics::RiskScorer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Strictly increasing interval boundaries τ_1 < … < τ_m (months).
    pub boundaries: Vec<f64>,
}

impl TimeGrid {
    pub fn m(&self) -> usize {
        self.boundaries.len()
    }

    /// 1-based index of the interval containing `t` under the convention
    /// interval k = (τ_{k−1}, τ_k]; times beyond τ_m land in interval m+1.
    pub fn interval_of(&self, t: f64) -> usize {
        match self.boundaries.iter().position(|&b| t <= b) {
            Some(j) => j + 1,
            None => self.m() + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MTLRModel {
    pub grid: TimeGrid,
    /// m per-interval coefficient rows of length p.
    pub theta: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub reg_c: f64,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MTLRConfig {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for MTLRConfig {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            tol: 1e-7,
        }
    }
}

/// Boundaries at the empirical j/(m+1) quantiles of the observed event times
/// (inverted-CDF quantile), with duplicate boundaries collapsed.
pub fn make_time_grid(train: &SurvivalDataset, m: usize) -> Result<TimeGrid> {
    let mut event_times: Vec<f64> = train
        .rows()
        .iter()
        .filter(|r| r.status)
        .map(|r| r.time as f64)
        .collect();
    if event_times.is_empty() {
        return Err(Error::NoEvents);
    }
    if m == 0 {
        return Err(Error::Argument("grid needs at least one boundary".into()));
    }
    event_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = event_times.len();
    let mut boundaries = Vec::with_capacity(m);
    for j in 1..=m {
        let q = j as f64 / (m as f64 + 1.0);
        let idx = ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
        boundaries.push(event_times[idx]);
    }
    boundaries.dedup();
    Ok(TimeGrid { boundaries })
}

/// Per-sequence scores s_k = Σ_{j≥k} z_j with s_{m+1} = 0, built from suffix
/// sums of the per-interval activations z_j = θ_jᵀx + b_j.
fn sequence_scores(theta: &[Vec<f64>], bias: &[f64], x: &[f64]) -> Vec<f64> {
    let m = bias.len();
    let mut scores = vec![0.0; m + 1];
    let mut suffix = 0.0;
    for k in (0..m).rev() {
        suffix += dot(&theta[k], x) + bias[k];
        scores[k] = suffix;
    }
    // scores[k] is s_{k+1} in 1-based terms; scores[m] = 0 is the
    // "event after τ_m" sequence.
    scores
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Penalized log-likelihood and its gradient at the given parameters.
///
/// Returns (value, ∂/∂θ as m×p rows, ∂/∂bias).
pub fn mtlr_loglik(
    theta: &[Vec<f64>],
    bias: &[f64],
    grid: &TimeGrid,
    reg_c: f64,
    ds: &SurvivalDataset,
) -> Result<(f64, Vec<Vec<f64>>, Vec<f64>)> {
    let m = grid.m();
    let p = ds.p();
    if theta.len() != m || bias.len() != m || theta.iter().any(|row| row.len() != p) {
        return Err(Error::Argument(
            "parameter dimensions do not match the grid and covariates".into(),
        ));
    }
    ds.require_complete_covariates()?;

    let mut value = 0.0;
    let mut grad_theta = vec![vec![0.0; p]; m];
    let mut grad_bias = vec![0.0; m];

    for row in ds.rows() {
        let scores = sequence_scores(theta, bias, &row.x);
        let lse_all = log_sum_exp(&scores);
        // softmax over all sequences
        let probs: Vec<f64> = scores.iter().map(|s| (s - lse_all).exp()).collect();

        // admissible sequence indices (0-based): a singleton for events,
        // a tail set for censored subjects
        let first = grid.interval_of(row.time as f64) - 1;
        let admissible = if row.status {
            first..=first
        } else {
            first..=m
        };
        let tail: Vec<f64> = scores[*admissible.start()..=*admissible.end()].to_vec();
        let lse_adm = log_sum_exp(&tail);
        value += lse_adm - lse_all;

        // q_j − p_j where p_j = P(sequence index ≤ j) under the full softmax
        // and q_j likewise under the admissible-set softmax; these are the
        // ∂/∂b_{j+1} terms since s_k includes b_j exactly for k ≤ j.
        let mut p_cum = 0.0;
        let mut q_cum = 0.0;
        for j in 0..m {
            p_cum += probs[j];
            if admissible.contains(&j) {
                q_cum += (scores[j] - lse_adm).exp();
            }
            let coef = q_cum - p_cum;
            grad_bias[j] += coef;
            for a in 0..p {
                grad_theta[j][a] += coef * row.x[a];
            }
        }
    }

    // smoothness between adjacent rows plus ridge on the first row
    if reg_c > 0.0 {
        let mut penalty = dot(&theta[0], &theta[0]);
        for j in 0..m.saturating_sub(1) {
            for a in 0..p {
                let diff = theta[j + 1][a] - theta[j][a];
                penalty += diff * diff;
            }
        }
        value -= 0.5 * reg_c * penalty;
        for j in 0..m {
            for a in 0..p {
                let mut g = 0.0;
                if j == 0 {
                    g += theta[0][a];
                }
                if j + 1 < m {
                    g -= theta[j + 1][a] - theta[j][a];
                }
                if j > 0 {
                    g += theta[j][a] - theta[j - 1][a];
                }
                grad_theta[j][a] -= reg_c * g;
            }
        }
    }

    Ok((value, grad_theta, grad_bias))
}

/// Maximizes the penalized likelihood by gradient ascent with a backtracking
/// adaptive step; deterministic from zero initialization.
pub fn fit_mtlr(
    train: &SurvivalDataset,
    grid: &TimeGrid,
    reg_c: f64,
    cfg: &MTLRConfig,
) -> Result<MTLRModel> {
    if reg_c <= 0.0 || reg_c.is_nan() {
        return Err(Error::Argument("reg_c must be positive".into()));
    }
    train.require_complete_covariates()?;
    let m = grid.m();
    let p = train.p();

    let mut theta = vec![vec![0.0; p]; m];
    let mut bias = vec![0.0; m];
    let (mut objective, mut g_theta, mut g_bias) = mtlr_loglik(&theta, &bias, grid, reg_c, train)?;

    let mut step = 0.1;
    for _ in 0..cfg.max_iter {
        let mut improved = false;
        for _ in 0..40 {
            let cand_theta: Vec<Vec<f64>> = theta
                .iter()
                .zip(&g_theta)
                .map(|(row, grow)| row.iter().zip(grow).map(|(t, g)| t + step * g).collect())
                .collect();
            let cand_bias: Vec<f64> = bias.iter().zip(&g_bias).map(|(b, g)| b + step * g).collect();
            let (cand_obj, cand_gt, cand_gb) =
                mtlr_loglik(&cand_theta, &cand_bias, grid, reg_c, train)?;
            if cand_obj.is_finite() && cand_obj >= objective {
                let delta = cand_obj - objective;
                theta = cand_theta;
                bias = cand_bias;
                objective = cand_obj;
                g_theta = cand_gt;
                g_bias = cand_gb;
                step *= 1.25;
                improved = true;
                if delta < cfg.tol {
                    return Ok(MTLRModel {
                        grid: grid.clone(),
                        theta,
                        bias,
                        reg_c,
                        feature_names: train.feature_names().to_vec(),
                    });
                }
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }

    Ok(MTLRModel {
        grid: grid.clone(),
        theta,
        bias,
        reg_c,
        feature_names: train.feature_names().to_vec(),
    })
}

impl MTLRModel {
    /// S(τ_j|x) for j = 1..m: the probability mass of sequences whose event
    /// interval lies strictly after interval j.
    pub fn survival_curve(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.feature_names.len() {
            return Err(Error::Argument(format!(
                "covariate vector has length {}, model expects {}",
                x.len(),
                self.feature_names.len()
            )));
        }
        let m = self.grid.m();
        let scores = sequence_scores(&self.theta, &self.bias, x);
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut out = Vec::with_capacity(m);
        for j in 1..=m {
            let tail: f64 = weights[j..].iter().sum();
            out.push(tail / total);
        }
        Ok(out)
    }

    /// Negative expected survival mass: −Σ_j S(τ_j|x); higher is riskier.
    pub fn risk_score(&self, x: &[f64]) -> Result<f64> {
        Ok(-self.survival_curve(x)?.iter().sum::<f64>())
    }
}

impl RiskScorer for MTLRModel {
    fn risk(&self, x: &[f64]) -> f64 {
        self.risk_score(x).expect("dimension mismatch in risk scoring")
    }
}

/// The per-time weight matrix: one row per feature plus a trailing bias row,
/// one column per grid boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    /// Feature names with `bias` appended.
    pub row_labels: Vec<String>,
    pub boundary_times: Vec<f64>,
    /// values[row][column], row order matching `row_labels`.
    pub values: Vec<Vec<f64>>,
}

pub fn weight_matrix(model: &MTLRModel) -> WeightMatrix {
    let m = model.grid.m();
    let p = model.feature_names.len();
    let mut row_labels = model.feature_names.clone();
    row_labels.push("bias".into());
    let mut values = vec![vec![0.0; m]; p + 1];
    for j in 0..m {
        for f in 0..p {
            values[f][j] = model.theta[j][f];
        }
        values[p][j] = model.bias[j];
    }
    WeightMatrix {
        row_labels,
        boundary_times: model.grid.boundaries.clone(),
        values,
    }
}

/// Long-format CSV (`feature,boundary_time,weight`).
pub fn weight_matrix_csv(matrix: &WeightMatrix) -> String {
    let mut out = String::from("feature,boundary_time,weight\n");
    for (label, row) in matrix.row_labels.iter().zip(&matrix.values) {
        for (t, w) in matrix.boundary_times.iter().zip(row) {
            out.push_str(&format!("{label},{t},{w}\n"));
        }
    }
    out
}

/// Inverse of [`weight_matrix_csv`]; used by round-trip checks and the CLI.
pub fn parse_weight_matrix_csv(text: &str) -> Result<WeightMatrix> {
    let mut row_labels: Vec<String> = Vec::new();
    let mut boundary_times: Vec<f64> = Vec::new();
    let mut cells: Vec<(usize, usize, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                row: i + 1,
                message: "expected feature,boundary_time,weight".into(),
            });
        }
        let label = parts[0].to_string();
        let time: f64 = parts[1].parse().map_err(|_| Error::Parse {
            row: i + 1,
            message: format!("bad boundary time `{}`", parts[1]),
        })?;
        let weight: f64 = parts[2].parse().map_err(|_| Error::Parse {
            row: i + 1,
            message: format!("bad weight `{}`", parts[2]),
        })?;
        let r = match row_labels.iter().position(|l| *l == label) {
            Some(r) => r,
            None => {
                row_labels.push(label);
                row_labels.len() - 1
            }
        };
        let c = match boundary_times.iter().position(|t| *t == time) {
            Some(c) => c,
            None => {
                boundary_times.push(time);
                boundary_times.len() - 1
            }
        };
        cells.push((r, c, weight));
    }
    let mut values = vec![vec![0.0; boundary_times.len()]; row_labels.len()];
    for (r, c, w) in cells {
        values[r][c] = w;
    }
    Ok(WeightMatrix {
        row_labels,
        boundary_times,
        values,
    })
}
