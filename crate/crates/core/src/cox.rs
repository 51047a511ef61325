//! Semi-parametric proportional-hazards model: partial-likelihood fitting by
//! damped Newton-Raphson, linear risk scoring, Breslow baseline cumulative
//! hazard and per-subject survival curves.

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, solve_spd};
use crate::metrics::RiskScorer;
use serde::{Deserialize, Serialize};

/// Handling of tied event times inside the partial likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieMethod {
    /// Efron's correction; reduces to Breslow when no times tie.
    #[default]
    Efron,
    Breslow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxConfig {
    pub max_iter: usize,
    /// Convergence threshold on the log-likelihood change.
    pub tol: f64,
    pub ties: TieMethod,
    /// Optional ridge term for degenerate designs; 0 disables it.
    pub ridge: f64,
}

impl Default for CoxConfig {
    fn default() -> Self {
        Self {
            max_iter: 25,
            tol: 1e-9,
            ties: TieMethod::Efron,
            ridge: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineHazard {
    pub times: Vec<u32>,
    /// Cumulative baseline hazard at each event time, non-decreasing.
    pub cum_hazard: Vec<f64>,
}

impl BaselineHazard {
    pub fn value_at(&self, t: f64) -> f64 {
        let mut h = 0.0;
        for (time, ch) in self.times.iter().zip(&self.cum_hazard) {
            if (*time as f64) <= t {
                h = *ch;
            } else {
                break;
            }
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxModel {
    pub beta: Vec<f64>,
    pub feature_names: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
    pub final_loglik: f64,
    pub baseline: Option<BaselineHazard>,
}

/// A per-subject survival step function S(t|x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<u32>,
    pub survival: Vec<f64>,
}

impl SurvivalCurve {
    /// Curve value at time `t`: 1 before the first step, then the last step
    /// at or before `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let mut value = 1.0;
        for (time, s) in self.times.iter().zip(&self.survival) {
            if (*time as f64) <= t {
                value = *s;
            } else {
                break;
            }
        }
        value
    }
}

/// Log partial likelihood with analytic gradient and Hessian.
///
/// The Efron form handles ties; with distinct event times both tie methods
/// reduce to the textbook sum over risk sets. Scores are centred by their
/// maximum before exponentiation so large coefficients stay finite.
pub fn partial_loglik(
    beta: &[f64],
    ds: &SurvivalDataset,
    ties: TieMethod,
) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    let p = ds.p();
    if beta.len() != p {
        return Err(Error::Argument(format!(
            "beta has length {}, dataset has {} covariates",
            beta.len(),
            p
        )));
    }
    if ds.n_events() == 0 {
        return Err(Error::NoEvents);
    }
    ds.require_complete_covariates()?;

    let n = ds.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&i| std::cmp::Reverse(ds.rows()[i].time));

    let etas: Vec<f64> = ds.rows().iter().map(|r| dot(beta, &r.x)).collect();
    let eta_max = etas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut value = 0.0;
    let mut grad = vec![0.0; p];
    let mut hess = vec![vec![0.0; p]; p];

    // Risk-set accumulators over exp(eta - eta_max).
    let mut s_risk = 0.0;
    let mut u_risk = vec![0.0; p];
    let mut m_risk = vec![vec![0.0; p]; p];

    let mut pos = 0;
    while pos < n {
        let t = ds.rows()[order[pos]].time;
        // Tie-group accumulators for events at this time.
        let mut d = 0usize;
        let mut s_tie = 0.0;
        let mut u_tie = vec![0.0; p];
        let mut m_tie = vec![vec![0.0; p]; p];
        let mut eta_sum = 0.0;
        let mut x_sum = vec![0.0; p];

        while pos < n && ds.rows()[order[pos]].time == t {
            let i = order[pos];
            let row = &ds.rows()[i];
            let w = (etas[i] - eta_max).exp();
            s_risk += w;
            for a in 0..p {
                let wx = w * row.x[a];
                u_risk[a] += wx;
                for b in 0..=a {
                    m_risk[a][b] += wx * row.x[b];
                }
            }
            if row.status {
                d += 1;
                eta_sum += etas[i];
                s_tie += w;
                for a in 0..p {
                    let wx = w * row.x[a];
                    u_tie[a] += wx;
                    x_sum[a] += row.x[a];
                    for b in 0..=a {
                        m_tie[a][b] += wx * row.x[b];
                    }
                }
            }
            pos += 1;
        }

        if d == 0 {
            continue;
        }
        value += eta_sum;
        for a in 0..p {
            grad[a] += x_sum[a];
        }
        for l in 0..d {
            let phi = match ties {
                TieMethod::Efron => l as f64 / d as f64,
                TieMethod::Breslow => 0.0,
            };
            let denom = s_risk - phi * s_tie;
            value -= denom.ln() + eta_max;
            let mut v = vec![0.0; p];
            for a in 0..p {
                v[a] = (u_risk[a] - phi * u_tie[a]) / denom;
            }
            for a in 0..p {
                grad[a] -= v[a];
                for b in 0..=a {
                    hess[a][b] -= (m_risk[a][b] - phi * m_tie[a][b]) / denom - v[a] * v[b];
                }
            }
        }
    }

    for a in 0..p {
        for b in 0..a {
            hess[b][a] = hess[a][b];
        }
    }
    Ok((value, grad, hess))
}

fn penalized(
    beta: &[f64],
    ds: &SurvivalDataset,
    cfg: &CoxConfig,
) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    let (mut value, mut grad, mut hess) = partial_loglik(beta, ds, cfg.ties)?;
    if cfg.ridge > 0.0 {
        for (k, b) in beta.iter().enumerate() {
            value -= 0.5 * cfg.ridge * b * b;
            grad[k] -= cfg.ridge * b;
            hess[k][k] -= cfg.ridge;
        }
    }
    Ok((value, grad, hess))
}

/// Maximizes the partial likelihood by Newton-Raphson with step halving.
pub fn fit_cox(train: &SurvivalDataset, cfg: &CoxConfig) -> Result<CoxModel> {
    if train.n_events() < 2 {
        return Err(Error::Validation("fitting needs at least 2 events".into()));
    }
    train.require_complete_covariates()?;
    check_column_variance(train)?;

    let p = train.p();
    let mut beta = vec![0.0; p];
    let (mut loglik, mut grad, mut hess) = penalized(&beta, train, cfg)?;
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..cfg.max_iter {
        let grad_norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_norm < 1e-8 {
            converged = true;
            break;
        }
        iterations += 1;

        let direction = newton_direction(&hess, &grad)?;
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=10 {
            let candidate: Vec<f64> = beta
                .iter()
                .zip(&direction)
                .map(|(b, d)| b + step * d)
                .collect();
            if let Ok(state) = penalized(&candidate, train, cfg) {
                if state.0.is_finite() && state.0 >= loglik {
                    accepted = Some((candidate, state));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((new_beta, (new_loglik, new_grad, new_hess))) = accepted else {
            // No uphill step exists at this scale; treat as converged.
            converged = true;
            break;
        };
        let delta = new_loglik - loglik;
        beta = new_beta;
        loglik = new_loglik;
        grad = new_grad;
        hess = new_hess;

        if beta.iter().any(|b| b.abs() > 20.0) {
            return Err(Error::Diverged(
                "monotone partial likelihood; coefficient unbounded".into(),
            ));
        }
        if delta.abs() < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(CoxModel {
        beta,
        feature_names: train.feature_names().to_vec(),
        converged,
        iterations,
        final_loglik: loglik,
        baseline: None,
    })
}

fn check_column_variance(ds: &SurvivalDataset) -> Result<()> {
    for (j, name) in ds.feature_names().iter().enumerate() {
        let first = ds.rows()[0].x[j];
        if ds.rows().iter().all(|r| r.x[j] == first) {
            return Err(Error::Validation(format!(
                "covariate `{name}` has zero variance"
            )));
        }
    }
    Ok(())
}

/// Solves (−H) d = g, jittering the diagonal if the factorization fails.
fn newton_direction(hess: &[Vec<f64>], grad: &[f64]) -> Result<Vec<f64>> {
    let p = grad.len();
    let mut a: Vec<Vec<f64>> = hess
        .iter()
        .map(|row| row.iter().map(|v| -v).collect())
        .collect();
    let mut jitter = 0.0;
    for _ in 0..4 {
        if jitter > 0.0 {
            for (i, row) in a.iter_mut().enumerate().take(p) {
                row[i] += jitter - jitter / 10.0; // net add on retries
            }
        }
        if let Some(d) = solve_spd(&a, grad) {
            return Ok(d);
        }
        let trace: f64 = (0..p).map(|i| a[i][i]).sum();
        jitter = if jitter == 0.0 {
            1e-8 * (1.0 + trace.abs() / p.max(1) as f64)
        } else {
            jitter * 100.0
        };
        for (i, row) in a.iter_mut().enumerate().take(p) {
            row[i] += jitter;
        }
        if let Some(d) = solve_spd(&a, grad) {
            return Ok(d);
        }
    }
    Err(Error::Diverged(
        "Newton step failed; information matrix is singular".into(),
    ))
}

impl CoxModel {
    /// Linear risk score η = βᵀx.
    pub fn risk_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.beta.len() {
            return Err(Error::Argument(format!(
                "covariate vector has length {}, model expects {}",
                x.len(),
                self.beta.len()
            )));
        }
        Ok(dot(&self.beta, x))
    }

    /// Per-subject survival curve S(t|x) = exp(−H₀(t)·exp(η)); requires an
    /// attached baseline.
    pub fn survival_curve(&self, x: &[f64]) -> Result<SurvivalCurve> {
        let baseline = self
            .baseline
            .as_ref()
            .ok_or_else(|| Error::State("baseline hazard not computed; call baseline_cumhaz".into()))?;
        let eta = self.risk_score(x)?;
        let hr = eta.exp();
        Ok(SurvivalCurve {
            times: baseline.times.clone(),
            survival: baseline
                .cum_hazard
                .iter()
                .map(|h| (-h * hr).exp())
                .collect(),
        })
    }
}

impl RiskScorer for CoxModel {
    fn risk(&self, x: &[f64]) -> f64 {
        self.risk_score(x).expect("dimension mismatch in risk scoring")
    }
}

/// Breslow estimator of the cumulative baseline hazard:
/// H₀(t) = Σ_{event times ≤ t} d_j / Σ_{k∈risk(t_j)} exp(η_k).
pub fn baseline_cumhaz(model: &CoxModel, train: &SurvivalDataset) -> Result<BaselineHazard> {
    if train.p() != model.beta.len() {
        return Err(Error::Argument(
            "training data does not match the model's covariate dimension".into(),
        ));
    }
    train.require_complete_covariates()?;

    let n = train.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&i| std::cmp::Reverse(train.rows()[i].time));

    let etas: Vec<f64> = train.rows().iter().map(|r| dot(&model.beta, &r.x)).collect();
    let eta_max = etas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    // Walk descending, then reverse the increments into ascending time order.
    let mut s_risk = 0.0;
    let mut increments: Vec<(u32, f64)> = Vec::new();
    let mut pos = 0;
    while pos < n {
        let t = train.rows()[order[pos]].time;
        let mut d = 0usize;
        while pos < n && train.rows()[order[pos]].time == t {
            let i = order[pos];
            s_risk += (etas[i] - eta_max).exp();
            if train.rows()[i].status {
                d += 1;
            }
            pos += 1;
        }
        if d > 0 {
            increments.push((t, d as f64 / (s_risk * eta_max.exp())));
        }
    }
    increments.reverse();

    let mut times = Vec::with_capacity(increments.len());
    let mut cum_hazard = Vec::with_capacity(increments.len());
    let mut acc = 0.0;
    for (t, inc) in increments {
        acc += inc;
        times.push(t);
        cum_hazard.push(acc);
    }
    Ok(BaselineHazard { times, cum_hazard })
}
