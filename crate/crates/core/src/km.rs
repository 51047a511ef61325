//! Product-limit survival estimation with Greenwood variance and log-type
//! confidence intervals, plus summary reporting at caller-chosen query times.

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::stats::normal_quantile;
use serde::{Deserialize, Serialize};

/// One step of the product-limit curve. Steps exist only at times with at
/// least one event; censored-only times deplete the risk set silently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMStep {
    pub time: u32,
    pub n_risk: usize,
    pub n_event: usize,
    pub survival: f64,
    /// Greenwood standard error on the survival scale; 0 once survival hits 0.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMCurve {
    pub steps: Vec<KMStep>,
    pub n_total: usize,
    /// Sorted (time, status) pairs retained so summaries can count risk sets
    /// and events between arbitrary query times.
    observations: Vec<(u32, bool)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMSummaryRow {
    pub query_time: u32,
    pub n_risk: usize,
    /// Events inside (previous query time, this query time].
    pub n_event: usize,
    pub survival: f64,
    pub std_error: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

impl KMCurve {
    /// Survival probability at time `t` (last step at or before `t`).
    pub fn survival_at(&self, t: u32) -> f64 {
        self.last_step_at(t).map_or(1.0, |s| s.survival)
    }

    fn last_step_at(&self, t: u32) -> Option<&KMStep> {
        self.steps.iter().take_while(|s| s.time <= t).last()
    }

    fn n_risk_at(&self, t: u32) -> usize {
        self.observations.iter().filter(|(time, _)| *time >= t).count()
    }

    fn events_in(&self, window: (u32, u32)) -> usize {
        self.observations
            .iter()
            .filter(|(time, status)| *status && *time > window.0 && *time <= window.1)
            .count()
    }
}

/// Fits the Kaplan-Meier product-limit estimator.
///
/// At each distinct event time with `d` events out of `n` at risk the curve
/// multiplies by (1 − d/n); Greenwood's formula accumulates
/// d / (n (n − d)) for the standard error. Subjects censored at an event
/// time stay in that time's risk set (events precede censorings at ties).
pub fn fit_km(ds: &SurvivalDataset) -> Result<KMCurve> {
    if ds.is_empty() {
        return Err(Error::Argument("cannot fit a curve on an empty dataset".into()));
    }
    let mut observations: Vec<(u32, bool)> = ds.rows().iter().map(|r| (r.time, r.status)).collect();
    observations.sort_unstable_by_key(|(t, status)| (*t, !*status));

    let n_total = observations.len();
    let mut steps = Vec::new();
    let mut survival = 1.0;
    let mut greenwood_sum = 0.0;
    let mut at_risk = n_total;

    let mut i = 0;
    while i < observations.len() {
        let t = observations[i].0;
        let mut events = 0;
        let mut leaving = 0;
        while i < observations.len() && observations[i].0 == t {
            if observations[i].1 {
                events += 1;
            }
            leaving += 1;
            i += 1;
        }
        if events > 0 {
            let n = at_risk as f64;
            let d = events as f64;
            survival *= 1.0 - d / n;
            let std_error = if at_risk == events {
                // Curve reached zero; the Greenwood term is degenerate.
                survival = 0.0;
                greenwood_sum = f64::INFINITY;
                0.0
            } else {
                greenwood_sum += d / (n * (n - d));
                survival * greenwood_sum.sqrt()
            };
            steps.push(KMStep {
                time: t,
                n_risk: at_risk,
                n_event: events,
                survival,
                std_error,
            });
        }
        at_risk -= leaving;
    }

    Ok(KMCurve {
        steps,
        n_total,
        observations,
    })
}

/// Log-type confidence interval (S·exp(±z·se/S)) clipped to [0, 1].
/// A dead curve (S = 0) collapses to (0, 0).
pub fn confidence_interval(survival: f64, std_error: f64, level: f64) -> (f64, f64) {
    assert!(level > 0.0 && level < 1.0, "confidence level must be in (0,1)");
    if survival <= 0.0 {
        return (0.0, 0.0);
    }
    let z = normal_quantile(0.5 * (1.0 + level));
    let half_width = z * std_error / survival;
    let lower = (survival * (-half_width).exp()).clamp(0.0, 1.0);
    let upper = (survival * half_width.exp()).clamp(0.0, 1.0);
    (lower, upper)
}

/// Summarizes the curve at strictly increasing query times: risk counts,
/// events since the previous query, and the survival estimate with its
/// confidence interval carried forward from the last step at or before each
/// query time.
pub fn summarize_at(curve: &KMCurve, query_times: &[u32], level: f64) -> Result<Vec<KMSummaryRow>> {
    if query_times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("query times must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(query_times.len());
    let mut previous = 0u32;
    for &t in query_times {
        let (survival, std_error) = curve
            .last_step_at(t)
            .map_or((1.0, 0.0), |s| (s.survival, s.std_error));
        let (ci_lower, ci_upper) = confidence_interval(survival, std_error, level);
        rows.push(KMSummaryRow {
            query_time: t,
            n_risk: curve.n_risk_at(t),
            n_event: curve.events_in((previous, t)),
            survival,
            std_error,
            ci_lower,
            ci_upper,
        });
        previous = t;
    }
    Ok(rows)
}

/// Aligned text table with the print precision fixed at 3 decimals for
/// survival/CI bounds and 4 for the standard error.
pub fn render_summary_table(rows: &[KMSummaryRow], level: f64) -> String {
    let pct = format!("{:.0}%", level * 100.0);
    let mut out = format!(
        "{:>6} {:>7} {:>8} {:>9} {:>10} {:>13} {:>13}\n",
        "time",
        "n.risk",
        "n.event",
        "survival",
        "std.error",
        format!("lower {pct} CI"),
        format!("upper {pct} CI"),
    );
    for r in rows {
        out.push_str(&format!(
            "{:>6} {:>7} {:>8} {:>9.3} {:>10.4} {:>13.3} {:>13.3}\n",
            r.query_time, r.n_risk, r.n_event, r.survival, r.std_error, r.ci_lower, r.ci_upper
        ));
    }
    out
}

/// Summary rows as CSV (`time,n_risk,n_event,survival,std_error,ci_lower,ci_upper`).
pub fn summary_csv(rows: &[KMSummaryRow]) -> String {
    let mut out = String::from("time,n_risk,n_event,survival,std_error,ci_lower,ci_upper\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.query_time, r.n_risk, r.n_event, r.survival, r.std_error, r.ci_lower, r.ci_upper
        ));
    }
    out
}

/// Step-function plot points (`time,survival,ci_lower,ci_upper`), starting at
/// (0, 1). An event-free curve yields the single origin row.
pub fn plot_points_csv(curve: &KMCurve, level: f64) -> String {
    let mut out = String::from("time,survival,ci_lower,ci_upper\n");
    out.push_str("0,1,1,1\n");
    for s in &curve.steps {
        let (lo, hi) = confidence_interval(s.survival, s.std_error, level);
        out.push_str(&format!("{},{},{},{}\n", s.time, s.survival, lo, hi));
    }
    out
}
