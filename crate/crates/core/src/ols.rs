//! Ordinary least squares with the full inference block: coefficient table
//! with standard errors, t and two-sided p values, R², adjusted R², the
//! overall F test and the residual scale. Fitting goes through Householder QR
//! rather than the raw normal equations; rows with missing values among the
//! selected columns are deleted listwise.

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, lstsq_qr};
use crate::stats::{f_sf, student_t_two_sided_p};
use serde::{Deserialize, Serialize};

/// The nine regressors of the reference vulnerability regression, the
/// default set for `regress-mvi`.
pub const DEFAULT_MVI_REGRESSORS: [&str; 9] = [
    "Natural_risk",
    "Commercial_risk",
    "Financial_risk",
    "Endogenous_risk",
    "Vul_Inherent",
    "Vul_Companies",
    "Vul_Homes",
    "Capabilities_State",
    "Social_Cohesion_Capabilities",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OLSFit {
    pub response: String,
    /// `(Intercept)` followed by the regressor names.
    pub terms: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    /// Two-sided Student-t p values on `df_resid` degrees of freedom.
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: f64,
    /// (regressors, residual df).
    pub f_df: (usize, usize),
    pub f_p_value: f64,
    /// Residual standard error (the summary's `s`).
    pub residual_scale: f64,
    pub n_used: usize,
    pub n_dropped: usize,
    pub df_resid: usize,
}

/// Looks up a named column on a row: `mvi` or any covariate; `None` marks a
/// missing cell.
fn column_value(ds: &SurvivalDataset, row_idx: usize, name: &str) -> Result<Option<f64>> {
    let row = &ds.rows()[row_idx];
    if name == "mvi" {
        return Ok(row.mvi);
    }
    match ds.feature_index(name) {
        Some(j) => Ok(if row.x[j].is_finite() { Some(row.x[j]) } else { None }),
        None => Err(Error::Argument(format!("unknown column `{name}`"))),
    }
}

pub fn fit_ols(ds: &SurvivalDataset, response: &str, regressors: &[String]) -> Result<OLSFit> {
    if regressors.is_empty() {
        return Err(Error::Argument("at least one regressor required".into()));
    }
    if regressors.iter().any(|r| r == response) {
        return Err(Error::Argument("response cannot also be a regressor".into()));
    }

    let k = regressors.len();
    let mut design: Vec<Vec<f64>> = Vec::new();
    let mut y: Vec<f64> = Vec::new();
    let mut n_dropped = 0;
    'rows: for i in 0..ds.n() {
        let Some(yi) = column_value(ds, i, response)? else {
            n_dropped += 1;
            continue;
        };
        let mut row = Vec::with_capacity(k + 1);
        row.push(1.0);
        for name in regressors {
            match column_value(ds, i, name)? {
                Some(v) => row.push(v),
                None => {
                    n_dropped += 1;
                    continue 'rows;
                }
            }
        }
        design.push(row);
        y.push(yi);
    }

    let n_used = design.len();
    if n_used <= k + 1 {
        return Err(Error::Validation(format!(
            "only {n_used} complete rows for {k} regressors; need more rows than terms"
        )));
    }

    let mut terms = vec!["(Intercept)".to_string()];
    terms.extend(regressors.iter().cloned());

    let fit = lstsq_qr(&design, &y).map_err(|col| {
        Error::Validation(format!(
            "design column `{}` is linearly dependent on earlier columns",
            terms[col]
        ))
    })?;
    let coefficients = fit.coef;

    let fitted: Vec<f64> = design.iter().map(|row| dot(row, &coefficients)).collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let y_mean = y.iter().sum::<f64>() / n_used as f64;
    let tss: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    if tss <= 0.0 {
        return Err(Error::Validation("response has zero variance".into()));
    }

    let df_resid = n_used - k - 1;
    let sigma2 = rss / df_resid as f64;
    let residual_scale = sigma2.sqrt();

    // (XᵀX)⁻¹ diagonal from R⁻¹ R⁻ᵀ: squared row norms of R⁻¹
    let std_errors: Vec<f64> = (0..=k)
        .map(|i| {
            let row_norm2: f64 = (i..=k).map(|j| fit.r_inv[i][j] * fit.r_inv[i][j]).sum();
            (sigma2 * row_norm2).sqrt()
        })
        .collect();
    let t_values: Vec<f64> = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(c, s)| if *s > 0.0 { c / s } else { f64::INFINITY * c.signum() })
        .collect();
    let p_values: Vec<f64> = t_values
        .iter()
        .map(|t| student_t_two_sided_p(*t, df_resid as f64))
        .collect();

    let r_squared = 1.0 - rss / tss;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n_used as f64 - 1.0) / df_resid as f64;
    let f_statistic = if rss > 0.0 {
        ((tss - rss) / k as f64) / sigma2
    } else {
        f64::INFINITY
    };
    let f_p_value = if f_statistic.is_finite() {
        f_sf(f_statistic, k as f64, df_resid as f64)
    } else {
        0.0
    };

    Ok(OLSFit {
        response: response.to_string(),
        terms,
        coefficients,
        std_errors,
        t_values,
        p_values,
        r_squared,
        adj_r_squared,
        f_statistic,
        f_df: (k, df_resid),
        f_p_value,
        residual_scale,
        n_used,
        n_dropped,
        df_resid,
    })
}

impl OLSFit {
    /// Intercept plus coefficientsᵀx for a regressor vector in fit order.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.coefficients.len() - 1 {
            return Err(Error::Argument(format!(
                "regressor vector has length {}, fit expects {}",
                x.len(),
                self.coefficients.len() - 1
            )));
        }
        Ok(self.coefficients[0] + dot(&self.coefficients[1..], x))
    }
}

/// Threshold bands of the summary legend
/// `0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1`.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else if p < 0.1 {
        "."
    } else {
        ""
    }
}

fn format_p(p: f64) -> String {
    if p < 2e-16 {
        "<2e-16".to_string()
    } else if p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.6}")
    }
}

/// Text block shaped like an R `summary.lm` coefficient table.
pub fn render_ols(fit: &OLSFit) -> String {
    let name_width = fit.terms.iter().map(|t| t.len()).max().unwrap_or(10).max(10);
    let mut out = String::from("Coefficients:\n");
    out.push_str(&format!(
        "{:<name_width$} {:>10} {:>11} {:>8} {:>9}\n",
        "", "Estimate", "Std. Error", "t value", "Pr(>|t|)"
    ));
    for i in 0..fit.terms.len() {
        out.push_str(&format!(
            "{:<name_width$} {:>10.6} {:>11.6} {:>8.3} {:>9} {}\n",
            fit.terms[i],
            fit.coefficients[i],
            fit.std_errors[i],
            fit.t_values[i],
            format_p(fit.p_values[i]),
            significance_stars(fit.p_values[i]),
        ));
    }
    out.push_str("---\nSignif. codes: 0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1\n\n");
    out.push_str(&format!(
        "s: {:.5} on {} degrees of freedom\n",
        fit.residual_scale, fit.df_resid
    ));
    if fit.n_dropped > 0 {
        out.push_str(&format!(
            "  ({} observations deleted due to missingness)\n",
            fit.n_dropped
        ));
    }
    out.push_str(&format!(
        "Multiple R-squared: {:.4}, Adjusted R-squared: {:.4}\n",
        fit.r_squared, fit.adj_r_squared
    ));
    out.push_str(&format!(
        "F-statistic: {:.2} on {} and {} DF, p-value: {}\n",
        fit.f_statistic,
        fit.f_df.0,
        fit.f_df.1,
        format_p(fit.f_p_value)
    ));
    out
}
