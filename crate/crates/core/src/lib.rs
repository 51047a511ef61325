//! Survival-analysis toolkit for right-censored time-to-event data.
//!
//! The crate bundles a product-limit estimator, five trainable hazard/risk
//! models (Cox proportional hazards, discrete-time MTLR, random survival
//! forest, a neural Cox model and a ranking kernel SVM), censoring-aware
//! concordance evaluation, an OLS module with full inference statistics, and
//! deterministic synthetic-data generators used as fitting oracles.
//!
//! ```
//! use survkit_core::{km, synth};
//!
//! let cohort = synth::table1_replica();
//! let curve = km::fit_km(&cohort).unwrap();
//! let rows = km::summarize_at(&curve, &[10, 50, 80, 105, 108, 111], 0.95).unwrap();
//! assert!((rows[1].survival - 0.455).abs() < 1e-3);
//! ```

// Dense numeric kernels here walk several parallel arrays by index; iterator
// rewrites of those loops obscure the arithmetic.
#![allow(clippy::needless_range_loop)]

pub mod artifact;
pub mod cox;
pub mod data;
pub mod deepsurv;
pub mod error;
pub mod forest;
pub mod km;
pub mod ksvm;
pub mod linalg;
pub mod metrics;
pub mod mtlr;
pub mod ols;
pub mod stats;
pub mod synth;

pub use data::{SurvivalDataset, SurvivalRow};
pub use error::{Error, Result};
