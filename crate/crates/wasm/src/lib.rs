//! Browser bindings for the survival toolkit: three interactive operations
//! behind a single static page. Every function takes plain numbers and
//! returns a JSON string, so the page needs no generated TypeScript glue.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use survkit_core::cox::{fit_cox, CoxConfig};
use survkit_core::data::{standardize, train_test_split, SurvivalDataset, SurvivalRow};
use survkit_core::deepsurv::{fit_deepsurv, NetworkSpec};
use survkit_core::forest::{fit_rsf, RSFConfig};
use survkit_core::km::{confidence_interval, fit_km};
use survkit_core::ksvm::{fit_ksvm, KSVMConfig, KernelSpec};
use survkit_core::metrics::c_index;
use survkit_core::mtlr::{fit_mtlr, make_time_grid, weight_matrix, MTLRConfig};
use survkit_core::synth::{generate_weibull, table1_replica, CovariateLaw, WeibullConfig};
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct CurvePoint {
    time: f64,
    survival: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct CurvePayload {
    n: usize,
    events: usize,
    censored: usize,
    points: Vec<CurvePoint>,
}

fn error_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

fn curve_payload(ds: &SurvivalDataset) -> String {
    let curve = match fit_km(ds) {
        Ok(c) => c,
        Err(e) => return error_json(e),
    };
    let mut points = vec![CurvePoint {
        time: 0.0,
        survival: 1.0,
        lower: 1.0,
        upper: 1.0,
    }];
    for step in &curve.steps {
        let (lower, upper) = confidence_interval(step.survival, step.std_error, 0.95);
        points.push(CurvePoint {
            time: step.time as f64,
            survival: step.survival,
            lower,
            upper,
        });
    }
    let payload = CurvePayload {
        n: ds.n(),
        events: ds.n_events(),
        censored: ds.n_censored(),
        points,
    };
    serde_json::to_string(&payload).unwrap_or_else(error_json)
}

/// Product-limit curve of the deterministic 22-subject replica cohort.
#[wasm_bindgen]
pub fn table1_curve() -> String {
    curve_payload(&table1_replica())
}

/// Product-limit curve with 95% band over a seeded Weibull cohort; the
/// sliders drive the hazard shape/scale and the censoring horizon.
#[wasm_bindgen]
pub fn km_explore(n: u32, shape: f64, scale: f64, censor_time: u32, seed: u32) -> String {
    let cfg = WeibullConfig {
        n: n as usize,
        beta: vec![0.6, -0.4],
        shape,
        scale,
        censor_time,
        covariate_law: CovariateLaw::StandardNormal,
        seed: seed as u64,
    };
    match generate_weibull(&cfg) {
        Ok(ds) => curve_payload(&ds),
        Err(e) => error_json(e),
    }
}

/// One row of (x1, x2, time, status) with an XOR-interaction log-hazard.
fn xor_row(rng: &mut StdRng, effect: f64, id: usize) -> SurvivalRow {
    let gauss = |rng: &mut StdRng| -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let x1 = gauss(rng);
    let x2 = gauss(rng);
    let eta = if x1 * x2 > 0.0 { effect } else { -effect };
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let latent = -u.ln() / (0.02 * eta.exp());
    let (time, status) = if latent <= 120.0 {
        ((latent.ceil() as u32).max(1), true)
    } else {
        (120, false)
    };
    SurvivalRow {
        id: format!("s{id}"),
        time,
        status,
        x: vec![x1, x2],
        mvi: None,
    }
}

fn demo_cohort(n: usize, effect: f64, nonlinear: bool, seed: u64) -> Result<SurvivalDataset, String> {
    if nonlinear {
        let mut rng = StdRng::seed_from_u64(seed);
        let rows = (0..n).map(|i| xor_row(&mut rng, effect, i)).collect();
        SurvivalDataset::new(rows, vec!["x1".into(), "x2".into()]).map_err(|e| e.to_string())
    } else {
        generate_weibull(&WeibullConfig {
            n,
            beta: vec![effect, -effect / 2.0],
            shape: 1.3,
            scale: 90.0,
            censor_time: 120,
            covariate_law: CovariateLaw::StandardNormal,
            seed,
        })
        .map_err(|e| e.to_string())
    }
}

/// Fits all five models on a seeded cohort (linear or XOR-interaction
/// hazard) and reports their held-out concordance, sorted best-first.
/// Model settings are trimmed for in-browser latency.
#[wasm_bindgen]
pub fn compare_explore(n: u32, effect: f64, nonlinear: bool, seed: u32) -> String {
    let seed = seed as u64;
    let build = || -> Result<String, String> {
        let ds = demo_cohort((n as usize).clamp(40, 600), effect, nonlinear, seed)?;
        let (train, test) = train_test_split(&ds, 0.7, seed).map_err(|e| e.to_string())?;
        let (train_s, test_s, _) = standardize(&train, &test).map_err(|e| e.to_string())?;
        let times = test_s.times_f64();
        let status = test_s.statuses();

        let mut results: Vec<(&str, f64)> = Vec::new();
        let score_all = |f: &dyn Fn(&[f64]) -> f64| -> Vec<f64> {
            test_s.rows().iter().map(|r| f(&r.x)).collect()
        };

        let cox = fit_cox(&train_s, &CoxConfig::default()).map_err(|e| e.to_string())?;
        let s = score_all(&|x: &[f64]| cox.risk_score(x).unwrap());
        results.push(("cox", c_index(&times, &status, &s).map_err(|e| e.to_string())?.c_index));

        let grid = make_time_grid(&train_s, 6).map_err(|e| e.to_string())?;
        let mtlr = fit_mtlr(
            &train_s,
            &grid,
            1.0,
            &MTLRConfig {
                max_iter: 500,
                tol: 1e-6,
            },
        )
        .map_err(|e| e.to_string())?;
        let s = score_all(&|x: &[f64]| mtlr.risk_score(x).unwrap());
        results.push(("mtlr", c_index(&times, &status, &s).map_err(|e| e.to_string())?.c_index));

        let rsf = fit_rsf(
            &train_s,
            &RSFConfig {
                n_trees: 60,
                seed,
                ..RSFConfig::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let s = score_all(&|x: &[f64]| rsf.risk_score(x).unwrap());
        results.push(("rsf", c_index(&times, &status, &s).map_err(|e| e.to_string())?.c_index));

        let deep = fit_deepsurv(
            &train_s,
            &NetworkSpec {
                hidden_sizes: vec![12, 12],
                epochs: 400,
                seed,
                ..NetworkSpec::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let s = score_all(&|x: &[f64]| deep.forward(x).unwrap());
        results.push((
            "deepsurv",
            c_index(&times, &status, &s).map_err(|e| e.to_string())?.c_index,
        ));

        let svm = fit_ksvm(
            &train_s,
            &KernelSpec::rbf(0.5),
            1.0,
            &KSVMConfig {
                epochs: 60,
                seed,
                ..KSVMConfig::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let s = score_all(&|x: &[f64]| svm.score(x).unwrap());
        results.push(("ksvm", c_index(&times, &status, &s).map_err(|e| e.to_string())?.c_index));

        results.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let json = serde_json::json!({
            "n_train": train.n(),
            "n_test": test.n(),
            "results": results
                .iter()
                .map(|(m, c)| serde_json::json!({ "model": m, "c_index": c }))
                .collect::<Vec<_>>(),
        });
        Ok(json.to_string())
    };
    build().unwrap_or_else(error_json)
}

/// Fits MTLR on a seeded linear-hazard cohort and returns the per-time
/// weight matrix (features × boundaries, bias row last) for the heat map.
#[wasm_bindgen]
pub fn mtlr_weights_explore(n: u32, effect: f64, bins: u32, seed: u32) -> String {
    let build = || -> Result<String, String> {
        let ds = demo_cohort((n as usize).clamp(40, 600), effect, false, seed as u64)?;
        let (train_s, _, _) = standardize(&ds, &ds).map_err(|e| e.to_string())?;
        let grid = make_time_grid(&train_s, (bins as usize).clamp(2, 12)).map_err(|e| e.to_string())?;
        let model = fit_mtlr(
            &train_s,
            &grid,
            1.0,
            &MTLRConfig {
                max_iter: 800,
                tol: 1e-6,
            },
        )
        .map_err(|e| e.to_string())?;
        let matrix = weight_matrix(&model);
        serde_json::to_string(&matrix).map_err(|e| e.to_string())
    };
    build().unwrap_or_else(error_json)
}
