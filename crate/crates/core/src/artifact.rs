//! Versioned JSON model documents: every fitted model serializes to a flat
//! object tagged by `model`, together with the feature list and (optionally)
//! the train-derived covariate scaling so prediction can standardize raw
//! inputs the same way the fit did.

use crate::cox::{BaselineHazard, CoxModel};
use crate::data::ScalingParams;
use crate::deepsurv::{DeepSurvModel, Layer, NetworkSpec};
use crate::error::{Error, Result};
use crate::forest::{RSFConfig, RSFModel, SurvivalTree};
use crate::ksvm::{KSVMModel, KernelSpec};
use crate::metrics::RiskScorer;
use crate::mtlr::{MTLRModel, TimeGrid};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ModelArtifact {
    #[serde(rename = "cox")]
    Cox {
        version: u32,
        beta: Vec<f64>,
        features: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        baseline: Option<BaselineHazard>,
        #[serde(skip_serializing_if = "Option::is_none")]
        scaling: Option<ScalingParams>,
    },
    #[serde(rename = "mtlr")]
    Mtlr {
        version: u32,
        boundaries: Vec<f64>,
        /// Row-major, one row per boundary.
        theta: Vec<Vec<f64>>,
        bias: Vec<f64>,
        reg_c: f64,
        features: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        scaling: Option<ScalingParams>,
    },
    #[serde(rename = "rsf")]
    Rsf {
        version: u32,
        config: RSFConfig,
        event_grid: Vec<f64>,
        trees: Vec<SurvivalTree>,
        features: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        scaling: Option<ScalingParams>,
    },
    #[serde(rename = "deepsurv")]
    Deepsurv {
        version: u32,
        spec: NetworkSpec,
        layers: Vec<Layer>,
        features: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        scaling: Option<ScalingParams>,
    },
    #[serde(rename = "ksvm")]
    Ksvm {
        version: u32,
        kernel: KernelSpec,
        reg_c: f64,
        alphas: Vec<f64>,
        bias: f64,
        support_rows: Vec<Vec<f64>>,
        features: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        scaling: Option<ScalingParams>,
    },
}

impl ModelArtifact {
    pub fn from_cox(model: &CoxModel, scaling: Option<ScalingParams>) -> Self {
        ModelArtifact::Cox {
            version: ARTIFACT_VERSION,
            beta: model.beta.clone(),
            features: model.feature_names.clone(),
            baseline: model.baseline.clone(),
            scaling,
        }
    }

    pub fn from_mtlr(model: &MTLRModel, scaling: Option<ScalingParams>) -> Self {
        ModelArtifact::Mtlr {
            version: ARTIFACT_VERSION,
            boundaries: model.grid.boundaries.clone(),
            theta: model.theta.clone(),
            bias: model.bias.clone(),
            reg_c: model.reg_c,
            features: model.feature_names.clone(),
            scaling,
        }
    }

    pub fn from_rsf(model: &RSFModel, scaling: Option<ScalingParams>) -> Self {
        ModelArtifact::Rsf {
            version: ARTIFACT_VERSION,
            config: model.config.clone(),
            event_grid: model.event_grid.clone(),
            trees: model.trees.clone(),
            features: model.feature_names.clone(),
            scaling,
        }
    }

    pub fn from_deepsurv(model: &DeepSurvModel, scaling: Option<ScalingParams>) -> Self {
        ModelArtifact::Deepsurv {
            version: ARTIFACT_VERSION,
            spec: model.spec.clone(),
            layers: model.layers(),
            features: model.feature_names.clone(),
            scaling,
        }
    }

    pub fn from_ksvm(model: &KSVMModel, scaling: Option<ScalingParams>) -> Self {
        ModelArtifact::Ksvm {
            version: ARTIFACT_VERSION,
            kernel: model.kernel.clone(),
            reg_c: model.reg_c,
            alphas: model.alphas.clone(),
            bias: model.bias,
            support_rows: model.support_rows.clone(),
            features: model.feature_names.clone(),
            scaling,
        }
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            ModelArtifact::Cox { .. } => "cox",
            ModelArtifact::Mtlr { .. } => "mtlr",
            ModelArtifact::Rsf { .. } => "rsf",
            ModelArtifact::Deepsurv { .. } => "deepsurv",
            ModelArtifact::Ksvm { .. } => "ksvm",
        }
    }

    pub fn scaling(&self) -> Option<&ScalingParams> {
        match self {
            ModelArtifact::Cox { scaling, .. }
            | ModelArtifact::Mtlr { scaling, .. }
            | ModelArtifact::Rsf { scaling, .. }
            | ModelArtifact::Deepsurv { scaling, .. }
            | ModelArtifact::Ksvm { scaling, .. } => scaling.as_ref(),
        }
    }

    pub fn features(&self) -> &[String] {
        match self {
            ModelArtifact::Cox { features, .. }
            | ModelArtifact::Mtlr { features, .. }
            | ModelArtifact::Rsf { features, .. }
            | ModelArtifact::Deepsurv { features, .. }
            | ModelArtifact::Ksvm { features, .. } => features,
        }
    }

    /// Risk score for a covariate vector in the artifact's own feature space
    /// (already scaled when the artifact carries scaling).
    pub fn risk_scaled(&self, x: &[f64]) -> Result<f64> {
        match self {
            ModelArtifact::Cox { .. } => self.to_cox()?.risk_score(x),
            ModelArtifact::Mtlr { .. } => self.to_mtlr()?.risk_score(x),
            ModelArtifact::Rsf { .. } => self.to_rsf()?.risk_score(x),
            ModelArtifact::Deepsurv { .. } => self.to_deepsurv()?.risk_score(x),
            ModelArtifact::Ksvm { .. } => self.to_ksvm()?.score(x),
        }
    }

    /// Risk score for a raw covariate row: applies stored scaling first.
    pub fn risk_raw(&self, raw_x: &[f64]) -> Result<f64> {
        match self.scaling() {
            Some(params) => {
                if raw_x.len() != params.means.len() {
                    return Err(Error::Argument(format!(
                        "covariate vector has length {}, scaling expects {}",
                        raw_x.len(),
                        params.means.len()
                    )));
                }
                self.risk_scaled(&params.transform(raw_x))
            }
            None => self.risk_scaled(raw_x),
        }
    }

    pub fn to_cox(&self) -> Result<CoxModel> {
        let ModelArtifact::Cox {
            beta,
            features,
            baseline,
            ..
        } = self
        else {
            return Err(Error::State(format!(
                "artifact holds a {} model, not cox",
                self.model_name()
            )));
        };
        Ok(CoxModel {
            beta: beta.clone(),
            feature_names: features.clone(),
            converged: true,
            iterations: 0,
            final_loglik: f64::NAN,
            baseline: baseline.clone(),
        })
    }

    pub fn to_mtlr(&self) -> Result<MTLRModel> {
        let ModelArtifact::Mtlr {
            boundaries,
            theta,
            bias,
            reg_c,
            features,
            ..
        } = self
        else {
            return Err(Error::State(format!(
                "artifact holds a {} model, not mtlr",
                self.model_name()
            )));
        };
        Ok(MTLRModel {
            grid: TimeGrid {
                boundaries: boundaries.clone(),
            },
            theta: theta.clone(),
            bias: bias.clone(),
            reg_c: *reg_c,
            feature_names: features.clone(),
        })
    }

    pub fn to_rsf(&self) -> Result<RSFModel> {
        let ModelArtifact::Rsf {
            config,
            event_grid,
            trees,
            features,
            ..
        } = self
        else {
            return Err(Error::State(format!(
                "artifact holds a {} model, not rsf",
                self.model_name()
            )));
        };
        Ok(RSFModel {
            trees: trees.clone(),
            event_grid: event_grid.clone(),
            config: config.clone(),
            feature_names: features.clone(),
        })
    }

    pub fn to_deepsurv(&self) -> Result<DeepSurvModel> {
        let ModelArtifact::Deepsurv {
            spec,
            layers,
            features,
            ..
        } = self
        else {
            return Err(Error::State(format!(
                "artifact holds a {} model, not deepsurv",
                self.model_name()
            )));
        };
        DeepSurvModel::from_layers(spec.clone(), features.clone(), layers)
    }

    pub fn to_ksvm(&self) -> Result<KSVMModel> {
        let ModelArtifact::Ksvm {
            kernel,
            reg_c,
            alphas,
            bias,
            support_rows,
            features,
            ..
        } = self
        else {
            return Err(Error::State(format!(
                "artifact holds a {} model, not ksvm",
                self.model_name()
            )));
        };
        Ok(KSVMModel {
            alphas: alphas.clone(),
            bias: *bias,
            support_rows: support_rows.clone(),
            kernel: kernel.clone(),
            reg_c: *reg_c,
            feature_names: features.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl RiskScorer for ModelArtifact {
    fn risk(&self, x: &[f64]) -> f64 {
        self.risk_raw(x).expect("artifact scoring failed")
    }
}
