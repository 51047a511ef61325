//! Random survival forest: bootstrap ensemble of survival trees split by the
//! two-sample log-rank statistic, Nelson-Aalen cumulative-hazard leaves,
//! ensemble hazard prediction and a mortality risk score.

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::metrics::RiskScorer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSFConfig {
    pub n_trees: usize,
    /// Features sampled per node; defaults to ceil(sqrt(p)) when `None`.
    pub mtry: Option<usize>,
    /// A node with fewer events becomes a leaf.
    pub min_node_events: usize,
    /// `None` grows unlimited depth.
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for RSFConfig {
    fn default() -> Self {
        Self {
            n_trees: 200,
            mtry: None,
            min_node_events: 3,
            max_depth: None,
            seed: 0,
        }
    }
}

/// Flat-array tree node: internal nodes carry a split, leaves a
/// Nelson-Aalen step function over their in-node rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        /// Indices into the tree's node array.
        left: usize,
        right: usize,
    },
    Leaf {
        /// (time, cumulative hazard) steps, strictly increasing in both.
        chf: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalTree {
    pub nodes: Vec<TreeNode>,
}

impl SurvivalTree {
    fn leaf_for(&self, x: &[f64]) -> &[(f64, f64)] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
                TreeNode::Leaf { chf } => return chf,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSFModel {
    pub trees: Vec<SurvivalTree>,
    /// Sorted distinct training event times; ensemble predictions are
    /// evaluated on this grid.
    pub event_grid: Vec<f64>,
    pub config: RSFConfig,
    pub feature_names: Vec<String>,
}

/// Incremental two-sample log-rank state over a fixed node: rows move into
/// the left group one at a time, and the statistic is re-evaluated in O(m)
/// per candidate threshold instead of re-counting the whole node.
struct LogRankScan {
    /// Distinct pooled event times, ascending.
    event_times: Vec<f64>,
    n_total: Vec<f64>,
    d_total: Vec<f64>,
    n_left: Vec<f64>,
    d_left: Vec<f64>,
    rows_left: usize,
    rows_total: usize,
}

impl LogRankScan {
    fn new(rows: &[(f64, bool, Vec<f64>)]) -> Option<Self> {
        let mut event_times: Vec<f64> = rows
            .iter()
            .filter(|(_, s, _)| *s)
            .map(|(t, _, _)| *t)
            .collect();
        event_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        event_times.dedup();
        if event_times.is_empty() {
            return None;
        }
        let m = event_times.len();
        let mut scan = LogRankScan {
            event_times,
            n_total: vec![0.0; m],
            d_total: vec![0.0; m],
            n_left: vec![0.0; m],
            d_left: vec![0.0; m],
            rows_left: 0,
            rows_total: rows.len(),
        };
        for (t, s, _) in rows {
            scan.count(*t, *s, false);
        }
        Some(scan)
    }

    /// Index one past the last event time ≤ t.
    fn upper_bound(&self, t: f64) -> usize {
        self.event_times.partition_point(|&e| e <= t)
    }

    fn count(&mut self, t: f64, status: bool, into_left: bool) {
        let hi = self.upper_bound(t);
        let (n, d) = if into_left {
            (&mut self.n_left, &mut self.d_left)
        } else {
            (&mut self.n_total, &mut self.d_total)
        };
        for v in &mut n[..hi] {
            *v += 1.0;
        }
        if status && hi > 0 && self.event_times[hi - 1] == t {
            d[hi - 1] += 1.0;
        }
    }

    fn push_left(&mut self, t: f64, status: bool) {
        self.count(t, status, true);
        self.rows_left += 1;
    }

    /// Standardized statistic for the current left/right partition, or `None`
    /// when a side is empty or the variance vanishes.
    fn statistic(&self) -> Option<f64> {
        if self.rows_left == 0 || self.rows_left == self.rows_total {
            return None;
        }
        let mut numerator = 0.0;
        let mut variance = 0.0;
        for i in 0..self.event_times.len() {
            let n = self.n_total[i];
            let d = self.d_total[i];
            if n <= 1.0 || d == 0.0 {
                continue;
            }
            let n1 = self.n_left[i];
            numerator += self.d_left[i] - n1 * d / n;
            variance += d * (n1 / n) * (1.0 - n1 / n) * (n - d) / (n - 1.0);
        }
        if variance <= 0.0 {
            None
        } else {
            Some(numerator.abs() / variance.sqrt())
        }
    }
}

/// Absolute standardized two-sample log-rank statistic between the rows on
/// each side of `feature <= threshold`. `None` marks an inadmissible split
/// (an empty side, or no variance to standardize by).
pub fn logrank_split(
    rows: &[(f64, bool, Vec<f64>)],
    feature: usize,
    threshold: f64,
) -> Option<f64> {
    let mut scan = LogRankScan::new(rows)?;
    for (t, s, x) in rows {
        if x[feature] <= threshold {
            scan.push_left(*t, *s);
        }
    }
    scan.statistic()
}

/// Nelson-Aalen cumulative hazard Σ d_j/n_j over the given rows.
fn nelson_aalen(rows: &[(f64, bool, Vec<f64>)]) -> Vec<(f64, f64)> {
    let mut obs: Vec<(f64, bool)> = rows.iter().map(|(t, s, _)| (*t, *s)).collect();
    obs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut chf = Vec::new();
    let mut acc = 0.0;
    let mut at_risk = obs.len();
    let mut i = 0;
    while i < obs.len() {
        let t = obs[i].0;
        let mut events = 0usize;
        let mut leaving = 0usize;
        while i < obs.len() && obs[i].0 == t {
            if obs[i].1 {
                events += 1;
            }
            leaving += 1;
            i += 1;
        }
        if events > 0 {
            acc += events as f64 / at_risk as f64;
            chf.push((t, acc));
        }
        at_risk -= leaving;
    }
    chf
}

/// Fixed counter scheme deriving per-tree seeds from the master seed, keeping
/// trees independent of growth order.
fn tree_seed(master: u64, index: u64) -> u64 {
    master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

struct TreeGrower<'a> {
    rows: &'a [(f64, bool, Vec<f64>)],
    p: usize,
    mtry: usize,
    min_node_events: usize,
    max_depth: Option<usize>,
    nodes: Vec<TreeNode>,
}

impl<'a> TreeGrower<'a> {
    fn grow(&mut self, indices: Vec<usize>, depth: usize, rng: &mut StdRng) -> usize {
        let node_rows: Vec<(f64, bool, Vec<f64>)> =
            indices.iter().map(|&i| self.rows[i].clone()).collect();
        let events = node_rows.iter().filter(|(_, s, _)| *s).count();
        let depth_capped = self.max_depth.is_some_and(|d| depth >= d);
        if events < self.min_node_events || depth_capped {
            return self.push_leaf(&node_rows);
        }
        let Some((feature, threshold)) = self.best_split(&node_rows, rng) else {
            return self.push_leaf(&node_rows);
        };
        let (mut left_idx, mut right_idx) = (Vec::new(), Vec::new());
        for &i in &indices {
            if self.rows[i].2[feature] <= threshold {
                left_idx.push(i);
            } else {
                right_idx.push(i);
            }
        }
        let at = self.nodes.len();
        self.nodes.push(TreeNode::Split {
            feature,
            threshold,
            left: 0,
            right: 0,
        });
        let left = self.grow(left_idx, depth + 1, rng);
        let right = self.grow(right_idx, depth + 1, rng);
        if let TreeNode::Split {
            left: l, right: r, ..
        } = &mut self.nodes[at]
        {
            *l = left;
            *r = right;
        }
        at
    }

    fn push_leaf(&mut self, node_rows: &[(f64, bool, Vec<f64>)]) -> usize {
        self.nodes.push(TreeNode::Leaf {
            chf: nelson_aalen(node_rows),
        });
        self.nodes.len() - 1
    }

    /// Best (feature, midpoint threshold) by log-rank statistic over an
    /// mtry-feature subsample. Ties break toward the lowest feature index,
    /// then the lowest threshold, so growth is deterministic.
    fn best_split(
        &self,
        node_rows: &[(f64, bool, Vec<f64>)],
        rng: &mut StdRng,
    ) -> Option<(usize, f64)> {
        let mtry = self.mtry.min(self.p);
        let mut features: Vec<usize> = (0..self.p).collect();
        for i in 0..mtry {
            let j = rng.gen_range(i..self.p);
            features.swap(i, j);
        }
        let mut sampled: Vec<usize> = features[..mtry].to_vec();
        sampled.sort_unstable();

        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &sampled {
            let mut order: Vec<usize> = (0..node_rows.len()).collect();
            order.sort_by(|&a, &b| node_rows[a].2[f].partial_cmp(&node_rows[b].2[f]).unwrap());
            let mut scan = LogRankScan::new(node_rows)?;
            let mut i = 0;
            while i < order.len() {
                let value = node_rows[order[i]].2[f];
                while i < order.len() && node_rows[order[i]].2[f] == value {
                    let (t, s, _) = &node_rows[order[i]];
                    scan.push_left(*t, *s);
                    i += 1;
                }
                if i == order.len() {
                    break;
                }
                let next = node_rows[order[i]].2[f];
                let threshold = 0.5 * (value + next);
                if let Some(stat) = scan.statistic() {
                    let better = match &best {
                        None => true,
                        Some((s, bf, bt)) => {
                            stat > *s || (stat == *s && (f < *bf || (f == *bf && threshold < *bt)))
                        }
                    };
                    if better {
                        best = Some((stat, f, threshold));
                    }
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

/// Grows the bootstrap ensemble: each tree sees n draws with replacement from
/// the training rows under its own counter-derived seed.
pub fn fit_rsf(train: &SurvivalDataset, config: &RSFConfig) -> Result<RSFModel> {
    if train.n_events() == 0 {
        return Err(Error::NoEvents);
    }
    if config.n_trees == 0 {
        return Err(Error::Argument("n_trees must be at least 1".into()));
    }
    train.require_complete_covariates()?;

    let n = train.n();
    let p = train.p();
    let rows: Vec<(f64, bool, Vec<f64>)> = train
        .rows()
        .iter()
        .map(|r| (r.time as f64, r.status, r.x.clone()))
        .collect();

    let mut event_grid: Vec<f64> = rows
        .iter()
        .filter(|(_, s, _)| *s)
        .map(|(t, _, _)| *t)
        .collect();
    event_grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    event_grid.dedup();

    let mtry = config
        .mtry
        .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
        .clamp(1, p.max(1));

    let mut trees = Vec::with_capacity(config.n_trees);
    for b in 0..config.n_trees {
        let mut rng = StdRng::seed_from_u64(tree_seed(config.seed, b as u64));
        let sample: Vec<(f64, bool, Vec<f64>)> =
            (0..n).map(|_| rows[rng.gen_range(0..n)].clone()).collect();
        let mut grower = TreeGrower {
            rows: &sample,
            p,
            mtry,
            min_node_events: config.min_node_events,
            max_depth: config.max_depth,
            nodes: Vec::new(),
        };
        let root = grower.grow((0..n).collect(), 0, &mut rng);
        debug_assert_eq!(root, 0);
        trees.push(SurvivalTree {
            nodes: grower.nodes,
        });
    }

    Ok(RSFModel {
        trees,
        event_grid,
        config: config.clone(),
        feature_names: train.feature_names().to_vec(),
    })
}

impl RSFModel {
    /// Ensemble cumulative hazard: routes `x` through every tree and averages
    /// the leaf step functions on the common event grid.
    pub fn predict_chf(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.feature_names.len() {
            return Err(Error::Argument(format!(
                "covariate vector has length {}, model expects {}",
                x.len(),
                self.feature_names.len()
            )));
        }
        let mut acc = vec![0.0; self.event_grid.len()];
        for tree in &self.trees {
            let chf = tree.leaf_for(x);
            let mut level = 0.0;
            let mut step = 0;
            for (gi, &t) in self.event_grid.iter().enumerate() {
                while step < chf.len() && chf[step].0 <= t {
                    level = chf[step].1;
                    step += 1;
                }
                acc[gi] += level;
            }
        }
        let b = self.trees.len() as f64;
        for v in &mut acc {
            *v /= b;
        }
        Ok(acc)
    }

    /// Mortality score: the predicted cumulative hazard summed over the
    /// event grid. Higher is riskier.
    pub fn risk_score(&self, x: &[f64]) -> Result<f64> {
        Ok(self.predict_chf(x)?.iter().sum())
    }
}

impl RiskScorer for RSFModel {
    fn risk(&self, x: &[f64]) -> f64 {
        self.risk_score(x).expect("dimension mismatch in risk scoring")
    }
}
