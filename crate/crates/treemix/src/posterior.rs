//! Posterior summaries over chain traces and Bayesian-model-averaged
//! prediction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{ChainRecord, ChainTrace};
use crate::model::dataset::MaximaDataset;
use crate::model::tree::TwoLayerTree;
use crate::simulate::sample_nested_logistic;

/// Median, 95% equal-tailed interval, and spike-at-1 frequency of one
/// parameter's sub-chain. `unidentifiable` flags parameters the likelihood
/// cannot inform (cluster parameters of singleton clusters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub median: f64,
    pub lo: f64,
    pub hi: f64,
    pub spike: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unidentifiable: bool,
}

/// One visited tree with its visit probability and per-parameter summaries
/// over the records where it was current. For single-cluster trees the
/// identified product alpha0*alpha1 is summarized as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSummary {
    pub tree: String,
    pub prob: f64,
    pub alpha0: ParamSummary,
    pub alphas: Vec<ParamSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub within_product: Option<ParamSummary>,
}

/// Tree posterior over the post-burn-in portion of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub trees: Vec<TreeSummary>,
    pub n_records: usize,
}

impl PosteriorSummary {
    /// Most-visited tree, ties broken toward the earlier canonical string.
    pub fn modal_tree(&self) -> Option<TwoLayerTree> {
        self.trees.first().map(|t| t.tree.parse().expect("canonical"))
    }

    pub fn prob_of(&self, tree: &TwoLayerTree) -> f64 {
        let key = tree.to_string();
        self.trees
            .iter()
            .find(|t| t.tree == key)
            .map(|t| t.prob)
            .unwrap_or(0.0)
    }
}

/// Type-7 empirical quantile of a sorted sample.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

fn summarize_values(mut values: Vec<f64>, unidentifiable: bool) -> ParamSummary {
    let spike = values.iter().filter(|&&v| v == 1.0).count() as f64 / values.len() as f64;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ParamSummary {
        median: quantile_sorted(&values, 0.5),
        lo: quantile_sorted(&values, 0.025),
        hi: quantile_sorted(&values, 0.975),
        spike,
        unidentifiable,
    }
}

/// Tree visit frequencies and per-tree parameter summaries over the records
/// with iteration > burnin. Trees are ordered by decreasing probability,
/// ties broken by the canonical tree string.
pub fn summarize(trace: &ChainTrace, burnin: u64) -> Result<PosteriorSummary> {
    if !trace.records.is_empty() && burnin >= trace.records.last().unwrap().iter {
        return Err(Error::contract("burn-in not shorter than the trace"));
    }
    let post: Vec<&ChainRecord> = trace.records.iter().filter(|r| r.iter > burnin).collect();
    if post.is_empty() {
        return Err(Error::contract("no post-burn-in records to summarize"));
    }
    let mut groups: Vec<(TwoLayerTree, Vec<&ChainRecord>)> = Vec::new();
    for r in &post {
        match groups.iter_mut().find(|(t, _)| *t == r.tree) {
            Some((_, rs)) => rs.push(r),
            None => groups.push((r.tree.clone(), vec![r])),
        }
    }
    let mut trees = Vec::with_capacity(groups.len());
    for (tree, rs) in &groups {
        let prob = rs.len() as f64 / post.len() as f64;
        let alpha0 = summarize_values(rs.iter().map(|r| r.params.alpha0).collect(), false);
        let alphas: Vec<ParamSummary> = (0..tree.cluster_count())
            .map(|k| {
                summarize_values(
                    rs.iter().map(|r| r.params.alphas[k]).collect(),
                    tree.clusters()[k].len() == 1,
                )
            })
            .collect();
        let within_product = (tree.cluster_count() == 1).then(|| {
            summarize_values(
                rs.iter()
                    .map(|r| r.params.alpha0 * r.params.alphas[0])
                    .collect(),
                false,
            )
        });
        trees.push(TreeSummary {
            tree: tree.to_string(),
            prob,
            alpha0,
            alphas,
            within_product,
        });
    }
    trees.sort_by(|a, b| {
        b.prob
            .partial_cmp(&a.prob)
            .unwrap()
            .then_with(|| a.tree.cmp(&b.tree))
    });
    Ok(PosteriorSummary {
        trees,
        n_records: post.len(),
    })
}

/// Bayesian-model-averaged predictive sampling: each output row picks a
/// post-burn-in record uniformly and draws one maxima vector from the nested
/// logistic distribution under that record's (tree, params).
pub fn bma_predict<R: Rng + ?Sized>(
    trace: &ChainTrace,
    burnin: u64,
    count: usize,
    rng: &mut R,
) -> Result<MaximaDataset> {
    let post: Vec<&ChainRecord> = trace.records.iter().filter(|r| r.iter > burnin).collect();
    if post.is_empty() {
        return Err(Error::contract("no post-burn-in records to predict from"));
    }
    if count == 0 {
        return Err(Error::contract("at least one predictive draw required"));
    }
    let d = trace.header.dim;
    let mut values = Vec::with_capacity(count * d);
    for _ in 0..count {
        let r = post[rng.gen_range(0..post.len())];
        let draw = sample_nested_logistic(&r.tree, &r.params, 1, rng)?;
        values.extend_from_slice(draw.row(0));
    }
    MaximaDataset::new(values, count, d)
}

/// Empirical type-7 quantiles of a predictive sample of a scalar functional.
pub fn quantile_curve(samples: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::contract("empty predictive sample"));
    }
    for w in probs.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::contract("probabilities must be strictly increasing"));
        }
    }
    if probs.iter().any(|&p| !(0.0..1.0).contains(&p) || p == 0.0) {
        return Err(Error::domain("probabilities must lie in (0,1)"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(probs.iter().map(|&p| quantile_sorted(&sorted, p)).collect())
}
