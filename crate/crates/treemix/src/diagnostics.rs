//! Convergence and validation metrics: Gelman-Rubin, autocorrelation,
//! empirical extremal coefficients, cluster recovery rates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::dataset::MaximaDataset;
use crate::model::tree::TwoLayerTree;
use crate::posterior::PosteriorSummary;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Potential scale reduction factor over two or more equal-length chains.
/// All-constant chains (zero within-chain variance everywhere) are defined
/// as converged, returning exactly 1.
pub fn gelman_rubin(chains: &[Vec<f64>]) -> Result<f64> {
    if chains.len() < 2 {
        return Err(Error::contract("at least two chains required"));
    }
    let n = chains[0].len();
    if n < 10 {
        return Err(Error::contract("chains must have length >= 10"));
    }
    if chains.iter().any(|c| c.len() != n) {
        return Err(Error::contract("chains must have equal length"));
    }
    let m = chains.len() as f64;
    let nf = n as f64;
    let chain_means: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let w = chains.iter().map(|c| sample_var(c)).sum::<f64>() / m;
    let grand = mean(&chain_means);
    let b = nf / (m - 1.0)
        * chain_means
            .iter()
            .map(|cm| (cm - grand) * (cm - grand))
            .sum::<f64>();
    if w == 0.0 {
        // degenerate chains: converged if they agree, wildly apart otherwise
        return Ok(if b == 0.0 { 1.0 } else { f64::INFINITY });
    }
    let var_plus = (nf - 1.0) / nf * w + b / nf;
    Ok((var_plus / w).sqrt())
}

/// Running Gelman-Rubin values at every multiple of `stride` iterations,
/// each computed over the chain prefixes, for convergence-trace plots.
pub fn gelman_rubin_sequence(chains: &[Vec<f64>], stride: usize) -> Result<Vec<(usize, f64)>> {
    if stride == 0 {
        return Err(Error::contract("stride must be positive"));
    }
    let n = chains.first().map(|c| c.len()).unwrap_or(0);
    let mut out = Vec::new();
    let mut len = stride.max(10);
    while len <= n {
        let prefixes: Vec<Vec<f64>> = chains.iter().map(|c| c[..len].to_vec()).collect();
        out.push((len, gelman_rubin(&prefixes)?));
        len += stride;
    }
    Ok(out)
}

/// Sample autocorrelation function, normalized by the lag-0 variance; entry
/// l is the correlation at lag l, so entry 0 is 1. A constant chain returns
/// 1 at lag 0 and 0 elsewhere.
pub fn autocorrelation(chain: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if chain.len() <= max_lag {
        return Err(Error::contract("chain shorter than max_lag"));
    }
    let n = chain.len();
    let m = mean(chain);
    let c0: f64 = chain.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
    let mut acf = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        if c0 == 0.0 {
            acf.push(if lag == 0 { 1.0 } else { 0.0 });
            continue;
        }
        let c: f64 = (0..n - lag)
            .map(|i| (chain[i] - m) * (chain[i + lag] - m))
            .sum::<f64>()
            / n as f64;
        acf.push(c / c0);
    }
    Ok(acf)
}

/// Moment estimator of the extremal coefficient of a subset of components
/// of unit-Frechet data. The componentwise maximum over the subset is
/// Frechet with rate theta, so its reciprocal is exponential with mean
/// 1/theta and theta-hat = N / sum_i (1 / max_d m_{i,d}). The raw value is
/// returned without clamping to [1, |subset|].
pub fn empirical_extremal_coefficient(data: &MaximaDataset, subset: &[usize]) -> Result<f64> {
    if subset.len() < 2 {
        return Err(Error::contract("subset must contain at least two components"));
    }
    let mut seen = vec![false; data.cols() + 1];
    for &v in subset {
        if v == 0 || v > data.cols() {
            return Err(Error::contract(format!("component {v} out of range")));
        }
        if seen[v] {
            return Err(Error::contract(format!("component {v} repeated")));
        }
        seen[v] = true;
    }
    let mut denom = 0.0;
    for row in data.iter_rows() {
        let rowmax = subset
            .iter()
            .map(|&v| row[v - 1])
            .fold(f64::NEG_INFINITY, f64::max);
        denom += 1.0 / rowmax;
    }
    Ok(data.rows() as f64 / denom)
}

/// Per-true-cluster recovery rates: the fraction of replicate summaries whose
/// modal tree contains that exact cluster.
pub fn true_positive_rate(summaries: &[PosteriorSummary], truth: &TwoLayerTree) -> Result<Vec<f64>> {
    if summaries.is_empty() {
        return Err(Error::contract("at least one replicate summary required"));
    }
    let mut rates = Vec::with_capacity(truth.cluster_count());
    for cluster in truth.clusters() {
        let hits = summaries
            .iter()
            .filter(|s| s.modal_tree().map(|t| t.contains_cluster(cluster)).unwrap_or(false))
            .count();
        rates.push(hits as f64 / summaries.len() as f64);
    }
    Ok(rates)
}

/// JSON-serializable diagnostic report: Gelman-Rubin per parameter, ACF per
/// parameter, empirical extremal coefficients per subset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub gr: BTreeMap<String, f64>,
    pub acf: BTreeMap<String, Vec<f64>>,
    pub theta_hat: BTreeMap<String, f64>,
}
