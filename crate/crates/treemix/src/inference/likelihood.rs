//! Likelihood abstraction over which the samplers run.

use crate::error::Result;
use crate::likelihood::recursive::log_likelihood_recursive;
use crate::likelihood::stephenson::stephenson_tawn_loglik;
use crate::model::dataset::MaximaDataset;
use crate::model::params::DependenceParams;
use crate::model::tree::TwoLayerTree;

pub trait Likelihood: Sync {
    /// Number of variables the likelihood is defined over.
    fn dim(&self) -> usize;
    /// Log likelihood of the data under (tree, params).
    fn log_lik(&self, tree: &TwoLayerTree, params: &DependenceParams) -> Result<f64>;
    /// Stable name used in chain headers.
    fn name(&self) -> &'static str;
}

/// Full recursive density over all rows.
pub struct RecursiveLikelihood<'a>(pub &'a MaximaDataset);

impl Likelihood for RecursiveLikelihood<'_> {
    fn dim(&self) -> usize {
        self.0.cols()
    }

    fn log_lik(&self, tree: &TwoLayerTree, params: &DependenceParams) -> Result<f64> {
        log_likelihood_recursive(self.0, tree, params)
    }

    fn name(&self) -> &'static str {
        "recursive"
    }
}

/// Occurrence-partition likelihood; requires per-row partitions in the data.
pub struct StephensonTawnLikelihood<'a>(pub &'a MaximaDataset);

impl Likelihood for StephensonTawnLikelihood<'_> {
    fn dim(&self) -> usize {
        self.0.cols()
    }

    fn log_lik(&self, tree: &TwoLayerTree, params: &DependenceParams) -> Result<f64> {
        stephenson_tawn_loglik(self.0, tree, params)
    }

    fn name(&self) -> &'static str {
        "stephenson-tawn"
    }
}

/// Constant likelihood: the samplers then target their priors exactly.
/// Used by the prior-recovery correctness tests.
pub struct FlatLikelihood(pub usize);

impl Likelihood for FlatLikelihood {
    fn dim(&self) -> usize {
        self.0
    }

    fn log_lik(&self, _tree: &TwoLayerTree, _params: &DependenceParams) -> Result<f64> {
        Ok(0.0)
    }

    fn name(&self) -> &'static str {
        "flat"
    }
}
