//! Bayesian inference for the nested logistic max-stable model.
//!
//! The crate fits a two-layer cluster tree to multivariate block maxima on the
//! unit Frechet scale. The likelihood of the nested logistic model is evaluated
//! with a recursive coefficient scheme whose cost is polynomial in the
//! dimension, instead of the Bell-number partition sum. A reversible-jump
//! sampler (split/merge/swap moves over cluster trees) explores the space of
//! trees and dependence parameters simultaneously, and posterior summaries are
//! combined by Bayesian model averaging.

pub mod diagnostics;
pub mod error;
pub mod inference;
pub mod io;
pub mod likelihood;
pub mod model;
pub mod numeric;
pub mod posterior;
pub mod simulate;

pub use error::{Error, Result};
pub use model::dataset::MaximaDataset;
pub use model::params::DependenceParams;
pub use model::tree::TwoLayerTree;
