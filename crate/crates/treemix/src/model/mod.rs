//! Data model: cluster trees, dependence parameters, maxima datasets, and the
//! closed-form exponent functions of the (nested) logistic model.

pub mod dataset;
pub mod exponent;
pub mod params;
pub mod tree;

pub use dataset::MaximaDataset;
pub use exponent::{extremal_coefficient, v_logistic, v_nested};
pub use params::DependenceParams;
pub use tree::TwoLayerTree;
