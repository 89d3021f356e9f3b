use crate::error::{Error, Result};
use crate::model::tree::TwoLayerTree;

/// Dependence parameters of the nested logistic model: the between-cluster
/// parameter `alpha0` and one per-cluster parameter `alphas[k]`, all in (0,1].
/// The within-cluster dependence of cluster k is the product
/// `alpha0 * alphas[k]`; it is never stored separately.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceParams {
    pub alpha0: f64,
    pub alphas: Vec<f64>,
}

fn check_alpha(name: &str, a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) || !a.is_finite() {
        return Err(Error::domain(format!("{name} = {a} outside (0,1]")));
    }
    Ok(())
}

impl DependenceParams {
    pub fn new(alpha0: f64, alphas: Vec<f64>) -> Result<Self> {
        check_alpha("alpha0", alpha0)?;
        for (k, &a) in alphas.iter().enumerate() {
            check_alpha(&format!("alpha[{}]", k + 1), a)?;
        }
        if alphas.is_empty() {
            return Err(Error::contract("at least one cluster parameter required"));
        }
        Ok(DependenceParams { alpha0, alphas })
    }

    /// All parameters equal to `a`, for a K-cluster tree.
    pub fn constant(a: f64, k: usize) -> Result<Self> {
        DependenceParams::new(a, vec![a; k])
    }

    pub fn cluster_count(&self) -> usize {
        self.alphas.len()
    }

    /// Within-cluster dependence alpha0 * alphas[k].
    pub fn within(&self, k: usize) -> f64 {
        self.alpha0 * self.alphas[k]
    }

    /// Checks alignment with a tree.
    pub fn check_tree(&self, tree: &TwoLayerTree) -> Result<()> {
        if self.alphas.len() != tree.cluster_count() {
            return Err(Error::contract(format!(
                "{} cluster parameters for a {}-cluster tree",
                self.alphas.len(),
                tree.cluster_count()
            )));
        }
        Ok(())
    }
}
