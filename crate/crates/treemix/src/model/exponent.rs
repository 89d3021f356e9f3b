//! Exponent functions of the logistic and nested logistic models.
//!
//! All arithmetic runs in log space: raw powers z^{-1/(alpha0*alpha_k)}
//! underflow or overflow long before the log-scale quantities do.

use crate::error::{Error, Result};
use crate::model::params::DependenceParams;
use crate::model::tree::TwoLayerTree;
use crate::numeric::logsumexp;

fn check_positive(z: &[f64]) -> Result<()> {
    if z.is_empty() {
        return Err(Error::contract("empty vector"));
    }
    for &v in z {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("non-positive entry {v}")));
        }
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0,1]")));
    }
    Ok(())
}

/// ln V_l(z | alpha) from the logs of the entries of z.
pub fn ln_v_logistic(ln_z: &[f64], alpha: f64) -> f64 {
    let terms: Vec<f64> = ln_z.iter().map(|&lz| -lz / alpha).collect();
    alpha * logsumexp(&terms)
}

/// Logistic exponent function (Σ_d z_d^{-1/alpha})^alpha.
pub fn v_logistic(z: &[f64], alpha: f64) -> Result<f64> {
    check_positive(z)?;
    check_alpha(alpha)?;
    let ln_z: Vec<f64> = z.iter().map(|v| v.ln()).collect();
    Ok(ln_v_logistic(&ln_z, alpha).exp())
}

/// Per-cluster logs (ln V_1, ..., ln V_K) and ln V of the nested logistic
/// exponent function, for a full D-vector `z` ordered by 1-based variable
/// index. Inputs are assumed valid.
pub fn ln_cluster_values(
    z: &[f64],
    tree: &TwoLayerTree,
    params: &DependenceParams,
) -> (Vec<f64>, f64) {
    let ln_vk: Vec<f64> = tree
        .clusters()
        .iter()
        .enumerate()
        .map(|(k, cluster)| {
            let within = params.within(k);
            let terms: Vec<f64> = cluster.iter().map(|&v| -z[v - 1].ln() / within).collect();
            params.alphas[k] * logsumexp(&terms)
        })
        .collect();
    let ln_v = params.alpha0 * logsumexp(&ln_vk);
    (ln_vk, ln_v)
}

/// Nested logistic exponent function
/// {Σ_k (Σ_i z_{k;i}^{-1/(alpha0 alpha_k)})^{alpha_k}}^{alpha0}.
pub fn v_nested(z: &[f64], tree: &TwoLayerTree, params: &DependenceParams) -> Result<f64> {
    check_positive(z)?;
    params.check_tree(tree)?;
    if z.len() != tree.dim() {
        return Err(Error::contract(format!(
            "{}-vector for a {}-variable tree",
            z.len(),
            tree.dim()
        )));
    }
    let (_, ln_v) = ln_cluster_values(z, tree, params);
    Ok(ln_v.exp())
}

/// Extremal coefficient (Σ_k D_k^{alpha_k})^{alpha0} = V_nl(1); the effective
/// number of independent variables, in [1, D].
pub fn extremal_coefficient(tree: &TwoLayerTree, params: &DependenceParams) -> Result<f64> {
    params.check_tree(tree)?;
    let inner: f64 = tree
        .clusters()
        .iter()
        .zip(&params.alphas)
        .map(|(c, &a)| (c.len() as f64).powf(a))
        .sum();
    Ok(inner.powf(params.alpha0))
}
