//! Recursive evaluation of the full nested logistic log density.

use crate::error::Result;
use crate::likelihood::tables::{build_beta_table, BetaTable};
use crate::model::dataset::MaximaDataset;
use crate::model::exponent::ln_cluster_values;
use crate::model::params::DependenceParams;
use crate::model::tree::TwoLayerTree;
use crate::numeric::{LogSigned, LogSignedSum};

/// A density evaluator that builds the coefficient table once for a
/// (tree, params) pair and reuses it across observations. The table depends
/// on the parameter values, so it must not outlive a parameter proposal.
pub struct RecursiveDensity<'a> {
    tree: &'a TwoLayerTree,
    params: &'a DependenceParams,
    beta: BetaTable,
    sizes: Vec<usize>,
}

impl<'a> RecursiveDensity<'a> {
    pub fn new(tree: &'a TwoLayerTree, params: &'a DependenceParams) -> Result<Self> {
        params.check_tree(tree)?;
        let sizes = tree.cluster_sizes();
        let beta = build_beta_table(&sizes, params)?;
        Ok(RecursiveDensity {
            tree,
            params,
            beta,
            sizes,
        })
    }

    pub fn beta(&self) -> &BetaTable {
        &self.beta
    }

    /// Log density of one observation `m` (unit Frechet scale, ordered by
    /// 1-based variable index).
    pub fn log_density(&self, m: &[f64]) -> f64 {
        let (ln_vk, ln_v) = ln_cluster_values(m, self.tree, self.params);
        // prefactor Π m^{-1/(alpha0 alpha_k)-1} in log form
        let mut prefactor = 0.0;
        for (k, cluster) in self.tree.clusters().iter().enumerate() {
            let e = -1.0 / self.params.within(k) - 1.0;
            for &v in cluster {
                prefactor += e * m[v - 1].ln();
            }
        }
        let mut sum = LogSignedSum::new();
        for idx in index_tuples(&self.sizes) {
            let s: usize = idx.iter().sum();
            let mut ln_power = 0.0;
            for (k, &ik) in idx.iter().enumerate() {
                ln_power +=
                    (ik as f64 - self.sizes[k] as f64 / self.params.alphas[k]) * ln_vk[k];
            }
            for j in 1..=s {
                let coeff = self.beta.table.get(&idx, j);
                if coeff.is_zero() {
                    continue;
                }
                let ln_term =
                    ln_power + (j as f64 - s as f64 / self.params.alpha0) * ln_v;
                sum.push(coeff.mul(&LogSigned::from_ln(ln_term)));
            }
        }
        let total = sum.total();
        // The expansion sums to the (positive) density over exp(-V); a
        // non-positive total is a numerical defect, not an error path.
        debug_assert!(total.sign > 0.0, "non-positive density expansion");
        -ln_v.exp() + prefactor + total.ln_abs
    }
}

fn index_tuples(shape: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in shape {
        let mut next = Vec::with_capacity(out.len() * d);
        for t in &out {
            for i in 1..=d {
                let mut tt = t.clone();
                tt.push(i);
                next.push(tt);
            }
        }
        out = next;
    }
    out
}

/// Log density of a single observation via the recursive expansion.
pub fn log_density_recursive(
    m: &[f64],
    tree: &TwoLayerTree,
    params: &DependenceParams,
) -> Result<f64> {
    if m.len() != tree.dim() {
        return Err(crate::error::Error::contract(format!(
            "{}-vector for a {}-variable tree",
            m.len(),
            tree.dim()
        )));
    }
    Ok(RecursiveDensity::new(tree, params)?.log_density(m))
}

/// Log likelihood of a dataset: one table build, then a sum over rows.
pub fn log_likelihood_recursive(
    data: &MaximaDataset,
    tree: &TwoLayerTree,
    params: &DependenceParams,
) -> Result<f64> {
    if data.cols() != tree.dim() {
        return Err(crate::error::Error::contract(
            "dataset dimension does not match tree",
        ));
    }
    let eval = RecursiveDensity::new(tree, params)?;
    Ok(data.iter_rows().map(|row| eval.log_density(row)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_frechet_density_d1() {
        // density m^{-2} exp(-1/m); at m=1 the log density is -1
        let tree = TwoLayerTree::single_cluster(1).unwrap();
        let params = DependenceParams::new(1.0, vec![1.0]).unwrap();
        let ld = log_density_recursive(&[1.0], &tree, &params).unwrap();
        assert!((ld - (-1.0)).abs() < 1e-14);
        let m = 2.7;
        let ld = log_density_recursive(&[m], &tree, &params).unwrap();
        let expect = -2.0 * m.ln() - 1.0 / m;
        assert!((ld - expect).abs() < 1e-13);
    }

    #[test]
    fn independence_factorizes_d2() {
        let tree = TwoLayerTree::single_cluster(2).unwrap();
        let params = DependenceParams::new(1.0, vec![1.0]).unwrap();
        let (a, b) = (0.8, 3.1);
        let ld = log_density_recursive(&[a, b], &tree, &params).unwrap();
        let marginal = |m: f64| -2.0 * m.ln() - 1.0 / m;
        assert!((ld - (marginal(a) + marginal(b))).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let tree = TwoLayerTree::single_cluster(2).unwrap();
        let params = DependenceParams::new(0.9, vec![0.5]).unwrap();
        assert!(log_density_recursive(&[1.0], &tree, &params).is_err());
    }

    #[test]
    fn exchangeable_within_cluster() {
        let tree: TwoLayerTree = "1,2,3|4,5".parse().unwrap();
        let params = DependenceParams::new(0.85, vec![0.4, 0.7]).unwrap();
        let a = log_density_recursive(&[1.0, 2.0, 3.0, 4.0, 5.0], &tree, &params).unwrap();
        let b = log_density_recursive(&[3.0, 1.0, 2.0, 5.0, 4.0], &tree, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn large_dimension_is_finite() {
        // D = 12, K = 3 equal clusters; raw-space powers would overflow here
        let tree: TwoLayerTree = "1,2,3,4|5,6,7,8|9,10,11,12".parse().unwrap();
        let params = DependenceParams::new(0.6, vec![0.25, 0.25, 0.25]).unwrap();
        let m: Vec<f64> = (1..=12).map(|i| 0.05 + 0.7 * i as f64).collect();
        let ld = log_density_recursive(&m, &tree, &params).unwrap();
        assert!(ld.is_finite());
    }
}
