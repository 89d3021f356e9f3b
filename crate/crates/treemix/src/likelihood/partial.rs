//! Mixed partial derivatives of the nested logistic exponent function.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::likelihood::tables::{build_gamma_table_alphas, GammaTable};
use crate::model::exponent::ln_cluster_values;
use crate::model::params::DependenceParams;
use crate::model::tree::TwoLayerTree;
use crate::numeric::{LogSigned, LogSignedSum};

/// Evaluator for V derivatives with a per-evaluation gamma-table cache.
///
/// The cache key is the per-cluster derivative-count signature; tables depend
/// on the parameter values, so an instance must not be reused across
/// parameter proposals.
pub struct PartialDerivatives<'a> {
    tree: &'a TwoLayerTree,
    params: &'a DependenceParams,
    cache: RefCell<HashMap<Vec<(usize, usize)>, GammaTable>>,
}

impl<'a> PartialDerivatives<'a> {
    pub fn new(tree: &'a TwoLayerTree, params: &'a DependenceParams) -> Result<Self> {
        params.check_tree(tree)?;
        Ok(PartialDerivatives {
            tree,
            params,
            cache: RefCell::new(HashMap::new()),
        })
    }

    /// Per-cluster (cluster index, count) signature of a variable subset.
    fn signature(&self, vars: &[usize]) -> Result<Vec<(usize, usize)>> {
        if vars.is_empty() {
            return Err(Error::contract("empty derivative subset"));
        }
        let mut counts = vec![0usize; self.tree.cluster_count()];
        let mut seen = vec![false; self.tree.dim() + 1];
        for &v in vars {
            if v == 0 || v > self.tree.dim() {
                return Err(Error::contract(format!("variable {v} out of range")));
            }
            if seen[v] {
                return Err(Error::contract(format!("variable {v} repeated")));
            }
            seen[v] = true;
            let k = self.tree.cluster_of(v).expect("index in range");
            counts[k] += 1;
        }
        Ok(counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k, c))
            .collect())
    }

    /// ln(-dV/d vars) together with the sign of the derivative itself.
    /// The derivative is analytically non-positive; an exactly-zero value
    /// (complete independence across clusters) yields -inf.
    pub fn ln_neg(&self, m: &[f64], vars: &[usize]) -> Result<f64> {
        let sig = self.signature(vars)?;
        if m.len() != self.tree.dim() {
            return Err(Error::contract("observation dimension mismatch"));
        }
        {
            let mut cache = self.cache.borrow_mut();
            if !cache.contains_key(&sig) {
                let sizes: Vec<usize> = sig.iter().map(|&(_, c)| c).collect();
                let alphas: Vec<f64> = sig.iter().map(|&(k, _)| self.params.alphas[k]).collect();
                let table = build_gamma_table_alphas(&sizes, &alphas, self.params.alpha0)?;
                cache.insert(sig.clone(), table);
            }
        }
        let cache = self.cache.borrow();
        let gamma = cache.get(&sig).expect("just inserted");

        let (ln_vk, ln_v) = ln_cluster_values(m, self.tree, self.params);
        let mut prefactor = 0.0;
        for &v in vars {
            let k = self.tree.cluster_of(v).expect("validated");
            prefactor += (-1.0 / self.params.within(k) - 1.0) * m[v - 1].ln();
        }
        let sizes: Vec<usize> = sig.iter().map(|&(_, c)| c).collect();
        let total_order: usize = sizes.iter().sum();
        let mut sum = LogSignedSum::new();
        for idx in index_tuples(&sizes) {
            let coeff = gamma.table.get(&idx, 1);
            if coeff.is_zero() {
                continue;
            }
            let s: usize = idx.iter().sum();
            let mut ln_power = 0.0;
            for (pos, &(k, dk)) in sig.iter().enumerate() {
                ln_power += (idx[pos] as f64 - dk as f64 / self.params.alphas[k]) * ln_vk[k];
            }
            ln_power += (1.0 - s as f64 / self.params.alpha0) * ln_v;
            sum.push(coeff.mul(&LogSigned::from_ln(ln_power)));
        }
        let total = sum.total();
        let _ = total_order;
        debug_assert!(
            total.sign <= 0.0,
            "positive V derivative expansion (defect)"
        );
        if total.sign < 0.0 {
            Ok(prefactor + total.ln_abs)
        } else {
            Ok(f64::NEG_INFINITY)
        }
    }

    /// The raw derivative value dV/d vars (non-positive).
    pub fn value(&self, m: &[f64], vars: &[usize]) -> Result<f64> {
        Ok(-self.ln_neg(m, vars)?.exp())
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

/// One-shot mixed partial of V_nl with respect to the 1-based variables in
/// `vars`.
pub fn partial_v_derivative(
    m: &[f64],
    tree: &TwoLayerTree,
    params: &DependenceParams,
    vars: &[usize],
) -> Result<f64> {
    PartialDerivatives::new(tree, params)?.value(m, vars)
}
