//! Bell-partition brute-force density, used as the oracle for the recursive
//! formula. Cost grows with the Bell number of D, so the dimension is capped.

use crate::error::{Error, Result};
use crate::likelihood::partial::PartialDerivatives;
use crate::model::exponent::ln_cluster_values;
use crate::model::params::DependenceParams;
use crate::model::tree::{set_partitions, TwoLayerTree};
use crate::numeric::logsumexp;

/// Hard cap on D for the partition enumeration.
pub const BRUTEFORCE_CAP: usize = 10;

/// Log density of one observation via the partition sum
/// exp(-V) Σ_E Π_{S in E} (-V̇_S).
pub fn log_density_bruteforce(
    m: &[f64],
    tree: &TwoLayerTree,
    params: &DependenceParams,
) -> Result<f64> {
    let evaluator = PartialDerivatives::new(tree, params)?;
    log_density_bruteforce_with(m, tree, params, &evaluator)
}

pub(crate) fn log_density_bruteforce_with(
    m: &[f64],
    tree: &TwoLayerTree,
    params: &DependenceParams,
    evaluator: &PartialDerivatives<'_>,
) -> Result<f64> {
    let d = tree.dim();
    if d > BRUTEFORCE_CAP {
        return Err(Error::domain(format!(
            "brute-force density refuses D = {d} > {BRUTEFORCE_CAP}"
        )));
    }
    if m.len() != d {
        return Err(Error::contract("observation dimension mismatch"));
    }
    let vars: Vec<usize> = (1..=d).collect();
    let mut terms = Vec::new();
    for partition in set_partitions(&vars) {
        let mut ln_prod = 0.0;
        for block in &partition {
            ln_prod += evaluator.ln_neg(m, block)?;
            if ln_prod == f64::NEG_INFINITY {
                break;
            }
        }
        terms.push(ln_prod);
    }
    let (_, ln_v) = ln_cluster_values(m, tree, params);
    Ok(-ln_v.exp() + logsumexp(&terms))
}
