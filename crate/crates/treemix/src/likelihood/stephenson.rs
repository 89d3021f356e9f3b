//! Occurrence-partition (Stephenson-Tawn) likelihood.

use crate::error::{Error, Result};
use crate::likelihood::partial::PartialDerivatives;
use crate::model::dataset::MaximaDataset;
use crate::model::exponent::ln_cluster_values;
use crate::model::params::DependenceParams;
use crate::model::tree::TwoLayerTree;

/// Σ_i [ -V(m_i) + Σ_{S in E_i} log(-V̇_S(m_i)) ] over the dataset rows,
/// where E_i is the row's occurrence partition. Requires partitions for
/// every row.
pub fn stephenson_tawn_loglik(
    data: &MaximaDataset,
    tree: &TwoLayerTree,
    params: &DependenceParams,
) -> Result<f64> {
    let partitions = data
        .partitions
        .as_ref()
        .ok_or_else(|| Error::contract("occurrence partitions required"))?;
    if data.cols() != tree.dim() {
        return Err(Error::contract("dataset dimension does not match tree"));
    }
    let evaluator = PartialDerivatives::new(tree, params)?;
    let mut total = 0.0;
    for (row, partition) in data.iter_rows().zip(partitions) {
        let (_, ln_v) = ln_cluster_values(row, tree, params);
        total -= ln_v.exp();
        for block in partition.clusters() {
            total += evaluator.ln_neg(row, block)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::bruteforce::log_density_bruteforce;
    use crate::model::tree::set_partitions;
    use crate::numeric::logsumexp;

    #[test]
    fn singletons_independence_reduces_to_iid_frechet() {
        let rows = vec![vec![1.0, 2.0], vec![0.5, 3.0]];
        let ds = MaximaDataset::from_rows(rows.clone()).unwrap();
        let part: TwoLayerTree = "1|2".parse().unwrap();
        let ds = ds.with_partitions(vec![part.clone(), part]).unwrap();
        let tree = TwoLayerTree::singletons(2).unwrap();
        let params = DependenceParams::new(1.0, vec![1.0, 1.0]).unwrap();
        let got = stephenson_tawn_loglik(&ds, &tree, &params).unwrap();
        let expect: f64 = rows
            .iter()
            .flatten()
            .map(|m| -2.0 * m.ln() - 1.0 / m)
            .sum();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn missing_partitions_rejected() {
        let ds = MaximaDataset::from_rows(vec![vec![1.0, 2.0]]).unwrap();
        let tree = TwoLayerTree::single_cluster(2).unwrap();
        let params = DependenceParams::new(0.9, vec![0.5]).unwrap();
        assert!(stephenson_tawn_loglik(&ds, &tree, &params).is_err());
    }

    #[test]
    fn partition_sum_identity() {
        // Σ over all partitions of exp(row term) equals the full density.
        let tree: TwoLayerTree = "1,2|3,4".parse().unwrap();
        let params = DependenceParams::new(0.8, vec![0.45, 0.7]).unwrap();
        let row = vec![1.4, 0.7, 2.2, 0.9];
        let all: Vec<Vec<Vec<usize>>> = set_partitions(&[1, 2, 3, 4]);
        let mut terms = Vec::new();
        for p in all {
            let part = TwoLayerTree::new(p).unwrap();
            let ds = MaximaDataset::from_rows(vec![row.clone()])
                .unwrap()
                .with_partitions(vec![part])
                .unwrap();
            terms.push(stephenson_tawn_loglik(&ds, &tree, &params).unwrap());
        }
        let summed = logsumexp(&terms);
        let density = log_density_bruteforce(&row, &tree, &params).unwrap();
        assert!(
            (summed - density).abs() <= 1e-10 * density.abs(),
            "summed {summed} density {density}"
        );
    }
}
