//! Exact sampling from the nested logistic max-stable distribution via the
//! hierarchical positive-stable construction.

use rand::Rng;
use rand_distr::Exp1;

use crate::error::Result;
use crate::model::dataset::MaximaDataset;
use crate::model::params::DependenceParams;
use crate::model::tree::TwoLayerTree;
use crate::simulate::stable::sample_positive_stable;

/// N independent draws with unit Frechet margins:
/// S0 ~ PS(alpha0); per cluster S_k ~ PS(alpha_k), T_k = S0^{1/alpha_k} S_k;
/// Z_{k,i} = (T_k / W_{k,i})^{alpha0 alpha_k} with W iid unit exponential.
pub fn sample_nested_logistic<R: Rng + ?Sized>(
    tree: &TwoLayerTree,
    params: &DependenceParams,
    count: usize,
    rng: &mut R,
) -> Result<MaximaDataset> {
    params.check_tree(tree)?;
    let d = tree.dim();
    let mut values = vec![0.0; count * d];
    for row in values.chunks_mut(d) {
        let s0 = sample_positive_stable(params.alpha0, rng)?;
        for (k, cluster) in tree.clusters().iter().enumerate() {
            let ak = params.alphas[k];
            let sk = sample_positive_stable(ak, rng)?;
            let ln_t = s0.ln() / ak + sk.ln();
            for &v in cluster {
                let w: f64 = rng.sample(Exp1);
                row[v - 1] = (params.within(k) * (ln_t - w.ln())).exp();
            }
        }
    }
    MaximaDataset::new(values, count, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::exponent::extremal_coefficient;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Kolmogorov-Smirnov distance against the unit Frechet cdf exp(-1/z).
    fn ks_unit_frechet(sample: &mut [f64]) -> f64 {
        sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sample.len() as f64;
        sample
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let cdf = (-1.0 / z).exp();
                let lo = i as f64 / n;
                let hi = (i + 1) as f64 / n;
                (cdf - lo).abs().max((cdf - hi).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn independence_case_iid_frechet() {
        let tree: TwoLayerTree = "1,2|3".parse().unwrap();
        let params = DependenceParams::new(1.0, vec![1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ds = sample_nested_logistic(&tree, &params, 10_000, &mut rng).unwrap();
        for dcol in 0..3 {
            let mut col = ds.column(dcol);
            let ks = ks_unit_frechet(&mut col);
            // level-0.01 critical value 1.63 / sqrt(n)
            assert!(ks < 1.63 / (10_000f64).sqrt(), "col {dcol} ks {ks}");
        }
    }

    #[test]
    fn marginals_unit_frechet_dependent_case() {
        let tree: TwoLayerTree = "1,2|3,4".parse().unwrap();
        let params = DependenceParams::new(0.8, vec![0.4, 0.9]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ds = sample_nested_logistic(&tree, &params, 10_000, &mut rng).unwrap();
        for dcol in 0..4 {
            let mut col = ds.column(dcol);
            let ks = ks_unit_frechet(&mut col);
            assert!(ks < 1.63 / (10_000f64).sqrt(), "col {dcol} ks {ks}");
        }
    }

    #[test]
    fn pairwise_extremal_coefficient_within_cluster() {
        use crate::diagnostics::empirical_extremal_coefficient;
        let tree: TwoLayerTree = "1,2|3,4".parse().unwrap();
        let params = DependenceParams::new(0.9, vec![0.5, 0.8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 20_000;
        let ds = sample_nested_logistic(&tree, &params, n, &mut rng).unwrap();
        let theta = empirical_extremal_coefficient(&ds, &[1, 2]).unwrap();
        let expect = 2f64.powf(params.within(0));
        // 1/max is Exp(theta): sd of theta-hat ~ theta/sqrt(n)
        let se = expect / (n as f64).sqrt();
        assert!(
            (theta - expect).abs() <= 3.0 * se,
            "theta {theta} expect {expect}"
        );
    }

    #[test]
    fn full_extremal_coefficient_matches_closed_form() {
        use crate::diagnostics::empirical_extremal_coefficient;
        let tree: TwoLayerTree = "1,2,3|4,5".parse().unwrap();
        let params = DependenceParams::new(0.7, vec![0.5, 0.9]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 10_000;
        let ds = sample_nested_logistic(&tree, &params, n, &mut rng).unwrap();
        let theta = empirical_extremal_coefficient(&ds, &[1, 2, 3, 4, 5]).unwrap();
        let expect = extremal_coefficient(&tree, &params).unwrap();
        let se = expect / (n as f64).sqrt();
        assert!(
            (theta - expect).abs() <= 3.0 * se,
            "theta {theta} expect {expect}"
        );
    }

    #[test]
    fn seeded_reproducibility() {
        let tree: TwoLayerTree = "1,2|3".parse().unwrap();
        let params = DependenceParams::new(0.8, vec![0.5, 0.7]).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_nested_logistic(&tree, &params, 20, &mut rng).unwrap()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }
}
