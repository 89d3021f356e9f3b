//! Sampling from the nested outer-power Clayton copula via the two-level
//! frailty construction, transformed to unit Frechet margins.

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::model::dataset::MaximaDataset;
use crate::model::tree::TwoLayerTree;
use crate::simulate::stable::sample_positive_stable;

/// Outer-power Clayton parameters: outer theta0 and per-cluster theta_k,
/// all >= 1, with the sufficient nesting condition theta0 <= theta_k.
/// The max-stable attractor has alpha0 = 1/theta0 and alpha0 alpha_k =
/// 1/theta_k.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaytonConfig {
    pub theta0: f64,
    pub thetas: Vec<f64>,
}

impl ClaytonConfig {
    pub fn new(theta0: f64, thetas: Vec<f64>) -> Result<Self> {
        if !(theta0 >= 1.0) || !theta0.is_finite() {
            return Err(Error::domain(format!("theta0 = {theta0} must be >= 1")));
        }
        if thetas.is_empty() {
            return Err(Error::contract("at least one cluster theta required"));
        }
        for (k, &t) in thetas.iter().enumerate() {
            if !(t >= 1.0) || !t.is_finite() {
                return Err(Error::domain(format!("theta[{}] = {t} must be >= 1", k + 1)));
            }
            if t < theta0 {
                return Err(Error::domain(format!(
                    "nesting condition violated: theta[{}] = {t} < theta0 = {theta0}",
                    k + 1
                )));
            }
        }
        Ok(ClaytonConfig { theta0, thetas })
    }

    /// Config whose extreme-value attractor has the given dependence
    /// parameters: theta0 = 1/alpha0, theta_k = 1/(alpha0 alpha_k).
    pub fn from_attractor(alpha0: f64, alphas: &[f64]) -> Result<Self> {
        ClaytonConfig::new(
            1.0 / alpha0,
            alphas.iter().map(|a| 1.0 / (alpha0 * a)).collect(),
        )
    }
}

/// N draws from the two-level nested outer-power Clayton copula (base Clayton
/// parameter 1), with margins mapped to unit Frechet via u -> -1/log u.
///
/// Frailty construction: V0 = S0 * X^{theta0} with S0 ~ PS(1/theta0) and X
/// unit exponential; per cluster V_k = V0^{theta_k/theta0} * S_k with
/// S_k ~ PS(theta0/theta_k); then U = psi_k(E/V_k) with
/// psi_k(t) = (1 + t^{1/theta_k})^{-1}.
pub fn sample_nested_clayton<R: Rng + ?Sized>(
    tree: &TwoLayerTree,
    config: &ClaytonConfig,
    count: usize,
    rng: &mut R,
) -> Result<MaximaDataset> {
    if config.thetas.len() != tree.cluster_count() {
        return Err(Error::contract(format!(
            "{} cluster thetas for a {}-cluster tree",
            config.thetas.len(),
            tree.cluster_count()
        )));
    }
    let d = tree.dim();
    let mut values = vec![0.0; count * d];
    for row in values.chunks_mut(d) {
        let s0 = sample_positive_stable(1.0 / config.theta0, rng)?;
        let x: f64 = rng.sample(Exp1);
        let ln_v0 = s0.ln() + config.theta0 * x.ln();
        for (k, cluster) in tree.clusters().iter().enumerate() {
            let tk = config.thetas[k];
            let sk = sample_positive_stable(config.theta0 / tk, rng)?;
            let ln_vk = (tk / config.theta0) * ln_v0 + sk.ln();
            for &v in cluster {
                let e: f64 = rng.sample(Exp1);
                // ln(-ln u) for u = (1 + (e/V_k)^{1/theta_k})^{-1}
                let ln_ratio_pow = (e.ln() - ln_vk) / tk;
                let ln_neg_ln_u = ln_ratio_pow.exp().ln_1p().ln();
                row[v - 1] = (-ln_neg_ln_u).exp();
            }
        }
    }
    MaximaDataset::new(values, count, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let mut conc = 0i64;
        for i in 0..n {
            for j in (i + 1)..n {
                let s = (x[i] - x[j]) * (y[i] - y[j]);
                conc += if s > 0.0 { 1 } else { -1 };
            }
        }
        conc as f64 / (n * (n - 1) / 2) as f64
    }

    #[test]
    fn nesting_condition_enforced() {
        assert!(ClaytonConfig::new(2.0, vec![1.5]).is_err());
        assert!(ClaytonConfig::new(2.0, vec![2.0, 3.0]).is_ok());
        assert!(ClaytonConfig::new(0.5, vec![1.0]).is_err());
    }

    #[test]
    fn attractor_mapping() {
        let c = ClaytonConfig::from_attractor(0.9, &[0.333, 0.778]).unwrap();
        assert!((c.theta0 - 1.0 / 0.9).abs() < 1e-15);
        assert!((c.thetas[0] - 1.0 / (0.9 * 0.333)).abs() < 1e-12);
    }

    #[test]
    fn marginals_unit_frechet() {
        let tree: TwoLayerTree = "1,2|3,4".parse().unwrap();
        let config = ClaytonConfig::from_attractor(0.9, &[0.333, 0.778]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ds = sample_nested_clayton(&tree, &config, 10_000, &mut rng).unwrap();
        for dcol in 0..4 {
            let mut col = ds.column(dcol);
            col.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = col.len() as f64;
            let ks = col
                .iter()
                .enumerate()
                .map(|(i, &z)| {
                    let cdf = (-1.0 / z).exp();
                    (cdf - i as f64 / n).abs().max((cdf - (i + 1) as f64 / n).abs())
                })
                .fold(0.0, f64::max);
            assert!(ks < 1.63 / n.sqrt(), "col {dcol} ks {ks}");
        }
    }

    #[test]
    fn equal_thetas_make_within_and_between_taus_agree() {
        let tree: TwoLayerTree = "1,2|3,4".parse().unwrap();
        let config = ClaytonConfig::new(2.0, vec![2.0, 2.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let n = 2_000;
        let ds = sample_nested_clayton(&tree, &config, n, &mut rng).unwrap();
        let within = kendall_tau(&ds.column(0), &ds.column(1));
        let between = kendall_tau(&ds.column(0), &ds.column(2));
        // tau se is about 1/sqrt(n) at this scale
        assert!(
            (within - between).abs() < 4.0 / (n as f64).sqrt(),
            "within {within} between {between}"
        );
    }

    #[test]
    fn single_cluster_reduces_to_one_level() {
        // K=1: within-pair tau should match the one-level outer-power Clayton
        // closed form tau = 1 - 2/(theta (base+2)) with base 1: 1 - 2/(3 theta)
        let tree = TwoLayerTree::single_cluster(2).unwrap();
        let theta = 2.5;
        let config = ClaytonConfig::new(theta, vec![theta]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 4_000;
        let ds = sample_nested_clayton(&tree, &config, n, &mut rng).unwrap();
        let tau = kendall_tau(&ds.column(0), &ds.column(1));
        let expect = 1.0 - 2.0 / (3.0 * theta);
        assert!((tau - expect).abs() < 4.0 / (n as f64).sqrt(), "tau {tau} expect {expect}");
    }

    #[test]
    fn seeded_reproducibility() {
        let tree: TwoLayerTree = "1,2|3".parse().unwrap();
        let config = ClaytonConfig::new(1.5, vec![2.0, 3.0]).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_nested_clayton(&tree, &config, 10, &mut rng).unwrap()
        };
        assert_eq!(run(5), run(5));
    }
}
