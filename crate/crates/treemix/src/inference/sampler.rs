//! The two samplers: fixed-tree MH and the tree-mixture reversible-jump
//! sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::inference::likelihood::Likelihood;
use crate::inference::moves::{rj_merge, rj_split, rj_swap, MoveProposal, TreeState};
use crate::inference::proposal::{log_prior, propose_alpha, AdaptiveEpsilons, ProposalConfig};
use crate::inference::trace::{ChainHeader, ChainRecord, ChainTrace, MoveType};
use crate::model::params::DependenceParams;
use crate::model::tree::TwoLayerTree;

/// Reversible-jump configuration: split window eta, move-type probabilities
/// (split, merge, swap), and iteration count.
#[derive(Debug, Clone, PartialEq)]
pub struct RjConfig {
    pub eta: f64,
    pub move_probs: (f64, f64, f64),
    pub iters: u64,
}

impl RjConfig {
    pub fn new(eta: f64, move_probs: (f64, f64, f64), iters: u64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::domain(format!("eta = {eta} outside (0,1]")));
        }
        let total = move_probs.0 + move_probs.1 + move_probs.2;
        if move_probs.0 < 0.0
            || move_probs.1 < 0.0
            || move_probs.2 < 0.0
            || (total - 1.0).abs() > 1e-12
        {
            return Err(Error::domain(format!(
                "move probabilities {move_probs:?} must be non-negative and sum to 1"
            )));
        }
        Ok(RjConfig {
            eta,
            move_probs,
            iters,
        })
    }

    /// eta = 0.4 and equal move probabilities, with burn-in iters/5 implied
    /// by the companion ProposalConfig.
    pub fn with_iters(iters: u64) -> Self {
        RjConfig::new(0.4, (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0), iters).expect("defaults are valid")
    }
}

fn check_init(log_post: f64) -> Result<()> {
    if !log_post.is_finite() {
        return Err(Error::domain(format!(
            "non-finite log posterior {log_post} at the initial state"
        )));
    }
    Ok(())
}

/// One single-site MH sweep over alpha0 and every cluster alpha; returns
/// whether any site was accepted. `cur_ll` and `cur_prior` are kept in sync.
fn mh_sweep<R: Rng + ?Sized>(
    lik: &dyn Likelihood,
    state: &mut TreeState,
    cur_ll: &mut f64,
    cur_prior: &mut f64,
    eps: &mut AdaptiveEpsilons,
    rng: &mut R,
) -> Result<bool> {
    let mut any = false;
    let n_params = state.param_dim();
    debug_assert_eq!(eps.len(), n_params);
    for p in 0..n_params {
        let current = if p == 0 {
            state.params.alpha0
        } else {
            state.params.alphas[p - 1]
        };
        let (proposed, log_qf, log_qr) = propose_alpha(current, eps.eps(p), rng);
        let mut cand = state.params.clone();
        if p == 0 {
            cand.alpha0 = proposed;
        } else {
            cand.alphas[p - 1] = proposed;
        }
        let cand = DependenceParams::new(cand.alpha0, cand.alphas)?;
        let cand_ll = lik.log_lik(&state.tree, &cand)?;
        let cand_prior = log_prior(&cand);
        let log_ratio = cand_ll + cand_prior + log_qr - *cur_ll - *cur_prior - log_qf;
        debug_assert!(!log_ratio.is_nan());
        let accept = log_ratio >= 0.0 || rng.sample::<f64, _>(rand_distr::Open01).ln() < log_ratio;
        if accept {
            state.params = cand;
            *cur_ll = cand_ll;
            *cur_prior = cand_prior;
            any = true;
        }
        // spike-state proposals are accepted with probability ~eps/2
        // regardless of tuning; feeding them to the adapter would shrink eps
        // into a trap at the spike, so only interior-state proposals count
        if current != 1.0 {
            eps.record(p, accept);
        }
    }
    Ok(any)
}

/// Fixed-tree Metropolis-Hastings over the dependence parameters. Step sizes
/// adapt during the configured burn-in and are frozen afterwards. The trace
/// is a deterministic function of (likelihood data, tree, init, config,
/// iters, seed).
pub fn mh_fixed_tree(
    lik: &dyn Likelihood,
    tree: &TwoLayerTree,
    init: &DependenceParams,
    config: &ProposalConfig,
    iters: u64,
    seed: u64,
) -> Result<ChainTrace> {
    if lik.dim() != tree.dim() {
        return Err(Error::contract("likelihood dimension does not match tree"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = TreeState::new(tree.clone(), init.clone())?;
    let mut cur_ll = lik.log_lik(&state.tree, &state.params)?;
    let mut cur_prior = log_prior(&state.params);
    check_init(cur_ll + cur_prior)?;
    let mut eps = AdaptiveEpsilons::new(config.clone(), state.param_dim());
    let mut records = Vec::with_capacity(iters as usize);
    for iter in 1..=iters {
        let any = mh_sweep(lik, &mut state, &mut cur_ll, &mut cur_prior, &mut eps, &mut rng)?;
        eps.maybe_adapt(iter);
        records.push(ChainRecord {
            iter,
            tree: state.tree.clone(),
            params: state.params.clone(),
            log_post: cur_ll + cur_prior,
            move_type: MoveType::Mh,
            accepted: any,
        });
    }
    ChainTrace::new(
        ChainHeader {
            seed,
            iters,
            burnin: config.burnin,
            eta: 0.0,
            likelihood: lik.name().into(),
            dim: tree.dim(),
            names: None,
        },
        records,
    )
}

/// Tree-mixture reversible-jump sampler. Each iteration proposes one move
/// (split/merge/swap with the configured probabilities), accepts or rejects
/// it, then runs one within-model MH sweep so parameters mix at fixed tree.
/// The initial state is the single all-variables cluster with all parameters
/// 0.5. The trace is a deterministic function of (data, configs, seed).
pub fn tm_mcmc(
    lik: &dyn Likelihood,
    rj: &RjConfig,
    proposal: &ProposalConfig,
    seed: u64,
) -> Result<ChainTrace> {
    let dim = lik.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = TreeState::new(
        TwoLayerTree::single_cluster(dim)?,
        DependenceParams::new(0.5, vec![0.5])?,
    )?;
    let mut cur_ll = lik.log_lik(&state.tree, &state.params)?;
    let mut cur_prior = log_prior(&state.params);
    check_init(cur_ll + cur_prior)?;
    let mut eps = AdaptiveEpsilons::new(proposal.clone(), state.param_dim());
    let mut records = Vec::with_capacity(rj.iters as usize);
    for iter in 1..=rj.iters {
        let u: f64 = rng.gen();
        let (move_type, mv): (MoveType, Option<MoveProposal>) = if u < rj.move_probs.0 {
            (MoveType::Split, rj_split(&state, rj.eta, &mut rng)?)
        } else if u < rj.move_probs.0 + rj.move_probs.1 {
            (MoveType::Merge, rj_merge(&state, rj.eta, &mut rng)?)
        } else {
            (MoveType::Swap, rj_swap(&state, &mut rng)?)
        };
        // split and merge are each other's reverses; their move-type
        // probabilities enter the ratio. Swap reverses itself, ratio 1.
        let log_move_ratio = match move_type {
            MoveType::Split => (rj.move_probs.1 / rj.move_probs.0).ln(),
            MoveType::Merge => (rj.move_probs.0 / rj.move_probs.1).ln(),
            _ => 0.0,
        };
        let mut accepted = false;
        if let Some(p) = mv {
            assert_eq!(
                state.param_dim() + p.aux_forward,
                p.state.param_dim() + p.aux_reverse,
                "dimension matching violated"
            );
            let cand_prior = log_prior(&p.state.params);
            let mut cand_ll = f64::NEG_INFINITY;
            let log_ratio = if cand_prior == f64::NEG_INFINITY
                || p.log_q_reverse == f64::NEG_INFINITY
            {
                f64::NEG_INFINITY
            } else {
                cand_ll = lik.log_lik(&p.state.tree, &p.state.params)?;
                cand_ll + cand_prior - cur_ll - cur_prior + p.log_q_reverse - p.log_q_forward
                    + p.log_jacobian
                    + log_move_ratio
            };
            debug_assert!(!log_ratio.is_nan());
            if log_ratio >= 0.0 || rng.sample::<f64, _>(rand_distr::Open01).ln() < log_ratio {
                cur_ll = cand_ll;
                cur_prior = cand_prior;
                state = p.state;
                eps.resize(state.param_dim());
                accepted = true;
            }
        }
        mh_sweep(lik, &mut state, &mut cur_ll, &mut cur_prior, &mut eps, &mut rng)?;
        eps.maybe_adapt(iter);
        records.push(ChainRecord {
            iter,
            tree: state.tree.clone(),
            params: state.params.clone(),
            log_post: cur_ll + cur_prior,
            move_type,
            accepted,
        });
    }
    ChainTrace::new(
        ChainHeader {
            seed,
            iters: rj.iters,
            burnin: proposal.burnin,
            eta: rj.eta,
            likelihood: lik.name().into(),
            dim,
            names: None,
        },
        records,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::likelihood::{FlatLikelihood, RecursiveLikelihood};
    use crate::model::tree::enumerate_trees;
    use crate::simulate::sample_nested_logistic;

    #[test]
    fn flat_target_recovers_spike_mass() {
        let lik = FlatLikelihood(2);
        let tree = TwoLayerTree::single_cluster(2).unwrap();
        let init = DependenceParams::new(0.5, vec![0.5]).unwrap();
        let config = ProposalConfig::with_burnin(2_000);
        let trace = mh_fixed_tree(&lik, &tree, &init, &config, 22_000, 7).unwrap();
        for p in 0..2 {
            let post: Vec<&ChainRecord> =
                trace.records.iter().filter(|r| r.iter > 2_000).collect();
            let spike = post
                .iter()
                .filter(|r| {
                    let a = if p == 0 { r.params.alpha0 } else { r.params.alphas[0] };
                    a == 1.0
                })
                .count() as f64
                / post.len() as f64;
            assert!((spike - 0.5).abs() < 0.03, "param {p} spike rate {spike}");
        }
    }

    #[test]
    fn trace_reproducible_from_seed() {
        let lik = FlatLikelihood(3);
        let tree: TwoLayerTree = "1,2|3".parse().unwrap();
        let init = DependenceParams::new(0.7, vec![0.4, 0.9]).unwrap();
        let config = ProposalConfig::with_burnin(100);
        let a = mh_fixed_tree(&lik, &tree, &init, &config, 500, 99).unwrap();
        let b = mh_fixed_tree(&lik, &tree, &init, &config, 500, 99).unwrap();
        assert_eq!(a, b);
        let c = mh_fixed_tree(&lik, &tree, &init, &config, 500, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn posterior_concentrates_near_truth_d2() {
        use rand_chacha::ChaCha8Rng;
        let tree = TwoLayerTree::single_cluster(2).unwrap();
        let truth = DependenceParams::new(1.0, vec![0.3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let data = sample_nested_logistic(&tree, &truth, 400, &mut rng).unwrap();
        let lik = RecursiveLikelihood(&data);
        let init = DependenceParams::new(0.9, vec![0.5]).unwrap();
        let config = ProposalConfig::with_burnin(400);
        let trace = mh_fixed_tree(&lik, &tree, &init, &config, 2_400, 5).unwrap();
        // the product alpha0*alpha1 is what the data identify at K=1
        let mut within: Vec<f64> = trace
            .records
            .iter()
            .filter(|r| r.iter > 400)
            .map(|r| r.params.alpha0 * r.params.alphas[0])
            .collect();
        within.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = within[within.len() / 2];
        assert!((median - 0.3).abs() < 0.05, "median {median}");
    }

    #[test]
    fn tm_flat_target_uniform_over_trees_d3() {
        let lik = FlatLikelihood(3);
        let rj = RjConfig::with_iters(60_000);
        let proposal = ProposalConfig::with_burnin(10_000);
        let trace = tm_mcmc(&lik, &rj, &proposal, 13).unwrap();
        let trees = enumerate_trees(3).unwrap();
        let post: Vec<&ChainRecord> = trace.records.iter().filter(|r| r.iter > 10_000).collect();
        for t in &trees {
            let freq = post.iter().filter(|r| r.tree == *t).count() as f64 / post.len() as f64;
            assert!(
                (freq - 0.2).abs() < 0.04,
                "tree {t} frequency {freq}"
            );
        }
    }

    #[test]
    fn tm_trace_reproducible() {
        let lik = FlatLikelihood(3);
        let rj = RjConfig::with_iters(300);
        let proposal = ProposalConfig::with_burnin(60);
        let a = tm_mcmc(&lik, &rj, &proposal, 21).unwrap();
        let b = tm_mcmc(&lik, &rj, &proposal, 21).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_iterations_empty_trace() {
        let lik = FlatLikelihood(2);
        let rj = RjConfig::with_iters(0);
        let proposal = ProposalConfig::default();
        let trace = tm_mcmc(&lik, &rj, &proposal, 1).unwrap();
        assert!(trace.records.is_empty());
    }
}

