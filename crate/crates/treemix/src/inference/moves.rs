//! Reversible-jump moves over two-layer trees: split, merge, swap.

use rand::Rng;
use rand_distr::Open01;

use crate::error::Result;
use crate::model::params::DependenceParams;
use crate::model::tree::TwoLayerTree;

const LN_2: f64 = std::f64::consts::LN_2;

/// A tree together with aligned dependence parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeState {
    pub tree: TwoLayerTree,
    pub params: DependenceParams,
}

impl TreeState {
    pub fn new(tree: TwoLayerTree, params: DependenceParams) -> Result<Self> {
        params.check_tree(&tree)?;
        Ok(TreeState { tree, params })
    }

    /// Builds a state from unordered (cluster, alpha) pairs, canonicalizing
    /// the clusters and carrying each alpha with its cluster.
    fn from_pairs(mut pairs: Vec<(Vec<usize>, f64)>, alpha0: f64) -> Result<Self> {
        for (cluster, _) in pairs.iter_mut() {
            cluster.sort_unstable();
        }
        pairs.sort_by_key(|(c, _)| c[0]);
        let (clusters, alphas): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        TreeState::new(TwoLayerTree::new(clusters)?, DependenceParams::new(alpha0, alphas)?)
    }

    fn pairs(&self) -> Vec<(Vec<usize>, f64)> {
        self.tree
            .clusters()
            .iter()
            .cloned()
            .zip(self.params.alphas.iter().copied())
            .collect()
    }

    /// Dimension of the parameter vector (alpha0 plus one alpha per cluster).
    pub fn param_dim(&self) -> usize {
        1 + self.params.alphas.len()
    }
}

/// A proposed state with the log proposal densities of the forward and
/// reverse moves and the log Jacobian of the parameter map.
#[derive(Debug, Clone)]
pub struct MoveProposal {
    pub state: TreeState,
    pub log_q_forward: f64,
    pub log_q_reverse: f64,
    pub log_jacobian: f64,
    /// Auxiliary dimensions consumed by the forward / produced by the
    /// reverse move, for the dimension-matching assertion.
    pub aux_forward: usize,
    pub aux_reverse: usize,
}

fn ln_choose2(k: usize) -> f64 {
    ((k * (k - 1) / 2) as f64).ln()
}

/// Splits a uniformly chosen size->=2 cluster by a uniform non-trivial
/// bipartition; the parent alpha maps to (alpha+u, alpha-u) with u uniform
/// on (-a, a), a = min(eta, alpha, 1-alpha). The sub-cluster keeping the
/// parent's smallest member receives alpha+u. Returns None when no cluster
/// qualifies or the parent alpha sits at the spike (a = 0), which the caller
/// counts as a rejected iteration.
pub fn rj_split<R: Rng + ?Sized>(
    state: &TreeState,
    eta: f64,
    rng: &mut R,
) -> Result<Option<MoveProposal>> {
    let splittable: Vec<usize> = (0..state.tree.cluster_count())
        .filter(|&k| state.tree.clusters()[k].len() >= 2)
        .collect();
    if splittable.is_empty() {
        return Ok(None);
    }
    let ci = splittable[rng.gen_range(0..splittable.len())];
    let alpha = state.params.alphas[ci];
    let a = eta.min(alpha).min(1.0 - alpha);
    if a <= 0.0 {
        return Ok(None);
    }
    let cluster = &state.tree.clusters()[ci];
    let s = cluster.len();
    let n_bipart = (1usize << (s - 1)) - 1;
    // mask bit i: member i+1 joins the part of member 0; the all-ones mask
    // (empty second part) is excluded by sampling below it
    let mask = rng.gen_range(0..n_bipart);
    let mut part_a = vec![cluster[0]];
    let mut part_b = Vec::new();
    for (i, &v) in cluster.iter().enumerate().skip(1) {
        if (mask >> (i - 1)) & 1 == 1 {
            part_a.push(v);
        } else {
            part_b.push(v);
        }
    }
    let u = a * (2.0 * rng.sample::<f64, _>(Open01) - 1.0);
    let mut pairs = state.pairs();
    pairs.remove(ci);
    pairs.push((part_a, alpha + u));
    pairs.push((part_b, alpha - u));
    let proposal = TreeState::from_pairs(pairs, state.params.alpha0)?;
    let k_new = proposal.tree.cluster_count();
    Ok(Some(MoveProposal {
        state: proposal,
        log_q_forward: -(splittable.len() as f64).ln() - (n_bipart as f64).ln() - (2.0 * a).ln(),
        log_q_reverse: -ln_choose2(k_new),
        log_jacobian: LN_2,
        aux_forward: 1,
        aux_reverse: 0,
    }))
}

/// Merges a uniformly chosen unordered cluster pair; the merged alpha is the
/// average of the two and the implied auxiliary u* = (alpha_first -
/// alpha_second)/2, where "first" is the cluster holding the merged
/// cluster's smallest member. The reverse split density is zero (log -inf)
/// when |u*| falls outside the reverse window, making the acceptance ratio
/// -inf rather than NaN. Returns None when K = 1.
pub fn rj_merge<R: Rng + ?Sized>(
    state: &TreeState,
    eta: f64,
    rng: &mut R,
) -> Result<Option<MoveProposal>> {
    let k = state.tree.cluster_count();
    if k < 2 {
        return Ok(None);
    }
    let pair_count = k * (k - 1) / 2;
    let mut r = rng.gen_range(0..pair_count);
    let (mut i, mut j) = (0, 1);
    'outer: for a in 0..k {
        for b in (a + 1)..k {
            if r == 0 {
                i = a;
                j = b;
                break 'outer;
            }
            r -= 1;
        }
    }
    // canonical order sorts clusters by smallest member, so cluster i holds
    // the merged cluster's smallest member and carried alpha_bar + u*
    let (ai, aj) = (state.params.alphas[i], state.params.alphas[j]);
    let abar = (ai + aj) / 2.0;
    let ustar = (ai - aj) / 2.0;
    let mut pairs = state.pairs();
    let (cj, _) = pairs.remove(j);
    let mut merged = pairs.remove(i).0;
    merged.extend(cj);
    let merged_size = merged.len();
    pairs.push((merged, abar));
    let proposal = TreeState::from_pairs(pairs, state.params.alpha0)?;
    let a = eta.min(abar).min(1.0 - abar);
    // A child sitting exactly on the boundary atom alpha = 1 can never be
    // regenerated by the reverse split (its u density has no atom), so such
    // merges must be rejected outright. The window test alone does not cover
    // this: |u*| and the window edge 1 - abar are then equal in exact
    // arithmetic but rounded differently, letting the comparison pass.
    let log_q_reverse = if ai != 1.0 && aj != 1.0 && a > 0.0 && ustar.abs() < a {
        let n_split = proposal
            .tree
            .clusters()
            .iter()
            .filter(|c| c.len() >= 2)
            .count();
        let n_bipart = (1usize << (merged_size - 1)) - 1;
        -(n_split as f64).ln() - (n_bipart as f64).ln() - (2.0 * a).ln()
    } else {
        f64::NEG_INFINITY
    };
    Ok(Some(MoveProposal {
        state: proposal,
        log_q_forward: -(pair_count as f64).ln(),
        log_q_reverse,
        log_jacobian: -LN_2,
        aux_forward: 0,
        aux_reverse: 1,
    }))
}

/// Relocates one uniformly chosen variable (drawn from the members of
/// size->=2 clusters) into a uniformly chosen other cluster. Parameters are
/// unchanged; the forward/reverse densities differ only through the
/// eligible-variable counts of the two states. Returns None when K < 2 or no
/// variable is eligible.
pub fn rj_swap<R: Rng + ?Sized>(state: &TreeState, rng: &mut R) -> Result<Option<MoveProposal>> {
    let k = state.tree.cluster_count();
    if k < 2 {
        return Ok(None);
    }
    let eligible: Vec<(usize, usize)> = state
        .tree
        .clusters()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() >= 2)
        .flat_map(|(ci, c)| c.iter().map(move |&v| (ci, v)))
        .collect();
    if eligible.is_empty() {
        return Ok(None);
    }
    let (src, var) = eligible[rng.gen_range(0..eligible.len())];
    let mut dest = rng.gen_range(0..k - 1);
    if dest >= src {
        dest += 1;
    }
    let mut pairs = state.pairs();
    pairs[src].0.retain(|&v| v != var);
    pairs[dest].0.push(var);
    let proposal = TreeState::from_pairs(pairs, state.params.alpha0)?;
    let n_eligible_rev = proposal
        .tree
        .clusters()
        .iter()
        .filter(|c| c.len() >= 2)
        .map(|c| c.len())
        .sum::<usize>();
    Ok(Some(MoveProposal {
        state: proposal,
        log_q_forward: -(eligible.len() as f64).ln() - ((k - 1) as f64).ln(),
        log_q_reverse: -(n_eligible_rev as f64).ln() - ((k - 1) as f64).ln(),
        log_jacobian: 0.0,
        aux_forward: 0,
        aux_reverse: 0,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(tree: &str, alpha0: f64, alphas: Vec<f64>) -> TreeState {
        TreeState::new(tree.parse().unwrap(), DependenceParams::new(alpha0, alphas).unwrap())
            .unwrap()
    }

    #[test]
    fn split_children_within_window() {
        let s = state("1,2,3,4", 0.9, vec![0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        for _ in 0..500 {
            let p = rj_split(&s, 0.4, &mut rng).unwrap().unwrap();
            assert_eq!(p.state.tree.cluster_count(), 2);
            for &a in &p.state.params.alphas {
                assert!(a > 0.1 && a < 0.9, "child alpha {a}");
            }
            // children are symmetric around the parent
            let sum: f64 = p.state.params.alphas.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn split_clamps_near_one() {
        let s = state("1,2", 0.9, vec![0.95]);
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        for _ in 0..200 {
            let p = rj_split(&s, 0.4, &mut rng).unwrap().unwrap();
            for &a in &p.state.params.alphas {
                assert!(a > 0.9 && a < 1.0, "child alpha {a}");
            }
        }
    }

    #[test]
    fn split_infeasible_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        // all singletons: nothing to split
        let s = state("1|2", 0.9, vec![0.5, 0.5]);
        assert!(rj_split(&s, 0.4, &mut rng).unwrap().is_none());
        // parent at the spike: zero window
        let s = state("1,2", 0.9, vec![1.0]);
        assert!(rj_split(&s, 0.4, &mut rng).unwrap().is_none());
    }

    #[test]
    fn merge_arithmetic() {
        let s = state("1,2|3,4", 0.9, vec![0.6, 0.4]);
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        let p = rj_merge(&s, 0.4, &mut rng).unwrap().unwrap();
        assert_eq!(p.state.tree.to_string(), "1,2,3,4");
        assert!((p.state.params.alphas[0] - 0.5).abs() < 1e-15);
        assert!(p.log_q_reverse.is_finite());
        assert!((p.log_jacobian - -LN_2).abs() < 1e-15);
    }

    #[test]
    fn merge_with_boundary_child_rejected() {
        // one child at alpha = 1: reverse split cannot hit the atom, and the
        // window comparison must not be left to floating-point rounding
        let s = state("1,2|3,4", 0.9, vec![1.0, 0.4361618666274293]);
        let mut rng = ChaCha8Rng::seed_from_u64(86);
        let p = rj_merge(&s, 0.4, &mut rng).unwrap().unwrap();
        assert_eq!(p.log_q_reverse, f64::NEG_INFINITY);
    }

    #[test]
    fn merge_outside_window_has_zero_reverse_density() {
        // u* = 0.4 equals the window edge a = min(eta, 0.5, 0.5) = 0.4
        let s = state("1,2|3,4", 0.9, vec![0.9, 0.1]);
        let mut rng = ChaCha8Rng::seed_from_u64(85);
        let p = rj_merge(&s, 0.4, &mut rng).unwrap().unwrap();
        assert_eq!(p.log_q_reverse, f64::NEG_INFINITY);
        assert!(!p.log_q_reverse.is_nan());
    }

    #[test]
    fn merge_infeasible_at_k1() {
        let s = state("1,2,3", 0.9, vec![0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(86);
        assert!(rj_merge(&s, 0.4, &mut rng).unwrap().is_none());
    }

    #[test]
    fn split_merge_round_trip() {
        let s = state("1,2,3|4,5", 0.85, vec![0.5, 0.7]);
        let mut rng = ChaCha8Rng::seed_from_u64(87);
        for _ in 0..100 {
            let split = rj_split(&s, 0.4, &mut rng).unwrap().unwrap();
            // find the two children of the split and merge them back
            let children: Vec<usize> = (0..split.state.tree.cluster_count())
                .filter(|&k| !s.tree.contains_cluster(&split.state.tree.clusters()[k]))
                .collect();
            assert_eq!(children.len(), 2);
            // merge by brute force: try all pairs until the original returns
            let merged = merge_pair(&split.state, children[0], children[1]);
            assert_eq!(merged.tree, s.tree);
            for (a, b) in merged.params.alphas.iter().zip(&s.params.alphas) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    /// Deterministic merge of clusters i and j, mirroring rj_merge's map.
    fn merge_pair(state: &TreeState, i: usize, j: usize) -> TreeState {
        let (i, j) = (i.min(j), i.max(j));
        let abar = (state.params.alphas[i] + state.params.alphas[j]) / 2.0;
        let mut pairs = state.pairs();
        let (cj, _) = pairs.remove(j);
        let mut merged = pairs.remove(i).0;
        merged.extend(cj);
        pairs.push((merged, abar));
        TreeState::from_pairs(pairs, state.params.alpha0).unwrap()
    }

    #[test]
    fn merge_split_round_trip() {
        // merging two clusters then splitting with the implied (bipartition,
        // u*) restores the original state exactly
        let s = state("1,3|2,4", 0.8, vec![0.55, 0.45]);
        let abar = 0.5;
        let ustar = 0.05;
        let merged = merge_pair(&s, 0, 1);
        assert_eq!(merged.tree.to_string(), "1,2,3,4");
        // reverse split: part holding variable 1 gets abar + u*
        let restored = TreeState::from_pairs(
            vec![(vec![1, 3], abar + ustar), (vec![2, 4], abar - ustar)],
            merged.params.alpha0,
        )
        .unwrap();
        assert_eq!(restored.tree, s.tree);
        for (a, b) in restored.params.alphas.iter().zip(&s.params.alphas) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn swap_mechanics() {
        let s = state("1,2|3,4", 0.9, vec![0.5, 0.7]);
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        let mut saw_singleton = false;
        for _ in 0..200 {
            let p = rj_swap(&s, &mut rng).unwrap().unwrap();
            assert_eq!(p.state.tree.dim(), 4);
            assert_eq!(p.state.tree.cluster_count(), 2);
            assert_eq!(p.log_jacobian, 0.0);
            if p.state.tree.cluster_sizes().contains(&1) {
                saw_singleton = true;
                // 4 eligible forward, 3 eligible reverse
                let qf = -(4f64.ln()) - 0.0;
                let qr = -(3f64.ln()) - 0.0;
                assert!((p.log_q_forward - qf).abs() < 1e-12);
                assert!((p.log_q_reverse - qr).abs() < 1e-12);
            }
        }
        assert!(saw_singleton);
    }

    #[test]
    fn swap_example_from_pair_tree() {
        // moving variable 2 out of {1,2} gives {1}|{2,3,4}
        let s = state("1,2|3,4", 0.9, vec![0.5, 0.7]);
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        loop {
            let p = rj_swap(&s, &mut rng).unwrap().unwrap();
            if p.state.tree.to_string() == "1|2,3,4" {
                // the singleton keeps alpha 0.5, the big cluster keeps 0.7
                assert!((p.state.params.alphas[0] - 0.5).abs() < 1e-15);
                assert!((p.state.params.alphas[1] - 0.7).abs() < 1e-15);
                break;
            }
        }
    }

    #[test]
    fn swap_infeasible_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let s = state("1,2,3", 0.9, vec![0.5]);
        assert!(rj_swap(&s, &mut rng).unwrap().is_none());
        let s = state("1|2", 0.9, vec![0.5, 0.5]);
        assert!(rj_swap(&s, &mut rng).unwrap().is_none());
    }

    #[test]
    fn dimension_matching() {
        let s = state("1,2,3|4,5", 0.85, vec![0.5, 0.7]);
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let sp = rj_split(&s, 0.4, &mut rng).unwrap().unwrap();
        assert_eq!(s.param_dim() + sp.aux_forward, sp.state.param_dim() + sp.aux_reverse);
        let mg = rj_merge(&s, 0.4, &mut rng).unwrap().unwrap();
        assert_eq!(s.param_dim() + mg.aux_forward, mg.state.param_dim() + mg.aux_reverse);
        let sw = rj_swap(&s, &mut rng).unwrap().unwrap();
        assert_eq!(s.param_dim() + sw.aux_forward, sw.state.param_dim() + sw.aux_reverse);
    }
}
