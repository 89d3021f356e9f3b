use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default cap on the dimension for full partition enumeration.
pub const ENUMERATION_CAP: usize = 10;

/// A partition of the variable indices {1..D} into K non-empty clusters,
/// kept in canonical form: indices sorted within each cluster, clusters
/// ordered by their smallest member. Two trees describing the same partition
/// compare equal.
///
/// The same type doubles as an occurrence partition of a block-maxima row,
/// which is a set partition of {1..D} as well.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoLayerTree {
    clusters: Vec<Vec<usize>>,
    dim: usize,
}

impl TwoLayerTree {
    /// Builds a tree from raw clusters, canonicalizing on the way in.
    /// The clusters must form a partition of {1..D} with D the total count.
    pub fn new(clusters: Vec<Vec<usize>>) -> Result<Self> {
        let dim: usize = clusters.iter().map(|c| c.len()).sum();
        if dim == 0 {
            return Err(Error::contract("tree must contain at least one variable"));
        }
        let mut seen = vec![false; dim + 1];
        for cluster in &clusters {
            if cluster.is_empty() {
                return Err(Error::contract("empty cluster"));
            }
            for &v in cluster {
                if v == 0 || v > dim {
                    return Err(Error::contract(format!(
                        "index {v} outside 1..={dim}"
                    )));
                }
                if seen[v] {
                    return Err(Error::contract(format!("index {v} repeated")));
                }
                seen[v] = true;
            }
        }
        let mut clusters: Vec<Vec<usize>> = clusters;
        for cluster in &mut clusters {
            cluster.sort_unstable();
        }
        clusters.sort_by_key(|c| c[0]);
        Ok(TwoLayerTree { clusters, dim })
    }

    /// The single-cluster tree over {1..D}.
    pub fn single_cluster(dim: usize) -> Result<Self> {
        TwoLayerTree::new(vec![(1..=dim).collect()])
    }

    /// The all-singletons tree over {1..D}.
    pub fn singletons(dim: usize) -> Result<Self> {
        TwoLayerTree::new((1..=dim).map(|v| vec![v]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of clusters K.
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// Cluster sizes (D_1, ..., D_K) in canonical order.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.len()).collect()
    }

    /// Index of the cluster containing 1-based variable `var`.
    pub fn cluster_of(&self, var: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(&var))
    }

    /// True if `other` appears among this tree's clusters.
    pub fn contains_cluster(&self, members: &[usize]) -> bool {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        self.clusters.iter().any(|c| *c == sorted)
    }
}

/// Re-canonicalizes a tree. Construction already canonicalizes, so this is
/// the identity; it exists to make idempotence testable on its own.
pub fn canonicalize(tree: &TwoLayerTree) -> TwoLayerTree {
    TwoLayerTree::new(tree.clusters.clone()).expect("valid tree stays valid")
}

impl fmt::Display for TwoLayerTree {
    /// Text format used everywhere: `1,2|3,4,5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clusters
            .iter()
            .map(|c| {
                c.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

impl FromStr for TwoLayerTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut clusters = Vec::new();
        for part in s.split('|') {
            let mut cluster = Vec::new();
            for tok in part.split(',') {
                let v: usize = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("bad index {tok:?} in tree {s:?}")))?;
                cluster.push(v);
            }
            clusters.push(cluster);
        }
        TwoLayerTree::new(clusters)
    }
}

/// All set partitions of the given items, in canonical form.
pub fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn rec(rest: &[usize], current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        match rest.split_first() {
            None => out.push(current.clone()),
            Some((&first, tail)) => {
                for i in 0..current.len() {
                    current[i].push(first);
                    rec(tail, current, out);
                    current[i].pop();
                }
                current.push(vec![first]);
                rec(tail, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(items, &mut Vec::new(), &mut out);
    out
}

/// Every canonical partition of {1..D}; exactly B_D of them.
/// Refuses D above `ENUMERATION_CAP`.
pub fn enumerate_trees(dim: usize) -> Result<Vec<TwoLayerTree>> {
    enumerate_trees_capped(dim, ENUMERATION_CAP)
}

pub fn enumerate_trees_capped(dim: usize, cap: usize) -> Result<Vec<TwoLayerTree>> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    if dim > cap {
        return Err(Error::domain(format!(
            "enumeration of {dim}-variable partitions exceeds the cap {cap}"
        )));
    }
    let items: Vec<usize> = (1..=dim).collect();
    set_partitions(&items)
        .into_iter()
        .map(TwoLayerTree::new)
        .collect()
}
