//! Recursive coefficient tables for the nested logistic likelihood.
//!
//! `BetaTable` holds the coefficients of the full-density expansion, built by
//! a double induction over clusters and within-cluster sizes: grow the first
//! cluster one variable at a time, open each further cluster at size one, then
//! grow it. `GammaTable` holds the analogous coefficients for partial
//! derivatives of the exponent function V itself; differentiating V instead of
//! G = exp(-V) drops the extra power index, so each entry carries one index
//! per cluster only. Coefficients alternate in sign and are stored as
//! (log magnitude, sign) pairs.

use crate::error::{Error, Result};
use crate::model::params::DependenceParams;
use crate::numeric::LogSigned;

/// Dense multi-index table over i_k in 1..=d_k per cluster, with an optional
/// trailing power index j in 1..=Σ i_k.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    shape: Vec<usize>,
    with_j: bool,
    jmax: usize,
    data: Vec<LogSigned>,
}

impl CoeffTable {
    fn new(shape: &[usize], with_j: bool) -> Self {
        let jmax = if with_j { shape.iter().sum() } else { 1 };
        let cells: usize = shape.iter().product::<usize>() * jmax;
        CoeffTable {
            shape: shape.to_vec(),
            with_j,
            jmax,
            data: vec![LogSigned::ZERO; cells],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn flat(&self, idx: &[usize], j: usize) -> usize {
        let mut f = 0;
        for (pos, &d) in self.shape.iter().enumerate() {
            f = f * d + (idx[pos] - 1);
        }
        f * self.jmax + (j - 1)
    }

    /// Zero outside the admissible ranges: i_k in 1..=d_k and, when present,
    /// j in 1..=Σ i_k.
    pub fn get(&self, idx: &[usize], j: usize) -> LogSigned {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut sum = 0usize;
        for (pos, &d) in self.shape.iter().enumerate() {
            if idx[pos] < 1 || idx[pos] > d {
                return LogSigned::ZERO;
            }
            sum += idx[pos];
        }
        if self.with_j && (j < 1 || j > sum) {
            return LogSigned::ZERO;
        }
        self.data[self.flat(idx, j)]
    }

    fn set(&mut self, idx: &[usize], j: usize, v: LogSigned) {
        let f = self.flat(idx, j);
        self.data[f] = v;
    }

    /// Iterates all index tuples (1-based) of the shape.
    fn tuples(&self) -> Vec<Vec<usize>> {
        index_tuples(&self.shape)
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

/// Opens a new cluster at size one.
fn step_open(old: &CoeffTable, alpha0: f64, counter: &mut u64) -> CoeffTable {
    let mut shape = old.shape.to_vec();
    shape.push(1);
    let mut new = CoeffTable::new(&shape, old.with_j);
    for t in old.tuples() {
        let s_old: usize = t.iter().sum();
        let mut idx = t.clone();
        idx.push(1);
        if old.with_j {
            for j in 1..=(s_old + 1) {
                let carry = old.get(&t, j.wrapping_sub(1));
                let decay = old
                    .get(&t, j)
                    .scale(-(j as f64 - s_old as f64 / alpha0));
                new.set(&idx, j, carry.add(&decay));
                *counter += 1;
            }
        } else {
            let v = old.get(&t, 1).scale(-(1.0 - s_old as f64 / alpha0));
            new.set(&idx, 1, v);
            *counter += 1;
        }
    }
    new
}

/// Grows the last cluster from size c to c+1; `alpha` is that cluster's
/// within parameter factor alpha_k.
fn step_grow(old: &CoeffTable, alpha0: f64, alpha: f64, counter: &mut u64) -> CoeffTable {
    let mut shape = old.shape.to_vec();
    let c = *shape.last().unwrap();
    *shape.last_mut().unwrap() = c + 1;
    let mut new = CoeffTable::new(&shape, old.with_j);
    let last = shape.len() - 1;
    for idx in new.tuples() {
        let s: usize = idx.iter().sum();
        let ik = idx[last];
        let mut down = idx.clone();
        down[last] = ik.wrapping_sub(1);
        let vk_coeff = -(ik as f64 - c as f64 / alpha) / alpha0;
        if old.with_j {
            for j in 1..=s {
                let t1 = if ik >= 2 {
                    old.get(&down, j.wrapping_sub(1))
                } else {
                    LogSigned::ZERO
                };
                let t2 = old.get(&idx, j).scale(vk_coeff);
                let t3 = if ik >= 2 {
                    old.get(&down, j)
                        .scale(-(j as f64 - (s as f64 - 1.0) / alpha0))
                } else {
                    LogSigned::ZERO
                };
                new.set(&idx, j, t1.add(&t2).add(&t3));
                *counter += 1;
            }
        } else {
            let t2 = old.get(&idx, 1).scale(vk_coeff);
            let t3 = if ik >= 2 {
                old.get(&down, 1)
                    .scale(-(1.0 - (s as f64 - 1.0) / alpha0))
            } else {
                LogSigned::ZERO
            };
            new.set(&idx, 1, t2.add(&t3));
            *counter += 1;
        }
    }
    new
}

fn build(sizes: &[usize], alphas: &[f64], alpha0: f64, with_j: bool) -> (CoeffTable, u64) {
    let mut counter = 0u64;
    let mut table = CoeffTable::new(&[1], with_j);
    table.set(
        &[1],
        1,
        if with_j {
            LogSigned::from_value(1.0)
        } else {
            LogSigned::from_value(-1.0)
        },
    );
    counter += 1;
    for _ in 1..sizes[0] {
        table = step_grow(&table, alpha0, alphas[0], &mut counter);
    }
    for (k, &dk) in sizes.iter().enumerate().skip(1) {
        table = step_open(&table, alpha0, &mut counter);
        for _ in 1..dk {
            table = step_grow(&table, alpha0, alphas[k], &mut counter);
        }
    }
    (table, counter)
}

fn check_shape(sizes: &[usize], alphas: &[f64], alpha0: f64) -> Result<()> {
    if sizes.is_empty() || sizes.iter().any(|&d| d == 0) {
        return Err(Error::contract("cluster sizes must be positive"));
    }
    if sizes.len() > alphas.len() {
        return Err(Error::contract("more clusters than parameters"));
    }
    if !(alpha0 > 0.0 && alpha0 <= 1.0)
        || alphas[..sizes.len()]
            .iter()
            .any(|&a| !(a > 0.0 && a <= 1.0))
    {
        return Err(Error::domain("dependence parameters outside (0,1]"));
    }
    Ok(())
}

/// Coefficients of the full-density expansion for the given cluster sizes.
#[derive(Debug, Clone)]
pub struct BetaTable {
    pub table: CoeffTable,
    computed: u64,
}

impl BetaTable {
    /// Number of coefficients computed during the recursion, across all
    /// growth phases.
    pub fn computed_count(&self) -> u64 {
        self.computed
    }

    /// Number of admissible entries stored in the final table.
    pub fn final_entry_count(&self) -> u64 {
        self.table
            .tuples()
            .iter()
            .map(|idx| idx.iter().sum::<usize>() as u64)
            .sum()
    }
}

pub fn build_beta_table(cluster_sizes: &[usize], params: &DependenceParams) -> Result<BetaTable> {
    check_shape(cluster_sizes, &params.alphas, params.alpha0)?;
    if cluster_sizes.len() != params.alphas.len() {
        return Err(Error::contract(
            "beta table needs one parameter per cluster",
        ));
    }
    let (table, computed) = build(cluster_sizes, &params.alphas, params.alpha0, true);
    Ok(BetaTable { table, computed })
}

/// Coefficients of the exponent-function derivative expansion.
#[derive(Debug, Clone)]
pub struct GammaTable {
    pub table: CoeffTable,
    computed: u64,
}

impl GammaTable {
    pub fn computed_count(&self) -> u64 {
        self.computed
    }
}

/// Gamma table over the first `cluster_subset_sizes.len()` clusters.
pub fn build_gamma_table(
    cluster_subset_sizes: &[usize],
    params: &DependenceParams,
) -> Result<GammaTable> {
    build_gamma_table_alphas(cluster_subset_sizes, &params.alphas, params.alpha0)
}

/// Gamma table with an explicit per-cluster parameter list, for derivative
/// subsets that do not start at the first cluster.
pub fn build_gamma_table_alphas(
    sizes: &[usize],
    alphas: &[f64],
    alpha0: f64,
) -> Result<GammaTable> {
    check_shape(sizes, alphas, alpha0)?;
    let (table, computed) = build(sizes, alphas, alpha0, false);
    Ok(GammaTable { table, computed })
}

/// Number of admissible (i_1..i_k; j) entries at a given shape: Σ over index
/// tuples of Σ i_k.
pub fn admissible_beta_entries(shape: &[usize]) -> u64 {
    index_tuples(shape)
        .iter()
        .map(|t| t.iter().sum::<usize>() as u64)
        .sum()
}
