//! Block-maxima extraction with occurrence partitions.

use crate::error::{Error, Result};
use crate::model::dataset::MaximaDataset;
use crate::model::tree::TwoLayerTree;

/// Block layout of a raw series: `block_size` consecutive observations per
/// block, `block_count` blocks, total length block_size * block_count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    pub block_size: usize,
    pub block_count: usize,
}

impl BlockSpec {
    pub fn new(block_size: usize, block_count: usize) -> Result<Self> {
        if block_size == 0 || block_count == 0 {
            return Err(Error::contract("block size and count must be positive"));
        }
        Ok(BlockSpec {
            block_size,
            block_count,
        })
    }

    pub fn total(&self) -> usize {
        self.block_size * self.block_count
    }
}

/// Componentwise maxima per block, together with the occurrence partition of
/// each block: components whose maxima occurred at the same within-block time
/// index share a group. Within a column, the first attaining index wins on
/// exact value ties.
pub fn block_maxima(raw: &MaximaDataset, spec: BlockSpec) -> Result<MaximaDataset> {
    if raw.rows() != spec.total() {
        return Err(Error::contract(format!(
            "{} raw rows do not form {} blocks of {}",
            raw.rows(),
            spec.block_count,
            spec.block_size
        )));
    }
    let d = raw.cols();
    let mut values = Vec::with_capacity(spec.block_count * d);
    let mut partitions = Vec::with_capacity(spec.block_count);
    for b in 0..spec.block_count {
        let mut maxima = vec![f64::NEG_INFINITY; d];
        let mut argmax = vec![0usize; d];
        for t in 0..spec.block_size {
            let row = raw.row(b * spec.block_size + t);
            for (dcol, &x) in row.iter().enumerate() {
                if x > maxima[dcol] {
                    maxima[dcol] = x;
                    argmax[dcol] = t;
                }
            }
        }
        values.extend_from_slice(&maxima);
        // group 1-based variables by argmax time
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for (dcol, &t) in argmax.iter().enumerate() {
            match groups.iter_mut().find(|(time, _)| *time == t) {
                Some((_, members)) => members.push(dcol + 1),
                None => groups.push((t, vec![dcol + 1])),
            }
        }
        partitions.push(TwoLayerTree::new(
            groups.into_iter().map(|(_, m)| m).collect(),
        )?);
    }
    let mut out = MaximaDataset::new(values, spec.block_count, d)?.with_partitions(partitions)?;
    out.variable_names = raw.variable_names.clone();
    Ok(out)
}
