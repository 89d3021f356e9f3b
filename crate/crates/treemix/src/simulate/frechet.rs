//! Empirical rank transform to the unit Frechet scale.

use crate::error::{Error, Result};
use crate::model::dataset::MaximaDataset;

/// Rank transform of one margin: average ranks r (ties averaged), u = r/(N+1),
/// then u -> -1/log u. Strictly monotone in the input values.
pub fn to_unit_frechet(column: &[f64]) -> Result<Vec<f64>> {
    let n = column.len();
    if n < 2 {
        return Err(Error::contract("at least two observations required"));
    }
    if column.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite value in margin"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].partial_cmp(&column[b]).unwrap());
    if column[order[0]] == column[order[n - 1]] {
        return Err(Error::contract("constant margin cannot be rank-transformed"));
    }
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && column[order[j + 1]] == column[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j+1, averaged over the tie group
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    Ok(ranks
        .iter()
        .map(|r| -1.0 / (r / (n as f64 + 1.0)).ln())
        .collect())
}

/// Applies the rank transform to every column of a dataset, preserving
/// partitions and names.
pub fn frechet_transform(data: &MaximaDataset) -> Result<MaximaDataset> {
    let cols: Vec<Vec<f64>> = (0..data.cols())
        .map(|d| to_unit_frechet(&data.column(d)))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(data.rows() * data.cols());
    for i in 0..data.rows() {
        for col in &cols {
            values.push(col[i]);
        }
    }
    let mut out = MaximaDataset::new(values, data.rows(), data.cols())?;
    out.partitions = data.partitions.clone();
    out.variable_names = data.variable_names.clone();
    Ok(out)
}
