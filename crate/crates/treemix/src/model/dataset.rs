use crate::error::{Error, Result};
use crate::model::tree::TwoLayerTree;

/// N x D matrix of strictly positive block maxima on the unit Frechet scale,
/// optionally with one occurrence partition per row (variables whose block
/// maxima occurred at the same time) and variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximaDataset {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    pub partitions: Option<Vec<TwoLayerTree>>,
    pub variable_names: Option<Vec<String>>,
}

impl MaximaDataset {
    pub fn new(values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows * cols != values.len() {
            return Err(Error::contract(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if cols == 0 || rows == 0 {
            return Err(Error::contract("empty dataset"));
        }
        for &v in &values {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("non-positive or non-finite value {v}")));
            }
        }
        Ok(MaximaDataset {
            values,
            rows,
            cols,
            partitions: None,
            variable_names: None,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::contract("ragged rows"));
        }
        MaximaDataset::new(rows.into_iter().flatten().collect(), n, d)
    }

    pub fn with_partitions(mut self, partitions: Vec<TwoLayerTree>) -> Result<Self> {
        if partitions.len() != self.rows {
            return Err(Error::contract("one partition per row required"));
        }
        if partitions.iter().any(|p| p.dim() != self.cols) {
            return Err(Error::contract("partition dimension mismatch"));
        }
        self.partitions = Some(partitions);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.cols)
    }

    /// Column `d` (0-based) as a fresh vector.
    pub fn column(&self, d: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i)[d]).collect()
    }
}
