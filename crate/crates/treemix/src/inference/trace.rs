//! Chain trace records and newline-delimited JSON persistence.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::params::DependenceParams;
use crate::model::tree::TwoLayerTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveType {
    Mh,
    Split,
    Merge,
    Swap,
}

impl fmt::Display for MoveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MoveType::Mh => "mh",
            MoveType::Split => "split",
            MoveType::Merge => "merge",
            MoveType::Swap => "swap",
        };
        write!(f, "{s}")
    }
}

/// One sampler iteration: the state after the iteration plus move metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRecord {
    pub iter: u64,
    pub tree: TwoLayerTree,
    pub params: DependenceParams,
    pub log_post: f64,
    pub move_type: MoveType,
    pub accepted: bool,
}

/// Run-level metadata written as the first line of a chain file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainHeader {
    pub seed: u64,
    #[serde(rename = "R")]
    pub iters: u64,
    pub burnin: u64,
    pub eta: f64,
    pub likelihood: String,
    #[serde(rename = "D")]
    pub dim: usize,
    pub names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    pub header: ChainHeader,
    pub records: Vec<ChainRecord>,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    iter: u64,
    tree: String,
    alpha0: f64,
    alphas: Vec<f64>,
    log_post: f64,
    #[serde(rename = "move")]
    move_type: MoveType,
    accepted: bool,
}

impl ChainTrace {
    pub fn new(header: ChainHeader, records: Vec<ChainRecord>) -> Result<Self> {
        let mut last = 0u64;
        for (i, r) in records.iter().enumerate() {
            if i > 0 && r.iter <= last {
                return Err(Error::contract("iterations must be strictly increasing"));
            }
            last = r.iter;
            r.params.check_tree(&r.tree)?;
            if r.tree.dim() != header.dim {
                return Err(Error::contract("record dimension differs from header"));
            }
        }
        Ok(ChainTrace { header, records })
    }

    pub fn write_ndjson<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::to_string(&self.header)
            .map_err(|e| Error::parse(format!("header: {e}")))?;
        writeln!(w, "{header}").map_err(Error::from)?;
        for r in &self.records {
            let line = RecordLine {
                iter: r.iter,
                tree: r.tree.to_string(),
                alpha0: r.params.alpha0,
                alphas: r.params.alphas.clone(),
                log_post: r.log_post,
                move_type: r.move_type,
                accepted: r.accepted,
            };
            let line =
                serde_json::to_string(&line).map_err(|e| Error::parse(format!("record: {e}")))?;
            writeln!(w, "{line}").map_err(Error::from)?;
        }
        Ok(())
    }

    pub fn read_ndjson<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::parse("empty chain file"))?
            .map_err(Error::from)?;
        let header: ChainHeader = serde_json::from_str(&header_line)
            .map_err(|e| Error::parse(format!("chain header: {e}")))?;
        let mut records = Vec::new();
        for line in lines {
            let line = line.map_err(Error::from)?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: RecordLine = serde_json::from_str(&line)
                .map_err(|e| Error::parse(format!("chain record: {e}")))?;
            records.push(ChainRecord {
                iter: rec.iter,
                tree: TwoLayerTree::from_str(&rec.tree)?,
                params: DependenceParams::new(rec.alpha0, rec.alphas)?,
                log_post: rec.log_post,
                move_type: rec.move_type,
                accepted: rec.accepted,
            });
        }
        ChainTrace::new(header, records)
    }

    pub fn to_ndjson_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_ndjson(&mut buf)?;
        Ok(String::from_utf8(buf).expect("json is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_trace() -> ChainTrace {
        let header = ChainHeader {
            seed: 42,
            iters: 2,
            burnin: 0,
            eta: 0.4,
            likelihood: "recursive".into(),
            dim: 3,
            names: Some(vec!["a".into(), "b".into(), "c".into()]),
        };
        let records = vec![
            ChainRecord {
                iter: 1,
                tree: "1,2|3".parse().unwrap(),
                params: DependenceParams::new(0.9, vec![0.5, 1.0]).unwrap(),
                log_post: -12.5,
                move_type: MoveType::Split,
                accepted: true,
            },
            ChainRecord {
                iter: 2,
                tree: "1,2|3".parse().unwrap(),
                params: DependenceParams::new(0.9, vec![0.45, 1.0]).unwrap(),
                log_post: -12.0,
                move_type: MoveType::Mh,
                accepted: false,
            },
        ];
        ChainTrace::new(header, records).unwrap()
    }

    #[test]
    fn ndjson_roundtrip() {
        let trace = sample_trace();
        let text = trace.to_ndjson_string().unwrap();
        let back = ChainTrace::read_ndjson(text.as_bytes()).unwrap();
        assert_eq!(trace, back);
    }

    #[test]
    fn header_only_roundtrip() {
        let mut trace = sample_trace();
        trace.records.clear();
        let text = trace.to_ndjson_string().unwrap();
        assert_eq!(text.lines().count(), 1);
        let back = ChainTrace::read_ndjson(text.as_bytes()).unwrap();
        assert_eq!(trace, back);
    }

    #[test]
    fn non_increasing_iterations_rejected() {
        let trace = sample_trace();
        let mut records = trace.records.clone();
        records[1].iter = 1;
        assert!(ChainTrace::new(trace.header, records).is_err());
    }

    #[test]
    fn move_names_in_json() {
        let text = sample_trace().to_ndjson_string().unwrap();
        assert!(text.contains("\"move\":\"split\""));
        assert!(text.contains("\"move\":\"mh\""));
        assert!(text.contains("\"tree\":\"1,2|3\""));
    }
}
