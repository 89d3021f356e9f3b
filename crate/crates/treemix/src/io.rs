//! CSV persistence for block-maxima datasets.
//!
//! Layout: one header row of variable names, one data row per block maximum.
//! An optional trailing `partition` column carries the occurrence partition
//! of each row in tree text format ("1,2|3,4"). Numbers are written in the
//! shortest form that parses back to the identical f64, so files round-trip
//! exactly.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::dataset::MaximaDataset;
use crate::model::tree::TwoLayerTree;

const PARTITION_COLUMN: &str = "partition";

/// Default variable names V1..VD used when a dataset carries none.
pub fn default_names(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("V{i}")).collect()
}

/// Writes a dataset as CSV. The header holds the variable names (V1..VD when
/// the dataset has none) plus a `partition` column when partitions exist.
pub fn write_csv<W: Write>(data: &MaximaDataset, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let names = data
        .variable_names
        .clone()
        .unwrap_or_else(|| default_names(data.cols()));
    if names.len() != data.cols() {
        return Err(Error::contract("one variable name per column required"));
    }
    let mut header = names;
    if data.partitions.is_some() {
        header.push(PARTITION_COLUMN.into());
    }
    wtr.write_record(&header).map_err(csv_err)?;
    for (i, row) in data.iter_rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        if let Some(parts) = &data.partitions {
            rec.push(parts[i].to_string());
        }
        wtr.write_record(&rec).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a dataset written by [`write_csv`]. A trailing `partition` header
/// column is parsed into per-row occurrence partitions.
pub fn read_csv<R: Read>(r: R) -> Result<MaximaDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() {
        return Err(Error::contract("empty CSV header"));
    }
    let has_partitions = header.last().map(String::as_str) == Some(PARTITION_COLUMN);
    let d = header.len() - usize::from(has_partitions);
    if d == 0 {
        return Err(Error::contract("no value columns in CSV"));
    }
    let names = header[..d].to_vec();
    let mut values = Vec::new();
    let mut partitions = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != header.len() {
            return Err(Error::parse(format!(
                "row {}: {} fields, expected {}",
                line + 1,
                rec.len(),
                header.len()
            )));
        }
        for field in rec.iter().take(d) {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(format!("row {}: bad number {field:?}", line + 1)))?;
            values.push(v);
        }
        if has_partitions {
            let tree: TwoLayerTree = rec[d]
                .parse()
                .map_err(|e| Error::parse(format!("row {}: {e}", line + 1)))?;
            if tree.dim() != d {
                return Err(Error::parse(format!(
                    "row {}: partition over {} variables in a {d}-column file",
                    line + 1,
                    tree.dim()
                )));
            }
            partitions.push(tree);
        }
    }
    let rows = values.len() / d;
    let mut out = MaximaDataset::new(values, rows, d)?;
    if has_partitions {
        out = out.with_partitions(partitions)?;
    }
    out.variable_names = Some(names);
    Ok(out)
}

/// Reads a dataset from a CSV file on disk.
pub fn read_csv_path(path: &Path) -> Result<MaximaDataset> {
    let f = std::fs::File::open(path)
        .map_err(|e| Error::contract(format!("{}: {e}", path.display())))?;
    read_csv(std::io::BufReader::new(f))
}

/// Writes a dataset to a CSV file on disk.
pub fn write_csv_path(data: &MaximaDataset, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)
        .map_err(|e| Error::contract(format!("{}: {e}", path.display())))?;
    write_csv(data, std::io::BufWriter::new(f))
}

fn csv_err(e: csv::Error) -> Error {
    Error::parse(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_values_exactly() {
        let mut ds = MaximaDataset::from_rows(vec![
            vec![0.1 + 0.2, 1.0 / 3.0],
            vec![f64::MIN_POSITIVE, 1e300],
        ])
        .unwrap();
        ds.variable_names = Some(vec!["a".into(), "b".into()]);
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn round_trips_partitions() {
        let ds = MaximaDataset::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]])
            .unwrap()
            .with_partitions(vec!["1,2|3".parse().unwrap(), "1|2|3".parse().unwrap()])
            .unwrap();
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("V1,V2,V3,partition\n"), "{text}");
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.partitions, ds.partitions);
        assert_eq!(back.row(1), ds.row(1));
    }

    #[test]
    fn default_header_when_unnamed() {
        let ds = MaximaDataset::from_rows(vec![vec![1.0, 2.0]]).unwrap();
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("V1,V2\n"));
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(read_csv("a,b\n1.0,x\n".as_bytes()).is_err());
        assert!(read_csv("a,b,partition\n1.0,2.0,1,2,3\n".as_bytes()).is_err());
        assert!(read_csv("a,b,partition\n1.0,2.0,1\n".as_bytes()).is_err());
        assert!(read_csv("a,b\n1.0,-2.0\n".as_bytes()).is_err());
    }
}
