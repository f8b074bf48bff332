//! Figure-ready text dumps of codebooks and partitions.
//!
//! Codebook files have the header `tuple,center,value`, one row per
//! (received tuple, local grid center). Partition files have the header
//! `center,index,bits`, one row per grid center.

use std::path::Path;

use twcq::{IndexTuple, Partition, Terminal, TrainedSystem};

use crate::error::{csv_err, io_err, CliError};

pub fn dump_codebook(system: &TrainedSystem, terminal: Terminal, path: &Path) -> Result<(), CliError> {
    let cb = system.codebook(terminal);
    let centers = system.source.centers();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["tuple", "center", "value"]).map_err(csv_err(path))?;
    for y in 0..cb.tuples() {
        for (cell, &u) in centers.iter().enumerate() {
            w.write_record([y.to_string(), u.to_string(), cb.value(y, cell).to_string()])
                .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn dump_partition(system: &TrainedSystem, terminal: Terminal, path: &Path) -> Result<(), CliError> {
    let p = system.partition(terminal);
    let centers = system.source.centers();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["center", "index", "bits"]).map_err(csv_err(path))?;
    for (cell, &u) in centers.iter().enumerate() {
        let t = p.encode(cell)?;
        w.write_record([u.to_string(), t.index().to_string(), t.bit_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Parses a partition dump back into the partition it was written from.
pub fn read_partition(path: &Path) -> Result<Partition, CliError> {
    let bad = |message: String| CliError::Dump {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?;
    if header != vec!["center", "index", "bits"] {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut len = None;
    let mut cells = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let index: usize = rec[1]
            .parse()
            .map_err(|e| bad(format!("row {}: index: {e}", line + 1)))?;
        let bits = &rec[2];
        let symbols: Vec<u8> = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(bad(format!("row {}: bits `{bits}`", line + 1))),
            })
            .collect::<Result<_, _>>()?;
        let tuple = IndexTuple::from_symbols(&symbols)?;
        if tuple.index() != index {
            return Err(bad(format!("row {}: index {index} disagrees with bits {bits}", line + 1)));
        }
        if *len.get_or_insert(tuple.len()) != tuple.len() {
            return Err(bad(format!("row {}: tuple length changes", line + 1)));
        }
        cells.push(index);
    }
    let len = len.ok_or_else(|| bad("no rows".into()))?;
    Ok(Partition::new(len, cells)?)
}
