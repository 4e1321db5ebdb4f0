//! Output envelopes and grid file formats.
//!
//! JSON reports are `{config, version, results}`. CSV tables start with a
//! `# config: <json>` comment and a `# version: <v>` comment. Grid dumps are
//! a 16-byte header (`UCGR`, `u8 d`, `u8 m`, ten zero bytes) followed by the
//! bitset as little-endian `u64` words; cell lists are CSV with one row per
//! set cell.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use ucover_core::GridCover;

use crate::{Error, Result};

pub const GRID_MAGIC: [u8; 4] = *b"UCGR";
pub const GRID_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, R> {
    pub config: C,
    pub version: String,
    pub results: R,
}

impl<C, R> Envelope<C, R> {
    pub fn new(config: C, results: R) -> Self {
        Self {
            config,
            version: crate::VERSION.to_string(),
            results,
        }
    }
}

/// The two comment lines that open every CSV table.
pub fn csv_preamble(config_json: &str) -> String {
    format!("# config: {config_json}\n# version: {}\n", crate::VERSION)
}

/// Splits a CSV document into its `# key: value` comments and the table.
pub fn split_comments(text: &str) -> (Vec<(&str, &str)>, &str) {
    let mut comments = Vec::new();
    let mut rest = text;
    while let Some(line) = rest.strip_prefix("# ") {
        let (head, tail) = line.split_once('\n').unwrap_or((line, ""));
        if let Some((k, v)) = head.split_once(": ") {
            comments.push((k, v));
        }
        rest = tail;
    }
    (comments, rest)
}

pub fn write_grid_dump<W: Write>(mut w: W, grid: &GridCover) -> Result<()> {
    let mut header = [0u8; GRID_HEADER_LEN];
    header[..4].copy_from_slice(&GRID_MAGIC);
    header[4] = grid.dim() as u8;
    header[5] = grid.bits() as u8;
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(grid.words().len() * 8);
    for word in grid.words() {
        buf.extend_from_slice(&word.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_grid_dump<R: Read>(mut r: R) -> Result<GridCover> {
    let mut header = [0u8; GRID_HEADER_LEN];
    r.read_exact(&mut header)?;
    if header[..4] != GRID_MAGIC {
        return Err(Error::Format("missing UCGR magic".into()));
    }
    let (d, m) = (header[4] as usize, header[5] as u32);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Format("grid body is not a whole number of words".into()));
    }
    let words = bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(GridCover::from_words(d, m, words)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct GridShape {
    d: usize,
    m: u32,
}

/// Rows `index, i1, …, id` for every set cell, after the preamble and a
/// `# grid: {"d":…,"m":…}` comment.
pub fn write_cell_csv<W: Write>(mut w: W, grid: &GridCover, config_json: &str) -> Result<()> {
    let shape = GridShape {
        d: grid.dim(),
        m: grid.bits(),
    };
    write!(w, "{}", csv_preamble(config_json))?;
    writeln!(w, "# grid: {}", serde_json::to_string(&shape)?)?;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["index".to_string()];
    header.extend((1..=grid.dim()).map(|k| format!("i{k}")));
    out.write_record(&header)?;
    let mut cell = vec![0u64; grid.dim()];
    for idx in grid.ones() {
        grid.coords_of(idx, &mut cell);
        let mut rec = vec![idx.to_string()];
        rec.extend(cell.iter().map(u64::to_string));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_cell_csv<R: BufRead>(mut r: R) -> Result<GridCover> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let (comments, body) = split_comments(&text);
    let shape: GridShape = comments
        .iter()
        .find(|(k, _)| *k == "grid")
        .map(|(_, v)| serde_json::from_str(v))
        .transpose()?
        .ok_or_else(|| Error::Format("missing `# grid:` comment".into()))?;
    let mut grid = GridCover::empty(shape.d, shape.m)?;
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    for rec in rd.records() {
        let rec = rec?;
        let idx: u64 = rec
            .get(0)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Format("bad cell index".into()))?;
        if idx >= grid.cell_count() {
            return Err(Error::Format(format!("cell {idx} outside the grid")));
        }
        grid.set(idx);
    }
    Ok(grid)
}
