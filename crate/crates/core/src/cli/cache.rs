//! Binary table cache.
//!
//! Layout: 8-byte magic `BATMANv1`, 1-byte kind (1 = traces, 2 = Hurwitz),
//! `u64` LE parameter (`p` or `d_max`), the records as `i64` LE, then a
//! CRC-32 (IEEE) LE of everything before it.

use std::fs;
use std::path::{Path, PathBuf};

use crate::clausen::TraceTable;
use crate::error::{Error, Result};
use crate::field::FieldContext;
use crate::hurwitz::HurwitzTable;

pub const MAGIC: &[u8; 8] = b"BATMANv1";
const MAGIC_STEM: &[u8; 7] = b"BATMANv";
const HEADER_LEN: usize = 8 + 1 + 8;
const CRC_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum TableKind {
    Traces = 1,
    Hurwitz = 2,
}

impl TableKind {
    fn record_count(self, param: u64) -> Result<usize> {
        let n = match self {
            TableKind::Traces if param >= 5 => param - 2,
            TableKind::Traces => return Err(Error::Cache(format!("trace table for p = {param}"))),
            TableKind::Hurwitz => param
                .checked_add(1)
                .ok_or_else(|| Error::Cache("d_max overflows".into()))?,
        };
        usize::try_from(n).map_err(|_| Error::Cache(format!("record count {n} too large")))
    }
}

/// Header fields of a cache file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheHeader {
    pub kind: TableKind,
    pub param: u64,
}

pub fn encode(kind: TableKind, param: u64, records: &[i64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * records.len() + CRC_LEN);
    out.extend_from_slice(MAGIC);
    out.push(kind as u8);
    out.extend_from_slice(&param.to_le_bytes());
    for r in records {
        out.extend_from_slice(&r.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn decode(bytes: &[u8], kind: TableKind) -> Result<(CacheHeader, Vec<i64>)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Cache(format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Cache(if &bytes[..7] == MAGIC_STEM {
            format!("unsupported version {:?}", String::from_utf8_lossy(&bytes[..8]))
        } else {
            "bad magic".into()
        }));
    }
    if bytes[8] != kind as u8 {
        return Err(Error::Cache(format!("kind {} where {} expected", bytes[8], kind as u8)));
    }
    let param = u64::from_le_bytes(bytes[9..17].try_into().expect("8 bytes"));
    let count = kind.record_count(param)?;
    let expected = count
        .checked_mul(8)
        .and_then(|n| n.checked_add(HEADER_LEN + CRC_LEN))
        .ok_or_else(|| Error::Cache("payload length overflows".into()))?;
    if bytes.len() != expected {
        return Err(Error::Cache(format!(
            "payload length mismatch: {} bytes, {expected} expected",
            bytes.len()
        )));
    }
    let (body, crc) = bytes.split_at(expected - CRC_LEN);
    if crc32fast::hash(body) != u32::from_le_bytes(crc.try_into().expect("4 bytes")) {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    let records = body[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| i64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((CacheHeader { kind, param }, records))
}

pub fn save_traces(path: &Path, table: &TraceTable) -> Result<()> {
    fs::write(path, encode(TableKind::Traces, table.p(), table.traces()))?;
    Ok(())
}

pub fn load_traces(path: &Path) -> Result<TraceTable> {
    let (header, traces) = decode(&fs::read(path)?, TableKind::Traces)?;
    let ctx = FieldContext::new(header.param)?;
    TraceTable::from_traces(&ctx, traces)
}

pub fn save_hurwitz(path: &Path, table: &HurwitzTable) -> Result<()> {
    fs::write(path, encode(TableKind::Hurwitz, table.d_max(), table.twelve_h()))?;
    Ok(())
}

pub fn load_hurwitz(path: &Path) -> Result<HurwitzTable> {
    let (_, values) = decode(&fs::read(path)?, TableKind::Hurwitz)?;
    Ok(HurwitzTable::from_twelve_h(values))
}

pub fn trace_path(dir: &Path, p: u64) -> PathBuf {
    dir.join(format!("traces_p{p}.bin"))
}

pub fn hurwitz_path(dir: &Path, d_max: u64) -> PathBuf {
    dir.join(format!("hurwitz_d{d_max}.bin"))
}
