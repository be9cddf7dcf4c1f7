//! Artifact emission: CSV tables and JSON summaries, byte-stable for a
//! fixed (config, version) pair. UTF-8, LF line endings, mandatory header
//! row; floats use the shortest round-trip form, exact rationals print as
//! `numer/denom` strings.

use crate::error::Result;
use num_rational::BigRational;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Column order of per-sample counting runs.
pub const COUNTING_CSV_HEADER: &str = "h,sample_index,N,Psi,ratio";

/// Column order of tail-union runs.
pub const TAIL_CSV_HEADER: &str = "l,K,measure,upper_bound,arcs";

/// Column order of t-sequence runs.
pub const T_SEQUENCE_CSV_HEADER: &str = "n,t_n";

pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut out = Vec::with_capacity(rows.len() * 32 + header.len() + 1);
    out.extend_from_slice(header.as_bytes());
    out.push(b'\n');
    for row in rows {
        out.extend_from_slice(row.as_bytes());
        out.push(b'\n');
    }
    fs::File::create(path)?.write_all(&out)?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable summary");
    bytes.push(b'\n');
    fs::File::create(path)?.write_all(&bytes)?;
    Ok(path.to_path_buf())
}

/// Shortest round-trip decimal for a float (stable across platforms).
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Exact rational as `numer/denom` (or the integer when the denominator
/// is 1).
pub fn fmt_rational(x: &BigRational) -> String {
    x.to_string()
}
