//! Binary field format and key=value sidecars.
//!
//! Layout (all multi-byte values little-endian):
//!
//! | offset | size | content                                        |
//! |--------|------|------------------------------------------------|
//! | 0      | 6    | magic `CRIDE1` (ASCII)                         |
//! | 6      | 4    | `n`, points per axis, `u32`                    |
//! | 10     | 1    | rank: `1` scalar, `3` vector                   |
//! | 11     | 8    | dealias fraction, `f64`                        |
//! | 19     | 1    | zero-mean flag: `0` or `1`                     |
//! | 20     | …    | coefficients as `(re, im)` `f64` pairs         |
//!
//! Coefficients are written component by component; within a component the
//! order is row-major over the array index `(i1, i2, i3)`, `i3` fastest,
//! where index `i` carries wavenumber `i` for `i < n/2` and `i - n`
//! otherwise. The payload is `rank * n³ * 16` bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{GridSpec, Rank, SpectralField};
use crate::{Error, Result};

pub const MAGIC: &[u8; 6] = b"CRIDE1";
pub const HEADER_LEN: usize = 20;

pub fn encode_field(field: &SpectralField) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + field.components() * grid.len() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    out.push(field.components() as u8);
    out.extend_from_slice(&grid.dealias_fraction().to_le_bytes());
    out.push(u8::from(field.is_zero_mean()));
    for comp in field.coeffs() {
        for z in comp {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode_field(bytes: &[u8]) -> Result<SpectralField> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..6] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let n = u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize;
    let rank = Rank::from_components(bytes[10] as usize)
        .ok_or_else(|| Error::Format(format!("rank byte {} is not 1 or 3", bytes[10])))?;
    let fraction = f64_at(bytes, 11);
    let zero_mean = match bytes[19] {
        0 => false,
        1 => true,
        b => return Err(Error::Format(format!("zero-mean flag byte {b}"))),
    };
    let grid = GridSpec::new(n, fraction)?;
    let expected = HEADER_LEN + rank.components() * grid.len() * 16;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes for n = {n}, rank {}, got {}",
            rank.components(),
            bytes.len()
        )));
    }
    let mut at = HEADER_LEN;
    let mut coeffs = Vec::with_capacity(rank.components());
    for _ in 0..rank.components() {
        let mut comp = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            comp.push(Complex64::new(f64_at(bytes, at), f64_at(bytes, at + 8)));
            at += 16;
        }
        coeffs.push(comp);
    }
    let field = SpectralField::from_coeffs(grid, rank, coeffs)?;
    if zero_mean {
        field.require_zero_mean(0.0)
    } else {
        Ok(field)
    }
}

pub fn write_field(path: impl AsRef<Path>, field: &SpectralField) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode_field(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SpectralField> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_field(&bytes)
}

/// Writes `key=value` lines in the given order.
pub fn write_sidecar(path: impl AsRef<Path>, entries: &[(&str, String)]) -> Result<()> {
    let mut text = String::new();
    for (k, v) in entries {
        text.push_str(k);
        text.push('=');
        text.push_str(v);
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("line {}: expected key=value", lineno + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_sidecar(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    parse_key_values(&fs::read_to_string(path)?)
}
