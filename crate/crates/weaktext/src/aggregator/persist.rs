//! Trained-model serialization.
//!
//! The on-disk form is versioned UTF-8 text:
//!
//! ```text
//! weaktext-model v1
//! <id> <CLASS> <quality>            (one line per labeling function)
//! ...
//! <theta_text> <theta_nontext>      (one line per labeling function)
//! ...
//! ```
//!
//! Parameter values are hexadecimal float literals (`0x1.921fb54442d18p+1`),
//! which carry the full 53-bit significand, so a save/load round trip
//! reproduces every bit without decimal rounding subtleties.

use super::{LfEntry, ThetaParams};
use crate::error::{Error, Result};
use crate::io::atomic_write;
use crate::labeling::LFClass;
use std::path::Path;

const HEADER: &str = "weaktext-model v1";

/// Formats a finite value as a hexadecimal float literal. Normal values
/// print as `0x1.<13 hex digits>p<exp>`, subnormals keep the leading zero
/// (`0x0.0000000000001p-1022`), and zero keeps its sign.
fn format_hex_f64(x: f64) -> String {
    debug_assert!(x.is_finite(), "non-finite parameters are never saved");
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        if mantissa == 0 {
            return format!("{sign}0x0p+0");
        }
        return format!("{sign}0x0.{mantissa:013x}p-1022");
    }
    format!("{sign}0x1.{mantissa:013x}p{:+}", exp_bits - 1023)
}

/// Parses a hexadecimal float literal. Accepts any finite value whose
/// significand fits in 53 bits (everything [`format_hex_f64`] emits, plus
/// trimmed forms like `0x1.8p+1`); values that would need rounding are
/// rejected rather than approximated.
fn parse_hex_f64(text: &str) -> Option<f64> {
    let (negative, rest) = match text.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let rest = rest
        .strip_prefix("0x")
        .or_else(|| rest.strip_prefix("0X"))?;
    let (mant_text, exp_text) = rest.split_once(['p', 'P'])?;
    let exp: i64 = exp_text.parse().ok()?;
    let (int_text, frac_text) = match mant_text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant_text, ""),
    };
    if int_text.is_empty() && frac_text.is_empty() {
        return None;
    }

    let mut mant: u128 = 0;
    for c in int_text.chars().chain(frac_text.chars()) {
        let digit = c.to_digit(16)? as u128;
        mant = mant.checked_mul(16)?.checked_add(digit)?;
    }
    let mut scale = exp.checked_sub(4 * frac_text.len() as i64)?;
    if mant == 0 {
        return Some(if negative { -0.0 } else { 0.0 });
    }
    while mant & 1 == 0 {
        mant >>= 1;
        scale += 1;
    }
    if mant >> 53 != 0 || !(-1200..=1200).contains(&scale) {
        return None;
    }

    // Two half-steps keep every intermediate power of two in normal range;
    // only the final multiply may underflow, and then it rounds correctly.
    let half = (scale / 2) as i32;
    let value = mant as f64 * 2f64.powi(half) * 2f64.powi(scale as i32 - half);
    if value.is_infinite() {
        return None;
    }
    Some(if negative { -value } else { value })
}

/// Writes the registry and parameters to `path` atomically.
pub fn save_model(path: &Path, params: &ThetaParams) -> Result<()> {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for e in params.entries() {
        out.push_str(&format!("{} {} {}\n", e.id, e.class.name(), e.quality));
    }
    for row in params.theta() {
        out.push_str(&format!(
            "{} {}\n",
            format_hex_f64(row[0]),
            format_hex_f64(row[1])
        ));
    }
    atomic_write(path, out.as_bytes())
}

fn bad(path: &Path, reason: impl Into<String>) -> Error {
    Error::ModelFormat {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Reads a model written by [`save_model`], validating the version line
/// and every field.
pub fn load_model(path: &Path) -> Result<ThetaParams> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some(HEADER) => {}
        Some(other) => {
            return Err(bad(
                path,
                format!("unsupported header {other:?}, expected {HEADER:?}"),
            ))
        }
        None => return Err(bad(path, "empty file")),
    }

    let rest: Vec<&str> = lines.collect();
    if rest.is_empty() || rest.len() % 2 != 0 {
        return Err(bad(
            path,
            format!(
                "expected one registry line plus one parameter line per \
                 labeling function, found {} lines after the header",
                rest.len()
            ),
        ));
    }
    let n = rest.len() / 2;

    let mut entries = Vec::with_capacity(n);
    for line in &rest[..n] {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad(
                path,
                format!("registry line {line:?} must have id, class, and quality"),
            ));
        }
        let class = LFClass::from_name(fields[1])
            .ok_or_else(|| bad(path, format!("unknown class {:?}", fields[1])))?;
        let quality: f64 = fields[2]
            .parse()
            .map_err(|_| bad(path, format!("unreadable quality {:?}", fields[2])))?;
        entries.push(LfEntry {
            id: fields[0].to_string(),
            class,
            quality,
        });
    }

    let mut theta = Vec::with_capacity(n);
    for line in &rest[n..] {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(bad(
                path,
                format!("parameter line {line:?} must have exactly two values"),
            ));
        }
        let mut row = [0.0f64; 2];
        for (slot, field) in row.iter_mut().zip(&fields) {
            *slot = parse_hex_f64(field)
                .ok_or_else(|| bad(path, format!("unreadable parameter {field:?}")))?;
        }
        theta.push(row);
    }

    ThetaParams::from_parts(entries, theta)
        .map_err(|e| bad(path, format!("inconsistent model: {e}")))
}
