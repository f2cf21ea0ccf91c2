//! Labeled-table serialization shared by the exporters.
//!
//! All exports are comma-separated with a header row, UTF-8, '.' decimal
//! separator, and deterministic row/column order (registry order). Floats are
//! written with Rust's shortest round-trip formatting so re-parsing an export
//! reproduces every value bit-exactly.

use std::fmt::Write as _;

/// Writes a labeled matrix: one header row of column labels after the corner
/// label, then one row per entry of `row_labels`.
pub fn labeled_matrix(
    corner: &str,
    row_labels: &[String],
    col_labels: &[String],
    value: impl Fn(usize, usize) -> String,
) -> String {
    let mut out = String::new();
    out.push_str(corner);
    for c in col_labels {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, r) in row_labels.iter().enumerate() {
        out.push_str(r);
        for j in 0..col_labels.len() {
            out.push(',');
            out.push_str(&value(i, j));
        }
        out.push('\n');
    }
    out
}

pub fn fmt_f64(v: f64) -> String {
    let mut s = String::new();
    write!(s, "{v}").unwrap();
    s
}

/// Format an optional value; missing cells are written as empty fields.
pub fn fmt_opt_f64(v: Option<f64>) -> String {
    match v {
        Some(v) => fmt_f64(v),
        None => String::new(),
    }
}
