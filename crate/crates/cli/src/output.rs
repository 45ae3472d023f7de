//! CSV tables: 17 significant digits, LF line endings, written atomically.

use rte_core::analysis::{BoundReport, SharpnessRecord};
use std::io;
use std::path::Path;

pub const BOUNDS_HEADER: [&str; 8] = ["scenario", "name", "p", "lhs", "rhs", "constant", "delta", "holds"];
pub const HISTORY_HEADER: [&str; 4] = ["scenario", "step", "residual", "factor"];
pub const SHARPNESS_HEADER: [&str; 7] = ["l", "k", "a", "log_b", "log_lhs", "log_rhs", "gap"];
pub const VALIDATION_HEADER: [&str; 11] = [
    "scenario",
    "p",
    "samples",
    "min_sigma",
    "sup_sigma_ell",
    "sup_sigma_s_ell",
    "sup_sigma_s_prime_ell",
    "c_p",
    "escape_probability",
    "nu",
    "violations",
];

/// `x` with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn bound_row(r: &BoundReport) -> Vec<String> {
    vec![
        r.scenario.clone(),
        r.name.clone(),
        r.p.to_string(),
        num(r.lhs),
        num(r.rhs),
        num(r.constant),
        num(r.delta),
        r.holds.to_string(),
    ]
}

pub fn sharpness_row(r: &SharpnessRecord) -> Vec<String> {
    vec![
        r.l.to_string(),
        num(r.k),
        num(r.a),
        num(r.log_b),
        num(r.log_lhs),
        num(r.log_rhs),
        num(r.gap),
    ]
}

/// Writes `header` and `rows` to `path` through a temporary sibling file.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&tmp)
            .map_err(io::Error::other)?;
        w.write_record(header).map_err(io::Error::other)?;
        for row in rows {
            w.write_record(row).map_err(io::Error::other)?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)
}
