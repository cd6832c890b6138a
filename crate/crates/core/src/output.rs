//! Deterministic file output: full-precision CSV matrices, plain PGM
//! heatmaps, and pretty-printed JSON reports.
//!
//! All numeric text is locale-independent. CSV cells carry 17 significant
//! digits (`%.16e`), enough to round-trip any f64. Files are written
//! atomically (temp file in the target directory, then rename) so readers
//! never observe a partial result.

use std::io::Write;
use std::path::Path;

use crate::grid::UniformGrid;

/// 17-significant-digit scientific notation; round-trips f64 exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `bytes` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            tempfile::NamedTempFile::new_in(d)?
        }
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// CSV of a matrix with axis headers: the corner cell names the axes, the
/// first row carries the column coordinates, each data row starts with its
/// row coordinate.
pub fn matrix_csv(
    corner: &str,
    row_grid: &UniformGrid,
    col_grid: &UniformGrid,
    value: impl Fn(usize, usize) -> f64,
) -> String {
    let mut out = String::new();
    out.push_str(corner);
    for j in 0..col_grid.len() {
        out.push(',');
        out.push_str(&format_f64(col_grid.point(j)));
    }
    out.push('\n');
    for i in 0..row_grid.len() {
        out.push_str(&format_f64(row_grid.point(i)));
        for j in 0..col_grid.len() {
            out.push(',');
            out.push_str(&format_f64(value(i, j)));
        }
        out.push('\n');
    }
    out
}

/// Plain (P2) 8-bit portable graymap, linear scale, max-normalized.
/// Negative values clamp to 0. Row `i` of the matrix is image row `i`.
pub fn pgm_from_matrix(rows: usize, cols: usize, value: impl Fn(usize, usize) -> f64) -> String {
    let mut max = 0.0f64;
    for i in 0..rows {
        for j in 0..cols {
            max = max.max(value(i, j));
        }
    }
    let mut out = format!("P2\n{cols} {rows}\n255\n");
    for i in 0..rows {
        for j in 0..cols {
            let level = if max > 0.0 {
                ((value(i, j).max(0.0) / max) * 255.0).round() as u32
            } else {
                0
            };
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&level.min(255).to_string());
        }
        out.push('\n');
    }
    out
}

/// Pretty JSON document with a trailing newline.
pub fn json_document<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}
