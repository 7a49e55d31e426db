//! Plot-ready files. Every file opens with `# key: value` metadata lines; each
//! file is assembled in memory and written once.

use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::Result;
use crate::fieldgrid::Grid;
use crate::spdc::BConvention;
use crate::tomo::{DensityMatrix, BASIS_LABELS};

pub const VERSION: &str = concat!("oamspdc ", env!("CARGO_PKG_VERSION"));

/// Ordered metadata shared by every file of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Meta(Vec<(String, String)>);

impl Meta {
    pub fn new(config_hash: &str, b_convention: BConvention, grid: &Grid) -> Self {
        Meta(vec![
            ("config_hash".into(), config_hash.into()),
            ("version".into(), VERSION.into()),
            ("b_convention".into(), b_convention.name().into()),
            ("grid_n".into(), grid.n().to_string()),
            ("grid_half_width_m".into(), grid.extent().to_string()),
            ("grid_spacing_m".into(), grid.spacing().to_string()),
        ])
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.0
    }

    fn header(&self) -> String {
        self.0.iter().map(|(k, v)| format!("# {k}: {v}\n")).collect()
    }

    fn map(&self) -> BTreeMap<String, String> {
        self.0.iter().cloned().collect()
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    v.to_string()
}

/// Table with a header row.
pub fn write_csv<I>(path: &Path, meta: &Meta, columns: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(meta.header().into_bytes());
    w.write_record(columns)?;
    for row in rows {
        w.write_record(&row)?;
    }
    finish(path, w)
}

/// Labeled matrix: `corner, col labels...` then `row label, values...` per row.
pub fn write_matrix_csv(
    path: &Path,
    meta: &Meta,
    corner: &str,
    row_labels: &[String],
    col_labels: &[String],
    values: &[f64],
) -> Result<()> {
    let cols = col_labels.len();
    let mut w = csv::Writer::from_writer(meta.header().into_bytes());
    w.write_record(std::iter::once(corner.to_string()).chain(col_labels.iter().cloned()))?;
    for (r, label) in row_labels.iter().enumerate() {
        let vals = values[r * cols..(r + 1) * cols].iter().map(|&v| num(v));
        w.write_record(std::iter::once(label.clone()).chain(vals))?;
    }
    finish(path, w)
}

/// Square image without labels; row k is `y_k`, column j is `x_j`.
pub fn write_image_csv(path: &Path, meta: &Meta, n: usize, values: &[f64]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(meta.header().into_bytes());
    for row in values.chunks(n) {
        w.write_record(row.iter().map(|&v| num(v)))?;
    }
    finish(path, w)
}

fn finish(path: &Path, w: csv::Writer<Vec<u8>>) -> Result<()> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    std::fs::write(path, bytes)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct DensityMatrixFile<'a> {
    meta: BTreeMap<String, String>,
    basis: [&'a str; 4],
    real: [[f64; 4]; 4],
    imag: [[f64; 4]; 4],
}

/// Density matrix as `{meta, basis, real, imag}`.
pub fn write_density_json(path: &Path, meta: &Meta, rho: &DensityMatrix) -> Result<()> {
    let file = DensityMatrixFile {
        meta: meta.map(),
        basis: BASIS_LABELS,
        real: rho.real_parts(),
        imag: rho.imag_parts(),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
