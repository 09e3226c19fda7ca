//! Sampled observables over revival fractions and their CSV form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Values of one observable on a time grid given in units of `T_rev`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    fractions: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    /// Panics if lengths differ; callers build both from the same grid.
    pub fn new(fractions: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Self {
        assert_eq!(fractions.len(), values.len(), "grid and values differ in length");
        Self {
            fractions,
            values,
            label: label.into(),
        }
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean grid spacing.
    pub fn step(&self) -> f64 {
        let n = self.fractions.len();
        if n < 2 {
            0.0
        } else {
            (self.fractions[n - 1] - self.fractions[0]) / (n - 1) as f64
        }
    }

    /// Writes `# comment` lines, the header `t_over_Trev,value`, then one
    /// row per sample with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        write_comments(&mut w, comments)?;
        writeln!(w, "t_over_Trev,value")?;
        for (t, v) in self.fractions.iter().zip(&self.values) {
            writeln!(w, "{t:.16e},{v:.16e}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_file(path, |w| self.write_csv(w, comments))
    }
}

pub(crate) fn write_comments<W: Write>(w: &mut W, comments: &[String]) -> std::io::Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    Ok(())
}

/// Creates `path` and hands a buffered writer to `body`, attaching the
/// path to any I/O error.
pub(crate) fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
