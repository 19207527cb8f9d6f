use std::fs::File;
use std::path::Path;

use anyhow::{Context, Result};
use qscalar::hardware::ReconstructionRow;

/// Seventeen significant digits, enough to round-trip through `str::parse::<f64>`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write_to<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        self.write_to(f)
    }
}

pub fn reconstruction_table(rows: &[ReconstructionRow]) -> Table {
    let mut t = Table::new(&["index", "ideal_amp", "sampled_amp", "lo_3sigma", "hi_3sigma"]);
    for r in rows {
        t.push(vec![
            r.index.to_string(),
            num(r.ideal_amp),
            num(r.sampled_amp),
            num(r.lo_3sigma),
            num(r.hi_3sigma),
        ]);
    }
    t
}
