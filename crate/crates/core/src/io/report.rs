//! CSV reports: `#`-prefixed configuration lines, a header row, LF endings.

use std::path::Path;

use crate::asgeirsson::{PairRow, TheoremReport};
use crate::error::Result;
use crate::residuals::ResidualReport;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    /// Emitted as `# line` before the header.
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    pub fn extend(&mut self, other: CsvTable) {
        debug_assert_eq!(self.header, other.header);
        self.rows.extend(other.rows);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for c in &self.comments {
            out.extend_from_slice(format!("# {c}\n").as_bytes());
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

pub fn write_csv_report(table: &CsvTable, path: &Path) -> Result<()> {
    super::write_atomic(path, &table.to_bytes()?)
}

pub fn residual_table(reports: &[ResidualReport]) -> CsvTable {
    let mut t = CsvTable::new(&["which", "h", "n", "max_abs", "mean_abs", "rms"]);
    for r in reports {
        t.rows.push(vec![
            r.operator.to_string(),
            r.h.to_string(),
            r.sample_count.to_string(),
            r.max_abs.to_string(),
            r.mean_abs.to_string(),
            r.rms.to_string(),
        ]);
    }
    t
}

pub fn pair_table(rows: &[PairRow]) -> CsvTable {
    let mut t = CsvTable::new(&["R1", "R2", "sum_ab", "sum_ba", "abs_diff", "rel_diff", "fully_valid"]);
    for r in rows {
        t.rows.push(vec![
            r.r1.to_string(),
            r.r2.to_string(),
            r.sum_ab.to_string(),
            r.sum_ba.to_string(),
            r.abs_diff.to_string(),
            r.rel_diff.to_string(),
            r.fully_valid.to_string(),
        ]);
    }
    t
}

pub fn theorem_table(reports: &[TheoremReport]) -> CsvTable {
    let mut t = CsvTable::new(&[
        "theorem", "xi1", "xi2", "xi3", "xi4", "R1", "R2", "n", "lhs", "rhs", "abs_diff", "rel_diff",
    ]);
    for r in reports {
        let c = &r.config;
        let mut row = vec![c.theorem.name().to_string()];
        row.extend(c.center.to_array().iter().map(f64::to_string));
        row.extend([
            c.r1.to_string(),
            c.r2.to_string(),
            c.n.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.abs_diff.to_string(),
            r.rel_diff.to_string(),
        ]);
        t.rows.push(row);
    }
    t
}
