//! Deterministic CSV output with a metadata sidecar.

use crate::error::Result;
use std::io::Write;
use std::path::Path;

/// A CSV table in memory: header, rows, and key-value metadata written to a
/// sidecar. Identical config and seed produce byte-identical files.
#[derive(Clone, Debug, Default)]
pub struct CsvTable {
    pub name: String,
    pub header: String,
    pub rows: Vec<String>,
    pub meta: Vec<(String, String)>,
}

impl CsvTable {
    pub fn new(name: &str, header: &str) -> CsvTable {
        CsvTable { name: name.into(), header: header.into(), ..Default::default() }
    }

    pub fn push_row(&mut self, row: String) {
        self.rows.push(row);
    }

    pub fn push_meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.meta.push((key.into(), value.to_string()));
    }

    /// Writes `<dir>/<name>.csv` and `<dir>/<name>.meta.txt`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(dir.join(format!("{}.csv", self.name)))?;
        writeln!(f, "{}", self.header)?;
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        let mut m = std::fs::File::create(dir.join(format!("{}.meta.txt", self.name)))?;
        for (k, v) in &self.meta {
            writeln!(m, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_csv_and_sidecar() {
        let dir = std::env::temp_dir().join("linesource_csv_test");
        let _ = std::fs::remove_dir_all(&dir);
        let mut t = CsvTable::new("probe", "a,b");
        t.push_row("1,2".into());
        t.push_meta("config", "deadbeef");
        t.write(&dir).unwrap();
        let text = std::fs::read_to_string(dir.join("probe.csv")).unwrap();
        assert_eq!(text, "a,b\n1,2\n");
        let meta = std::fs::read_to_string(dir.join("probe.meta.txt")).unwrap();
        assert!(meta.contains("config = deadbeef"));
        let _ = std::fs::remove_dir_all(&dir);
    }
}
