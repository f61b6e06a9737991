//! CSV assembly with reproducible numeric formatting.

/// 17 significant digits: round-trip exact for doubles.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvTable {
    lines: Vec<String>,
}

impl CsvTable {
    pub fn new(config_hash: &str, columns: &[&str]) -> Self {
        CsvTable {
            lines: vec![format!("# config-sha256: {config_hash}"), columns.join(",")],
        }
    }

    pub fn push_row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn finish(self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}
