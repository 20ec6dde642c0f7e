//! Deterministic CSV emission: a `# schema:` comment line followed by data
//! rows. Floats are written in fixed scientific form so identical runs are
//! byte-identical.

use std::io::Write;
use std::path::Path;

pub fn fmt_f(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else if v.is_infinite() && v > 0.0 {
        "inf".into()
    } else if v.is_infinite() {
        "-inf".into()
    } else {
        "nan".into()
    }
}

pub struct CsvFile {
    schema: String,
    rows: Vec<String>,
}

impl CsvFile {
    pub fn new(schema: &str) -> Self {
        CsvFile {
            schema: schema.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        self.rows
            .push(cells.into_iter().collect::<Vec<_>>().join(","));
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 32 + 64);
        out.push_str("# schema: ");
        out.push_str(&self.schema);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.render().as_bytes())
    }
}
