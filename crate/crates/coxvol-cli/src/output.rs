//! CSV documents: `# key=value` metadata lines, then a header and rows.

use crate::CliError;

#[derive(Clone, Debug, Default)]
pub struct CsvDoc {
    pub meta: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(header: &[&'static str]) -> Self {
        Self { meta: Vec::new(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    /// The header is written even when there are no rows.
    pub fn render(&self) -> Result<String, CliError> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={}\n", v.replace(['\n', '\r'], " ")));
        }
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            debug_assert_eq!(r.len(), self.header.len());
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        out.push_str(std::str::from_utf8(&bytes).expect("csv output is UTF-8"));
        Ok(out)
    }
}

/// Shortest round-trip rendering; empty for NaN and infinities.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

/// Splits a rendered document into its metadata and a CSV reader over the
/// remaining lines.
pub fn parse_doc(text: &str) -> (Vec<(String, String)>, csv::Reader<&[u8]>) {
    let mut meta = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.strip_prefix("# ") else { break };
        if let Some((k, v)) = rest.trim_end().split_once('=') {
            meta.push((k.to_string(), v.to_string()));
        }
        offset += line.len();
    }
    (meta, csv::Reader::from_reader(text[offset..].as_bytes()))
}
