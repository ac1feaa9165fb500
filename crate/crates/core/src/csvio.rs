//! Small CSV layer shared by every file format of the crate.
//!
//! Files are plain comma separated tables with a header row. Metadata lives
//! in leading comment lines that start with `#` and hold `key=value` pairs.
//! Floats are written with 17 significant digits so that a write/read cycle
//! is exact.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// A parsed table: metadata from `#` lines, header names and numeric rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub meta: BTreeMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            meta: BTreeMap::new(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    /// Column `name` as a vector, or a CSV error naming the missing column.
    pub fn column(&self, name: &str, path: &Path) -> Result<Vec<f64>> {
        let idx = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Csv {
                path: path.to_path_buf(),
                message: format!(
                    "missing column `{name}` (header: {})",
                    self.header.join(",")
                ),
            })?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Serializes the table. Metadata is written as a single comment line.
    pub fn to_csv_string(&self) -> String {
        let mut out = Vec::new();
        if !self.meta.is_empty() {
            let kv: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "# {}", kv.join(", ")).expect("write to Vec");
        }
        {
            let mut w = csv::WriterBuilder::new().from_writer(&mut out);
            w.write_record(&self.header).expect("write to Vec");
            for row in &self.rows {
                w.write_record(row.iter().map(|v| fmt_f64(*v)))
                    .expect("write to Vec");
            }
            w.flush().expect("write to Vec");
        }
        String::from_utf8(out).expect("csv output is utf-8")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Table> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Table::parse(&text, path)
    }

    /// Parses CSV text; `path` is only used in error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Table> {
        let csv_err = |message: String| Error::Csv {
            path: path.to_path_buf(),
            message,
        };
        let mut meta = BTreeMap::new();
        for line in text.lines().take_while(|l| l.trim_start().starts_with('#')) {
            parse_meta_line(line.trim_start().trim_start_matches('#'), &mut meta);
        }
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| csv_err(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| csv_err(e.to_string()))?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| csv_err(format!("row {}: `{s}` is not a number", i + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != header.len() {
                return Err(csv_err(format!(
                    "row {} has {} fields, header has {}",
                    i + 1,
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        Ok(Table { meta, header, rows })
    }
}

/// Splits `key=value` pairs separated by commas and/or whitespace.
fn parse_meta_line(line: &str, meta: &mut BTreeMap<String, String>) {
    for tok in line.split(|c: char| c == ',' || c.is_whitespace()) {
        if let Some((k, v)) = tok.split_once('=') {
            if !k.is_empty() {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_roundtrip() {
        for v in [0.1, 1.0 / 3.0, 54.230_270_8, 1e-300, -2.5e17] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn parse_metadata_and_rows() {
        let text = "# monotonicity=increasing, convexity=unknown interpolation=linear\nx,value\n1,1\n2, 4\n";
        let t = Table::parse(text, Path::new("mem")).unwrap();
        assert_eq!(t.meta["monotonicity"], "increasing");
        assert_eq!(t.meta["interpolation"], "linear");
        assert_eq!(t.rows, vec![vec![1.0, 1.0], vec![2.0, 4.0]]);
    }

    #[test]
    fn bad_number_is_csv_error() {
        let err = Table::parse("x,value\n1,abc\n", Path::new("mem")).unwrap_err();
        assert!(err.is_io());
    }
}
