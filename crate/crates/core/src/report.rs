//! CSV/JSON emission: `#`-prefixed metadata lines, fixed column schemas,
//! deterministic float formatting.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::norms::NormEstimate;
use crate::Result;

/// Deterministic float rendering: shortest representation that round-trips
/// (`f64`'s `Display`), so identical computations give identical bytes.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x}")
    }
}

pub fn config_hash(config_json: &str) -> String {
    let mut h = Sha256::new();
    h.update(config_json.as_bytes());
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Accumulates one CSV table: metadata comments, a header row, data rows.
#[derive(Debug, Clone)]
pub struct CsvReport {
    columns: Vec<String>,
    meta: Vec<(String, String)>,
    rows: Vec<Vec<String>>,
}

impl CsvReport {
    pub fn new(columns: &[&str]) -> CsvReport {
        CsvReport {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            meta: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn row(&mut self, fields: Vec<String>) -> &mut Self {
        assert_eq!(
            fields.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(fields);
        self
    }

    /// Standard row block for a two-sided norm estimate.
    pub fn norm_row(&mut self, quantity: &str, e: &NormEstimate) -> &mut Self {
        self.row(vec![
            quantity.to_string(),
            fmt_f64(e.lower),
            fmt_f64(e.upper),
            e.method.clone(),
            fmt_f64(e.mesh),
        ])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let escaped: Vec<String> = row
                .iter()
                .map(|f| {
                    if f.contains(',') || f.contains('"') || f.contains('\n') {
                        format!("\"{}\"", f.replace('"', "\"\""))
                    } else {
                        f.clone()
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", escaped.join(","));
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Norm-estimate table with the standard five-column schema.
pub fn norm_table() -> CsvReport {
    CsvReport::new(&["quantity", "lower", "upper", "method", "mesh"])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape_and_metadata() {
        let mut r = CsvReport::new(&["a", "b"]);
        r.meta("config_sha256", config_hash("{}"));
        r.row(vec!["1".into(), "x,y".into()]);
        let s = r.to_csv();
        let mut lines = s.lines();
        assert!(lines.next().unwrap().starts_with("# config_sha256: "));
        assert_eq!(lines.next().unwrap(), "a,b");
        assert_eq!(lines.next().unwrap(), "1,\"x,y\"");
    }

    #[test]
    fn float_formatting_roundtrips() {
        for x in [0.1, 1.0 / 3.0, 2.5e-17, f64::MAX] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            config_hash("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
