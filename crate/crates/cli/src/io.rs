//! Matrix files and report tables.
//!
//! Matrix JSON: `{"n": rows, "k": cols, "re": [...], "im": [...]}`, row
//! major, `im` optional. Reports are written as CSV (one `# hadperm <kind>
//! v1` header comment, a column row, data rows, a `# summary` comment) or as
//! a single JSON object with the same content.

use std::fs;
use std::io::Write;
use std::path::Path;

use hadperm::{ColumnMatrix, Complex64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub k: usize,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ColumnMatrix) -> Self {
        let re = m.entries().iter().map(|z| z.re).collect();
        let im: Vec<f64> = m.entries().iter().map(|z| z.im).collect();
        MatrixFile {
            n: m.n_rows(),
            k: m.n_cols(),
            re,
            im: im.iter().any(|&x| x != 0.0).then_some(im),
        }
    }

    pub fn to_matrix(&self) -> Result<ColumnMatrix, CliError> {
        let len = self.n * self.k;
        if self.re.len() != len || self.im.as_ref().is_some_and(|im| im.len() != len) {
            return Err(CliError::Input(format!(
                "matrix file declares {}x{} but holds a different number of entries",
                self.n, self.k
            )));
        }
        let data = (0..len)
            .map(|i| Complex64::new(self.re[i], self.im.as_ref().map_or(0.0, |im| im[i])))
            .collect();
        Ok(ColumnMatrix::from_row_major(self.n, self.k, data)?)
    }
}

pub fn read_matrix(path: &Path) -> Result<ColumnMatrix, CliError> {
    let text = fs::read_to_string(path)?;
    let file: MatrixFile = serde_json::from_str(&text)?;
    file.to_matrix()
}

pub fn write_matrix(path: &Path, m: &ColumnMatrix) -> Result<(), CliError> {
    fs::write(path, serde_json::to_string(&MatrixFile::from_matrix(m))?)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float_text(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // Non-finite floats become strings so nothing is lost.
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Shortest round-trip text, in exponent form for very small or large
/// magnitudes.
fn float_text(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(kind: &'static str, columns: &[&str]) -> Self {
        Table {
            kind,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, summary: &Value) -> String {
        match format {
            Format::Csv => {
                let mut out = format!("# hadperm {} v{}\n", self.kind, SCHEMA_VERSION);
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out.push_str(&format!("# summary {summary}\n"));
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let doc = json!({
                    "schema": format!("hadperm/{}/v{}", self.kind, SCHEMA_VERSION),
                    "columns": self.columns,
                    "rows": rows,
                    "summary": summary,
                });
                format!("{doc}\n")
            }
        }
    }

    pub fn write(&self, path: &Path, format: Format, summary: &Value) -> Result<(), CliError> {
        let mut file = fs::File::create(path)?;
        file.write_all(self.render(format, summary).as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip() {
        let m = ColumnMatrix::from_rows(&[
            vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0)],
            vec![Complex64::new(0.0, 3.0), Complex64::new(-1.0, 0.25)],
        ])
        .unwrap();
        let file = MatrixFile::from_matrix(&m);
        let text = serde_json::to_string(&file).unwrap();
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn real_matrix_omits_imaginary_part() {
        let text =
            serde_json::to_string(&MatrixFile::from_matrix(&ColumnMatrix::ones(2, 2).unwrap()))
                .unwrap();
        assert_eq!(text, r#"{"n":2,"k":2,"re":[1.0,1.0,1.0,1.0]}"#);
        let parsed: MatrixFile = serde_json::from_str(r#"{"n":2,"k":1,"re":[3,4]}"#).unwrap();
        assert_eq!(
            parsed.to_matrix().unwrap().get(1, 0),
            Complex64::new(4.0, 0.0)
        );
    }

    #[test]
    fn bad_matrix_files() {
        let short = MatrixFile {
            n: 2,
            k: 2,
            re: vec![1.0; 3],
            im: None,
        };
        assert!(short.to_matrix().is_err());
        let wide = MatrixFile {
            n: 1,
            k: 2,
            re: vec![1.0; 2],
            im: None,
        };
        assert!(wide.to_matrix().is_err());
    }

    #[test]
    fn csv_and_json_layout() {
        let mut t = Table::new("demo", &["a", "b", "c"]);
        t.push(vec![1usize.into(), 0.5.into(), "x".into()]);
        t.push(vec![2usize.into(), f64::INFINITY.into(), true.into()]);
        t.push(vec![3usize.into(), 1.5e-12.into(), (-2e20).into()]);
        let summary = json!({"rows": 2});
        assert_eq!(
            t.render(Format::Csv, &summary),
            "# hadperm demo v1\na,b,c\n1,0.5,x\n2,inf,true\n3,1.5e-12,-2e20\n# summary {\"rows\":2}\n"
        );
        let doc: Value = serde_json::from_str(&t.render(Format::Json, &summary)).unwrap();
        assert_eq!(doc["schema"], "hadperm/demo/v1");
        assert_eq!(doc["rows"][1][1], "inf");
        assert_eq!(doc["summary"]["rows"], 2);
    }
}
