//! Column-oriented results and their CSV / JSON-lines serialization.
//!
//! Numbers are rounded to a fixed number of significant digits and then
//! printed in the shortest form that reads back to the rounded value, so
//! output is byte-stable across runs and platforms.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
    /// Empty in CSV, `null` in JSON.
    Null,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::JsonLines),
            other => Err(format!("unknown format `{other}`, expected csv or jsonl")),
        }
    }
}

/// Rounds to `digits` significant digits and prints the shortest
/// representation of the result. Non-finite values print as `NaN`, `inf`, `-inf`.
pub fn format_number(x: f64, digits: u32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.clamp(1, 17) as usize;
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().expect("formatted float parses");
    let a = rounded.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; non-numeric cells become NaN.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[i] {
                    Cell::Num(x) => x,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn write<W: Write>(&self, out: W, format: Format, digits: u32) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out, digits),
            Format::JsonLines => self.write_jsonl(out, digits),
        }
    }

    fn write_csv<W: Write>(&self, out: W, digits: u32) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(x) if x.is_finite() => format_number(*x, digits),
                Cell::Num(_) | Cell::Null => String::new(),
                Cell::Text(s) => s.clone(),
                Cell::Bool(b) => b.to_string(),
            }))?;
        }
        w.flush()
    }

    fn write_jsonl<W: Write>(&self, mut out: W, digits: u32) -> std::io::Result<()> {
        let keys: Vec<String> = self
            .columns
            .iter()
            .map(|c| serde_json::to_string(c).expect("string serializes"))
            .collect();
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            line.push('{');
            for (i, (k, c)) in keys.iter().zip(row).enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(k);
                line.push(':');
                match c {
                    Cell::Num(x) if x.is_finite() => line.push_str(&format_number(*x, digits)),
                    Cell::Num(_) | Cell::Null => line.push_str("null"),
                    Cell::Text(s) => line.push_str(&serde_json::to_string(s).expect("string serializes")),
                    Cell::Bool(b) => line.push_str(if *b { "true" } else { "false" }),
                }
            }
            line.push_str("}\n");
            out.write_all(line.as_bytes())?;
        }
        out.flush()
    }
}

/// Where a table goes: standard output or a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    pub fn parse(s: &str) -> Self {
        if s == "-" {
            Destination::Stdout
        } else {
            Destination::File(PathBuf::from(s))
        }
    }
}

pub fn emit(table: &Table, format: Format, dest: &Destination, digits: u32) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::Precondition("refusing to emit an empty table".into()));
    }
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    match dest {
        Destination::Stdout => {
            let stdout = std::io::stdout();
            let lock = std::io::BufWriter::new(stdout.lock());
            table.write(lock, format, digits).map_err(io_err(Path::new("<stdout>")))
        }
        Destination::File(path) => {
            let file = std::fs::File::create(path).map_err(io_err(path))?;
            table
                .write(std::io::BufWriter::new(file), format, digits)
                .map_err(io_err(path))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["t".into(), "f".into(), "regime".into(), "saturated".into()]);
        t.rows.push(vec![Cell::Num(0.0), Cell::Num(0.0), Cell::Text("SectorA".into()), Cell::Bool(false)]);
        t.rows.push(vec![Cell::Num(0.5), Cell::Num(1.0 / 3.0), Cell::Text("a,\"b\"".into()), Cell::Bool(false)]);
        t.rows.push(vec![Cell::Num(1.0), Cell::Null, Cell::Text("SectorD".into()), Cell::Bool(true)]);
        t
    }

    fn render(t: &Table, f: Format) -> String {
        let mut buf = Vec::new();
        t.write(&mut buf, f, 12).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_number(2.0, 12), "2");
        assert_eq!(format_number(-0.1, 12), "-0.1");
        assert_eq!(format_number(1.5e-300, 12), "1.5e-300");
        assert_eq!(format_number(123456.789, 4), "123500");
        assert_eq!(format_number(6.02e23, 3), "6.02e23");
        assert_eq!(format_number(f64::NAN, 12), "NaN");
    }

    #[test]
    fn csv_layout() {
        let s = render(&sample(), Format::Csv);
        assert_eq!(s.lines().count(), 4);
        assert!(!s.contains('\r'));
        assert!(s.starts_with("t,f,regime,saturated\n"));
        assert!(s.contains("\"a,\"\"b\"\"\""));
        assert!(s.ends_with("1,,SectorD,true\n"));
    }

    #[test]
    fn jsonl_layout() {
        let s = render(&sample(), Format::JsonLines);
        assert_eq!(s.lines().count(), 3);
        for line in s.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v.as_object().unwrap().len(), 4);
        }
        assert!(s.lines().nth(2).unwrap().contains("\"f\":null"));
    }

    #[test]
    fn empty_table_is_rejected() {
        let t = Table::new(vec!["t".into()]);
        assert!(emit(&t, Format::Csv, &Destination::Stdout, 12).is_err());
    }

    #[test]
    fn file_errors_name_the_path() {
        let dest = Destination::File("/nonexistent-dir/x.csv".into());
        let err = emit(&sample(), Format::Csv, &dest, 12).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
