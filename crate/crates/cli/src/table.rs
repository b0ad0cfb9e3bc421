//! CSV tables of numbers.
//!
//! Values are written with 12 significant digits, infinities as `inf`/`-inf`
//! and missing values as empty fields. A written table read back with
//! [`Table::read`] yields exactly the values that were written.

use std::io::Write;
use std::path::Path;

use crate::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Round to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let y = round12(x);
    let a = y.abs();
    if y == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{y}")
    } else {
        format!("{y:e}")
    }
}

pub fn parse_value(s: &str) -> Result<Option<f64>> {
    let s = s.trim();
    match s {
        "" => Ok(None),
        "inf" => Ok(Some(f64::INFINITY)),
        "-inf" => Ok(Some(f64::NEG_INFINITY)),
        "nan" => Ok(Some(f64::NAN)),
        _ => s
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::Invalid(format!("cannot parse CSV field `{s}`"))),
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(|v| v.map(format_value).unwrap_or_default()))?;
        }
        wr.flush().map_err(|e| Error::Io { path: "<csv>".into(), source: e })?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// Write to `path`, or to stdout when `path` is `None`.
    pub fn save(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => {
                let f = std::fs::File::create(p).map_err(|e| Error::io(p, e))?;
                self.write_to(std::io::BufWriter::new(f))
            }
            None => self.write_to(std::io::stdout().lock()),
        }
    }

    pub fn read_from<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header: Vec<String> = rd.headers()?.iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() != header.len() {
                return invalid("CSV row length differs from header");
            }
            rows.push(rec.iter().map(parse_value).collect::<Result<Vec<_>>>()?);
        }
        Ok(Table { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(f)
    }
}
