//! CSV reading and writing.
//!
//! Datasets are written with 17 significant digits so a write/read round
//! trip is exact. Analysis tables use 9 digits.

use std::path::Path;

use crate::backbone::{ClassId, LabeledDataset};
use crate::error::{Error, Result};
use crate::numfmt::{fmt_exact, fmt_report};

pub const DATASET_HEADER: [&str; 3] = ["x1", "x2", "label"];

/// A header plus string rows, ready to be written as CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// # Panics
    /// If the row width differs from the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(bytes);
        let header = reader
            .headers()
            .map_err(|e| csv_error(e, 1))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| csv_error(e, i + 2))?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Table { header, rows })
    }
}

/// Report-precision float cell.
pub fn cell(x: f64) -> String {
    fmt_report(x)
}

fn csv_error(e: csv::Error, row: usize) -> Error {
    let row = e.position().map_or(row, |p| p.line() as usize);
    Error::Parse {
        what: "csv row",
        offset: row,
        message: e.to_string(),
    }
}

fn parse_error(row: usize, message: String) -> Error {
    Error::Parse {
        what: "csv row",
        offset: row,
        message,
    }
}

pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    std::fs::write(path, table.to_bytes())?;
    Ok(())
}

pub fn dataset_to_table(data: &LabeledDataset) -> Table {
    let mut t = Table::new(&DATASET_HEADER);
    for (p, l) in data.points.iter().zip(&data.labels) {
        t.push(vec![fmt_exact(p[0]), fmt_exact(p[1]), l.code().to_string()]);
    }
    t
}

pub fn dataset_to_csv(data: &LabeledDataset) -> Vec<u8> {
    dataset_to_table(data).to_bytes()
}

/// Parse a dataset. Row numbers in errors count the header as row 1.
pub fn parse_dataset(bytes: &[u8]) -> Result<LabeledDataset> {
    let table = Table::parse(bytes)?;
    if table.header != DATASET_HEADER {
        return Err(parse_error(
            1,
            format!("expected header x1,x2,label, found {}", table.header.join(",")),
        ));
    }
    let mut points = Vec::with_capacity(table.rows.len());
    let mut labels = Vec::with_capacity(table.rows.len());
    for (i, r) in table.rows.iter().enumerate() {
        let row = i + 2;
        if r.len() != 3 {
            return Err(parse_error(row, format!("expected 3 fields, found {}", r.len())));
        }
        let coord = |s: &str| -> Result<f64> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| parse_error(row, format!("`{s}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(row, format!("`{s}` is not finite")));
            }
            Ok(v)
        };
        let label = r[2]
            .trim()
            .parse::<u8>()
            .ok()
            .and_then(ClassId::from_code)
            .ok_or_else(|| parse_error(row, format!("label `{}` is not 0 or 1", r[2])))?;
        points.push([coord(&r[0])?, coord(&r[1])?]);
        labels.push(label);
    }
    LabeledDataset::new(points, labels)
}

pub fn read_dataset(path: &Path) -> Result<LabeledDataset> {
    parse_dataset(&std::fs::read(path)?)
}

pub fn write_dataset(data: &LabeledDataset, path: &Path) -> Result<()> {
    std::fs::write(path, dataset_to_csv(data))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backbone::{generate, BackboneSpec};

    #[test]
    fn round_trip_exact() {
        let d = generate(&BackboneSpec::new(0.3, 0.7, 60, 4).unwrap()).unwrap();
        let back = parse_dataset(&dataset_to_csv(&d)).unwrap();
        assert_eq!(back.points, d.points);
        assert_eq!(back.labels, d.labels);
    }

    #[test]
    fn decimal_point_bytes() {
        let d = LabeledDataset::new(vec![[0.15, 0.5]], vec![ClassId::Majority]).unwrap();
        assert_eq!(
            dataset_to_csv(&d),
            b"x1,x2,label\n0.14999999999999999,0.5,1\n".to_vec()
        );
    }

    #[test]
    fn errors_carry_row_numbers() {
        let e = parse_dataset(b"x,y,label\n0.1,0.2,0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { offset: 1, .. }));
        let e = parse_dataset(b"x1,x2,label\n0.1,0.2,0\n0.1,abc,1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { offset: 3, .. }), "{e}");
        let e = parse_dataset(b"x1,x2,label\n0.1,0.2,7\n").unwrap_err();
        assert!(matches!(e, Error::Parse { offset: 2, .. }));
    }
}
