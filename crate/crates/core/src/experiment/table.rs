use std::path::Path;

use crate::{Error, Result};

/// A CSV cell. Floats are written with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt_float(v: Option<f64>) -> Self {
        v.map_or(Self::Empty, Self::Float)
    }

    pub fn opt_int(v: Option<usize>) -> Self {
        v.map_or(Self::Empty, |x| Self::Int(x as i64))
    }

    fn render(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Float(v) => format_float(*v),
            Self::Text(s) => s.replace([',', '\n', '\r', '"'], " "),
            Self::Empty => String::new(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Int(v as i64)
    }
}

/// 17 significant digits in scientific notation; non-finite values are not representable.
pub fn format_float(v: f64) -> String {
    debug_assert!(v.is_finite(), "non-finite value reached a table");
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(file_name: &'static str, header: &[&'static str]) -> Self {
        Self {
            file_name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "ragged row in {}",
            self.file_name
        );
        self.rows.push(row);
    }

    /// Rejects non-finite floats so they never reach a file.
    pub fn check_finite(&self) -> Result<()> {
        let bad = self
            .rows
            .iter()
            .flatten()
            .any(|c| matches!(c, Cell::Float(v) if !v.is_finite()));
        if bad {
            Err(Error::NonFinite(self.file_name))
        } else {
            Ok(())
        }
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        self.check_finite()?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        w.write_record(&self.header).map_err(ser)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(ser)?;
        }
        w.into_inner()
            .map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn write(&self, dir: &Path) -> Result<std::path::PathBuf> {
        let path = dir.join(self.file_name);
        std::fs::write(&path, self.to_csv_bytes()?).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [
            0.0,
            -0.0,
            1.0,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
        ] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("x.csv", &["a", "b", "c"]);
        t.push(vec![
            Cell::Int(1),
            Cell::Float(0.5),
            Cell::Text("x, y".into()),
        ]);
        t.push(vec![Cell::Empty, true.into(), Cell::Empty]);
        let s = String::from_utf8(t.to_csv_bytes().unwrap()).unwrap();
        assert_eq!(s, "a,b,c\n1,5.0000000000000000e-1,x  y\n,1,\n");
    }

    #[test]
    fn non_finite_rejected() {
        let mut t = Table::new("x.csv", &["a"]);
        t.push(vec![Cell::Float(f64::NAN)]);
        assert!(t.check_finite().is_err());
    }
}
