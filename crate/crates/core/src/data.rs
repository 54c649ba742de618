//! Delimited numeric datasets.
//!
//! A [`Dataset`] is a named design matrix plus a response. Nothing is centered
//! or scaled on the way in; the regression code adds the intercept itself and
//! the lasso path standardizes internally.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    predictor_names: Vec<String>,
    x: DMatrix<f64>,
    y: DVector<f64>,
    response_name: String,
}

impl Dataset {
    /// Validates the invariants every downstream computation relies on:
    /// `n > p + 1`, finite entries, unique nonempty names.
    pub fn new(
        predictor_names: Vec<String>,
        x: DMatrix<f64>,
        y: DVector<f64>,
        response_name: impl Into<String>,
    ) -> Result<Self> {
        let (n, p) = x.shape();
        if predictor_names.len() != p {
            return Err(Error::Dimension(format!(
                "{} names for {} columns",
                predictor_names.len(),
                p
            )));
        }
        if y.len() != n {
            return Err(Error::Dimension(format!(
                "response has {} rows, design has {}",
                y.len(),
                n
            )));
        }
        if p == 0 {
            return Err(Error::Dimension("dataset has no predictors".into()));
        }
        if n <= p + 1 {
            return Err(Error::TooFewRows { n, p });
        }
        let response_name = response_name.into();
        check_names(predictor_names.iter().chain(std::iter::once(&response_name)))?;
        for (j, col) in x.column_iter().enumerate() {
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: i + 1,
                    column: predictor_names[j].clone(),
                });
            }
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i + 1,
                column: response_name,
            });
        }
        Ok(Self {
            predictor_names,
            x,
            y,
            response_name,
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn predictor_names(&self) -> &[String] {
        &self.predictor_names
    }

    pub fn name(&self, j: usize) -> &str {
        &self.predictor_names[j]
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.predictor_names.iter().position(|n| n == name)
    }

    /// Same dataset with a different response vector (used by simulations).
    pub fn with_response(&self, y: DVector<f64>) -> Result<Self> {
        Self::new(
            self.predictor_names.clone(),
            self.x.clone(),
            y,
            self.response_name.clone(),
        )
    }

    /// Rows selected by `rows` (repeats allowed), in that order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let p = self.p();
        let x = DMatrix::from_fn(rows.len(), p, |i, j| self.x[(rows[i], j)]);
        let y = DVector::from_fn(rows.len(), |i, _| self.y[rows[i]]);
        Self::new(self.predictor_names.clone(), x, y, self.response_name.clone())
    }
}

fn check_names<'a>(names: impl Iterator<Item = &'a String>) -> Result<()> {
    let mut seen = HashSet::new();
    for (i, name) in names.enumerate() {
        if name.trim().is_empty() {
            return Err(Error::EmptyColumnName(i));
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateColumn(name.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub response: String,
    pub delimiter: u8,
    pub normalize_names: bool,
}

impl LoadOptions {
    /// Semicolon-delimited with name normalization, the layout of the UCI
    /// wine-quality files.
    pub fn new(response: impl Into<String>) -> Self {
        Self {
            response: response.into(),
            delimiter: b';',
            normalize_names: true,
        }
    }

    pub fn delimiter(mut self, delimiter: u8) -> Self {
        self.delimiter = delimiter;
        self
    }

    pub fn normalize_names(mut self, yes: bool) -> Self {
        self.normalize_names = yes;
        self
    }
}

/// `"Total sulfur dioxide"` becomes `"total_sulfur_dioxide"`.
pub fn normalize_name(name: &str) -> String {
    name.trim().to_lowercase().replace(' ', "_")
}

pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, opts)
}

/// Parses a header row followed by numeric records. Row numbers in errors are
/// 1-based data rows (the header is not counted).
pub fn read_csv<R: Read>(reader: R, opts: &LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| {
            if opts.normalize_names {
                normalize_name(h)
            } else {
                h.to_string()
            }
        })
        .collect();
    check_names(header.iter())?;

    let wanted = if opts.normalize_names {
        normalize_name(&opts.response)
    } else {
        opts.response.clone()
    };
    let response_col = header
        .iter()
        .position(|h| *h == wanted)
        .ok_or_else(|| Error::MissingResponse(opts.response.clone()))?;

    let width = header.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width];
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() == 1 && record.get(0).is_some_and(str::is_empty) {
            continue;
        }
        if record.len() != width {
            return Err(Error::RaggedRow {
                row,
                found: record.len(),
                expected: width,
            });
        }
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::NonNumeric {
                row,
                column: header[j].clone(),
                value: field.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    row,
                    column: header[j].clone(),
                });
            }
            columns[j].push(value);
        }
    }

    let n = columns[0].len();
    let y = DVector::from_vec(columns[response_col].clone());
    let mut names = Vec::with_capacity(width - 1);
    let mut data = Vec::with_capacity(n * (width - 1));
    for (j, col) in columns.into_iter().enumerate() {
        if j == response_col {
            continue;
        }
        names.push(header[j].clone());
        data.extend(col);
    }
    // Column-major storage: one contiguous block per predictor.
    let x = DMatrix::from_vec(n, width - 1, data);
    Dataset::new(names, x, y, header[response_col].clone())
}

/// Writes predictors followed by the response. Floats use the shortest
/// representation that parses back to the same bits.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W, delimiter: u8) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    let mut header: Vec<&str> = dataset.predictor_names.iter().map(String::as_str).collect();
    header.push(&dataset.response_name);
    wtr.write_record(&header)?;
    let mut buf = Vec::with_capacity(header.len());
    for i in 0..dataset.n() {
        buf.clear();
        buf.extend(dataset.x.row(i).iter().map(|v| v.to_string()));
        buf.push(dataset.y[i].to_string());
        wtr.write_record(&buf)?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<writer>".into(),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, response: &str) -> Result<Dataset> {
        read_csv(text.as_bytes(), &LoadOptions::new(response).delimiter(b','))
    }

    #[test]
    fn minimal_parse() {
        let ds = parse("a,b\n1,2\n3,5\n4,4\n", "b").unwrap();
        assert_eq!((ds.n(), ds.p()), (3, 1));
        assert_eq!(ds.predictor_names(), ["a"]);
        assert_eq!(ds.y().as_slice(), [2.0, 5.0, 4.0]);
        assert_eq!(ds.x().column(0).as_slice(), [1.0, 3.0, 4.0]);
    }

    #[test]
    fn response_removed_and_order_kept() {
        let ds = parse(
            "c,quality,a,b\n1,9,2,3\n4,8,5,6\n7,7,8,9\n1,1,2,0\n0,0,0,1\n",
            "quality",
        )
        .unwrap();
        assert_eq!(ds.predictor_names(), ["c", "a", "b"]);
        assert_eq!(ds.x().row(1).iter().copied().collect::<Vec<_>>(), [4.0, 5.0, 6.0]);
    }

    #[test]
    fn names_normalized() {
        let text = "\"Fixed Acidity\";\"total sulfur dioxide\";quality\n1;2;3\n2;3;1\n4;1;1\n5;5;2\n";
        let ds = read_csv(text.as_bytes(), &LoadOptions::new("quality")).unwrap();
        assert_eq!(ds.predictor_names(), ["fixed_acidity", "total_sulfur_dioxide"]);

        let raw = read_csv(text.as_bytes(), &LoadOptions::new("quality").normalize_names(false)).unwrap();
        assert_eq!(raw.name(1), "total sulfur dioxide");
    }

    #[test]
    fn non_numeric_cell_reports_location() {
        let err = parse("a,b,y\n1,2,3\n4,oops,6\n7,8,9\n", "y").unwrap_err();
        match err {
            Error::NonNumeric { row, column, value } => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "b", "oops"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_non_finite() {
        let err = parse("a,y\n1,2\nNaN,3\n1,1\n", "y").unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 2, .. }), "{err:?}");
        let err = parse("a,y\n1,2\ninf,3\n1,1\n", "y").unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }), "{err:?}");
    }

    #[test]
    fn missing_response() {
        let err = parse("a,b\n1,2\n3,4\n5,5\n", "quality").unwrap_err();
        assert!(matches!(err, Error::MissingResponse(_)));
    }

    #[test]
    fn duplicate_columns() {
        let err = parse("a,a,y\n1,2,3\n4,5,6\n7,8,9\n1,1,1\n", "y").unwrap_err();
        assert!(matches!(err, Error::DuplicateColumn(ref n) if n == "a"));
        // Normalization can create a collision too.
        let err = parse("Total Acid,total_acid,y\n1,2,3\n4,5,6\n7,8,9\n1,1,1\n", "y").unwrap_err();
        assert!(matches!(err, Error::DuplicateColumn(_)));
    }

    #[test]
    fn too_few_rows() {
        let err = parse("a,b,y\n1,2,3\n4,5,6\n7,8,9\n", "y").unwrap_err();
        assert!(matches!(err, Error::TooFewRows { n: 3, p: 2 }));
    }

    #[test]
    fn ragged_row() {
        let err = parse("a,y\n1,2\n3\n4,5\n", "y").unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 2, .. }), "{err:?}");
    }

    #[test]
    fn missing_file() {
        let err = load_csv("/nonexistent/wine.csv", &LoadOptions::new("quality")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
