//! CSV datasets: comma separated, `.` decimal point, no quoting, optional
//! single header line, optional leading id column.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use corrmetric_core::Sample;

use crate::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsvOptions {
    /// Skip the first line.
    pub header: bool,
    /// The first column holds the sample id.
    pub id_col: bool,
}

/// Rectangular collection of samples with their ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub dimension: usize,
}

impl Dataset {
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.samples.iter().map(|s| s.id().unwrap_or(""))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("line {line}, column {column}: cannot parse {value:?} as a finite number")]
    Number {
        line: u64,
        column: usize,
        value: String,
    },

    #[error("line {line}: expected {expected} values, found {found}")]
    Ragged {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: a sample needs at least 2 values, found {found}")]
    TooShort { line: u64, found: usize },

    #[error("no samples")]
    Empty,
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Parse(e.to_string())
    }
}

pub fn parse_dataset<R: Read>(reader: R, opts: CsvOptions) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.header)
        .delimiter(b',')
        .quoting(false)
        .flexible(true)
        .from_reader(reader);

    let mut samples = Vec::new();
    let mut dimension = None;
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| DatasetError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        let mut fields = record.iter();
        let id = if opts.id_col {
            fields.next().unwrap_or("").trim().to_string()
        } else {
            row.to_string()
        };
        let first_value_column = if opts.id_col { 2 } else { 1 };
        let values = fields
            .enumerate()
            .map(|(i, raw)| {
                let text = raw.trim();
                text.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| DatasetError::Number {
                        line,
                        column: i + first_value_column,
                        value: text.to_string(),
                    })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let expected = *dimension.get_or_insert(values.len());
        if values.len() != expected {
            return Err(DatasetError::Ragged {
                line,
                expected,
                found: values.len(),
            });
        }
        let found = values.len();
        let sample = Sample::new(values).map_err(|_| DatasetError::TooShort { line, found })?;
        samples.push(sample.with_id(id));
    }
    let dimension = dimension.ok_or(DatasetError::Empty)?;
    Ok(Dataset { samples, dimension })
}

pub fn read_dataset(path: &Path, opts: CsvOptions) -> Result<Dataset, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    parse_dataset(file, opts).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}
