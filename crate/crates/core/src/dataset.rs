//! Discrete-attribute datasets: alphabets, CSV ingestion, binning and
//! replication.
//!
//! Records are stored column-major as symbol indices into each attribute's
//! [`Alphabet`]. Alphabets keep first-appearance order from the source, which
//! is deterministic and irrelevant to every leakage supremum downstream.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CplError, Result};

/// Ordered set of distinct category labels for one attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(CplError::InvalidParameter(
                "alphabet must not be empty".into(),
            ));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(CplError::InvalidParameter(format!(
                    "duplicate symbol `{s}` in alphabet"
                )));
            }
        }
        Ok(Self { symbols, index })
    }

    /// Alphabet `0, 1, .., size-1` rendered as decimal labels.
    pub fn numbered(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> Option<&str> {
        self.symbols.get(index).map(String::as_str)
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = CplError;

    fn try_from(value: Vec<String>) -> Result<Self> {
        Alphabet::new(value)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}

/// One named attribute of a [`Dataset`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub alphabet: Alphabet,
}

/// Table of discrete attributes; every cell is an index into its column's
/// alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    attributes: Vec<Attribute>,
    columns: Vec<Vec<u32>>,
}

impl Dataset {
    pub fn from_columns(attributes: Vec<Attribute>, columns: Vec<Vec<u32>>) -> Result<Self> {
        if attributes.len() != columns.len() {
            return Err(CplError::DimensionMismatch(format!(
                "{} attributes but {} columns",
                attributes.len(),
                columns.len()
            )));
        }
        let rows = columns.first().map_or(0, Vec::len);
        for (attr, col) in attributes.iter().zip(&columns) {
            if col.len() != rows {
                return Err(CplError::DimensionMismatch(format!(
                    "column `{}` has {} rows, expected {rows}",
                    attr.name,
                    col.len()
                )));
            }
            let k = attr.alphabet.len();
            if let Some(&bad) = col.iter().find(|&&v| v as usize >= k) {
                return Err(CplError::ValueOutOfRange {
                    value: bad as usize,
                    k,
                });
            }
        }
        Ok(Self {
            attributes,
            columns,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, i: usize) -> &Attribute {
        &self.attributes[i]
    }

    pub fn names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }

    pub fn alphabet_size(&self, i: usize) -> usize {
        self.attributes[i].alphabet.len()
    }

    pub fn column(&self, i: usize) -> &[u32] {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    pub fn record(&self, row: usize) -> Vec<u32> {
        self.columns.iter().map(|c| c[row]).collect()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub(crate) fn check_attribute(&self, i: usize) -> Result<()> {
        if i >= self.n_attributes() {
            return Err(CplError::InvalidParameter(format!(
                "attribute index {i} out of range for {} attributes",
                self.n_attributes()
            )));
        }
        Ok(())
    }

    /// Same schema, new columns. Used by perturbation, which decodes back into
    /// the input alphabets.
    pub(crate) fn with_columns(&self, columns: Vec<Vec<u32>>) -> Result<Self> {
        Self::from_columns(self.attributes.clone(), columns)
    }
}

/// Per-column ingestion declaration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ColumnHint {
    /// Categorical column. A declared symbol list fixes the alphabet order
    /// (and may include symbols absent from the file); otherwise symbols are
    /// ordered by first appearance.
    Categorical {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        symbols: Option<Vec<String>>,
    },
    /// Parse as reals and bin into this many equal-width bins.
    Numeric { bins: usize },
}

/// Column hints keyed by header name; unlisted columns are categorical.
pub type SchemaHints = HashMap<String, ColumnHint>;

/// Hints that pin every attribute's alphabet to its current order, so a
/// dataset written with [`write_csv`] reloads with identical indices.
pub fn schema_of(dataset: &Dataset) -> SchemaHints {
    dataset
        .attributes
        .iter()
        .map(|a| {
            let hint = ColumnHint::Categorical {
                symbols: Some(a.alphabet.symbols().to_vec()),
            };
            (a.name.clone(), hint)
        })
        .collect()
}

pub fn load_csv(path: impl AsRef<Path>, hints: &SchemaHints) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| CplError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, hints)
}

pub fn read_csv<R: Read>(reader: R, hints: &SchemaHints) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(CplError::InvalidParameter("missing header row".into()));
    }
    let width = headers.len();
    let mut raw: Vec<Vec<String>> = vec![Vec::new(); width];
    for record in rdr.records() {
        let record = record?;
        if record.len() != width {
            let line = record.position().map_or(0, |p| p.line());
            return Err(CplError::RaggedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        for (col, field) in raw.iter_mut().zip(record.iter()) {
            col.push(field.trim().to_string());
        }
    }

    let mut attributes = Vec::with_capacity(width);
    let mut columns = Vec::with_capacity(width);
    for (name, values) in headers.into_iter().zip(raw) {
        if values.is_empty() || values.iter().all(String::is_empty) {
            return Err(CplError::EmptyColumn(name));
        }
        let (indices, alphabet) = match hints.get(&name) {
            None | Some(ColumnHint::Categorical { symbols: None }) => categorize(&values)?,
            Some(ColumnHint::Categorical {
                symbols: Some(symbols),
            }) => {
                let alphabet = Alphabet::new(symbols.iter().cloned())?;
                let indices = values
                    .iter()
                    .map(|v| {
                        alphabet.index_of(v).map(|i| i as u32).ok_or_else(|| {
                            CplError::InvalidParameter(format!(
                                "column `{name}`: `{v}` is not a declared symbol"
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                (indices, alphabet)
            }
            Some(&ColumnHint::Numeric { bins }) => {
                let reals = values
                    .iter()
                    .map(|v| {
                        v.parse::<f64>().map_err(|_| {
                            CplError::InvalidParameter(format!(
                                "column `{name}`: `{v}` is not numeric"
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                bin_numeric(&reals, bins)?
            }
        };
        attributes.push(Attribute { name, alphabet });
        columns.push(indices);
    }
    Dataset::from_columns(attributes, columns)
}

fn categorize(values: &[String]) -> Result<(Vec<u32>, Alphabet)> {
    let mut seen: HashMap<&str, u32> = HashMap::new();
    let mut symbols = Vec::new();
    let indices = values
        .iter()
        .map(|v| {
            *seen.entry(v.as_str()).or_insert_with(|| {
                symbols.push(v.clone());
                (symbols.len() - 1) as u32
            })
        })
        .collect();
    Ok((indices, Alphabet::new(symbols)?))
}

pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(dataset.attributes.iter().map(|a| a.name.as_str()))?;
    for row in 0..dataset.n_rows() {
        wtr.write_record(
            dataset
                .attributes
                .iter()
                .zip(&dataset.columns)
                .map(|(a, c)| a.alphabet.symbols[c[row] as usize].as_str()),
        )?;
    }
    wtr.flush().map_err(|source| CplError::Io {
        path: "<writer>".into(),
        source,
    })?;
    Ok(())
}

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| CplError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(dataset, std::io::BufWriter::new(file))
}

/// Equal-width binning over `[min, max]`; the maximum lands in the last bin.
///
/// When every value is equal the result is a single bin regardless of
/// `bins`.
pub fn bin_numeric(values: &[f64], bins: usize) -> Result<(Vec<u32>, Alphabet)> {
    if bins == 0 {
        return Err(CplError::InvalidParameter(
            "bin count must be positive".into(),
        ));
    }
    if values.is_empty() {
        return Err(CplError::InvalidParameter("no values to bin".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(CplError::InvalidParameter(format!(
            "cannot bin non-finite value {v}"
        )));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok((vec![0; values.len()], Alphabet::new([format!("{min}")])?));
    }
    let width = (max - min) / bins as f64;
    let indices = values
        .iter()
        .map(|&v| (((v - min) / width).floor() as usize).min(bins - 1) as u32)
        .collect();
    let labels = (0..bins).map(|b| {
        let lo = min + width * b as f64;
        if b + 1 == bins {
            format!("[{lo}, {max}]")
        } else {
            format!("[{lo}, {})", min + width * (b + 1) as f64)
        }
    });
    Ok((indices, Alphabet::new(labels)?))
}

/// Replicates the whole table `r` times (block tiling: row `b*N + i` is
/// original row `i`).
pub fn expand_dataset(dataset: &Dataset, r: usize) -> Result<Dataset> {
    if r == 0 {
        return Err(CplError::InvalidParameter(
            "expansion factor must be at least 1".into(),
        ));
    }
    let columns = dataset
        .columns
        .iter()
        .map(|c| {
            let mut out = Vec::with_capacity(c.len() * r);
            for _ in 0..r {
                out.extend_from_slice(c);
            }
            out
        })
        .collect();
    dataset.with_columns(columns)
}
