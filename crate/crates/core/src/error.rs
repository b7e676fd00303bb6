use std::path::PathBuf;

use thiserror::Error;

use crate::mechanisms::MechanismKind;

pub type Result<T> = std::result::Result<T, CplError>;

#[derive(Debug, Error)]
pub enum CplError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("row {line} has {found} fields, header declares {expected}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("column `{0}` has no values")]
    EmptyColumn(String),

    #[error("dataset has no records")]
    EmptyDataset,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("need at least 2 conditioning symbols with positive mass, found {found}")]
    TooFewRows { found: usize },

    #[error("{0:?} has no tractable transition matrix; use the bound or statistical estimators")]
    NoTransitionMatrix(MechanismKind),

    #[error("symbol index {value} outside alphabet of size {k}")]
    ValueOutOfRange { value: usize, k: usize },

    #[error("perturbed output does not match a {0:?} report")]
    PayloadMismatch(MechanismKind),

    #[error("subset enumeration over {t} symbols exceeds the limit of {limit}")]
    TooLarge { t: usize, limit: usize },

    #[error("joint output alphabet has {cells} cells, limit is {limit}")]
    ProductAlphabetTooLarge { cells: u128, limit: u128 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("missing leakage entry ({row}, {col})")]
    MissingEntry { row: usize, col: usize },

    #[error("numerical infeasibility: {0}")]
    Numerical(String),
}

impl CplError {
    /// Short machine-readable tag, used in CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            CplError::Io { .. } => "io",
            CplError::Csv(_) => "csv",
            CplError::Json(_) => "json",
            CplError::RaggedRow { .. } => "ragged_row",
            CplError::EmptyColumn(_) => "empty_column",
            CplError::EmptyDataset => "empty_dataset",
            CplError::InvalidParameter(_) => "invalid_parameter",
            CplError::DimensionMismatch(_) => "dimension_mismatch",
            CplError::TooFewRows { .. } => "too_few_rows",
            CplError::NoTransitionMatrix(_) => "no_transition_matrix",
            CplError::ValueOutOfRange { .. } => "value_out_of_range",
            CplError::PayloadMismatch(_) => "payload_mismatch",
            CplError::TooLarge { .. } => "too_large",
            CplError::ProductAlphabetTooLarge { .. } => "product_alphabet_too_large",
            CplError::InsufficientData(_) => "insufficient_data",
            CplError::MissingEntry { .. } => "missing_entry",
            CplError::Numerical(_) => "numerical",
        }
    }
}
