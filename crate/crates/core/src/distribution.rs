//! Joint, conditional and marginal distributions over discrete alphabets.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{CplError, Result};

/// Normalization tolerance for probability vectors and matrix rows.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Nonnegative vector summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_row(&entries, "probability vector")?;
        Ok(Self(entries))
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    /// Clip negatives to zero and renormalize; all-zero input becomes uniform.
    pub fn from_weights(mut weights: Vec<f64>) -> Self {
        for w in weights.iter_mut() {
            if !w.is_finite() || *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Self::uniform(weights.len());
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self(weights)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

fn check_row(row: &[f64], what: &str) -> Result<()> {
    if row.is_empty() {
        return Err(CplError::InvalidParameter(format!("{what} is empty")));
    }
    if let Some(bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(CplError::InvalidParameter(format!(
            "{what} has invalid entry {bad}"
        )));
    }
    let total: f64 = row.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(CplError::InvalidParameter(format!(
            "{what} sums to {total}, not 1"
        )));
    }
    Ok(())
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn check_rectangular(matrix: &[Vec<f64>]) -> Result<usize> {
    let cols = matrix.first().map_or(0, Vec::len);
    if matrix.is_empty() || cols == 0 {
        return Err(CplError::InvalidParameter("matrix is empty".into()));
    }
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(CplError::DimensionMismatch(
            "matrix rows differ in length".into(),
        ));
    }
    Ok(cols)
}

/// Joint probability table of two attributes; rows index attribute A, columns
/// attribute B.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        matrix: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let cols = check_rectangular(&matrix)?;
        if row_labels.len() != matrix.len() || col_labels.len() != cols {
            return Err(CplError::DimensionMismatch(
                "labels do not match matrix shape".into(),
            ));
        }
        if let Some(bad) = matrix
            .iter()
            .flatten()
            .find(|p| !p.is_finite() || **p < 0.0)
        {
            return Err(CplError::InvalidParameter(format!(
                "joint has invalid entry {bad}"
            )));
        }
        let total: f64 = matrix.iter().flatten().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(CplError::InvalidParameter(format!(
                "joint sums to {total}, not 1"
            )));
        }
        Ok(Self {
            row_labels,
            col_labels,
            matrix,
        })
    }

    /// Joint with numeric labels.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let cols = check_rectangular(&matrix)?;
        Self::new(default_labels(matrix.len()), default_labels(cols), matrix)
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn n_cols(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.matrix.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols()];
        for row in &self.matrix {
            for (o, p) in out.iter_mut().zip(row) {
                *o += p;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let matrix = (0..self.n_cols())
            .map(|j| self.matrix.iter().map(|r| r[j]).collect())
            .collect();
        Self {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            matrix,
        }
    }
}

/// Which attribute of a joint table is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// P(column attribute | row attribute).
    OnRows,
    /// P(row attribute | column attribute), laid out with the column
    /// attribute's symbols as rows.
    OnCols,
}

/// Row-stochastic table P(B | A = a). Rows whose conditioning symbol has no
/// mass are kept as zero rows and flagged absent; they take no part in any
/// leakage supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalDistribution {
    #[serde(default)]
    pub row_labels: Vec<String>,
    #[serde(default)]
    pub col_labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub present: Vec<bool>,
}

impl ConditionalDistribution {
    /// Validates an already-normalized table. All-zero rows are flagged absent.
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        matrix: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let cols = check_rectangular(&matrix)?;
        if row_labels.len() != matrix.len() || col_labels.len() != cols {
            return Err(CplError::DimensionMismatch(
                "labels do not match matrix shape".into(),
            ));
        }
        let mut present = Vec::with_capacity(matrix.len());
        for (i, row) in matrix.iter().enumerate() {
            if row.iter().all(|&p| p == 0.0) {
                present.push(false);
            } else {
                check_row(row, &format!("conditional row {i}"))?;
                present.push(true);
            }
        }
        Ok(Self {
            row_labels,
            col_labels,
            matrix,
            present,
        })
    }

    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let cols = check_rectangular(&matrix)?;
        Self::new(default_labels(matrix.len()), default_labels(cols), matrix)
    }

    /// Row-normalizes nonnegative weights (counts or unnormalized mass).
    pub fn from_weights(weights: Vec<Vec<f64>>) -> Result<Self> {
        check_rectangular(&weights)?;
        if let Some(bad) = weights
            .iter()
            .flatten()
            .find(|p| !p.is_finite() || **p < 0.0)
        {
            return Err(CplError::InvalidParameter(format!("invalid weight {bad}")));
        }
        let matrix = weights
            .into_iter()
            .map(|row| {
                let total: f64 = row.iter().sum();
                if total > 0.0 {
                    row.into_iter().map(|w| w / total).collect()
                } else {
                    row
                }
            })
            .collect();
        Self::from_matrix(matrix)
    }

    /// Re-validates after deserialization, filling in defaulted labels and
    /// flags.
    pub fn validated(self) -> Result<Self> {
        let rows = self.matrix.len();
        let cols = check_rectangular(&self.matrix)?;
        let row_labels = if self.row_labels.is_empty() {
            default_labels(rows)
        } else {
            self.row_labels
        };
        let col_labels = if self.col_labels.is_empty() {
            default_labels(cols)
        } else {
            self.col_labels
        };
        Self::new(row_labels, col_labels, self.matrix)
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn n_cols(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i]
    }

    pub fn is_present(&self, i: usize) -> bool {
        self.present[i]
    }

    /// Indices of rows that take part in suprema.
    pub fn present_rows(&self) -> Vec<usize> {
        (0..self.n_rows()).filter(|&i| self.present[i]).collect()
    }

    /// Present rows, failing when fewer than two remain.
    pub(crate) fn comparable_rows(&self) -> Result<Vec<usize>> {
        let rows = self.present_rows();
        if rows.len() < 2 {
            return Err(CplError::TooFewRows { found: rows.len() });
        }
        Ok(rows)
    }

    /// Applies the same column permutation to every row.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        let matrix = self
            .matrix
            .iter()
            .map(|r| perm.iter().map(|&j| r[j]).collect())
            .collect();
        let col_labels = perm.iter().map(|&j| self.col_labels[j].clone()).collect();
        Self {
            row_labels: self.row_labels.clone(),
            col_labels,
            matrix,
            present: self.present.clone(),
        }
    }
}

/// Empirical joint of attributes `i` (rows) and `j` (columns).
pub fn empirical_joint(dataset: &Dataset, i: usize, j: usize) -> Result<JointDistribution> {
    dataset.check_attribute(i)?;
    dataset.check_attribute(j)?;
    if i == j {
        return Err(CplError::InvalidParameter(
            "joint needs two distinct attributes".into(),
        ));
    }
    let n = dataset.n_rows();
    if n == 0 {
        return Err(CplError::EmptyDataset);
    }
    let counts = joint_counts(dataset, i, j);
    let matrix = counts
        .into_iter()
        .map(|r| r.into_iter().map(|c| c as f64 / n as f64).collect())
        .collect();
    JointDistribution::new(
        dataset.attribute(i).alphabet.symbols().to_vec(),
        dataset.attribute(j).alphabet.symbols().to_vec(),
        matrix,
    )
}

pub(crate) fn joint_counts(dataset: &Dataset, i: usize, j: usize) -> Vec<Vec<u64>> {
    let (m, t) = (dataset.alphabet_size(i), dataset.alphabet_size(j));
    let mut counts = vec![vec![0u64; t]; m];
    for (&a, &b) in dataset.column(i).iter().zip(dataset.column(j)) {
        counts[a as usize][b as usize] += 1;
    }
    counts
}

/// Conditional table derived from a joint. Conditioning symbols with zero
/// marginal mass are flagged absent.
pub fn conditional_from_joint(
    joint: &JointDistribution,
    condition: Condition,
) -> ConditionalDistribution {
    let oriented = match condition {
        Condition::OnRows => joint.clone(),
        Condition::OnCols => joint.transpose(),
    };
    let mut present = Vec::with_capacity(oriented.n_rows());
    let matrix = oriented
        .matrix
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            present.push(total > 0.0);
            if total > 0.0 {
                row.iter().map(|p| p / total).collect()
            } else {
                vec![0.0; row.len()]
            }
        })
        .collect();
    ConditionalDistribution {
        row_labels: oriented.row_labels,
        col_labels: oriented.col_labels,
        matrix,
        present,
    }
}

/// P(X_j | X_i) estimated from a dataset, rows indexed by X_i's symbols.
pub fn empirical_conditional(
    dataset: &Dataset,
    i: usize,
    j: usize,
) -> Result<ConditionalDistribution> {
    Ok(conditional_from_joint(
        &empirical_joint(dataset, i, j)?,
        Condition::OnRows,
    ))
}
