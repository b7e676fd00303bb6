//! Exact correlation-induced leakage when the neighbor's transition matrix is
//! known.

use serde::{Deserialize, Serialize};

use crate::distribution::ConditionalDistribution;
use crate::error::{CplError, Result};
use crate::mechanisms::TransitionMatrix;

/// Output symbol `y` and ordered conditioning pair `(x, x_prime)` of a ratio
/// p(y | x) / p(y | x_prime).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactWitness {
    pub output: usize,
    pub x: usize,
    pub x_prime: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactCplResult {
    /// Largest finite log-ratio, in nats.
    pub leakage_nats: f64,
    pub witness: ExactWitness,
    /// Set when some output has p(y | x′) = 0 < p(y | x): the supremum is
    /// unbounded and `leakage_nats` covers only the finite ratios.
    pub infinite_witness: Option<ExactWitness>,
}

impl ExactCplResult {
    pub fn is_infinite(&self) -> bool {
        self.infinite_witness.is_some()
    }

    /// Leakage with the infinite case folded in.
    pub fn value(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.leakage_nats
        }
    }
}

/// p(y | x) for every output y, marginalizing over the neighbor's symbol.
fn output_given_condition(
    cond: &ConditionalDistribution,
    trans: &TransitionMatrix,
    x: usize,
) -> Vec<f64> {
    (0..trans.n_outputs())
        .map(|y| {
            cond.row(x)
                .iter()
                .enumerate()
                .map(|(a, g)| g * trans.prob(a, y))
                .sum()
        })
        .collect()
}

/// CPL on the attribute conditioning `cond` (rows) caused by releasing the
/// neighbor (columns of `cond`) through `trans`.
///
/// Every output column `C_y` of `trans` is paired with every ordered pair of
/// present rows; the result is the largest `ln(C_yᵀG_x / C_yᵀG_x′)`.
pub fn cpl_exact(
    cond: &ConditionalDistribution,
    trans: &TransitionMatrix,
) -> Result<ExactCplResult> {
    if cond.n_cols() != trans.n_inputs() {
        return Err(CplError::DimensionMismatch(format!(
            "conditional has {} neighbor symbols, transition matrix has {} inputs",
            cond.n_cols(),
            trans.n_inputs()
        )));
    }
    let rows = cond.comparable_rows()?;
    let outputs: Vec<Vec<f64>> = rows
        .iter()
        .map(|&x| output_given_condition(cond, trans, x))
        .collect();

    let mut best = f64::NEG_INFINITY;
    let mut witness = None;
    let mut infinite_witness = None;
    for y in 0..trans.n_outputs() {
        for (i, &x) in rows.iter().enumerate() {
            for (j, &x_prime) in rows.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (num, den) = (outputs[i][y], outputs[j][y]);
                let here = ExactWitness {
                    output: y,
                    x,
                    x_prime,
                };
                if den == 0.0 {
                    if num > 0.0 && infinite_witness.is_none() {
                        infinite_witness = Some(here);
                    }
                    continue;
                }
                let ratio = (num / den).ln();
                if ratio > best {
                    best = ratio;
                    witness = Some(here);
                }
            }
        }
    }
    let witness = match (witness, infinite_witness) {
        (Some(w), _) => w,
        (None, Some(w)) => {
            // every ratio is unbounded or 0/0
            best = 0.0;
            w
        }
        (None, None) => {
            return Err(CplError::Numerical(
                "no output symbol has positive probability".into(),
            ))
        }
    };
    Ok(ExactCplResult {
        leakage_nats: best.max(0.0),
        witness,
        infinite_witness,
    })
}

/// Re-evaluates the log-ratio named by a witness.
pub fn witness_log_ratio(
    cond: &ConditionalDistribution,
    trans: &TransitionMatrix,
    w: &ExactWitness,
) -> f64 {
    let column = trans.column(w.output);
    let dot = |x: usize| -> f64 { cond.row(x).iter().zip(&column).map(|(g, c)| g * c).sum() };
    (dot(w.x) / dot(w.x_prime)).ln()
}
