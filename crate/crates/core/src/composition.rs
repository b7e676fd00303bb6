//! Sequential composition of leakage pairs, total privacy leakage bounds and
//! the pairwise leakage matrix of a dataset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{cpl_bound, BoundedCplResult, BudgetParams};
use crate::dataset::Dataset;
use crate::distribution::{
    conditional_from_joint, empirical_conditional, Condition, ConditionalDistribution,
    JointDistribution,
};
use crate::error::{CplError, Result};
use crate::exact::{cpl_exact, ExactCplResult};
use crate::mechanisms::{transition_matrix, MechanismKind, MechanismSpec};

/// Largest representable relaxation below 1.
const RELAXATION_CAP: f64 = 1.0 - f64::EPSILON / 2.0;

/// Leakage in nats with its relaxation term; houses both (ε, δ) and (l, f̄*).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakagePair {
    pub leakage: f64,
    pub relaxation: f64,
    /// Some component was unbounded; `leakage` is then +∞.
    #[serde(default)]
    pub infinite: bool,
    /// The summed relaxation reached 1 and was clamped; the guarantee is
    /// vacuous.
    #[serde(default)]
    pub relaxation_overflow: bool,
}

impl LeakagePair {
    pub fn new(leakage: f64, relaxation: f64) -> Result<Self> {
        if leakage.is_nan() || leakage < 0.0 {
            return Err(CplError::InvalidParameter(format!(
                "leakage must be >= 0, got {leakage}"
            )));
        }
        if !(0.0..1.0).contains(&relaxation) {
            return Err(CplError::InvalidParameter(format!(
                "relaxation must lie in [0, 1), got {relaxation}"
            )));
        }
        Ok(Self {
            leakage,
            relaxation,
            infinite: leakage.is_infinite(),
            relaxation_overflow: false,
        })
    }

    /// Pure leakage with no relaxation.
    pub fn pure(leakage: f64) -> Self {
        Self {
            leakage,
            relaxation: 0.0,
            infinite: leakage.is_infinite(),
            relaxation_overflow: false,
        }
    }

    pub fn from_budget(budget: &BudgetParams) -> Self {
        Self {
            leakage: budget.epsilon,
            relaxation: budget.delta,
            infinite: false,
            relaxation_overflow: false,
        }
    }

    fn add(self, other: Self) -> Self {
        let infinite = self.infinite || other.infinite;
        let raw = self.relaxation + other.relaxation;
        let overflow = raw >= 1.0;
        Self {
            leakage: if infinite {
                f64::INFINITY
            } else {
                self.leakage + other.leakage
            },
            relaxation: if overflow { RELAXATION_CAP } else { raw },
            infinite,
            relaxation_overflow: self.relaxation_overflow || other.relaxation_overflow || overflow,
        }
    }
}

impl From<&BoundedCplResult> for LeakagePair {
    fn from(r: &BoundedCplResult) -> Self {
        Self {
            leakage: r.leakage_nats,
            relaxation: r.relaxation,
            infinite: false,
            relaxation_overflow: false,
        }
    }
}

impl From<&ExactCplResult> for LeakagePair {
    fn from(r: &ExactCplResult) -> Self {
        Self::pure(r.value())
    }
}

/// Sums leakages and relaxations left to right.
pub fn sequential_compose(parts: &[LeakagePair]) -> Result<LeakagePair> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| CplError::InvalidParameter("nothing to compose".into()))?;
    Ok(rest.iter().fold(*first, |acc, p| acc.add(*p)))
}

/// Own mechanism's leakage plus every neighbor's correlation-induced leakage.
pub fn tpl_upper_bound(own: LeakagePair, neighbors: &[LeakagePair]) -> LeakagePair {
    neighbors.iter().fold(own, |acc, p| acc.add(*p))
}

/// Which analysis produces each pairwise leakage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CplEngine {
    /// Mechanism-agnostic upper bound from (ε, δ).
    #[default]
    Bound,
    /// Exact leakage assuming every neighbor is released through GRR.
    ExactGrr,
    /// Exact leakage assuming every neighbor is released through EXP.
    ExactExp,
}

impl CplEngine {
    fn mechanism(self) -> Option<MechanismKind> {
        match self {
            CplEngine::Bound => None,
            CplEngine::ExactGrr => Some(MechanismKind::Grr),
            CplEngine::ExactExp => Some(MechanismKind::Exp),
        }
    }
}

/// Leakage on the row attribute of `cond` (P(neighbor | attribute)) caused
/// by the neighbor.
///
/// A constant neighbor or a constant target carries no distinguishable
/// pair and yields zero leakage.
pub fn pairwise_leakage(
    cond: &ConditionalDistribution,
    budget: &BudgetParams,
    engine: CplEngine,
) -> Result<LeakagePair> {
    budget.validate()?;
    if cond.present_rows().len() < 2 {
        return Ok(LeakagePair::pure(0.0));
    }
    match engine.mechanism() {
        None => Ok(LeakagePair::from(&cpl_bound(cond, budget)?)),
        Some(_) if cond.n_cols() < 2 => Ok(LeakagePair::pure(0.0)),
        Some(kind) => {
            let spec = MechanismSpec::new(kind, budget.epsilon, cond.n_cols())?;
            Ok(LeakagePair::from(&cpl_exact(
                cond,
                &transition_matrix(&spec)?,
            )?))
        }
    }
}

/// All ordered conditionals of a set of attributes; entry `(i, j)` is
/// P(X_j | X_i) with rows indexed by X_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseConditionals {
    pub attributes: Vec<String>,
    pub conditionals: Vec<Vec<Option<ConditionalDistribution>>>,
}

impl PairwiseConditionals {
    pub fn from_dataset(dataset: &Dataset) -> Result<Self> {
        let n = dataset.n_attributes();
        let conditionals = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (i != j)
                            .then(|| empirical_conditional(dataset, i, j))
                            .transpose()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            attributes: dataset.names(),
            conditionals,
        })
    }

    /// From joints keyed by ordered pair `(i, j)` with `i < j`, rows indexed
    /// by X_i.
    pub fn from_joints(
        attributes: Vec<String>,
        joints: &[((usize, usize), JointDistribution)],
    ) -> Result<Self> {
        let n = attributes.len();
        let mut conditionals = vec![vec![None; n]; n];
        for ((i, j), joint) in joints {
            let (i, j) = (*i, *j);
            if i >= n || j >= n || i == j {
                return Err(CplError::InvalidParameter(format!(
                    "joint index ({i}, {j}) out of range"
                )));
            }
            conditionals[i][j] = Some(conditional_from_joint(joint, Condition::OnRows));
            conditionals[j][i] = Some(conditional_from_joint(joint, Condition::OnCols));
        }
        for (i, row) in conditionals.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if i != j && c.is_none() {
                    return Err(CplError::MissingEntry { row: i, col: j });
                }
            }
        }
        Ok(Self {
            attributes,
            conditionals,
        })
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Result<&ConditionalDistribution> {
        self.conditionals
            .get(i)
            .and_then(|r| r.get(j))
            .and_then(Option::as_ref)
            .ok_or(CplError::MissingEntry { row: i, col: j })
    }
}

/// Entry `(i, j)` is the leakage on attribute i caused by attribute j; the
/// diagonal is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CplMatrix {
    pub attributes: Vec<String>,
    pub entries: Vec<Vec<Option<LeakagePair>>>,
}

impl CplMatrix {
    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Result<LeakagePair> {
        self.entries
            .get(i)
            .and_then(|r| r.get(j))
            .copied()
            .flatten()
            .ok_or(CplError::MissingEntry { row: i, col: j })
    }

    /// Leakages caused on attribute `i` by every other attribute.
    pub fn incoming(&self, i: usize) -> Result<Vec<LeakagePair>> {
        (0..self.len())
            .filter(|&j| j != i)
            .map(|j| self.get(i, j))
            .collect()
    }

    /// TPL bound of attribute `i` released under `own`.
    pub fn tpl(&self, i: usize, own: LeakagePair) -> Result<LeakagePair> {
        Ok(tpl_upper_bound(own, &self.incoming(i)?))
    }

    /// Off-diagonal leakage values in row-major order.
    pub fn off_diagonal(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(self.get(i, j)?.leakage);
                }
            }
        }
        Ok(out)
    }
}

/// Pairwise leakage matrix with a uniform budget for every attribute.
pub fn cpl_matrix(
    conds: &PairwiseConditionals,
    budget: &BudgetParams,
    engine: CplEngine,
) -> Result<CplMatrix> {
    let n = conds.len();
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| pairwise_leakage(conds.get(i, j)?, budget, engine))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = vec![vec![None; n]; n];
    for ((i, j), v) in cells.into_iter().zip(values) {
        entries[i][j] = Some(v);
    }
    Ok(CplMatrix {
        attributes: conds.attributes.clone(),
        entries,
    })
}

/// Total correlation-induced leakage: the sum of all off-diagonal entries,
/// +∞ if any is unbounded.
pub fn tcpl(m: &CplMatrix) -> Result<f64> {
    let n = m.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let e = m.get(i, j)?;
            if e.infinite {
                return Ok(f64::INFINITY);
            }
            total += e.leakage;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{perfect_copy, saturating_joint};

    fn lp(l: f64, r: f64) -> LeakagePair {
        LeakagePair::new(l, r).unwrap()
    }

    #[test]
    fn compose_examples() {
        assert_eq!(
            sequential_compose(&[lp(1.0, 0.0), lp(1.0, 0.0)]).unwrap(),
            lp(2.0, 0.0)
        );
        let c = sequential_compose(&[lp(0.5, 0.01), lp(0.3, 0.02)]).unwrap();
        assert!((c.leakage - 0.8).abs() < 1e-15 && (c.relaxation - 0.03).abs() < 1e-15);
        assert_eq!(sequential_compose(&[lp(0.7, 0.1)]).unwrap(), lp(0.7, 0.1));
        assert!(sequential_compose(&[]).is_err());
    }

    #[test]
    fn relaxation_overflow_is_flagged() {
        let c = sequential_compose(&[lp(1.0, 0.6), lp(1.0, 0.6)]).unwrap();
        assert!(c.relaxation_overflow);
        assert!(c.relaxation < 1.0);
    }

    #[test]
    fn infinite_propagates() {
        let c = tpl_upper_bound(lp(1.0, 0.0), &[LeakagePair::pure(f64::INFINITY)]);
        assert!(c.infinite && c.leakage.is_infinite());
    }

    #[test]
    fn tpl_examples() {
        let t = tpl_upper_bound(lp(1.0, 0.0), &[lp(0.2, 0.0), lp(0.1, 0.0)]);
        assert!((t.leakage - 1.3).abs() < 1e-15);
        assert_eq!(tpl_upper_bound(lp(1.0, 0.0), &[]), lp(1.0, 0.0));
    }

    #[test]
    fn tcpl_examples() {
        let m = CplMatrix {
            attributes: vec!["a".into(), "b".into()],
            entries: vec![
                vec![None, Some(lp(0.3, 0.0))],
                vec![Some(lp(0.1, 0.0)), None],
            ],
        };
        assert!((tcpl(&m).unwrap() - 0.4).abs() < 1e-15);
        let zero = CplMatrix {
            attributes: m.attributes.clone(),
            entries: vec![
                vec![None, Some(lp(0.0, 0.0))],
                vec![Some(lp(0.0, 0.0)), None],
            ],
        };
        assert_eq!(tcpl(&zero).unwrap(), 0.0);
        let missing = CplMatrix {
            attributes: m.attributes.clone(),
            entries: vec![vec![None, None], vec![None, None]],
        };
        assert!(matches!(
            tcpl(&missing),
            Err(CplError::MissingEntry { row: 0, col: 1 })
        ));
    }

    #[test]
    fn saturating_matrix() {
        let conds = PairwiseConditionals::from_joints(
            vec!["X_k".into(), "X_hat".into()],
            &[((0, 1), saturating_joint())],
        )
        .unwrap();
        let m = cpl_matrix(&conds, &BudgetParams::pure(1.0).unwrap(), CplEngine::Bound).unwrap();
        assert!((m.get(0, 1).unwrap().leakage - 1.0).abs() < 1e-12);
        assert!((m.get(1, 0).unwrap().leakage - 0.6203).abs() < 1e-3);
        assert!((tcpl(&m).unwrap() - 1.6203).abs() < 1e-3);
        let exact = cpl_matrix(
            &conds,
            &BudgetParams::pure(1.0).unwrap(),
            CplEngine::ExactGrr,
        )
        .unwrap();
        assert!((exact.get(1, 0).unwrap().leakage - m.get(1, 0).unwrap().leakage).abs() < 1e-9);
    }

    #[test]
    fn zero_epsilon_matrix() {
        let d = perfect_copy(500, 3, 2).unwrap();
        let conds = PairwiseConditionals::from_dataset(&d).unwrap();
        let m = cpl_matrix(&conds, &BudgetParams::pure(0.0).unwrap(), CplEngine::Bound).unwrap();
        assert_eq!(tcpl(&m).unwrap(), 0.0);
    }

    #[test]
    fn missing_joint_is_reported() {
        let err = PairwiseConditionals::from_joints(
            vec!["a".into(), "b".into(), "c".into()],
            &[((0, 1), saturating_joint())],
        );
        assert!(matches!(err, Err(CplError::MissingEntry { .. })));
    }

    proptest::proptest! {
        #[test]
        fn compose_is_associative(
            parts in proptest::collection::vec((0.0f64..5.0, 0.0f64..0.3), 3..8),
        ) {
            let parts: Vec<_> = parts.into_iter().map(|(l, r)| lp(l, r)).collect();
            let whole = sequential_compose(&parts).unwrap();
            let head = sequential_compose(&parts[..2]).unwrap();
            let mut regrouped = vec![head];
            regrouped.extend_from_slice(&parts[2..]);
            proptest::prop_assert_eq!(sequential_compose(&regrouped).unwrap(), whole);
            let tpl = tpl_upper_bound(parts[0], &parts[1..]);
            proptest::prop_assert!(tpl.leakage >= parts[0].leakage);
        }
    }
}
