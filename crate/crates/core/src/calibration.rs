//! Largest uniform per-attribute budget whose worst total leakage stays
//! within a target.

use serde::{Deserialize, Serialize};

use crate::bound::BudgetParams;
use crate::composition::{cpl_matrix, CplEngine, LeakagePair, PairwiseConditionals};
use crate::error::{CplError, Result};

/// Slack allowed when comparing a total leakage against the target.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStep {
    pub epsilon: f64,
    pub worst_attribute: usize,
    pub worst_tpl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub epsilon_star: f64,
    pub worst_attribute: usize,
    pub worst_tpl: f64,
    /// Accepted steps beyond the ε̄/n starting point.
    pub iterations: usize,
    /// Every evaluated budget in order, including the first infeasible one.
    pub trace: Vec<CalibrationStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationEngine {
    /// Mechanism-agnostic bound; safe for any pure-LDP mechanism.
    #[default]
    Bound,
    /// Exact leakage under GRR.
    ExactGrr,
}

impl From<CalibrationEngine> for CplEngine {
    fn from(e: CalibrationEngine) -> Self {
        match e {
            CalibrationEngine::Bound => CplEngine::Bound,
            CalibrationEngine::ExactGrr => CplEngine::ExactGrr,
        }
    }
}

/// Worst attribute and its total leakage when every attribute spends ε.
pub fn worst_tpl(
    conds: &PairwiseConditionals,
    epsilon: f64,
    engine: CalibrationEngine,
) -> Result<CalibrationStep> {
    let budget = BudgetParams::pure(epsilon)?;
    let n = conds.len();
    let (worst_attribute, worst_tpl) = if n == 1 {
        (0, epsilon)
    } else {
        let m = cpl_matrix(conds, &budget, engine.into())?;
        let mut worst = (0, f64::NEG_INFINITY);
        for i in 0..n {
            let t = m.tpl(i, LeakagePair::pure(epsilon))?;
            let v = if t.infinite { f64::INFINITY } else { t.leakage };
            if v > worst.1 {
                worst = (i, v);
            }
        }
        worst
    };
    Ok(CalibrationStep {
        epsilon,
        worst_attribute,
        worst_tpl,
    })
}

fn check_inputs(conds: &PairwiseConditionals, epsilon_bar: f64, step: f64) -> Result<()> {
    if conds.is_empty() {
        return Err(CplError::InvalidParameter(
            "calibration needs at least one attribute".into(),
        ));
    }
    if !(epsilon_bar > 0.0 && epsilon_bar.is_finite()) {
        return Err(CplError::InvalidParameter(format!(
            "target budget must be positive, got {epsilon_bar}"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CplError::InvalidParameter(format!(
            "step must be positive, got {step}"
        )));
    }
    Ok(())
}

fn feasible(s: &CalibrationStep, epsilon_bar: f64) -> bool {
    s.worst_tpl <= epsilon_bar + FEASIBILITY_TOLERANCE
}

fn initial(
    conds: &PairwiseConditionals,
    epsilon_bar: f64,
    engine: CalibrationEngine,
) -> Result<CalibrationStep> {
    let start = worst_tpl(conds, epsilon_bar / conds.len() as f64, engine)?;
    if !feasible(&start, epsilon_bar) {
        return Err(CplError::Numerical(format!(
            "total leakage {} exceeds the target {epsilon_bar} at the equal-split budget {}",
            start.worst_tpl, start.epsilon
        )));
    }
    Ok(start)
}

/// Steps ε up from ε̄/n by `step` while the worst total leakage stays within
/// ε̄, and returns the last feasible ε.
pub fn calibrate(
    conds: &PairwiseConditionals,
    epsilon_bar: f64,
    step: f64,
    engine: CalibrationEngine,
) -> Result<CalibrationResult> {
    check_inputs(conds, epsilon_bar, step)?;
    let start = initial(conds, epsilon_bar, engine)?;
    let mut trace = vec![start];
    let mut best = start;
    let mut iterations = 0;
    loop {
        let next = worst_tpl(
            conds,
            start.epsilon + (iterations + 1) as f64 * step,
            engine,
        )?;
        trace.push(next);
        if !feasible(&next, epsilon_bar) {
            break;
        }
        best = next;
        iterations += 1;
    }
    Ok(CalibrationResult {
        epsilon_star: best.epsilon,
        worst_attribute: best.worst_attribute,
        worst_tpl: best.worst_tpl,
        iterations,
        trace,
    })
}

/// Same constraint solved by bisection on [ε̄/n, ε̄ + step], narrowing until
/// the bracket is below `step / 4`. Relies on the worst total leakage being
/// nondecreasing in ε.
pub fn calibrate_bisection(
    conds: &PairwiseConditionals,
    epsilon_bar: f64,
    step: f64,
    engine: CalibrationEngine,
) -> Result<CalibrationResult> {
    check_inputs(conds, epsilon_bar, step)?;
    let mut lo = initial(conds, epsilon_bar, engine)?;
    let mut hi = epsilon_bar + step;
    let mut trace = vec![lo];
    let mut iterations = 0;
    while hi - lo.epsilon > step / 4.0 {
        let mid = worst_tpl(conds, 0.5 * (lo.epsilon + hi), engine)?;
        trace.push(mid);
        if feasible(&mid, epsilon_bar) {
            lo = mid;
        } else {
            hi = mid.epsilon;
        }
        iterations += 1;
    }
    Ok(CalibrationResult {
        epsilon_star: lo.epsilon,
        worst_attribute: lo.worst_attribute,
        worst_tpl: lo.worst_tpl,
        iterations,
        trace,
    })
}
