//! Upper bound on correlation-induced leakage from the neighbor's privacy
//! budget alone, plus its saturation limit and brute-force oracle.

use serde::{Deserialize, Serialize};

use crate::distribution::ConditionalDistribution;
use crate::error::{CplError, Result};

/// Largest alphabet the subset enumeration accepts.
pub const BRUTEFORCE_LIMIT: usize = 20;

/// (ε, δ) budget of the neighbor's mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetParams {
    pub epsilon: f64,
    #[serde(default)]
    pub delta: f64,
}

impl BudgetParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let b = Self { epsilon, delta };
        b.validate()?;
        Ok(b)
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(CplError::InvalidParameter(format!(
                "epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(CplError::InvalidParameter(format!(
                "delta must lie in [0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedCplResult {
    /// ln H̄* in nats.
    pub leakage_nats: f64,
    /// δ·A at the maximizing pair.
    pub relaxation: f64,
    /// Neighbor symbols admitted at the maximizing pair, ascending.
    pub subset: Vec<usize>,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// Conditioning rows (x, x′) achieving the maximum.
    pub witness_pair: (usize, usize),
}

/// ln(1 + a(e^ε − 1)) without overflow for large ε.
fn ln_one_plus_scaled(a: f64, epsilon: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else if epsilon <= 30.0 {
        (a * epsilon.exp_m1()).ln_1p()
    } else {
        epsilon + a.ln() + ((1.0 - a) * (-epsilon).exp() / a).ln_1p()
    }
}

/// ln H̄ = ln((1 + Aλ) / (1 + Bλ)) with λ = e^ε − 1.
pub fn log_h(a: f64, b: f64, epsilon: f64) -> f64 {
    ln_one_plus_scaled(a, epsilon) - ln_one_plus_scaled(b, epsilon)
}

struct PairBound {
    log_h: f64,
    subset: Vec<usize>,
    a: f64,
    b: f64,
}

/// Ratio g/g′ in log space; +∞ when only g′ vanishes, `None` for 0/0.
fn log_ratio(g: f64, g_prime: f64) -> Option<f64> {
    match (g > 0.0, g_prime > 0.0) {
        (false, false) => None,
        (true, false) => Some(f64::INFINITY),
        (false, true) => Some(f64::NEG_INFINITY),
        (true, true) => Some(g.ln() - g_prime.ln()),
    }
}

fn greedy_pair(g: &[f64], g_prime: &[f64], epsilon: f64) -> PairBound {
    let mut order: Vec<(usize, f64)> = g
        .iter()
        .zip(g_prime)
        .enumerate()
        .filter_map(|(i, (&a, &b))| log_ratio(a, b).map(|q| (i, q)))
        .collect();
    // descending ratio, ascending index among ties
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let (mut a, mut b) = (0.0, 0.0);
    let mut current = 0.0;
    let mut subset = Vec::new();
    for (i, q) in order {
        if q < current {
            break;
        }
        a += g[i];
        b += g_prime[i];
        current = log_h(a, b, epsilon);
        subset.push(i);
    }
    subset.sort_unstable();
    PairBound {
        log_h: current,
        subset,
        a,
        b,
    }
}

fn best_over_pairs(
    cond: &ConditionalDistribution,
    budget: &BudgetParams,
    pair_bound: impl Fn(&[f64], &[f64]) -> PairBound,
) -> Result<BoundedCplResult> {
    budget.validate()?;
    let rows = cond.comparable_rows()?;
    let mut best: Option<(PairBound, (usize, usize))> = None;
    for &x in &rows {
        for &x_prime in &rows {
            if x == x_prime {
                continue;
            }
            let pb = pair_bound(cond.row(x), cond.row(x_prime));
            if best.as_ref().is_none_or(|(cur, _)| pb.log_h > cur.log_h) {
                best = Some((pb, (x, x_prime)));
            }
        }
    }
    let (pb, witness_pair) = best.expect("at least two rows");
    Ok(BoundedCplResult {
        leakage_nats: pb.log_h.max(0.0),
        relaxation: budget.delta * pb.a,
        subset: pb.subset,
        a: pb.a,
        b: pb.b,
        witness_pair,
    })
}

/// Greedy tight upper bound on the leakage of the row attribute of `cond`
/// (P(neighbor | attribute)) caused by a neighbor released under `budget`.
pub fn cpl_bound(
    cond: &ConditionalDistribution,
    budget: &BudgetParams,
) -> Result<BoundedCplResult> {
    best_over_pairs(cond, budget, |g, gp| greedy_pair(g, gp, budget.epsilon))
}

/// Exhaustive maximum over every nonempty subset; the oracle for [`cpl_bound`].
pub fn cpl_bound_bruteforce(
    cond: &ConditionalDistribution,
    budget: &BudgetParams,
) -> Result<BoundedCplResult> {
    let t = cond.n_cols();
    if t > BRUTEFORCE_LIMIT {
        return Err(CplError::TooLarge {
            t,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    best_over_pairs(cond, budget, |g, gp| {
        let mut best = PairBound {
            log_h: f64::NEG_INFINITY,
            subset: Vec::new(),
            a: 0.0,
            b: 0.0,
        };
        for mask in 1u32..(1u32 << t) {
            let (mut a, mut b) = (0.0, 0.0);
            for i in 0..t {
                if mask & (1 << i) != 0 {
                    a += g[i];
                    b += gp[i];
                }
            }
            let h = log_h(a, b, budget.epsilon);
            if h > best.log_h {
                let subset = (0..t).filter(|i| mask & (1 << i) != 0).collect();
                best = PairBound {
                    log_h: h,
                    subset,
                    a,
                    b,
                };
            }
        }
        best
    })
}

/// Saturation value of the bound as ε → ∞: ln max p(x̂|x) / p(x̂|x′) over
/// present rows. Returns +∞ when some p(x̂|x′) = 0 < p(x̂|x).
pub fn cpl_limit(cond: &ConditionalDistribution) -> Result<f64> {
    let rows = cond.comparable_rows()?;
    let mut best = 0.0f64;
    for &x in &rows {
        for &x_prime in &rows {
            if x == x_prime {
                continue;
            }
            for (&g, &gp) in cond.row(x).iter().zip(cond.row(x_prime)) {
                if let Some(q) = log_ratio(g, gp) {
                    best = best.max(q);
                }
            }
        }
    }
    Ok(best)
}

/// Two present rows with disjoint supports, if any. Exactly then does the
/// bound reach ε.
pub fn is_max_attainable(cond: &ConditionalDistribution) -> Option<(usize, usize)> {
    let rows = cond.present_rows();
    for (i, &x) in rows.iter().enumerate() {
        for &x_prime in &rows[i + 1..] {
            let disjoint = cond
                .row(x)
                .iter()
                .zip(cond.row(x_prime))
                .all(|(&g, &gp)| g == 0.0 || gp == 0.0);
            if disjoint {
                return Some((x, x_prime));
            }
        }
    }
    None
}
