//! Benchmarks for leakage analyzers (undershoot/overshoot against a
//! reference) and for mechanism utility versus total leakage.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::BudgetParams;
use crate::composition::{
    cpl_matrix, tcpl, CplEngine, CplMatrix, LeakagePair, PairwiseConditionals,
};
use crate::dataset::expand_dataset;
use crate::dataset::Dataset;
use crate::error::{CplError, Result};
use crate::mechanisms::{MechanismKind, MechanismSpec};
use crate::metrics::abs_pcc_matrix;
use crate::statistical::{
    perturb_and_estimate, perturb_dataset, statistical_leakage, EstimationConfig,
};

/// Undershoot/overshoot values within this distance of zero count as zero.
pub const REGION_TOLERANCE: f64 = 1e-9;

/// GRF thresholds on |PCC|.
pub const GRF_THRESHOLDS: [f64; 2] = [0.2, 0.4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Matches the reference.
    P1,
    /// Only underestimates.
    R1,
    /// Only overestimates.
    R2,
    /// Both under- and overestimates.
    R3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPoint {
    pub undershoot: f64,
    pub overshoot: f64,
    pub region: Region,
}

impl BenchmarkPoint {
    /// Euclidean distance from the origin of the (undershoot, overshoot)
    /// plane.
    pub fn distance(&self) -> f64 {
        self.undershoot.hypot(self.overshoot)
    }
}

/// Normalized undershoot Σ_{l*≥l}(l* − l)/(εq) and overshoot
/// Σ_{l*<l}(l − l*)/(εq) of `estimates` against `reference`.
pub fn undershoot_overshoot(
    reference: &[f64],
    estimates: &[f64],
    epsilon: f64,
) -> Result<BenchmarkPoint> {
    if reference.len() != estimates.len() {
        return Err(CplError::DimensionMismatch(format!(
            "{} reference values but {} estimates",
            reference.len(),
            estimates.len()
        )));
    }
    if reference.is_empty() {
        return Err(CplError::InvalidParameter("nothing to compare".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CplError::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let scale = epsilon * reference.len() as f64;
    let (mut under, mut over) = (0.0, 0.0);
    for (&r, &e) in reference.iter().zip(estimates) {
        if r - e >= 0.0 {
            under += r - e;
        } else {
            over += e - r;
        }
    }
    let (undershoot, overshoot) = (under / scale, over / scale);
    let region = match (
        undershoot <= REGION_TOLERANCE,
        overshoot <= REGION_TOLERANCE,
    ) {
        (true, true) => Region::P1,
        (false, true) => Region::R1,
        (true, false) => Region::R2,
        (false, false) => Region::R3,
    };
    Ok(BenchmarkPoint {
        undershoot,
        overshoot,
        region,
    })
}

fn uniform_matrix(attributes: Vec<String>, value: impl Fn(usize, usize) -> f64) -> CplMatrix {
    let n = attributes.len();
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (i != j).then(|| LeakagePair::pure(value(i, j))))
                .collect()
        })
        .collect();
    CplMatrix {
        attributes,
        entries,
    }
}

/// Every neighbor assumed perfectly correlated: each pairwise leakage is ε.
pub fn baseline_spl_anl(attributes: Vec<String>, epsilon: f64) -> CplMatrix {
    uniform_matrix(attributes, |_, _| epsilon)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the graph with an edge wherever |PCC| ≥ `threshold`.
pub fn correlation_components(abs_pcc: &[Vec<f64>], threshold: f64) -> Vec<usize> {
    let n = abs_pcc.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if abs_pcc[i][j] >= threshold {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Dependency-graph baseline: pairs inside one |PCC| component leak ε, pairs
/// across components leak nothing.
pub fn baseline_grf(
    attributes: Vec<String>,
    abs_pcc: &[Vec<f64>],
    threshold: f64,
    epsilon: f64,
) -> Result<CplMatrix> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(CplError::InvalidParameter(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    if abs_pcc.len() != attributes.len() || abs_pcc.iter().any(|r| r.len() != attributes.len()) {
        return Err(CplError::DimensionMismatch(
            "PCC grid does not match the attribute count".into(),
        ));
    }
    let comp = correlation_components(abs_pcc, threshold);
    Ok(uniform_matrix(attributes, |i, j| {
        if comp[i] == comp[j] {
            epsilon
        } else {
            0.0
        }
    }))
}

/// Normalized squared error between estimated and reference leakages:
/// Σ(l̃ − l*)² / Σ l*².
pub fn nmse_cpl(reference: &[f64], estimates: &[f64]) -> Result<f64> {
    if reference.len() != estimates.len() {
        return Err(CplError::DimensionMismatch(
            "reference and estimates differ in length".into(),
        ));
    }
    let err: f64 = reference
        .iter()
        .zip(estimates)
        .map(|(r, e)| (e - r).powi(2))
        .sum();
    let norm: f64 = reference.iter().map(|r| r * r).sum();
    Ok(if norm > 0.0 {
        err / norm
    } else if err == 0.0 {
        0.0
    } else {
        f64::INFINITY
    })
}

/// Where the reference leakages come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSource {
    /// Mechanism-agnostic bound.
    Bound,
    /// Exact leakage under GRR.
    ExactGrr,
    /// Exact leakage under EXP.
    ExactExp,
    /// Monte Carlo estimate under GRR.
    Statistical,
}

/// Statistical leakage matrix for attributes released through `kind`.
pub fn statistical_matrix(
    dataset: &Dataset,
    kind: MechanismKind,
    epsilon: f64,
    cfg: &EstimationConfig,
) -> Result<CplMatrix> {
    let specs = uniform_specs(dataset, kind, epsilon)?;
    let perturbed = perturb_dataset(dataset, &specs, cfg)?;
    let original = expand_dataset(dataset, cfg.expansion)?;
    statistical_matrix_from(&perturbed, &original)
}

fn statistical_matrix_from(perturbed: &Dataset, original: &Dataset) -> Result<CplMatrix> {
    let n = original.n_attributes();
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| statistical_leakage(perturbed, original, i, &[j]))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = vec![vec![None; n]; n];
    for ((i, j), v) in cells.into_iter().zip(values) {
        entries[i][j] = Some(LeakagePair::pure(v));
    }
    Ok(CplMatrix {
        attributes: original.names(),
        entries,
    })
}

fn uniform_specs(
    dataset: &Dataset,
    kind: MechanismKind,
    epsilon: f64,
) -> Result<Vec<MechanismSpec>> {
    (0..dataset.n_attributes())
        .map(|a| MechanismSpec::new(kind, epsilon, dataset.alphabet_size(a)))
        .collect()
}

fn reference_matrix(
    dataset: &Dataset,
    conds: &PairwiseConditionals,
    source: ReferenceSource,
    budget: &BudgetParams,
    cfg: &EstimationConfig,
) -> Result<CplMatrix> {
    match source {
        ReferenceSource::Bound => cpl_matrix(conds, budget, CplEngine::Bound),
        ReferenceSource::ExactGrr => cpl_matrix(conds, budget, CplEngine::ExactGrr),
        ReferenceSource::ExactExp => cpl_matrix(conds, budget, CplEngine::ExactExp),
        ReferenceSource::Statistical => {
            statistical_matrix(dataset, MechanismKind::Grr, budget.epsilon, cfg)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerPoint {
    pub analyzer: String,
    pub epsilon: f64,
    #[serde(flatten)]
    pub point: BenchmarkPoint,
    pub distance: f64,
}

/// Places every analyzer on the undershoot/overshoot plane against
/// `source` at each ε: SPL-ANL, GRF at each threshold, the exact GRR and EXP
/// analyses, and the bound.
pub fn analyzer_benchmark(
    dataset: &Dataset,
    epsilons: &[f64],
    source: ReferenceSource,
    cfg: &EstimationConfig,
) -> Result<Vec<AnalyzerPoint>> {
    if dataset.n_attributes() < 2 {
        return Err(CplError::InvalidParameter(
            "benchmarking needs at least two attributes".into(),
        ));
    }
    let conds = PairwiseConditionals::from_dataset(dataset)?;
    let pcc = abs_pcc_matrix(dataset)?;
    let names = dataset.names();
    let mut out = Vec::new();
    for &epsilon in epsilons {
        let budget = BudgetParams::pure(epsilon)?;
        let reference = reference_matrix(dataset, &conds, source, &budget, cfg)?.off_diagonal()?;
        let mut analyzers: Vec<(String, CplMatrix)> =
            vec![("SPL-ANL".into(), baseline_spl_anl(names.clone(), epsilon))];
        for thr in GRF_THRESHOLDS {
            analyzers.push((
                format!("GRF-{thr}"),
                baseline_grf(names.clone(), &pcc, thr, epsilon)?,
            ));
        }
        analyzers.push((
            "GRR-ANL".into(),
            cpl_matrix(&conds, &budget, CplEngine::ExactGrr)?,
        ));
        analyzers.push((
            "EXP-ANL".into(),
            cpl_matrix(&conds, &budget, CplEngine::ExactExp)?,
        ));
        analyzers.push((
            "BOUND-ANL".into(),
            cpl_matrix(&conds, &budget, CplEngine::Bound)?,
        ));
        for (analyzer, m) in analyzers {
            let point = undershoot_overshoot(&reference, &m.off_diagonal()?, epsilon)?;
            out.push(AnalyzerPoint {
                analyzer,
                epsilon,
                distance: point.distance(),
                point,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport {
    /// Σ(f̂ − f)² / Σ f² pooled over attributes.
    pub freq_nmse: f64,
    /// Fraction of decoded cells differing from the input.
    pub zero_one_error: f64,
    /// Total leakage under the mechanism over the bound's total.
    pub norm_tcpl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityRow {
    pub mechanism: MechanismKind,
    pub epsilon: f64,
    #[serde(flatten)]
    pub report: UtilityReport,
}

/// Frequency-estimation error, decoding error and normalized total leakage
/// for every (mechanism, ε) cell. The leakage numerator is exact for GRR/EXP
/// and statistical otherwise; the denominator is the bound's total.
pub fn utility_benchmark(
    dataset: &Dataset,
    kinds: &[MechanismKind],
    epsilons: &[f64],
    cfg: &EstimationConfig,
) -> Result<Vec<UtilityRow>> {
    let conds = PairwiseConditionals::from_dataset(dataset)?;
    let original = expand_dataset(dataset, cfg.expansion)?;
    let truth: Vec<Vec<f64>> = (0..dataset.n_attributes())
        .map(|a| {
            let mut f = vec![0.0; dataset.alphabet_size(a)];
            for &v in dataset.column(a) {
                f[v as usize] += 1.0;
            }
            let n = dataset.n_rows() as f64;
            f.iter().map(|c| c / n).collect()
        })
        .collect();
    let grid: Vec<(MechanismKind, f64)> = kinds
        .iter()
        .flat_map(|&k| epsilons.iter().map(move |&e| (k, e)))
        .collect();
    grid.par_iter()
        .map(|&(kind, epsilon)| {
            let budget = BudgetParams::pure(epsilon)?;
            let specs = uniform_specs(dataset, kind, epsilon)?;
            let (perturbed, estimates) = perturb_and_estimate(dataset, &specs, cfg)?;

            let (mut err, mut norm) = (0.0, 0.0);
            for (f, est) in truth.iter().zip(&estimates) {
                for (t, e) in f.iter().zip(est.as_slice()) {
                    err += (e - t).powi(2);
                    norm += t * t;
                }
            }
            let mut mismatches = 0u64;
            for a in 0..dataset.n_attributes() {
                mismatches += perturbed
                    .column(a)
                    .iter()
                    .zip(original.column(a))
                    .filter(|(p, o)| p != o)
                    .count() as u64;
            }
            let cells = (original.n_rows() * original.n_attributes()) as f64;

            let actual = match kind {
                MechanismKind::Grr => cpl_matrix(&conds, &budget, CplEngine::ExactGrr)?,
                MechanismKind::Exp => cpl_matrix(&conds, &budget, CplEngine::ExactExp)?,
                _ => statistical_matrix_from(&perturbed, &original)?,
            };
            let bound = tcpl(&cpl_matrix(&conds, &budget, CplEngine::Bound)?)?;
            let actual = tcpl(&actual)?;
            Ok(UtilityRow {
                mechanism: kind,
                epsilon,
                report: UtilityReport {
                    freq_nmse: if norm > 0.0 { err / norm } else { 0.0 },
                    zero_one_error: mismatches as f64 / cells,
                    norm_tcpl: if bound > 0.0 { actual / bound } else { 0.0 },
                },
            })
        })
        .collect()
}
