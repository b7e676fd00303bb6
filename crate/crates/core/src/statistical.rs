//! Monte Carlo leakage estimation: expand the dataset, release every
//! attribute through its mechanism, decode the reports back into the input
//! alphabets, and measure the largest ratio of empirical conditionals
//! p̂(w | x) / p̂(w | x′). Significance comes from a permutation test.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Hypergeometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{expand_dataset, Dataset};
use crate::distribution::ProbabilityVector;
use crate::error::{CplError, Result};
use crate::mechanisms::{decode, perturb, FrequencyAccumulator, MechanismKind, MechanismSpec};
use crate::rng::{stage, stream, unit, ChaCha8Rng};

/// Largest joint output alphabet a conditional table may span.
pub const MAX_OUTPUT_CELLS: u128 = 1_000_000;

/// Rows perturbed per independent random stream.
pub const BLOCK_ROWS: usize = 8192;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    /// Replication factor r.
    pub expansion: usize,
    pub surrogates: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            expansion: 50,
            surrogates: 1000,
            alpha: 0.05,
            seed: 0,
        }
    }
}

impl EstimationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.expansion == 0 {
            return Err(CplError::InvalidParameter(
                "expansion factor must be at least 1".into(),
            ));
        }
        if self.surrogates == 0 {
            return Err(CplError::InvalidParameter(
                "need at least one surrogate".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CplError::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticalCplResult {
    pub leakage_nats: f64,
    pub p_value: f64,
    pub significant: bool,
    /// Zero-count (x, w) cells left out of the supremum.
    pub excluded_cells: u64,
}

fn attribute_prior(column: &[u32], k: usize) -> ProbabilityVector {
    let mut counts = vec![0.0; k];
    for &v in column {
        counts[v as usize] += 1.0;
    }
    ProbabilityVector::from_weights(counts)
}

/// Expands `original` by `cfg.expansion`, perturbs every row of every
/// attribute with fresh randomness, and decodes the reports into the input
/// alphabets. Row `b·N + i` of the result derives from original row `i`.
///
/// SHE decoding uses the attribute's empirical marginal as the adversary's
/// prior.
pub fn perturb_dataset(
    original: &Dataset,
    specs: &[MechanismSpec],
    cfg: &EstimationConfig,
) -> Result<Dataset> {
    let columns = release_columns(original, specs, cfg, false)?
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    original.with_columns(columns)
}

/// Like [`perturb_dataset`], also returning each attribute's frequency
/// estimate computed from the raw reports.
pub fn perturb_and_estimate(
    original: &Dataset,
    specs: &[MechanismSpec],
    cfg: &EstimationConfig,
) -> Result<(Dataset, Vec<ProbabilityVector>)> {
    let (columns, estimates): (Vec<_>, Vec<_>) = release_columns(original, specs, cfg, true)?
        .into_iter()
        .map(|(c, acc)| (c, acc.map(|a| a.finish())))
        .unzip();
    let estimates = estimates
        .into_iter()
        .map(|e| e.expect("accumulated"))
        .collect();
    Ok((original.with_columns(columns)?, estimates))
}

type ReleasedColumn = (Vec<u32>, Option<FrequencyAccumulator>);

fn release_columns(
    original: &Dataset,
    specs: &[MechanismSpec],
    cfg: &EstimationConfig,
    accumulate: bool,
) -> Result<Vec<ReleasedColumn>> {
    cfg.validate()?;
    if specs.len() != original.n_attributes() {
        return Err(CplError::DimensionMismatch(format!(
            "{} mechanism specs for {} attributes",
            specs.len(),
            original.n_attributes()
        )));
    }
    let n = original.n_rows();
    if n == 0 {
        return Err(CplError::EmptyDataset);
    }
    let total = n
        .checked_mul(cfg.expansion)
        .ok_or_else(|| CplError::InvalidParameter("expanded dataset too large".into()))?;
    let mut columns = Vec::with_capacity(specs.len());
    for (a, spec) in specs.iter().enumerate() {
        let k = original.alphabet_size(a);
        if spec.k() != k {
            return Err(CplError::DimensionMismatch(format!(
                "attribute `{}` has {k} symbols but its mechanism expects {}",
                original.attribute(a).name,
                spec.k()
            )));
        }
        let source = original.column(a);
        let prior = (spec.kind() == MechanismKind::She).then(|| attribute_prior(source, k));
        let mut out = vec![0u32; total];
        let partials = out
            .par_chunks_mut(BLOCK_ROWS)
            .enumerate()
            .map(|(block, chunk)| -> Result<Option<FrequencyAccumulator>> {
                let mut rng = stream(cfg.seed, stage::PERTURB, unit(&[a as u64, block as u64]));
                let mut acc = accumulate.then(|| FrequencyAccumulator::new(spec));
                let start = block * BLOCK_ROWS;
                for (offset, slot) in chunk.iter_mut().enumerate() {
                    let value = source[(start + offset) % n] as usize;
                    let report = perturb(spec, value, &mut rng)?;
                    if let Some(acc) = acc.as_mut() {
                        acc.add(&report)?;
                    }
                    *slot = decode(spec, &report, &mut rng, prior.as_ref())? as u32;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        // merge in block order so floating-point sums do not depend on scheduling
        let merged = accumulate.then(|| {
            let mut acc = FrequencyAccumulator::new(spec);
            for p in partials.iter().flatten() {
                acc.merge(p);
            }
            acc
        });
        columns.push((out, merged));
    }
    Ok(columns)
}

/// Expanded original and its decoded release, row-aligned.
#[derive(Debug, Clone)]
pub struct Release {
    pub original: Dataset,
    pub perturbed: Dataset,
}

pub fn release(
    original: &Dataset,
    specs: &[MechanismSpec],
    cfg: &EstimationConfig,
) -> Result<Release> {
    Ok(Release {
        perturbed: perturb_dataset(original, specs, cfg)?,
        original: expand_dataset(original, cfg.expansion)?,
    })
}

/// Column indices and radices of the decoded tuple W.
struct OutputTuple {
    columns: Vec<usize>,
    radices: Vec<u32>,
    cells: usize,
}

impl OutputTuple {
    fn new(perturbed: &Dataset, columns: Vec<usize>) -> Result<Self> {
        let radices: Vec<u32> = columns
            .iter()
            .map(|&c| perturbed.alphabet_size(c) as u32)
            .collect();
        let cells: u128 = radices.iter().map(|&r| r as u128).product();
        if cells > MAX_OUTPUT_CELLS {
            return Err(CplError::ProductAlphabetTooLarge {
                cells,
                limit: MAX_OUTPUT_CELLS,
            });
        }
        Ok(Self {
            columns,
            radices,
            cells: cells as usize,
        })
    }

    fn encode<'a>(&self, cols: impl Iterator<Item = &'a [u32]>) -> Vec<u32> {
        let mut codes: Vec<u32> = Vec::new();
        for (col, &radix) in cols.zip(&self.radices) {
            if codes.is_empty() {
                codes = col.to_vec();
            } else {
                for (c, &v) in codes.iter_mut().zip(col) {
                    *c = *c * radix + v;
                }
            }
        }
        codes
    }

    fn observed(&self, perturbed: &Dataset) -> Vec<u32> {
        self.encode(self.columns.iter().map(|&c| perturbed.column(c)))
    }

    /// Every column of W shuffled independently.
    fn surrogate(&self, perturbed: &Dataset, rng: &mut ChaCha8Rng) -> Vec<u32> {
        let shuffled: Vec<Vec<u32>> = self
            .columns
            .iter()
            .map(|&c| {
                let mut col = perturbed.column(c).to_vec();
                col.shuffle(rng);
                col
            })
            .collect();
        self.encode(shuffled.iter().map(Vec::as_slice))
    }
}

struct LeakageStat {
    leakage: f64,
    excluded: u64,
}

/// Counts of (target symbol, output cell) pairs, row-major by target symbol.
struct ContingencyTable {
    counts: Vec<u64>,
    totals: Vec<u64>,
    cells: usize,
}

impl ContingencyTable {
    fn count(target: &[u32], m: usize, codes: &[u32], cells: usize) -> Self {
        let mut counts = vec![0u64; m * cells];
        let mut totals = vec![0u64; m];
        for (&x, &w) in target.iter().zip(codes) {
            counts[x as usize * cells + w as usize] += 1;
            totals[x as usize] += 1;
        }
        Self {
            counts,
            totals,
            cells,
        }
    }

    fn column_totals(&self) -> Vec<u64> {
        let mut cols = vec![0u64; self.cells];
        for row in self.counts.chunks(self.cells) {
            for (c, &n) in cols.iter_mut().zip(row) {
                *c += n;
            }
        }
        cols
    }

    /// A table drawn from the permutation distribution: same row and column
    /// totals as `self`, cells filled by sequential hypergeometric draws.
    /// Equivalent to shuffling the output codes against the target column.
    fn permuted(&self, rng: &mut ChaCha8Rng) -> Self {
        let mut remaining = self.column_totals();
        let mut counts = vec![0u64; self.counts.len()];
        for (row, &total) in counts.chunks_mut(self.cells).zip(&self.totals) {
            let mut pool: u64 = remaining.iter().sum();
            let mut need = total;
            for (slot, left) in row.iter_mut().zip(remaining.iter_mut()) {
                if need == 0 {
                    break;
                }
                let k = if *left == pool {
                    need
                } else if *left == 0 {
                    0
                } else {
                    Hypergeometric::new(pool, *left, need)
                        .expect("valid hypergeometric parameters")
                        .sample(rng)
                };
                pool -= *left;
                *slot = k;
                *left -= k;
                need -= k;
            }
        }
        Self {
            counts,
            totals: self.totals.clone(),
            cells: self.cells,
        }
    }

    /// Largest ln(p̂(w|x) / p̂(w|x′)) over cells where both counts are
    /// positive.
    fn sup_ratio(&self) -> Result<LeakageStat> {
        let cells = self.cells;
        let present: Vec<usize> = (0..self.totals.len())
            .filter(|&x| self.totals[x] > 0)
            .collect();
        if present.len() < 2 {
            return Err(CplError::TooFewRows {
                found: present.len(),
            });
        }
        let mut best: Option<f64> = None;
        let mut excluded = 0u64;
        for w in 0..cells {
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut positive = 0;
            let mut zero = 0;
            for &x in &present {
                let c = self.counts[x * cells + w];
                if c == 0 {
                    zero += 1;
                    continue;
                }
                positive += 1;
                let p = c as f64 / self.totals[x] as f64;
                hi = hi.max(p);
                lo = lo.min(p);
            }
            if positive == 0 {
                continue;
            }
            excluded += zero;
            if positive >= 2 {
                let l = (hi / lo).ln();
                best = Some(best.map_or(l, |b: f64| b.max(l)));
            }
        }
        match best {
            Some(l) => Ok(LeakageStat {
                leakage: l.max(0.0),
                excluded,
            }),
            None => Err(CplError::InsufficientData(
                "no decoded output was observed under two different target symbols".into(),
            )),
        }
    }
}

fn sup_ratio(target: &[u32], m: usize, codes: &[u32], cells: usize) -> Result<LeakageStat> {
    ContingencyTable::count(target, m, codes, cells).sup_ratio()
}

fn check_aligned(perturbed: &Dataset, original: &Dataset, target: usize) -> Result<()> {
    if perturbed.n_rows() != original.n_rows()
        || perturbed.n_attributes() != original.n_attributes()
    {
        return Err(CplError::DimensionMismatch(format!(
            "perturbed dataset is {}x{}, original is {}x{}",
            perturbed.n_rows(),
            perturbed.n_attributes(),
            original.n_rows(),
            original.n_attributes()
        )));
    }
    if perturbed.n_rows() == 0 {
        return Err(CplError::EmptyDataset);
    }
    original.check_attribute(target)
}

fn check_neighbors(original: &Dataset, target: usize, neighbors: &[usize]) -> Result<()> {
    if neighbors.is_empty() {
        return Err(CplError::InvalidParameter("neighbor set is empty".into()));
    }
    for (i, &z) in neighbors.iter().enumerate() {
        original.check_attribute(z)?;
        if z == target {
            return Err(CplError::InvalidParameter(
                "neighbor set must exclude the target".into(),
            ));
        }
        if neighbors[..i].contains(&z) {
            return Err(CplError::InvalidParameter(format!(
                "neighbor {z} listed twice"
            )));
        }
    }
    Ok(())
}

fn estimate_with(
    perturbed: &Dataset,
    original: &Dataset,
    target: usize,
    tuple: OutputTuple,
    cfg: &EstimationConfig,
) -> Result<StatisticalCplResult> {
    cfg.validate()?;
    let x = original.column(target);
    let m = original.alphabet_size(target);
    let table = ContingencyTable::count(x, m, &tuple.observed(perturbed), tuple.cells);
    let observed = table.sup_ratio()?;
    let exceed: usize = (0..cfg.surrogates)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream(cfg.seed, stage::SURROGATE, s as u64);
            // one output column: shuffling it only matters through the table
            let surrogate = if tuple.columns.len() == 1 {
                table.permuted(&mut rng).sup_ratio()
            } else {
                sup_ratio(x, m, &tuple.surrogate(perturbed, &mut rng), tuple.cells)
            };
            // a surrogate without any admissible cell carries no evidence
            let l = surrogate.map_or(0.0, |r| r.leakage);
            usize::from(l >= observed.leakage)
        })
        .sum();
    let p_value = (1 + exceed) as f64 / (1 + cfg.surrogates) as f64;
    Ok(StatisticalCplResult {
        leakage_nats: observed.leakage,
        p_value,
        significant: p_value < cfg.alpha,
        excluded_cells: observed.excluded,
    })
}

/// Leakage on original attribute `target` from the decoded releases of the
/// `neighbors`, with its permutation p-value.
pub fn statistical_cpl(
    perturbed: &Dataset,
    original: &Dataset,
    target: usize,
    neighbors: &[usize],
    cfg: &EstimationConfig,
) -> Result<StatisticalCplResult> {
    check_aligned(perturbed, original, target)?;
    check_neighbors(original, target, neighbors)?;
    let tuple = OutputTuple::new(perturbed, neighbors.to_vec())?;
    estimate_with(perturbed, original, target, tuple, cfg)
}

/// Total leakage on `target` from every decoded attribute, its own included.
pub fn statistical_tpl(
    perturbed: &Dataset,
    original: &Dataset,
    target: usize,
    cfg: &EstimationConfig,
) -> Result<StatisticalCplResult> {
    check_aligned(perturbed, original, target)?;
    let tuple = OutputTuple::new(perturbed, (0..perturbed.n_attributes()).collect())?;
    estimate_with(perturbed, original, target, tuple, cfg)
}

/// Point estimate of [`statistical_cpl`] without the permutation test.
pub fn statistical_leakage(
    perturbed: &Dataset,
    original: &Dataset,
    target: usize,
    neighbors: &[usize],
) -> Result<f64> {
    check_aligned(perturbed, original, target)?;
    check_neighbors(original, target, neighbors)?;
    let tuple = OutputTuple::new(perturbed, neighbors.to_vec())?;
    let codes = tuple.observed(perturbed);
    Ok(sup_ratio(
        original.column(target),
        original.alphabet_size(target),
        &codes,
        tuple.cells,
    )?
    .leakage)
}

/// Permutation p-value of [`statistical_cpl`] on its own.
pub fn permutation_significance(
    perturbed: &Dataset,
    original: &Dataset,
    target: usize,
    neighbors: &[usize],
    cfg: &EstimationConfig,
) -> Result<f64> {
    Ok(statistical_cpl(perturbed, original, target, neighbors, cfg)?.p_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::empirical_conditional;
    use crate::exact::cpl_exact;
    use crate::fixtures::{independent_pair, perfect_copy};
    use crate::mechanisms::transition_matrix;

    fn grr_specs(d: &Dataset, eps: f64) -> Vec<MechanismSpec> {
        (0..d.n_attributes())
            .map(|a| MechanismSpec::new(MechanismKind::Grr, eps, d.alphabet_size(a)).unwrap())
            .collect()
    }

    fn cfg(expansion: usize, surrogates: usize, seed: u64) -> EstimationConfig {
        EstimationConfig {
            expansion,
            surrogates,
            alpha: 0.05,
            seed,
        }
    }

    #[test]
    fn near_noiseless_release_is_identity() {
        let d = perfect_copy(300, 4, 1).unwrap();
        let r = release(&d, &grr_specs(&d, 20.0), &cfg(3, 1, 2)).unwrap();
        assert_eq!(r.perturbed.n_rows(), 900);
        assert_eq!(r.perturbed, r.original);
    }

    #[test]
    fn expansion_row_count() {
        let d = independent_pair(1000, 2, 1).unwrap();
        let p = perturb_dataset(&d, &grr_specs(&d, 1.0), &cfg(50, 1, 1)).unwrap();
        assert_eq!(p.n_rows(), 50_000);
    }

    #[test]
    fn zero_epsilon_release_is_uniform() {
        let d = perfect_copy(2000, 4, 3).unwrap();
        let p = perturb_dataset(&d, &grr_specs(&d, 0.0), &cfg(10, 1, 4)).unwrap();
        let n = p.n_rows() as f64;
        for a in 0..2 {
            let mut counts = [0usize; 4];
            for &v in p.column(a) {
                counts[v as usize] += 1;
            }
            let sd = (n * 0.25 * 0.75).sqrt();
            for c in counts {
                assert!((c as f64 - n / 4.0).abs() < 4.0 * sd, "{counts:?}");
            }
        }
    }

    #[test]
    fn spec_mismatch_is_rejected() {
        let d = perfect_copy(10, 3, 1).unwrap();
        let wrong = vec![MechanismSpec::new(MechanismKind::Grr, 1.0, 4).unwrap(); 2];
        assert!(matches!(
            perturb_dataset(&d, &wrong, &cfg(1, 1, 1)),
            Err(CplError::DimensionMismatch(_))
        ));
        assert!(perturb_dataset(&d, &wrong[..1], &cfg(1, 1, 1)).is_err());
    }

    #[test]
    fn release_is_deterministic() {
        let d = independent_pair(500, 3, 9).unwrap();
        let specs: Vec<_> = MechanismKind::ALL
            .iter()
            .take(2)
            .map(|&k| MechanismSpec::new(k, 1.0, 3).unwrap())
            .collect();
        let a = perturb_dataset(&d, &specs, &cfg(4, 1, 11)).unwrap();
        let b = perturb_dataset(&d, &specs, &cfg(4, 1, 11)).unwrap();
        let c = perturb_dataset(&d, &specs, &cfg(4, 1, 12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn every_mechanism_releases() {
        let d = perfect_copy(200, 5, 2).unwrap();
        for kind in MechanismKind::ALL {
            let specs = vec![MechanismSpec::new(kind, 2.0, 5).unwrap(); 2];
            let p = perturb_dataset(&d, &specs, &cfg(2, 1, 3)).unwrap();
            assert_eq!(p.n_rows(), 400);
        }
    }

    #[test]
    fn independent_attributes_show_no_leakage() {
        // r = 1: replicated rows would let the test detect the sample's own
        // finite-sample dependence
        let d = independent_pair(100_000, 2, 5).unwrap();
        let c = cfg(1, 200, 6);
        let r = release(&d, &grr_specs(&d, 1.0), &c).unwrap();
        let res = statistical_cpl(&r.perturbed, &r.original, 0, &[1], &c).unwrap();
        assert!(res.leakage_nats < 0.05, "{res:?}");
        assert!(!res.significant, "{res:?}");
    }

    #[test]
    fn perfect_copy_matches_exact() {
        let d = perfect_copy(2000, 3, 7).unwrap();
        let c = cfg(50, 50, 8);
        let r = release(&d, &grr_specs(&d, 2.0), &c).unwrap();
        let res = statistical_cpl(&r.perturbed, &r.original, 0, &[1], &c).unwrap();
        let trans =
            transition_matrix(&MechanismSpec::new(MechanismKind::Grr, 2.0, 3).unwrap()).unwrap();
        let exact = cpl_exact(&empirical_conditional(&d, 0, 1).unwrap(), &trans).unwrap();
        assert!(
            (res.leakage_nats - exact.leakage_nats).abs() < 0.05,
            "{res:?} vs {exact:?}"
        );
        assert!(res.significant);
    }

    #[test]
    fn single_attribute_tpl_is_epsilon() {
        let d0 = perfect_copy(4000, 2, 9).unwrap();
        let single =
            Dataset::from_columns(vec![d0.attribute(0).clone()], vec![d0.column(0).to_vec()])
                .unwrap();
        let c = cfg(50, 50, 10);
        let r = release(&single, &grr_specs(&single, 1.0), &c).unwrap();
        let res = statistical_tpl(&r.perturbed, &r.original, 0, &c).unwrap();
        assert!((res.leakage_nats - 1.0).abs() < 0.05, "{res:?}");
    }

    #[test]
    fn zero_epsilon_tpl_is_negligible() {
        let d = perfect_copy(2000, 2, 11).unwrap();
        let c = cfg(50, 100, 12);
        let r = release(&d, &grr_specs(&d, 0.0), &c).unwrap();
        let res = statistical_tpl(&r.perturbed, &r.original, 0, &c).unwrap();
        assert!(res.leakage_nats < 0.05, "{res:?}");
        assert!(!res.significant);
    }

    #[test]
    fn surrogates_preserve_marginals() {
        let d = independent_pair(3000, 3, 13).unwrap();
        let tuple = OutputTuple::new(&d, vec![1]).unwrap();
        let mut a = tuple.surrogate(&d, &mut stream(1, stage::SURROGATE, 5));
        let mut b = d.column(1).to_vec();
        assert_ne!(a, b);
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn permuted_table_matches_shuffle_distribution() {
        let d = perfect_copy(2000, 3, 14).unwrap();
        let (x, w) = (d.column(0), d.column(1));
        let table = ContingencyTable::count(x, 3, w, 3);
        let draws = 400;
        let (mut permuted, mut shuffled) = (0.0, 0.0);
        for s in 0..draws {
            let p = table.permuted(&mut stream(2, stage::SURROGATE, s));
            assert_eq!(p.totals, table.totals);
            assert_eq!(p.column_totals(), table.column_totals());
            permuted += p.counts[0] as f64;
            let mut codes = w.to_vec();
            codes.shuffle(&mut stream(3, stage::SURROGATE, s));
            shuffled += ContingencyTable::count(x, 3, &codes, 3).counts[0] as f64;
        }
        // both means estimate r_0 c_0 / N with standard error ≈ 0.6
        let expect = (table.totals[0] * table.column_totals()[0]) as f64 / 2000.0;
        assert!((permuted / draws as f64 - expect).abs() < 2.5, "{permuted}");
        assert!((shuffled / draws as f64 - expect).abs() < 2.5, "{shuffled}");
    }

    #[test]
    fn zero_leakage_gives_unit_p_value() {
        let target = vec![0u32, 1, 0, 1];
        let stat = sup_ratio(&target, 2, &[0, 0, 0, 0], 1).unwrap();
        assert_eq!(stat.leakage, 0.0);
        let attrs = vec![
            crate::dataset::Attribute {
                name: "x".into(),
                alphabet: crate::dataset::Alphabet::numbered(2).unwrap(),
            },
            crate::dataset::Attribute {
                name: "w".into(),
                alphabet: crate::dataset::Alphabet::numbered(2).unwrap(),
            },
        ];
        let d = Dataset::from_columns(attrs, vec![target, vec![0, 0, 0, 0]]).unwrap();
        let res = statistical_cpl(&d, &d, 0, &[1], &cfg(1, 20, 1)).unwrap();
        assert_eq!(res.p_value, 1.0);
    }

    #[test]
    fn no_admissible_cell_is_an_error() {
        let d = perfect_copy(100, 2, 1).unwrap();
        // identical columns: every decoded symbol appears under one target symbol only
        assert!(matches!(
            statistical_cpl(&d, &d, 0, &[1], &cfg(1, 1, 1)),
            Err(CplError::InsufficientData(_))
        ));
    }

    #[test]
    fn argument_validation() {
        let d = independent_pair(100, 2, 1).unwrap();
        let c = cfg(1, 1, 1);
        assert!(statistical_cpl(&d, &d, 0, &[], &c).is_err());
        assert!(statistical_cpl(&d, &d, 0, &[0], &c).is_err());
        assert!(statistical_cpl(&d, &d, 0, &[1, 1], &c).is_err());
        assert!(statistical_cpl(&d, &d, 0, &[5], &c).is_err());
        let bad = EstimationConfig { alpha: 1.0, ..c };
        assert!(statistical_cpl(&d, &d, 0, &[1], &bad).is_err());
    }

    #[test]
    fn product_alphabet_cap() {
        let attrs: Vec<_> = (0..4)
            .map(|i| crate::dataset::Attribute {
                name: format!("a{i}"),
                alphabet: crate::dataset::Alphabet::numbered(200).unwrap(),
            })
            .collect();
        let d = Dataset::from_columns(attrs, vec![vec![0u32, 1]; 4]).unwrap();
        assert!(matches!(
            statistical_cpl(&d, &d, 0, &[1, 2, 3], &cfg(1, 1, 1)),
            Err(CplError::ProductAlphabetTooLarge { .. })
        ));
    }

    #[test]
    fn null_calibration_on_shuffled_input() {
        // data already independent: rejections should occur at roughly rate α
        let mut rejections = 0;
        let trials = 100;
        for seed in 0..trials {
            let d = independent_pair(2000, 2, 1000 + seed).unwrap();
            let c = cfg(1, 99, seed);
            let r = release(&d, &grr_specs(&d, 1.0), &c).unwrap();
            if statistical_cpl(&r.perturbed, &r.original, 0, &[1], &c)
                .unwrap()
                .significant
            {
                rejections += 1;
            }
        }
        assert!(rejections <= 12, "{rejections} of {trials} rejected");
    }
}
