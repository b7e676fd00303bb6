//! Local differential privacy mechanisms over a categorical domain `0..k`.
//!
//! Each [`MechanismSpec`] can perturb a symbol into a kind-specific
//! [`PerturbedOutput`], decode an output back into the input domain with the
//! attribute-inference attacks used by the statistical estimator, and feed
//! the standard unbiased frequency estimators. GRR and EXP also expose their
//! transition matrices.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{ProbabilityVector, PROB_TOLERANCE};
use crate::error::{CplError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MechanismKind {
    /// Generalized randomized response.
    Grr,
    /// Exponential mechanism with 0/1 utility.
    Exp,
    /// Basic one-time RAPPOR over unary encoding.
    Rappor,
    /// Optimized unary encoding.
    Oue,
    /// Binary local hashing.
    Blh,
    /// Optimized local hashing.
    Olh,
    /// Summation with histogram encoding (Laplace noise on a one-hot vector).
    She,
    /// Subset selection.
    Ss,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 8] = [
        MechanismKind::Grr,
        MechanismKind::Exp,
        MechanismKind::Rappor,
        MechanismKind::Oue,
        MechanismKind::Blh,
        MechanismKind::Olh,
        MechanismKind::She,
        MechanismKind::Ss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::Grr => "GRR",
            MechanismKind::Exp => "EXP",
            MechanismKind::Rappor => "RAPPOR",
            MechanismKind::Oue => "OUE",
            MechanismKind::Blh => "BLH",
            MechanismKind::Olh => "OLH",
            MechanismKind::She => "SHE",
            MechanismKind::Ss => "SS",
        }
    }

    /// Whether [`transition_matrix`] is available.
    pub fn has_transition_matrix(self) -> bool {
        matches!(self, MechanismKind::Grr | MechanismKind::Exp)
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MechanismKind {
    type Err = CplError;

    fn from_str(s: &str) -> Result<Self> {
        MechanismKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| CplError::InvalidParameter(format!("unknown mechanism `{s}`")))
    }
}

pub const RAPPOR_F: f64 = 0.5;
pub const RAPPOR_P: f64 = 0.5;
pub const RAPPOR_Q: f64 = 0.75;

/// Kind-specific parameters. Absent fields are filled with the defaults when a
/// spec is built.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MechanismParams {
    /// RAPPOR permanent flip probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    /// RAPPOR instantaneous P(report 1 | bit 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// RAPPOR instantaneous P(report 1 | bit 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Hash range for BLH/OLH.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<u64>,
    /// Subset size for SS.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<usize>,
}

#[derive(Deserialize)]
struct RawSpec {
    kind: MechanismKind,
    epsilon: f64,
    #[serde(default)]
    delta: f64,
    k: usize,
    #[serde(default)]
    params: MechanismParams,
}

/// A parameterized mechanism over the domain `0..k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct MechanismSpec {
    kind: MechanismKind,
    epsilon: f64,
    delta: f64,
    k: usize,
    params: MechanismParams,
}

impl TryFrom<RawSpec> for MechanismSpec {
    type Error = CplError;

    fn try_from(raw: RawSpec) -> Result<Self> {
        MechanismSpec::with_params(raw.kind, raw.epsilon, raw.delta, raw.k, raw.params)
    }
}

impl MechanismSpec {
    /// Pure-LDP spec with default kind parameters.
    pub fn new(kind: MechanismKind, epsilon: f64, k: usize) -> Result<Self> {
        Self::with_params(kind, epsilon, 0.0, k, MechanismParams::default())
    }

    pub fn with_params(
        kind: MechanismKind,
        epsilon: f64,
        delta: f64,
        k: usize,
        mut params: MechanismParams,
    ) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(CplError::InvalidParameter(format!(
                "epsilon must be finite and >= 0, got {epsilon}"
            )));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(CplError::InvalidParameter(format!(
                "delta must lie in [0, 1), got {delta}"
            )));
        }
        let min_k = match kind {
            MechanismKind::Grr | MechanismKind::Exp | MechanismKind::Ss => 2,
            _ => 1,
        };
        if k < min_k {
            return Err(CplError::InvalidParameter(format!(
                "{kind} needs a domain of at least {min_k} symbols"
            )));
        }
        match kind {
            MechanismKind::Rappor => {
                let f = *params.f.get_or_insert(RAPPOR_F);
                let p = *params.p.get_or_insert(RAPPOR_P);
                let q = *params.q.get_or_insert(RAPPOR_Q);
                if ![f, p, q].iter().all(|v| (0.0..=1.0).contains(v)) {
                    return Err(CplError::InvalidParameter(
                        "RAPPOR f, p, q must lie in [0, 1]".into(),
                    ));
                }
            }
            MechanismKind::Blh => {
                params.g = Some(2);
            }
            MechanismKind::Olh => {
                let g = *params.g.get_or_insert_with(|| olh_range(epsilon));
                if g < 2 {
                    return Err(CplError::InvalidParameter(
                        "OLH hash range must be at least 2".into(),
                    ));
                }
            }
            MechanismKind::Ss => {
                let omega = *params.omega.get_or_insert_with(|| subset_size(k, epsilon));
                if omega == 0 || omega >= k {
                    return Err(CplError::InvalidParameter(format!(
                        "SS subset size {omega} must lie in [1, k)"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self {
            kind,
            epsilon,
            delta,
            k,
            params,
        })
    }

    pub fn kind(&self) -> MechanismKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &MechanismParams {
        &self.params
    }

    /// Probability that GRR (or EXP) reports the true symbol.
    fn keep_probability(&self) -> f64 {
        let e = match self.kind {
            MechanismKind::Exp => self.epsilon / 2.0,
            _ => self.epsilon,
        };
        grr_keep(e, self.k as f64)
    }

    fn hash_range(&self) -> u64 {
        self.params.g.unwrap_or(2)
    }

    fn omega(&self) -> usize {
        self.params.omega.unwrap_or(1)
    }

    fn rappor(&self) -> (f64, f64, f64) {
        (
            self.params.f.unwrap_or(RAPPOR_F),
            self.params.p.unwrap_or(RAPPOR_P),
            self.params.q.unwrap_or(RAPPOR_Q),
        )
    }

    /// Probability that SS includes the true value.
    fn subset_inclusion(&self) -> f64 {
        let w = self.omega() as f64;
        let k = self.k as f64;
        let scaled = w * self.epsilon.exp();
        scaled / (scaled + k - w)
    }

    /// Probabilities that one report supports a symbol when it is, and is not,
    /// the true input. These drive the unbiased frequency estimators.
    fn support_rates(&self) -> (f64, f64) {
        let k = self.k as f64;
        match self.kind {
            MechanismKind::Grr | MechanismKind::Exp => {
                let p = self.keep_probability();
                (
                    p,
                    if self.k > 1 {
                        (1.0 - p) / (k - 1.0)
                    } else {
                        0.0
                    },
                )
            }
            MechanismKind::Rappor => {
                let (f, p, q) = self.rappor();
                (
                    (1.0 - f / 2.0) * q + f / 2.0 * p,
                    f / 2.0 * q + (1.0 - f / 2.0) * p,
                )
            }
            MechanismKind::Oue => (0.5, 1.0 / (self.epsilon.exp() + 1.0)),
            MechanismKind::Blh | MechanismKind::Olh => {
                let g = self.hash_range() as f64;
                (grr_keep(self.epsilon, g), 1.0 / g)
            }
            MechanismKind::Ss => {
                let p = self.subset_inclusion();
                let w = self.omega() as f64;
                (p, (p * (w - 1.0) + (1.0 - p) * w) / (k - 1.0))
            }
            MechanismKind::She => (1.0, 0.0),
        }
    }

    /// The LDP level actually enforced. Equal to `epsilon` except for RAPPOR,
    /// whose privacy is fixed by its flip parameters.
    pub fn effective_epsilon(&self) -> f64 {
        match self.kind {
            MechanismKind::Rappor => {
                let (hi, lo) = self.support_rates();
                // two bits differ between any pair of unary encodings
                2.0 * ((hi * (1.0 - lo)) / (lo * (1.0 - hi))).ln().abs()
            }
            _ => self.epsilon,
        }
    }
}

fn grr_keep(epsilon: f64, k: f64) -> f64 {
    1.0 / (1.0 + (k - 1.0) * (-epsilon).exp())
}

/// OLH hash range `round(e^ε) + 1`.
pub fn olh_range(epsilon: f64) -> u64 {
    let g = epsilon.exp().round();
    if g >= (u64::MAX / 2) as f64 {
        u64::MAX / 2
    } else {
        g as u64 + 1
    }
}

/// SS subset size `max(1, floor(k / (e^ε + 1)))`.
pub fn subset_size(k: usize, epsilon: f64) -> usize {
    ((k as f64 / (epsilon.exp() + 1.0)).floor() as usize).max(1)
}

/// One mechanism report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbedOutput {
    /// GRR and EXP report a symbol of the input domain.
    Symbol(usize),
    /// RAPPOR and OUE report one bit per domain symbol.
    Bits(Vec<bool>),
    /// Local hashing reports the hash key and the randomized hash value.
    Hashed { key: u64, value: u64 },
    /// SHE reports a noisy one-hot vector.
    Real(Vec<f64>),
    /// SS reports a subset of the domain, sorted ascending.
    Subset(Vec<usize>),
}

/// Keyed 64-bit mix reduced mod `g`; the key is drawn fresh per report.
pub fn local_hash(key: u64, value: usize, g: u64) -> u64 {
    let mut x = key ^ (value as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 33)).wrapping_mul(0xff51_afd7_ed55_8ccd);
    x = (x ^ (x >> 33)).wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^= x >> 33;
    x % g
}

fn laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    loop {
        let u: f64 = rng.gen::<f64>() - 0.5;
        let tail = 1.0 - 2.0 * u.abs();
        if tail > 0.0 {
            return -scale * u.signum() * tail.ln();
        }
    }
}

/// Uniform draw from `0..n` excluding `skip`.
fn other_symbol<R: Rng + ?Sized>(rng: &mut R, n: u64, skip: u64) -> u64 {
    let draw = rng.gen_range(0..n - 1);
    if draw >= skip {
        draw + 1
    } else {
        draw
    }
}

fn grr_draw<R: Rng + ?Sized>(rng: &mut R, keep: f64, n: u64, value: u64) -> u64 {
    if n == 1 || rng.gen::<f64>() < keep {
        value
    } else {
        other_symbol(rng, n, value)
    }
}

/// Randomizes one symbol.
pub fn perturb<R: Rng + ?Sized>(
    spec: &MechanismSpec,
    value: usize,
    rng: &mut R,
) -> Result<PerturbedOutput> {
    let k = spec.k;
    if value >= k {
        return Err(CplError::ValueOutOfRange { value, k });
    }
    Ok(match spec.kind {
        MechanismKind::Grr | MechanismKind::Exp => {
            PerturbedOutput::Symbol(
                grr_draw(rng, spec.keep_probability(), k as u64, value as u64) as usize,
            )
        }
        MechanismKind::Rappor => {
            let (f, p, q) = spec.rappor();
            let bits = (0..k)
                .map(|i| {
                    let truth = i == value;
                    let u: f64 = rng.gen();
                    let permanent = if u < f / 2.0 {
                        true
                    } else if u < f {
                        false
                    } else {
                        truth
                    };
                    rng.gen::<f64>() < if permanent { q } else { p }
                })
                .collect();
            PerturbedOutput::Bits(bits)
        }
        MechanismKind::Oue => {
            let off = 1.0 / (spec.epsilon.exp() + 1.0);
            let bits = (0..k)
                .map(|i| rng.gen::<f64>() < if i == value { 0.5 } else { off })
                .collect();
            PerturbedOutput::Bits(bits)
        }
        MechanismKind::Blh | MechanismKind::Olh => {
            let g = spec.hash_range();
            let key: u64 = rng.gen();
            let hashed = local_hash(key, value, g);
            let value = grr_draw(rng, grr_keep(spec.epsilon, g as f64), g, hashed);
            PerturbedOutput::Hashed { key, value }
        }
        MechanismKind::She => {
            if spec.epsilon <= 0.0 {
                return Err(CplError::InvalidParameter(
                    "SHE needs epsilon > 0 (Laplace scale 2/ε)".into(),
                ));
            }
            let scale = 2.0 / spec.epsilon;
            let noisy = (0..k)
                .map(|i| if i == value { 1.0 } else { 0.0 } + laplace(rng, scale))
                .collect();
            PerturbedOutput::Real(noisy)
        }
        MechanismKind::Ss => {
            let omega = spec.omega();
            let include = rng.gen::<f64>() < spec.subset_inclusion();
            let others = if include { omega - 1 } else { omega };
            let pool: Vec<usize> = (0..k).filter(|&v| v != value).collect();
            let mut subset: Vec<usize> = rand::seq::index::sample(rng, pool.len(), others)
                .into_iter()
                .map(|i| pool[i])
                .collect();
            if include {
                subset.push(value);
            }
            subset.sort_unstable();
            PerturbedOutput::Subset(subset)
        }
    })
}

fn uniform_choice<R: Rng + ?Sized>(rng: &mut R, candidates: &[usize], k: usize) -> usize {
    if candidates.is_empty() {
        rng.gen_range(0..k)
    } else {
        candidates[rng.gen_range(0..candidates.len())]
    }
}

/// Maps a report back into the input domain (attribute-inference attack).
///
/// GRR/EXP return the reported symbol. Bit-vector and hash reports pick
/// uniformly among the supported symbols, or among all `k` when none is
/// supported. SS picks uniformly from the subset. SHE takes the maximum a
/// posteriori symbol under Laplace likelihood with scale `2/ε` and `prior`
/// (uniform when `None`).
pub fn decode<R: Rng + ?Sized>(
    spec: &MechanismSpec,
    output: &PerturbedOutput,
    rng: &mut R,
    prior: Option<&ProbabilityVector>,
) -> Result<usize> {
    let k = spec.k;
    let mismatch = || CplError::PayloadMismatch(spec.kind);
    match (spec.kind, output) {
        (MechanismKind::Grr | MechanismKind::Exp, PerturbedOutput::Symbol(s)) => {
            if *s >= k {
                return Err(mismatch());
            }
            Ok(*s)
        }
        (MechanismKind::Rappor | MechanismKind::Oue, PerturbedOutput::Bits(bits)) => {
            if bits.len() != k {
                return Err(mismatch());
            }
            let set: Vec<usize> = bits
                .iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .map(|(i, _)| i)
                .collect();
            Ok(uniform_choice(rng, &set, k))
        }
        (MechanismKind::Blh | MechanismKind::Olh, PerturbedOutput::Hashed { key, value }) => {
            let g = spec.hash_range();
            let preimage: Vec<usize> = (0..k)
                .filter(|&v| local_hash(*key, v, g) == *value)
                .collect();
            Ok(uniform_choice(rng, &preimage, k))
        }
        (MechanismKind::Ss, PerturbedOutput::Subset(subset)) => {
            if subset.is_empty() || subset.iter().any(|&v| v >= k) {
                return Err(mismatch());
            }
            Ok(subset[rng.gen_range(0..subset.len())])
        }
        (MechanismKind::She, PerturbedOutput::Real(y)) => {
            if y.len() != k {
                return Err(mismatch());
            }
            if spec.epsilon <= 0.0 {
                return Err(CplError::InvalidParameter(
                    "SHE decoding needs epsilon > 0; the likelihood scale 2/ε is undefined".into(),
                ));
            }
            if let Some(p) = prior {
                if p.len() != k {
                    return Err(CplError::DimensionMismatch(format!(
                        "prior has {} entries, k = {k}",
                        p.len()
                    )));
                }
            }
            let b = 2.0 / spec.epsilon;
            // ||y - e_v||_1 differs across v only in coordinate v.
            let score = |v: usize| {
                let log_prior = prior.map_or(0.0, |p| p[v].ln());
                log_prior - ((y[v] - 1.0).abs() - y[v].abs()) / b
            };
            let mut best = 0;
            let mut best_score = score(0);
            for v in 1..k {
                let s = score(v);
                if s > best_score {
                    best = v;
                    best_score = s;
                }
            }
            Ok(best)
        }
        _ => Err(mismatch()),
    }
}

/// Row-stochastic p(y | x) table of a mechanism with a finite output domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(CplError::InvalidParameter(
                "transition matrix is empty".into(),
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(CplError::DimensionMismatch(
                    "transition rows differ in length".into(),
                ));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(CplError::InvalidParameter(format!(
                    "transition row {i} has entries outside [0, 1]"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > PROB_TOLERANCE {
                return Err(CplError::InvalidParameter(format!(
                    "transition row {i} sums to {total}"
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Number of input symbols.
    pub fn n_inputs(&self) -> usize {
        self.rows.len()
    }

    /// Number of output symbols.
    pub fn n_outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.rows[input][output]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// p(y | ·) for one output symbol `y`.
    pub fn column(&self, output: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[output]).collect()
    }

    /// Pure ε-LDP: within every output column, max / min ≤ e^ε (1 + 1e-9).
    pub fn satisfies_pure_ldp(&self, epsilon: f64) -> bool {
        let limit = epsilon.exp() * (1.0 + 1e-9);
        (0..self.n_outputs()).all(|y| {
            let col = self.column(y);
            let hi = col.iter().copied().fold(0.0, f64::max);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            hi == 0.0 || (lo > 0.0 && hi / lo <= limit)
        })
    }

    /// Reorders inputs: new input `i` is old input `perm[i]`.
    pub fn permute_inputs(&self, perm: &[usize]) -> Self {
        Self {
            rows: perm.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

/// Transition matrix for GRR or EXP; other kinds have exponential or
/// continuous output spaces.
pub fn transition_matrix(spec: &MechanismSpec) -> Result<TransitionMatrix> {
    if !spec.kind.has_transition_matrix() {
        return Err(CplError::NoTransitionMatrix(spec.kind));
    }
    let k = spec.k;
    let keep = spec.keep_probability();
    let flip = (1.0 - keep) / (k - 1) as f64;
    let rows = (0..k)
        .map(|x| (0..k).map(|y| if x == y { keep } else { flip }).collect())
        .collect();
    TransitionMatrix::new(rows)
}

/// Streaming form of [`estimate_frequencies`]; partial accumulators over
/// disjoint report sets can be merged.
#[derive(Debug, Clone)]
pub struct FrequencyAccumulator {
    spec: MechanismSpec,
    reports: u64,
    support: Vec<f64>,
}

impl FrequencyAccumulator {
    pub fn new(spec: &MechanismSpec) -> Self {
        Self {
            spec: spec.clone(),
            reports: 0,
            support: vec![0.0; spec.k],
        }
    }

    pub fn add(&mut self, output: &PerturbedOutput) -> Result<()> {
        let k = self.spec.k;
        let mismatch = || CplError::PayloadMismatch(self.spec.kind);
        match (self.spec.kind, output) {
            (MechanismKind::Grr | MechanismKind::Exp, PerturbedOutput::Symbol(s)) if *s < k => {
                self.support[*s] += 1.0;
            }
            (MechanismKind::Rappor | MechanismKind::Oue, PerturbedOutput::Bits(bits))
                if bits.len() == k =>
            {
                for (c, b) in self.support.iter_mut().zip(bits) {
                    if *b {
                        *c += 1.0;
                    }
                }
            }
            (MechanismKind::Blh | MechanismKind::Olh, PerturbedOutput::Hashed { key, value }) => {
                let g = self.spec.hash_range();
                for (v, c) in self.support.iter_mut().enumerate() {
                    if local_hash(*key, v, g) == *value {
                        *c += 1.0;
                    }
                }
            }
            (MechanismKind::She, PerturbedOutput::Real(y)) if y.len() == k => {
                for (c, v) in self.support.iter_mut().zip(y) {
                    *c += v;
                }
            }
            (MechanismKind::Ss, PerturbedOutput::Subset(s)) if s.iter().all(|&v| v < k) => {
                for &v in s {
                    self.support[v] += 1.0;
                }
            }
            _ => return Err(mismatch()),
        }
        self.reports += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &FrequencyAccumulator) {
        self.reports += other.reports;
        for (a, b) in self.support.iter_mut().zip(&other.support) {
            *a += b;
        }
    }

    pub fn reports(&self) -> u64 {
        self.reports
    }

    /// Debiased frequencies, clipped to [0, 1] and renormalized. Degenerate
    /// mechanisms (ε = 0, where the reports carry no signal) and empty
    /// accumulators yield the uniform vector.
    pub fn finish(&self) -> ProbabilityVector {
        let k = self.spec.k;
        if self.reports == 0 {
            return ProbabilityVector::uniform(k);
        }
        let n = self.reports as f64;
        let (hi, lo) = self.spec.support_rates();
        if (hi - lo).abs() < 1e-12 {
            return ProbabilityVector::uniform(k);
        }
        let raw = self
            .support
            .iter()
            .map(|c| ((c / n - lo) / (hi - lo)).clamp(0.0, 1.0))
            .collect();
        ProbabilityVector::from_weights(raw)
    }
}

/// Standard unbiased frequency estimate from a batch of reports.
pub fn estimate_frequencies(
    spec: &MechanismSpec,
    outputs: &[PerturbedOutput],
) -> Result<ProbabilityVector> {
    if outputs.is_empty() {
        return Err(CplError::InvalidParameter(
            "no reports to estimate from".into(),
        ));
    }
    let mut acc = FrequencyAccumulator::new(spec);
    for o in outputs {
        acc.add(o)?;
    }
    Ok(acc.finish())
}
