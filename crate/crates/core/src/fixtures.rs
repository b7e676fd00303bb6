//! Seeded synthetic datasets with known correlation structure.

use rand::Rng;

use crate::dataset::{Alphabet, Attribute, Dataset};
use crate::distribution::JointDistribution;
use crate::error::{CplError, Result};
use crate::rng::{stage, stream, ChaCha8Rng};

/// Sample count of the bundled two-attribute example.
pub const SATURATING_SAMPLES: usize = 100_000;

/// Two weakly correlated attributes whose first two rows have disjoint
/// support: NMI ≈ 0.164 and PCC ≈ 0.357, yet the leakage from the column
/// attribute onto the row attribute saturates at ε.
pub fn saturating_joint() -> JointDistribution {
    JointDistribution::new(
        labels("x", 4),
        labels("a", 4),
        vec![
            vec![0.2, 0.0, 0.0, 0.0],
            vec![0.0, 0.2, 0.0, 0.0],
            vec![0.1, 0.15, 0.03, 0.02],
            vec![0.1, 0.15, 0.03, 0.02],
        ],
    )
    .expect("valid joint")
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn attribute(name: impl Into<String>, alphabet: Alphabet) -> Attribute {
    Attribute {
        name: name.into(),
        alphabet,
    }
}

fn numbered(name: impl Into<String>, k: usize) -> Result<Attribute> {
    Ok(attribute(name, Alphabet::numbered(k)?))
}

fn fixture_rng(seed: u64, unit: u64) -> ChaCha8Rng {
    stream(seed, stage::FIXTURE, unit)
}

/// `n` i.i.d. draws from a joint; attribute names `names`.
pub fn sample_joint(
    joint: &JointDistribution,
    n: usize,
    seed: u64,
    names: [&str; 2],
) -> Result<Dataset> {
    if n == 0 {
        return Err(CplError::InvalidParameter(
            "sample count must be positive".into(),
        ));
    }
    let t = joint.n_cols();
    let mut cumulative = Vec::with_capacity(joint.n_rows() * t);
    let mut acc = 0.0;
    for p in joint.matrix.iter().flatten() {
        acc += p;
        cumulative.push(acc);
    }
    let flat: Vec<f64> = joint.matrix.iter().flatten().copied().collect();
    let last_positive = flat.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = fixture_rng(seed, 0);
    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let u: f64 = rng.gen::<f64>() * acc;
        let cell = cumulative.partition_point(|&c| c <= u).min(last_positive);
        a.push((cell / t) as u32);
        b.push((cell % t) as u32);
    }
    Dataset::from_columns(
        vec![
            attribute(names[0], Alphabet::new(joint.row_labels.clone())?),
            attribute(names[1], Alphabet::new(joint.col_labels.clone())?),
        ],
        vec![a, b],
    )
}

/// The example joint materialized as `n` samples with attributes `X_k`
/// (rows) and `X_hat` (columns).
pub fn saturating_dataset(n: usize, seed: u64) -> Result<Dataset> {
    sample_joint(&saturating_joint(), n, seed, ["X_k", "X_hat"])
}

/// Two independent uniform attributes over `k` symbols.
pub fn independent_pair(n: usize, k: usize, seed: u64) -> Result<Dataset> {
    let mut rng = fixture_rng(seed, 1);
    let a = (0..n).map(|_| rng.gen_range(0..k as u32)).collect();
    let b = (0..n).map(|_| rng.gen_range(0..k as u32)).collect();
    Dataset::from_columns(vec![numbered("A", k)?, numbered("B", k)?], vec![a, b])
}

/// Uniform attribute `A` over `k` symbols and an exact copy `B`.
pub fn perfect_copy(n: usize, k: usize, seed: u64) -> Result<Dataset> {
    let mut rng = fixture_rng(seed, 2);
    let a: Vec<u32> = (0..n).map(|_| rng.gen_range(0..k as u32)).collect();
    Dataset::from_columns(
        vec![numbered("A", k)?, numbered("B", k)?],
        vec![a.clone(), a],
    )
}

/// Binary attributes that each copy a shared latent coin with probability
/// `strength` and are otherwise uniform; pairwise agreement is
/// `(1 + strength²) / 2`.
pub fn latent_binary(n: usize, attributes: usize, strength: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(CplError::InvalidParameter(format!(
            "strength {strength} outside [0, 1]"
        )));
    }
    let mut rng = fixture_rng(seed, 3);
    let latent: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut columns = Vec::with_capacity(attributes);
    let mut attrs = Vec::with_capacity(attributes);
    for j in 0..attributes {
        let col = latent
            .iter()
            .map(|&z| {
                let v = if rng.gen::<f64>() < strength {
                    z
                } else {
                    rng.gen()
                };
                v as u32
            })
            .collect();
        columns.push(col);
        attrs.push(numbered(format!("W{j}"), 2)?);
    }
    Dataset::from_columns(attrs, columns)
}

/// Ten binary attributes with every pairwise leakage limit well below 0.1.
pub fn weak_correlation(n: usize, seed: u64) -> Result<Dataset> {
    latent_binary(n, 10, 0.15, seed)
}

/// Markov chain of attributes with alphabet sizes `sizes`: the first is
/// uniform, each later one equals the previous symbol (mod its size) with
/// probability `strength` and is uniform otherwise.
pub fn chain(n: usize, sizes: &[usize], strength: f64, seed: u64) -> Result<Dataset> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CplError::InvalidParameter(
            "chain needs positive alphabet sizes".into(),
        ));
    }
    let mut rng = fixture_rng(seed, 4);
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(sizes.len());
    columns.push((0..n).map(|_| rng.gen_range(0..sizes[0] as u32)).collect());
    for j in 1..sizes.len() {
        let k = sizes[j] as u32;
        let col = columns[j - 1]
            .iter()
            .map(|&prev| {
                if rng.gen::<f64>() < strength {
                    prev % k
                } else {
                    rng.gen_range(0..k)
                }
            })
            .collect();
        columns.push(col);
    }
    let attrs = sizes
        .iter()
        .enumerate()
        .map(|(j, &k)| numbered(format!("C{j}"), k))
        .collect::<Result<Vec<_>>>()?;
    Dataset::from_columns(attrs, columns)
}

/// Five attributes mixing correlation kinds that Pearson correlation
/// misreads:
/// - `A` ternary uniform and `B = [A == 1]`: zero PCC, disjoint-support
///   conditionals (leakage saturates at ε);
/// - `C` binary uniform and `D` agreeing with `C` 80% of the time: PCC ≈ 0.6
///   but leakage well below ε;
/// - `E` independent binary noise.
pub fn mixed_correlation(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = fixture_rng(seed, 5);
    let mut cols: Vec<Vec<u32>> = (0..5).map(|_| Vec::with_capacity(n)).collect();
    for _ in 0..n {
        let a = rng.gen_range(0..3u32);
        let c = rng.gen_range(0..2u32);
        let d = if rng.gen::<f64>() < 0.6 {
            c
        } else {
            rng.gen_range(0..2u32)
        };
        cols[0].push(a);
        cols[1].push((a == 1) as u32);
        cols[2].push(c);
        cols[3].push(d);
        cols[4].push(rng.gen_range(0..2u32));
    }
    let attrs = vec![
        numbered("A", 3)?,
        numbered("B", 2)?,
        numbered("C", 2)?,
        numbered("D", 2)?,
        numbered("E", 2)?,
    ];
    Dataset::from_columns(attrs, cols)
}
