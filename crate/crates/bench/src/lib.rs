//! Workloads shared by the criterion benches in `benches/`.

use rand::Rng;

use cpl_core::fixtures::{chain, saturating_dataset};
use cpl_core::rng::stream;
use cpl_core::{ConditionalDistribution, Dataset};

/// Two-row conditional over `t` outputs with strictly positive entries.
pub fn conditional(t: usize, seed: u64) -> ConditionalDistribution {
    let mut rng = stream(seed, 0, t as u64);
    let mut row = || (0..t).map(|_| 0.05 + rng.gen::<f64>()).collect::<Vec<_>>();
    let rows = vec![row(), row()];
    ConditionalDistribution::from_weights(rows).expect("positive weights")
}

pub fn two_attribute(rows: usize) -> Dataset {
    saturating_dataset(rows, 0).expect("fixture")
}

pub fn five_attribute_chain(rows: usize) -> Dataset {
    chain(rows, &[3, 2, 4, 2, 3], 0.6, 0).expect("fixture")
}
