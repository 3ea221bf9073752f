//! Seeded inputs shared by the benchmarks.

use qent_core::states::{horodecki_state, random_mixed};
use qent_core::{DensityMatrix, RngSeed};

/// Random mixed states of ranks 1 to 4, one per rank.
pub fn mixed_states() -> Vec<DensityMatrix> {
    (1..=4).map(|rank| random_mixed(RngSeed(rank as u64), rank).unwrap()).collect()
}

pub fn horodecki() -> DensityMatrix {
    horodecki_state(0.6, 0.3).unwrap()
}
