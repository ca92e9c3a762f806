//! Fixtures shared by the benchmarks.

use bubbletest::{gen_random_walk, NullSpec, TimeSeries};

/// Seeded driftless random walk of length `t`.
pub fn walk(t: usize) -> TimeSeries {
    let null = NullSpec {
        drift_scale: 0.0,
        ..NullSpec::default()
    };
    gen_random_walk(t, &null, 2024).expect("valid length")
}
