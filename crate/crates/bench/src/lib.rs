//! Workloads shared by the benchmarks.

use schoolchoice::oracle::{self, GeneratorParams};
use schoolchoice::Problem;

/// A seeded instance with `students` students spread over `schools` schools.
/// A small preference pool keeps groups of equals large, which is the
/// expensive case for the reassignment step.
pub fn workload(students: usize, schools: usize, tie_density: f64, seed: u64) -> Problem {
    let params = GeneratorParams::new(students, schools, tie_density).with_preference_pool(2);
    oracle::random_problem(seed, params)
}

/// Sizes used across benchmark groups.
pub const SIZES: [(usize, usize); 4] = [(6, 3), (20, 5), (60, 8), (200, 12)];
