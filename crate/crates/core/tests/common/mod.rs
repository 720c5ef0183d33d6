#![allow(dead_code)]

use schoolchoice::format::{self, Instance};
use schoolchoice::{Lottery, Matching, Problem, SchoolId, StudentId};

pub fn example1() -> Instance {
    format::example1()
}

pub fn fixture_lottery(problem: &Problem, name: &str) -> Lottery {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    format::parse_lottery(problem, &text).unwrap()
}

/// Matching from a compact `"i:a i':c ..."` description.
pub fn matching(problem: &Problem, spec: &str) -> Matching {
    let pairs: Vec<(&str, &str)> = spec
        .split_whitespace()
        .map(|p| p.split_once(':').expect("student:school"))
        .collect();
    Matching::from_names(problem, pairs).unwrap()
}

pub const MU_STAR: &str = "i:a i':c j:a j':c k:d l:b";
pub const MU_2: &str = "i:c i':a j:a j':c k:d l:b";
pub const MU_3: &str = "i:c i':a j:c j':a k:d l:b";
pub const MU_4: &str = "i:a i':c j:c j':a k:d l:b";
pub const MU_BAR: &str = "i:a i':a j:c j':c k:b l:d";
pub const MU_BAR_PRIME: &str = "i:c i':c j:a j':a k:d l:b";

pub fn student(problem: &Problem, name: &str) -> StudentId {
    problem.student_id(name).unwrap()
}

pub fn school(problem: &Problem, name: &str) -> SchoolId {
    problem.school_id(name).unwrap()
}
