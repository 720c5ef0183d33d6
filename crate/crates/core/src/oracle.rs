//! Brute-force references for small instances, plus a seeded generator of
//! random problems. Nothing here is clever on purpose: each check is the
//! textbook definition evaluated by enumeration.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lottery::Lottery;
use crate::model::{is_stable, pareto_dominates, Matching, Problem, RawProblem, SchoolId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{students} students exceed the enumeration limit of {limit}")]
    TooManyStudents { students: usize, limit: usize },
    #[error("more than {limit} matchings to enumerate")]
    TooManyMatchings { limit: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_students: usize,
    pub max_total_assignments: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_students: 6,
            max_total_assignments: 10_000_000,
        }
    }
}

/// Every capacity-respecting total assignment, each exactly once.
pub fn enumerate_matchings(
    problem: &Problem,
    budget: EnumerationBudget,
) -> Result<Vec<Matching>, OracleError> {
    if problem.num_students() > budget.max_students {
        return Err(OracleError::TooManyStudents {
            students: problem.num_students(),
            limit: budget.max_students,
        });
    }
    let mut out = Vec::new();
    let mut room: Vec<u32> = problem.schools().map(|c| problem.quota(c)).collect();
    let mut current = Vec::with_capacity(problem.num_students());
    extend(
        problem,
        &mut room,
        &mut current,
        &mut out,
        budget.max_total_assignments,
    )?;
    Ok(out)
}

fn extend(
    problem: &Problem,
    room: &mut [u32],
    current: &mut Vec<SchoolId>,
    out: &mut Vec<Matching>,
    limit: u64,
) -> Result<(), OracleError> {
    if current.len() == problem.num_students() {
        if out.len() as u64 >= limit {
            return Err(OracleError::TooManyMatchings { limit });
        }
        out.push(Matching::new(problem, current.clone()).expect("quotas respected"));
        return Ok(());
    }
    for c in problem.schools() {
        if room[c.0] == 0 {
            continue;
        }
        room[c.0] -= 1;
        current.push(c);
        let res = extend(problem, room, current, out, limit);
        current.pop();
        room[c.0] += 1;
        res?;
    }
    Ok(())
}

pub fn enumerate_stable(
    problem: &Problem,
    budget: EnumerationBudget,
) -> Result<Vec<Matching>, OracleError> {
    let mut all = enumerate_matchings(problem, budget)?;
    all.retain(|m| is_stable(problem, m));
    Ok(all)
}

pub fn oracle_constrained_efficient(
    problem: &Problem,
    matching: &Matching,
    budget: EnumerationBudget,
) -> Result<bool, OracleError> {
    if !is_stable(problem, matching) {
        return Ok(false);
    }
    let stable = enumerate_stable(problem, budget)?;
    Ok(!stable
        .iter()
        .any(|other| pareto_dominates(problem, other, matching)))
}

/// Ex ante stability with the quantifiers over support pairs taken literally.
pub fn oracle_ex_ante_stable(problem: &Problem, lottery: &Lottery) -> bool {
    for i in problem.students() {
        for j in problem.students() {
            for s in problem.schools() {
                if !problem.strictly_higher_priority(s, i, j) {
                    continue;
                }
                for mu in lottery.matchings() {
                    if !problem.prefers(i, s, mu.school_of(i)) {
                        continue;
                    }
                    if lottery.matchings().any(|mu2| mu2.school_of(j) == s) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Shape of a generated problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorParams {
    pub students: usize,
    pub schools: usize,
    /// Probability that two neighbours in a random priority order share a
    /// tier: 0 gives strict priorities, 1 a single tier.
    pub tie_density: f64,
    /// Draw preferences from this many random orders instead of
    /// independently per student, so that equals appear often.
    pub preference_pool: Option<usize>,
}

impl GeneratorParams {
    pub fn new(students: usize, schools: usize, tie_density: f64) -> Self {
        GeneratorParams {
            students,
            schools,
            tie_density,
            preference_pool: None,
        }
    }

    pub fn with_preference_pool(mut self, pool: usize) -> Self {
        self.preference_pool = Some(pool.max(1));
        self
    }
}

pub fn random_problem(seed: u64, params: GeneratorParams) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.students.max(1);
    let m = params.schools.max(1);
    let students: Vec<String> = (0..n).map(|k| format!("s{k}")).collect();
    let schools: Vec<String> = (0..m).map(|k| format!("c{k}")).collect();

    let mut quotas: Vec<u32> = (0..m)
        .map(|_| rng.gen_range(1..=n.div_ceil(m) as u32 + 1))
        .collect();
    while quotas.iter().sum::<u32>() < n as u32 {
        let c = rng.gen_range(0..m);
        quotas[c] += 1;
    }

    let random_order = |rng: &mut ChaCha8Rng| {
        let mut order = schools.clone();
        order.shuffle(rng);
        order
    };
    let pool: Option<Vec<Vec<String>>> = params
        .preference_pool
        .map(|k| (0..k).map(|_| random_order(&mut rng)).collect());
    let preferences = students
        .iter()
        .map(|s| {
            let list = match &pool {
                Some(pool) => pool[rng.gen_range(0..pool.len())].clone(),
                None => random_order(&mut rng),
            };
            (s.clone(), list)
        })
        .collect();

    let priorities = schools
        .iter()
        .map(|c| {
            let mut order = students.clone();
            order.shuffle(&mut rng);
            let mut tiers: Vec<Vec<String>> = Vec::new();
            for s in order {
                match tiers.last_mut() {
                    Some(tier) if rng.gen_bool(params.tie_density.clamp(0.0, 1.0)) => tier.push(s),
                    _ => tiers.push(vec![s]),
                }
            }
            (c.clone(), tiers)
        })
        .collect();

    Problem::validate(&RawProblem {
        students,
        schools: schools.into_iter().zip(quotas).collect(),
        preferences,
        priorities,
    })
    .expect("generator builds valid problems")
}

/// A uniformly random seat assignment respecting quotas.
pub fn random_matching(problem: &Problem, rng: &mut impl Rng) -> Matching {
    let mut seats: Vec<SchoolId> = problem
        .schools()
        .flat_map(|c| std::iter::repeat_n(c, problem.quota(c) as usize))
        .collect();
    seats.shuffle(rng);
    seats.truncate(problem.num_students());
    Matching::new(problem, seats).expect("one seat per student")
}

/// Up to `max_support` matchings drawn by `draw`, with random integer
/// weights 1..=9 normalized to sum to one.
pub fn random_lottery_from(
    rng: &mut ChaCha8Rng,
    max_support: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Matching,
) -> Lottery {
    let k = rng.gen_range(1..=max_support.max(1));
    let weights: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: u64 = weights.iter().sum();
    Lottery::new(
        weights
            .into_iter()
            .map(|w| (draw(rng), crate::rational::ratio(w, total))),
    )
    .expect("weights sum to one")
}

pub fn random_lottery(problem: &Problem, seed: u64, max_support: usize) -> Lottery {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_lottery_from(&mut rng, max_support, |rng| random_matching(problem, rng))
}

/// A random lottery whose support is drawn from `candidates`.
pub fn random_lottery_over(candidates: &[Matching], seed: u64, max_support: usize) -> Lottery {
    assert!(
        !candidates.is_empty(),
        "need at least one candidate matching"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_lottery_from(&mut rng, max_support, |rng| {
        candidates[rng.gen_range(0..candidates.len())].clone()
    })
}

/// Generator settings for the seeded property corpus: 2 to 6 students,
/// 2 to 4 schools, tie densities 0.3, 0.7 and 1.0, and preferences drawn
/// from a small pool so that groups of equals are common.
pub fn corpus_params(seed: u64) -> GeneratorParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c0de);
    let densities = [0.3, 0.7, 1.0];
    let students = rng.gen_range(2..=6);
    let schools = rng.gen_range(2..=4);
    let params = GeneratorParams::new(students, schools, densities[(seed % 3) as usize]);
    match rng.gen_range(0..4) {
        0 => params,
        pool => params.with_preference_pool(pool),
    }
}

/// `count` seeded problems, seeds `0..count`.
pub fn corpus(count: u64) -> impl Iterator<Item = (u64, Problem)> {
    (0..count).map(|seed| (seed, random_problem(seed, corpus_params(seed))))
}
