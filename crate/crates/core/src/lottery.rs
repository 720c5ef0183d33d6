//! Lotteries over matchings, their marginals, stochastic dominance and the
//! ETE reassignment.
//!
//! The ETE reassignment of a lottery mixes, for every matching in its
//! support, all matchings obtained by permuting seats inside each group of
//! equals, each with weight `1/L` where `L = Π |I_n|!`. Since `L` grows
//! factorially the explicit support is only built up to a bound. The
//! marginal form (group-averaged rows) and the two-stage sampler give the
//! same random assignment at any scale.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{GroupPartition, Matching, Problem, SchoolId, StudentId};
use crate::rational::{self, Prob};

/// Largest number of within-group permutations materialized by
/// [`ete_reassignment_support`] unless configured otherwise.
pub const DEFAULT_SUPPORT_BOUND: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LotteryError {
    #[error("lottery has no matchings")]
    Empty,
    #[error("lottery has {matchings} matchings but {probabilities} probabilities")]
    LengthMismatch {
        matchings: usize,
        probabilities: usize,
    },
    #[error("probability {0} is negative")]
    Negative(String),
    #[error("probabilities sum to {0}, not 1")]
    SumNotOne(String),
    #[error(
        "explicit ETE support needs {permutations} within-group permutations, above the bound \
         of {bound}; use the marginal or sampling form instead"
    )]
    SupportTooLarge { permutations: String, bound: u64 },
    #[error("row of student {student} sums to {sum}, not 1")]
    NotRowStochastic { student: usize, sum: String },
    #[error("random matching has the wrong shape")]
    Shape,
}

/// A probability distribution over matchings with exact weights.
///
/// Equality compares distributions; the order of the support is ignored.
#[derive(Clone, Debug)]
pub struct Lottery {
    support: Vec<(Matching, Prob)>,
}

impl PartialEq for Lottery {
    fn eq(&self, other: &Lottery) -> bool {
        self.len() == other.len()
            && self
                .support
                .iter()
                .all(|(m, p)| other.probability_of(m) == *p)
    }
}

impl Eq for Lottery {}

impl Lottery {
    /// Validates weights, drops zero-weight entries and merges duplicate
    /// matchings, keeping first-appearance order.
    pub fn new(
        entries: impl IntoIterator<Item = (Matching, Prob)>,
    ) -> Result<Lottery, LotteryError> {
        let mut merged = Merger::default();
        for (m, p) in entries {
            if p.is_negative() {
                return Err(LotteryError::Negative(rational::format_prob(&p)));
            }
            if !p.is_zero() {
                merged.add(m, p);
            }
        }
        let support = merged.finish();
        if support.is_empty() {
            return Err(LotteryError::Empty);
        }
        let total: Prob = support.iter().map(|(_, p)| p).sum();
        if !total.is_one() {
            return Err(LotteryError::SumNotOne(rational::format_prob(&total)));
        }
        Ok(Lottery { support })
    }

    /// Probability one on `matching`.
    pub fn degenerate(matching: Matching) -> Lottery {
        Lottery {
            support: vec![(matching, rational::one())],
        }
    }

    pub fn support(&self) -> &[(Matching, Prob)] {
        &self.support
    }

    pub fn matchings(&self) -> impl Iterator<Item = &Matching> {
        self.support.iter().map(|(m, _)| m)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `λ_μ`, zero outside the support.
    pub fn probability_of(&self, matching: &Matching) -> Prob {
        self.support
            .iter()
            .find(|(m, _)| m == matching)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(rational::zero)
    }

    pub fn marginals(&self) -> RandomMatching {
        let (first, _) = &self.support[0];
        let n = first.assignment().len();
        let mut rows = vec![vec![rational::zero(); first.num_schools()]; n];
        for (m, p) in &self.support {
            for (i, c) in m.assignment().iter().enumerate() {
                rows[i][c.0] += p;
            }
        }
        RandomMatching { rows }
    }
}

#[derive(Default)]
struct Merger {
    index: HashMap<Vec<SchoolId>, usize>,
    entries: Vec<(Matching, Prob)>,
}

impl Merger {
    fn add(&mut self, m: Matching, p: Prob) {
        match self.index.get(m.assignment()) {
            Some(&k) => self.entries[k].1 += p,
            None => {
                self.index
                    .insert(m.assignment().to_vec(), self.entries.len());
                self.entries.push((m, p));
            }
        }
    }

    fn finish(self) -> Vec<(Matching, Prob)> {
        self.entries
    }
}

/// Per-student distributions over schools: `rows[i][c] = Pr(c, c(i, λ))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomMatching {
    rows: Vec<Vec<Prob>>,
}

impl RandomMatching {
    /// Checks that every row has one entry per school and sums to one.
    pub fn from_rows(
        rows: Vec<Vec<Prob>>,
        num_schools: usize,
    ) -> Result<RandomMatching, LotteryError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != num_schools || row.iter().any(|p| p.is_negative()) {
                return Err(LotteryError::Shape);
            }
            let sum: Prob = row.iter().sum();
            if !sum.is_one() {
                return Err(LotteryError::NotRowStochastic {
                    student: i,
                    sum: rational::format_prob(&sum),
                });
            }
        }
        Ok(RandomMatching { rows })
    }

    #[inline]
    pub fn prob(&self, i: StudentId, c: SchoolId) -> &Prob {
        &self.rows[i.0][c.0]
    }

    pub fn row(&self, i: StudentId) -> &[Prob] {
        &self.rows[i.0]
    }

    pub fn rows(&self) -> &[Vec<Prob>] {
        &self.rows
    }

    pub fn num_students(&self) -> usize {
        self.rows.len()
    }

    /// Expected enrollment of each school.
    pub fn column_totals(&self) -> Vec<Prob> {
        let m = self.rows.first().map_or(0, Vec::len);
        (0..m)
            .map(|c| self.rows.iter().map(|r| &r[c]).sum())
            .collect()
    }
}

/// `F̄(c, i, λ)`: the probability that `i` gets a school weakly preferred to `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperCdf {
    values: Vec<Vec<Prob>>,
}

impl UpperCdf {
    #[inline]
    pub fn value(&self, i: StudentId, c: SchoolId) -> &Prob {
        &self.values[i.0][c.0]
    }

    /// Values for `i` listed along `i`'s preference order.
    pub fn along_preference(&self, problem: &Problem, i: StudentId) -> Vec<Prob> {
        problem
            .preference(i)
            .iter()
            .map(|&c| self.values[i.0][c.0].clone())
            .collect()
    }
}

pub fn upper_cdf(problem: &Problem, rm: &RandomMatching) -> UpperCdf {
    let values = problem
        .students()
        .map(|i| {
            let mut row = vec![rational::zero(); problem.num_schools()];
            let mut acc = rational::zero();
            for &c in problem.preference(i) {
                acc += rm.prob(i, c);
                row[c.0] = acc.clone();
            }
            row
        })
        .collect();
    UpperCdf { values }
}

/// How one student's assignment under a second random matching compares
/// with the first, by first-order stochastic dominance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdfComparison {
    Equal,
    /// The second weakly dominates everywhere and strictly somewhere.
    SecondDominates,
    /// The first weakly dominates everywhere and strictly somewhere.
    FirstDominates,
    Incomparable,
}

fn compare_cdfs(
    problem: &Problem,
    i: StudentId,
    first: &UpperCdf,
    second: &UpperCdf,
) -> CdfComparison {
    let (mut up, mut down) = (false, false);
    for c in problem.schools() {
        match second.value(i, c).cmp(first.value(i, c)) {
            std::cmp::Ordering::Greater => up = true,
            std::cmp::Ordering::Less => down = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    match (up, down) {
        (false, false) => CdfComparison::Equal,
        (true, false) => CdfComparison::SecondDominates,
        (false, true) => CdfComparison::FirstDominates,
        (true, true) => CdfComparison::Incomparable,
    }
}

pub fn compare_student(
    problem: &Problem,
    i: StudentId,
    first: &RandomMatching,
    second: &RandomMatching,
) -> CdfComparison {
    compare_cdfs(
        problem,
        i,
        &upper_cdf(problem, first),
        &upper_cdf(problem, second),
    )
}

/// Per-student comparisons, in student order.
pub fn compare_all(
    problem: &Problem,
    first: &RandomMatching,
    second: &RandomMatching,
) -> Vec<CdfComparison> {
    let (f, s) = (upper_cdf(problem, first), upper_cdf(problem, second));
    problem
        .students()
        .map(|i| compare_cdfs(problem, i, &f, &s))
        .collect()
}

/// Whether `better` ordinally dominates `worse` as random matchings.
pub fn random_matching_dominates(
    problem: &Problem,
    better: &RandomMatching,
    worse: &RandomMatching,
) -> bool {
    let verdicts = compare_all(problem, worse, better);
    verdicts
        .iter()
        .all(|v| matches!(v, CdfComparison::Equal | CdfComparison::SecondDominates))
        && verdicts.contains(&CdfComparison::SecondDominates)
}

/// Whether lottery `better` ordinally dominates lottery `worse`.
pub fn ordinally_dominates(problem: &Problem, better: &Lottery, worse: &Lottery) -> bool {
    random_matching_dominates(problem, &better.marginals(), &worse.marginals())
}

/// All bijections that only move students inside their own group, as lookup
/// tables `π[i]`. There are `Π |I_n|!` of them.
fn within_group_permutations(
    groups: &GroupPartition,
    n: usize,
) -> impl Iterator<Item = Vec<StudentId>> + '_ {
    groups
        .groups()
        .iter()
        .map(|g| g.iter().copied().permutations(g.len()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(move |images| {
            let mut pi: Vec<StudentId> = (0..n).map(StudentId).collect();
            for (group, image) in groups.groups().iter().zip(images) {
                for (&i, j) in group.iter().zip(image) {
                    pi[i.0] = j;
                }
            }
            pi
        })
}

/// `M_D(μ)` with multiplicity: one matching per within-group permutation.
pub fn derived_matchings<'a>(
    groups: &'a GroupPartition,
    matching: &'a Matching,
) -> impl Iterator<Item = Matching> + 'a {
    within_group_permutations(groups, matching.assignment().len()).map(|pi| matching.permuted(&pi))
}

/// The ETE reassignment with its support written out.
pub fn ete_reassignment_support(
    groups: &GroupPartition,
    lottery: &Lottery,
    bound: u64,
) -> Result<Lottery, LotteryError> {
    let count = match groups.permutation_count() {
        Some(l) if l <= bound => l,
        other => {
            return Err(LotteryError::SupportTooLarge {
                permutations: other.map_or_else(|| "more than 2^64".to_string(), |l| l.to_string()),
                bound,
            })
        }
    };
    let share = Prob::new(BigInt::one(), BigInt::from(count));
    let mut merged = Merger::default();
    for (m, p) in lottery.support() {
        let weight = p * &share;
        for derived in derived_matchings(groups, m) {
            merged.add(derived, weight.clone());
        }
    }
    Ok(Lottery {
        support: merged.finish(),
    })
}

/// The ETE reassignment at the level of marginals: every row is replaced by
/// the average row of its group.
pub fn ete_reassignment_marginals(groups: &GroupPartition, rm: &RandomMatching) -> RandomMatching {
    let mut rows = rm.rows.clone();
    for group in groups.groups() {
        let size = Prob::from_integer(BigInt::from(group.len()));
        let width = rm.rows[group[0].0].len();
        let avg: Vec<Prob> = (0..width)
            .map(|c| group.iter().map(|i| &rm.rows[i.0][c]).sum::<Prob>() / &size)
            .collect();
        for i in group {
            rows[i.0] = avg.clone();
        }
    }
    RandomMatching { rows }
}

/// First pair of same-group students whose rows differ, as
/// `(group, student, student, school)`.
pub fn ete_discrepancy(
    groups: &GroupPartition,
    rm: &RandomMatching,
) -> Option<(usize, StudentId, StudentId, SchoolId)> {
    for (g, members) in groups.groups().iter().enumerate() {
        let first = members[0];
        for &other in &members[1..] {
            let differs = rm
                .row(first)
                .iter()
                .zip(rm.row(other))
                .position(|(a, b)| a != b);
            if let Some(c) = differs {
                return Some((g, first, other, SchoolId(c)));
            }
        }
    }
    None
}

pub fn satisfies_ete(groups: &GroupPartition, rm: &RandomMatching) -> bool {
    ete_discrepancy(groups, rm).is_none()
}

/// Draws realizations of the ETE reassignment of a lottery: a matching is
/// drawn from the lottery, then each group's seats are shuffled uniformly
/// among its members.
pub struct EteSampler<'a> {
    groups: &'a GroupPartition,
    lottery: &'a Lottery,
    // cumulative[k] = Σ_{l ≤ k} λ_l · denominator
    cumulative: Vec<BigUint>,
    denominator: BigUint,
    rng: ChaCha8Rng,
}

impl<'a> EteSampler<'a> {
    pub fn new(groups: &'a GroupPartition, lottery: &'a Lottery, seed: u64) -> Self {
        let denominator = lottery
            .support()
            .iter()
            .fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
        let mut acc = BigInt::zero();
        let cumulative = lottery
            .support()
            .iter()
            .map(|(_, p)| {
                acc += p.numer() * (&denominator / p.denom());
                acc.to_biguint().expect("probabilities are positive")
            })
            .collect();
        EteSampler {
            groups,
            lottery,
            cumulative,
            denominator: denominator.to_biguint().expect("denominators are positive"),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Index of the support matching drawn by the first stage.
    fn draw_index(&mut self) -> usize {
        let r = self.rng.gen_biguint_below(&self.denominator);
        self.cumulative.partition_point(|c| *c <= r)
    }

    pub fn draw(&mut self) -> Matching {
        let k = self.draw_index();
        let base = &self.lottery.support()[k].0;
        let mut pi: Vec<StudentId> = (0..base.assignment().len()).map(StudentId).collect();
        for group in self.groups.groups() {
            let mut image = group.clone();
            image.shuffle(&mut self.rng);
            for (&i, j) in group.iter().zip(image) {
                pi[i.0] = j;
            }
        }
        base.permuted(&pi)
    }
}

impl Iterator for EteSampler<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        Some(self.draw())
    }
}

pub fn sample_ete_realization(groups: &GroupPartition, lottery: &Lottery, seed: u64) -> Matching {
    EteSampler::new(groups, lottery, seed).draw()
}
