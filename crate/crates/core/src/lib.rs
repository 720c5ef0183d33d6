//! School-choice lotteries that are ex ante stable and treat equals equally.
//!
//! The construction has two steps. First a constrained efficient stable
//! matching is computed by running deferred acceptance on a tie-broken
//! priority profile and then applying stable improvement cycles until none
//! remains ([`stable_matching`]). Second, the degenerate lottery on that
//! matching is passed through the ETE reassignment, which averages it over
//! every permutation of students within their groups of equals
//! ([`lottery`]).
//!
//! Every lottery, whether produced here or read from a file, can be audited
//! for ex ante and ex post stability, equal treatment of equals, and the
//! absence of ex ante stable improvement cycles ([`audit`]). Probabilities
//! are exact rationals throughout.
//!
//! The [`oracle`] module holds brute-force reference implementations used
//! as ground truth in tests, and [`format`] defines the JSON files consumed
//! and produced by the command-line tool.

pub mod audit;
pub mod format;
pub mod lottery;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod stable_matching;

mod graph;

pub use audit::{full_audit, AuditReport, PairDigraph};
pub use lottery::{
    CdfComparison, Lottery, LotteryError, RandomMatching, UpperCdf, DEFAULT_SUPPORT_BOUND,
};
pub use model::{GroupPartition, Matching, Problem, ProblemError, SchoolId, StudentId};
pub use rational::Prob;
pub use stable_matching::{ImprovementCycle, TieBreakRule};

/// The two-step method: a constrained efficient matching, then the ETE
/// reassignment of the lottery that puts all weight on it.
///
/// Returns the matching together with the reassigned lottery, or
/// [`LotteryError::SupportTooLarge`] when the explicit support would exceed
/// `support_bound` matchings.
pub fn solve(
    problem: &Problem,
    groups: &GroupPartition,
    tie_break: &TieBreakRule,
    support_bound: u64,
) -> Result<(Matching, Lottery), LotteryError> {
    let matching = stable_matching::constrained_efficient_matching(problem, tie_break);
    let lottery = lottery::ete_reassignment_support(
        groups,
        &Lottery::degenerate(matching.clone()),
        support_bound,
    )?;
    Ok((matching, lottery))
}
