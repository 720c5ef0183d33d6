//! Certificates for lotteries: ex ante and ex post stability, equal
//! treatment of equals, and ex ante stable improvement cycles.
//!
//! The cycle check works on the digraph of positive-probability
//! student-school pairs. `(i, c)` points at `(j, d)` when `i` prefers `d` to
//! `c`; the pointer is an arrow when `i` has weakly the highest priority at
//! `d` among everyone pointing at `(j, d)`. An ex ante stable lottery is not
//! ordinally dominated by another ex ante stable lottery exactly when the
//! arrows form no cycle.

use num_traits::Zero;

use crate::graph;
use crate::lottery::{ete_discrepancy, Lottery, RandomMatching};
use crate::model::{has_justified_envy, Envy, GroupPartition, Problem, SchoolId, StudentId};

/// A student-school pair with positive probability.
pub type Pair = (StudentId, SchoolId);

/// `envious` ranks `school` above a seat it holds in matching
/// `envious_matching`, has strictly higher priority at `school` than
/// `envied`, and `envied` holds `school` in matching `envied_matching`.
/// Matching indices refer to the lottery's support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExAnteEnvy {
    pub envious: StudentId,
    pub envied: StudentId,
    pub school: SchoolId,
    pub envious_matching: usize,
    pub envied_matching: usize,
}

/// First `(i, j, s)` in input order with `Pr(s, j) > 0`, `i ≻_s j` and a
/// positive chance that `i` ends up somewhere worse than `s`.
pub fn ex_ante_envy_in_marginals(
    problem: &Problem,
    rm: &RandomMatching,
) -> Option<(StudentId, StudentId, SchoolId)> {
    for i in problem.students() {
        for j in problem.students() {
            for s in problem.schools() {
                if rm.prob(j, s).is_zero() || !problem.strictly_higher_priority(s, i, j) {
                    continue;
                }
                let worse_than_s = problem.preference(i)[problem.rank(i, s) + 1..]
                    .iter()
                    .any(|&c| !rm.prob(i, c).is_zero());
                if worse_than_s {
                    return Some((i, j, s));
                }
            }
        }
    }
    None
}

/// `None` when the lottery is ex ante stable, else the first witness.
pub fn is_ex_ante_stable(problem: &Problem, lottery: &Lottery) -> Option<ExAnteEnvy> {
    let (i, j, s) = ex_ante_envy_in_marginals(problem, &lottery.marginals())?;
    let support = lottery.support();
    let envious_matching = support
        .iter()
        .position(|(m, _)| problem.prefers(i, s, m.school_of(i)))
        .expect("marginal witness has a supporting matching");
    let envied_matching = support
        .iter()
        .position(|(m, _)| m.school_of(j) == s)
        .expect("marginal witness has a supporting matching");
    assert!(problem.strictly_higher_priority(s, i, j));
    Some(ExAnteEnvy {
        envious: i,
        envied: j,
        school: s,
        envious_matching,
        envied_matching,
    })
}

/// `None` when every support matching is stable, else the first unstable
/// one (by support index) with its envy witness.
pub fn is_ex_post_stable(problem: &Problem, lottery: &Lottery) -> Option<(usize, Envy)> {
    lottery
        .matchings()
        .enumerate()
        .find_map(|(k, m)| has_justified_envy(problem, m).map(|e| (k, e)))
}

/// The pointer (`⋗`) and arrow (`▶`) relations on positive pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDigraph {
    /// Ordered by student, then school index.
    pub nodes: Vec<Pair>,
    pub pointed: Vec<Vec<usize>>,
    pub arrows: Vec<Vec<usize>>,
}

impl PairDigraph {
    pub fn node(&self, pair: Pair) -> Option<usize> {
        self.nodes.binary_search(&pair).ok()
    }

    pub fn points(&self, from: Pair, to: Pair) -> bool {
        Self::has_edge(&self.pointed, self.node(from), self.node(to))
    }

    pub fn arrow(&self, from: Pair, to: Pair) -> bool {
        Self::has_edge(&self.arrows, self.node(from), self.node(to))
    }

    fn has_edge(adj: &[Vec<usize>], from: Option<usize>, to: Option<usize>) -> bool {
        match (from, to) {
            (Some(a), Some(b)) => adj[a].contains(&b),
            _ => false,
        }
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.iter().map(Vec::len).sum()
    }

    pub fn pointer_count(&self) -> usize {
        self.pointed.iter().map(Vec::len).sum()
    }
}

pub fn build_pair_digraph(problem: &Problem, rm: &RandomMatching) -> PairDigraph {
    let nodes: Vec<Pair> = problem
        .students()
        .flat_map(|i| problem.schools().map(move |c| (i, c)))
        .filter(|&(i, c)| !rm.prob(i, c).is_zero())
        .collect();
    let mut pointed = vec![Vec::new(); nodes.len()];
    let mut arrows = vec![Vec::new(); nodes.len()];

    // Who points at a target (j, d) depends on d alone.
    for d in problem.schools() {
        let targets: Vec<usize> = (0..nodes.len()).filter(|&t| nodes[t].1 == d).collect();
        if targets.is_empty() {
            continue;
        }
        let pointers: Vec<usize> = (0..nodes.len())
            .filter(|&k| {
                let (i, c) = nodes[k];
                problem.prefers(i, d, c)
            })
            .collect();
        let best = pointers.iter().map(|&k| problem.tier(d, nodes[k].0)).min();
        for &k in &pointers {
            pointed[k].extend(&targets);
            if Some(problem.tier(d, nodes[k].0)) == best {
                arrows[k].extend(&targets);
            }
        }
    }
    for adj in pointed.iter_mut().chain(arrows.iter_mut()) {
        adj.sort_unstable();
    }
    PairDigraph {
        nodes,
        pointed,
        arrows,
    }
}

/// `(i, c) ⋗ (j, d)` straight from the definition.
pub fn points_by_definition(problem: &Problem, rm: &RandomMatching, from: Pair, to: Pair) -> bool {
    let ((i, c), (j, d)) = (from, to);
    problem.prefers(i, d, c) && !rm.prob(i, c).is_zero() && !rm.prob(j, d).is_zero()
}

/// `(i, c) ▶ (j, d)` straight from the definition, scanning every pair.
pub fn arrow_by_definition(problem: &Problem, rm: &RandomMatching, from: Pair, to: Pair) -> bool {
    if !points_by_definition(problem, rm, from, to) {
        return false;
    }
    let (i, d) = (from.0, to.1);
    problem.students().all(|k| {
        problem.schools().all(|c2| {
            !points_by_definition(problem, rm, (k, c2), to)
                || problem.weakly_higher_priority(d, i, k)
        })
    })
}

/// A shortest cycle of arrows, if any.
pub fn find_easic(problem: &Problem, rm: &RandomMatching) -> Option<Vec<Pair>> {
    let digraph = build_pair_digraph(problem, rm);
    let cycle: Vec<Pair> = graph::shortest_cycle(&digraph.arrows)?
        .into_iter()
        .map(|k| digraph.nodes[k])
        .collect();
    for (k, &from) in cycle.iter().enumerate() {
        let to = cycle[(k + 1) % cycle.len()];
        assert!(
            arrow_by_definition(problem, rm, from, to),
            "cycle edge fails re-verification"
        );
    }
    Some(cycle)
}

/// Result of the improvement-cycle search inside a full audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EasicStatus {
    /// Not run: the certificate only speaks about ex ante stable lotteries.
    Skipped,
    None,
    Cycle(Vec<Pair>),
}

/// `(group, student, student, school)`: two members of a group whose
/// probabilities of `school` differ.
pub type EteDiscrepancy = (usize, StudentId, StudentId, SchoolId);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub ex_ante: Option<ExAnteEnvy>,
    pub ex_post: Option<(usize, Envy)>,
    pub ete: Option<EteDiscrepancy>,
    pub easic: EasicStatus,
}

impl AuditReport {
    pub fn ex_ante_stable(&self) -> bool {
        self.ex_ante.is_none()
    }

    pub fn ex_post_stable(&self) -> bool {
        self.ex_post.is_none()
    }

    pub fn ete_satisfied(&self) -> bool {
        self.ete.is_none()
    }

    /// Ex ante stable, fair to equals, and not dominated by another ex ante
    /// stable lottery.
    pub fn passes(&self) -> bool {
        self.ex_ante_stable() && self.ete_satisfied() && self.easic == EasicStatus::None
    }
}

pub fn full_audit(problem: &Problem, groups: &GroupPartition, lottery: &Lottery) -> AuditReport {
    let rm = lottery.marginals();
    let ex_ante = is_ex_ante_stable(problem, lottery);
    let easic = if ex_ante.is_some() {
        EasicStatus::Skipped
    } else {
        match find_easic(problem, &rm) {
            Some(cycle) => EasicStatus::Cycle(cycle),
            None => EasicStatus::None,
        }
    };
    AuditReport {
        ex_ante,
        ex_post: is_ex_post_stable(problem, lottery),
        ete: ete_discrepancy(groups, &rm),
        easic,
    }
}
