//! Constrained efficient stable matchings.
//!
//! Student-proposing deferred acceptance runs on a strict refinement of the
//! priorities. Its output is stable for the weak priorities too, but ties may
//! have been broken wastefully. Stable improvement cycles then repair this:
//! a student points at a school they prefer to their own seat only if no
//! other student who also wants that school has strictly higher priority
//! there. Rotating seats along a cycle of such pointers (or moving a student
//! into a vacant seat they point at) is a Pareto improvement that keeps the
//! matching stable, and a stable matching admits no such cycle exactly when
//! no stable matching Pareto dominates it.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{has_justified_envy, Envy, Matching, Problem, SchoolId, StudentId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TieBreakError {
    #[error("tie-break order is not a permutation of the students")]
    NotAPermutation,
    #[error("tie-break order for school `{school}` contradicts its priorities")]
    NotAnExtension { school: String },
    #[error("expected {expected} per-school orders, got {found}")]
    WrongSchoolCount { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StableMatchingError {
    #[error("matching is not stable: {0:?}")]
    MatchingUnstable(Envy),
}

/// A strict order per school that refines the school's priority tiers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieBreakRule {
    orders: Vec<Vec<StudentId>>,
    // position[c][i]: place of student i in school c's strict order.
    position: Vec<Vec<usize>>,
}

impl TieBreakRule {
    /// Ties broken by the order in which students are listed.
    pub fn input_order(problem: &Problem) -> TieBreakRule {
        let order: Vec<StudentId> = problem.students().collect();
        Self::single(problem, &order)
    }

    /// One uniformly random student order, shared by all schools.
    pub fn seeded(problem: &Problem, seed: u64) -> TieBreakRule {
        let mut order: Vec<StudentId> = problem.students().collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::single(problem, &order)
    }

    /// Ties at every school broken by one global student order.
    pub fn from_student_order(
        problem: &Problem,
        order: &[StudentId],
    ) -> Result<TieBreakRule, TieBreakError> {
        let mut seen = vec![false; problem.num_students()];
        for &i in order {
            if i.0 >= seen.len() || std::mem::replace(&mut seen[i.0], true) {
                return Err(TieBreakError::NotAPermutation);
            }
        }
        if order.len() != seen.len() {
            return Err(TieBreakError::NotAPermutation);
        }
        Ok(Self::single(problem, order))
    }

    /// Explicit strict orders, one per school in school order.
    pub fn from_school_orders(
        problem: &Problem,
        orders: Vec<Vec<StudentId>>,
    ) -> Result<TieBreakRule, TieBreakError> {
        if orders.len() != problem.num_schools() {
            return Err(TieBreakError::WrongSchoolCount {
                expected: problem.num_schools(),
                found: orders.len(),
            });
        }
        let n = problem.num_students();
        let mut position = vec![vec![usize::MAX; n]; orders.len()];
        for (c, order) in problem.schools().zip(&orders) {
            if order.len() != n {
                return Err(TieBreakError::NotAPermutation);
            }
            for (k, &i) in order.iter().enumerate() {
                if i.0 >= n || position[c.0][i.0] != usize::MAX {
                    return Err(TieBreakError::NotAPermutation);
                }
                position[c.0][i.0] = k;
            }
            if order
                .windows(2)
                .any(|w| problem.strictly_higher_priority(c, w[1], w[0]))
            {
                return Err(TieBreakError::NotAnExtension {
                    school: problem.school_name(c).to_string(),
                });
            }
        }
        Ok(TieBreakRule { orders, position })
    }

    fn single(problem: &Problem, order: &[StudentId]) -> TieBreakRule {
        let mut rank = vec![0; problem.num_students()];
        for (k, i) in order.iter().enumerate() {
            rank[i.0] = k;
        }
        let orders: Vec<Vec<StudentId>> = problem
            .schools()
            .map(|c| {
                let mut o: Vec<StudentId> = problem.students().collect();
                o.sort_by_key(|&i| (problem.tier(c, i), rank[i.0]));
                o
            })
            .collect();
        let position = orders
            .iter()
            .map(|o| {
                let mut pos = vec![0; o.len()];
                for (k, i) in o.iter().enumerate() {
                    pos[i.0] = k;
                }
                pos
            })
            .collect();
        TieBreakRule { orders, position }
    }

    pub fn order(&self, c: SchoolId) -> &[StudentId] {
        &self.orders[c.0]
    }

    #[inline]
    pub fn ranks_above(&self, c: SchoolId, i: StudentId, j: StudentId) -> bool {
        self.position[c.0][i.0] < self.position[c.0][j.0]
    }
}

/// Student-proposing deferred acceptance under the strict orders of `tie_break`.
pub fn deferred_acceptance(problem: &Problem, tie_break: &TieBreakRule) -> Matching {
    let n = problem.num_students();
    let mut next = vec![0usize; n];
    let mut held: Vec<Vec<StudentId>> = vec![Vec::new(); problem.num_schools()];
    let mut free: Vec<StudentId> = problem.students().collect();

    while !free.is_empty() {
        for &i in &free {
            // Total capacity covers every student, so no list runs out.
            let c = problem.preference(i)[next[i.0]];
            next[i.0] += 1;
            held[c.0].push(i);
        }
        let mut rejected = Vec::new();
        for c in problem.schools() {
            let quota = problem.quota(c) as usize;
            if held[c.0].len() > quota {
                held[c.0].sort_by_key(|&i| tie_break.position[c.0][i.0]);
                rejected.extend(held[c.0].drain(quota..));
            }
        }
        rejected.sort_unstable();
        free = rejected;
    }

    let mut assignment = vec![SchoolId(0); n];
    for c in problem.schools() {
        for &i in &held[c.0] {
            assignment[i.0] = c;
        }
    }
    Matching::new(problem, assignment).expect("deferred acceptance respects quotas")
}

/// A Pareto-improving reassignment: each listed student moves to the listed
/// school. Either a rotation of seats among the listed students or a single
/// student taking a vacant seat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImprovementCycle {
    pub moves: Vec<(StudentId, SchoolId)>,
}

impl ImprovementCycle {
    pub fn apply(&self, matching: &Matching) -> Matching {
        matching.reassign(&self.moves)
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

/// For each school, the students who prefer it to their own seat and have
/// the highest priority tier among all such students.
fn top_desirers(problem: &Problem, matching: &Matching) -> Vec<Vec<bool>> {
    problem
        .schools()
        .map(|c| {
            let desirers: Vec<StudentId> = problem
                .students()
                .filter(|&i| problem.prefers(i, c, matching.school_of(i)))
                .collect();
            let mut top = vec![false; problem.num_students()];
            if let Some(best) = desirers.iter().map(|&i| problem.tier(c, i)).min() {
                for &i in &desirers {
                    top[i.0] = problem.tier(c, i) == best;
                }
            }
            top
        })
        .collect()
}

/// The first stable improvement cycle by a deterministic scan: the
/// lowest-indexed student that lies on one, then the shortest such cycle
/// through that student. A vacant seat counts as a cycle of length one.
pub fn find_stable_improvement_cycle(
    problem: &Problem,
    matching: &Matching,
) -> Result<Option<ImprovementCycle>, StableMatchingError> {
    if let Some(envy) = has_justified_envy(problem, matching) {
        return Err(StableMatchingError::MatchingUnstable(envy));
    }
    let top = top_desirers(problem, matching);
    let n = problem.num_students();
    let points_at = |i: StudentId, j: StudentId| top[matching.school_of(j).0][i.0];

    for start in problem.students() {
        let vacancy = problem.preference(start).iter().copied().find(|&c| {
            top[c.0][start.0] && matching.students_at(c).len() < problem.quota(c) as usize
        });
        if let Some(c) = vacancy {
            return Ok(Some(ImprovementCycle {
                moves: vec![(start, c)],
            }));
        }

        // BFS for the shortest path start -> ... -> start.
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::from([start]);
        let mut closing = None;
        'bfs: while let Some(i) = queue.pop_front() {
            for j in problem.students() {
                if !points_at(i, j) {
                    continue;
                }
                if j == start {
                    closing = Some(i);
                    break 'bfs;
                }
                if parent[j.0] == usize::MAX {
                    parent[j.0] = i.0;
                    queue.push_back(j);
                }
            }
        }
        if let Some(last) = closing {
            let mut path = vec![last];
            while *path.last().unwrap() != start {
                let p = parent[path.last().unwrap().0];
                path.push(StudentId(p));
            }
            path.reverse();
            // path = start, ..., last; each takes the seat of its successor.
            let moves = (0..path.len())
                .map(|k| {
                    let next = path[(k + 1) % path.len()];
                    (path[k], matching.school_of(next))
                })
                .collect();
            return Ok(Some(ImprovementCycle { moves }));
        }
    }
    Ok(None)
}

/// Every matching visited from a stable start until no improvement cycle
/// remains; the first entry is the start.
#[derive(Clone, Debug)]
pub struct ImprovementRun {
    pub steps: Vec<Matching>,
    pub cycles: Vec<ImprovementCycle>,
}

impl ImprovementRun {
    pub fn result(&self) -> &Matching {
        self.steps.last().expect("run has a start")
    }
}

pub fn improve_until_efficient(
    problem: &Problem,
    start: Matching,
) -> Result<ImprovementRun, StableMatchingError> {
    let mut run = ImprovementRun {
        steps: vec![start],
        cycles: Vec::new(),
    };
    while let Some(cycle) = find_stable_improvement_cycle(problem, run.result())? {
        let next = cycle.apply(run.result());
        run.cycles.push(cycle);
        run.steps.push(next);
    }
    Ok(run)
}

/// Deferred acceptance followed by stable improvement cycles.
pub fn constrained_efficient_matching(problem: &Problem, tie_break: &TieBreakRule) -> Matching {
    let start = deferred_acceptance(problem, tie_break);
    improve_until_efficient(problem, start)
        .expect("deferred acceptance output is stable")
        .steps
        .pop()
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{is_stable, pareto_dominates, RawProblem};

    fn problem(
        prefs: &[(&str, &[&str])],
        schools: &[(&str, u32)],
        prios: &[(&str, &[&[&str]])],
    ) -> Problem {
        Problem::validate(&RawProblem {
            students: prefs.iter().map(|(i, _)| i.to_string()).collect(),
            schools: schools.iter().map(|(c, q)| (c.to_string(), *q)).collect(),
            preferences: prefs
                .iter()
                .map(|(i, l)| (i.to_string(), l.iter().map(|x| x.to_string()).collect()))
                .collect(),
            priorities: prios
                .iter()
                .map(|(c, t)| {
                    let tiers = t.iter().map(|t| t.iter().map(|x| x.to_string()).collect());
                    (c.to_string(), tiers.collect())
                })
                .collect(),
        })
        .unwrap()
    }

    #[test]
    fn textbook_da() {
        let p = problem(
            &[("x", &["s", "t"]), ("y", &["s", "t"])],
            &[("s", 1), ("t", 1)],
            &[("s", &[&["x"], &["y"]]), ("t", &[&["x", "y"]])],
        );
        let m = deferred_acceptance(&p, &TieBreakRule::input_order(&p));
        assert_eq!(
            m,
            Matching::from_names(&p, [("x", "s"), ("y", "t")]).unwrap()
        );
        assert!(find_stable_improvement_cycle(&p, &m).unwrap().is_none());
    }

    #[test]
    fn single_student() {
        let p = problem(&[("x", &["s"])], &[("s", 1)], &[("s", &[&["x"]])]);
        let m = constrained_efficient_matching(&p, &TieBreakRule::input_order(&p));
        assert_eq!(m.school_of(StudentId(0)), SchoolId(0));
    }

    #[test]
    fn mutual_swap_under_full_ties() {
        let p = problem(
            &[("x", &["t", "s"]), ("y", &["s", "t"])],
            &[("s", 1), ("t", 1)],
            &[("s", &[&["x", "y"]]), ("t", &[&["x", "y"]])],
        );
        let m = Matching::from_names(&p, [("x", "s"), ("y", "t")]).unwrap();
        let cycle = find_stable_improvement_cycle(&p, &m).unwrap().unwrap();
        assert_eq!(
            cycle.moves,
            vec![(StudentId(0), SchoolId(1)), (StudentId(1), SchoolId(0))]
        );
        let improved = cycle.apply(&m);
        assert!(is_stable(&p, &improved));
        assert!(pareto_dominates(&p, &improved, &m));
    }

    #[test]
    fn vacant_seat_is_an_improvement() {
        // Stable (no envy is possible for a lone student) but wasteful.
        let p = problem(
            &[("x", &["s", "t"])],
            &[("s", 1), ("t", 1)],
            &[("s", &[&["x"]]), ("t", &[&["x"]])],
        );
        let m = Matching::from_names(&p, [("x", "t")]).unwrap();
        let cycle = find_stable_improvement_cycle(&p, &m).unwrap().unwrap();
        assert_eq!(cycle.moves, vec![(StudentId(0), SchoolId(0))]);
    }

    #[test]
    fn swap_blocked_by_priority() {
        // x and y would gain by swapping, but z also wants s and outranks y
        // there, so y may not point at x's seat.
        let p = problem(
            &[
                ("x", &["t", "s", "u"]),
                ("y", &["s", "t", "u"]),
                ("z", &["s", "u", "t"]),
            ],
            &[("s", 1), ("t", 1), ("u", 1)],
            &[
                ("s", &[&["x", "z"], &["y"]]),
                ("t", &[&["x", "y", "z"]]),
                ("u", &[&["x", "y", "z"]]),
            ],
        );
        let m = Matching::from_names(&p, [("x", "s"), ("y", "t"), ("z", "u")]).unwrap();
        assert!(is_stable(&p, &m));
        assert!(find_stable_improvement_cycle(&p, &m).unwrap().is_none());
    }

    #[test]
    fn rejects_unstable_start() {
        let p = problem(
            &[("x", &["s", "t"]), ("y", &["s", "t"])],
            &[("s", 1), ("t", 1)],
            &[("s", &[&["x"], &["y"]]), ("t", &[&["x", "y"]])],
        );
        let m = Matching::from_names(&p, [("x", "t"), ("y", "s")]).unwrap();
        assert_eq!(
            find_stable_improvement_cycle(&p, &m),
            Err(StableMatchingError::MatchingUnstable(Envy {
                envious: StudentId(0),
                envied: StudentId(1),
                school: SchoolId(0),
            }))
        );
    }

    #[test]
    fn tie_break_rules_extend_priorities() {
        let p = problem(
            &[("x", &["s"]), ("y", &["s"]), ("z", &["s"])],
            &[("s", 3)],
            &[("s", &[&["z"], &["x", "y"]])],
        );
        let t = TieBreakRule::input_order(&p);
        assert_eq!(
            t.order(SchoolId(0)),
            &[StudentId(2), StudentId(0), StudentId(1)]
        );
        let t = TieBreakRule::from_student_order(&p, &[StudentId(1), StudentId(0), StudentId(2)])
            .unwrap();
        assert_eq!(
            t.order(SchoolId(0)),
            &[StudentId(2), StudentId(1), StudentId(0)]
        );
        assert_eq!(
            TieBreakRule::from_school_orders(
                &p,
                vec![vec![StudentId(0), StudentId(2), StudentId(1)]]
            ),
            Err(TieBreakError::NotAnExtension { school: "s".into() })
        );
        assert_eq!(
            TieBreakRule::from_student_order(&p, &[StudentId(1), StudentId(1), StudentId(2)]),
            Err(TieBreakError::NotAPermutation)
        );
        for seed in 0..10 {
            let t = TieBreakRule::seeded(&p, seed);
            assert_eq!(t.order(SchoolId(0))[0], StudentId(2));
        }
    }
}
