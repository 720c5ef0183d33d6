//! Problems, deterministic matchings and groups of equals.
//!
//! Students and schools are opaque string ids at the boundary and dense
//! indices ([`StudentId`], [`SchoolId`]) everywhere else. Preferences are
//! strict orders over all schools; priorities are weak orders given as tiers,
//! where tier 0 is the highest priority.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StudentId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchoolId(pub usize);

impl StudentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl SchoolId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("problem has no students")]
    NoStudents,
    #[error("problem has no schools")]
    NoSchools,
    #[error("duplicate student id `{0}`")]
    DuplicateStudent(String),
    #[error("duplicate school id `{0}`")]
    DuplicateSchool(String),
    #[error("unknown {kind} id `{id}`")]
    UnknownId { kind: &'static str, id: String },
    #[error("total capacity {capacity} is smaller than the number of students {students}")]
    CapacityShortfall { capacity: u64, students: usize },
    #[error(
        "preference list of student `{student}` is not a permutation of all schools: {detail}"
    )]
    IncompletePreference { student: String, detail: String },
    #[error("priority tiers of school `{school}` overlap: student `{student}` appears twice")]
    OverlappingTiers { school: String, student: String },
    #[error("priority tiers of school `{school}` do not rank student `{student}`")]
    IncompleteTiers { school: String, student: String },
    #[error("school `{0}` has more than one priority list")]
    DuplicatePriorities(String),
    #[error("priority tiers of school `{school}` contain an empty tier")]
    EmptyTier { school: String },
    #[error("matching assigns {found} students but the problem has {expected}")]
    MatchingSize { expected: usize, found: usize },
    #[error("matching puts {assigned} students at school `{school}` with quota {quota}")]
    OverCapacity {
        school: String,
        assigned: usize,
        quota: u32,
    },
    #[error("student `{0}` is missing from the group partition")]
    UngroupedStudent(String),
    #[error("student `{0}` appears in more than one group")]
    RegroupedStudent(String),
    #[error("students `{0}` and `{1}` share a group but are not equals")]
    NotEquals(String, String),
}

/// A problem description keyed by string ids, before validation.
#[derive(Clone, Debug, Default)]
pub struct RawProblem {
    pub students: Vec<String>,
    pub schools: Vec<(String, u32)>,
    pub preferences: Vec<(String, Vec<String>)>,
    pub priorities: Vec<(String, Vec<Vec<String>>)>,
}

/// A validated school choice problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    students: Vec<String>,
    schools: Vec<String>,
    quotas: Vec<u32>,
    prefs: Vec<Vec<SchoolId>>,
    // rank[i][c]: position of school c in student i's list, 0 = favourite.
    rank: Vec<Vec<usize>>,
    tiers: Vec<Vec<Vec<StudentId>>>,
    // tier_of[c][i]
    tier_of: Vec<Vec<usize>>,
}

fn index_ids(
    ids: &[String],
    dup: fn(String) -> ProblemError,
) -> Result<HashMap<&str, usize>, ProblemError> {
    let mut map = HashMap::with_capacity(ids.len());
    for (k, id) in ids.iter().enumerate() {
        if map.insert(id.as_str(), k).is_some() {
            return Err(dup(id.clone()));
        }
    }
    Ok(map)
}

impl Problem {
    /// Checks every problem invariant and builds the O(1) comparison tables.
    pub fn validate(raw: &RawProblem) -> Result<Problem, ProblemError> {
        if raw.students.is_empty() {
            return Err(ProblemError::NoStudents);
        }
        if raw.schools.is_empty() {
            return Err(ProblemError::NoSchools);
        }
        let student_ix = index_ids(&raw.students, ProblemError::DuplicateStudent)?;
        let school_names: Vec<String> = raw.schools.iter().map(|(s, _)| s.clone()).collect();
        let school_ix = index_ids(&school_names, ProblemError::DuplicateSchool)?;
        let n = raw.students.len();
        let m = school_names.len();

        let capacity: u64 = raw.schools.iter().map(|(_, q)| u64::from(*q)).sum();
        if capacity < n as u64 {
            return Err(ProblemError::CapacityShortfall {
                capacity,
                students: n,
            });
        }

        let student = |id: &str| {
            student_ix
                .get(id)
                .copied()
                .ok_or_else(|| ProblemError::UnknownId {
                    kind: "student",
                    id: id.to_string(),
                })
        };
        let school = |id: &str| {
            school_ix
                .get(id)
                .copied()
                .ok_or_else(|| ProblemError::UnknownId {
                    kind: "school",
                    id: id.to_string(),
                })
        };

        let mut prefs: Vec<Option<Vec<SchoolId>>> = vec![None; n];
        for (sid, list) in &raw.preferences {
            let i = student(sid)?;
            let incomplete = |detail: String| ProblemError::IncompletePreference {
                student: sid.clone(),
                detail,
            };
            if prefs[i].is_some() {
                return Err(incomplete("listed twice".into()));
            }
            let mut seen = vec![false; m];
            let mut order = Vec::with_capacity(m);
            for cid in list {
                let c = school(cid)?;
                if seen[c] {
                    return Err(incomplete(format!("school `{cid}` ranked twice")));
                }
                seen[c] = true;
                order.push(SchoolId(c));
            }
            if let Some(c) = seen.iter().position(|s| !s) {
                return Err(incomplete(format!(
                    "school `{}` not ranked",
                    school_names[c]
                )));
            }
            prefs[i] = Some(order);
        }
        let prefs: Vec<Vec<SchoolId>> = prefs
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| ProblemError::IncompletePreference {
                    student: raw.students[i].clone(),
                    detail: "no preference list".into(),
                })
            })
            .collect::<Result<_, _>>()?;
        let mut rank = vec![vec![0; m]; n];
        for (i, order) in prefs.iter().enumerate() {
            for (r, c) in order.iter().enumerate() {
                rank[i][c.0] = r;
            }
        }

        let mut tiers: Vec<Option<Vec<Vec<StudentId>>>> = vec![None; m];
        let mut tier_of = vec![vec![usize::MAX; n]; m];
        for (cid, list) in &raw.priorities {
            let c = school(cid)?;
            if tiers[c].is_some() {
                return Err(ProblemError::DuplicatePriorities(cid.clone()));
            }
            let mut out = Vec::with_capacity(list.len());
            for (t, tier) in list.iter().enumerate() {
                if tier.is_empty() {
                    return Err(ProblemError::EmptyTier {
                        school: cid.clone(),
                    });
                }
                let mut members = Vec::with_capacity(tier.len());
                for sid in tier {
                    let i = student(sid)?;
                    if tier_of[c][i] != usize::MAX {
                        return Err(ProblemError::OverlappingTiers {
                            school: cid.clone(),
                            student: sid.clone(),
                        });
                    }
                    tier_of[c][i] = t;
                    members.push(StudentId(i));
                }
                out.push(members);
            }
            if let Some(i) = tier_of[c].iter().position(|&t| t == usize::MAX) {
                return Err(ProblemError::IncompleteTiers {
                    school: cid.clone(),
                    student: raw.students[i].clone(),
                });
            }
            tiers[c] = Some(out);
        }
        let tiers: Vec<Vec<Vec<StudentId>>> = tiers
            .into_iter()
            .enumerate()
            .map(|(c, t)| {
                t.ok_or_else(|| ProblemError::IncompleteTiers {
                    school: school_names[c].clone(),
                    student: raw.students[0].clone(),
                })
            })
            .collect::<Result<_, _>>()?;

        Ok(Problem {
            students: raw.students.clone(),
            schools: school_names,
            quotas: raw.schools.iter().map(|(_, q)| *q).collect(),
            prefs,
            rank,
            tiers,
            tier_of,
        })
    }

    pub fn num_students(&self) -> usize {
        self.students.len()
    }

    pub fn num_schools(&self) -> usize {
        self.schools.len()
    }

    pub fn students(&self) -> impl Iterator<Item = StudentId> + Clone {
        (0..self.students.len()).map(StudentId)
    }

    pub fn schools(&self) -> impl Iterator<Item = SchoolId> + Clone {
        (0..self.schools.len()).map(SchoolId)
    }

    pub fn student_name(&self, i: StudentId) -> &str {
        &self.students[i.0]
    }

    pub fn school_name(&self, c: SchoolId) -> &str {
        &self.schools[c.0]
    }

    pub fn student_names(&self) -> &[String] {
        &self.students
    }

    pub fn school_names(&self) -> &[String] {
        &self.schools
    }

    pub fn student_id(&self, name: &str) -> Option<StudentId> {
        self.students.iter().position(|s| s == name).map(StudentId)
    }

    pub fn school_id(&self, name: &str) -> Option<SchoolId> {
        self.schools.iter().position(|s| s == name).map(SchoolId)
    }

    pub fn quota(&self, c: SchoolId) -> u32 {
        self.quotas[c.0]
    }

    /// Student `i`'s schools, most preferred first.
    pub fn preference(&self, i: StudentId) -> &[SchoolId] {
        &self.prefs[i.0]
    }

    pub fn rank(&self, i: StudentId, c: SchoolId) -> usize {
        self.rank[i.0][c.0]
    }

    /// `c P_i d`.
    #[inline]
    pub fn prefers(&self, i: StudentId, c: SchoolId, d: SchoolId) -> bool {
        self.rank[i.0][c.0] < self.rank[i.0][d.0]
    }

    /// `c R_i d`.
    #[inline]
    pub fn weakly_prefers(&self, i: StudentId, c: SchoolId, d: SchoolId) -> bool {
        self.rank[i.0][c.0] <= self.rank[i.0][d.0]
    }

    pub fn tiers(&self, c: SchoolId) -> &[Vec<StudentId>] {
        &self.tiers[c.0]
    }

    #[inline]
    pub fn tier(&self, c: SchoolId, i: StudentId) -> usize {
        self.tier_of[c.0][i.0]
    }

    /// `i ≻_c j`.
    #[inline]
    pub fn strictly_higher_priority(&self, c: SchoolId, i: StudentId, j: StudentId) -> bool {
        self.tier_of[c.0][i.0] < self.tier_of[c.0][j.0]
    }

    /// `i ≿_c j`.
    #[inline]
    pub fn weakly_higher_priority(&self, c: SchoolId, i: StudentId, j: StudentId) -> bool {
        self.tier_of[c.0][i.0] <= self.tier_of[c.0][j.0]
    }

    #[inline]
    pub fn tied(&self, c: SchoolId, i: StudentId, j: StudentId) -> bool {
        self.tier_of[c.0][i.0] == self.tier_of[c.0][j.0]
    }

    /// Same preferences and same tier at every school.
    pub fn are_equals(&self, i: StudentId, j: StudentId) -> bool {
        self.prefs[i.0] == self.prefs[j.0] && self.schools().all(|c| self.tied(c, i, j))
    }

    /// The raw description this problem was validated from.
    pub fn to_raw(&self) -> RawProblem {
        RawProblem {
            students: self.students.clone(),
            schools: self
                .schools
                .iter()
                .cloned()
                .zip(self.quotas.iter().copied())
                .collect(),
            preferences: self
                .students()
                .map(|i| {
                    let list = self
                        .preference(i)
                        .iter()
                        .map(|&c| self.school_name(c).to_string());
                    (self.student_name(i).to_string(), list.collect())
                })
                .collect(),
            priorities: self
                .schools()
                .map(|c| {
                    let tiers = self.tiers(c).iter().map(|t| {
                        t.iter()
                            .map(|&i| self.student_name(i).to_string())
                            .collect()
                    });
                    (self.school_name(c).to_string(), tiers.collect())
                })
                .collect(),
        }
    }
}

/// A deterministic matching: every student holds exactly one seat.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    assignment: Vec<SchoolId>,
    members: Vec<Vec<StudentId>>,
}

impl Matching {
    pub fn new(problem: &Problem, assignment: Vec<SchoolId>) -> Result<Matching, ProblemError> {
        if assignment.len() != problem.num_students() {
            return Err(ProblemError::MatchingSize {
                expected: problem.num_students(),
                found: assignment.len(),
            });
        }
        let members = Self::members_of(problem.num_schools(), &assignment);
        for c in problem.schools() {
            let assigned = members[c.0].len();
            if assigned > problem.quota(c) as usize {
                return Err(ProblemError::OverCapacity {
                    school: problem.school_name(c).to_string(),
                    assigned,
                    quota: problem.quota(c),
                });
            }
        }
        Ok(Matching {
            assignment,
            members,
        })
    }

    /// Builds a matching from `(student, school)` name pairs.
    pub fn from_names<'a>(
        problem: &Problem,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Matching, ProblemError> {
        let mut assignment = vec![None; problem.num_students()];
        for (s, c) in pairs {
            let i = problem
                .student_id(s)
                .ok_or_else(|| ProblemError::UnknownId {
                    kind: "student",
                    id: s.to_string(),
                })?;
            let c = problem
                .school_id(c)
                .ok_or_else(|| ProblemError::UnknownId {
                    kind: "school",
                    id: c.to_string(),
                })?;
            assignment[i.0] = Some(c);
        }
        let found = assignment.iter().filter(|a| a.is_some()).count();
        if found != assignment.len() {
            return Err(ProblemError::MatchingSize {
                expected: assignment.len(),
                found,
            });
        }
        Matching::new(problem, assignment.into_iter().flatten().collect())
    }

    fn members_of(num_schools: usize, assignment: &[SchoolId]) -> Vec<Vec<StudentId>> {
        let mut members = vec![Vec::new(); num_schools];
        for (i, c) in assignment.iter().enumerate() {
            members[c.0].push(StudentId(i));
        }
        members
    }

    #[inline]
    pub fn school_of(&self, i: StudentId) -> SchoolId {
        self.assignment[i.0]
    }

    /// `μ(c)`, in student order.
    pub fn students_at(&self, c: SchoolId) -> &[StudentId] {
        &self.members[c.0]
    }

    pub fn num_schools(&self) -> usize {
        self.members.len()
    }

    pub fn assignment(&self) -> &[SchoolId] {
        &self.assignment
    }

    /// Moves each listed student to the listed school. Capacity is the
    /// caller's responsibility.
    pub(crate) fn reassign(&self, moves: &[(StudentId, SchoolId)]) -> Matching {
        let mut assignment = self.assignment.clone();
        for &(i, c) in moves {
            assignment[i.0] = c;
        }
        let members = Self::members_of(self.members.len(), &assignment);
        Matching {
            assignment,
            members,
        }
    }

    /// `μ'(i) = μ(π(i))` for a bijection `π` given as a lookup table.
    pub(crate) fn permuted(&self, pi: &[StudentId]) -> Matching {
        let assignment: Vec<SchoolId> = pi.iter().map(|&j| self.assignment[j.0]).collect();
        let members = Self::members_of(self.members.len(), &assignment);
        Matching {
            assignment,
            members,
        }
    }

    pub fn display<'a>(&'a self, problem: &'a Problem) -> MatchingDisplay<'a> {
        MatchingDisplay {
            matching: self,
            problem,
        }
    }
}

pub struct MatchingDisplay<'a> {
    matching: &'a Matching,
    problem: &'a Problem,
}

impl fmt::Display for MatchingDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.problem.students().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(
                f,
                "{}->{}",
                self.problem.student_name(i),
                self.problem.school_name(self.matching.school_of(i))
            )?;
        }
        Ok(())
    }
}

/// `envious` prefers `school`, which `envied` holds, and has strictly higher
/// priority there than `envied`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Envy {
    pub envious: StudentId,
    pub envied: StudentId,
    pub school: SchoolId,
}

/// First justified-envy witness in (envious, envied) input order.
pub fn has_justified_envy(problem: &Problem, matching: &Matching) -> Option<Envy> {
    for i in problem.students() {
        let own = matching.school_of(i);
        for j in problem.students() {
            let s = matching.school_of(j);
            if problem.prefers(i, s, own) && problem.strictly_higher_priority(s, i, j) {
                return Some(Envy {
                    envious: i,
                    envied: j,
                    school: s,
                });
            }
        }
    }
    None
}

pub fn is_stable(problem: &Problem, matching: &Matching) -> bool {
    has_justified_envy(problem, matching).is_none()
}

/// Whether `better` Pareto dominates `worse`.
pub fn pareto_dominates(problem: &Problem, better: &Matching, worse: &Matching) -> bool {
    let mut strict = false;
    for i in problem.students() {
        let (b, w) = (better.school_of(i), worse.school_of(i));
        if problem.prefers(i, w, b) {
            return false;
        }
        strict |= b != w;
    }
    strict
}

/// A partition of the students into groups of equals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPartition {
    groups: Vec<Vec<StudentId>>,
    group_of: Vec<usize>,
}

impl GroupPartition {
    /// The coarsest partition: equals always share a group. Groups are
    /// numbered by their first member.
    pub fn compute(problem: &Problem) -> GroupPartition {
        let mut groups: Vec<Vec<StudentId>> = Vec::new();
        let mut group_of = vec![usize::MAX; problem.num_students()];
        for i in problem.students() {
            match groups.iter().position(|g| problem.are_equals(g[0], i)) {
                Some(g) => {
                    groups[g].push(i);
                    group_of[i.0] = g;
                }
                None => {
                    group_of[i.0] = groups.len();
                    groups.push(vec![i]);
                }
            }
        }
        GroupPartition { groups, group_of }
    }

    /// A user-supplied partition, which may split equals but never joins
    /// students who are not equals.
    pub fn from_groups(
        problem: &Problem,
        groups: Vec<Vec<StudentId>>,
    ) -> Result<GroupPartition, ProblemError> {
        let mut group_of = vec![usize::MAX; problem.num_students()];
        let mut kept = Vec::with_capacity(groups.len());
        for members in groups.into_iter().filter(|g| !g.is_empty()) {
            for &i in &members {
                if group_of[i.0] != usize::MAX {
                    return Err(ProblemError::RegroupedStudent(
                        problem.student_name(i).into(),
                    ));
                }
                group_of[i.0] = kept.len();
                if !problem.are_equals(members[0], i) {
                    return Err(ProblemError::NotEquals(
                        problem.student_name(members[0]).into(),
                        problem.student_name(i).into(),
                    ));
                }
            }
            kept.push(members);
        }
        if let Some(i) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(ProblemError::UngroupedStudent(problem.students[i].clone()));
        }
        Ok(GroupPartition {
            groups: kept,
            group_of,
        })
    }

    pub fn singletons(problem: &Problem) -> GroupPartition {
        GroupPartition {
            groups: problem.students().map(|i| vec![i]).collect(),
            group_of: (0..problem.num_students()).collect(),
        }
    }

    pub fn groups(&self) -> &[Vec<StudentId>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group_of(&self, i: StudentId) -> usize {
        self.group_of[i.0]
    }

    /// `L = |I_1|! × ⋯ × |I_N|!`, or `None` on overflow.
    pub fn permutation_count(&self) -> Option<u64> {
        self.groups.iter().try_fold(1u64, |acc, g| {
            (1..=g.len() as u64).try_fold(acc, |a, k| a.checked_mul(k))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> String {
        x.to_string()
    }

    fn raw(
        students: &[&str],
        schools: &[(&str, u32)],
        prefs: &[(&str, &[&str])],
        prios: &[(&str, &[&[&str]])],
    ) -> RawProblem {
        RawProblem {
            students: students.iter().map(|x| s(x)).collect(),
            schools: schools.iter().map(|(c, q)| (s(c), *q)).collect(),
            preferences: prefs
                .iter()
                .map(|(i, l)| (s(i), l.iter().map(|x| s(x)).collect()))
                .collect(),
            priorities: prios
                .iter()
                .map(|(c, t)| {
                    (
                        s(c),
                        t.iter().map(|t| t.iter().map(|x| s(x)).collect()).collect(),
                    )
                })
                .collect(),
        }
    }

    fn two_by_two(tiered: bool) -> Problem {
        let tiers: &[&[&str]] = if tiered {
            &[&["x"], &["y"]]
        } else {
            &[&["x", "y"]]
        };
        Problem::validate(&raw(
            &["x", "y"],
            &[("s", 1), ("t", 1)],
            &[("x", &["s", "t"]), ("y", &["s", "t"])],
            &[("s", tiers), ("t", &[&["x", "y"]])],
        ))
        .unwrap()
    }

    #[test]
    fn minimal_problem_is_valid() {
        let p = Problem::validate(&raw(
            &["x"],
            &[("s", 1)],
            &[("x", &["s"])],
            &[("s", &[&["x"]])],
        ))
        .unwrap();
        assert_eq!(p.num_students(), 1);
        let m = Matching::new(&p, vec![SchoolId(0)]).unwrap();
        assert!(has_justified_envy(&p, &m).is_none());
    }

    #[test]
    fn rejects_capacity_shortfall() {
        let err = Problem::validate(&raw(
            &["x", "y"],
            &[("s", 1), ("t", 0)],
            &[("x", &["s", "t"]), ("y", &["s", "t"])],
            &[("s", &[&["x", "y"]]), ("t", &[&["x", "y"]])],
        ))
        .unwrap_err();
        assert_eq!(
            err,
            ProblemError::CapacityShortfall {
                capacity: 1,
                students: 2
            }
        );
    }

    #[test]
    fn rejects_bad_preferences_and_tiers() {
        let err = Problem::validate(&raw(
            &["x", "y"],
            &[("s", 1), ("t", 1)],
            &[("x", &["s"]), ("y", &["s", "t"])],
            &[("s", &[&["x", "y"]]), ("t", &[&["x", "y"]])],
        ))
        .unwrap_err();
        assert!(
            matches!(err, ProblemError::IncompletePreference { ref student, .. } if student == "x")
        );

        let err = Problem::validate(&raw(
            &["x", "y"],
            &[("s", 1), ("t", 1)],
            &[("x", &["s", "t"]), ("y", &["s", "t"])],
            &[("s", &[&["x"], &["x", "y"]]), ("t", &[&["x", "y"]])],
        ))
        .unwrap_err();
        assert_eq!(
            err,
            ProblemError::OverlappingTiers {
                school: s("s"),
                student: s("x")
            }
        );

        let err = Problem::validate(&raw(
            &["x", "y"],
            &[("s", 1), ("t", 1)],
            &[("x", &["s", "t"]), ("y", &["s", "u"])],
            &[("s", &[&["x", "y"]]), ("t", &[&["x", "y"]])],
        ))
        .unwrap_err();
        assert_eq!(
            err,
            ProblemError::UnknownId {
                kind: "school",
                id: s("u")
            }
        );

        let err = Problem::validate(&raw(
            &["x", "y"],
            &[("s", 1), ("t", 1)],
            &[("x", &["s", "t"]), ("y", &["s", "t"])],
            &[("s", &[&["x"]]), ("t", &[&["x", "y"]])],
        ))
        .unwrap_err();
        assert!(matches!(err, ProblemError::IncompleteTiers { .. }));
    }

    #[test]
    fn envy_and_pareto_on_two_students() {
        let p = two_by_two(true);
        let good = Matching::from_names(&p, [("x", "s"), ("y", "t")]).unwrap();
        let bad = Matching::from_names(&p, [("x", "t"), ("y", "s")]).unwrap();
        assert!(is_stable(&p, &good));
        assert_eq!(
            has_justified_envy(&p, &bad),
            Some(Envy {
                envious: StudentId(0),
                envied: StudentId(1),
                school: SchoolId(0)
            })
        );
        // y is worse off in the swap, so neither dominates.
        assert!(!pareto_dominates(&p, &good, &bad));
        assert!(!pareto_dominates(&p, &bad, &good));
        assert!(!pareto_dominates(&p, &good, &good));
    }

    #[test]
    fn over_capacity_is_rejected() {
        let p = two_by_two(true);
        assert!(matches!(
            Matching::from_names(&p, [("x", "s"), ("y", "s")]),
            Err(ProblemError::OverCapacity { assigned: 2, .. })
        ));
    }

    #[test]
    fn groups_of_identical_students() {
        let p = Problem::validate(&raw(
            &["x", "y", "z"],
            &[("s", 3)],
            &[("x", &["s"]), ("y", &["s"]), ("z", &["s"])],
            &[("s", &[&["x", "y", "z"]])],
        ))
        .unwrap();
        let g = GroupPartition::compute(&p);
        assert_eq!(
            g.groups(),
            &[vec![StudentId(0), StudentId(1), StudentId(2)]]
        );
        assert_eq!(g.permutation_count(), Some(6));

        let strict = two_by_two(true);
        assert_eq!(GroupPartition::compute(&strict).len(), 2);
        let tied = two_by_two(false);
        assert_eq!(GroupPartition::compute(&tied).len(), 1);
    }

    #[test]
    fn explicit_groups_are_validated() {
        let p = two_by_two(false);
        assert!(
            GroupPartition::from_groups(&p, vec![vec![StudentId(0)], vec![StudentId(1)]]).is_ok()
        );
        let q = two_by_two(true);
        assert_eq!(
            GroupPartition::from_groups(&q, vec![vec![StudentId(0), StudentId(1)]]),
            Err(ProblemError::NotEquals(s("x"), s("y")))
        );
        assert_eq!(
            GroupPartition::from_groups(&q, vec![vec![StudentId(0)]]),
            Err(ProblemError::UngroupedStudent(s("y")))
        );
    }
}
