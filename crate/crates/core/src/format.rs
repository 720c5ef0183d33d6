//! JSON files: problem instances, lotteries, marginal matrices and audit
//! reports. Probabilities are always strings holding exact rationals
//! (`"1/4"`, `"1"`, `"0"`), never floats.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit::{AuditReport, EasicStatus};
use crate::lottery::{Lottery, LotteryError, RandomMatching};
use crate::model::{GroupPartition, Matching, Problem, ProblemError, RawProblem};
use crate::rational;

/// Bundled six-student instance in four groups of equals, with only
/// the priority comparisons the example needs and bottom-tie completion.
pub const EXAMPLE1_INSTANCE: &str = include_str!("../fixtures/example1.json");

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Lottery(#[from] LotteryError),
    #[error("`{0}` is not an exact non-negative rational")]
    BadProbability(String),
    #[error("unknown priority_completion `{0}` (expected \"bottom-tie\" or \"error\")")]
    BadCompletion(String),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SchoolEntry {
    pub id: String,
    pub quota: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PriorityCompletion {
    /// Unranked students form one extra tier at the bottom.
    BottomTie,
    #[default]
    Error,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceFile {
    pub students: Vec<String>,
    pub schools: Vec<SchoolEntry>,
    pub preferences: IndexMap<String, Vec<String>>,
    pub priorities: IndexMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority_completion: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Vec<String>>>,
}

/// A validated problem with its groups of equals.
#[derive(Clone, Debug)]
pub struct Instance {
    pub problem: Problem,
    pub groups: GroupPartition,
}

impl InstanceFile {
    pub fn completion(&self) -> Result<PriorityCompletion, FormatError> {
        match self.priority_completion.as_deref() {
            None | Some("error") => Ok(PriorityCompletion::Error),
            Some("bottom-tie") => Ok(PriorityCompletion::BottomTie),
            Some(other) => Err(FormatError::BadCompletion(other.to_string())),
        }
    }

    pub fn to_raw(&self) -> Result<RawProblem, FormatError> {
        let completion = self.completion()?;
        let mut priorities: Vec<(String, Vec<Vec<String>>)> = self
            .priorities
            .iter()
            .map(|(c, t)| (c.clone(), t.clone()))
            .collect();
        if completion == PriorityCompletion::BottomTie {
            for school in &self.schools {
                if !self.priorities.contains_key(&school.id) {
                    priorities.push((school.id.clone(), Vec::new()));
                }
            }
            for (_, tiers) in priorities.iter_mut() {
                let missing: Vec<String> = self
                    .students
                    .iter()
                    .filter(|s| !tiers.iter().flatten().any(|t| t == *s))
                    .cloned()
                    .collect();
                if !missing.is_empty() {
                    tiers.push(missing);
                }
            }
        }
        Ok(RawProblem {
            students: self.students.clone(),
            schools: self
                .schools
                .iter()
                .map(|s| (s.id.clone(), s.quota))
                .collect(),
            preferences: self
                .preferences
                .iter()
                .map(|(i, l)| (i.clone(), l.clone()))
                .collect(),
            priorities,
        })
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let problem = Problem::validate(&self.to_raw()?)?;
        let groups = match &self.groups {
            None => GroupPartition::compute(&problem),
            Some(groups) => {
                let ids = groups
                    .iter()
                    .map(|g| {
                        g.iter()
                            .map(|s| {
                                problem
                                    .student_id(s)
                                    .ok_or_else(|| ProblemError::UnknownId {
                                        kind: "student",
                                        id: s.clone(),
                                    })
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GroupPartition::from_groups(&problem, ids)?
            }
        };
        Ok(Instance { problem, groups })
    }

    pub fn from_problem(problem: &Problem) -> InstanceFile {
        let raw = problem.to_raw();
        InstanceFile {
            students: raw.students,
            schools: raw
                .schools
                .into_iter()
                .map(|(id, quota)| SchoolEntry { id, quota })
                .collect(),
            preferences: raw.preferences.into_iter().collect(),
            priorities: raw.priorities.into_iter().collect(),
            priority_completion: None,
            groups: None,
        }
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.to_instance()
}

pub fn example1() -> Instance {
    parse_instance(EXAMPLE1_INSTANCE).expect("bundled fixture is valid")
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LotteryFile {
    pub matchings: Vec<IndexMap<String, String>>,
    pub probabilities: Vec<String>,
}

impl LotteryFile {
    pub fn from_lottery(problem: &Problem, lottery: &Lottery) -> LotteryFile {
        LotteryFile {
            matchings: lottery
                .matchings()
                .map(|m| matching_to_map(problem, m))
                .collect(),
            probabilities: lottery
                .support()
                .iter()
                .map(|(_, p)| rational::format_prob(p))
                .collect(),
        }
    }

    pub fn to_lottery(&self, problem: &Problem) -> Result<Lottery, FormatError> {
        if self.matchings.len() != self.probabilities.len() {
            return Err(LotteryError::LengthMismatch {
                matchings: self.matchings.len(),
                probabilities: self.probabilities.len(),
            }
            .into());
        }
        let entries = self
            .matchings
            .iter()
            .zip(&self.probabilities)
            .map(|(m, p)| {
                let matching =
                    Matching::from_names(problem, m.iter().map(|(s, c)| (s.as_str(), c.as_str())))?;
                let prob = rational::parse_prob(p)
                    .ok_or_else(|| FormatError::BadProbability(p.clone()))?;
                Ok((matching, prob))
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(Lottery::new(entries)?)
    }
}

pub fn parse_lottery(problem: &Problem, text: &str) -> Result<Lottery, FormatError> {
    let file: LotteryFile = serde_json::from_str(text)?;
    file.to_lottery(problem)
}

pub fn lottery_to_json(problem: &Problem, lottery: &Lottery) -> String {
    let mut out = serde_json::to_string_pretty(&LotteryFile::from_lottery(problem, lottery))
        .expect("lottery serializes");
    out.push('\n');
    out
}

pub fn matching_to_map(problem: &Problem, matching: &Matching) -> IndexMap<String, String> {
    problem
        .students()
        .map(|i| {
            (
                problem.student_name(i).to_string(),
                problem.school_name(matching.school_of(i)).to_string(),
            )
        })
        .collect()
}

/// `student -> school -> probability`, in input order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MarginalsFile {
    pub marginals: IndexMap<String, IndexMap<String, String>>,
}

impl MarginalsFile {
    pub fn from_random_matching(problem: &Problem, rm: &RandomMatching) -> MarginalsFile {
        let marginals = problem
            .students()
            .map(|i| {
                let row = problem
                    .schools()
                    .map(|c| {
                        (
                            problem.school_name(c).to_string(),
                            rational::format_prob(rm.prob(i, c)),
                        )
                    })
                    .collect();
                (problem.student_name(i).to_string(), row)
            })
            .collect();
        MarginalsFile { marginals }
    }

    /// Missing schools read as zero.
    pub fn to_random_matching(&self, problem: &Problem) -> Result<RandomMatching, FormatError> {
        let mut rows = vec![vec![rational::zero(); problem.num_schools()]; problem.num_students()];
        for (s, row) in &self.marginals {
            let i = problem
                .student_id(s)
                .ok_or_else(|| ProblemError::UnknownId {
                    kind: "student",
                    id: s.clone(),
                })?;
            for (c, p) in row {
                let c = problem
                    .school_id(c)
                    .ok_or_else(|| ProblemError::UnknownId {
                        kind: "school",
                        id: c.clone(),
                    })?;
                rows[i.0][c.0] = rational::parse_prob(p)
                    .ok_or_else(|| FormatError::BadProbability(p.clone()))?;
            }
        }
        Ok(RandomMatching::from_rows(rows, problem.num_schools())?)
    }
}

pub fn marginals_to_json(problem: &Problem, rm: &RandomMatching) -> String {
    let mut out = serde_json::to_string_pretty(&MarginalsFile::from_random_matching(problem, rm))
        .expect("marginals serialize");
    out.push('\n');
    out
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExAnteWitnessJson {
    pub envious: String,
    pub envied: String,
    pub school: String,
    pub envious_matching: usize,
    pub envied_matching: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExPostWitnessJson {
    pub matching: usize,
    pub envious: String,
    pub envied: String,
    pub school: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EteDiscrepancyJson {
    pub group: usize,
    pub students: [String; 2],
    pub school: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EasicJson {
    /// `"skipped"`, `"none"` or `"cycle"`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycle: Vec<[String; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AuditReportJson {
    pub ex_ante_stable: bool,
    pub ex_ante_witness: Option<ExAnteWitnessJson>,
    pub ex_post_stable: bool,
    pub ex_post_witness: Option<ExPostWitnessJson>,
    pub ete_satisfied: bool,
    pub ete_discrepancy: Option<EteDiscrepancyJson>,
    pub easic: EasicJson,
}

impl AuditReportJson {
    pub fn new(problem: &Problem, report: &AuditReport) -> Self {
        let student = |i| problem.student_name(i).to_string();
        let school = |c| problem.school_name(c).to_string();
        AuditReportJson {
            ex_ante_stable: report.ex_ante_stable(),
            ex_ante_witness: report.ex_ante.map(|w| ExAnteWitnessJson {
                envious: student(w.envious),
                envied: student(w.envied),
                school: school(w.school),
                envious_matching: w.envious_matching,
                envied_matching: w.envied_matching,
            }),
            ex_post_stable: report.ex_post_stable(),
            ex_post_witness: report.ex_post.map(|(k, e)| ExPostWitnessJson {
                matching: k,
                envious: student(e.envious),
                envied: student(e.envied),
                school: school(e.school),
            }),
            ete_satisfied: report.ete_satisfied(),
            ete_discrepancy: report.ete.map(|(g, a, b, c)| EteDiscrepancyJson {
                group: g,
                students: [student(a), student(b)],
                school: school(c),
            }),
            easic: match &report.easic {
                EasicStatus::Skipped => EasicJson {
                    status: "skipped".into(),
                    cycle: Vec::new(),
                },
                EasicStatus::None => EasicJson {
                    status: "none".into(),
                    cycle: Vec::new(),
                },
                EasicStatus::Cycle(pairs) => EasicJson {
                    status: "cycle".into(),
                    cycle: pairs
                        .iter()
                        .map(|&(i, c)| [student(i), school(c)])
                        .collect(),
                },
            },
        }
    }
}
