//! Command implementations behind the `schoolchoice` binary. Each command
//! writes its report to the given sink and returns the process exit code,
//! so tests can drive them without spawning a process.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use schoolchoice::format::{self, AuditReportJson, Instance};
use schoolchoice::lottery::{self, CdfComparison};
use schoolchoice::oracle::{self, GeneratorParams};
use schoolchoice::stable_matching::{self, TieBreakRule};
use schoolchoice::{full_audit, Lottery, LotteryError, Problem};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_SUPPORT_TOO_LARGE: u8 = 2;
pub const EXIT_AUDIT_FAILED: u8 = 3;

/// How ties in school priorities are broken before deferred acceptance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TieBreak {
    InputOrder,
    Seed(u64),
    /// Explicit student order, by name.
    Order(Vec<String>),
}

impl std::str::FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "input-order" {
            return Ok(TieBreak::InputOrder);
        }
        if let Some(rest) = s.strip_prefix("seed") {
            let n = rest.trim_start_matches(['=', ':', ' ']);
            return n
                .parse()
                .map(TieBreak::Seed)
                .map_err(|e| format!("bad seed {n:?}: {e}"));
        }
        if let Some(list) = s.strip_prefix("order=") {
            return Ok(TieBreak::Order(
                list.split(',').map(|x| x.trim().to_string()).collect(),
            ));
        }
        Err(format!(
            "unknown tie-break {s:?}; expected input-order, seed=N or order=a,b,..."
        ))
    }
}

impl TieBreak {
    pub fn rule(&self, problem: &Problem) -> Result<TieBreakRule> {
        Ok(match self {
            TieBreak::InputOrder => TieBreakRule::input_order(problem),
            TieBreak::Seed(n) => TieBreakRule::seeded(problem, *n),
            TieBreak::Order(names) => {
                let order = names
                    .iter()
                    .map(|s| {
                        problem
                            .student_id(s)
                            .with_context(|| format!("unknown student {s:?} in tie-break order"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                TieBreakRule::from_student_order(problem, &order)?
            }
        })
    }
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    format::parse_instance(&text).with_context(|| format!("invalid instance {}", path.display()))
}

pub fn load_lottery(problem: &Problem, path: &Path) -> Result<Lottery> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    format::parse_lottery(problem, &text)
        .with_context(|| format!("invalid lottery {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[derive(Clone, Debug)]
pub struct SolveArgs {
    pub instance: PathBuf,
    pub tie_break: TieBreak,
    pub out: Option<PathBuf>,
    pub marginals_out: Option<PathBuf>,
    pub support_bound: u64,
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<u8> {
    let Instance { problem, groups } = load_instance(&args.instance)?;
    let rule = args.tie_break.rule(&problem)?;
    let mu = stable_matching::constrained_efficient_matching(&problem, &rule);

    writeln!(
        out,
        "constrained efficient matching: {}",
        mu.display(&problem)
    )?;
    let group_names: Vec<String> = groups
        .groups()
        .iter()
        .map(|g| {
            let names: Vec<&str> = g.iter().map(|&i| problem.student_name(i)).collect();
            format!("{{{}}}", names.join(", "))
        })
        .collect();
    writeln!(out, "groups: {}", group_names.join(" "))?;

    let degenerate = Lottery::degenerate(mu);
    let marginals = lottery::ete_reassignment_marginals(&groups, &degenerate.marginals());
    match lottery::ete_reassignment_support(&groups, &degenerate, args.support_bound) {
        Ok(support) => {
            writeln!(out, "support: {} matchings", support.len())?;
            if let Some(path) = &args.out {
                write_file(path, &format::lottery_to_json(&problem, &support))?;
            }
        }
        Err(LotteryError::SupportTooLarge {
            permutations,
            bound,
        }) => {
            if args.out.is_some() {
                writeln!(out, "error: {permutations} within-group permutations exceed the support bound {bound}")?;
                return Ok(EXIT_SUPPORT_TOO_LARGE);
            }
            writeln!(
                out,
                "warning: {permutations} within-group permutations exceed the support bound {bound}; marginals only"
            )?;
        }
        Err(e) => return Err(e.into()),
    }
    if let Some(path) = &args.marginals_out {
        write_file(path, &format::marginals_to_json(&problem, &marginals))?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_audit(
    instance: &Path,
    lottery_path: &Path,
    json: bool,
    out: &mut dyn Write,
) -> Result<u8> {
    let Instance { problem, groups } = load_instance(instance)?;
    let lot = load_lottery(&problem, lottery_path)?;
    let report = full_audit(&problem, &groups, &lot);
    let doc = AuditReportJson::new(&problem, &report);
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        out.write_all(audit_table(&doc).as_bytes())?;
    }
    Ok(if report.passes() {
        EXIT_OK
    } else {
        EXIT_AUDIT_FAILED
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "no"
    }
}

fn audit_table(doc: &AuditReportJson) -> String {
    let mut s = String::new();
    let _ = write!(s, "ex ante stable    {}", verdict(doc.ex_ante_stable));
    if let Some(w) = &doc.ex_ante_witness {
        let _ = write!(
            s,
            "  ({} envies {} at {}; matchings #{} and #{})",
            w.envious, w.envied, w.school, w.envious_matching, w.envied_matching
        );
    }
    s.push('\n');
    let _ = write!(s, "ex post stable    {}", verdict(doc.ex_post_stable));
    if let Some(w) = &doc.ex_post_witness {
        let _ = write!(
            s,
            "  (matching #{}: {} envies {} at {})",
            w.matching, w.envious, w.envied, w.school
        );
    }
    s.push('\n');
    let _ = write!(s, "equal treatment   {}", verdict(doc.ete_satisfied));
    if let Some(d) = &doc.ete_discrepancy {
        let _ = write!(
            s,
            "  ({} and {} differ at {})",
            d.students[0], d.students[1], d.school
        );
    }
    s.push('\n');
    let _ = write!(s, "improvement cycle {}", doc.easic.status);
    if !doc.easic.cycle.is_empty() {
        let pairs: Vec<String> = doc
            .easic
            .cycle
            .iter()
            .map(|[i, c]| format!("({i},{c})"))
            .collect();
        let _ = write!(s, "  {}", pairs.join(" -> "));
    }
    s.push('\n');
    s
}

pub fn cmd_sample(
    instance: &Path,
    lottery_path: &Path,
    seed: u64,
    count: usize,
    out: &mut dyn Write,
) -> Result<u8> {
    let Instance { problem, groups } = load_instance(instance)?;
    let lot = load_lottery(&problem, lottery_path)?;
    for m in lottery::EteSampler::new(&groups, &lot, seed).take(count) {
        writeln!(
            out,
            "{}",
            serde_json::to_string(&format::matching_to_map(&problem, &m))?
        )?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_compare(instance: &Path, a: &Path, b: &Path, out: &mut dyn Write) -> Result<u8> {
    let Instance { problem, .. } = load_instance(instance)?;
    let la = load_lottery(&problem, a)?;
    let lb = load_lottery(&problem, b)?;
    let verdicts = lottery::compare_all(&problem, &la.marginals(), &lb.marginals());
    for (i, v) in problem.students().zip(verdicts) {
        let label = match v {
            CdfComparison::Equal => "equal",
            CdfComparison::FirstDominates => "A strictly better",
            CdfComparison::SecondDominates => "B strictly better",
            CdfComparison::Incomparable => "incomparable",
        };
        writeln!(out, "{:<12} {label}", problem.student_name(i))?;
    }
    let ab = lottery::ordinally_dominates(&problem, &la, &lb);
    let ba = lottery::ordinally_dominates(&problem, &lb, &la);
    let overall = match (ab, ba) {
        (true, _) => "A ordinally dominates B",
        (_, true) => "B ordinally dominates A",
        _ => "neither dominates",
    };
    writeln!(out, "{overall}")?;
    Ok(EXIT_OK)
}

#[derive(Clone, Debug)]
pub struct GenArgs {
    pub seed: u64,
    pub students: usize,
    pub schools: usize,
    pub tie_density: f64,
    pub preference_pool: Option<usize>,
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<u8> {
    if args.students == 0 || args.schools == 0 {
        bail!("need at least one student and one school");
    }
    if !(0.0..=1.0).contains(&args.tie_density) {
        bail!("tie density {} is outside [0, 1]", args.tie_density);
    }
    let mut params = GeneratorParams::new(args.students, args.schools, args.tie_density);
    if let Some(k) = args.preference_pool {
        params = params.with_preference_pool(k);
    }
    let problem = oracle::random_problem(args.seed, params);
    let file = format::InstanceFile::from_problem(&problem);
    writeln!(out, "{}", serde_json::to_string_pretty(&file)?)?;
    Ok(EXIT_OK)
}
