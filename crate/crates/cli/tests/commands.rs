use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use schoolchoice::format;
use schoolchoice_cli::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn run(f: impl FnOnce(&mut Vec<u8>) -> anyhow::Result<u8>) -> (u8, String) {
    let mut out = Vec::new();
    let code = f(&mut out).unwrap();
    (code, String::from_utf8(out).unwrap())
}

fn solve_args(tie_break: TieBreak, dir: &Path) -> SolveArgs {
    SolveArgs {
        instance: fixture("example1.json"),
        tie_break,
        out: Some(dir.join("lottery.json")),
        marginals_out: Some(dir.join("marginals.json")),
        support_bound: schoolchoice::DEFAULT_SUPPORT_BOUND,
    }
}

fn improving_order() -> TieBreak {
    "order=i,j,i',j',k,l".parse().unwrap()
}

#[test]
fn tie_break_parsing() {
    assert_eq!("input-order".parse::<TieBreak>(), Ok(TieBreak::InputOrder));
    assert_eq!("seed=7".parse::<TieBreak>(), Ok(TieBreak::Seed(7)));
    assert_eq!("seed 7".parse::<TieBreak>(), Ok(TieBreak::Seed(7)));
    assert_eq!(
        "order=a,b".parse::<TieBreak>(),
        Ok(TieBreak::Order(vec!["a".into(), "b".into()]))
    );
    assert!("random".parse::<TieBreak>().is_err());
    assert!("seed=x".parse::<TieBreak>().is_err());
}

#[test]
fn solve_writes_the_four_matching_lottery() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run(|o| cmd_solve(&solve_args(improving_order(), dir.path()), o));
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("i->a i'->c j->a j'->c k->d l->b"), "{text}");
    assert!(text.contains("{i, i'} {j, j'} {k} {l}"), "{text}");

    let problem = format::example1().problem;
    let written = std::fs::read_to_string(dir.path().join("lottery.json")).unwrap();
    let expected = std::fs::read_to_string(fixture("lambda_star_star.json")).unwrap();
    assert_eq!(
        format::parse_lottery(&problem, &written).unwrap(),
        format::parse_lottery(&problem, &expected).unwrap()
    );
    let marginals = std::fs::read_to_string(dir.path().join("marginals.json")).unwrap();
    let file: format::MarginalsFile = serde_json::from_str(&marginals).unwrap();
    assert_eq!(file.marginals["i"]["a"], "1/2");
    assert_eq!(file.marginals["k"]["d"], "1");
    assert_eq!(file.marginals["l"]["d"], "0");
}

#[test]
fn solve_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for tb in [TieBreak::InputOrder, TieBreak::Seed(3)] {
        run(|o| cmd_solve(&solve_args(tb.clone(), a.path()), o));
        run(|o| cmd_solve(&solve_args(tb.clone(), b.path()), o));
        for f in ["lottery.json", "marginals.json"] {
            assert_eq!(
                std::fs::read(a.path().join(f)).unwrap(),
                std::fs::read(b.path().join(f)).unwrap()
            );
        }
    }
}

#[test]
fn solve_with_singleton_groups_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("strict.json");
    std::fs::write(
        &instance,
        r#"{"students":["x","y","z"],
            "schools":[{"id":"a","quota":1},{"id":"b","quota":2}],
            "preferences":{"x":["a","b"],"y":["a","b"],"z":["b","a"]},
            "priorities":{"a":[["y"],["x"],["z"]],"b":[["x"],["y"],["z"]]}}"#,
    )
    .unwrap();
    let mut args = solve_args(TieBreak::InputOrder, dir.path());
    args.instance = instance.clone();
    let (code, _) = run(|o| cmd_solve(&args, o));
    assert_eq!(code, EXIT_OK);
    let problem = load_instance(&instance).unwrap().problem;
    let lot = load_lottery(&problem, &dir.path().join("lottery.json")).unwrap();
    assert_eq!(lot.len(), 1);
    let m = format::matching_to_map(&problem, &lot.support()[0].0);
    let pairs: Vec<(&str, &str)> = m.iter().map(|(s, c)| (s.as_str(), c.as_str())).collect();
    assert_eq!(pairs, [("x", "b"), ("y", "a"), ("z", "b")]);
}

#[test]
fn solve_refuses_large_support_only_when_asked_for_it() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = solve_args(improving_order(), dir.path());
    args.support_bound = 3;
    let (code, text) = run(|o| cmd_solve(&args, o));
    assert_eq!(code, EXIT_SUPPORT_TOO_LARGE);
    assert!(text.contains("exceed the support bound 3"));

    args.out = None;
    let (code, text) = run(|o| cmd_solve(&args, o));
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("warning"));
    assert!(dir.path().join("marginals.json").exists());
}

#[test]
fn audit_exit_codes() {
    let inst = fixture("example1.json");
    let (code, text) = run(|o| cmd_audit(&inst, &fixture("lambda_bar.json"), false, o));
    assert_eq!(code, EXIT_AUDIT_FAILED);
    assert!(text.contains("i envies k at b"), "{text}");
    assert!(text.contains("ex post stable    yes"), "{text}");

    let (code, _) = run(|o| cmd_audit(&inst, &fixture("lambda_star_star.json"), false, o));
    assert_eq!(code, EXIT_OK);
    let (code, text) = run(|o| cmd_audit(&inst, &fixture("lambda_star.json"), true, o));
    assert_eq!(code, EXIT_AUDIT_FAILED);
    let doc: format::AuditReportJson = serde_json::from_str(&text).unwrap();
    assert!(!doc.ete_satisfied);
    assert!(doc.ex_ante_stable);
}

#[test]
fn sample_is_deterministic_and_in_support() {
    let inst = fixture("example1.json");
    let lot = fixture("lambda_star_star.json");
    let (_, first) = run(|o| cmd_sample(&inst, &lot, 7, 5, o));
    let (_, second) = run(|o| cmd_sample(&inst, &lot, 7, 5, o));
    assert_eq!(first, second);
    let problem = format::example1().problem;
    let support = load_lottery(&problem, &lot).unwrap();
    for line in first.lines() {
        let map: BTreeMap<String, String> = serde_json::from_str(line).unwrap();
        let m = schoolchoice::Matching::from_names(
            &problem,
            map.iter().map(|(s, c)| (s.as_str(), c.as_str())),
        )
        .unwrap();
        assert!(support.probability_of(&m) > schoolchoice::rational::zero());
    }

    let (_, degenerate) = run(|o| cmd_sample(&inst, &fixture("lambda_hat.json"), 11, 3, o));
    for line in degenerate.lines() {
        assert_eq!(
            line,
            r#"{"i":"a","i'":"a","j":"c","j'":"c","k":"b","l":"d"}"#
        );
    }
}

#[test]
fn compare_verdicts() {
    let inst = fixture("example1.json");
    let (_, text) = run(|o| {
        cmd_compare(
            &inst,
            &fixture("lambda_bar.json"),
            &fixture("lambda_star_star.json"),
            o,
        )
    });
    assert!(text.ends_with("A ordinally dominates B\n"), "{text}");
    assert!(text.contains("k            A strictly better"));
    assert!(text.contains("i            equal"));
    let (_, text) = run(|o| {
        cmd_compare(
            &inst,
            &fixture("lambda_star_star.json"),
            &fixture("lambda_bar.json"),
            o,
        )
    });
    assert!(text.ends_with("B ordinally dominates A\n"));
    let (_, text) = run(|o| {
        cmd_compare(
            &inst,
            &fixture("lambda_bar.json"),
            &fixture("lambda_prime.json"),
            o,
        )
    });
    assert!(text.ends_with("A ordinally dominates B\n"));
    let (_, text) = run(|o| {
        cmd_compare(
            &inst,
            &fixture("lambda_bar.json"),
            &fixture("lambda_bar.json"),
            o,
        )
    });
    assert!(text.ends_with("neither dominates\n"));
}

#[test]
fn gen_output_is_a_valid_instance() {
    let args = GenArgs {
        seed: 9,
        students: 5,
        schools: 3,
        tie_density: 0.7,
        preference_pool: Some(2),
    };
    let (code, text) = run(|o| cmd_gen(&args, o));
    assert_eq!(code, EXIT_OK);
    let inst = format::parse_instance(&text).unwrap();
    assert_eq!(inst.problem.num_students(), 5);
    let (_, again) = run(|o| cmd_gen(&args, o));
    assert_eq!(text, again);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_schoolchoice");
    let dir = tempfile::tempdir().unwrap();
    let inst = fixture("example1.json");
    let out = Command::new(bin).output().unwrap();
    assert!(!out.status.success());

    let out = Command::new(bin)
        .arg("audit")
        .arg(&inst)
        .arg(fixture("lambda_bar.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(bin)
        .arg("audit")
        .arg(&inst)
        .arg(fixture("lambda_star_star.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let short = dir.path().join("short.json");
    std::fs::write(
        &short,
        r#"{"students":["x","y"],"schools":[{"id":"a","quota":1}],
            "preferences":{"x":["a"],"y":["a"]},"priorities":{"a":[["x","y"]]}}"#,
    )
    .unwrap();
    let out = Command::new(bin).arg("solve").arg(&short).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("total capacity 1"), "{err}");

    let out = Command::new(bin)
        .args([
            "solve",
            "--tie-break",
            "order=i,j,i',j',k,l",
            "--support-bound",
            "2",
            "--out",
        ])
        .arg(dir.path().join("l.json"))
        .arg(&inst)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
