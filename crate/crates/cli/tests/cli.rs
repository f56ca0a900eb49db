use std::path::PathBuf;
use std::process::Command;

use catlift::report::exit_code_of_json;
use serde_json::Value;

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
        .display()
        .to_string()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut argv = vec!["catlift".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = catlift::run_with(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut args = args.to_vec();
    args.push("--json");
    let r = run(&args);
    let v: Value = serde_json::from_str(&r.out).unwrap_or_else(|e| panic!("{e}: {}{}", r.out, r.err));
    (r.code, v)
}

/// Fixture paths vary by checkout; blank them before comparing.
fn golden(name: &str, mut report: Value) {
    if let Some(d) = report.get_mut("details").and_then(Value::as_object_mut) {
        d.remove("output");
    }
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let actual = serde_json::to_string_pretty(&report).unwrap() + "\n";
    if std::env::var_os("CATLIFT_BLESS").is_some() {
        std::fs::write(&path, &actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "golden file {name} differs");
}

#[test]
fn query_path_finds_the_channel_owned_by_alicee() {
    let r = run(&[
        "query-path",
        "--csv",
        &fixture("fig2a"),
        "--path",
        "Moderator.FollowerID;Follower.OwnChannel",
        "--where",
        "ModName=alicee",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out, "M1 -> C4\n");
}

#[test]
fn query_path_by_element_and_whole_table() {
    let kp = fixture("knows_person.cat");
    let r = run(&["query-path", &kp, "--instance", "people", "--path", "k.personID2", "--element", "(v1, v2)"]);
    assert_eq!((r.code, r.out.as_str()), (0, "(v1,v2) -> v2\n"));
    let r = run(&["query-path", &kp, "--instance", "social", "--path", "id(1)"]);
    assert_eq!(r.out, "v1 -> v1\nv2 -> v2\nv3 -> v3\n");
    let r = run(&["query-path", &kp, "--instance", "social", "--path", "s;t"]);
    assert_eq!(r.code, 3);
    assert!(r.err.contains("cannot compose") || r.err.contains("invalid path"), "{}", r.err);
}

#[test]
fn classify_marks_exactly_the_two_crossing_functors_full() {
    let (code, v) = run_json(&["classify", &fixture("knows_person.cat"), "--source", "kp", "--target", "graph"]);
    assert_eq!(code, 0);
    let functors = v["details"]["functors"].as_array().unwrap();
    assert_eq!(functors.len(), 6);
    let full: Vec<(String, String)> = functors
        .iter()
        .filter(|f| f["full"] == true)
        .map(|f| {
            let a = &f["arrows"];
            (a["k.personID1"].as_str().unwrap().into(), a["k.personID2"].as_str().unwrap().into())
        })
        .collect();
    assert_eq!(full, [("s".into(), "t".into()), ("t".into(), "s".into())]);
    golden("classify_knows_person.json", v);
}

#[test]
fn classify_through_csv_and_edge_list_agrees_with_the_workspace_file() {
    let r = run(&[
        "classify",
        "--csv",
        &format!("kp={}", fixture("knows_person")),
        "--edgelist",
        &format!("g={}", fixture("social.tsv")),
        "--source",
        "kp",
        "--target",
        "g",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.ends_with("6 functors kp -> g, 2 full\n"), "{}", r.out);
}

#[test]
fn kan_lift_with_tiny_eta_cap_is_inconclusive() {
    let (code, v) = run_json(&["check-kan-lift", &fixture("knows_person.cat"), "--eta-cap", "1"]);
    assert_eq!(code, 2);
    assert_eq!(v["verdict"], "inconclusive");
    assert_eq!(v["capsInForce"]["etaCap"], 1);
    golden("kan_lift_eta_cap_1.json", v);
}

#[test]
fn kan_lift_on_the_table_to_graph_transformation_fails_at_the_swap() {
    let (code, v) = run_json(&["check-kan-lift", &fixture("knows_person.cat")]);
    assert_eq!(code, 1);
    let w = &v["witnesses"][0];
    assert_eq!(w["kind"], "noFactorization");
    assert_eq!(w["functor"]["arrows"]["k.personID1"], "t");
    golden("kan_lift_default.json", v);
}

#[test]
fn check_transform_accepts_the_fixture_and_rejects_a_collapse() {
    let kp = fixture("knows_person.cat");
    let (code, v) = run_json(&["check-transform", &kp]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("valid")));

    let dir = tempfile::tempdir().unwrap();
    let extra = dir.path().join("collapse.cat");
    std::fs::write(
        &extra,
        "transform flat {\n  functor collapse\n  source people\n  target social\n}\n",
    )
    .unwrap();
    let (code, v) = run_json(&["check-transform", &kp, extra.to_str().unwrap(), "--transform", "flat"]);
    assert_eq!(code, 1);
    let kinds: Vec<&str> = v["witnesses"].as_array().unwrap().iter().map(|w| w["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["notFull", "componentTyping"]);
    assert_eq!(v["witnesses"][0]["morphism"], "id(0)");
}

#[test]
fn validate_instance_reports_the_broken_equation_element() {
    let (code, v) = run_json(&["validate-instance", &fixture("broken_equation.cat")]);
    assert_eq!(code, 1);
    let w = &v["witnesses"][0];
    assert_eq!(w["kind"], "equationBroken");
    assert_eq!(w["element"], "M2");
    assert_eq!((w["lhsValue"].as_str(), w["rhsValue"].as_str()), (Some("C2"), Some("C3")));
}

#[test]
fn referential_integrity_failure_is_invalid_with_the_row() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["manifest.txt", "person.csv"] {
        std::fs::copy(fixture(&format!("knows_person/{f}")), dir.path().join(f)).unwrap();
    }
    std::fs::write(dir.path().join("knows.csv"), "personID1,personID2,since\nv1,v9,2020\n").unwrap();
    let r = run(&["validate-instance", "--csv", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("k.personID2 -> p.personID"), "{}", r.out);
    assert!(r.out.contains("v9"), "{}", r.out);
}

#[test]
fn migrate_delta_writes_a_loadable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pulled.cat");
    let kp = fixture("knows_person.cat");
    let r = run(&["migrate-delta", &kp, "--functor", "crossing", "--instance", "social", "--name", "pulled", "--output", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);
    let r = run(&["query-path", &kp, out.to_str().unwrap(), "--instance", "pulled", "--path", "k.personID1"]);
    assert_eq!(r.out, "e1 -> v1\ne2 -> v2\n");
}

#[test]
fn schema_errors_are_invalid_for_validate_and_errors_elsewhere() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cat");
    std::fs::write(&bad, "schema s {\n  object a\n  object b\n  arrow f : a -> b\n  arrow g : b -> a\n  equation f = g\n}\n").unwrap();
    let r = run(&["validate-schema", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("bad.cat:6:12: equation `f = g` relates paths with different endpoints"), "{}", r.out);
    let r = run(&["check-transform", bad.to_str().unwrap()]);
    assert_eq!(r.code, 3);

    std::fs::write(&bad, "schema s { object a object }\n").unwrap();
    let r = run(&["validate-schema", bad.to_str().unwrap()]);
    assert_eq!(r.code, 3);
    assert!(r.err.contains("1:28: syntax error"), "{}", r.err);
}

#[test]
fn usage_errors_exit_3_and_help_exits_0() {
    assert_eq!(run(&["no-such-command"]).code, 3);
    assert_eq!(run(&["classify", "--source", "a"]).code, 3);
    assert_eq!(run(&["--eta-cap", "x", "check-kan-lift"]).code, 3);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.out.contains("check-kan-lift"));
    let r = run(&["check-transform", &fixture("knows_person.cat"), "--transform", "nope"]);
    assert_eq!(r.code, 3);
    assert!(r.err.contains("no transform named `nope`"));
}

#[test]
fn exit_code_is_determined_by_the_report() {
    let kp = fixture("knows_person.cat");
    let cases: Vec<Vec<&str>> = vec![
        vec!["validate-schema", &kp],
        vec!["validate-instance", &kp],
        vec!["classify", &kp, "--source", "kp", "--target", "graph"],
        vec!["enumerate-functors", &kp, "--source", "graph", "--target", "kp"],
        vec!["check-transform", &kp],
        vec!["check-kan-lift", &kp],
        vec!["check-kan-lift", &kp, "--eta-cap", "1"],
        vec!["enumerate-functors", &kp, "--source", "kp", "--target", "graph", "--functor-cap", "2"],
        vec!["check-transform", &kp, "--transform", "missing"],
    ];
    let mut seen = std::collections::BTreeSet::new();
    for args in cases {
        let (code, v) = run_json(&args);
        for key in ["command", "verdict", "witnesses", "capsInForce", "details"] {
            assert!(v.get(key).is_some(), "{args:?} lacks {key}");
        }
        assert_eq!(Some(code), exit_code_of_json(&v), "{args:?}");
        seen.insert(code);
    }
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), [0, 1, 2, 3]);
}

#[test]
fn ingest_prints_a_workspace_that_loads_back() {
    let r = run(&["ingest", "--csv", &fixture("fig2a")]);
    assert_eq!(r.code, 0, "{}", r.err);
    let mut ws = catlift::Workspace::new(Default::default());
    ws.load_str(&r.out).unwrap();
    let inst = &ws.instances["fig2a"].instance;
    assert!(inst.validate().is_valid());
    assert_eq!(inst.carriers().iter().map(|c| c.len()).sum::<usize>(), 14);
}

#[test]
fn binary_reads_the_hom_cap_from_the_environment_and_the_flag_wins() {
    let bin = env!("CARGO_BIN_EXE_catlift");
    let kp = fixture("knows_person.cat");
    let cap = |extra: &[&str]| {
        let out = Command::new(bin)
            .args(["validate-schema", &kp, "--json"])
            .args(extra)
            .env("CATLIFT_HOM_CAP", "7")
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v["capsInForce"]["homCap"].as_u64().unwrap()
    };
    assert_eq!(cap(&[]), 7);
    assert_eq!(cap(&["--hom-cap", "9"]), 9);
}
