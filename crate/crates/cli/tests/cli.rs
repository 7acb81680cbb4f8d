use std::path::PathBuf;
use std::process::Command;

use netagg_cli::{parse_str, run, ParseError, SystemDescription, EXIT_INVALID, EXIT_OK, EXIT_USAGE, EXIT_WARNING};
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_str().unwrap().to_owned()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("netagg").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn evaluate_nam_on_production_example() {
    let (code, out, _) = cli(&["evaluate", "--input", &fixture("weak_element.json"), "--method", "nam"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("system [nam] value=20.4082 "), "{out}");
}

#[test]
fn evaluate_without_method_compares_all() {
    let (code, out, _) = cli(&["evaluate", "--input", &fixture("weak_element.json")]);
    assert_eq!(code, EXIT_OK);
    let row = out.lines().nth(1).unwrap();
    for cell in ["10.0000", "70.0000", "20.4082", "0.857143", "0.510000"] {
        assert!(row.contains(cell), "{row}");
    }
}

#[test]
fn evaluate_hybrid_on_grouped_fixture() {
    let (code, out, _) = cli(&["evaluate", "--input", &fixture("two_groups.json"), "--method", "hybrid"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("system [hybrid] value=83.3333 "), "{out}");
}

#[test]
fn single_leaf_is_echoed() {
    let (code, out, _) = cli(&["evaluate", "--input", &fixture("single_leaf.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "pump [leaf] value=42.5000\n");
}

#[test]
fn evaluate_json_report_is_structured() {
    let (code, out, _) = cli(&["evaluate", "--input", &fixture("plant.json"), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["id"], "plant");
    assert_eq!(v["method"], "wem-then");
    assert_eq!(v["weakest_ids"], serde_json::json!(["valve"]));
    assert_eq!(v["children"].as_array().unwrap().len(), 2);
    assert!(v["critical_wem"].as_f64().unwrap() < v["value"].as_f64().unwrap());
}

#[test]
fn evaluate_csv_lists_every_node() {
    let (code, out, _) = cli(&["evaluate", "--input", &fixture("plant.json"), "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 1 + 9);
    assert!(out.contains("\nvalve,2,leaf,20.000000,0.000000,valve\n"));
}

#[test]
fn nam_with_non_uniform_priorities_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("weighted.json");
    std::fs::write(
        &path,
        r#"{"scale": {"min": 0, "max": 100},
            "elements": [{"id": "a", "evaluation": 10, "priority": 2}, {"id": "b", "evaluation": 90, "priority": 1}]}"#,
    )
    .unwrap();
    let (code, _, err) = cli(&["evaluate", "--input", path.to_str().unwrap(), "--method", "nam"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("non-uniform"), "{err}");
}

#[test]
fn wem_then_defaults_to_top_priority_group() {
    let (code, out, _) =
        cli(&["evaluate", "--input", &fixture("two_groups.json"), "--method", "wem-then", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["critical_wem"], 100.0);

    let (code, out, _) = cli(&[
        "evaluate",
        "--input",
        &fixture("weak_element.json"),
        "--method",
        "wem-then",
        "--critical",
        "s1,s2",
        "--then",
        "nam",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("system [wem-then] value=20.4082 adequacy=0.510000 critical_wem=10.0000"), "{out}");

    let (code, _, _) = cli(&["evaluate", "--input", &fixture("weak_element.json"), "--method", "wem-then"]);
    assert_eq!(code, EXIT_INVALID);
    let (code, _, _) = cli(&["evaluate", "--input", &fixture("weak_element.json"), "--critical", "s1"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn compare_exit_codes_follow_warnings() {
    let (code, out, _) = cli(&["compare", "--input", &fixture("weak_element.json")]);
    assert_eq!(code, EXIT_WARNING);
    assert!(out.contains("hidden weak element"), "{out}");
    assert!(out.contains("weakest: s1"), "{out}");
    assert_eq!(cli(&["compare", "--input", &fixture("weak_element.json"), "--threshold", "0.9"]).0, EXIT_OK);
    assert_eq!(cli(&["compare", "--input", &fixture("all_equal.json")]).0, EXIT_OK);
    assert_eq!(cli(&["compare", "--input", &fixture("weak_element.json"), "--threshold", "1.5"]).0, EXIT_USAGE);
}

#[test]
fn compare_lists_group_rows() {
    let (code, out, _) = cli(&["compare", "--input", &fixture("two_groups.json"), "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "node,kind,wem,wlam,nam,hybrid,sigma_12,sigma_13,weakest,warnings");
    assert!(lines[1].starts_with("system,subsystem,50.000000,87.500000,,83.333333,"), "{}", lines[1]);
    assert!(lines[2].starts_with("system:g1,group,100.000000,"));
    assert!(lines[3].starts_with("system:g2,group,50.000000,"));
}

#[test]
fn sweep_writes_csv_to_stdout_or_file() {
    let (code, out, _) = cli(&[
        "sweep",
        "--input",
        &fixture("one_varying.json"),
        "--vary",
        "s1",
        "--from",
        "0",
        "--to",
        "100",
        "--steps",
        "11",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().nth(2), Some("10,10.000000,70.000000,20.408163"));
    assert!(!out.contains('\r'));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two_groups.csv");
    let (code, out, _) = cli(&[
        "sweep",
        "--input",
        &fixture("two_groups.json"),
        "--vary",
        "s1",
        "--from",
        "0",
        "--to",
        "100",
        "--steps",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!((code, out.as_str()), (EXIT_OK, ""));
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "varied,wem,wlam,nam,hybrid\n0,0.000000,62.500000,,16.666667\n50,50.000000,75.000000,,64.666667\n100,50.000000,87.500000,,83.333333\n"
    );
}

#[test]
fn sweep_argument_errors() {
    let input = fixture("one_varying.json");
    let base = ["sweep", "--input", input.as_str(), "--from", "0", "--to", "100"];
    let with = |extra: &[&'static str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        cli(&args).0
    };
    assert_eq!(with(&["--vary", "s1", "--steps", "1"]), EXIT_USAGE);
    assert_eq!(with(&["--vary", "nope", "--steps", "5"]), EXIT_INVALID);
    let (code, _, err) =
        cli(&["sweep", "--input", &input, "--vary", "s1", "--from", "-5", "--to", "100", "--steps", "5"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("outside scale"), "{err}");
}

#[test]
fn priorities_on_path_graph() {
    let (code, out, _) =
        cli(&["priorities", "--input", &fixture("path_graph.json"), "--strategy", "betweenness", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["entries"][0]["id"], "b");
    assert_eq!(v["entries"][0]["priority"], 1.0);
    assert_eq!(v["entries"][0]["score"], 1.0);

    let (_, out, _) =
        cli(&["priorities", "--input", &fixture("path_graph.json"), "--strategy", "flow", "--group-tolerance", "0.2"]);
    // b carries both flows, a carries both, c only the larger one
    assert!(out.contains("\ngroups:\ng1  1.00000  a,b\ng2  0.666667  c\n"), "{out}");
}

#[test]
fn degree_ties_break_by_flow_volume() {
    let (code, out, _) =
        cli(&["priorities", "--input", &fixture("degree_tie.json"), "--strategy", "degree", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let order: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(order, ["c", "d", "a", "b"]);
}

#[test]
fn priorities_need_a_network() {
    let (code, _, err) = cli(&["priorities", "--input", &fixture("weak_element.json"), "--strategy", "degree"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("no network"));
}

#[test]
fn validation_errors_point_into_the_document() {
    let (code, _, err) = cli(&["evaluate", "--input", &fixture("invalid_range.json")]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("/elements/1/evaluation"), "{err}");
}

#[test]
fn usage_and_io_errors_exit_one() {
    assert_eq!(cli(&["evaluate", "--input", "/nonexistent/x.json"]).0, EXIT_USAGE);
    assert_eq!(cli(&["evaluate"]).0, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(cli(&["evaluate", "--input", &fixture("weak_element.json"), "--method", "median"]).0, EXIT_USAGE);
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("sweep"));
}

#[test]
fn binary_matches_library_and_is_deterministic() {
    let run_bin = || {
        Command::new(env!("CARGO_BIN_EXE_netagg"))
            .args(["compare", "--input", &fixture("plant.json"), "--format", "csv"])
            .output()
            .unwrap()
    };
    let (a, b) = (run_bin(), run_bin());
    assert_eq!(a.status.code(), Some(EXIT_WARNING));
    assert_eq!(a.stdout, b.stdout);
    let (_, out, _) = cli(&["compare", "--input", &fixture("plant.json"), "--format", "csv"]);
    assert_eq!(String::from_utf8(a.stdout).unwrap(), out);
}

#[test]
fn fixtures_round_trip() {
    for name in [
        "weak_element.json",
        "one_varying.json",
        "two_groups.json",
        "single_leaf.json",
        "all_equal.json",
        "path_graph.json",
        "degree_tie.json",
        "plant.json",
    ] {
        let desc = netagg_cli::parse_file(std::path::Path::new(&fixture(name))).unwrap();
        assert_eq!(parse_str(&desc.to_json()).unwrap(), desc, "{name}");
    }
}

fn description() -> impl Strategy<Value = SystemDescription> {
    (1usize..8, any::<bool>(), any::<bool>()).prop_flat_map(|(n, grouped, networked)| {
        (
            prop::collection::vec(0.0..=100.0f64, n),
            prop::collection::vec(prop::option::of(0.1..10.0f64), n),
            1usize..=n,
            prop::collection::vec((0usize..n, 0usize..n), 0..10),
        )
            .prop_map(move |(values, priorities, split, edges)| {
                let ids: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
                let mut text = format!(
                    r#"{{"scale": {{"min": 0, "max": 100}}, "elements": [{}]"#,
                    ids.iter()
                        .zip(&values)
                        .zip(&priorities)
                        .map(|((id, v), p)| match p {
                            Some(p) => format!(r#"{{"id": "{id}", "evaluation": {v}, "priority": {p}}}"#),
                            None => format!(r#"{{"id": "{id}", "evaluation": {v}}}"#),
                        })
                        .collect::<Vec<_>>()
                        .join(",")
                );
                if grouped {
                    let quote = |xs: &[String]| xs.iter().map(|x| format!("\"{x}\"")).collect::<Vec<_>>().join(",");
                    let mut groups =
                        vec![format!(r#"{{"id": "a", "members": [{}], "priority": 2}}"#, quote(&ids[..split]))];
                    if split < n {
                        groups.push(format!(r#"{{"id": "b", "members": [{}], "priority": 1}}"#, quote(&ids[split..])));
                    }
                    text.push_str(&format!(r#", "groups": [{}]"#, groups.join(",")));
                }
                if networked {
                    let mut seen = std::collections::BTreeSet::new();
                    let edges: Vec<String> = edges
                        .into_iter()
                        .filter(|&(a, b)| a != b && seen.insert((a, b)))
                        .map(|(a, b)| format!(r#"["e{a}", "e{b}"]"#))
                        .collect();
                    text.push_str(&format!(
                        r#", "network": {{"nodes": [{}], "edges": [{}]}}"#,
                        ids.iter().map(|x| format!("\"{x}\"")).collect::<Vec<_>>().join(","),
                        edges.join(",")
                    ));
                }
                text.push('}');
                parse_str(&text).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn parse_serialize_round_trip(desc in description()) {
        let text = desc.to_json();
        prop_assert_eq!(parse_str(&text).unwrap(), desc.clone());
        prop_assert_eq!(parse_str(&text).unwrap().to_json(), text);
    }

    #[test]
    fn out_of_scale_values_are_rejected_not_clamped(v in 100.000001..1e6f64) {
        let text = format!(r#"{{"scale": {{"min": 0, "max": 100}}, "elements": [{{"id": "a", "evaluation": {v}}}]}}"#);
        match parse_str(&text) {
            Err(ParseError::Invalid(d)) => prop_assert_eq!(&d[0].location, "/elements/0/evaluation"),
            other => prop_assert!(false, "{:?}", other),
        }
    }
}
