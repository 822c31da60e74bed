//! End-to-end tests of the `bratteli` binary: exit codes, error names, DOT
//! output, file round trips and the char-eval golden snapshot.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bratteli::character::Alpha;
use bratteli::files::{read_json, CharacterFile, DiagramFile, ElementFile};
use bratteli::rperm::to_rperm;
use bratteli::value::{format_rational, parse_rational};
use serde_json::{json, Value as Json};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bratteli"))
        .args(args)
        .current_dir(fixture(""))
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Json {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn validate_reports_levels() {
    let out = run(&["diagram", "validate", "odometer2.json", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["vertex_counts"], json!([1, 1, 1, 1]));
    assert_eq!(v["path_counts"], json!([[1], [2], [4], [8]]));
}

#[test]
fn psd_failure_has_witness_and_exit_one() {
    let out = run(&["char", "psd", "gram.json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "NotPSD");
    assert_eq!(v["witness"], "(1,-1)");
    // x = (1,-1) on [[1,2],[2,1]]: 1 - 2 - 2 + 1
    assert_eq!(v["quadratic_form"], "-2");
}

#[test]
fn psd_success_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"[["2", "-1"], ["-1", "1/2"]]"#).unwrap();
    for float in [false, true] {
        let mut args = vec!["char", "psd", path.to_str().unwrap()];
        if float {
            args.push("--float");
        }
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert_eq!(stdout_json(&out)["verdict"], "PSD");
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["diagram", "frobnicate"],
        vec!["diagram", "paths", "odometer2.json"],
        vec!["rperm", "char", "--perm", "1,0", "--k", "many"],
        vec!["group", "si-family", "--diagram", "odometer2.json", "odo_t.json", "--r", "1", "--eps", "half"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn domain_errors_exit_one_with_name() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"level": 1, "perms": {"0": [0, 0]}}"#).unwrap();
    let zero = dir.path().join("zero.json");
    std::fs::write(&zero, r#"{"levels": [1, 2], "incidence": [[[1], [0]]]}"#).unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["group", "fix", "--diagram", "odometer2.json", bad.to_str().unwrap()], "NotAPermutation"),
        (vec!["diagram", "validate", zero.to_str().unwrap()], "ZeroRowOrColumn"),
        (vec!["diagram", "validate", "no-such-file.json"], "Parse"),
        (vec!["diagram", "paths", "odometer2.json", "--level", "2", "--vertex", "0", "--index", "4"], "IndexOutOfRange"),
        (vec!["rperm", "from-br", "--diagram", "odometer2.json", "--element", "odo_t.json"], "WrongDiagram"),
    ];
    for (args, name) in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = stderr(&out);
        assert!(err.starts_with(&format!("error[{name}]")), "{args:?}: {err}");
    }
}

/// Nodes `v{n}_{k}` and the multiplicity of each `(source, target)` pair.
fn parse_dot(text: &str) -> (Vec<String>, BTreeMap<(String, String), Vec<String>>) {
    let ast = dot_parser::ast::Graph::try_from(text).unwrap_or_else(|e| panic!("invalid DOT: {e}\n{text}"));
    let graph = dot_parser::canonical::Graph::from(ast);
    assert!(graph.is_digraph);
    let mut nodes: Vec<String> = graph.nodes.set.keys().cloned().collect();
    nodes.sort();
    let mut edges: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for e in graph.edges.set {
        let label = e
            .attr
            .elems
            .iter()
            .find(|(k, _)| Into::<String>::into(k.clone()) == "label")
            .map(|(_, v)| Into::<String>::into(v.clone()))
            .expect("every edge is labelled");
        edges.entry((e.from, e.to)).or_default().push(label);
    }
    (nodes, edges)
}

#[test]
fn dot_output_parses_and_reproduces_path_counts() {
    let depth = 3;
    for file in ["odometer2.json", "br.json"] {
        let counts = stdout_json(&run(&["diagram", "validate", file, "--depth", "3"]))["path_counts"].clone();
        let counts: Vec<Vec<u64>> = serde_json::from_value(counts).unwrap();
        for collapse in [false, true] {
            let mut args = vec!["diagram", "dot", file, "--depth", "3"];
            if collapse {
                args.push("--collapse-multiedges");
            }
            let out = run(&args);
            assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
            let (nodes, edges) = parse_dot(std::str::from_utf8(&out.stdout).unwrap());
            let expected_nodes: usize = counts.iter().map(Vec::len).sum();
            assert_eq!(nodes.len(), expected_nodes);
            let mult = |labels: &Vec<String>| -> u64 {
                if collapse {
                    assert_eq!(labels.len(), 1);
                    labels[0].parse().unwrap()
                } else {
                    // expanded edges carry labels 0..m-1
                    let mut l: Vec<u64> = labels.iter().map(|s| s.parse().unwrap()).collect();
                    l.sort();
                    assert_eq!(l, (0..l.len() as u64).collect::<Vec<_>>());
                    l.len() as u64
                }
            };
            // h_w(n+1) = sum over incoming bundles of multiplicity * h_v(n)
            for n in 0..depth {
                for (w, &hw) in counts[n + 1].iter().enumerate() {
                    let total: u64 = counts[n]
                        .iter()
                        .enumerate()
                        .filter_map(|(v, &hv)| {
                            edges.get(&(format!("v{n}_{v}"), format!("v{}_{w}", n + 1))).map(|l| mult(l) * hv)
                        })
                        .sum();
                    assert_eq!(total, hw, "{file} level {n} -> {}", n + 1);
                }
            }
        }
    }
}

#[test]
fn telescope_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["diagram", "telescope", "br.json", "--cuts", "0,2,3", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let path = dir.path().join("t.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let file: DiagramFile = read_json(&path).unwrap();
    let d = file.to_diagram().unwrap();
    assert_eq!(DiagramFile::from_diagram(&d, 2).unwrap(), file);
    let v = stdout_json(&run(&["diagram", "validate", path.to_str().unwrap()]));
    // levels 0, 2 and 3 of B_R have 1, 2·3 and 6·4 paths
    assert_eq!(v["path_counts"], json!([[1], [2, 2, 2], [6, 6, 6, 6]]));
}

#[test]
fn element_output_round_trips_through_compose() {
    let out = run(&["group", "compose", "--diagram", "odometer2.json", "odo_t.json", "odo_u.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let gh: ElementFile = serde_json::from_slice(&out.stdout).unwrap();
    // (0 1) and (2 3) commute; their product is the double transposition
    assert_eq!(gh.level, 2);
    assert_eq!(gh.perms["0"], vec![1, 0, 3, 2]);
}

const GOLDEN: &str = "tests/golden/char_eval_br_level2.txt";

fn golden_body(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

/// Set `BRATTELI_UPDATE_GOLDEN=1` to rewrite the snapshot from the library.
#[test]
fn char_eval_golden_matches_library_and_rperm() {
    let d = read_json::<DiagramFile>(&fixture("br.json")).unwrap().to_diagram().unwrap();
    let g = read_json::<ElementFile>(&fixture("g.json")).unwrap().to_element(&d).unwrap();
    let spec = read_json::<CharacterFile>(&fixture("chi1.json"))
        .unwrap()
        .to_spec(&d, &fixture(""))
        .unwrap();
    let library = spec.eval(&g).unwrap();
    let library = format_rational(library.as_exact().expect("B_R values are exact"));

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN);
    if std::env::var_os("BRATTELI_UPDATE_GOLDEN").is_some() {
        let body = serde_json::to_string_pretty(&json!({"value": library})).unwrap();
        let text = format!(
            "# generated by CharacterSpec::eval (crates/cli/tests/cli.rs, BRATTELI_UPDATE_GOLDEN=1)\n\
             # diagram tests/fixtures/br.json, character tests/fixtures/chi1.json (builtin measure, alpha 1)\n\
             # element tests/fixtures/g.json: the transposition of the two paths into vertex 0 at level 2\n\
             {body}\n"
        );
        std::fs::write(&path, text).unwrap();
    }
    let golden: Json = serde_json::from_str(&golden_body(&std::fs::read_to_string(&path).unwrap())).unwrap();
    assert_eq!(golden["value"], library.as_str(), "snapshot is stale");

    let out = run(&["char", "eval", "--diagram", "br.json", "--character", "chi1.json", "--element", "g.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout_json(&out), golden);

    // the same number through the rational-permutation model
    let r = to_rperm(&d, &g).unwrap();
    assert_eq!(format_rational(&r.char_r(Alpha::Finite(1))), library);
    let from_br = stdout_json(&run(&["rperm", "from-br", "--diagram", "br.json", "--element", "g.json"]));
    let perm: Vec<usize> = serde_json::from_value(from_br["perm"].clone()).unwrap();
    let perm = perm.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let via_cli = stdout_json(&run(&["rperm", "char", "--perm", &perm, "--k", "1"]));
    assert_eq!(via_cli, golden);
    // 2 of the 6 level-2 paths move: 1 - 2/6
    assert_eq!(parse_rational(golden["value"].as_str().unwrap()).unwrap(), parse_rational("2/3").unwrap());
}

#[test]
fn float_output_carries_error_bounds() {
    let out = run(&["measure", "of", "--diagram", "br.json", "--set", "cylinder.json", "--float"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out)["measure"].clone();
    assert_eq!(v["exact"], "1/2");
    let x = v["float"].as_f64().unwrap();
    assert!((x - 0.5).abs() <= v["error_bound"].as_f64().unwrap());
}

#[test]
fn multiplicativity_on_the_odometer() {
    let out = run(&[
        "char", "mult", "--diagram", "odometer2.json", "--character", "chi1.json", "--element", "odo_t.json",
        "--targets", "1/2", "--from", "2", "--to", "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let steps = stdout_json(&out)["steps"].as_array().unwrap().clone();
    assert_eq!(steps.len(), 4);
    for s in steps {
        // χ(g) = μ(Fix g) = 1/2 and the target fraction is 1/2
        assert_eq!(s["chi_g_hn"], "1/4");
        assert_eq!(s["chi_g_hn"], s["predicted"]);
        assert_eq!(s["defect"], "0");
    }
}
