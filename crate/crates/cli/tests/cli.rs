use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const COMMANDS: &[&str] = &[
    "validate",
    "fraction",
    "hierarchy",
    "classify",
    "acyclic",
    "kernels",
    "holonomy",
    "curvature",
    "bundle",
    "report",
];

fn ctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxbundle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn builtin_names() -> Vec<String> {
    let o = ctx(&["builtin", "--json"]);
    assert_eq!(code(&o), 0);
    serde_json::from_value(json(&o)).unwrap()
}

#[test]
fn hardy_fraction_json() {
    let o = ctx(&["fraction", "--builtin", "hardy", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["ncf"], "7/9");
    assert_eq!(v["cf"], "2/9");
    assert_eq!(v["certified"], true);
}

#[test]
fn bell_holonomy_json() {
    let o = ctx(&["holonomy", "--builtin", "bell", "--base", "a", "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["classification"], "CyclicOfOrder(2)");
}

#[test]
fn filled_triangle_is_acyclic() {
    let o = ctx(&["acyclic", "--builtin", "filled_triangle"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("acyclic"));
    let o = ctx(&["acyclic", "--builtin", "tetrahedron"]);
    assert_eq!(stdout(&o).lines().next(), Some("cyclic"));
}

#[test]
fn every_builtin_validates_and_every_command_terminates() {
    for name in builtin_names() {
        for cmd in COMMANDS {
            let o = ctx(&[cmd, "--builtin", &name]);
            let c = code(&o);
            // Graphs have no 2-faces to take curvature on.
            let expected = if *cmd == "curvature" && !["tetrahedron", "barycentric_triangle", "ghz_octahedron", "svetlichny_box", "filled_triangle"].contains(&name.as_str()) {
                3
            } else {
                0
            };
            assert_eq!(c, expected, "{cmd} --builtin {name}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
}

#[test]
fn json_output_is_byte_stable() {
    for args in [
        ["report", "--builtin", "hardy", "--json"],
        ["kernels", "--builtin", "bell", "--json"],
        ["curvature", "--builtin", "tetrahedron", "--json"],
    ] {
        assert_eq!(ctx(&args).stdout, ctx(&args).stdout, "{args:?}");
    }
}

#[test]
fn builtin_documents_round_trip_through_files() {
    for name in builtin_names() {
        let doc = stdout(&ctx(&["builtin", &name]));
        let f = temp_file(&doc);
        let path = f.path().to_str().unwrap();
        let from_file = ctx(&["report", "--model", path, "--json"]);
        let from_builtin = ctx(&["report", "--builtin", &name, "--json"]);
        assert_eq!(code(&from_file), 0, "{name}");
        assert_eq!(from_file.stdout, from_builtin.stdout, "{name}");
    }
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&ctx(&["fraction"])), 1);
    assert_eq!(code(&ctx(&["nonsense"])), 1);
    assert_eq!(code(&ctx(&["fraction", "--builtin", "nope"])), 1);
    assert_eq!(code(&ctx(&["builtin", "nope"])), 1);
    assert_eq!(code(&ctx(&["holonomy", "--builtin", "bell", "--base", "z"])), 1);
    assert_eq!(code(&ctx(&["holonomy", "--builtin", "bell", "--tol", "-1"])), 1);
    let o = ctx(&["builtin", "nope"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hardy"));
    assert_eq!(code(&ctx(&["--help"])), 0);
}

#[test]
fn parse_errors_exit_2() {
    let f = temp_file("{ not json");
    let o = ctx(&["validate", "--model", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    let bad = r#"{"name": "x", "vertices": ["a", "b"], "contexts": [["a", "b"]],
                  "distributions": {"a,b": {"0,0": "1/2", "1,1": "5/8"}}}"#;
    let f = temp_file(bad);
    let o = ctx(&["validate", "--model", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("9/8"));

    assert_eq!(code(&ctx(&["validate", "--model", "/definitely/not/here.json"])), 2);
}

const DISTURBED: &str = r#"{
    "name": "disturbed",
    "vertices": ["a", "b", "c"],
    "contexts": [["a", "b"], ["b", "c"]],
    "distributions": {
        "a,b": {"0,0": "1/4", "1,1": "3/4"},
        "b,c": {"0,0": "3/4", "1,1": "1/4"}
    }
}"#;

#[test]
fn disturbing_models_are_inapplicable_for_fractions() {
    let f = temp_file(DISTURBED);
    let path = f.path().to_str().unwrap();
    assert_eq!(code(&ctx(&["validate", "--model", path])), 0);
    assert_eq!(code(&ctx(&["fraction", "--model", path])), 3);
    assert_eq!(code(&ctx(&["hierarchy", "--model", path])), 3);
    assert_eq!(code(&ctx(&["classify", "--model", path])), 3);
    let o = ctx(&["report", "--model", path, "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["disturbance"]["nondisturbing"], false);
}

#[test]
fn transitions_file_is_used() {
    let m = temp_file(DISTURBED);
    let t = temp_file(r#"{"transitions": [{"vertex": "b", "incoming": "a,b", "outgoing": "b,c", "matrix": [["0", "1"], ["1", "0"]]}]}"#);
    let bad = temp_file(r#"{"transitions": [{"vertex": "b", "incoming": "a,b", "outgoing": "b,c", "matrix": [["1", "0"], ["0", "1"]]}]}"#);
    let mp = m.path().to_str().unwrap();
    let o = ctx(&["holonomy", "--model", mp, "--base", "a", "--transitions", t.path().to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["classification"], "Trivial");
    let o = ctx(&["holonomy", "--model", mp, "--transitions", bad.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn skeleton_and_hierarchy() {
    let o = ctx(&["fraction", "--builtin", "tetrahedron", "--skeleton", "1", "--json"]);
    assert_eq!(json(&o)["cf"], "0");
    let o = ctx(&["hierarchy", "--builtin", "ghz_octahedron", "--json"]);
    let v = json(&o);
    assert_eq!(v["levels"][0]["cf"], "0");
    assert_eq!(v["levels"][1]["cf"], "1");
    assert_eq!(v["monotone_nondecreasing"], true);
    assert_eq!(code(&ctx(&["fraction", "--builtin", "bell", "--skeleton", "2"])), 3);
}

#[test]
fn classify_and_kernels_text() {
    assert_eq!(stdout(&ctx(&["classify", "--builtin", "pr_box"])).trim(), "Strong");
    let k = stdout(&ctx(&["kernels", "--builtin", "hardy"]));
    assert!(k.contains("K[b <- a]\n  [1/4, 1]\n  [3/4, 0]"), "{k}");
}

#[test]
fn bundle_dot() {
    let o = ctx(&["bundle", "--dot", "--builtin", "trivial"]);
    assert_eq!(code(&o), 0);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph \"trivial\""));
    assert_eq!(dot.matches("->").count(), 10);
}
