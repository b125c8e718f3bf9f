use std::path::PathBuf;
use std::process::{Command, Output};

use equipoincare::format::{GraphDocument, SeriesDocument};
use equipoincare::{FiltrationSpec, Mode, PoincareEngine};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equipoincare"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

#[test]
fn validate_reports_rationality_and_det() {
    let o = run(&["validate", &path("a1.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "valid, rational (p_a = 0), d = 2\n");

    let o = run(&["validate", &path("d4.json")]);
    assert_eq!(stdout(&o), "valid, rational (p_a = 0), d = 4\n");
}

#[test]
fn validate_rejects_bad_graphs_with_exit_1() {
    let o = run(&["validate", &path("semidefinite.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not negative definite"));

    let o = run(&["validate", &path("not_rational.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("arithmetic genus of the fundamental cycle is 1"));

    let o = run(&["validate", &path("not_rational.json"), "--skip-rationality"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("valid (rationality not checked)"));
}

#[test]
fn malformed_documents_exit_2() {
    let o = run(&["validate", &path("bad_syntax.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4, column 3"));

    let o = run(&["validate", &path("unknown_id.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("\"E9\""));

    let o = run(&["validate", &path("missing.json")]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["series", &path("a1.json"), "--kind", "xyz", "--degree", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invariants_of_a2() {
    let o = run(&["invariants", &path("a2_branch.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("d = 3\nm = [[2/3,1/3],[1/3,2/3]]\nG = Z/3\norders = (3,3)\n"), "{out}");
    assert!(out.contains("alpha[E1] = (1/3,2/3)"));
    assert!(out.contains("alpha[E2] = (2/3,1/3)"));
}

#[test]
fn series_text_a1() {
    let o = run(&["series", &path("a1.json"), "--kind", "q", "--degree", "2"]);
    assert_eq!(stdout(&o), "1 + 2 t1^{1/2} + 3 t1 + 4 t1^{3/2} + 5 t1^2\n");

    let o = run(&["series", &path("a1.json"), "--kind", "p", "--degree", "3"]);
    assert_eq!(stdout(&o), "1 + 3 t1 + 5 t1^2 + 7 t1^3\n");

    let o = run(&["series", &path("a1.json"), "--kind", "pg", "--degree", "2"]);
    assert_eq!(stdout(&o), "1 + 2·[1/2] t1 + 3·[0] t1^2\n");

    let o = run(&["series", &path("a1.json"), "--kind", "curve", "--degree", "3"]);
    assert_eq!(stdout(&o), "1 + [1/2] t1 + [0] t1^2 + [1/2] t1^3\n");
}

#[test]
fn curve_series_needs_a_branch() {
    let o = run(&["series", &path("d4.json"), "--kind", "curve", "--degree", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no branches"));
}

#[test]
fn json_output_round_trips_through_the_library() {
    let doc = GraphDocument::parse(&std::fs::read_to_string(fixture("d4.json")).unwrap()).unwrap();
    let graph = doc.to_graph().unwrap();
    let engine = PoincareEngine::new(FiltrationSpec::new(&graph, Mode::Divisorial, 6).unwrap()).unwrap();

    let o = run(&["series", &path("d4.json"), "--kind", "pg", "--degree", "6", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let parsed = SeriesDocument::parse(stdout(&o).trim_end()).unwrap();
    assert_eq!(parsed.kind, "pg");
    assert_eq!(parsed.invariant_factors, Some(vec![2, 2]));
    let pg = parsed.to_equivariant_series(&engine.invariants().group).unwrap();
    assert_eq!(pg, engine.pg_series().unwrap());

    let o = run(&["series", &path("d4.json"), "--kind", "q", "--degree", "6", "--format", "json"]);
    let q = SeriesDocument::parse(stdout(&o).trim_end()).unwrap().to_int_series().unwrap();
    assert_eq!(q, engine.q_series().unwrap());
}

#[test]
fn output_is_deterministic() {
    let args = ["series", &path("a2_branch.json"), "--kind", "pg", "--degree", "8", "--format", "json"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
}

#[test]
fn check_passes_on_valid_inputs() {
    for f in ["a1.json", "a2_branch.json", "d4.json"] {
        let o = run(&["check", &path(f), "--degree", "12"]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stdout(&o));
        let out = stdout(&o);
        assert!(out.contains("integrality: ok"));
        assert!(out.contains("reduction: ok"));
        assert!(!out.contains("FAIL"));
    }
}

#[test]
fn oracle_table() {
    let o = run(&["oracle", "--n", "7", "--q", "3", "--all", "--degree", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "n\tq\tvertex\tbound\tverdict\n7\t3\t0\t10\tequal\n7\t3\t1\t10\tequal\n7\t3\t2\t10\tequal\n"
    );

    let o = run(&["oracle", "--n", "5", "--q", "2", "--vertex", "1", "--degree", "8"]);
    assert_eq!(stdout(&o), "n\tq\tvertex\tbound\tverdict\n5\t2\t1\t8\tequal\n");
}

#[test]
fn oracle_rejects_bad_parameters() {
    assert_eq!(run(&["oracle", "--n", "6", "--q", "3", "--all", "--degree", "3"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "--n", "5", "--q", "2", "--vertex", "7", "--degree", "3"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "--n", "5", "--q", "2", "--degree", "3"]).status.code(), Some(2));
}

#[test]
fn family_documents_validate() {
    for name in ["A1", "A_4", "D5", "E6", "E7", "E8"] {
        let o = run(&["family", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let graph = GraphDocument::parse(&stdout(&o)).unwrap().to_graph().unwrap();
        assert_eq!(graph.marked.len(), graph.len());
    }
    assert_eq!(run(&["family", "F4"]).status.code(), Some(2));
}
