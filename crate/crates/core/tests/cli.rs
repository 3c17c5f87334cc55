use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_intres"))
        .args(args)
        .env_remove("INTRES_FIELD")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const D4_TEXT: &str = r#"{
  "poset": {"elements": ["1", "2", "3", "4"], "relations": [["1", "3"], ["3", "2"], ["3", "4"]]},
  "dims": {"1": 1, "2": 1, "3": 2, "4": 1},
  "maps": {"1->3": [[1], [1]], "3->2": [[1, 0]], "3->4": [[0, 1]]}
}"#;

#[test]
fn module_fixtures_round_trip_byte_identically() {
    for name in ["d4_M.json", "grid_full_interval.json"] {
        let path = fixture(name);
        let text = std::fs::read_to_string(&path).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let labels: Vec<&str> = doc["poset"]["elements"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap())
            .collect();
        let o = run(&["restrict", path.to_str().unwrap(), "--elements", &labels.join(",")], "");
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o).trim_end(), text.trim_end(), "{name}");
    }
}

#[test]
fn poset_fixtures_round_trip_byte_identically() {
    for (name, spec) in [("igusa.json", "igusa"), ("igusa_prime.json", "igusa-prime"), ("a3.json", "A:ff")] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let o = run(&["gen", spec], "");
        assert_eq!(stdout(&o).trim_end(), text.trim_end(), "{name}");
        let p = intres::io::parse_poset(&text).unwrap();
        assert_eq!(intres::io::poset_to_json(&p).trim_end(), text.trim_end());
    }
}

#[test]
fn d4_fixture_has_the_expected_dimension_vector() {
    let m = intres::io::read_module_file(&fixture("d4_M.json"), intres::Field::GF2).unwrap();
    assert_eq!(m.dims(), &[1, 1, 2, 1]);
}

#[test]
fn cover_reads_standard_input() {
    let o = run(&["cover"], D4_TEXT);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summands"].as_object().unwrap().len(), 3);
    assert!(stderr(&o).is_empty());
}

#[test]
fn wrong_matrix_shape_exits_1_with_field_path() {
    let bad = D4_TEXT.replace(r#""3->4": [[0, 1]]"#, r#""3->4": [[0], [1]]"#);
    let o = run(&["cover"], &bad);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("maps.3->4"), "{}", stderr(&o));
}

#[test]
fn malformed_json_exits_1() {
    let o = run(&["resolve"], "{\"poset\": ");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
}

#[test]
fn non_commutative_module_exits_2_naming_the_square() {
    let grid = r#"{"poset": {"elements": ["a","b","c","d"], "relations": [["a","b"],["a","c"],["b","d"],["c","d"]]},
        "dims": {"a":1,"b":1,"c":1,"d":1}, "maps": {"a->b":[[1]],"a->c":[[1]],"b->d":[[1]]}}"#;
    let o = run(&["resdim"], grid);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains('a') && err.contains('d'), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn cyclic_relations_exit_2() {
    let o = run(&["intervals"], r#"{"elements": ["x", "y"], "relations": [["x", "y"], ["y", "x"]]}"#);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tau_rejects_non_intervals() {
    let o = run(&["tau", fixture("d4_M.json").to_str().unwrap(), "--interval", "1,2"], "");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn field_flag_and_document_characteristic() {
    let o = run(&["--field", "3", "resolve"], D4_TEXT);
    assert!(o.status.success(), "{}", stderr(&o));
    let bad = run(&["--field", "4", "resolve"], D4_TEXT);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn seeded_checks_are_reproducible() {
    let a = run(&["check", "--suite", "cover", "--count", "20", "--seed", "11"], "");
    let b = run(&["check", "--suite", "cover", "--count", "20", "--seed", "11"], "");
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn conv_of_chain_endpoints_is_the_chain() {
    let p = stdout(&run(&["gen", "A:fff"], ""));
    let o = run(&["conv", "--elements", "1,4"], &p);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["elements"], serde_json::json!(["1", "2", "3", "4"]));
    assert_eq!(v["is_interval"], true);
}

#[test]
fn gldim_table_format() {
    let p = stdout(&run(&["gen", "D:fff"], ""));
    let o = run(&["--format", "table", "gldim"], &p);
    assert_eq!(stdout(&o).lines().next(), Some("1"));
    let o = run(&["--format", "table", "gldim", "--projective"], &p);
    assert_eq!(stdout(&o).lines().next(), Some("1"));
}

#[test]
fn reduce_support_flag_keeps_terms() {
    let on = run(&["resolve", fixture("d4_M.json").to_str().unwrap()], "");
    let off = run(&["--reduce-support", "false", "resolve", fixture("d4_M.json").to_str().unwrap()], "");
    let on: serde_json::Value = serde_json::from_str(&stdout(&on)).unwrap();
    let off: serde_json::Value = serde_json::from_str(&stdout(&off)).unwrap();
    assert_eq!(on["terms"], off["terms"]);
    assert!(on["hom_solves"].as_u64() <= off["hom_solves"].as_u64());
}
