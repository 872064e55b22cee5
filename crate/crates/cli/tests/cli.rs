use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice-forge")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = run(&a);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn info_of_og6_lattice() {
    let r = json(&["latt", "info", "U^3 + <-2>^2"]);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["verb"], "latt.info");
    assert_eq!(r["result"]["signature"], serde_json::json!([3, 5]));
    assert_eq!(r["result"]["abs_det"], 4);
    assert_eq!(r["result"]["disc"]["factors"], serde_json::json!([2, 2]));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["latt", "info", "U^0"]), 2);
    assert_eq!(code(&["latt", "info", "U", "--bogus"]), 2);
    assert_eq!(code(&["hk", "bb", "--type", "og7"]), 2);
    assert_eq!(code(&["latt", "info", "[[0,0],[0,0]]"]), 1);
    assert_eq!(code(&["hk", "reduce", "--form", "[[2,3],[3,2]]"]), 1);
    assert_eq!(code(&["latt", "info", "E8"]), 0);
}

#[test]
fn errors_are_reported_as_diagnostics() {
    let out = run(&["latt", "info", "[[0,0],[0,0]]", "--format", "json"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["diagnostics"][0].as_str().unwrap().contains("degenerate"));
}

#[test]
fn og6_rank3_d2_names_the_nonmoduli_genus() {
    let r = json(&["hk", "rank3", "--type", "og6", "--d", "2"]);
    let classes = r["result"]["classes"].as_array().unwrap();
    let bad: Vec<&Value> = classes.iter().filter(|c| c["non_moduli"] == true).collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["ns_name"], "U + <-4>");
    assert_eq!(r["result"]["has_nonmoduli"], true);
}

#[test]
fn catalog_flag_replaces_builtin() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# only the hyperbolic plane").unwrap();
    writeln!(f, "U").unwrap();
    let r = json(&["hk", "rank3", "--d", "2", "--catalog", f.path().to_str().unwrap()]);
    assert!(r["result"]["classes"].as_array().unwrap().iter().all(|c| c["ns_name"].is_null()));
}

#[test]
fn json_round_trips() {
    let out = run(&["hk", "rank3-og10", "--d", "3", "--format", "json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}

#[test]
fn json_has_no_floats() {
    fn check(v: &Value) {
        match v {
            Value::Number(n) => assert!(n.is_i64() || n.is_u64(), "{n}"),
            Value::Array(xs) => xs.iter().for_each(check),
            Value::Object(m) => m.values().for_each(check),
            _ => {}
        }
    }
    check(&json(&["hk", "bfield", "--form", "<2>", "--lambda", "1/2", "--r", "1", "--mu", "0", "--s", "-1"]));
    check(&json(&["latt", "disc", "A2 + <6>"]));
}

#[test]
fn census_is_deterministic_and_sorted() {
    let a = run(&["hk", "census", "--type", "og10", "--max-det", "12", "--format", "json"]);
    let b = run(&["hk", "census", "--type", "og10", "--max-det", "12", "--format", "json", "--sequential"]);
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["inputs_echo"].as_object_mut().unwrap().remove("sequential");
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.stdout, run(&["hk", "census", "--type", "og10", "--max-det", "12", "--format", "json"]).stdout);
    let r = strip(&a);
    let dets: Vec<u64> = r["result"]["rows"].as_array().unwrap().iter().map(|x| x["det"].as_u64().unwrap()).collect();
    assert!(dets.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(r["result"]["first_non_moduli"]["form"], serde_json::json!([[4, 2], [2, 4]]));
}

#[test]
fn obstruction_printed_verbatim() {
    let args = ["latt", "find-vector", "U", "--square", "2", "--div", "2"];
    let tag = json(&args)["result"]["obstruction"].as_str().unwrap().to_string();
    let text = String::from_utf8(run(&args).stdout).unwrap();
    assert!(text.contains(&format!("obstruction: {tag}")));
}

#[test]
fn undetermined_sets_flag_but_exits_zero() {
    let r = json(&["latt", "find-vector", "<-2>^3", "--square", "-30", "--height", "1"]);
    assert_eq!(r["result"]["verdict"], "undetermined");
    assert_eq!(r["undetermined"], true);
}

#[test]
fn criterion_reads_embedding_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, r#"{{"source": "<2> + <-2>", "images": [[1,1,0,0,0,0,0,0],[0,0,0,0,0,0,1,0]]}}"#).unwrap();
    let path = f.path().to_str().unwrap();
    let r = json(&["hk", "criterion", "--type", "og6", "--embedding", path]);
    assert_eq!(r["result"]["decision"]["verdict"], "yes");
    assert_eq!(r["result"]["moduli"], true);
    assert_eq!(code(&["hk", "criterion", "--type", "og10", "--embedding", path]), 1);
    let inline = r#"{"source": [[2]], "images": [[1,1,0,0,0,0,0,0]]}"#;
    let r = json(&["hk", "criterion", "--type", "og6", "--embedding", inline]);
    assert_eq!(r["result"]["decision"]["verdict"], "no");
}

#[test]
fn small_verbs() {
    assert_eq!(json(&["hk", "pn", "--n", "7"])["result"]["pairs"], serde_json::json!([[1, -6], [2, -3]]));
    assert_eq!(json(&["hk", "qn", "--n", "5"])["result"]["pairs"], serde_json::json!([[1, -6], [2, -3]]));
    assert_eq!(json(&["hk", "reduce", "--form", "[[10,7],[7,6]]"])["result"]["reduced"], serde_json::json!([[2, 1], [1, 6]]));
    assert_eq!(json(&["latt", "equiv", "<2> + <-2>", "U(2)"])["result"]["same_genus"], false);
    assert_eq!(json(&["latt", "glue", "<-2>^4", "--subgroup", "[[1,1,1,1]]"])["result"]["abs_det"], 4);
    assert_eq!(json(&["hk", "bb", "--type", "k3n(3)"])["result"]["signature"], serde_json::json!([3, 20]));
    let w = json(&["hk", "walls", "--v", "2,1,0,-3", "--ns", "<2> + <-2>", "--height", "3"]);
    assert_eq!(w["result"]["v_square"], 14);
    let m = json(&["hk", "morrison", "--t", "U + <4> + <-2>"]);
    assert_eq!(m["result"]["verdict"], "yes");
}

#[test]
fn every_verb_has_help() {
    for v in ["info", "disc", "equiv", "complement", "find-vector", "glue", "embed-search"] {
        assert_eq!(code(&["latt", v, "--help"]), 0, "{v}");
    }
    for v in ["bb", "criterion", "lsv", "rank3", "rank3-og10", "census", "pn", "qn", "walls", "reduce", "bfield", "morrison"] {
        let out = run(&["hk", v, "--help"]);
        assert!(out.status.success(), "{v}");
    }
}
