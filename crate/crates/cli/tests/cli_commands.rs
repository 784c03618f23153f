use std::path::{Path, PathBuf};

use serde_json::Value;
use superhopf_cli::{run, EXIT_GUARD, EXIT_MISMATCH, EXIT_USAGE};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("superhopf").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    out
}

fn json_doc(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    serde_json::from_str(&ok(&a)).unwrap()
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = root().join("docs/schemas").join(format!("{name}.schema.json"));
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft202012)
        .compile(&raw)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn assert_valid(schema_name: &str, v: &Value) {
    let s = schema(schema_name);
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "{schema_name}: {}", msgs.join("; "));
}

#[test]
fn ext_dims_example() {
    let out = ok(&["ext", "dims", "--algebra", "E-(2,1);p=3", "--smax", "4"]);
    let row = out.lines().find(|l| l.starts_with("dim")).unwrap();
    let nums: Vec<u32> = row.split_whitespace().skip(1).map(|x| x.parse().unwrap()).collect();
    assert_eq!(nums, vec![1, 2, 3, 4, 5]);
}

#[test]
fn dieudonne_classify_example() {
    let doc = json_doc(&["dieudonne", "classify", "--m", "1", "--n", "1", "--p", "3"]);
    let labels = doc["result"]["labels"].as_array().unwrap();
    assert_eq!(labels.len(), 1);
    assert_eq!(labels[0]["label"], "M(1,1)");
    assert_eq!(labels[0]["count"], 1);
}

#[test]
fn steenrod_apply_example() {
    let out = ok(&["steenrod", "apply", "--ring", "std:1,0,1", "--op", "betaP", "--i", "0", "--expr", "l1"]);
    assert_eq!(out.trim(), "-x1");
    let out = ok(&["steenrod", "apply", "--ring", "std:r=1,s=0,eps=1", "--op", "P", "--i", "1/2", "--expr", "zeta"]);
    assert_eq!(out.trim(), "zeta^3");
}

#[test]
fn named_products_and_powers() {
    let out = ok(&["ext", "product", "--algebra", "E-(1,1)", "--left", "zeta", "--right", "zeta"]);
    assert_eq!(out.trim(), "zeta * zeta = zeta^2");
    let out = ok(&["ext", "product", "--algebra", "W-(1)", "--left", "zeta", "--right", "zeta"]);
    assert_eq!(out.trim(), "zeta * zeta = 0");
    let doc = json_doc(&["ext", "power", "--algebra", "W-(1)", "--class", "zeta"]);
    assert_eq!(doc["result"]["nilpotence_order"], 2);
    let doc = json_doc(&["ext", "inflate", "--m", "2", "--n", "1", "--smax", "2"]);
    assert_eq!(doc["result"]["degrees"][2]["kernel"][0]["named"], "zeta^2 - x1");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["ext", "dims", "--algebra", "Q(1)"][..],
        &["frobnicate"],
        &["steenrod", "apply", "--ring", "std:1,0,1", "--op", "Sq", "--i", "0", "--expr", "l1"],
        &["steenrod", "apply", "--ring", "std:1,0,1", "--op", "P", "--i", "1/3", "--expr", "l1"],
        &["steenrod", "apply", "--ring", "std:1,0,1", "--op", "P", "--i", "0", "--expr", "w7"],
        &["steenrod", "apply", "--ring", "std:1,0,1", "--op", "P", "--i", "1", "--expr", "zeta"],
        &["ext", "product", "--algebra", "Ga-", "--left", "nope", "--right", "zeta"],
        &["witt", "eval", "--op", "add", "--u", "[1,2]", "--p", "3"],
        &["dieudonne", "iso", "--a", "M(1,1)", "--b", "N(1,1)"],
    ] {
        let (code, _, err) = call(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("steenrod"));
}

#[test]
fn guards_exit_three() {
    for args in [
        &["witt", "poly", "--n", "4"][..],
        &["witt", "cyclic", "--m", "7", "--p", "7"],
        &["witt", "cyclic", "--m", "4", "--p", "7", "--e", "2"],
        &["witt", "eval", "--op", "neg", "--u", "[1,0,0,0,0]"],
        &["steenrod", "serre", "--s", "4", "--seed", "z1"],
        &["ext", "dims", "--algebra", "Ga-", "--smax", "40"],
        &["dieudonne", "classify", "--m", "4", "--n", "4"],
    ] {
        let (code, _, err) = call(args);
        assert_eq!(code, EXIT_GUARD, "{args:?}: {err}");
        assert!(err.contains("guard"), "{err}");
    }
}

#[test]
fn json_outputs_match_their_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let module = dir.path().join("module.json");
    let embeddings = dir.path().join("embeddings.json");
    std::fs::write(&module, r#"{"algebra": "E-(2,1);p=3", "kind": "syzygy"}"#).unwrap();
    std::fs::write(
        &embeddings,
        r#"[{"kind": "w_minus", "m": 2}, {"kind": "identity"}, {"source": "Ga-", "images": {"sigma": [0,0,0,0,0,0,0,0,0,1,0,0,0,0,0,0,0,0]}}]"#,
    )
    .unwrap();
    let (m, e) = (module.to_str().unwrap(), embeddings.to_str().unwrap());
    let commands: Vec<Vec<&str>> = vec![
        vec!["witt", "poly", "--n", "2"],
        vec!["witt", "eval", "--op", "add", "--u", "[1,2]", "--v", "[2,2]"],
        vec!["witt", "eval", "--op", "order", "--u", "[1,0]"],
        vec!["witt", "laws", "--m", "3", "--e", "2", "--trials", "50"],
        vec!["witt", "cyclic", "--m", "2"],
        vec!["dieudonne", "classify", "--m", "2", "--n", "2"],
        vec!["dieudonne", "iso", "--a", "M(1,1,mu=1)", "--b", "M(1,1,mu=2)"],
        vec!["algebra", "build", "--algebra", "E-(2,1)"],
        vec!["algebra", "build", "--algebra", "Ga(2)xGa-;p=5"],
        vec!["algebra", "hopf-check", "--algebra", "E-(1,1,mu=2);p=3;e=2"],
        vec!["algebra", "fold", "--m", "2", "--n", "1", "--a", "3"],
        vec!["ext", "dims", "--algebra", "E-(2,2)", "--smax", "3"],
        vec!["ext", "classes", "--algebra", "E-(1,2)"],
        vec!["ext", "product", "--algebra", "E-(1,1)", "--left", "lambda1", "--right", "g2_0"],
        vec!["ext", "power", "--algebra", "Ga(1)", "--class", "lambda1"],
        vec!["ext", "inflate", "--m", "3", "--n", "1", "--smax", "2"],
        vec!["module", "projective", "--algebra", "E-(2,1)", "--kind", "regular", "--restrict-w-minus", "2", "--extend", "2"],
        vec!["module", "detect", "--module", m, "--embeddings", e, "--extend", "2"],
        vec!["steenrod", "apply", "--ring", "E-(2,2)", "--op", "betaP", "--i", "0", "--expr", "l1*l2"],
        vec!["steenrod", "saturate", "--ring", "std:1,1,0", "--seed", "l1*y1", "--bound", "10"],
        vec!["steenrod", "classify-b36", "--ring", "std:1,0,1", "--seed", "zeta^2+x1"],
        vec!["steenrod", "serre", "--s", "2", "--seed", "z1+z2"],
        vec!["steenrod", "table", "--ring", "std:1,1,1", "--p", "5"],
    ];
    for args in commands {
        let doc = json_doc(&args);
        assert_valid("run-document", &doc);
        let name = doc["manifest"]["command"].as_str().unwrap().replace(' ', "-");
        assert_valid(&name, &doc["result"]);
    }
}

#[test]
fn detection_report() {
    let dir = tempfile::tempdir().unwrap();
    let module = dir.path().join("m.json");
    let embeddings = dir.path().join("e.json");
    std::fs::write(&module, r#"{"algebra": "Ga-", "parities": [0, 1], "action": {"sigma": [[0, 0], [1, 0]]}}"#).unwrap();
    std::fs::write(&embeddings, r#"[{"kind": "identity"}]"#).unwrap();
    let doc = json_doc(&["module", "detect", "--module", module.to_str().unwrap(), "--embeddings", embeddings.to_str().unwrap()]);
    assert_eq!(doc["result"]["all_projective"], true);
    std::fs::write(&module, r#"{"algebra": "Ga-", "parities": [0, 0], "action": {"sigma": [[0, 0], [1, 0]]}}"#).unwrap();
    let (code, _, err) = call(&["module", "detect", "--module", module.to_str().unwrap(), "--embeddings", embeddings.to_str().unwrap()]);
    assert_ne!(code, 0, "{err}");
}

#[test]
fn manifests_are_deterministic() {
    let args = ["steenrod", "classify-b36", "--ring", "std:2,0,0", "--seed", "l1*l2", "--json"];
    let (a, b) = (ok(&args), ok(&args));
    assert_eq!(a, b);
    let doc: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["manifest"]["digest"], superhopf_cli::manifest::digest(&doc["result"]));
    assert_eq!(doc["result"]["outcome"]["element"], "x2^4");
    let laws = json_doc(&["witt", "laws", "--m", "2", "--trials", "10", "--seed", "5"]);
    assert_eq!(laws["manifest"]["seed"], 5);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dims.json");
    let (code, out, _) = call(&["ext", "dims", "--algebra", "W-(1)", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["result"]["dims"][3]["odd"], 1);
}

#[test]
fn repro_reports_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["repro", "all", "--dir", d, "--only", "fold", "--only", "ext_dims"];
    let (code, out, _) = call(&args);
    assert_eq!(code, 0);
    assert_eq!(out.matches("written").count(), 2);
    let (code, out, _) = call(&args);
    assert_eq!(code, 0);
    assert_eq!(out.matches("match").count(), 2);
    std::fs::write(dir.path().join("fold.json"), "{}\n").unwrap();
    let (code, out, _) = call(&args);
    assert_eq!(code, EXIT_MISMATCH);
    assert!(out.contains("mismatch"));
    let (code, _, _) = call(&["repro", "all", "--dir", d, "--only", "nonsense"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn committed_fixtures_reproduce_and_validate() {
    let dir = root().join("fixtures");
    let doc = json_doc(&["repro", "all", "--dir", dir.to_str().unwrap()]);
    assert_valid("repro-all", &doc["result"]);
    for f in doc["result"]["fixtures"].as_array().unwrap() {
        assert_eq!(f["status"], "match", "{}", f["name"]);
        let name = f["name"].as_str().unwrap();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap();
        assert_valid(&format!("fixture-{name}"), &v);
    }
}

#[test]
fn binary_runs() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_superhopf"))
        .args(["steenrod", "apply", "--ring", "std:1,0,1", "--op", "betaP", "--i", "0", "--expr", "l1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "-x1");
    let bad = std::process::Command::new(env!("CARGO_BIN_EXE_superhopf")).args(["ext", "dims"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}
