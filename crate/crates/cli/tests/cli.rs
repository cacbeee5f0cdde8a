use std::io::Write;
use std::process::{Command, Stdio};

use quasinv::channels::kraus_to_affine;
use quasinv::zoo::{make, FamilySpec};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
}

fn quasinv(args: &[&str], stdin: &str) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_quasinv"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().expect("exited"),
        stdout: String::from_utf8(out.stdout).unwrap(),
    }
}

fn json(run: &Run) -> Value {
    serde_json::from_str(run.stdout.trim()).unwrap_or_else(|e| panic!("bad JSON {e}: {}", run.stdout))
}

fn analyze(doc: &str) -> (i32, Value) {
    let r = quasinv(&["analyze", "-"], doc);
    let v = json(&r);
    (r.code, v)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

/// `min_φ ‖A − e^{iφ}B‖_F` for `[[re, im]; 2]; 2]` matrices.
fn phase_distance(a: &Value, b: [[[f64; 2]; 2]; 2]) -> f64 {
    let a: Vec<[f64; 2]> = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| [f(&a[i][j][0]), f(&a[i][j][1])])
        .collect();
    let b: Vec<[f64; 2]> = b.iter().flatten().copied().collect();
    let (mut re, mut im, mut na, mut nb) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..4 {
        // conj(b) a
        re += b[k][0] * a[k][0] + b[k][1] * a[k][1];
        im += b[k][0] * a[k][1] - b[k][1] * a[k][0];
        na += a[k][0] * a[k][0] + a[k][1] * a[k][1];
        nb += b[k][0] * b[k][0] + b[k][1] * b[k][1];
    }
    (na + nb - 2.0 * (re * re + im * im).sqrt()).max(0.0).sqrt()
}

const SIGMA_X: [[[f64; 2]; 2]; 2] = [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]];
const SIGMA_Z: [[[f64; 2]; 2]; 2] = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]];

#[test]
fn analyze_pauli_document() {
    let (code, v) = analyze(r#"{"type": "pauli", "p": [0.1, 0.6, 0.2, 0.1]}"#);
    assert_eq!(code, 0);
    assert!((f(&v["delta_mstd"]) - 0.2).abs() < 1e-12);
    assert!(phase_distance(&v["quasi_inverse"]["matrix"], SIGMA_X) < 1e-6);
    assert!((f(&v["mstd_before"]) - f(&v["mstd_after"]) - f(&v["delta_mstd"])).abs() < 1e-12);
    assert_eq!(v["cptp"]["passed"], true);
}

#[test]
fn analyze_identity_rotation_is_trivial() {
    let (code, v) = analyze(r#"{"type": "unitary", "theta": 0.0}"#);
    assert_eq!(code, 0);
    assert_eq!(v["trivial"], true);
    assert_eq!(f(&v["delta_mstd"]), 0.0);
}

#[test]
fn non_cptp_affine_exits_3_with_report() {
    let (code, v) = analyze(r#"{"type": "affine", "m": [[1, 0, 0], [0, 1, 0], [0, 0, -1]], "c": [0, 0, 0]}"#);
    assert_eq!(code, 3);
    assert_eq!(v["cptp"]["passed"], false);
    assert!(f(&v["cptp"]["min_choi_eigenvalue"]) < 0.0);
    assert!(v.get("delta_mstd").is_none());
}

#[test]
fn parse_failure_prints_only_an_error_object() {
    for (args, input) in [
        (vec!["analyze", "-"], "{not json"),
        (vec!["analyze", "-"], r#"{"type": "gad", "gamma": 0.1}"#),
        (vec!["zoo", "tetrahedron", "0.3", "0.3"], ""),
        (vec!["analyze", "/nonexistent/channel.json"], ""),
    ] {
        let r = quasinv(&args, input);
        assert_eq!(r.code, 2, "{args:?}");
        assert_eq!(r.stdout.lines().count(), 1);
        let v = json(&r);
        assert_eq!(v["error"]["kind"], "parse");
        assert!(v["error"]["message"].is_string());
    }
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(quasinv(&["random", "--kraus", "5"], "").code, 2);
    assert_eq!(quasinv(&["random", "--count", "0"], "").code, 2);
    assert_eq!(quasinv(&["mstd", "-", "--monte-carlo", "10"], r#"{"type": "pauli", "p": [1, 0, 0, 0]}"#).code, 2);
}

#[test]
fn mstd_reports() {
    let identity = r#"{"type": "pauli", "p": [1, 0, 0, 0]}"#;
    let depol = r#"{"type": "pauli", "p": [0.25, 0.25, 0.25, 0.25]}"#;
    assert_eq!(f(&json(&quasinv(&["mstd", "-"], identity))["value"]), 0.0);
    let s = json(&quasinv(&["mstd", "-", "--surface"], depol));
    assert!((f(&s["value"]) - 0.25).abs() < 1e-12);
    assert_eq!(s["region"], "surface");

    let args = ["mstd", "-", "--monte-carlo", "1000000", "--seed", "7"];
    let a = quasinv(&args, depol);
    let b = quasinv(&args, depol);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["n_samples"], 1_000_000);
    assert_eq!(v["method"], "monte-carlo-ball");
    assert!((f(&v["value"]) - 0.15).abs() <= 4.0 * f(&v["stderr"]));
}

#[test]
fn zoo_documents_feed_analyze() {
    let pauli = quasinv(&["zoo", "pauli", "0.25", "0.25", "0.25", "0.25"], "");
    assert_eq!(pauli.code, 0);
    let doc = json(&pauli);
    assert_eq!(doc["type"], "kraus");
    assert_eq!(doc["operators"].as_array().unwrap().len(), 4);
    assert_eq!(analyze(&pauli.stdout).1["cptp"]["passed"], true);

    let gad = quasinv(&["zoo", "gad", "-0.5", "0.2"], "");
    let (code, v) = analyze(&gad.stdout);
    assert_eq!(code, 0);
    assert!(phase_distance(&v["quasi_inverse"]["matrix"], SIGMA_Z) < 1e-6);
}

#[test]
fn zoo_round_trip_reproduces_golden_values() {
    let mut cases: Vec<(Vec<String>, FamilySpec)> = Vec::new();
    let s = |xs: &[f64]| xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>();
    for p in [[0.1, 0.6, 0.2, 0.1], [0.7, 0.1, 0.1, 0.1], [0.25; 4], [0.0, 0.0, 0.5, 0.5]] {
        cases.push(([vec!["pauli".into()], s(&p)].concat(), FamilySpec::Pauli { p }));
    }
    for (gamma, p) in [(-1.0, 0.0), (-0.25, 0.5), (0.5, 1.0)] {
        cases.push(([vec!["gad".into()], s(&[gamma, p])].concat(), FamilySpec::Gad { gamma, p }));
    }
    for (p, theta) in [(0.3, 2.8), (0.2, 1.0), (1.0 / 3.0, 3.0)] {
        cases.push(([vec!["mixed-unitary".into()], s(&[p, theta])].concat(), FamilySpec::MixedUnitary { p, theta }));
    }
    for (p, p_prime) in [(0.3, 0.1), (0.1, 0.35), (0.25, 0.25), (0.1, 0.1)] {
        cases.push(([vec!["tetrahedron".into()], s(&[p, p_prime])].concat(), FamilySpec::Tetrahedron { p, p_prime }));
    }
    cases.push((
        [vec!["unitary".into()], s(&[1.3, 0.0, 0.6, 0.8])].concat(),
        FamilySpec::Rotation { theta: 1.3, axis: [0.0, 0.6, 0.8] },
    ));

    for (args, spec) in cases {
        let argv: Vec<&str> = std::iter::once("zoo").chain(args.iter().map(String::as_str)).collect();
        let doc = quasinv(&argv, "");
        assert_eq!(doc.code, 0, "{argv:?}");
        let (code, v) = analyze(&doc.stdout);
        assert_eq!(code, 0);
        let (k, golden) = make(&spec).unwrap();
        let e = kraus_to_affine(&k).unwrap();
        if let Some(d) = golden.expected_delta {
            assert!((f(&v["delta_mstd"]) - d).abs() < 1e-10, "{spec:?}");
        }
        if let Some(q) = golden.expected_q {
            let full = q.to_full();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((f(&v["q_matrix"][i][j]) - full[i][j]).abs() < 1e-12, "{spec:?}");
                }
            }
        }
        let m = e.m().0;
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f(&v["affine"]["m"][i][j]), m[i][j], "affine echo is exact");
            }
        }
        if !golden.degenerate && !golden.expected_unitaries.is_empty() {
            let want = golden.expected_unitaries[0].0.map(|row| row.map(|z| [z.re, z.im]));
            assert!(phase_distance(&v["quasi_inverse"]["matrix"], want) < 1e-6, "{spec:?}");
        }
    }
}

#[test]
fn random_stream_is_reproducible_and_physical() {
    let args = ["random", "--count", "5", "--seed", "11", "--kraus", "1"];
    let a = quasinv(&args, "");
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, quasinv(&args, "").stdout);
    assert_eq!(a.stdout.lines().count(), 5);
    for line in a.stdout.lines() {
        let (code, v) = analyze(line);
        assert_eq!(code, 0);
        assert_eq!(v["cptp"]["passed"], true);
        let m: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| f(&v["affine"]["m"][i][j])).collect()).collect();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn verify_command() {
    for spec in [
        vec!["tetrahedron", "0.3", "0.1"],
        vec!["pauli", "0.1", "0.6", "0.2", "0.1"],
        vec!["gad", "-0.5", "0.2"],
        vec!["mixed-unitary", "0.3", "2.8"],
        vec!["unitary", "2.0", "1.0", "0.0", "0.0"],
    ] {
        let doc = quasinv(&[vec!["zoo"], spec.clone()].concat(), "");
        let r = quasinv(&["verify", "-", "--samples", "100000", "--seed", "3"], &doc.stdout);
        assert_eq!(r.code, 0, "{spec:?}: {}", r.stdout);
        assert_eq!(json(&r)["passed"], true);
    }

    let doc = quasinv(&["zoo", "tetrahedron", "0.3", "0.1"], "");
    let bad = quasinv(&["verify", "-", "--corrupt-delta", "0.5"], &doc.stdout);
    assert_eq!(bad.code, 4);
    let v = json(&bad);
    assert_eq!(v["passed"], false);
    assert!(f(&v["best_sampled_delta"]) > f(&v["solver_delta"]));

    let id = quasinv(&["verify", "-"], r#"{"type": "pauli", "p": [1, 0, 0, 0], "label": "identity"}"#);
    assert_eq!(id.code, 0);
    let v = json(&id);
    assert_eq!(v["channel_id"], "identity");
    assert!(f(&v["best_sampled_delta"]).abs() < 1e-12);
}

#[test]
fn numbers_carry_seventeen_significant_digits() {
    let r = quasinv(&["analyze", "-"], r#"{"type": "pauli", "p": [0.1, 0.6, 0.2, 0.1]}"#);
    assert!(r.stdout.contains("[0.10000000000000001,0.59999999999999998,0.20000000000000001,0.10000000000000001]"));
}

#[test]
fn table_format() {
    let r = quasinv(&["--format", "table", "analyze", "-"], r#"{"type": "pauli", "p": [0.1, 0.6, 0.2, 0.1]}"#);
    assert_eq!(r.code, 0);
    assert!(r.stdout.lines().any(|l| l.starts_with("delta_mstd") && l.contains("0.2000000000")));
}

fn assert_schema(name: &str, doc: &Value) {
    let path = format!("{}/../../schema/{name}.schema.json", env!("CARGO_MANIFEST_DIR"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{doc}");
}

#[test]
fn outputs_match_published_schemas() {
    let pauli = r#"{"type": "pauli", "p": [0.1, 0.6, 0.2, 0.1], "label": "p"}"#;
    assert_schema("channel_document", &serde_json::from_str(pauli).unwrap());
    assert_schema("result_document", &analyze(pauli).1);
    let flip = r#"{"type": "affine", "m": [[1, 0, 0], [0, 1, 0], [0, 0, -1]], "c": [0, 0, 0]}"#;
    assert_schema("result_document", &analyze(flip).1);
    assert_schema("mstd_report", &json(&quasinv(&["mstd", "-"], pauli)));
    assert_schema("mstd_report", &json(&quasinv(&["mstd", "-", "--monte-carlo", "5000", "--surface"], pauli)));
    assert_schema("verification_report", &json(&quasinv(&["verify", "-", "--samples", "10000"], pauli)));
    assert_schema("error", &json(&quasinv(&["analyze", "-"], "{")));

    for args in [
        vec!["zoo", "tetrahedron", "0.3", "0.1"],
        vec!["zoo", "unitary", "1.0"],
        vec!["random", "--count", "3", "--kraus", "3"],
    ] {
        let r = quasinv(&args, "");
        for line in r.stdout.lines() {
            assert_schema("channel_document", &serde_json::from_str(line).unwrap());
        }
    }
}
