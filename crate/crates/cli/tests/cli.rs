//! End-to-end tests of the command-line interface: document round-trips,
//! report determinism and the exit-code contract.

use std::process::{Command, Output};

fn facering(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_facering"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_temp(name: &str, content: &str) -> String {
    let path =
        std::env::temp_dir().join(format!("facering-test-{name}-{}.json", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn generate_then_validate_round_trip() {
    let out = facering(&["generate", "coordinate-arrangement", "3", "1"]);
    assert!(out.status.success());
    let path = write_temp("ca31", &stdout(&out));
    let out = facering(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["validation"]["valid"], serde_json::json!(true));
    assert_eq!(v["validation"]["complex"]["cones"], serde_json::json!(7));
}

#[test]
fn malformed_rational_names_the_field() {
    let out = facering(&["generate", "cusp-cone"]);
    let mut doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    doc["boundary"] = serde_json::json!({ "c1": "0.5" });
    let path = write_temp("badrat", &doc.to_string());
    let out = facering(&["classify", &path]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let msg = v["error"].as_str().unwrap();
    assert!(msg.contains("boundary.c1"), "error names the field: {msg}");
}

#[test]
fn overlapping_cones_are_a_validation_failure() {
    let doc = serde_json::json!({
        "schema_version": 1,
        "lattice_rank": 2,
        "mode": "lattice_family",
        "cones": {
            "a": { "rays": [[1, 0], [0, 1]] },
            "b": { "rays": [[1, 1], [-1, 1]] },
        },
        "maximal": ["a", "b"],
        "lattices": {},
    });
    let path = write_temp("overlap", &doc.to_string());
    let out = facering(&["validate", &path]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let violations = v["validation"]["violations"].as_array().unwrap();
    assert!(violations
        .iter()
        .any(|x| x.as_str().unwrap().contains("not a common face")));
}

#[test]
fn classify_cusp_with_prime_boundary() {
    let out = facering(&["generate", "cusp-cone"]);
    let mut doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    doc["boundary"] = serde_json::json!({ "c1": "1" });
    let path = write_temp("cusp-b1", &doc.to_string());
    let out = facering(&["classify", &path]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["classification"]["wlc"], serde_json::json!(true));
    assert_eq!(v["classification"]["slc"], serde_json::json!(true));
    assert_eq!(
        v["classification"]["psi"]["vector"],
        serde_json::json!(["1/2", "0"])
    );
    assert_eq!(
        v["classification"]["invertibility_orders"],
        serde_json::json!([2, 4, 6, 8])
    );
}

#[test]
fn classify_non_orientable_fixture() {
    let doc = serde_json::json!({
        "schema_version": 1,
        "lattice_rank": 2,
        "mode": "lattice_family",
        "cones": {
            "c01": { "rays": [[1, 0], [-1, 1]] },
            "c12": { "rays": [[-1, 1], [-1, -1]] },
            "c20": { "rays": [[-1, -1], [1, 0]] },
            "r0": { "rays": [[1, 0]] },
            "r1": { "rays": [[-1, 1]] },
            "r2": { "rays": [[-1, -1]] },
            "o": { "rays": [] },
        },
        "maximal": ["c01", "c12", "c20"],
        "lattices": {
            "c01": [[1, 0], [0, 1]],
            "c12": [[1, 0], [0, 1]],
            "c20": [[2, 0], [1, 1]],
            "r0": [[2, 0]],
            "r1": [[-1, 1]],
            "r2": [[1, 1]],
            "o": [],
        },
    });
    let path = write_temp("nonorient", &doc.to_string());
    let out = facering(&["classify", &path]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        v["classification"]["q_orientable"],
        serde_json::json!(false)
    );
    assert_eq!(
        v["classification"]["weakly_normal_log_pair"],
        serde_json::json!(false)
    );
    assert!(
        v["classification"]["orientability_witness"]["cycle"]
            .as_array()
            .unwrap()
            .len()
            >= 3
    );

    // the same fixture in characteristic 3 is a weakly normal log pair
    let out = facering(&["classify", &path, "--char", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["classification"]["q_orientable"], serde_json::json!(true));
}

#[test]
fn classify_coordinate_arrangement_4_2() {
    let out = facering(&["generate", "coordinate-arrangement", "4", "2"]);
    let path = write_temp("ca42", &stdout(&out));
    let out = facering(&["classify", &path]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["classification"]["wlc"], serde_json::json!(true));
    assert_eq!(v["classification"]["slc"], serde_json::json!(false));
}

#[test]
fn chain_on_coordinate_arrangement_4_1() {
    let out = facering(&["generate", "coordinate-arrangement", "4", "1"]);
    let path = write_temp("ca41", &stdout(&out));
    let out = facering(&["chain", &path, "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let steps = v["chain"].as_array().unwrap();
    assert_eq!(steps.len(), 4);
    for s in steps {
        assert!(s["boundary"].as_object().unwrap().is_empty());
        for c in s["constants"].as_object().unwrap().values() {
            assert_eq!(c, &serde_json::json!("1"));
        }
    }
}

#[test]
fn residues_on_normal_components() {
    let out = facering(&["generate", "coordinate-arrangement", "3", "1"]);
    let path = write_temp("ca31r", &stdout(&out));
    let out = facering(&["residues", &path, "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for c in v["residues"]["constants_facets"]
        .as_object()
        .unwrap()
        .values()
    {
        assert_eq!(c, &serde_json::json!("1"));
    }
    assert_eq!(v["residues"]["lcs_glue"]["ok"], serde_json::json!(true));
}

#[test]
fn centers_on_klt_input() {
    let out = facering(&["generate", "cusp-cone"]);
    let path = write_temp("cuspk", &stdout(&out));
    let out = facering(&["centers", &path]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["centers"]["list"].as_array().unwrap().len(), 1);
    assert_eq!(
        v["centers"]["minimal"]["cone"]["alias"],
        serde_json::json!("F0")
    );
}

#[test]
fn higher_residue_via_center_flag() {
    let out = facering(&["generate", "coordinate-arrangement", "3", "1"]);
    let path = write_temp("ca31h", &stdout(&out));
    let out = facering(&["residues", &path, "--r", "2", "--center", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["residues"]["higher"]["constant"], serde_json::json!("1"));
    assert!(v["residues"]["higher"]["chains_checked"].as_u64().unwrap() >= 2);
}

#[test]
fn reports_are_byte_identical() {
    let out = facering(&["generate", "coordinate-arrangement", "3", "1"]);
    let path = write_temp("ca31d", &stdout(&out));
    let a = facering(&["classify", &path]);
    let b = facering(&["classify", &path]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn classification_precondition_failure_exits_3() {
    let out = facering(&["generate", "stanley-reisner", "1,2,3;3,4,5"]);
    assert!(out.status.success());
    let path = write_temp("sr", &stdout(&out));
    // validation passes
    let out = facering(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    // but classification fails its S2 precondition
    let out = facering(&["classify", &path]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("S2"));
    // the normality section is still reported, with the witness
    assert_eq!(v["normality"]["s2"]["holds"], serde_json::json!(false));
}

#[test]
fn generator_mode_document_reports_box_bounded_verdicts() {
    let doc = serde_json::json!({
        "schema_version": 1,
        "lattice_rank": 1,
        "mode": "generators",
        "cones": { "f": { "rays": [[1]] } },
        "maximal": ["f"],
        "generators": { "f": [[2], [3]] },
    });
    let path = write_temp("genmode", &doc.to_string());
    let out = facering(&["classify", &path, "--box", "10"]);
    assert_eq!(out.status.code(), Some(3)); // classification needs a lattice family
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // seminormality fails exactly, with the witness point 1
    assert_eq!(
        v["normality"]["seminormal"]["holds"],
        serde_json::json!(false)
    );
    assert_eq!(
        v["normality"]["seminormal"]["witness"]["point"],
        serde_json::json!(["1"])
    );
}
