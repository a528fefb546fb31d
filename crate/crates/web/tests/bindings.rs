use darwinism_web::{classify_json, decoherence_json, profile_json};
use serde_json::Value;

#[test]
fn classify_reports_verdicts() {
    let a: Value = serde_json::from_str(&classify_json("A", 3).unwrap()).unwrap();
    assert_eq!(a["verdict"], "supports_QD");
    let l: Value = serde_json::from_str(&classify_json("L", 4).unwrap()).unwrap();
    assert_eq!(l["verdict"], "fails_no_pointer");
    assert!(classify_json("nope", 3).is_err());
}

#[test]
fn profile_has_one_slice_per_time() {
    let p: Value = serde_json::from_str(&profile_json("A", 4, 2, 2.0, 5, 1).unwrap()).unwrap();
    let slices = p["slices"].as_array().unwrap();
    assert_eq!(slices.len(), 5);
    let last = &slices[4];
    assert_eq!(last["sizes"].as_array().unwrap().len(), last["mi"].as_array().unwrap().len());
}

#[test]
fn decoherence_starts_coherent() {
    let d: Value = serde_json::from_str(&decoherence_json("qubit", 4, "rademacher:1", 1, 1.0, 3, 0).unwrap()).unwrap();
    let g = d["gamma_sq"].as_array().unwrap();
    assert!((g[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn caps_reject_large_inputs() {
    assert!(profile_json("A", 4, 10_000, 1.0, 2, 0).is_err());
    assert!(classify_json("A", 40).is_err());
}
