use flatdeform_web::{flatness, normal_form, relation_space};
use serde_json::Value;

#[test]
fn normal_form_agrees_across_strategies() {
    let out: Value = serde_json::from_str(&normal_form(1, "0 1 2", "").unwrap()).unwrap();
    for f in out["forms"].as_array().unwrap() {
        assert_eq!(f["normal_form"], "x2*ybar0");
    }
    assert_eq!(out["phi"], serde_json::json!([0, 1, 2]));
    assert!(normal_form(1, "a", "").is_err());
    assert!(normal_form(0, "1", "").is_err());
}

#[test]
fn flatness_json() {
    let out: Value = serde_json::from_str(&flatness("theta-k1", 5, 2, "1/3").unwrap()).unwrap();
    assert_eq!(out["status"], "pass");
    assert!(out.get("timing").is_none());
    assert!(flatness("nope", 5, 2, "1/3").is_err());
    assert!(flatness("theta-k1", 5, 2, "0").is_err());
}

#[test]
fn relation_space_json() {
    let out: Value = serde_json::from_str(&relation_space("theta-k1", 3, 4, "1/3").unwrap()).unwrap();
    assert_eq!(out["records"][0]["details"]["dimension"], 1);
}
