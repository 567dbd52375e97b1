use qka_wasm::{entangling_sweep_json, oracle_curve_json, simulate_json, MAX_BROWSER_TRIALS};
use serde_json::Value;

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn curve_matches_closed_forms() {
    let points = parse(&oracle_curve_json(r#"{"kind":"tp_product_state"}"#, 3, 16, 10).unwrap());
    let points = points.as_array().unwrap();
    assert_eq!(points.len(), 10);
    for p in points {
        let delta = p["delta"].as_u64().unwrap() as i32;
        let oracle = p["p_abort"].as_f64().unwrap();
        let published = p["paper_claim"].as_f64().unwrap();
        assert!((oracle - (1.0 - 0.75f64.powi(3 * delta))).abs() < 1e-12);
        assert!((published - (1.0 - 0.25f64.powi(delta))).abs() < 1e-12);
    }
}

#[test]
fn honest_curve_is_flat_zero() {
    for attack in ["", "null"] {
        let points = parse(&oracle_curve_json(attack, 4, 8, 5).unwrap());
        assert!(points.as_array().unwrap().iter().all(|p| p["p_abort"].as_f64() == Some(0.0)));
    }
}

#[test]
fn sweep_endpoints() {
    let points = parse(&entangling_sweep_json(3, 4).unwrap());
    let points = points.as_array().unwrap();
    assert_eq!(points.len(), 5);
    for p in points {
        let r = p["overlap"].as_f64().unwrap();
        let x = p["x_basis_error_rate"].as_f64().unwrap();
        let adv = p["tp_guess_advantage"].as_f64().unwrap();
        assert!((x - (1.0 - r) / 2.0).abs() < 1e-10);
        assert!((adv - 0.5 * (1.0 - r * r).sqrt()).abs() < 1e-10);
    }
}

#[test]
fn simulate_is_seeded() {
    let scenario = r#"{"protocol":{"parties":3,"key_len":8,"delta":4,"zeta":8},"attack":{"kind":"impersonation"},"trials":300,"seed":12}"#;
    let a = simulate_json(scenario).unwrap();
    assert_eq!(a, simulate_json(scenario).unwrap());
    let v = parse(&a);
    assert_eq!(v["trials"], 300);
    assert_eq!(v["attack"], "impersonation");
    assert!(v["abs_z_score"].as_f64().unwrap() < 4.0);
}

#[test]
fn bad_input_is_an_error() {
    assert!(oracle_curve_json(r#"{"kind":"nope"}"#, 3, 16, 4).is_err());
    assert!(oracle_curve_json("", 1, 16, 4).is_err());
    assert!(oracle_curve_json("", 3, 16, 0).is_err());
    assert!(entangling_sweep_json(3, 0).is_err());
    assert!(simulate_json("{").is_err());
    assert!(simulate_json(&format!(r#"{{"trials":{}}}"#, MAX_BROWSER_TRIALS + 1)).is_err());
}
