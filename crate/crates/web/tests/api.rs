use adcsim_web::{default_config_json, linearity_json, spectrum_json, transfer_curve_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn default_config_round_trips() {
    let text = default_config_json();
    let v = parse(&text);
    assert_eq!(v["n_bits"], 8);
    assert!(linearity_json(&text).is_ok());
}

#[test]
fn transfer_curve_is_monotone_and_saturates() {
    let v = parse(&transfer_curve_json("{}", 1001).unwrap());
    let codes: Vec<u64> = v["code"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    assert_eq!(codes.len(), 1001);
    assert!(codes.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(codes[0], 0);
    assert_eq!(*codes.last().unwrap(), 255);
    assert_eq!(v["max_code"], 255);
    let vin = v["vin"].as_array().unwrap();
    assert!((vin[0].as_f64().unwrap() + 1.1).abs() < 1e-12);
}

#[test]
fn transfer_curve_rejects_bad_point_count() {
    assert!(transfer_curve_json("{}", 1).is_err());
    assert!(transfer_curve_json("{}", (1 << 16) + 1).is_err());
}

#[test]
fn linearity_reports_offset_missing_code() {
    let cfg = r#"{"stages": [{"comparator_offset_v": 0.0078125}, {}, {}, {}, {}, {}, {}, {}]}"#;
    let v = parse(&linearity_json(cfg).unwrap());
    assert_eq!(v["missing_codes"], serde_json::json!([128]));
    assert_eq!(v["worst_dnl"], -1.0);
}

#[test]
fn spectrum_of_ideal_converter() {
    let v = parse(&spectrum_json("{}").unwrap());
    assert_eq!(v["n_fft"], 1024);
    assert_eq!(v["signal_bin"], 101);
    assert_eq!(v["magnitudes_db"].as_array().unwrap().len(), 513);
    let sndr = v["sndr_db"].as_f64().unwrap();
    assert!((sndr - 49.8875).abs() < 1e-3, "{sndr}");
    assert!((v["tone_hz"].as_f64().unwrap() - 101.0 * 20e6 / 1024.0).abs() < 1e-6);
}

#[test]
fn errors_are_messages() {
    let e = spectrum_json(r#"{"fft": {"cycles": 64}}"#).unwrap_err();
    assert!(e.contains("64"), "{e}");
    let e = linearity_json("{ nope").unwrap_err();
    assert!(e.contains("line 1"), "{e}");
}

#[test]
fn default_config_leaves_stages_to_defaults() {
    let mut v = parse(&default_config_json());
    assert!(v.get("stages").is_none());
    v["n_bits"] = 10.into();
    v["stage_defaults"]["dc_gain_db"] = 40.into();
    let r = parse(&spectrum_json(&v.to_string()).unwrap());
    assert!(r["enob_bits"].as_f64().unwrap() < 7.0);
    assert_eq!(parse(&linearity_json(&v.to_string()).unwrap())["n_bits"], 10);
}
