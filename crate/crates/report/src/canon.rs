//! Canonical formatting primitives shared by every emitter.

/// JSON-escape a string, quotes included.
pub fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Fixed three-decimal metric formatting. Negative zero is normalized so a
/// value's sign can never depend on rounding direction.
pub fn fmt_metric(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// `null` for absent metrics, three decimals otherwise.
pub fn fmt_opt_metric(v: Option<f64>) -> String {
    match v {
        Some(v) => fmt_metric(v),
        None => "null".to_string(),
    }
}
