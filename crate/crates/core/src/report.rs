//! Output formatting shared by the table writers and the command line.

use serde::Serialize;
use serde_json::Value;

/// Twelve significant digits, the CSV convention.
pub fn csv_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.11e}", x);
    // trim trailing zeros of the mantissa: 1.50000000000e3 -> 1.5e3
    match s.split_once('e') {
        Some((mant, exp)) => {
            let mant = if mant.contains('.') {
                mant.trim_end_matches('0').trim_end_matches('.')
            } else {
                mant
            };
            let exp: i32 = exp.parse().unwrap_or(0);
            if (-5..=11).contains(&exp) {
                // plain notation when it is not longer than the exponent form
                let v: f64 = format!("{mant}e{exp}").parse().unwrap_or(x);
                let plain = format!("{v}");
                if plain.len() <= 20 {
                    return plain;
                }
            }
            format!("{mant}e{exp}")
        }
        None => s,
    }
}

/// JSON document with a leading `generated_at` timestamp.
pub fn json_document<T: Serialize>(command: &str, body: &T) -> serde_json::Result<String> {
    let mut map = serde_json::Map::new();
    map.insert("command".into(), Value::String(command.into()));
    map.insert(
        "generated_at".into(),
        Value::String(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
    );
    map.insert("result".into(), serde_json::to_value(body)?);
    let mut s = serde_json::to_string_pretty(&Value::Object(map))?;
    s.push('\n');
    Ok(s)
}

/// Removes the `generated_at` field so two runs can be compared byte for byte.
pub fn strip_timestamp(doc: &str) -> String {
    doc.lines()
        .filter(|l| !l.trim_start().starts_with("\"generated_at\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_have_twelve_digits() {
        assert_eq!(csv_num(1.0), "1");
        assert_eq!(csv_num(0.5), "0.5");
        assert_eq!(csv_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(csv_num(-2.5e-9), "-2.5e-9");
        assert_eq!(csv_num(0.0), "0");
        let v: f64 = csv_num(std::f64::consts::PI).parse().unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn timestamp_is_stripped() {
        let doc = json_document("x", &serde_json::json!({"a": 1})).unwrap();
        let stripped = strip_timestamp(&doc);
        assert!(!stripped.contains("generated_at"));
        assert!(stripped.contains("\"a\": 1"));
    }
}
