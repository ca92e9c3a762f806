//! Fixed-precision float text and the canonical JSON form used for digests.

use serde_json::Value;
use sha2::{Digest, Sha256};

/// Formats `x` with 17 significant digits, which round-trips every finite `f64`.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of digests
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// Serializes `value` with sorted object keys, no whitespace and every
/// number rendered through [`fmt17`].
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => out.push_str(&u.to_string()),
            (None, Some(i)) => out.push_str(&i.to_string()),
            _ => out.push_str(&fmt17(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_canonical(&map[key], out);
            }
            out.push('}');
        }
    }
}

/// Lower-case hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn fmt17_round_trips() {
        for x in [1.0, -0.1, std::f64::consts::PI, 1e-300, 123_456_789.123_456_79, f64::MAX] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt17(-0.0), fmt17(0.0));
    }

    #[test]
    fn canonical_sorts_keys_and_fixes_floats() {
        let a = json!({"b": 1.5, "a": [1, {"z": null, "y": true}], "c": "x"});
        assert_eq!(
            canonical_json(&a),
            r#"{"a":[1,{"y":true,"z":null}],"b":1.5000000000000000e0,"c":"x"}"#
        );
    }
}
