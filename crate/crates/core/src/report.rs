//! Canonical JSON: sorted keys, big integers as decimal strings, floats
//! rounded to 12 significant digits, non-finite floats as `null`.

use num_bigint::BigUint;
use serde::{Serialize, Serializer};
use serde_json::Value;

/// Significant digits kept for every float in a report.
pub const FLOAT_DIGITS: usize = 12;

/// `serialize_with` helper writing a big integer as a decimal string.
pub fn decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            *v = serde_json::Number::from_f64(round_significant(x, FLOAT_DIGITS))
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// The canonical value tree of a report.
pub fn to_canonical_value<T: Serialize>(value: &T) -> serde_json::Result<Value> {
    let mut v = serde_json::to_value(value)?;
    canonicalize(&mut v);
    Ok(v)
}

/// Canonical single-line JSON. Identical inputs give identical bytes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json's default map is ordered by key
    serde_json::to_string(&to_canonical_value(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        zeta: f64,
        #[serde(serialize_with = "decimal")]
        big: BigUint,
        alpha: Vec<f64>,
    }

    #[test]
    fn keys_sorted_and_floats_rounded() {
        let s = Sample {
            zeta: 1.0 / 3.0,
            big: BigUint::from(10u32).pow(30),
            alpha: vec![f64::NAN, 2.5, 0.1 + 0.2],
        };
        let json = to_canonical_json(&s).unwrap();
        assert_eq!(
            json,
            r#"{"alpha":[null,2.5,0.3],"big":"1000000000000000000000000000000","zeta":0.333333333333}"#
        );
    }

    #[test]
    fn rounding() {
        assert_eq!(round_significant(123456.7890123456, 12), 123456.789012);
        assert_eq!(round_significant(0.0, 12), 0.0);
        assert!(round_significant(f64::INFINITY, 12).is_infinite());
    }
}
