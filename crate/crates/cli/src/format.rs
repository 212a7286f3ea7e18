//! Deterministic number formatting shared by every output format.

use serde_json::Value;

pub const SIG_DIGITS: usize = 12;

/// `x` with 12 significant digits, trailing zeros removed; scientific
/// notation outside `[1e-5, 1e12)`.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{exp}", trim(mantissa));
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let rounded: f64 = sig(x).parse().expect("formatted float parses");
            *v = serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("output types serialize");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(1.0), "1");
        assert_eq!(sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig(2.0 / 15.0), "0.133333333333");
        assert_eq!(sig(-12.5), "-12.5");
        assert_eq!(sig(123456.7890123456), "123456.789012");
        assert_eq!(sig(1.5e-7), "1.5e-7");
        assert_eq!(sig(0.000123), "0.000123");
    }

    #[test]
    fn json_floats_are_rounded() {
        let mut v = serde_json::json!({"a": 0.1 + 0.2, "b": [1, 2.0 / 3.0], "c": "x"});
        round_floats(&mut v);
        assert_eq!(v["a"], serde_json::json!(0.3));
        assert_eq!(v["b"][0], serde_json::json!(1));
        assert_eq!(v["b"][1].as_f64().unwrap(), 0.666666666667);
    }
}
