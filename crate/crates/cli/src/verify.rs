use serde::Serialize;
use serde_json::Value;

use crate::scenario::Expectation;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub label: String,
    pub path: String,
    pub measured: Value,
    pub expected: String,
    pub pass: bool,
}

/// Number, or modulus of a `[re, im]` pair when `modulus` is set.
fn numeric(v: &Value, modulus: bool) -> Option<f64> {
    if let Some(x) = v.as_f64() {
        return Some(x);
    }
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) if modulus => Some(re.as_f64()?.hypot(im.as_f64()?)),
        _ => None,
    }
}

pub fn check(report: &Value, e: &Expectation) -> CheckResult {
    let target = report.pointer(&e.path);
    let measured = target.cloned().unwrap_or(Value::Null);
    let (expected, pass) = if let (Some(v), Some(tol)) = (e.value, e.tol) {
        let ok = target.and_then(|t| numeric(t, false)).is_some_and(|x| (x - v).abs() <= tol);
        (format!("{v} ± {tol:e}"), ok)
    } else if let Some(want) = &e.equals {
        (want.to_string(), target == Some(want))
    } else if let Some(bound) = e.below {
        let ok = target.and_then(|t| numeric(t, true)).is_some_and(|x| x < bound);
        (format!("< {bound}"), ok)
    } else if let Some(bound) = e.above {
        let ok = target.and_then(|t| numeric(t, true)).is_some_and(|x| x > bound);
        (format!("> {bound}"), ok)
    } else {
        unreachable!("expectations are validated at load time")
    };
    CheckResult {
        label: e.label.clone().unwrap_or_else(|| e.path.clone()),
        path: e.path.clone(),
        measured,
        expected,
        pass,
    }
}

/// Compact rendering of a measured value.
pub fn show(v: &Value) -> String {
    match v {
        Value::Null => "missing".into(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.10}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number) => {
            let (re, im) = (a[0].as_f64().unwrap_or(f64::NAN), a[1].as_f64().unwrap_or(f64::NAN));
            format!("{re:.10} {} {:.10}i", if im < 0.0 { '-' } else { '+' }, im.abs())
        }
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn exp(path: &str) -> Expectation {
        Expectation {
            path: path.into(),
            label: None,
            value: None,
            tol: None,
            equals: None,
            below: None,
            above: None,
        }
    }

    #[test]
    fn tolerance_check() {
        let r = json!({"x": {"y": 2.00005}});
        let e = Expectation {
            value: Some(2.0),
            tol: Some(1e-4),
            ..exp("/x/y")
        };
        assert!(check(&r, &e).pass);
        let e = Expectation {
            tol: Some(1e-6),
            ..e
        };
        assert!(!check(&r, &e).pass);
    }

    #[test]
    fn missing_path_fails() {
        let e = Expectation {
            equals: Some(json!("finite_shift")),
            ..exp("/nope")
        };
        let c = check(&json!({}), &e);
        assert!(!c.pass);
        assert_eq!(c.measured, Value::Null);
    }

    #[test]
    fn bounds_use_modulus_of_pairs() {
        let r = json!({"z": [3.0, 4.0]});
        assert!(check(&r, &Expectation { below: Some(5.1), ..exp("/z") }).pass);
        assert!(!check(&r, &Expectation { below: Some(4.9), ..exp("/z") }).pass);
        assert!(check(&r, &Expectation { above: Some(4.9), ..exp("/z") }).pass);
        // a pair is not a scalar for tolerance checks
        assert!(!check(&r, &Expectation { value: Some(5.0), tol: Some(1.0), ..exp("/z") }).pass);
    }

    #[test]
    fn equality_on_strings() {
        let r = json!({"c": "log_divergent"});
        assert!(check(&r, &Expectation { equals: Some(json!("log_divergent")), ..exp("/c") }).pass);
    }
}
