//! Reports: an ordered tree of fields printed as text or JSON.
//!
//! Floats are rounded to 12 significant digits before either rendering, so
//! the two forms agree and repeated runs are byte-identical.

use planefix::Point2;
use serde_json::{Map, Number, Value};

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// `%.12g`-style text: plain notation for moderate magnitudes, scientific
/// otherwise, trailing zeros removed.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.into() }
}

pub fn num(x: f64) -> Value {
    Number::from_f64(sig12(x)).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

pub fn point(p: Point2) -> Value {
    Value::Array(vec![num(p.x), num(p.y)])
}

/// Builder for an object with fields in insertion order.
#[derive(Debug, Default, Clone)]
pub struct Report(Map<String, Value>);

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.into(), value.into());
        self
    }

    pub fn num(&mut self, key: &str, x: f64) -> &mut Self {
        self.set(key, num(x))
    }

    pub fn point(&mut self, key: &str, p: Point2) -> &mut Self {
        self.set(key, point(p))
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }

    pub fn render(self, json: bool) -> String {
        let v = self.into_value();
        if json {
            let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
            s.push('\n');
            s
        } else {
            let mut out = String::new();
            text(&v, 0, &mut out);
            out
        }
    }
}

impl From<Report> for Value {
    fn from(r: Report) -> Value {
        r.into_value()
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_i64() {
            Some(i) => i.to_string(),
            None => fmt_sig12(n.as_f64().unwrap_or(f64::NAN)),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| matches!(i, Value::Number(_))) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            Some(format!("({})", parts.join(", ")))
        }
        _ => None,
    }
}

fn text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(fields) => {
            for (k, field) in fields {
                match scalar(field) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text(field, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        text(item, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
