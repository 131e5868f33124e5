//! JSON envelope shared by every subcommand, and its deterministic
//! serialization.

use std::fmt::Write;

use serde_json::{Map, Value};

pub struct Envelope {
    command: &'static str,
    inputs: Map<String, Value>,
    result: Map<String, Value>,
    diagnostics: Map<String, Value>,
    warnings: Vec<String>,
}

impl Envelope {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            inputs: Map::new(),
            result: Map::new(),
            diagnostics: Map::new(),
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_owned(), v.into());
        self
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.result.insert(key.to_owned(), v.into());
        self
    }

    pub fn residual(&mut self, r: f64) -> &mut Self {
        self.diagnostics.insert("residual".into(), num(r));
        self
    }

    /// A non-finite condition number is serialized as `null` and flagged.
    pub fn condition_number(&mut self, c: f64) -> &mut Self {
        self.diagnostics.insert("condition_number".into(), num(c));
        if !c.is_finite() {
            self.diagnostics.insert("condition_overflow".into(), Value::Bool(true));
        }
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) -> &mut Self {
        self.warnings.push(w.into());
        self
    }

    pub fn into_value(self) -> Value {
        let mut diagnostics = self.diagnostics;
        diagnostics.insert(
            "warnings".into(),
            Value::Array(self.warnings.into_iter().map(Value::String).collect()),
        );
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.into()));
        root.insert("inputs".into(), Value::Object(self.inputs));
        root.insert("result".into(), Value::Object(self.result));
        root.insert("diagnostics".into(), Value::Object(diagnostics));
        Value::Object(root)
    }

    pub fn render(self) -> String {
        let mut out = String::new();
        write_value(&mut out, &self.into_value(), 0);
        out.push('\n');
        out
    }
}

/// Finite floats become JSON numbers, everything else `null`.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// `%.17g`: shortest of fixed and exponent notation at 17 significant
/// digits, trailing zeros removed.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_owned()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_u64() || n.is_i64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&format_g17(n.as_f64().expect("finite float")));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                write_value(out, item, indent + 1);
            }
            newline(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            let mut entries: Vec<_> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            for (i, (k, item)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                let _ = write!(out, "{}: ", Value::String(k.clone()));
                write_value(out, item, indent + 1);
            }
            newline(out, indent);
            out.push('}');
        }
    }
}

fn newline(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}
