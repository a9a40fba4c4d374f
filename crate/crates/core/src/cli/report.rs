//! Command reports: canonical JSON and a plain-text rendering.

use serde_json::{json, Map, Value};

/// Outcome of a command, serialized with keys in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub input: Value,
    pub mode: &'static str,
    pub result: Value,
    /// Short verdict for deciding commands.
    pub decision: Option<String>,
    /// A mathematically negative verdict (exit code 1).
    pub negative: bool,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            input: Value::Null,
            mode: "exact",
            result: Value::Null,
            decision: None,
            negative: false,
            warnings: Vec::new(),
            error: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.negative {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), json!(self.command));
        obj.insert("input".into(), self.input.clone());
        obj.insert("mode".into(), json!(self.mode));
        obj.insert("result".into(), self.result.clone());
        obj.insert("decision".into(), json!(self.decision));
        obj.insert("warnings".into(), json!(self.warnings));
        obj.insert("error".into(), json!(self.error));
        Value::Object(obj)
    }

    /// Pretty JSON with a trailing newline.
    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out += &format!("command: {} ({})\n", self.command, self.mode);
        if let Some(e) = &self.error {
            out += &format!("error: {e}\n");
        }
        if !self.result.is_null() {
            write_value(&mut out, &self.result, 0);
        }
        if let Some(d) = &self.decision {
            out += &format!("decision: {d}\n");
        }
        for w in &self.warnings {
            out += &format!("warning: {w}\n");
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn inline_array(items: &[Value]) -> String {
    let parts: Vec<String> = items
        .iter()
        .map(|x| match x {
            Value::Array(inner) if inner.iter().all(is_flat) => inline_array(inner),
            other => scalar(other),
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Array(items) if items.iter().all(is_flat) => {
                        *out += &format!("{pad}{k}: {}\n", inline_array(items));
                    }
                    Value::Array(items)
                        if items
                            .iter()
                            .all(|r| matches!(r, Value::Array(c) if c.iter().all(is_flat))) =>
                    {
                        *out += &format!("{pad}{k}:\n");
                        for row in items {
                            let Value::Array(cells) = row else {
                                unreachable!()
                            };
                            let cells: Vec<String> = cells.iter().map(scalar).collect();
                            *out += &format!("{pad}  {}\n", cells.join("  "));
                        }
                    }
                    Value::Array(items) => {
                        *out += &format!("{pad}{k}:\n");
                        for item in items {
                            if is_flat(item) {
                                *out += &format!("{pad}  - {}\n", scalar(item));
                            } else {
                                *out += &format!("{pad}  -\n");
                                write_value(out, item, depth + 2);
                            }
                        }
                    }
                    Value::Object(_) => {
                        *out += &format!("{pad}{k}:\n");
                        write_value(out, x, depth + 1);
                    }
                    flat => *out += &format!("{pad}{k}: {}\n", scalar(flat)),
                }
            }
        }
        other => *out += &format!("{pad}{}\n", scalar(other)),
    }
}
