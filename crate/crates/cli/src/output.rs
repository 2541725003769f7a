use std::fmt;

use serde_json::{json, Value};

pub const SCHEMA: &str = "xp/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Rejected,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Rejected => "rejected",
            Status::Error => "error",
        })
    }
}

/// What a subcommand produced.
#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    pub fn ok(payload: Value) -> Self {
        Outcome { status: Status::Ok, payload, diagnostics: Vec::new() }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn note(mut self, msg: impl Into<String>) -> Self {
        self.diagnostics.push(msg.into());
        self
    }
}

/// Why a subcommand stopped, with its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or malformed input.
    Usage(String),
    /// The input violates a hypothesis the computation relies on.
    Rejected(String),
    /// A numerical method did not reach its target.
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Rejected(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn into_outcome(self) -> (Outcome, i32) {
        let code = self.exit_code();
        let (status, msg) = match self {
            Failure::Rejected(m) => (Status::Rejected, m),
            Failure::Usage(m) | Failure::Numerical(m) => (Status::Error, m),
        };
        (Outcome { status, payload: Value::Null, diagnostics: vec![msg] }, code)
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Ok => 0,
        Status::Rejected => 2,
        Status::Error => 3,
    }
}

pub fn envelope(o: &Outcome) -> Value {
    json!({
        "schema": SCHEMA,
        "status": o.status.to_string(),
        "payload": o.payload,
        "diagnostics": o.diagnostics,
    })
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Two-column `key,value` rendering of the envelope with nested keys joined by dots.
pub fn to_csv(o: &Outcome) -> String {
    let mut rows = Vec::new();
    flatten("", &envelope(o), &mut rows);
    let mut s = String::from("key,value\n");
    for (k, v) in rows {
        s.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
    }
    s
}
