//! Reports: ordered key/value fields rendered as text or JSON.

use serde_json::{Map, Value};

use crate::input::InputDigest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub fields: Vec<(String, Value)>,
    pub budget: u64,
    pub timing_ms: Option<u128>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Vec::new(),
            fields: Vec::new(),
            budget: 0,
            timing_ms: None,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.to_string(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::from(self.command.clone()));
        m.insert(
            "inputs".into(),
            serde_json::to_value(&self.inputs).expect("digests serialize"),
        );
        let mut result = Map::new();
        for (k, v) in &self.fields {
            result.insert(k.clone(), v.clone());
        }
        m.insert("result".into(), Value::Object(result));
        m.insert("budget".into(), Value::from(self.budget));
        if let Some(t) = self.timing_ms {
            m.insert("timing_ms".into(), Value::from(t as u64));
        }
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.to_text(),
        }
    }

    fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for i in &self.inputs {
            out.push_str(&format!("input {}: {} sha256:{}\n", i.role, i.file, i.sha256));
        }
        for (k, v) in &self.fields {
            match v {
                Value::Array(items) if items.iter().all(|x| !x.is_array()) => {
                    out.push_str(&format!("{k}:\n"));
                    for x in items {
                        out.push_str(&format!("  - {}\n", scalar(x)));
                    }
                }
                _ => out.push_str(&format!("{k}: {}\n", scalar(v))),
            }
        }
        out.push_str(&format!("budget: {}\n", self.budget));
        if let Some(t) = self.timing_ms {
            out.push_str(&format!("timing: {t} ms\n"));
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}={}", scalar(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}
