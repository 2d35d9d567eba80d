use serde_json::{Map, Value};

use rbo_core::io::{to_json, SCHEMA};
use rbo_core::{Error, Report, Result};

use crate::Format;

/// Result of a command before rendering.
pub struct Output {
    pub command: &'static str,
    pub passed: bool,
    pub text: String,
    pub json: Map<String, Value>,
    pub csv: Option<String>,
}

impl Output {
    pub fn new(command: &'static str) -> Self {
        Output {
            command,
            passed: true,
            text: String::new(),
            json: Map::new(),
            csv: None,
        }
    }

    pub fn field(&mut self, key: &str, v: impl serde::Serialize) -> &mut Self {
        self.json
            .insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn line(&mut self, s: impl AsRef<str>) -> &mut Self {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
        self
    }

    /// Record a report: it counts towards the verdict and is listed under "reports".
    pub fn report(&mut self, r: &Report) -> &mut Self {
        self.passed &= r.passed();
        self.text.push_str(&r.to_string());
        let v = serde_json::to_value(r).unwrap_or(Value::Null);
        let mut obj = match v {
            Value::Object(o) => o,
            _ => Map::new(),
        };
        obj.insert("passed".into(), Value::from(r.passed()));
        match self
            .json
            .entry("reports")
            .or_insert_with(|| Value::Array(Vec::new()))
        {
            Value::Array(a) => a.push(Value::Object(obj)),
            _ => unreachable!("reports is always an array"),
        }
        self
    }

    pub fn render(self, format: Format) -> Result<String> {
        match format {
            Format::Text => Ok(self.text),
            Format::Json => {
                let mut root = Map::new();
                root.insert("schema".into(), Value::from(SCHEMA));
                root.insert("command".into(), Value::from(self.command));
                root.insert("passed".into(), Value::from(self.passed));
                root.extend(self.json);
                Ok(to_json(&Value::Object(root))? + "\n")
            }
            Format::Csv => self.csv.ok_or_else(|| {
                Error::Unsupported(format!(
                    "--format csv is not available for {}",
                    self.command
                ))
            }),
        }
    }
}
