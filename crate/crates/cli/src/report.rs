use std::time::Duration;

use serde_json::{json, Map, Value};

/// Structured result of one command. Keys serialize in sorted order, so
/// identical runs give identical output once timing is disabled.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub result: Value,
    /// Human-readable rendering of `result` for the plain text mode.
    pub text: String,
    pub sizes: Map<String, Value>,
    pub wall_time: Option<Duration>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Map::new(),
            result: Value::Null,
            text: String::new(),
            sizes: Map::new(),
            wall_time: None,
        }
    }

    pub fn input(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), v.into());
        self
    }

    pub fn size(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.sizes.insert(key.to_string(), v.into());
        self
    }

    pub fn boolean(mut self, b: bool) -> Self {
        self.result = Value::Bool(b);
        self.text = b.to_string();
        self
    }

    pub fn result(mut self, v: Value, text: impl Into<String>) -> Self {
        self.result = v;
        self.text = text.into();
        self
    }

    pub fn to_json(&self) -> String {
        let v = json!({
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "sizes": self.sizes,
            "wall_time_ms": self.wall_time.map(|d| d.as_secs_f64() * 1000.0),
        });
        serde_json::to_string_pretty(&v).expect("plain JSON values")
    }
}
