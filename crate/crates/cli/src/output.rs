use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage".into(),
            message: message.into(),
            exit: 2,
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self {
            kind: "invalid_input".into(),
            message: message.into(),
            exit: 1,
        }
    }
}

impl From<triangle_map::Error> for CliError {
    fn from(e: triangle_map::Error) -> Self {
        let debug = format!("{e:?}");
        let name = debug
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("Error");
        Self {
            kind: snake_case(name),
            message: e.to_string(),
            exit: 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            kind: "io".into(),
            message: e.to_string(),
            exit: 1,
        }
    }
}

fn snake_case(s: &str) -> String {
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if c.is_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

pub type CliResult<T> = Result<T, CliError>;

pub fn report_error(e: &CliError) -> ExitCode {
    let body = serde_json::json!({
        "schema": SCHEMA,
        "error": { "kind": e.kind, "message": e.message },
    });
    println!("{body}");
    eprintln!("trimap: {}", e.message.lines().next().unwrap_or(""));
    ExitCode::from(e.exit)
}

/// A rendered payload: JSON always, plus optional command-specific CSV and
/// plain-text renderings.
pub struct Payload {
    pub json: Value,
    pub csv: Option<Vec<Vec<String>>>,
    pub plain: Option<String>,
}

impl Payload {
    pub fn new<T: Serialize>(command: &str, body: &T) -> CliResult<Self> {
        let mut json = serde_json::to_value(body)
            .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
        let mut envelope = serde_json::Map::new();
        envelope.insert("schema".into(), Value::from(SCHEMA));
        envelope.insert("command".into(), Value::from(command));
        if let Value::Object(fields) = &mut json {
            envelope.append(fields);
        } else {
            envelope.insert("result".into(), json);
        }
        Ok(Self {
            json: Value::Object(envelope),
            csv: None,
            plain: None,
        })
    }

    pub fn with_csv(mut self, rows: Vec<Vec<String>>) -> Self {
        self.csv = Some(rows);
        self
    }

    pub fn with_plain(mut self, text: String) -> Self {
        self.plain = Some(text);
        self
    }

    fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)
                    .map_err(|e| CliError::input(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let rows = match &self.csv {
                    Some(r) => r.clone(),
                    None => key_value_rows(&self.json),
                };
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in rows {
                    w.write_record(&r).map_err(|e| CliError::input(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::input(e.to_string()))
            }
            Format::Plain => Ok(match &self.plain {
                Some(p) => format!("{p}\n"),
                None => key_value_rows(&self.json)
                    .into_iter()
                    .map(|r| format!("{}: {}\n", r[0], r[1]))
                    .collect(),
            }),
        }
    }

    pub fn emit(&self, format: Format, path: Option<&Path>) -> CliResult<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => fs::write(p, text)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }
}

/// `key,value` rows for every top-level field; nested values stay JSON.
fn key_value_rows(json: &Value) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["key".to_string(), "value".to_string()]];
    if let Value::Object(map) = json {
        for (k, v) in map {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            rows.push(vec![k.clone(), v]);
        }
    }
    rows
}
