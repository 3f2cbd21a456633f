use limitless::numeric::Rational;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::{GlobalOpts, OutputFormat};

/// Report schema version, emitted as the top-level `"schema"` field.
pub const SCHEMA: u32 = 1;

/// Decimal digits in display-only renderings.
const DISPLAY_DIGITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success,
    Violation,
    Inconclusive,
    Usage,
}

impl Exit {
    pub fn code(self) -> i32 {
        match self {
            Exit::Success => 0,
            Exit::Violation => 1,
            Exit::Inconclusive => 2,
            Exit::Usage => 64,
        }
    }
}

/// A finished command: exit status plus the report in every format.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: Exit,
    pub json: Map<String, Value>,
    pub text: String,
    pub csv: Option<String>,
    pub stderr: String,
}

impl Outcome {
    pub(crate) fn new(exit: Exit, text: String) -> Self {
        Outcome {
            exit,
            json: Map::new(),
            text,
            csv: None,
            stderr: String::new(),
        }
    }

    pub(crate) fn usage_error(message: String) -> Self {
        let mut outcome = Outcome::new(Exit::Usage, String::new());
        outcome
            .json
            .insert("error".into(), Value::String(message.clone()));
        outcome.stderr = format!("error: {message}\n");
        outcome
    }

    pub(crate) fn field(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("reports serialize to JSON");
        self.json.insert(key.to_string(), value);
        self
    }

    /// Adds a decimal rendering under `"display"`; such values are marked
    /// `display_only` and never used for decisions.
    pub(crate) fn display(mut self, key: &str, value: &Rational) -> Self {
        let display = self
            .json
            .entry("display")
            .or_insert_with(|| serde_json::json!({ "display_only": true }));
        display[key] = Value::String(value.to_decimal_string(DISPLAY_DIGITS));
        self
    }

    pub(crate) fn finish(mut self, command: &str, opts: &GlobalOpts) -> Self {
        self.json.insert("schema".into(), SCHEMA.into());
        self.json.insert("command".into(), command.into());
        self.json
            .insert("exit_code".into(), self.exit.code().into());
        self.json
            .insert("precision_bits".into(), opts.precision_bits.into());
        if opts.output == OutputFormat::CsvPlot && self.csv.is_none() && self.exit != Exit::Usage {
            return Outcome::usage_error(format!(
                "--output csv-plot is not available for {command}"
            ))
            .finish(
                command,
                &GlobalOpts {
                    output: OutputFormat::Text,
                    ..opts.clone()
                },
            );
        }
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.text.clone(),
            OutputFormat::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.json).expect("reports serialize to JSON");
                s.push('\n');
                s
            }
            OutputFormat::CsvPlot => self.csv.clone().unwrap_or_default(),
        }
    }
}

pub(crate) fn decimal(value: &Rational) -> String {
    value.to_decimal_string(12)
}
