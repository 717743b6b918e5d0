use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use incompat_core::json::{to_json_string, DomainObject, JsonError};
use incompat_core::objects::ObjectError;
use incompat_core::robustness::RobustnessError;
use incompat_core::theorems::sig12;
use serde::Serialize;
use serde_json::Value;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(m: impl Display) -> Self {
        Self { code: EXIT_USAGE, message: m.to_string() }
    }

    pub fn invalid(m: impl Display) -> Self {
        Self { code: EXIT_INVALID, message: m.to_string() }
    }
}

impl From<JsonError> for Failure {
    fn from(e: JsonError) -> Self {
        Self::usage(e)
    }
}

impl From<ObjectError> for Failure {
    fn from(e: ObjectError) -> Self {
        Self::invalid(e)
    }
}

impl From<RobustnessError> for Failure {
    fn from(e: RobustnessError) -> Self {
        Self::invalid(e)
    }
}

pub type Outcome = Result<u8, Failure>;

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), Failure> {
    let mut body = text.to_owned();
    body.push('\n');
    std::fs::write(path, body).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = sig12(n.as_f64().expect("checked float"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with floats at report precision.
pub fn report_string(value: &impl Serialize) -> String {
    let v = serde_json::to_value(value).expect("plain data serializes");
    serde_json::to_string_pretty(&round_floats(v)).expect("plain data serializes")
}

/// Writes a line to stdout; a closed pipe is not an error worth a panic.
pub fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

pub fn print_report(value: &impl Serialize) {
    say(&report_string(value));
}

/// Object files keep full precision so that they round-trip exactly.
pub fn emit_object(o: &DomainObject, out: Option<&Path>) -> Result<(), Failure> {
    let text = to_json_string(o);
    match out {
        Some(p) => write(p, &text),
        None => {
            say(&text);
            Ok(())
        }
    }
}

/// `dir/stem-suffix.json` next to `out`.
pub fn sibling(out: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}-{suffix}.json"))
}
