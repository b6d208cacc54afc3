//! Systems under test: outcome model, descriptors and the built-in corpus.

mod bmi;
mod bytecount;
mod date;
mod external;
mod float;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::{InputTuple, SutValue};

pub use bmi::{bmi_classification, bmi_value};
pub use bytecount::{bytecount, to_f64_nearest};
pub use date::date_ctor;
pub use external::{run_external, ExternalCommand, DEFAULT_TIMEOUT};
pub use float::{format_fixed1, format_shortest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Valid,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    BoundsError,
    ArgumentError,
    DomainError,
    /// An external command exited with a nonzero status.
    CommandError,
}

impl ErrorKind {
    pub fn type_name(self) -> &'static str {
        match self {
            ErrorKind::BoundsError => "BoundsError",
            ErrorKind::ArgumentError => "ArgumentError",
            ErrorKind::DomainError => "DomainError",
            ErrorKind::CommandError => "CommandError",
        }
    }

    fn from_type_name(name: &str) -> Option<Self> {
        match name {
            "BoundsError" => Some(ErrorKind::BoundsError),
            "ArgumentError" => Some(ErrorKind::ArgumentError),
            "DomainError" => Some(ErrorKind::DomainError),
            "CommandError" => Some(ErrorKind::CommandError),
            _ => None,
        }
    }
}

/// Structured details of a captured error.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ErrorPayload {
    /// An indexed access out of bounds: the accessed collection and the index.
    Bounds { accessed: String, index: String },
    Message { message: String },
}

/// Result of running a SUT on one input: a rendered return value or a
/// captured error. Errors are data, never propagated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExecutionOutcome {
    status: Status,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error_kind: Option<ErrorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error_payload: Option<ErrorPayload>,
}

impl ExecutionOutcome {
    pub fn valid(text: impl Into<String>) -> Self {
        ExecutionOutcome {
            status: Status::Valid,
            text: text.into(),
            error_kind: None,
            error_payload: None,
        }
    }

    pub fn error(kind: ErrorKind, payload: ErrorPayload) -> Self {
        let text = render_error(kind, &payload);
        ExecutionOutcome {
            status: Status::Error,
            text,
            error_kind: Some(kind),
            error_payload: Some(payload),
        }
    }

    pub fn message_error(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self::error(
            kind,
            ErrorPayload::Message {
                message: message.into(),
            },
        )
    }

    pub fn bounds_error(accessed: &str, index: impl fmt::Display) -> Self {
        Self::error(
            ErrorKind::BoundsError,
            ErrorPayload::Bounds {
                accessed: accessed.to_string(),
                index: index.to_string(),
            },
        )
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }

    pub fn is_error(&self) -> bool {
        self.status == Status::Error
    }

    /// Rendered output; for errors the full `Kind("...")` form.
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn error_kind(&self) -> Option<ErrorKind> {
        self.error_kind
    }

    pub fn error_payload(&self) -> Option<&ErrorPayload> {
        self.error_payload.as_ref()
    }

    /// Message of a message-carrying error, if any.
    pub fn error_message(&self) -> Option<&str> {
        match &self.error_payload {
            Some(ErrorPayload::Message { message }) => Some(message),
            _ => None,
        }
    }

    /// Recovers an error outcome from its rendered text, e.g.
    /// `BoundsError("kMGTPE", 7)`. Returns `None` for text that is not an
    /// error rendering.
    pub fn parse_error_text(text: &str) -> Option<Self> {
        let open = text.find('(')?;
        let kind = ErrorKind::from_type_name(&text[..open])?;
        let inner = text[open + 1..].strip_suffix(')')?;
        let (message, rest) = parse_quoted(inner)?;
        let payload = match kind {
            ErrorKind::BoundsError => {
                let index = rest.strip_prefix(", ")?;
                if index.parse::<BigInt>().is_err() {
                    return None;
                }
                ErrorPayload::Bounds {
                    accessed: message,
                    index: index.to_string(),
                }
            }
            _ if rest.is_empty() => ErrorPayload::Message { message },
            _ => return None,
        };
        let outcome = Self::error(kind, payload);
        (outcome.text == text).then_some(outcome)
    }
}

fn render_error(kind: ErrorKind, payload: &ErrorPayload) -> String {
    match payload {
        ErrorPayload::Bounds { accessed, index } => {
            format!("{}({}, {})", kind.type_name(), quote(accessed), index)
        }
        ErrorPayload::Message { message } => format!("{}({})", kind.type_name(), quote(message)),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Parses a leading quoted string, returning its unescaped content and the rest.
fn parse_quoted(s: &str) -> Option<(String, &str)> {
    let mut chars = s.char_indices();
    if chars.next()?.1 != '"' {
        return None;
    }
    let mut out = String::new();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Some((out, &s[i + 1..])),
            '\\' => match chars.next()?.1 {
                'n' => out.push('\n'),
                'r' => out.push('\r'),
                't' => out.push('\t'),
                other => out.push(other),
            },
            c => out.push(c),
        }
    }
    None
}

type BuiltinFn = fn(&[SutValue]) -> ExecutionOutcome;

#[derive(Clone)]
enum Invoke {
    Builtin(BuiltinFn),
    External(Arc<ExternalCommand>),
}

/// A named program with a fixed arity whose invocation never aborts the host.
#[derive(Clone)]
pub struct SutDescriptor {
    name: String,
    argument_types: Vec<String>,
    invoke: Invoke,
}

impl fmt::Debug for SutDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SutDescriptor")
            .field("name", &self.name)
            .field("argument_types", &self.argument_types)
            .finish()
    }
}

/// Names accepted by [`SutDescriptor::from_name`], besides `external:<cmd>`.
pub const BUILTIN_SUTS: &[&str] = &["bytecount", "bmi", "bmi-class", "date"];

impl SutDescriptor {
    fn builtin(name: &str, arity: usize, f: BuiltinFn) -> Self {
        SutDescriptor {
            name: name.to_string(),
            argument_types: vec!["Integer".to_string(); arity],
            invoke: Invoke::Builtin(f),
        }
    }

    pub fn bytecount() -> Self {
        Self::builtin("bytecount", 1, |a| bytecount(&a[0]))
    }

    pub fn bmi_value() -> Self {
        Self::builtin("bmi", 2, |a| bmi_value(&a[0], &a[1]))
    }

    pub fn bmi_classification() -> Self {
        Self::builtin("bmi-class", 2, |a| bmi_classification(&a[0], &a[1]))
    }

    pub fn date() -> Self {
        Self::builtin("date", 3, |a| date_ctor(&a[0], &a[1], &a[2]))
    }

    /// Wraps an external command taking `arity` integer arguments.
    pub fn external(command: ExternalCommand, arity: usize) -> Self {
        SutDescriptor {
            name: format!("external:{}", command.command_line()),
            argument_types: vec!["Integer".to_string(); arity],
            invoke: Invoke::External(Arc::new(command)),
        }
    }

    /// Looks up a built-in SUT by name, or builds an external one from
    /// `external:<command line>`.
    pub fn from_name(name: &str, external_arity: usize) -> Result<Self> {
        match name {
            "bytecount" => Ok(Self::bytecount()),
            "bmi" | "bmi-value" | "bmi_value" => Ok(Self::bmi_value()),
            "bmi-class" | "bmi_classification" => Ok(Self::bmi_classification()),
            "date" => Ok(Self::date()),
            other => match other.strip_prefix("external:") {
                Some(cmd) => Ok(Self::external(ExternalCommand::parse(cmd)?, external_arity)),
                None => Err(Error::Config(format!(
                    "unknown SUT {other:?} (expected one of {} or external:<cmd>)",
                    BUILTIN_SUTS.join(", ")
                ))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.argument_types.len()
    }

    pub fn argument_types(&self) -> &[String] {
        &self.argument_types
    }

    /// Runs the SUT. A wrong-arity input yields an `ArgumentError` outcome.
    pub fn execute(&self, input: &InputTuple) -> ExecutionOutcome {
        if input.arity() != self.arity() {
            return ExecutionOutcome::message_error(
                ErrorKind::ArgumentError,
                format!(
                    "{} expects {} arguments, got {}",
                    self.name,
                    self.arity(),
                    input.arity()
                ),
            );
        }
        match &self.invoke {
            Invoke::Builtin(f) => f(input.values()),
            Invoke::External(cmd) => run_external(cmd, input),
        }
    }
}

/// Free-function form of [`SutDescriptor::execute`].
pub fn execute(sut: &SutDescriptor, input: &InputTuple) -> ExecutionOutcome {
    sut.execute(input)
}

/// Text form of a value, `false`/`true` for booleans.
pub fn render_value(v: &SutValue) -> String {
    v.render()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(vals: &[i64]) -> InputTuple {
        vals.iter().copied().collect()
    }

    #[test]
    fn execute_examples() {
        let out = SutDescriptor::bytecount().execute(&input(&[1000]));
        assert_eq!(out.text(), "1.0 kB");
        assert!(out.is_valid());

        let out = SutDescriptor::date().execute(&input(&[0, 2, 0]));
        assert!(out.is_error());
        assert_eq!(out.error_kind(), Some(ErrorKind::ArgumentError));
        assert_eq!(out.error_message(), Some("Day: 0 out of range (1:29)"));

        let out = SutDescriptor::bmi_value().execute(&input(&[0, 0]));
        assert_eq!(out.text(), "NaN");
    }

    #[test]
    fn wrong_arity_is_an_outcome() {
        let out = SutDescriptor::date().execute(&input(&[1]));
        assert!(out.is_error());
    }

    #[test]
    fn error_text_round_trip() {
        let e = ExecutionOutcome::bounds_error("kMGTPE", 7);
        assert_eq!(e.text(), "BoundsError(\"kMGTPE\", 7)");
        assert_eq!(ExecutionOutcome::parse_error_text(e.text()), Some(e));

        let e = ExecutionOutcome::message_error(ErrorKind::CommandError, "bad \"x\"\n");
        assert_eq!(ExecutionOutcome::parse_error_text(e.text()), Some(e));

        assert_eq!(ExecutionOutcome::parse_error_text("1.0 kB"), None);
        assert_eq!(ExecutionOutcome::parse_error_text("Foo(\"x\")"), None);
    }

    #[test]
    fn unknown_sut_rejected() {
        assert!(SutDescriptor::from_name("nope", 1).is_err());
        assert_eq!(SutDescriptor::from_name("bmi-class", 1).unwrap().arity(), 2);
    }

    #[test]
    fn builtin_suts_are_deterministic() {
        for name in BUILTIN_SUTS {
            let sut = SutDescriptor::from_name(name, 1).unwrap();
            let i: InputTuple = (0..sut.arity() as i64).map(|x| x * 37 - 5).collect();
            assert_eq!(sut.execute(&i), sut.execute(&i));
        }
    }
}
