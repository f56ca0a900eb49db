//! Human and machine reports. The exit code depends on the verdict only.

use std::fmt;

use catlift_core::transform::KanCaps;
use catlift_core::Bounds;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// A command that produces data rather than a yes/no answer.
    Ok,
    Valid,
    Invalid,
    Holds,
    Fails,
    Inconclusive,
    /// Usage, input or parse error.
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok | Outcome::Valid | Outcome::Holds => 0,
            Outcome::Invalid | Outcome::Fails => 1,
            Outcome::Inconclusive => 2,
            Outcome::Error => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Ok => "ok",
            Outcome::Valid => "valid",
            Outcome::Invalid => "invalid",
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Outcome> {
        [
            Outcome::Ok,
            Outcome::Valid,
            Outcome::Invalid,
            Outcome::Holds,
            Outcome::Fails,
            Outcome::Inconclusive,
            Outcome::Error,
        ]
        .into_iter()
        .find(|o| o.as_str() == s)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every cap that can influence a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub bounds: Bounds,
    pub kan: KanCaps,
}

impl Caps {
    pub fn to_json(self) -> Value {
        json!({
            "homCap": self.bounds.hom_cap,
            "pathBound": self.bounds.path_bound,
            "rewriteCap": self.bounds.rewrite_cap,
            "etaCap": self.kan.eta_cap,
            "functorCap": self.kan.functor_cap,
            "carrierCap": self.kan.carrier_cap,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub verdict: Outcome,
    pub witnesses: Vec<Value>,
    pub caps: Caps,
    pub details: Value,
    /// Human-readable body, printed without `--json`.
    pub text: String,
}

impl Report {
    pub fn new(command: &str, caps: Caps) -> Self {
        Report {
            command: command.to_string(),
            verdict: Outcome::Ok,
            witnesses: Vec::new(),
            caps,
            details: json!({}),
            text: String::new(),
        }
    }

    pub fn error(command: &str, caps: Caps, message: impl fmt::Display) -> Self {
        let message = message.to_string();
        let mut r = Report::new(command, caps);
        r.verdict = Outcome::Error;
        r.details = json!({ "message": message });
        r.text = format!("error: {message}\n");
        r
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "verdict": self.verdict.as_str(),
            "witnesses": self.witnesses,
            "capsInForce": self.caps.to_json(),
            "details": self.details,
        })
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    /// Human form: the body followed by a verdict line.
    pub fn render_text(&self) -> String {
        let mut out = self.text.clone();
        if self.verdict != Outcome::Ok && self.verdict != Outcome::Error {
            out.push_str(&format!("verdict: {}\n", self.verdict));
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("plain JSON values");
        s.push('\n');
        s
    }
}

/// Exit code recomputed from a serialized report.
pub fn exit_code_of_json(report: &Value) -> Option<i32> {
    let verdict = report.get("verdict")?.as_str()?;
    Outcome::parse(verdict).map(Outcome::exit_code)
}
