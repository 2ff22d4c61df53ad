//! Scenario files.
//!
//! ```text
//! ttc-scenario 1
//! # comment lines may precede the body
//! {
//!   "resources": [{"id": "r1", "quota": 1}],
//!   "agents": [{"id": "a1", "endowment": "r1", "preferences": ["r1"]}],
//!   "params": {"alpha": 0.5},
//!   "expected": {"assignment": {"a1": "r1"}}
//! }
//! ```
//!
//! The first line is the header with the format version. Lines starting with
//! `#` before the body are ignored. The body is a JSON object; unknown
//! fields are rejected. `beta` and `lambda` default to 0.88 and 2.25, and
//! the `expected` block is optional.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Agent, Assignment, Instance, Resource, Violation};
use crate::satisfaction::SatisfactionParams;
use crate::Scalar;

pub const HEADER: &str = "ttc-scenario";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario is not valid UTF-8: {0}")]
    Utf8(#[from] std::str::Utf8Error),
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Optional golden output carried by a scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    /// Agent id to resource id (`null` for unassigned).
    pub assignment: BTreeMap<String, Option<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satisfaction: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_satisfaction: Option<f64>,
    /// Absolute tolerance for satisfaction values; 0.01 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Expected {
    /// Differences between this golden block and an assignment, one message each.
    pub fn compare<F: Scalar>(&self, assignment: &Assignment<F>) -> Vec<String> {
        let tol = self.tolerance.unwrap_or(0.01);
        let mut out = Vec::new();
        let got: BTreeMap<String, Option<String>> = assignment.pairs().into_iter().collect();
        for (agent, want) in &self.assignment {
            match got.get(agent) {
                None => out.push(format!("agent {agent} is missing from the result")),
                Some(have) if have != want => out.push(format!(
                    "agent {agent}: expected {}, got {}",
                    want.as_deref().unwrap_or("-"),
                    have.as_deref().unwrap_or("-")
                )),
                _ => {}
            }
        }
        if let Some(sats) = &self.satisfaction {
            for (agent, want) in sats {
                let have = assignment
                    .placements
                    .iter()
                    .find(|p| p.agent.as_str() == agent)
                    .and_then(|p| p.satisfaction.to_f64());
                match have {
                    Some(h) if (h - want).abs() <= tol => {}
                    Some(h) => out.push(format!("agent {agent}: satisfaction {h:.4}, expected {want}")),
                    None => out.push(format!("agent {agent} is missing from the result")),
                }
            }
        }
        if let Some(want) = self.total_satisfaction {
            let have = assignment.total_satisfaction().to_f64().unwrap_or(f64::NAN);
            if (have - want).abs() > tol {
                out.push(format!("total satisfaction {have:.4}, expected {want}"));
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(
    serialize = "F: Serialize",
    deserialize = "F: crate::Scalar + Deserialize<'de>"
))]
struct Body<F> {
    resources: Vec<Resource>,
    agents: Vec<Agent>,
    params: SatisfactionParams<F>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected: Option<Expected>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioFile<F = f64> {
    pub instance: Instance<F>,
    pub expected: Option<Expected>,
}

impl<F: Scalar + Serialize + DeserializeOwned> ScenarioFile<F> {
    pub fn new(instance: Instance<F>) -> Self {
        Self {
            instance,
            expected: None,
        }
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, ScenarioError> {
        parse(bytes)
    }

    pub fn emit(&self) -> String {
        emit(self)
    }
}

/// Parses and validates a scenario file.
pub fn parse<F: Scalar + DeserializeOwned>(bytes: &[u8]) -> Result<ScenarioFile<F>, ScenarioError> {
    let text = std::str::from_utf8(bytes)?;
    let mut offset = 0;
    let mut header_seen = false;
    let mut body_line = 0;
    for (n, line) in text.split_inclusive('\n').enumerate() {
        let trimmed = line.trim();
        if !header_seen {
            if trimmed.is_empty() {
                offset += line.len();
                continue;
            }
            check_header(trimmed, n + 1)?;
            header_seen = true;
        } else if !(trimmed.is_empty() || trimmed.starts_with('#')) {
            body_line = n;
            break;
        }
        offset += line.len();
        body_line = n + 1;
    }
    if !header_seen {
        return Err(ScenarioError::Header {
            line: 1,
            message: format!("missing '{HEADER} {VERSION}' header"),
        });
    }
    let body: Body<F> = serde_json::from_str(&text[offset..]).map_err(|e| ScenarioError::Syntax {
        line: e.line() + body_line,
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    let instance = Instance::new(body.agents, body.resources, body.params);
    let violations = instance.validate();
    if !violations.is_empty() {
        return Err(ScenarioError::Invalid(violations));
    }
    Ok(ScenarioFile {
        instance,
        expected: body.expected,
    })
}

fn check_header(line: &str, n: usize) -> Result<(), ScenarioError> {
    let mut parts = line.split_whitespace();
    let bad = |message: String| ScenarioError::Header { line: n, message };
    if parts.next() != Some(HEADER) {
        return Err(bad(format!("expected '{HEADER} {VERSION}' header")));
    }
    match parts.next().map(str::parse::<u32>) {
        Some(Ok(VERSION)) => {}
        Some(Ok(v)) => return Err(bad(format!("unsupported format version {v}"))),
        _ => return Err(bad("missing or malformed format version".into())),
    }
    if parts.next().is_some() {
        return Err(bad("trailing text after the version".into()));
    }
    Ok(())
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// Canonical text of a scenario. Comments are not preserved.
pub fn emit<F: Scalar + Serialize>(file: &ScenarioFile<F>) -> String {
    let body = BodyRef {
        resources: &file.instance.resources,
        agents: &file.instance.agents,
        params: &file.instance.params,
        expected: file.expected.as_ref(),
    };
    let json = serde_json::to_string_pretty(&body).expect("scenario bodies always serialize");
    format!("{HEADER} {VERSION}\n{json}\n")
}

#[derive(Serialize)]
struct BodyRef<'a, F> {
    resources: &'a [Resource],
    agents: &'a [Agent],
    params: &'a SatisfactionParams<F>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<&'a Expected>,
}
