//! Pass/fail check reports with the JSON schema
//! `{check_name, status: "pass"|"fail", witness?}`.

use serde_json::json;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub witness: Option<String>,
}

/// An ordered list of named checks.
#[derive(Debug, Clone, Default)]
pub struct Report {
    checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(Check { name: name.into(), status: CheckStatus::Pass, witness: None });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: CheckStatus::Fail,
            witness: Some(witness.into()),
        });
    }

    /// Records a pass, or a fail with the lazily built witness.
    pub fn check(&mut self, name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.pass(name);
        } else {
            self.fail(name, witness());
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self
            .checks
            .iter()
            .map(|c| {
                let mut obj = serde_json::Map::new();
                obj.insert("check_name".into(), json!(c.name));
                obj.insert(
                    "status".into(),
                    json!(match c.status {
                        CheckStatus::Pass => "pass",
                        CheckStatus::Fail => "fail",
                    }),
                );
                if let Some(w) = &c.witness {
                    obj.insert("witness".into(), json!(w));
                }
                serde_json::Value::Object(obj)
            })
            .collect::<Vec<_>>())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match c.status {
                CheckStatus::Pass => writeln!(f, "pass  {}", c.name)?,
                CheckStatus::Fail => writeln!(
                    f,
                    "FAIL  {}  ({})",
                    c.name,
                    c.witness.as_deref().unwrap_or("no witness")
                )?,
            }
        }
        Ok(())
    }
}
