//! Verification reports: a list of named checks, each tied to the claim it
//! tests, with a counterexample attached to every failure.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    /// The mathematical statement the check exercises.
    pub anchor: String,
    pub status: CheckStatus,
    /// How many cases were examined.
    pub cases: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Check {
    pub fn pass(name: &str, anchor: &str, cases: u64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            status: CheckStatus::Pass,
            cases,
            counterexample: None,
        }
    }

    pub fn fail(name: &str, anchor: &str, cases: u64, counterexample: Value) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            status: CheckStatus::Fail,
            cases,
            counterexample: Some(counterexample),
        }
    }

    /// `Ok(None)` passes, `Ok(Some(cex))` fails with `cex`, and an error
    /// fails with the error message as counterexample.
    pub fn from_outcome(name: &str, anchor: &str, cases: u64, outcome: Result<Option<Value>, Error>) -> Self {
        match outcome {
            Ok(None) => Self::pass(name, anchor, cases),
            Ok(Some(cex)) => Self::fail(name, anchor, cases, cex),
            Err(e) => Self::fail(name, anchor, cases, serde_json::json!({ "error": e.to_string() })),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.into(),
            seed,
            checks: Vec::new(),
            output: None,
            elapsed_ms: 0,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    /// One line of JSON.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (seed {})\n", self.command, self.seed);
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "SKIP",
            };
            out += &format!("{status} {} [{}] ({} cases)\n", c.name, c.anchor, c.cases);
            if let Some(cex) = &c.counterexample {
                out += &format!("     counterexample: {cex}\n");
            }
        }
        if let Some(o) = &self.output {
            out += &format!("output: {}\n", serde_json::to_string_pretty(o).expect("json value"));
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        out += &format!("{passed}/{} checks passed in {} ms\n", self.checks.len(), self.elapsed_ms);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_and_exit_codes() {
        let mut r = Report::new("snf", 7);
        r.checks.push(Check::pass("a", "x", 3));
        assert_eq!(r.exit_code(), 0);
        r.checks.push(Check::fail("b", "y", 1, json!({"m": [[1]]})));
        r.output = Some(json!({"k": "1/2"}));
        r.elapsed_ms = 12;
        assert_eq!(r.exit_code(), 1);
        let line = r.to_json_line();
        assert!(!line.contains('\n'));
        let back: Report = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json_line(), line);
        assert!(r.to_text().contains("FAIL b [y]"));
    }

    #[test]
    fn outcome_mapping() {
        let c = Check::from_outcome("n", "a", 0, Err(Error::Parse("bad".into())));
        assert_eq!(c.status, CheckStatus::Fail);
        assert!(c.counterexample.unwrap()["error"].as_str().unwrap().contains("bad"));
        assert!(Check::from_outcome("n", "a", 0, Ok(None)).passed());
    }
}
