//! Versioned JSON reports.
//!
//! Every command produces one [`Report`]: its human lines go to stdout and
//! the whole report can be written as JSON. Reports carry no timestamps or
//! timings and `data` objects are key-sorted, so identical inputs give
//! identical bytes.

use std::path::{Path, PathBuf};

use eisencong_core::arith::{Int, Rat};
use eisencong_core::arith::cyclotomic::{CycloRat, CyclotomicInt};
use eisencong_core::classgroups::{FinAbGroup, GroupStatus, HypStatus};
use eisencong_core::nf::{FieldElement, IdealLattice};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

pub const SCHEMA: &str = "eisencong-report";
pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable naming a directory that receives every report.
pub const REPORT_DIR_ENV: &str = "EISENCONG_REPORT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Inconclusive,
    Mismatch,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Mismatch => crate::EXIT_MISMATCH,
            Status::Inconclusive => crate::EXIT_INCONCLUSIVE,
        }
    }

    /// A mismatch outranks an inconclusive result.
    pub fn combine(self, o: Status) -> Status {
        self.max(o)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub status: Status,
    pub lines: Vec<String>,
    pub data: Value,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema: SCHEMA.into(),
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            status: Status::Ok,
            lines: Vec::new(),
            data: json!({}),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn flag(&mut self, s: Status) {
        self.status = self.status.combine(s);
    }

    pub fn set(&mut self, key: &str, v: Value) {
        if let Value::Object(m) = &mut self.data {
            m.insert(key.into(), v);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        let r: Report = serde_json::from_str(s).map_err(|e| CliError::Format(format!("report: {e}")))?;
        if r.schema != SCHEMA || r.schema_version != SCHEMA_VERSION {
            return Err(CliError::Format(format!("unsupported report schema {} v{}", r.schema, r.schema_version)));
        }
        Ok(r)
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        s.push_str(&format!("status: {}\n", serde_json::to_value(self.status).unwrap().as_str().unwrap()));
        s
    }

    /// A file name derived from the command, e.g. `congruence-check.json`.
    pub fn file_name(&self) -> String {
        let slug: String = self
            .command
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c.to_ascii_lowercase() } else { '-' })
            .collect();
        format!("{slug}.json")
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
        std::fs::write(path, self.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn write_in(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let p = dir.join(self.file_name());
        self.write_to(&p)?;
        Ok(p)
    }
}

pub fn int(x: &Int) -> Value {
    Value::String(x.to_string())
}

pub fn rat(x: &Rat) -> Value {
    Value::String(x.to_string())
}

pub fn elt(x: &FieldElement) -> Value {
    Value::Array(x.coords.iter().map(rat).collect())
}

pub fn ideal(a: &IdealLattice) -> Value {
    json!({
        "denom": int(&a.denom),
        "hnf": a.hnf.iter().map(|r| r.iter().map(int).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn cyclo(x: &CyclotomicInt) -> Value {
    json!({ "m": x.modulus(), "coeffs": x.coeffs().iter().map(int).collect::<Vec<_>>() })
}

pub fn cyclo_rat(x: &CycloRat) -> Value {
    json!({ "scale": rat(&x.scale), "num": cyclo(&x.num) })
}

pub fn cyclo_rat_text(x: &CycloRat) -> String {
    if x.scale == Rat::from_integer(Int::from(1)) {
        format!("{}", x.num)
    } else {
        format!("({}) * ({})", x.scale, x.num)
    }
}

pub fn group_status(g: &FinAbGroup) -> Status {
    if g.is_exact() {
        Status::Ok
    } else {
        Status::Inconclusive
    }
}

pub fn group(g: &FinAbGroup) -> Value {
    let status = match &g.status {
        GroupStatus::Exact => json!({ "exact": true }),
        GroupStatus::Inconclusive { cap, reason } => json!({ "exact": false, "cap": cap, "reason": reason }),
    };
    json!({
        "divisors": g.divisors,
        "order": g.order(),
        "generators": g.generators,
        "generator_ideals": g.generator_ideals.iter().map(ideal).collect::<Vec<_>>(),
        "relations": g.relations.iter().map(|r| r.iter().map(int).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "status": status,
    })
}

pub fn group_text(g: &FinAbGroup) -> String {
    let shape = if g.divisors.is_empty() {
        "trivial".to_string()
    } else {
        g.divisors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
    };
    match &g.status {
        GroupStatus::Exact => format!("{shape} (exact)"),
        GroupStatus::Inconclusive { cap, reason } => format!("{shape} so far, inconclusive at cap {cap}: {reason}"),
    }
}

pub fn hyp(h: &HypStatus) -> (Status, Value, String) {
    match h {
        HypStatus::Holds => (Status::Ok, json!({ "status": "holds" }), "holds".into()),
        HypStatus::Fails(why) => (Status::Mismatch, json!({ "status": "fails", "reason": why }), format!("fails: {why}")),
        HypStatus::Inconclusive { cap, reason } => (
            Status::Inconclusive,
            json!({ "status": "inconclusive", "cap": cap, "reason": reason }),
            format!("inconclusive at cap {cap}: {reason}"),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("epsilon gauss");
        r.line("G^2 = 5");
        r.flag(Status::Inconclusive);
        r.set("modulus", json!(5));
        r.set("value", int(&Int::from(-7)));
        let s = r.to_json();
        let back = Report::from_json(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), s);
        assert_eq!(r.file_name(), "epsilon-gauss.json");
    }

    #[test]
    fn status_order() {
        assert_eq!(Status::Ok.combine(Status::Inconclusive), Status::Inconclusive);
        assert_eq!(Status::Mismatch.combine(Status::Inconclusive), Status::Mismatch);
        assert!(Report::from_json("{\"schema\":\"other\"}").is_err());
    }
}
