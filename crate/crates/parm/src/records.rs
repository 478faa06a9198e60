//! Rule records and their JSON-lines form.
//!
//! One rule per line, fields in fixed order, reals rounded to 12
//! significant digits before printing so reruns are byte-identical. The
//! absolute support prints as a plain integer whenever it is one (always,
//! outside sampling mode).

use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::PropertyGraph;
use crate::miner::Rule;
use crate::pattern::{PathPattern, PatternError};

#[derive(Debug, Error, PartialEq)]
pub enum RecordError {
    #[error("line {line}: field {field}: {msg}")]
    Field {
        line: usize,
        field: &'static str,
        msg: String,
    },
    #[error("line {line}: not a JSON object: {msg}")]
    NotAnObject { line: usize, msg: String },
}

/// Serialized form of one rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleRecord {
    pub antecedent: String,
    pub consequent: String,
    pub asupp: f64,
    pub rsupp: f64,
    pub conf: f64,
    pub lift: f64,
    pub estimated: bool,
    pub ci: Option<(f64, f64)>,
}

/// Rounds to 12 significant digits (ties to even, as the formatter does).
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn number(x: f64) -> Value {
    let r = round_sig(x);
    if r.fract() == 0.0 && r.abs() < 9.0e15 {
        json!(r as i64)
    } else {
        json!(r)
    }
}

impl RuleRecord {
    pub fn from_rule(graph: &PropertyGraph, rule: &Rule) -> RuleRecord {
        RuleRecord {
            antecedent: rule.antecedent.display(graph).to_string(),
            consequent: rule.consequent.display(graph).to_string(),
            asupp: round_sig(rule.asupp),
            rsupp: round_sig(rule.rsupp),
            conf: round_sig(rule.conf),
            lift: round_sig(rule.lift),
            estimated: rule.estimated,
            ci: rule.ci.map(|(lo, hi)| (round_sig(lo), round_sig(hi))),
        }
    }

    pub fn parse_patterns(
        &self,
        graph: &PropertyGraph,
    ) -> Result<(PathPattern, PathPattern), PatternError> {
        Ok((
            PathPattern::parse(&self.antecedent, graph.labels(), graph.attributes())?,
            PathPattern::parse(&self.consequent, graph.labels(), graph.attributes())?,
        ))
    }
}

/// One JSON line, no trailing newline; field order is fixed.
pub fn serialize_rule(record: &RuleRecord) -> String {
    let mut line = String::with_capacity(128);
    line.push_str("{\"antecedent\":");
    line.push_str(&Value::from(record.antecedent.as_str()).to_string());
    line.push_str(",\"consequent\":");
    line.push_str(&Value::from(record.consequent.as_str()).to_string());
    line.push_str(",\"asupp\":");
    line.push_str(&number(record.asupp).to_string());
    line.push_str(",\"rsupp\":");
    line.push_str(&json!(round_sig(record.rsupp)).to_string());
    line.push_str(",\"conf\":");
    line.push_str(&json!(round_sig(record.conf)).to_string());
    line.push_str(",\"lift\":");
    line.push_str(&json!(round_sig(record.lift)).to_string());
    line.push_str(",\"estimated\":");
    line.push_str(if record.estimated { "true" } else { "false" });
    if let Some((lo, hi)) = record.ci {
        line.push_str(",\"ci\":[");
        line.push_str(&json!(round_sig(lo)).to_string());
        line.push(',');
        line.push_str(&json!(round_sig(hi)).to_string());
        line.push(']');
    }
    line.push('}');
    line
}

/// Exact inverse of [`serialize_rule`]; failures name the offending field.
pub fn parse_rule(text: &str, line: usize) -> Result<RuleRecord, RecordError> {
    let value: Value = serde_json::from_str(text).map_err(|e| RecordError::NotAnObject {
        line,
        msg: e.to_string(),
    })?;
    let obj = value.as_object().ok_or_else(|| RecordError::NotAnObject {
        line,
        msg: "expected an object".into(),
    })?;
    let field_err = |field: &'static str, msg: &str| RecordError::Field {
        line,
        field,
        msg: msg.to_string(),
    };
    let text_field = |field: &'static str| -> Result<String, RecordError> {
        obj.get(field)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| field_err(field, "missing or not a string"))
    };
    let num_field = |field: &'static str| -> Result<f64, RecordError> {
        obj.get(field)
            .and_then(Value::as_f64)
            .ok_or_else(|| field_err(field, "missing or not a number"))
    };
    let ci = match obj.get("ci") {
        None | Some(Value::Null) => None,
        Some(Value::Array(a)) if a.len() == 2 => {
            let lo = a[0].as_f64().ok_or_else(|| field_err("ci", "low bound not a number"))?;
            let hi = a[1].as_f64().ok_or_else(|| field_err("ci", "high bound not a number"))?;
            Some((lo, hi))
        }
        Some(_) => return Err(field_err("ci", "expected a [low, high] pair")),
    };
    Ok(RuleRecord {
        antecedent: text_field("antecedent")?,
        consequent: text_field("consequent")?,
        asupp: num_field("asupp")?,
        rsupp: num_field("rsupp")?,
        conf: num_field("conf")?,
        lift: num_field("lift")?,
        estimated: obj
            .get("estimated")
            .and_then(Value::as_bool)
            .ok_or_else(|| field_err("estimated", "missing or not a boolean"))?,
        ci,
    })
}

/// Parses a whole rules file.
pub fn parse_rules_file(content: &str) -> Result<Vec<RuleRecord>, RecordError> {
    content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_rule(l, i + 1))
        .collect()
}

/// Renders mined rules in the canonical output order: total pattern length,
/// then antecedent text, then consequent text.
pub fn render_rules(graph: &PropertyGraph, rules: &[Rule]) -> String {
    let mut records: Vec<(usize, RuleRecord)> = rules
        .iter()
        .map(|r| {
            (
                r.antecedent.len() + r.consequent.len(),
                RuleRecord::from_rule(graph, r),
            )
        })
        .collect();
    records.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.antecedent.cmp(&b.1.antecedent))
            .then_with(|| a.1.consequent.cmp(&b.1.consequent))
    });
    let mut out = String::new();
    for (_, rec) in &records {
        out.push_str(&serialize_rule(rec));
        out.push('\n');
    }
    out
}
