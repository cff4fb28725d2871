//! Experiment reports. Values are stored exactly; decimals only appear when
//! a report is rendered.

use std::fmt::Write as _;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::rational::{exact_string, parse_exact, to_decimal, to_f64, Rational};

/// An exactly known quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quantity {
    Int(BigInt),
    Rat(Rational),
    /// `sign * radicand^(1/index)` with a non-negative radicand.
    Root {
        radicand: Rational,
        index: u32,
        negative: bool,
    },
}

impl Quantity {
    /// `value / base^(1/index)`, stored as the exact radicand |value|^index / base.
    pub fn scaled_root(value: &Rational, base: &Rational, index: u32) -> Quantity {
        Quantity::Root {
            radicand: num_traits::pow(value.abs(), index as usize) / base,
            index,
            negative: value.is_negative(),
        }
    }

    pub fn exact(&self) -> String {
        match self {
            Quantity::Int(n) => n.to_string(),
            Quantity::Rat(r) => exact_string(r),
            Quantity::Root { radicand, index, negative } => {
                format!("{}({})^(1/{index})", if *negative { "-" } else { "" }, exact_string(radicand))
            }
        }
    }

    pub fn parse(s: &str) -> Option<Quantity> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix(')') {
            let (neg, body) = match body.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, body),
            };
            let body = body.strip_prefix('(')?;
            let (rad, idx) = body.split_once(")^(1/")?;
            return Some(Quantity::Root {
                radicand: parse_exact(rad)?,
                index: idx.parse().ok()?,
                negative: neg,
            });
        }
        if s.contains('/') {
            return parse_exact(s).map(Quantity::Rat);
        }
        s.parse().ok().map(Quantity::Int)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Quantity::Int(n) => to_f64(&Rational::from_integer(n.clone())),
            Quantity::Rat(r) => to_f64(r),
            Quantity::Root { radicand, index, negative } => {
                let v = to_f64(radicand).powf(1.0 / *index as f64);
                if *negative {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn decimal(&self, digits: usize) -> String {
        match self {
            Quantity::Int(n) => n.to_string(),
            Quantity::Rat(r) => to_decimal(r, digits),
            Quantity::Root { .. } => format!("{:.*}", digits, self.to_f64()),
        }
    }
}

impl From<BigInt> for Quantity {
    fn from(n: BigInt) -> Self {
        Quantity::Int(n)
    }
}

impl From<Rational> for Quantity {
    fn from(r: Rational) -> Self {
        if r.is_integer() {
            Quantity::Int(r.to_integer())
        } else {
            Quantity::Rat(r)
        }
    }
}

impl From<i64> for Quantity {
    fn from(n: i64) -> Self {
        Quantity::Int(n.into())
    }
}

impl From<usize> for Quantity {
    fn from(n: usize) -> Self {
        Quantity::Int(n.into())
    }
}

/// Empirical value against the predicted main term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub empirical: Rational,
    pub predicted: Rational,
}

impl Comparison {
    pub fn ratio(&self) -> Option<Rational> {
        (!self.predicted.is_zero()).then(|| self.empirical.clone() / &self.predicted)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub parameters: Vec<(String, String)>,
    pub exact_values: Vec<(String, Quantity)>,
    pub comparison: Option<Comparison>,
    /// Floating-point measurements (root moduli); not part of the exact record.
    pub measurements: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub pass: bool,
    pub pass_rule: String,
    pub runtime_ms: u64,
}

impl ExperimentReport {
    pub fn new(id: &str, pass_rule: &str) -> Self {
        ExperimentReport {
            experiment_id: id.to_string(),
            parameters: Vec::new(),
            exact_values: Vec::new(),
            comparison: None,
            measurements: Vec::new(),
            notes: Vec::new(),
            pass: false,
            pass_rule: pass_rule.to_string(),
            runtime_ms: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    pub fn set(&mut self, name: &str, value: impl Into<Quantity>) {
        self.exact_values.push((name.to_string(), value.into()));
    }

    pub fn get(&self, name: &str) -> Option<&Quantity> {
        self.exact_values.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn get_rational(&self, name: &str) -> Option<Rational> {
        match self.get(name)? {
            Quantity::Int(n) => Some(Rational::from_integer(n.clone())),
            Quantity::Rat(r) => Some(r.clone()),
            Quantity::Root { .. } => None,
        }
    }

    pub fn params_string(&self) -> String {
        self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    pub fn to_json(&self, digits: usize) -> Value {
        let params: Map<String, Value> = self.parameters.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let exact: Map<String, Value> =
            self.exact_values.iter().map(|(k, v)| (k.clone(), json!(v.exact()))).collect();
        let comparison = match &self.comparison {
            None => Value::Null,
            Some(c) => json!({
                "empirical": to_decimal(&c.empirical, digits),
                "predicted": to_decimal(&c.predicted, digits),
                "ratio": c.ratio().map(|r| to_decimal(&r, digits)),
                "empirical_exact": exact_string(&c.empirical),
                "predicted_exact": exact_string(&c.predicted),
            }),
        };
        let measurements: Map<String, Value> =
            self.measurements.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        json!({
            "experiment_id": self.experiment_id,
            "parameters": params,
            "exact_values": exact,
            "comparison": comparison,
            "measurements": measurements,
            "notes": self.notes,
            "pass": self.pass,
            "pass_rule": self.pass_rule,
            "runtime_ms": self.runtime_ms,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidArgument(format!("malformed report JSON: {what}"));
        let obj = v.as_object().ok_or_else(|| bad("not an object"))?;
        let str_map = |key: &str| -> Result<Vec<(String, String)>> {
            obj.get(key)
                .and_then(Value::as_object)
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|(k, v)| Ok((k.clone(), v.as_str().ok_or_else(|| bad(key))?.to_string())))
                .collect()
        };
        let exact_values = str_map("exact_values")?
            .into_iter()
            .map(|(k, v)| Ok((k, Quantity::parse(&v).ok_or_else(|| bad("exact value"))?)))
            .collect::<Result<Vec<_>>>()?;
        let comparison = match obj.get("comparison") {
            Some(Value::Object(c)) => {
                let field =
                    |k: &str| c.get(k).and_then(Value::as_str).and_then(parse_exact).ok_or_else(|| bad(k));
                Some(Comparison {
                    empirical: field("empirical_exact")?,
                    predicted: field("predicted_exact")?,
                })
            }
            _ => None,
        };
        let measurements = obj
            .get("measurements")
            .and_then(Value::as_object)
            .map(|m| m.iter().filter_map(|(k, v)| Some((k.clone(), v.as_f64()?))).collect())
            .unwrap_or_default();
        let notes = obj
            .get("notes")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(|n| n.as_str().map(str::to_string)).collect())
            .unwrap_or_default();
        Ok(ExperimentReport {
            experiment_id: obj.get("experiment_id").and_then(Value::as_str).ok_or_else(|| bad("id"))?.into(),
            parameters: str_map("parameters")?,
            exact_values,
            comparison,
            measurements,
            notes,
            pass: obj.get("pass").and_then(Value::as_bool).ok_or_else(|| bad("pass"))?,
            pass_rule: obj.get("pass_rule").and_then(Value::as_str).unwrap_or_default().into(),
            runtime_ms: obj.get("runtime_ms").and_then(Value::as_u64).unwrap_or(0),
        })
    }

    /// Human-readable block; `digits` controls the decimal columns.
    pub fn to_text(&self, digits: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "[{}] {} {} ({} ms)",
            if self.pass { "PASS" } else { "FAIL" },
            self.experiment_id,
            self.params_string(),
            self.runtime_ms
        );
        let width = self
            .exact_values
            .iter()
            .map(|(k, _)| k.len())
            .chain(self.measurements.iter().map(|(k, _)| k.len()))
            .max()
            .unwrap_or(0)
            .max(9);
        for (k, v) in &self.exact_values {
            let exact = v.exact();
            let dec = v.decimal(digits);
            if exact == dec || exact.len() > 60 {
                let _ = writeln!(s, "    {k:<width$}  {dec}");
            } else {
                let _ = writeln!(s, "    {k:<width$}  {exact}  (~{dec})");
            }
        }
        for (k, v) in &self.measurements {
            let _ = writeln!(s, "    {k:<width$}  {v:.3e}");
        }
        if let Some(c) = &self.comparison {
            let _ = writeln!(
                s,
                "    {:<width$}  {}  predicted {}  ratio {}",
                "empirical",
                to_decimal(&c.empirical, digits),
                to_decimal(&c.predicted, digits),
                c.ratio().map(|r| to_decimal(&r, digits)).unwrap_or_else(|| "-".into())
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "    note: {n}");
        }
        let _ = writeln!(s, "    rule: {}", self.pass_rule);
        s
    }
}

pub const CSV_HEADER: [&str; 8] =
    ["experiment_id", "params", "exact", "empirical", "predicted", "ratio", "pass", "runtime_ms"];

/// One row per report; exact fields are rendered as decimals and joined as
/// `name=value` pairs. JSON keeps the exact strings.
pub fn write_csv<W: Write>(out: W, reports: &[ExperimentReport], digits: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        let exact = r
            .exact_values
            .iter()
            .map(|(k, v)| format!("{k}={}", v.decimal(digits)))
            .collect::<Vec<_>>()
            .join(";");
        let (emp, pred, ratio) = match &r.comparison {
            Some(c) => (
                to_decimal(&c.empirical, digits),
                to_decimal(&c.predicted, digits),
                c.ratio().map(|x| to_decimal(&x, digits)).unwrap_or_default(),
            ),
            None => Default::default(),
        };
        w.write_record([
            r.experiment_id.clone(),
            r.params_string(),
            exact,
            emp,
            pred,
            ratio,
            r.pass.to_string(),
            r.runtime_ms.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, reports: &[ExperimentReport], digits: usize) -> Result<()> {
    let arr = Value::Array(reports.iter().map(|r| r.to_json(digits)).collect());
    serde_json::to_writer_pretty(&mut out, &arr).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json(text: &str) -> Result<Vec<ExperimentReport>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    v.as_array()
        .ok_or_else(|| Error::InvalidArgument("expected a JSON array of reports".into()))?
        .iter()
        .map(ExperimentReport::from_json)
        .collect()
}
