use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sim::MetricsRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Edge,
    Fog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SloKind {
    QoS,
    QoE,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SloOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "max")]
    Max,
}

/// Right-hand side of an SLO predicate: a constant, a boolean, or a
/// `"<number>/<variable>"` expression such as `"1000/fps"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SloValue {
    Number(f64),
    Bool(bool),
    Expr(String),
}

/// A named predicate over one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SloSpec {
    pub name: String,
    pub variable: String,
    pub op: SloOp,
    pub value: SloValue,
    pub tier: Tier,
    pub kind: SloKind,
}

impl SloSpec {
    pub fn new(name: &str, variable: &str, op: SloOp, value: SloValue, kind: SloKind) -> Self {
        SloSpec {
            name: name.into(),
            variable: variable.into(),
            op,
            value,
            tier: Tier::Edge,
            kind,
        }
    }

    pub fn is_qos(&self) -> bool {
        matches!(self.kind, SloKind::QoS | SloKind::Both)
    }

    pub fn is_qoe(&self) -> bool {
        matches!(self.kind, SloKind::QoE | SloKind::Both)
    }

    /// Evaluates the predicate against a metric lookup.
    pub fn evaluate(&self, lookup: impl Fn(&str) -> Option<f64>) -> Result<bool> {
        let x =
            lookup(&self.variable).ok_or_else(|| Error::UnknownVariable(self.variable.clone()))?;
        let rhs = match &self.value {
            SloValue::Number(v) => *v,
            SloValue::Bool(b) => f64::from(u8::from(*b)),
            SloValue::Expr(e) => {
                let (num, var) = e
                    .split_once('/')
                    .ok_or_else(|| invalid(format!("unsupported SLO expression `{e}`")))?;
                let num: f64 = num
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("unsupported SLO expression `{e}`")))?;
                let den = lookup(var.trim())
                    .ok_or_else(|| Error::UnknownVariable(var.trim().to_string()))?;
                num / den
            }
        };
        Ok(match self.op {
            SloOp::Lt => x < rhs,
            SloOp::Eq => x == rhs,
            SloOp::Max => true,
        })
    }
}

/// The four device-level SLOs: `network < 1.6`, `delay < 1000/fps`,
/// `success = true` and `distance < 50`.
pub fn default_slos() -> Vec<SloSpec> {
    vec![
        SloSpec::new(
            "network",
            "network",
            SloOp::Lt,
            SloValue::Number(1.6),
            SloKind::QoS,
        ),
        SloSpec::new(
            "in_time",
            "delay",
            SloOp::Lt,
            SloValue::Expr("1000/fps".into()),
            SloKind::QoS,
        ),
        SloSpec::new(
            "success",
            "success",
            SloOp::Eq,
            SloValue::Bool(true),
            SloKind::QoE,
        ),
        SloSpec::new(
            "distance",
            "distance",
            SloOp::Lt,
            SloValue::Number(50.0),
            SloKind::QoE,
        ),
    ]
}

pub fn evaluate_slos(row: &MetricsRow, slos: &[SloSpec]) -> Result<BTreeMap<String, bool>> {
    slos.iter()
        .map(|s| Ok((s.name.clone(), s.evaluate(|v| row.get(v))?)))
        .collect()
}

/// Fractions of rows meeting every QoE SLO and every QoS SLO: the realized
/// pv and ra of a round.
pub fn realized_fulfillment(rows: &[MetricsRow], slos: &[SloSpec]) -> Result<(f64, f64)> {
    if rows.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let (mut pv, mut ra) = (0usize, 0usize);
    for row in rows {
        let mut qoe = true;
        let mut qos = true;
        for s in slos {
            let ok = s.evaluate(|v| row.get(v))?;
            if s.is_qoe() {
                qoe &= ok;
            }
            if s.is_qos() {
                qos &= ok;
            }
        }
        pv += usize::from(qoe);
        ra += usize::from(qos);
    }
    let n = rows.len() as f64;
    Ok((pv as f64 / n, ra as f64 / n))
}

pub fn load_slos(path: impl AsRef<Path>) -> Result<Vec<SloSpec>> {
    let slos: Vec<SloSpec> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    validate_slos(&slos)?;
    Ok(slos)
}

pub fn validate_slos(slos: &[SloSpec]) -> Result<()> {
    if slos.is_empty() {
        return Err(invalid("SLO list is empty"));
    }
    for (i, s) in slos.iter().enumerate() {
        if slos[..i].iter().any(|t| t.name == s.name) {
            return Err(invalid(format!("duplicate SLO `{}`", s.name)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> MetricsRow {
        MetricsRow {
            pixel: 300.0,
            fps: 14.0,
            bitrate: 4200.0,
            cpu: 0.3,
            memory: 0.3,
            streams: 1.0,
            consumption: 10.0,
            network: 1.7,
            delay: 50.0,
            success: true,
            distance: 50.0,
        }
    }

    #[test]
    fn table_thresholds() {
        let r = evaluate_slos(&row(), &default_slos()).unwrap();
        assert!(!r["network"]);
        assert!(r["in_time"]);
        assert!(r["success"]);
        assert!(!r["distance"]);
    }

    #[test]
    fn json_shape() {
        let text = serde_json::to_string(&default_slos()).unwrap();
        assert!(text.contains(r#""op":"<""#));
        assert!(text.contains(r#""value":"1000/fps""#));
        assert!(text.contains(r#""tier":"edge""#));
        let back: Vec<SloSpec> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, default_slos());
    }

    #[test]
    fn missing_variable_errors() {
        let slo = SloSpec::new("x", "nope", SloOp::Lt, SloValue::Number(1.0), SloKind::QoS);
        assert!(evaluate_slos(&row(), &[slo]).is_err());
    }
}
