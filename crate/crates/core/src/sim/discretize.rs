use serde::{Deserialize, Serialize};

use crate::agent::{evaluate_slos, ParamSpace, SloSpec};
use crate::bayes::{DiscreteBatch, VariableSpec};
use crate::error::{invalid, Result};
use crate::sim::MetricsRow;

/// Equal-width bins over a fixed range; values outside are clamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeBins {
    pub metric: String,
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl RangeBins {
    pub fn new(metric: &str, lo: f64, hi: f64, bins: usize) -> Self {
        RangeBins {
            metric: metric.into(),
            lo,
            hi,
            bins,
        }
    }

    pub fn index(&self, x: f64) -> usize {
        let t = (x - self.lo) / (self.hi - self.lo) * self.bins as f64;
        (t.floor().max(0.0) as usize).min(self.bins - 1)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.bins).map(|i| format!("b{i}")).collect()
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * (self.hi - self.lo) / self.bins as f64
    }
}

/// How raw metric rows become categorical variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningSpec {
    /// Configuration axes, kept as categories named after their grid values.
    pub axes: Vec<(String, Vec<f64>)>,
    pub ranges: Vec<RangeBins>,
}

impl BinningSpec {
    pub fn for_space(space: &ParamSpace) -> Self {
        BinningSpec {
            axes: space
                .axes()
                .iter()
                .map(|a| (a.name.clone(), a.values.clone()))
                .collect(),
            ranges: vec![
                RangeBins::new("streams", 0.0, 12.0, 4),
                RangeBins::new("bitrate", 0.0, 14400.0, 4),
                RangeBins::new("cpu", 0.0, 1.0, 4),
                RangeBins::new("memory", 0.0, 1.0, 4),
                RangeBins::new("consumption", 0.0, 60.0, 4),
                RangeBins::new("network", 0.0, 4.0, 4),
                RangeBins::new("delay", 0.0, 200.0, 4),
                RangeBins::new("success", 0.0, 1.0, 2),
                RangeBins::new("distance", 0.0, 100.0, 4),
            ],
        }
    }

    pub fn range(&self, metric: &str) -> Option<&RangeBins> {
        self.ranges.iter().find(|r| r.metric == metric)
    }

    /// Variables produced by [`discretize`]: axes, retained binned metrics,
    /// then one boolean per SLO.
    pub fn schema(&self, slos: &[SloSpec]) -> Vec<VariableSpec> {
        let mut out: Vec<VariableSpec> = self
            .axes
            .iter()
            .map(|(name, values)| VariableSpec {
                name: name.clone(),
                states: values.iter().map(|v| value_label(*v)).collect(),
            })
            .collect();
        for r in self.retained(slos) {
            out.push(VariableSpec {
                name: r.metric.clone(),
                states: r.labels(),
            });
        }
        out.extend(slos.iter().map(|s| VariableSpec::boolean(s.name.clone())));
        out
    }

    fn retained<'a>(&'a self, slos: &'a [SloSpec]) -> impl Iterator<Item = &'a RangeBins> + 'a {
        self.ranges.iter().filter(move |r| {
            !self.axes.iter().any(|a| a.0 == r.metric)
                && !slos
                    .iter()
                    .any(|s| s.variable == r.metric || s.name == r.metric)
        })
    }
}

/// Canonical label of a grid value: integers without a decimal point.
pub fn value_label(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Turns raw rows into a categorical batch.
pub fn discretize(
    rows: &[MetricsRow],
    binning: &BinningSpec,
    slos: &[SloSpec],
) -> Result<DiscreteBatch> {
    let schema = binning.schema(slos);
    let retained: Vec<&RangeBins> = binning.retained(slos).collect();
    for r in &retained {
        if MetricsRow::COLUMNS.iter().all(|c| *c != r.metric) {
            return Err(invalid(format!(
                "binning refers to unknown metric `{}`",
                r.metric
            )));
        }
    }
    let mut batch = DiscreteBatch::empty(schema)?;
    let mut buf = Vec::with_capacity(batch.width());
    for row in rows {
        buf.clear();
        for (name, values) in &binning.axes {
            let x = row
                .get(name)
                .ok_or_else(|| invalid(format!("row lacks axis `{name}`")))?;
            let i = values
                .iter()
                .position(|v| *v == x)
                .ok_or_else(|| invalid(format!("value {x} is not on axis `{name}`")))?;
            buf.push(i);
        }
        for r in &retained {
            buf.push(r.index(row.get(&r.metric).expect("checked above")));
        }
        let outcome = evaluate_slos(row, slos)?;
        buf.extend(slos.iter().map(|s| usize::from(outcome[&s.name])));
        batch.push_row(&buf)?;
    }
    Ok(batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::default_slos;

    #[test]
    fn bin_arithmetic() {
        let r = RangeBins::new("cpu", 0.0, 1.0, 4);
        assert_eq!(r.index(0.49), 1);
        assert_eq!(r.index(-3.0), 0);
        assert_eq!(r.index(1.0), 3);
        assert_eq!(r.index(7.0), 3);
    }

    #[test]
    fn slo_columns_replace_sources() {
        let binning = BinningSpec::for_space(&ParamSpace::default_grid());
        let names: Vec<String> = binning
            .schema(&default_slos())
            .into_iter()
            .map(|v| v.name)
            .collect();
        assert_eq!(
            names,
            [
                "pixel",
                "fps",
                "streams",
                "bitrate",
                "cpu",
                "memory",
                "consumption",
                "network",
                "in_time",
                "success",
                "distance"
            ]
        );
    }

    #[test]
    fn in_time_from_delay_and_fps() {
        let row = MetricsRow {
            pixel: 300.0,
            fps: 14.0,
            bitrate: 4200.0,
            cpu: 0.49,
            memory: 0.3,
            streams: 1.0,
            consumption: 10.0,
            network: 0.5,
            delay: 50.0,
            success: true,
            distance: 10.0,
        };
        let binning = BinningSpec::for_space(&ParamSpace::default_grid());
        let b = discretize(&[row], &binning, &default_slos()).unwrap();
        let col = b.column_index("in_time").unwrap();
        assert_eq!(b.label(0, col), "true");
        assert_eq!(b.label(0, b.column_index("cpu").unwrap()), "b1");
        assert_eq!(b.label(0, 0), "300");
    }
}
