use serde::{Deserialize, Serialize};

use crate::bayes::Evidence;
use crate::error::{invalid, Result};
use crate::sim::value_label;

/// A configuration: one value per parameter, in axis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigPoint(pub Vec<(String, f64)>);

impl ConfigPoint {
    pub fn new<S: Into<String>>(values: impl IntoIterator<Item = (S, f64)>) -> Self {
        ConfigPoint(values.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|(_, v)| *v)
    }

    /// Evidence assigning each axis its grid label.
    pub fn evidence(&self) -> Evidence {
        self.0
            .iter()
            .map(|(k, v)| (k.clone(), value_label(*v)))
            .collect()
    }
}

impl std::fmt::Display for ConfigPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| format!("{k}={}", value_label(*v)))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Discrete configuration grid. Points are numbered row-major with the first
/// axis most significant; `keys` are the grid indices that earn the
/// exploration bonus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    axes: Vec<Axis>,
    keys: Vec<usize>,
}

impl ParamSpace {
    /// Grid with the default key set: every corner plus the center point.
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
            return Err(invalid("parameter axes must be non-empty"));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(invalid(format!("duplicate axis `{}`", a.name)));
            }
        }
        let mut space = ParamSpace {
            axes,
            keys: Vec::new(),
        };
        let d = space.axes.len();
        let mut keys: Vec<usize> = (0..1usize << d)
            .map(|mask| {
                let coords: Vec<usize> = (0..d)
                    .map(|i| {
                        if mask >> (d - 1 - i) & 1 == 1 {
                            space.axes[i].values.len() - 1
                        } else {
                            0
                        }
                    })
                    .collect();
                space.index_of_coords(&coords)
            })
            .collect();
        let center: Vec<usize> = space.axes.iter().map(|a| a.values.len() / 2).collect();
        keys.push(space.index_of_coords(&center));
        keys.sort_unstable();
        keys.dedup();
        space.keys = keys;
        Ok(space)
    }

    /// pixel in {120, 180, ..., 480}, fps in {5, 10, 14, 18, 22, 26, 30}.
    pub fn default_grid() -> Self {
        ParamSpace::new(vec![
            Axis {
                name: "pixel".into(),
                values: (0..7).map(|i| 120.0 + 60.0 * i as f64).collect(),
            },
            Axis {
                name: "fps".into(),
                values: vec![5.0, 10.0, 14.0, 18.0, 22.0, 26.0, 30.0],
            },
        ])
        .expect("static grid")
    }

    pub fn with_keys(mut self, keys: &[ConfigPoint]) -> Result<Self> {
        let mut idx = keys
            .iter()
            .map(|k| {
                self.index_of(k)
                    .ok_or_else(|| invalid(format!("key point {k} is not on the grid")))
            })
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        self.keys = idx;
        Ok(self)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn keys(&self) -> &[usize] {
        &self.keys
    }

    pub fn is_key(&self, idx: usize) -> bool {
        self.keys.binary_search(&idx).is_ok()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (i, a) in self.axes.iter().enumerate().rev() {
            out[i] = idx % a.values.len();
            idx /= a.values.len();
        }
        out
    }

    pub fn index_of_coords(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.axes)
            .fold(0, |acc, (&c, a)| acc * a.values.len() + c)
    }

    pub fn point(&self, idx: usize) -> ConfigPoint {
        let c = self.coords(idx);
        ConfigPoint(
            self.axes
                .iter()
                .zip(c)
                .map(|(a, i)| (a.name.clone(), a.values[i]))
                .collect(),
        )
    }

    pub fn index_of(&self, point: &ConfigPoint) -> Option<usize> {
        let mut coords = Vec::with_capacity(self.axes.len());
        for a in &self.axes {
            let v = point.get(&a.name)?;
            coords.push(a.values.iter().position(|x| *x == v)?);
        }
        Some(self.index_of_coords(&coords))
    }

    pub fn points(&self) -> impl Iterator<Item = ConfigPoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_keys_are_corners_and_center() {
        let s = ParamSpace::default_grid();
        assert_eq!(s.len(), 49);
        let keys: Vec<String> = s.keys().iter().map(|&k| s.point(k).to_string()).collect();
        assert_eq!(
            keys,
            [
                "pixel=120,fps=5",
                "pixel=120,fps=30",
                "pixel=300,fps=18",
                "pixel=480,fps=5",
                "pixel=480,fps=30"
            ]
        );
    }

    #[test]
    fn index_round_trip() {
        let s = ParamSpace::default_grid();
        for i in 0..s.len() {
            assert_eq!(s.index_of(&s.point(i)), Some(i));
        }
        assert_eq!(
            s.index_of(&ConfigPoint::new([("pixel", 121.0), ("fps", 5.0)])),
            None
        );
    }
}
