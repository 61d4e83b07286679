use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{invalid, Result};

/// Ordered `(x, y)` samples with axis labels and generating parameters.
///
/// Plain curves have strictly increasing `x`. Parametric curves (such as
/// DE-EE, traced by cell radius) instead carry a strictly increasing
/// parameter column and may revisit `x` values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    x_label: String,
    y_label: String,
    points: Vec<(f64, f64)>,
    parameter: Option<CurveParameter>,
    metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveParameter {
    pub label: String,
    pub values: Vec<f64>,
}

impl Curve {
    pub fn new(
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        points: Vec<(f64, f64)>,
    ) -> Result<Self> {
        check_finite(&points)?;
        if let Some(w) = points.windows(2).find(|w| !(w[1].0 > w[0].0)) {
            return Err(invalid(format!(
                "curve x must be strictly increasing, got {} then {}",
                w[0].0, w[1].0
            )));
        }
        Ok(Self {
            x_label: x_label.into(),
            y_label: y_label.into(),
            points,
            parameter: None,
            metadata: BTreeMap::new(),
        })
    }

    /// Curve traced by a parameter; `samples` holds `(parameter, x, y)`.
    pub fn parametric(
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        parameter_label: impl Into<String>,
        samples: Vec<(f64, f64, f64)>,
    ) -> Result<Self> {
        let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.1, s.2)).collect();
        let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
        check_finite(&points)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("curve parameter values must be finite"));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("curve parameter must be strictly increasing"));
        }
        Ok(Self {
            x_label: x_label.into(),
            y_label: y_label.into(),
            points,
            parameter: Some(CurveParameter {
                label: parameter_label.into(),
                values,
            }),
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.insert_metadata(key, value);
        self
    }

    pub fn insert_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.insert(key.into(), value.into());
    }

    pub fn x_label(&self) -> &str {
        &self.x_label
    }

    pub fn y_label(&self) -> &str {
        &self.y_label
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn parameter(&self) -> Option<&CurveParameter> {
        self.parameter.as_ref()
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

fn check_finite(points: &[(f64, f64)]) -> Result<()> {
    match points
        .iter()
        .find(|(x, y)| !(x.is_finite() && y.is_finite()))
    {
        Some((x, y)) => Err(invalid(format!("curve point ({x}, {y}) is not finite"))),
        None => Ok(()),
    }
}

/// Compact, round-trippable rendering of a parameter value for metadata.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && !(1e-4..1e9).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Sampling plan for a sweep: `count` points from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRange {
    min: f64,
    max: f64,
    count: usize,
    spacing: Spacing,
}

impl SweepRange {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(invalid("sweep bounds must be finite"));
        }
        if count == 0 {
            return Err(invalid("sweep needs at least one point"));
        }
        if count == 1 && min > max || count > 1 && min >= max {
            return Err(invalid(format!(
                "sweep requires min < max, got {min}:{max}"
            )));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(invalid(format!("log sweep requires min > 0, got {min}")));
        }
        Ok(Self {
            min,
            max,
            count,
            spacing,
        })
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(min, max, count, Spacing::Linear)
    }

    pub fn log(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(min, max, count, Spacing::Log)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Sample positions in ascending order; endpoints are exact.
    pub fn samples(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i + 1 == self.count {
                    self.max
                } else {
                    let t = i as f64 / last;
                    match self.spacing {
                        Spacing::Linear => self.min + (self.max - self.min) * t,
                        Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                    }
                }
            })
            .collect()
    }

    pub(crate) fn record(&self, curve: &mut Curve, prefix: &str) {
        curve.insert_metadata(format!("{prefix}_min"), format_value(self.min));
        curve.insert_metadata(format!("{prefix}_max"), format_value(self.max));
        curve.insert_metadata(format!("{prefix}_count"), self.count.to_string());
        curve.insert_metadata(
            format!("{prefix}_spacing"),
            match self.spacing {
                Spacing::Linear => "linear",
                Spacing::Log => "log",
            },
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_rejects_unordered_or_non_finite() {
        assert!(Curve::new("x", "y", vec![(1.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(Curve::new("x", "y", vec![(1.0, f64::NAN)]).is_err());
        assert!(Curve::new("x", "y", vec![]).unwrap().is_empty());
        assert!(Curve::parametric("x", "y", "r", vec![(1.0, 5.0, 0.0), (2.0, 5.0, 1.0)]).is_ok());
        assert!(Curve::parametric("x", "y", "r", vec![(2.0, 5.0, 0.0), (1.0, 5.0, 1.0)]).is_err());
    }

    #[test]
    fn sweep_samples() {
        let s = SweepRange::linear(0.0, 1.0, 5).unwrap().samples();
        assert_eq!(s, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let s = SweepRange::log(0.01, 100.0, 5).unwrap().samples();
        for (got, want) in s.iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
            assert!((got - want).abs() <= 1e-12 * want);
        }
        assert_eq!(SweepRange::log(3.0, 3.0, 1).unwrap().samples(), vec![3.0]);
        assert!(SweepRange::log(0.0, 1.0, 3).is_err());
        assert!(SweepRange::linear(1.0, 1.0, 3).is_err());
        assert!(SweepRange::linear(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn value_formatting_round_trips() {
        for v in [0.0, 1.0, 0.01, 1e-20, 2.5e9, -3.25, 123456.789] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_value(1e-20), "1e-20");
        assert_eq!(format_value(0.01), "0.01");
    }
}
