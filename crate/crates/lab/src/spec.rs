//! JSON metric specifications.
//!
//! ```json
//! {"spec_version": 1, "kind": "product_s2s2", "a": 1.0, "b": 1.2}
//! {"kind": "chart_s4", "r": 1.0, "grid": 20, "w": {"random": {"seed": 3, "amplitude": 0.3}}}
//! {"kind": "conformal", "base": {"kind": "chart_s4", "r": 1.0}, "w": {"constant": 0.1, "linear": [0.2]}}
//! ```

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use ricci_lab_core::zoo::{ChartGeometry, ChartMetric, ConformalFactor, ConformalModel, MetricModel, FS_STANDARD_LAMBDA};

use crate::error::{CliError, CliResult};

pub const SPEC_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    RoundS4 {
        r: f64,
    },
    #[serde(rename = "product_s2s2")]
    ProductS2S2 {
        a: f64,
        b: f64,
    },
    FubiniStudy {
        #[serde(default = "standard_lambda")]
        lambda: f64,
    },
    ChartS4 {
        r: f64,
        grid: Option<usize>,
        step: Option<f64>,
        w: Option<FactorSpec>,
    },
    #[serde(rename = "chart_s2s2")]
    ChartS2S2 {
        a: f64,
        b: f64,
        grid: Option<usize>,
        step: Option<f64>,
        w: Option<FactorSpec>,
    },
    Conformal {
        base: Box<MetricSpec>,
        w: FactorSpec,
    },
}

fn standard_lambda() -> f64 {
    FS_STANDARD_LAMBDA
}

/// `w = c + ⟨ℓ, y⟩ + yᵀQy` in the unit embedding coordinates, or a seeded
/// random factor.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub constant: Option<f64>,
    pub linear: Option<Vec<f64>>,
    pub quadratic: Option<Vec<Vec<f64>>>,
    pub random: Option<RandomFactor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFactor {
    pub seed: u64,
    pub amplitude: f64,
}

impl FactorSpec {
    pub fn build(&self, geometry: &ChartGeometry) -> CliResult<ConformalFactor> {
        let dim = geometry.embedding_dim();
        if let Some(r) = self.random {
            if self.constant.is_some() || self.linear.is_some() || self.quadratic.is_some() {
                return Err(CliError::Spec("\"random\" excludes explicit coefficients".into()));
            }
            if !(r.amplitude >= 0.0 && r.amplitude.is_finite()) {
                return Err(CliError::Spec(format!("amplitude must be non-negative, got {}", r.amplitude)));
            }
            return Ok(ConformalFactor::random(r.seed, r.amplitude, dim));
        }
        let mut w = ConformalFactor::constant(self.constant.unwrap_or(0.0));
        if let Some(l) = &self.linear {
            if l.len() > dim {
                return Err(CliError::Spec(format!("linear part has {} entries, embedding has {dim}", l.len())));
            }
            w.linear[..l.len()].copy_from_slice(l);
        }
        if let Some(q) = &self.quadratic {
            if q.len() > dim || q.iter().any(|row| row.len() > dim) {
                return Err(CliError::Spec(format!("quadratic part must be at most {dim} x {dim}")));
            }
            for (i, row) in q.iter().enumerate() {
                w.quadratic[i][..row.len()].copy_from_slice(row);
            }
        }
        let finite = w.constant.is_finite()
            && w.linear.iter().all(|v| v.is_finite())
            && w.quadratic.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(CliError::Spec("conformal factor coefficients must be finite".into()));
        }
        Ok(w)
    }
}

impl MetricSpec {
    /// Parses a spec, checking `spec_version` when present.
    pub fn from_json(text: &str) -> CliResult<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| CliError::Spec(e.to_string()))?;
        let Some(obj) = value.as_object_mut() else {
            return Err(CliError::Spec("expected a JSON object".into()));
        };
        if let Some(v) = obj.remove("spec_version") {
            if v.as_u64() != Some(SPEC_VERSION) {
                return Err(CliError::Spec(format!("unsupported spec_version {v}, expected {SPEC_VERSION}")));
            }
        }
        serde_json::from_value(value).map_err(|e| CliError::Spec(e.to_string()))
    }

    /// Inline JSON if the argument starts with `{`, a file path otherwise.
    pub fn from_arg(arg: &str) -> CliResult<Self> {
        if arg.trim_start().starts_with('{') {
            Self::from_json(arg)
        } else {
            let text = std::fs::read_to_string(Path::new(arg))
                .map_err(|e| CliError::Spec(format!("cannot read {arg}: {e}")))?;
            Self::from_json(&text)
        }
    }

    /// Builds the model; `grid` overrides the chart resolution.
    pub fn model(&self, grid: Option<usize>) -> CliResult<MetricModel> {
        let model = match self {
            MetricSpec::RoundS4 { r } => MetricModel::RoundS4 { r: *r },
            MetricSpec::ProductS2S2 { a, b } => MetricModel::ProductS2S2 { a: *a, b: *b },
            MetricSpec::FubiniStudy { lambda } => MetricModel::FubiniStudy { lambda: *lambda },
            MetricSpec::ChartS4 { .. } | MetricSpec::ChartS2S2 { .. } => MetricModel::Chart(self.chart(grid)?),
            MetricSpec::Conformal { base, w } => {
                let base = base.chart(grid)?;
                if base.factor.is_some() {
                    return Err(CliError::Spec("conformal base must not carry its own factor".into()));
                }
                MetricModel::Conformal(ConformalModel { base, factor: w.build(&base.geometry)? })
            }
        };
        model.validate()?;
        Ok(model)
    }

    /// The chart metric of a `chart_*` spec.
    pub fn chart(&self, grid: Option<usize>) -> CliResult<ChartMetric> {
        let (geometry, spec_grid, step, w) = match self {
            MetricSpec::ChartS4 { r, grid, step, w } => (ChartGeometry::S4Angles { radius: *r }, grid, step, w),
            MetricSpec::ChartS2S2 { a, b, grid, step, w } => (ChartGeometry::S2S2Angles { a: *a, b: *b }, grid, step, w),
            _ => return Err(CliError::Spec("expected a chart_s4 or chart_s2s2 spec".into())),
        };
        let mut chart = ChartMetric::new(geometry);
        if let Some(g) = grid.or(*spec_grid) {
            chart = chart.with_grid(g);
        }
        if let Some(h) = step {
            chart = chart.with_step(*h);
        }
        if let Some(w) = w {
            chart = chart.with_factor(w.build(&geometry)?);
        }
        chart.validate()?;
        Ok(chart)
    }
}
