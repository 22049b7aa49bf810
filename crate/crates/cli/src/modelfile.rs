//! TOML model files.
//!
//! ```toml
//! name = "planar_body"
//! coordinates = [{ name = "theta", angle = true }, { name = "x" }, { name = "y" }]
//! parameters = [{ name = "m", default = 1.0 }, { name = "J", default = 1.0 }]
//! metric = [["J", "0", "0"], ["0", "m", "0"], ["0", "0", "m"]]
//!
//! [[inputs]]
//! name = "Y1"
//! field = ["0", "cos(theta)/m", "sin(theta)/m"]
//!
//! [[points]]
//! name = "rest"
//! q = [0.0, 0.0, 0.0]
//! v = [0.0, 0.0, 0.0]
//! ```
//!
//! Exactly one of `metric`, `christoffels` (sparse `{ upper, lower, value }`
//! entries, unlisted symbols are zero) or `[constrained]` (`metric` plus
//! `constraint`, a list of named fields) gives the connection. Angle
//! coordinates are sampled in `[0, 2π)`, others in `[-1, 1]`.

use std::collections::BTreeSet;

use accs::analysis::{ConnectionSource, SystemModel};
use accs::geometry::{Chart, Connection, Metric, VectorField};
use accs::symcore::{Binding, Expr, Symbol, SymbolKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("model file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("model file: {0}")]
    Invalid(String),
    #[error("model file: {0}")]
    Build(#[from] accs::analysis::AnalysisError),
    #[error("model file: {0}")]
    Geometry(#[from] accs::geometry::GeometryError),
}

fn invalid(msg: impl Into<String>) -> ModelFileError {
    ModelFileError::Invalid(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordinateDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub angle: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterDecl {
    pub name: String,
    pub default: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDecl {
    pub name: String,
    pub field: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChristoffelDecl {
    pub upper: usize,
    pub lower: [usize; 2],
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstrainedDecl {
    pub metric: Vec<Vec<String>>,
    pub constraint: Vec<FieldDecl>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDecl {
    pub name: String,
    pub q: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub coordinates: Vec<CoordinateDecl>,
    #[serde(default)]
    pub parameters: Vec<ParameterDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub christoffels: Option<Vec<ChristoffelDecl>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constrained: Option<ConstrainedDecl>,
    #[serde(default)]
    pub inputs: Vec<FieldDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<ModelFile, ModelFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model file serializes")
    }

    fn chart(&self) -> Result<Chart, ModelFileError> {
        let mut seen = BTreeSet::new();
        for name in self
            .coordinates
            .iter()
            .map(|c| &c.name)
            .chain(self.parameters.iter().map(|p| &p.name))
        {
            if !seen.insert(name.as_str()) {
                return Err(invalid(format!("`{name}` declared twice")));
            }
        }
        let coords = self
            .coordinates
            .iter()
            .map(|c| {
                if c.angle {
                    Symbol::angle(&c.name)
                } else {
                    Symbol::coordinate(&c.name)
                }
            })
            .collect();
        let params = self.parameters.iter().map(|p| Symbol::parameter(&p.name)).collect();
        Ok(Chart::new(coords, params)?)
    }

    fn expr(chart: &Chart, text: &str, what: &str) -> Result<Expr, ModelFileError> {
        chart.parse(text).map_err(|e| invalid(format!("{what}: `{text}`: {e}")))
    }

    fn matrix(chart: &Chart, rows: &[Vec<String>], what: &str) -> Result<Vec<Vec<Expr>>, ModelFileError> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(invalid(format!("{what} must be {n}x{n}")));
        }
        rows.iter()
            .map(|r| r.iter().map(|e| Self::expr(chart, e, what)).collect())
            .collect()
    }

    fn fields(chart: &Chart, decls: &[FieldDecl], what: &str) -> Result<Vec<(String, VectorField)>, ModelFileError> {
        decls
            .iter()
            .map(|d| {
                if d.field.len() != chart.dim() {
                    return Err(invalid(format!(
                        "{what} `{}` has {} components, expected {}",
                        d.name,
                        d.field.len(),
                        chart.dim()
                    )));
                }
                let comps = d
                    .field
                    .iter()
                    .map(|e| Self::expr(chart, e, &format!("{what} `{}`", d.name)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((d.name.clone(), VectorField::new(chart, comps)?))
            })
            .collect()
    }

    /// Builds the system with the parameter defaults.
    pub fn build(&self) -> Result<SystemModel, ModelFileError> {
        let chart = self.chart()?;
        let mut params = Binding::new();
        for (s, p) in chart.params().iter().zip(&self.parameters) {
            params.set(s.clone(), p.default);
        }
        let inputs = Self::fields(&chart, &self.inputs, "input")?;
        let system = match (&self.metric, &self.christoffels, &self.constrained) {
            (Some(g), None, None) => {
                let metric = Metric::new(&chart, Self::matrix(&chart, g, "metric")?)?;
                SystemModel::riemannian(&self.name, metric, inputs, params)?
            }
            (None, Some(entries), None) => {
                let n = chart.dim();
                let mut gamma = vec![vec![vec![Expr::zero(); n]; n]; n];
                for e in entries {
                    let [i, j] = e.lower;
                    if e.upper >= n || i >= n || j >= n {
                        return Err(invalid(format!(
                            "christoffel index out of range: {:?}",
                            (e.upper, i, j)
                        )));
                    }
                    gamma[e.upper][i][j] = Self::expr(&chart, &e.value, "christoffel")?;
                }
                SystemModel::new(
                    &self.name,
                    Connection::from_christoffels(&chart, gamma)?,
                    inputs,
                    params,
                )?
            }
            (None, None, Some(c)) => {
                let metric = Metric::new(&chart, Self::matrix(&chart, &c.metric, "constrained metric")?)?;
                let constraint = Self::fields(&chart, &c.constraint, "constraint")?;
                SystemModel::constrained(&self.name, metric, constraint, inputs, params)?
            }
            _ => return Err(invalid("give exactly one of `metric`, `christoffels`, `constrained`")),
        };
        for p in &self.points {
            if p.q.len() != chart.dim() || p.v.len() != chart.dim() {
                return Err(invalid(format!(
                    "point `{}` must have {} q and v values",
                    p.name,
                    chart.dim()
                )));
            }
        }
        Ok(self.warnings.iter().fold(system, |s, w| s.with_warning(w.clone())))
    }

    /// Writes a system back out; parameters take their current values as
    /// defaults.
    pub fn export(system: &SystemModel) -> ModelFile {
        let chart = system.chart();
        let fields = |d: &accs::distributions::Distribution| -> Vec<FieldDecl> {
            d.generators()
                .iter()
                .map(|g| FieldDecl {
                    name: g.label.clone(),
                    field: g.field.components().iter().map(ToString::to_string).collect(),
                })
                .collect()
        };
        let matrix = |m: &Metric| -> Vec<Vec<String>> {
            m.matrix()
                .iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect()
        };
        let mut file = ModelFile {
            name: system.name().into(),
            coordinates: chart
                .coords()
                .iter()
                .map(|s| CoordinateDecl {
                    name: s.name().into(),
                    angle: s.kind() == SymbolKind::Angle,
                })
                .collect(),
            parameters: chart
                .params()
                .iter()
                .map(|s| ParameterDecl {
                    name: s.name().into(),
                    default: system.params().get(s).unwrap_or(0.0),
                })
                .collect(),
            metric: None,
            christoffels: None,
            constrained: None,
            inputs: fields(system.inputs()),
            points: Vec::new(),
            warnings: system.warnings().to_vec(),
        };
        match system.source() {
            ConnectionSource::Metric(g) => file.metric = Some(matrix(g)),
            ConnectionSource::Constrained { metric } => {
                file.constrained = Some(ConstrainedDecl {
                    metric: matrix(metric),
                    constraint: system.constraint().map(fields).unwrap_or_default(),
                })
            }
            ConnectionSource::Christoffels => {
                let n = chart.dim();
                let mut entries = Vec::new();
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let e = system.connection().christoffel(k, i, j);
                            if !e.is_zero() {
                                entries.push(ChristoffelDecl {
                                    upper: k,
                                    lower: [i, j],
                                    value: e.to_string(),
                                });
                            }
                        }
                    }
                }
                file.christoffels = Some(entries);
            }
        }
        file
    }

    pub fn point(&self, name: &str) -> Option<&PointDecl> {
        self.points.iter().find(|p| p.name == name)
    }
}
