//! Built-in systems: a planar rigid body with a variable-direction thruster
//! and a rolling disk.

use thiserror::Error;

use crate::analysis::{AnalysisError, SystemModel};
use crate::geometry::{Chart, Metric, VectorField};
use crate::symcore::{Binding, Symbol};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("wrong number of parameters: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("unknown model `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Build(#[from] AnalysisError),
}

/// A named model with parameter defaults.
#[derive(Clone, Copy)]
pub struct ModelDescriptor {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [(&'static str, f64)],
    build: fn(&[f64]) -> Result<SystemModel, ModelError>,
}

impl ModelDescriptor {
    /// Builds the model with the default parameter values.
    pub fn build_default(&self) -> Result<SystemModel, ModelError> {
        let values: Vec<f64> = self.params.iter().map(|(_, v)| *v).collect();
        (self.build)(&values)
    }

    /// Builds the model with parameter values in declaration order.
    pub fn build(&self, values: &[f64]) -> Result<SystemModel, ModelError> {
        if values.len() != self.params.len() {
            return Err(ModelError::Arity {
                expected: self.params.len(),
                got: values.len(),
            });
        }
        (self.build)(values)
    }
}

pub const PLANAR_BODY_DEFAULTS: [(&str, f64); 3] = [("m", 1.0), ("J", 1.0), ("h", 0.5)];
pub const ROLLING_DISK_DEFAULTS: [(&str, f64); 4] = [("m", 1.0), ("rho", 1.0), ("J_spin", 1.0), ("J_roll", 1.0)];

pub fn catalog() -> Vec<ModelDescriptor> {
    vec![
        ModelDescriptor {
            name: "planar_body",
            summary: "planar rigid body with a variable-direction thruster, chart (theta, x, y)",
            params: &PLANAR_BODY_DEFAULTS,
            build: |v| planar_body(v[0], v[1], v[2]),
        },
        ModelDescriptor {
            name: "rolling_disk",
            summary: "vertical rolling disk with the constrained connection, chart (x, y, theta, phi)",
            params: &ROLLING_DISK_DEFAULTS,
            build: |v| rolling_disk(v[0], v[1], v[2], v[3]),
        },
    ]
}

pub fn by_name(name: &str) -> Result<ModelDescriptor, ModelError> {
    catalog()
        .into_iter()
        .find(|d| d.name == name)
        .ok_or_else(|| ModelError::Unknown(name.into()))
}

fn params(names: &[(&'static str, f64)], values: &[f64]) -> Result<(Vec<Symbol>, Binding), ModelError> {
    let mut syms = Vec::new();
    let mut b = Binding::new();
    for ((name, _), &value) in names.iter().zip(values) {
        if value.is_nan() || value <= 0.0 {
            return Err(ModelError::NonPositive { name, value });
        }
        let s = Symbol::parameter(name);
        b.set(s.clone(), value);
        syms.push(s);
    }
    Ok((syms, b))
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}

fn field(chart: &Chart, comps: &[&str]) -> VectorField {
    VectorField::parse(chart, comps).expect("built-in field parses")
}

/// Metric `J dθ² + m(dx² + dy²)` on `(θ, x, y)`, flat Levi-Civita connection,
/// `Y₁ = (cos θ/m) ∂x + (sin θ/m) ∂y` and
/// `Y₂ = −(h/J) ∂θ − (sin θ/m) ∂x + (cos θ/m) ∂y`.
///
/// `h` may be zero (thruster at the centre of mass); the model then carries
/// a warning since the symmetric closure loses rank.
pub fn planar_body(m: f64, j: f64, h: f64) -> Result<SystemModel, ModelError> {
    positive("m", m)?;
    positive("J", j)?;
    let (mut syms, mut b) = params(&PLANAR_BODY_DEFAULTS[..2], &[m, j])?;
    let hs = Symbol::parameter("h");
    b.set(hs.clone(), h);
    syms.push(hs);
    let chart = Chart::new(
        vec![Symbol::angle("theta"), Symbol::coordinate("x"), Symbol::coordinate("y")],
        syms,
    )
    .map_err(AnalysisError::from)?;
    let metric = Metric::diagonal(
        &chart,
        ["J", "m", "m"]
            .iter()
            .map(|e| chart.parse(e).expect("parameter"))
            .collect(),
    )
    .map_err(AnalysisError::from)?;
    let inputs = vec![
        ("Y1".to_string(), field(&chart, &["0", "cos(theta)/m", "sin(theta)/m"])),
        (
            "Y2".to_string(),
            field(&chart, &["-h/J", "-sin(theta)/m", "cos(theta)/m"]),
        ),
    ];
    let s = SystemModel::riemannian("planar_body", metric, inputs, b)?;
    Ok(if h == 0.0 {
        s.with_warning("h = 0: thruster at the centre of mass, symmetric closure has rank 2")
    } else {
        s
    })
}

/// Metric `m(dx² + dy²) + J_spin dθ² + J_roll dφ²` on `(x, y, θ, φ)`,
/// constraint `D = span{X₁, X₂}` with `X₁ = ρ cos θ ∂x + ρ sin θ ∂y + ∂φ`,
/// `X₂ = ∂θ`, the constrained connection over `D`, and inputs
/// `Y₁ = X₂ / J_spin`, `Y₂ = X₁ / (mρ² + J_roll)`.
pub fn rolling_disk(m: f64, rho: f64, j_spin: f64, j_roll: f64) -> Result<SystemModel, ModelError> {
    let (syms, b) = params(&ROLLING_DISK_DEFAULTS, &[m, rho, j_spin, j_roll])?;
    let chart = Chart::new(
        vec![
            Symbol::coordinate("x"),
            Symbol::coordinate("y"),
            Symbol::angle("theta"),
            Symbol::angle("phi"),
        ],
        syms,
    )
    .map_err(AnalysisError::from)?;
    let metric = Metric::diagonal(
        &chart,
        ["m", "m", "J_spin", "J_roll"]
            .iter()
            .map(|e| chart.parse(e).expect("parameter"))
            .collect(),
    )
    .map_err(AnalysisError::from)?;
    let constraint = vec![
        (
            "X1".to_string(),
            field(&chart, &["rho*cos(theta)", "rho*sin(theta)", "0", "1"]),
        ),
        ("X2".to_string(), field(&chart, &["0", "0", "1", "0"])),
    ];
    let inputs = vec![
        ("Y1".to_string(), field(&chart, &["0", "0", "1/J_spin", "0"])),
        (
            "Y2".to_string(),
            field(
                &chart,
                &[
                    "rho*cos(theta)/(m*rho^2 + J_roll)",
                    "rho*sin(theta)/(m*rho^2 + J_roll)",
                    "0",
                    "1/(m*rho^2 + J_roll)",
                ],
            ),
        ),
    ];
    Ok(SystemModel::constrained("rolling_disk", metric, constraint, inputs, b)?)
}
