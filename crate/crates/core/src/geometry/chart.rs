use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::GeometryError;
use crate::symcore::{parse_expr, sample_binding, Binding, Expr, ParseError, Symbol, SymbolKind};

/// Ordered coordinates plus the parameters that may appear in coefficients.
///
/// Cheap to clone; two charts are equal when their symbol lists are.
#[derive(Clone)]
pub struct Chart(Arc<ChartData>);

#[derive(PartialEq, Eq)]
struct ChartData {
    coords: Vec<Symbol>,
    params: Vec<Symbol>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Chart {}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("coords", &self.0.coords)
            .field("params", &self.0.params)
            .finish()
    }
}

impl Chart {
    pub fn new(coords: Vec<Symbol>, params: Vec<Symbol>) -> Result<Chart, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::EmptyChart);
        }
        let mut names: Vec<String> = coords.iter().chain(&params).map(Symbol::to_string).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(GeometryError::DuplicateCoordinate(w[0].to_string()));
        }
        if let Some(p) = coords.iter().find(|s| s.is_parameter()) {
            return Err(GeometryError::ForeignSymbol(p.to_string()));
        }
        if let Some(p) = params.iter().find(|s| !s.is_parameter()) {
            return Err(GeometryError::ForeignSymbol(p.to_string()));
        }
        Ok(Chart(Arc::new(ChartData { coords, params })))
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.0.coords
    }

    pub fn coord(&self, i: usize) -> &Symbol {
        &self.0.coords[i]
    }

    pub fn params(&self) -> &[Symbol] {
        &self.0.params
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.0.coords.iter().position(|c| c == s)
    }

    /// Velocity symbols paired with the coordinates, in coordinate order.
    pub fn velocities(&self) -> Vec<Symbol> {
        self.0.coords.iter().map(Symbol::velocity_of).collect()
    }

    /// The chart `(q, v)` on the tangent bundle.
    pub fn doubled(&self) -> Chart {
        let mut coords = self.0.coords.clone();
        coords.extend(self.velocities());
        Chart(Arc::new(ChartData {
            coords,
            params: self.0.params.clone(),
        }))
    }

    /// Looks up a coordinate or parameter by name; `v_<coord>` names the
    /// velocity of a coordinate.
    pub fn resolve(&self, name: &str) -> Option<Symbol> {
        if let Some(s) = self
            .0
            .coords
            .iter()
            .chain(&self.0.params)
            .find(|s| !s.is_velocity() && s.name() == name)
        {
            return Some(s.clone());
        }
        let base = name.strip_prefix("v_")?;
        self.0
            .coords
            .iter()
            .find(|s| s.name() == base && !s.is_velocity())
            .map(Symbol::velocity_of)
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        parse_expr(text, |n| self.resolve(n))
    }

    /// True when every free symbol of `e` is a coordinate or parameter here.
    pub fn owns(&self, e: &Expr) -> Result<(), GeometryError> {
        for s in e.free_symbols() {
            let known = if s.is_parameter() {
                self.0.params.contains(s)
            } else {
                self.0.coords.contains(s)
            };
            if !known {
                return Err(GeometryError::ForeignSymbol(s.to_string()));
            }
        }
        Ok(())
    }

    /// Deterministic random bindings of coordinates (and, when `params` is
    /// `None`, of parameters too). Given parameter values are copied in.
    pub fn sample_bindings(&self, count: usize, seed: u64, params: Option<&Binding>) -> Vec<Binding> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let mut b = sample_binding(&self.0.coords, &mut rng);
                match params {
                    Some(p) => b.extend(p),
                    None => b.extend(&sample_binding(&self.0.params, &mut rng)),
                }
                b
            })
            .collect()
    }

    pub fn is_angle(&self, i: usize) -> bool {
        self.0.coords[i].kind() == SymbolKind::Angle
    }
}
