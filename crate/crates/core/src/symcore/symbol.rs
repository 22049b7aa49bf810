use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::EvalError;

/// Role of a symbol inside an expression.
///
/// Angle coordinates behave like ordinary coordinates algebraically; the flag
/// only changes how random bindings are drawn (`[0, 2π)` instead of `[-1, 1]`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Coordinate,
    Angle,
    /// Fibre coordinate `vⁱ` of the tangent bundle, named after its base coordinate.
    Velocity,
    Parameter,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    kind: SymbolKind,
    name: Arc<str>,
}

impl Symbol {
    pub fn new(name: &str, kind: SymbolKind) -> Self {
        Self {
            kind,
            name: Arc::from(name),
        }
    }

    pub fn coordinate(name: &str) -> Self {
        Self::new(name, SymbolKind::Coordinate)
    }

    pub fn angle(name: &str) -> Self {
        Self::new(name, SymbolKind::Angle)
    }

    pub fn parameter(name: &str) -> Self {
        Self::new(name, SymbolKind::Parameter)
    }

    /// The fibre coordinate paired with a base coordinate.
    pub fn velocity_of(base: &Symbol) -> Self {
        Self::new(&base.name, SymbolKind::Velocity)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_coordinate(&self) -> bool {
        matches!(self.kind, SymbolKind::Coordinate | SymbolKind::Angle)
    }

    pub fn is_parameter(&self) -> bool {
        self.kind == SymbolKind::Parameter
    }

    pub fn is_velocity(&self) -> bool {
        self.kind == SymbolKind::Velocity
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Velocity => write!(f, "v_{}", self.name),
            _ => f.write_str(&self.name),
        }
    }
}

/// Numeric values for coordinates, velocities and parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Binding {
    values: BTreeMap<Symbol, f64>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, symbol: Symbol, value: f64) {
        self.values.insert(symbol, value);
    }

    pub fn with(mut self, symbol: Symbol, value: f64) -> Self {
        self.set(symbol, value);
        self
    }

    pub fn get(&self, symbol: &Symbol) -> Option<f64> {
        self.values.get(symbol).copied()
    }

    pub fn require(&self, symbol: &Symbol) -> Result<f64, EvalError> {
        self.get(symbol).ok_or_else(|| EvalError::Unbound(symbol.to_string()))
    }

    /// Copies every entry of `other` into `self`, overwriting existing values.
    pub fn extend(&mut self, other: &Binding) {
        for (s, v) in &other.values {
            self.values.insert(s.clone(), *v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, f64)> {
        self.values.iter().map(|(s, v)| (s, *v))
    }

    /// Entries restricted to parameter symbols.
    pub fn parameters(&self) -> Binding {
        Binding {
            values: self
                .values
                .iter()
                .filter(|(s, _)| s.is_parameter())
                .map(|(s, v)| (s.clone(), *v))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
