use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Binding, EvalError, Expr, Symbol, SymbolKind};

/// Seed used by [`ZeroTest::default`].
pub const DEFAULT_ZERO_SEED: u64 = 0x5eed_2e40;

/// Draws a value for `s`: angles in `[0, 2π)`, coordinates and velocities in
/// `[-1, 1]`, parameters in `[0.5, 2]`.
pub fn sample_value<R: Rng>(s: &Symbol, rng: &mut R) -> f64 {
    match s.kind() {
        SymbolKind::Angle => rng.gen_range(0.0..TAU),
        SymbolKind::Coordinate | SymbolKind::Velocity => rng.gen_range(-1.0..=1.0),
        SymbolKind::Parameter => rng.gen_range(0.5..=2.0),
    }
}

/// A random binding of `symbols`, drawn in order.
pub fn sample_binding<R: Rng>(symbols: &[Symbol], rng: &mut R) -> Binding {
    let mut b = Binding::new();
    for s in symbols {
        b.set(s.clone(), sample_value(s, rng));
    }
    b
}

/// Probabilistic identity test by evaluation at random bindings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroTest {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ZeroTest {
    fn default() -> Self {
        Self {
            samples: 8,
            tol: 1e-9,
            seed: DEFAULT_ZERO_SEED,
        }
    }
}

impl ZeroTest {
    /// True iff `|e(b)| <= tol * (1 + scale)` at every sampled binding, where
    /// `scale` is the sum of the absolute term values of `e` at `b`.
    ///
    /// Bindings at which evaluation fails (a vanishing denominator) are
    /// redrawn, up to ten attempts per requested sample.
    pub fn is_zero(&self, e: &Expr) -> Result<bool, EvalError> {
        if e.is_zero() {
            return Ok(true);
        }
        if let Some(c) = e.as_constant() {
            return Ok(num_traits::Zero::is_zero(&c));
        }
        let symbols = e.free_symbols();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let cap = 10 * self.samples.max(1);
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < self.samples.max(1) {
            if attempts == cap {
                return Err(EvalError::RetriesExhausted(cap));
            }
            attempts += 1;
            let values: Vec<f64> = symbols.iter().map(|s| sample_value(s, &mut rng)).collect();
            let lookup = |s: &Symbol| symbols.binary_search(s).ok().map(|i| values[i]);
            match e.eval_scaled(&lookup) {
                Ok((v, scale)) if v.is_finite() && scale.is_finite() => {
                    if v.abs() > self.tol * (1.0 + scale) {
                        return Ok(false);
                    }
                    accepted += 1;
                }
                Ok(_) | Err(EvalError::DivisionByZero) => continue,
                Err(err) => return Err(err),
            }
        }
        Ok(true)
    }
}

/// [`ZeroTest::is_zero`] with the default seed.
pub fn is_zero(e: &Expr, n_samples: usize, tol: f64) -> Result<bool, EvalError> {
    ZeroTest {
        samples: n_samples,
        tol,
        ..ZeroTest::default()
    }
    .is_zero(e)
}
