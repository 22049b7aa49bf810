use serde::Serialize;
use thiserror::Error;

use super::split::{SplitCalculus, SplitField};
use super::word::{BracketWord, WordEvaluator};
use crate::geometry::VectorField;
use crate::numeric::{normalized_rank, DEFAULT_RANK_TOL};
use crate::symcore::{Binding, EvalError, ZeroTest};

/// A point `v_q` of the tangent bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPoint {
    /// Coordinate and parameter values.
    pub base: Binding,
    pub velocity: Vec<f64>,
}

impl TangentPoint {
    pub fn new(base: Binding, velocity: Vec<f64>) -> TangentPoint {
        TangentPoint { base, velocity }
    }

    /// The zero vector `0_q`.
    pub fn zero(base: Binding, n: usize) -> TangentPoint {
        TangentPoint {
            base,
            velocity: vec![0.0; n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.velocity.iter().all(|v| *v == 0.0)
    }

    /// Binding of `q`, `v` and parameters for the given calculus' chart.
    pub fn binding(&self, calc: &SplitCalculus) -> Result<Binding, TangentError> {
        let n = calc.dim();
        if self.velocity.len() != n {
            return Err(TangentError::VelocityLength {
                expected: n,
                got: self.velocity.len(),
            });
        }
        let mut b = self.base.clone();
        for (s, v) in calc.doubled().coords()[n..].iter().zip(&self.velocity) {
            b.set(s.clone(), *v);
        }
        Ok(b)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TangentError {
    #[error("velocity has {got} components, chart has {expected}")]
    VelocityLength { expected: usize, got: usize },
    #[error("recursion coefficients need k >= 2, got {0}")]
    RecursionOrder(usize),
    #[error("caps must be at least 1")]
    ZeroCap,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FamilyTag {
    #[serde(rename = "type1-Z")]
    Spray,
    #[serde(rename = "type2-A")]
    A,
    #[serde(rename = "type3-B")]
    B,
    #[serde(rename = "type4-C")]
    C,
}

/// Enumeration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Largest `l` in `ad_Z^l(W^V)`.
    pub adz_power: usize,
    /// Largest number of `ℬ` elements bracketed into one `𝒞` element.
    pub bracket_depth: usize,
}

impl Caps {
    /// `2n` for both.
    pub fn for_dim(n: usize) -> Caps {
        Caps {
            adz_power: 2 * n,
            bracket_depth: 2 * n,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Primitive {
    pub tag: FamilyTag,
    pub word: BracketWord,
    pub field: SplitField,
    /// `l` for `ℬ` elements, `0` otherwise.
    pub adz_power: usize,
    /// Number of `ℬ` elements in a `𝒞` bracket.
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub struct PrimitiveSet {
    pub entries: Vec<Primitive>,
    /// Enumeration stopped at a cap while still finding new directions.
    pub cap_hit: bool,
}

/// Ranks of the accessibility space at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AccessRanks {
    pub total: usize,
    /// Rank of the projection onto `H_{v_q}`.
    pub horizontal: usize,
    /// Dimension of the intersection with `V_{v_q}`.
    pub vertical: usize,
    pub cap_hit: bool,
    /// Number of generators that raised the rank.
    pub generators: usize,
}

/// Growing set of row vectors at a list of points; a row is admitted when
/// it raises the rank at some point.
struct RankBasis<'p> {
    points: &'p [Binding],
    rows: Vec<Vec<Vec<f64>>>,
    ranks: Vec<usize>,
}

impl<'p> RankBasis<'p> {
    fn new(points: &'p [Binding]) -> Self {
        RankBasis {
            points,
            rows: vec![Vec::new(); points.len()],
            ranks: vec![0; points.len()],
        }
    }

    fn offer(&mut self, f: &SplitField) -> bool {
        let mut values = Vec::with_capacity(self.points.len());
        let mut raises = false;
        for (i, b) in self.points.iter().enumerate() {
            let Ok(v) = f.evaluate(b) else {
                values.push(None);
                continue;
            };
            let mut rows = self.rows[i].clone();
            rows.push(v.clone());
            let r = normalized_rank(&rows, DEFAULT_RANK_TOL);
            raises |= r > self.ranks[i];
            values.push(Some((v, r)));
        }
        if raises {
            for (i, v) in values.into_iter().enumerate() {
                if let Some((v, r)) = v {
                    self.rows[i].push(v);
                    self.ranks[i] = r;
                }
            }
        }
        raises
    }

    fn min_rank(&self) -> usize {
        self.ranks.iter().copied().min().unwrap_or(0)
    }
}

/// Tunables of one enumeration run.
struct Plan<'p> {
    caps: Caps,
    points: &'p [Binding],
    /// Stop once every point reaches this rank.
    bound: usize,
    /// Keep every nonzero `ℬ` element and run `ad_Z` until it vanishes or
    /// hits the cap; otherwise stop at the bound or after a pass that adds
    /// nothing.
    exhaustive: bool,
}

fn enumerate<'p>(
    calc: &SplitCalculus,
    sym: &[VectorField],
    plan: &Plan<'p>,
) -> Result<(PrimitiveSet, RankBasis<'p>), TangentError> {
    if plan.caps.adz_power == 0 || plan.caps.bracket_depth == 0 {
        return Err(TangentError::ZeroCap);
    }
    let eval = WordEvaluator::new(calc, sym);
    let zt = ZeroTest::default();
    let mut basis = RankBasis::new(plan.points);
    let mut entries = Vec::new();
    let full = |b: &RankBasis<'_>| b.min_rank() >= plan.bound;

    let z = calc.spray();
    if !z.is_structurally_zero() {
        basis.offer(&z);
        entries.push(Primitive {
            tag: FamilyTag::Spray,
            word: BracketWord::Spray,
            field: z,
            adz_power: 0,
            depth: 0,
        });
    }
    let mut level: Vec<Primitive> = Vec::new();
    for k in 0..sym.len() {
        let f = calc.vertical(&sym[k]);
        if f.is_zero_with(&zt)? {
            continue;
        }
        basis.offer(&f);
        let p = Primitive {
            tag: FamilyTag::A,
            word: BracketWord::Lift(k),
            field: f,
            adz_power: 0,
            depth: 0,
        };
        entries.push(p.clone());
        level.push(p);
    }

    // Admitted ℬ and 𝒞 elements: right factors of new 𝒞 brackets.
    let mut admitted: Vec<Primitive> = Vec::new();
    let mut cap_hit = false;
    let mut l = 0;
    while !level.is_empty() {
        if !plan.exhaustive && full(&basis) {
            break;
        }
        if l == plan.caps.adz_power {
            cap_hit = !full(&basis);
            break;
        }
        l += 1;
        let mut pass_admitted = false;
        let mut next = Vec::new();
        let mut fresh = Vec::new();
        for p in &level {
            let field = calc.bracket_with_spray(&p.field);
            if field.is_zero_with(&zt)? {
                continue;
            }
            let q = Primitive {
                tag: FamilyTag::B,
                word: BracketWord::bracket(BracketWord::Spray, p.word.clone()),
                field,
                adz_power: l,
                depth: 1,
            };
            let took = basis.offer(&q.field);
            pass_admitted |= took;
            if took {
                fresh.push(q.clone());
            }
            if plan.exhaustive || took {
                entries.push(q.clone());
            }
            next.push(q);
        }
        admitted.extend(fresh.iter().cloned());

        // Close under brackets [b, y] with b ∈ ℬ admitted so far and y new.
        let mut frontier = fresh;
        while !frontier.is_empty() && !full(&basis) {
            let mut grown = Vec::new();
            let lefts: Vec<Primitive> = admitted.iter().filter(|p| p.tag == FamilyTag::B).cloned().collect();
            for y in &frontier {
                for b in &lefts {
                    if b.word == y.word {
                        continue;
                    }
                    let depth = b.depth + y.depth;
                    if depth > plan.caps.bracket_depth {
                        cap_hit = true;
                        continue;
                    }
                    let field = eval.ad(&b.word, &y.field);
                    if field.is_structurally_zero() || !basis.offer(&field) {
                        continue;
                    }
                    pass_admitted = true;
                    let c = Primitive {
                        tag: FamilyTag::C,
                        word: BracketWord::bracket(b.word.clone(), y.word.clone()),
                        field,
                        adz_power: 0,
                        depth,
                    };
                    entries.push(c.clone());
                    grown.push(c);
                    if full(&basis) {
                        break;
                    }
                }
            }
            admitted.extend(grown.iter().cloned());
            frontier = grown;
        }

        if !plan.exhaustive && !pass_admitted {
            break;
        }
        level = next;
    }
    if full(&basis) {
        cap_hit = false;
    }
    Ok((PrimitiveSet { entries, cap_hit }, basis))
}

/// Enumerates `Z`, the vertical lifts `𝒜` of `sym` (a generating set of the
/// symmetric closure), `ℬ = {ad_Z^l(A)}` up to the cap and brackets of
/// `ℬ`-elements (`𝒞`). All nonzero `Z`, `𝒜` and `ℬ` elements are listed;
/// `𝒞` elements are kept only when they raise the rank at one of `points`.
pub fn primitive_generators(
    calc: &SplitCalculus,
    sym: &[VectorField],
    caps: Caps,
    points: &[Binding],
) -> Result<PrimitiveSet, TangentError> {
    let plan = Plan {
        caps,
        points,
        bound: 2 * calc.dim(),
        exhaustive: true,
    };
    enumerate(calc, sym, &plan).map(|(set, _)| set)
}

/// Total, horizontal and vertical rank of the span of the primitive
/// generators at `p`. Enumeration stops early once the rank reaches
/// `bound` (at most `2n`).
pub fn accessibility_space(
    calc: &SplitCalculus,
    sym: &[VectorField],
    p: &TangentPoint,
    caps: Caps,
    bound: Option<usize>,
) -> Result<AccessRanks, TangentError> {
    let n = calc.dim();
    let points = [p.binding(calc)?];
    let plan = Plan {
        caps,
        points: &points,
        bound: bound.unwrap_or(2 * n).min(2 * n),
        exhaustive: false,
    };
    let (set, basis) = enumerate(calc, sym, &plan)?;
    let rows = &basis.rows[0];
    let total = basis.ranks[0];
    let hor: Vec<Vec<f64>> = rows.iter().map(|r| r[..n].to_vec()).collect();
    let horizontal = normalized_rank(&hor, DEFAULT_RANK_TOL);
    Ok(AccessRanks {
        total,
        horizontal,
        vertical: total - horizontal,
        cap_hit: set.cap_hit,
        generators: rows.len(),
    })
}

/// `A_0, …, A_{k−1}` with `A_0 = 1`, `A_{k−1} = k − 1`, `A_1^{(k)} = A_1^{(k−1)}`
/// and `A_j^{(k)} = A_j^{(k−1)} + A_{j−1}^{(k−1)}` for `2 ≤ j ≤ k − 2`.
pub fn recursion_coefficients(k: usize) -> Result<Vec<u64>, TangentError> {
    if k < 2 {
        return Err(TangentError::RecursionOrder(k));
    }
    let mut row = vec![1, 1];
    for m in 3..=k {
        let mut next = vec![0; m];
        next[0] = 1;
        next[1] = row[1];
        for j in 2..=m - 2 {
            next[j] = row[j] + row[j - 1];
        }
        next[m - 1] = (m - 1) as u64;
        row = next;
    }
    Ok(row)
}
