//! Distributions as generator lists: sampled ranks, symmetric and Lie closures
//! by rank-admission saturation, and restriction / invariance verdicts.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::{Chart, Connection, GeometryError, VectorField};
use crate::numeric::{numeric_rank, DEFAULT_RANK_TOL};
use crate::symcore::{Binding, EvalError, Program};

pub const DEFAULT_SAMPLE_COUNT: usize = 12;
pub const DEFAULT_SAMPLE_SEED: u64 = 0x00ac_c355;

/// How a generator arose.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Input,
    /// `⟨g_a : g_b⟩` of earlier generators.
    Symmetric {
        left: usize,
        right: usize,
    },
    /// `[g_a, g_b]` of earlier generators.
    Bracket {
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub field: VectorField,
    pub label: String,
    pub provenance: Provenance,
    /// 0 for inputs, otherwise one more than the deeper operand.
    pub depth: usize,
}

/// A distribution given by a finite list of generators on one chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    chart: Chart,
    gens: Vec<Generator>,
}

impl Distribution {
    /// Labelled input generators.
    pub fn new(chart: &Chart, fields: Vec<(String, VectorField)>) -> Result<Distribution, GeometryError> {
        let mut gens = Vec::with_capacity(fields.len());
        for (label, field) in fields {
            if field.chart() != chart {
                return Err(GeometryError::ChartMismatch);
            }
            gens.push(Generator {
                field,
                label,
                provenance: Provenance::Input,
                depth: 0,
            });
        }
        Ok(Distribution {
            chart: chart.clone(),
            gens,
        })
    }

    /// Inputs labelled `G1, G2, …`.
    pub fn from_fields(chart: &Chart, fields: Vec<VectorField>) -> Result<Distribution, GeometryError> {
        Distribution::new(
            chart,
            fields
                .into_iter()
                .enumerate()
                .map(|(i, f)| (format!("G{}", i + 1), f))
                .collect(),
        )
    }

    pub fn empty(chart: &Chart) -> Distribution {
        Distribution {
            chart: chart.clone(),
            gens: Vec::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn fields(&self) -> Vec<VectorField> {
        self.gens.iter().map(|g| g.field.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    fn push(&mut self, g: Generator) {
        self.gens.push(g);
    }

    /// Component rows of all generators at `b`.
    pub fn evaluate(&self, b: &Binding) -> Result<Vec<Vec<f64>>, EvalError> {
        self.gens.iter().map(|g| g.field.evaluate(b)).collect()
    }
}

/// Fixed evaluation points shared by every rank decision on a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    points: Vec<Binding>,
    seed: u64,
}

impl SampleSet {
    /// `count` random coordinate values (angles in `[0, 2π)`, others in
    /// `[-1, 1]`); parameters take the values in `params`, and any parameter
    /// missing there is drawn from `[0.5, 2]`.
    pub fn new(chart: &Chart, count: usize, seed: u64, params: &Binding) -> SampleSet {
        let mut points = chart.sample_bindings(count, seed, None);
        for p in &mut points {
            p.extend(params);
        }
        SampleSet { points, seed }
    }

    pub fn standard(chart: &Chart, params: &Binding) -> SampleSet {
        SampleSet::new(chart, DEFAULT_SAMPLE_COUNT, DEFAULT_SAMPLE_SEED, params)
    }

    pub fn from_points(points: Vec<Binding>) -> SampleSet {
        SampleSet { points, seed: 0 }
    }

    pub fn points(&self) -> &[Binding] {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Ranks of a distribution over a sample set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankProfile {
    /// `None` where some generator failed to evaluate.
    pub ranks: Vec<Option<usize>>,
    pub generic: usize,
    /// Sample indices whose rank is below the generic rank.
    pub degenerate: Vec<usize>,
}

/// Rank of the generators' component matrix at `b`.
pub fn pointwise_rank(d: &Distribution, b: &Binding, tol: f64) -> Result<usize, EvalError> {
    Ok(numeric_rank(&d.evaluate(b)?, tol))
}

fn profile_from(ranks: Vec<Option<usize>>) -> RankProfile {
    let generic = ranks.iter().flatten().copied().max().unwrap_or(0);
    let degenerate = ranks
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_none_or(|r| r < generic))
        .map(|(i, _)| i)
        .collect();
    RankProfile {
        ranks,
        generic,
        degenerate,
    }
}

pub fn rank_profile(d: &Distribution, samples: &SampleSet, tol: f64) -> RankProfile {
    let table = ValueTable::build(d, samples);
    profile_from(table.ranks(None, tol))
}

/// Generator values at every sample point, grown as generators are admitted.
struct ValueTable<'a> {
    samples: &'a SampleSet,
    slots: Vec<crate::symcore::Symbol>,
    /// `rows[s]` holds one row per generator, or `None` once a value failed.
    rows: Vec<Option<Vec<Vec<f64>>>>,
}

impl<'a> ValueTable<'a> {
    fn build(d: &Distribution, samples: &'a SampleSet) -> ValueTable<'a> {
        let mut slots = d.chart().coords().to_vec();
        slots.extend(d.chart().params().iter().cloned());
        let mut t = ValueTable {
            samples,
            slots,
            rows: vec![Some(Vec::new()); samples.points().len()],
        };
        for g in d.generators() {
            let vals = t.values(&g.field);
            t.append(vals);
        }
        t
    }

    fn values(&self, f: &VectorField) -> Vec<Option<Vec<f64>>> {
        let prog = Program::compile(f.components(), &self.slots);
        self.samples
            .points()
            .iter()
            .map(|b| {
                let v = match &prog {
                    Ok(p) => {
                        let x: Vec<f64> = self.slots.iter().map(|s| b.get(s).unwrap_or(f64::NAN)).collect();
                        p.eval(&x)
                    }
                    Err(_) => f.evaluate(b).ok()?,
                };
                v.iter().all(|x| x.is_finite()).then_some(v)
            })
            .collect()
    }

    fn append(&mut self, vals: Vec<Option<Vec<f64>>>) {
        for (slot, v) in self.rows.iter_mut().zip(vals) {
            match (slot.as_mut(), v) {
                (Some(rows), Some(v)) => rows.push(v),
                _ => *slot = None,
            }
        }
    }

    /// Per-sample ranks, optionally with an extra candidate row appended.
    fn ranks(&self, extra: Option<&[Option<Vec<f64>>]>, tol: f64) -> Vec<Option<usize>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(s, rows)| {
                let rows = rows.as_ref()?;
                match extra {
                    None => Some(numeric_rank(rows, tol)),
                    Some(e) => {
                        let mut m = rows.clone();
                        m.push(e[s].clone()?);
                        Some(numeric_rank(&m, tol))
                    }
                }
            })
            .collect()
    }

    fn generic(&self, tol: f64) -> usize {
        self.ranks(None, tol).into_iter().flatten().max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosureOptions {
    /// Largest admissible product depth; `None` means `2n + 2`.
    pub depth_cap: Option<usize>,
    pub tol: f64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        Self {
            depth_cap: None,
            tol: DEFAULT_RANK_TOL,
        }
    }
}

/// Result of a saturation run.
#[derive(Clone, Debug, PartialEq)]
pub struct Closure {
    pub distribution: Distribution,
    pub profile: RankProfile,
    /// A pass completed without admitting anything.
    pub saturated: bool,
    /// Candidates beyond the depth cap were skipped while rank was not full.
    pub cap_hit: bool,
}

impl Closure {
    pub fn rank(&self) -> usize {
        self.profile.generic
    }

    /// The closure is known to be complete (full rank or saturated).
    pub fn conclusive(&self) -> bool {
        self.profile.generic == self.distribution.chart().dim() || (self.saturated && !self.cap_hit)
    }
}

#[derive(Clone, Copy)]
enum Product<'c> {
    Symmetric(&'c Connection),
    Bracket,
}

fn saturate(
    product: Product<'_>,
    gens: &Distribution,
    samples: &SampleSet,
    opts: &ClosureOptions,
) -> Result<Closure, GeometryError> {
    let n = gens.chart().dim();
    let cap = opts.depth_cap.unwrap_or(2 * n + 2);
    let mut d = gens.clone();
    let mut table = ValueTable::build(&d, samples);
    let mut rank = table.generic(opts.tol);
    let mut fresh_from = 0;
    let mut cap_hit = false;
    let mut saturated = false;
    while rank < n {
        let len = d.len();
        let mut admitted = false;
        for j in 0..len {
            for i in 0..len {
                let ordered = match product {
                    Product::Symmetric(_) => i <= j,
                    Product::Bracket => i < j,
                };
                if !ordered || (i < fresh_from && j < fresh_from) {
                    continue;
                }
                let (gi, gj) = (&d.gens[i], &d.gens[j]);
                let depth = 1 + gi.depth.max(gj.depth);
                if depth > cap {
                    cap_hit = true;
                    continue;
                }
                let (field, label, provenance) = match product {
                    Product::Symmetric(conn) => (
                        conn.symmetric_product(&gi.field, &gj.field)?,
                        format!("<{}:{}>", gi.label, gj.label),
                        Provenance::Symmetric { left: i, right: j },
                    ),
                    Product::Bracket => (
                        gi.field.lie_bracket(&gj.field)?,
                        format!("[{},{}]", gi.label, gj.label),
                        Provenance::Bracket { left: i, right: j },
                    ),
                };
                if field.is_structurally_zero() {
                    continue;
                }
                let vals = table.values(&field);
                let cand = table
                    .ranks(Some(&vals), opts.tol)
                    .into_iter()
                    .flatten()
                    .max()
                    .unwrap_or(0);
                if cand > rank {
                    d.push(Generator {
                        field,
                        label,
                        provenance,
                        depth,
                    });
                    table.append(vals);
                    rank = cand;
                    admitted = true;
                    if rank == n {
                        break;
                    }
                }
            }
            if rank == n {
                break;
            }
        }
        fresh_from = len;
        if !admitted {
            saturated = true;
            break;
        }
    }
    let profile = profile_from(table.ranks(None, opts.tol));
    let full = profile.generic == n;
    Ok(Closure {
        distribution: d,
        profile,
        saturated: saturated || full,
        cap_hit: cap_hit && !full,
    })
}

/// Saturates `gens` under the symmetric product of `conn`, admitting a
/// product only when it raises the generic rank on `samples`.
pub fn sym_closure(
    conn: &Connection,
    gens: &Distribution,
    samples: &SampleSet,
    opts: &ClosureOptions,
) -> Result<Closure, GeometryError> {
    if conn.chart() != gens.chart() {
        return Err(GeometryError::ChartMismatch);
    }
    saturate(Product::Symmetric(conn), gens, samples, opts)
}

/// Saturates `gens` under the Lie bracket, admitting by rank increase.
pub fn lie_closure(gens: &Distribution, samples: &SampleSet, opts: &ClosureOptions) -> Result<Closure, GeometryError> {
    saturate(Product::Bracket, gens, samples, opts)
}

/// Where a membership test failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Index of the sample point.
    pub sample: usize,
    /// Human-readable name of the offending field, e.g. `nabla_d_y(G1)`.
    pub description: String,
    /// The offending field's components at the sample point.
    pub value: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails {
        witness: Witness,
    },
    /// The distribution's rank drops at these sample points.
    Degenerate {
        points: Vec<usize>,
    },
    NotApplicable,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Fails { witness } => write!(f, "fails ({} at sample {})", witness.description, witness.sample),
            Verdict::Degenerate { points } => write!(f, "degenerate at samples {points:?}"),
            Verdict::NotApplicable => f.write_str("not applicable"),
        }
    }
}

/// Checks each candidate field for membership in `d` at every sample point.
fn membership_verdict(
    d: &Distribution,
    samples: &SampleSet,
    tol: f64,
    candidates: impl Iterator<Item = Result<(String, VectorField), GeometryError>>,
) -> Result<Verdict, GeometryError> {
    let table = ValueTable::build(d, samples);
    let base = table.ranks(None, tol);
    let profile = profile_from(base.clone());
    if !profile.degenerate.is_empty() {
        return Ok(Verdict::Degenerate {
            points: profile.degenerate,
        });
    }
    for cand in candidates {
        let (description, field) = cand?;
        let vals = table.values(&field);
        let with = table.ranks(Some(&vals), tol);
        for (s, (r0, r1)) in base.iter().zip(&with).enumerate() {
            match (r0, r1) {
                (Some(a), Some(b)) if b > a => {
                    return Ok(Verdict::Fails {
                        witness: Witness {
                            sample: s,
                            description,
                            value: vals[s].clone().unwrap_or_default(),
                        },
                    })
                }
                (Some(_), None) => {
                    return Ok(Verdict::Degenerate { points: vec![s] });
                }
                _ => {}
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Whether `∇_{∂_i} Y_b` lies in `D` for every generator and coordinate field.
pub fn restricts_to(
    conn: &Connection,
    d: &Distribution,
    samples: &SampleSet,
    tol: f64,
) -> Result<Verdict, GeometryError> {
    let chart = d.chart().clone();
    let cands = (0..chart.dim()).flat_map(move |i| {
        let chart = chart.clone();
        d.generators().iter().map(move |g| {
            let di = VectorField::coordinate(&chart, i);
            let f = conn.covariant_derivative(&di, &g.field)?;
            Ok((format!("nabla_d_{}({})", chart.coord(i), g.label), f))
        })
    });
    membership_verdict(d, samples, tol, cands)
}

/// Whether every `⟨Y_a : Y_b⟩` of generators lies in `D`.
pub fn geodesically_invariant(
    conn: &Connection,
    d: &Distribution,
    samples: &SampleSet,
    tol: f64,
) -> Result<Verdict, GeometryError> {
    let gens = d.generators();
    let cands = (0..gens.len()).flat_map(move |a| {
        (a..gens.len()).map(move |b| {
            let f = conn.symmetric_product(&gens[a].field, &gens[b].field)?;
            Ok((format!("<{}:{}>", gens[a].label, gens[b].label), f))
        })
    });
    membership_verdict(d, samples, tol, cands)
}

const CURVATURE_TRIPLES: usize = 3;

/// Whether `R(u, v) w ∈ D_q` for random `u, v ∈ T_qQ` and `w ∈ D_q` at each
/// sample point. Only meaningful when `conn` restricts to `d`.
pub fn curvature_invariance_check(
    conn: &Connection,
    d: &Distribution,
    samples: &SampleSet,
    tol: f64,
) -> Result<Verdict, GeometryError> {
    if !restricts_to(conn, d, samples, tol)?.holds() {
        return Ok(Verdict::NotApplicable);
    }
    let n = d.chart().dim();
    let riem = conn.riemann();
    let mut rng = ChaCha8Rng::seed_from_u64(samples.seed() ^ 0x5a5a);
    for (s, b) in samples.points().iter().enumerate() {
        let rows = d.evaluate(b)?;
        let base = numeric_rank(&rows, tol);
        let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for p in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        if !riem[p][j][k][l].is_zero() {
                            r[p][j][k][l] = riem[p][j][k][l].evaluate(b)?;
                        }
                    }
                }
            }
        }
        for _ in 0..CURVATURE_TRIPLES {
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut w = vec![0.0; n];
            for row in &rows {
                let c: f64 = rng.gen_range(-1.0..1.0);
                for (wi, ri) in w.iter_mut().zip(row) {
                    *wi += c * ri;
                }
            }
            let out: Vec<f64> = (0..n)
                .map(|p| {
                    let mut acc = 0.0;
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                acc += r[p][j][k][l] * w[j] * u[k] * v[l];
                            }
                        }
                    }
                    acc
                })
                .collect();
            let mut with = rows.clone();
            with.push(out.clone());
            if numeric_rank(&with, tol) > base {
                return Ok(Verdict::Fails {
                    witness: Witness {
                        sample: s,
                        description: "R(u,v)w".into(),
                        value: out,
                    },
                });
            }
        }
    }
    Ok(Verdict::Holds)
}
