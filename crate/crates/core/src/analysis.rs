//! Accessibility verdicts for affine connection control systems at a point
//! of the tangent bundle, with explicit hypothesis checks.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::distributions::{
    lie_closure, pointwise_rank, restricts_to, sym_closure, ClosureOptions, Distribution, SampleSet, Verdict,
    DEFAULT_SAMPLE_COUNT, DEFAULT_SAMPLE_SEED,
};
use crate::geometry::{constrained_connection, levi_civita, Chart, Connection, GeometryError, Metric, VectorField};
use crate::numeric::{numeric_rank, DEFAULT_RANK_TOL};
use crate::symcore::{Binding, EvalError, Expr};
use crate::tangent::{accessibility_space, Caps, SplitCalculus, TangentError, TangentPoint};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Tangent(#[from] TangentError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("unknown input `{0}`")]
    UnknownInput(String),
    #[error("no points to analyze")]
    NoPoints,
}

/// Where the connection came from; kept so a model can be written back out.
#[derive(Clone, Debug)]
pub enum ConnectionSource {
    /// Levi-Civita connection of a metric.
    Metric(Metric),
    /// Coordinate Christoffel symbols given directly.
    Christoffels,
    /// Constrained connection of a metric and a constraint distribution.
    Constrained { metric: Metric },
}

/// An affine connection control system `(Q, ∇, 𝒴)` on one chart.
#[derive(Clone, Debug)]
pub struct SystemModel {
    name: String,
    chart: Chart,
    connection: Connection,
    source: ConnectionSource,
    inputs: Distribution,
    constraint: Option<Distribution>,
    params: Binding,
    warnings: Vec<String>,
}

impl SystemModel {
    /// A system with a given connection.
    pub fn new(
        name: &str,
        connection: Connection,
        inputs: Vec<(String, VectorField)>,
        params: Binding,
    ) -> Result<SystemModel, AnalysisError> {
        let chart = connection.chart().clone();
        let inputs = Distribution::new(&chart, inputs)?;
        Ok(SystemModel {
            name: name.into(),
            chart,
            connection,
            source: ConnectionSource::Christoffels,
            inputs,
            constraint: None,
            params,
            warnings: Vec::new(),
        })
    }

    /// A system on a Riemannian manifold, with the Levi-Civita connection.
    pub fn riemannian(
        name: &str,
        metric: Metric,
        inputs: Vec<(String, VectorField)>,
        params: Binding,
    ) -> Result<SystemModel, AnalysisError> {
        let mut s = SystemModel::new(name, levi_civita(&metric)?, inputs, params)?;
        s.source = ConnectionSource::Metric(metric);
        Ok(s)
    }

    /// A constrained system: the connection is the constrained connection of
    /// `metric` over `span(constraint)`.
    pub fn constrained(
        name: &str,
        metric: Metric,
        constraint: Vec<(String, VectorField)>,
        inputs: Vec<(String, VectorField)>,
        params: Binding,
    ) -> Result<SystemModel, AnalysisError> {
        let gens: Vec<VectorField> = constraint.iter().map(|(_, f)| f.clone()).collect();
        let conn = constrained_connection(&metric, &gens)?;
        let mut s = SystemModel::new(name, conn, inputs, params)?;
        s.constraint = Some(Distribution::new(metric.chart(), constraint)?);
        s.source = ConnectionSource::Constrained { metric };
        Ok(s)
    }

    pub fn with_warning(mut self, w: impl Into<String>) -> SystemModel {
        self.warnings.push(w.into());
        self
    }

    /// The same system restricted to the named inputs, in the given order.
    pub fn with_inputs(&self, labels: &[&str]) -> Result<SystemModel, AnalysisError> {
        let mut picked = Vec::new();
        for l in labels {
            let g = self
                .inputs
                .generators()
                .iter()
                .find(|g| g.label == *l)
                .ok_or_else(|| AnalysisError::UnknownInput(l.to_string()))?;
            picked.push((g.label.clone(), g.field.clone()));
        }
        let mut s = self.clone();
        s.inputs = Distribution::new(&self.chart, picked)?;
        Ok(s)
    }

    /// The same system with every input multiplied by `num / den`.
    pub fn scaled_inputs(&self, num: i64, den: i64) -> Result<SystemModel, AnalysisError> {
        let k = Expr::rational(num, den);
        let fields = self
            .inputs
            .generators()
            .iter()
            .map(|g| (g.label.clone(), g.field.scale(&k)))
            .collect();
        let mut s = self.clone();
        s.inputs = Distribution::new(&self.chart, fields)?;
        Ok(s)
    }

    /// Overrides parameter values by name; unknown names are ignored.
    pub fn with_params(&self, values: &BTreeMap<String, f64>) -> SystemModel {
        let mut s = self.clone();
        for p in self.chart.params() {
            if let Some(v) = values.get(p.name()) {
                s.params.set(p.clone(), *v);
            }
        }
        s
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn connection(&self) -> &Connection {
        &self.connection
    }

    pub fn source(&self) -> &ConnectionSource {
        &self.source
    }

    pub fn inputs(&self) -> &Distribution {
        &self.inputs
    }

    pub fn constraint(&self) -> Option<&Distribution> {
        self.constraint.as_ref()
    }

    /// Parameter values (defaults unless overridden).
    pub fn params(&self) -> &Binding {
        &self.params
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The standard sample set with this system's parameter values.
    pub fn samples(&self, seed: u64) -> SampleSet {
        SampleSet::new(&self.chart, DEFAULT_SAMPLE_COUNT, seed, &self.params)
    }

    /// A tangent point at coordinate values `q` with velocity `v`; parameters
    /// are filled in from the system.
    pub fn point(&self, q: &[f64], v: &[f64]) -> TangentPoint {
        let mut base = self.params.clone();
        for (s, x) in self.chart.coords().iter().zip(q) {
            base.set(s.clone(), *x);
        }
        TangentPoint::new(base, v.to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Inconclusive,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Zero velocity.
    #[serde(rename = "zero-velocity-LM97")]
    ZeroVelocity,
    /// Nonzero velocity in the symmetric closure, connection restricting to it.
    #[serde(rename = "nonzero-restricted")]
    NonzeroRestricted,
    #[serde(rename = "rank-only")]
    RankOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypotheses {
    pub velocity_in_sym: Verdict,
    pub connection_restricts: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ranks {
    pub n: usize,
    /// Rank of the constraint distribution at the point, when there is one.
    pub constraint: Option<usize>,
    pub sym: usize,
    pub lie_of_sym: usize,
    pub acc_total: usize,
    pub acc_horizontal: usize,
    pub acc_vertical: usize,
}

impl Ranks {
    /// The rank playing the role of `dim Q`: the constraint rank for
    /// constrained systems, `n` otherwise.
    pub fn full(&self) -> usize {
        self.constraint.unwrap_or(self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub accessible: Answer,
    pub configuration_accessible: Answer,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CapFlags {
    /// The symmetric closure stopped at its depth cap below full rank.
    pub sym_cap_hit: bool,
    pub lie_cap_hit: bool,
    /// Primitive-bracket enumeration stopped at a cap below its bound.
    pub acc_cap_hit: bool,
}

impl CapFlags {
    pub fn any(&self) -> bool {
        self.sym_cap_hit || self.lie_cap_hit || self.acc_cap_hit
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointReport {
    pub q: BTreeMap<String, f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccessReport {
    pub system: String,
    pub point: PointReport,
    pub parameters: BTreeMap<String, f64>,
    pub hypotheses: Hypotheses,
    pub ranks: Ranks,
    pub verdicts: Verdicts,
    pub method: Method,
    pub caps: CapFlags,
    pub warnings: Vec<String>,
}

/// Knobs for [`analyze`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalysisOptions {
    /// Primitive-bracket caps; `None` means `2n` each.
    pub caps: Option<Caps>,
    pub closure_depth_cap: Option<usize>,
    pub tol: f64,
    pub sample_seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            caps: None,
            closure_depth_cap: None,
            tol: DEFAULT_RANK_TOL,
            sample_seed: DEFAULT_SAMPLE_SEED,
        }
    }
}

/// Generators and ranks of the closures that feed a report.
#[derive(Clone, Debug)]
pub struct Closures {
    pub sym: crate::distributions::Closure,
    pub lie_of_sym: crate::distributions::Closure,
    pub restricts: Verdict,
}

/// Symmetric closure, its Lie closure and the restriction hypothesis.
pub fn closures(system: &SystemModel, opts: &AnalysisOptions) -> Result<Closures, AnalysisError> {
    let samples = system.samples(opts.sample_seed);
    let copts = ClosureOptions {
        depth_cap: opts.closure_depth_cap,
        tol: opts.tol,
    };
    let sym = sym_closure(system.connection(), system.inputs(), &samples, &copts)?;
    let lie_of_sym = lie_closure(&sym.distribution, &samples, &copts)?;
    let restricts = if sym.distribution.is_empty() {
        Verdict::NotApplicable
    } else {
        restricts_to(system.connection(), &sym.distribution, &samples, opts.tol)?
    };
    Ok(Closures {
        sym,
        lie_of_sym,
        restricts,
    })
}

/// Whether `v ∈ span(d)` at the base point.
fn velocity_membership(d: &Distribution, p: &TangentPoint, tol: f64) -> Result<Verdict, AnalysisError> {
    if p.is_zero() {
        return Ok(Verdict::Holds);
    }
    let rows = d.evaluate(&p.base)?;
    let base = numeric_rank(&rows, tol);
    let mut with = rows;
    with.push(p.velocity.clone());
    if numeric_rank(&with, tol) > base {
        Ok(Verdict::Fails {
            witness: crate::distributions::Witness {
                sample: 0,
                description: "v".into(),
                value: p.velocity.clone(),
            },
        })
    } else {
        Ok(Verdict::Holds)
    }
}

/// Analyzes accessibility of `system` from `p`.
pub fn analyze(system: &SystemModel, p: &TangentPoint, opts: &AnalysisOptions) -> Result<AccessReport, AnalysisError> {
    let c = closures(system, opts)?;
    analyze_with(system, &c, p, opts)
}

/// [`analyze`] with precomputed closures.
pub fn analyze_with(
    system: &SystemModel,
    c: &Closures,
    p: &TangentPoint,
    opts: &AnalysisOptions,
) -> Result<AccessReport, AnalysisError> {
    let chart = system.chart();
    let n = chart.dim();
    let mut base = system.params().clone();
    base.extend(&p.base);
    let p = TangentPoint::new(base, p.velocity.clone());
    if p.velocity.len() != n {
        return Err(TangentError::VelocityLength {
            expected: n,
            got: p.velocity.len(),
        }
        .into());
    }

    let sym = pointwise_rank(&c.sym.distribution, &p.base, opts.tol)?;
    let lie_of_sym = pointwise_rank(&c.lie_of_sym.distribution, &p.base, opts.tol)?;
    let constraint = match system.constraint() {
        Some(d) => Some(pointwise_rank(d, &p.base, opts.tol)?),
        None => None,
    };
    let velocity_in_sym = velocity_membership(&c.sym.distribution, &p, opts.tol)?;
    let hypotheses = Hypotheses {
        velocity_in_sym,
        connection_restricts: c.restricts.clone(),
    };
    let both = hypotheses.velocity_in_sym.holds() && hypotheses.connection_restricts.holds();

    let calc = SplitCalculus::new(system.connection());
    let caps = opts.caps.unwrap_or(Caps::for_dim(n));
    let bound = if p.is_zero() || both { n + sym } else { 2 * n };
    let acc = accessibility_space(&calc, &c.sym.distribution.fields(), &p, caps, Some(bound))?;

    let ranks = Ranks {
        n,
        constraint,
        sym,
        lie_of_sym,
        acc_total: acc.total,
        acc_horizontal: acc.horizontal,
        acc_vertical: acc.vertical,
    };
    let caps = CapFlags {
        sym_cap_hit: c.sym.cap_hit && !c.sym.conclusive(),
        lie_cap_hit: c.lie_of_sym.cap_hit && !c.lie_of_sym.conclusive(),
        acc_cap_hit: acc.cap_hit,
    };
    let method = if p.is_zero() {
        Method::ZeroVelocity
    } else if both {
        Method::NonzeroRestricted
    } else {
        Method::RankOnly
    };
    let verdicts = derive_verdicts(method, &ranks, &caps);

    let mut warnings = system.warnings().to_vec();
    let degenerate: Vec<usize> = c.sym.profile.degenerate.clone();
    if !degenerate.is_empty() {
        warnings.push(format!("symmetric closure rank drops at sample points {degenerate:?}"));
    }
    if sym < c.sym.rank() {
        warnings.push(format!(
            "symmetric closure has rank {sym} here, below its generic rank {}",
            c.sym.rank()
        ));
    }

    Ok(AccessReport {
        system: system.name().into(),
        point: PointReport {
            q: chart
                .coords()
                .iter()
                .map(|s| (s.name().to_string(), p.base.get(s).unwrap_or(f64::NAN)))
                .collect(),
            v: p.velocity.clone(),
        },
        parameters: chart
            .params()
            .iter()
            .filter_map(|s| p.base.get(s).map(|v| (s.name().to_string(), v)))
            .collect(),
        hypotheses,
        ranks,
        verdicts,
        method,
        caps,
        warnings,
    })
}

/// Verdicts implied by ranks and flags.
///
/// At zero velocity: accessible iff `sym` is full, configuration accessible
/// iff `lie_of_sym = n`. At nonzero velocity with both hypotheses: accessible
/// iff `sym` is full and `acc_total = n + sym`; configuration accessible iff
/// `acc_total = n + sym`. Otherwise only full ranks certify anything. A
/// negative answer that rests on a capped enumeration becomes inconclusive.
pub fn derive_verdicts(method: Method, r: &Ranks, caps: &CapFlags) -> Verdicts {
    let negative = if caps.any() { Answer::Inconclusive } else { Answer::No };
    let answer = |ok: bool| if ok { Answer::Yes } else { negative };
    match method {
        Method::ZeroVelocity => Verdicts {
            accessible: answer(r.sym == r.full()),
            configuration_accessible: answer(r.lie_of_sym == r.n),
        },
        Method::NonzeroRestricted => {
            let tangent = r.acc_total == r.n + r.sym;
            Verdicts {
                accessible: answer(r.sym == r.full() && tangent),
                configuration_accessible: answer(tangent),
            }
        }
        Method::RankOnly => {
            let full = r.acc_total == 2 * r.n;
            Verdicts {
                accessible: if full { Answer::Yes } else { Answer::Inconclusive },
                configuration_accessible: if full || r.acc_horizontal == r.n {
                    Answer::Yes
                } else {
                    Answer::Inconclusive
                },
            }
        }
    }
}

/// Recomputes a report's verdicts from its own ranks and flags and checks the
/// rank bounds.
pub fn check_report(report: &AccessReport) -> Result<(), String> {
    let r = &report.ranks;
    let vertical_cap = if report.method == Method::RankOnly { r.n } else { r.sym };
    if r.acc_vertical > vertical_cap || r.sym > r.n || r.acc_horizontal > r.n || r.acc_total > 2 * r.n {
        return Err(format!("rank bounds violated: {r:?}"));
    }
    if r.acc_horizontal + r.acc_vertical != r.acc_total {
        return Err(format!("horizontal and vertical ranks do not add up: {r:?}"));
    }
    let expected = derive_verdicts(report.method, r, &report.caps);
    if expected != report.verdicts {
        return Err(format!(
            "verdicts {:?} do not follow from ranks ({expected:?})",
            report.verdicts
        ));
    }
    let zero = report.point.v.iter().all(|v| *v == 0.0);
    let method_ok = match report.method {
        Method::ZeroVelocity => zero,
        Method::NonzeroRestricted => {
            !zero && report.hypotheses.velocity_in_sym.holds() && report.hypotheses.connection_restricts.holds()
        }
        Method::RankOnly => {
            !zero && !(report.hypotheses.velocity_in_sym.holds() && report.hypotheses.connection_restricts.holds())
        }
    };
    if !method_ok {
        return Err(format!(
            "method {:?} does not match point and hypotheses",
            report.method
        ));
    }
    Ok(())
}

/// One report per point; points are analyzed in parallel. Closures are
/// computed once.
pub fn analyze_batch(
    system: &SystemModel,
    points: &[TangentPoint],
    opts: &AnalysisOptions,
) -> Result<Vec<Result<AccessReport, AnalysisError>>, AnalysisError> {
    if points.is_empty() {
        return Err(AnalysisError::NoPoints);
    }
    let c = closures(system, opts)?;
    Ok(points.par_iter().map(|p| analyze_with(system, &c, p, opts)).collect())
}

/// A velocity `Σ cᵢ gᵢ(q)` built from the symmetric closure's generators.
pub fn velocity_in_span(d: &Distribution, base: &Binding, coeffs: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    let rows = d.evaluate(base)?;
    let n = d.chart().dim();
    let mut v = vec![0.0; n];
    for (row, c) in rows.iter().zip(coeffs) {
        for (vi, ri) in v.iter_mut().zip(row) {
            *vi += c * ri;
        }
    }
    Ok(v)
}
