//! Numeric cross-check: integrate `Υ' = Z(Υ) + uᵃ Y_a^V(Υ)` with RK4 under
//! random piecewise-constant controls and estimate the dimension of the
//! endpoint cloud.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::SystemModel;
use crate::numeric::{singular_values, ABSOLUTE_FLOOR};
use crate::symcore::{EvalError, Program, Symbol};
use crate::tangent::{geodesic_spray, lift, LiftMode, TangentPoint};

pub const DEFAULT_SWITCHES: usize = 4;
pub const DEFAULT_DIM_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum ReachError {
    #[error("step must be positive and no longer than the horizon (dt = {dt}, T = {horizon})")]
    BadStep { dt: f64, horizon: f64 },
    #[error("switch times must start at 0 and strictly increase")]
    BadSchedule,
    #[error("control has {got} components, system has {expected} inputs")]
    ControlLength { expected: usize, got: usize },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("{dropped} of {total} sample trajectories blew up")]
    TooManyDropped { dropped: usize, total: usize },
    #[error("initial state has {got} entries, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
}

/// Piecewise-constant control: `values[i]` holds on `[times[i], times[i+1])`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlSignal {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl ControlSignal {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<ControlSignal, ReachError> {
        let ok = !times.is_empty()
            && times.len() == values.len()
            && times[0] == 0.0
            && times.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(ReachError::BadSchedule);
        }
        let r = values[0].len();
        if let Some(bad) = values.iter().find(|v| v.len() != r) {
            return Err(ReachError::ControlLength {
                expected: r,
                got: bad.len(),
            });
        }
        Ok(ControlSignal { times, values })
    }

    pub fn constant(u: Vec<f64>) -> ControlSignal {
        ControlSignal {
            times: vec![0.0],
            values: vec![u],
        }
    }

    /// `switches` random switch times in `(0, horizon)` and values uniform in
    /// `[-1, 1]^r`.
    pub fn random<R: Rng>(r: usize, horizon: f64, switches: usize, rng: &mut R) -> ControlSignal {
        let mut times: Vec<f64> = (0..switches).map(|_| rng.gen_range(0.0..horizon)).collect();
        times.push(0.0);
        times.sort_by(f64::total_cmp);
        times.dedup();
        let values = times
            .iter()
            .map(|_| (0..r).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .collect();
        ControlSignal { times, values }
    }

    pub fn inputs(&self) -> usize {
        self.values[0].len()
    }

    pub fn at(&self, t: f64) -> &[f64] {
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        &self.values[i]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `(q, v)` at each time.
    pub states: Vec<Vec<f64>>,
    /// Integration stopped at a non-finite state.
    pub blew_up: bool,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has an initial state")
    }
}

/// The lifted vector fields compiled for fast evaluation.
pub struct LiftedDynamics {
    n: usize,
    slots: Vec<Symbol>,
    params: Vec<f64>,
    spray: Program,
    inputs: Vec<Program>,
}

impl LiftedDynamics {
    pub fn new(system: &SystemModel) -> Result<LiftedDynamics, ReachError> {
        let conn = system.connection();
        let chart = system.chart();
        let mut slots = chart.doubled().coords().to_vec();
        let mut params = Vec::new();
        for p in chart.params() {
            slots.push(p.clone());
            params.push(system.params().require(p)?);
        }
        let spray = Program::compile(geodesic_spray(conn).components(), &slots)?;
        let inputs = system
            .inputs()
            .generators()
            .iter()
            .map(|g| {
                let y = lift(&g.field, LiftMode::Vertical, conn)?;
                Ok(Program::compile(y.components(), &slots)?)
            })
            .collect::<Result<Vec<_>, ReachError>>()?;
        Ok(LiftedDynamics {
            n: chart.dim(),
            slots,
            params,
            spray,
            inputs,
        })
    }

    pub fn state_dim(&self) -> usize {
        2 * self.n
    }

    pub fn inputs(&self) -> usize {
        self.inputs.len()
    }

    /// `Z(x) + uᵃ Y_a^V(x)`.
    pub fn rhs(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        let mut vals = Vec::with_capacity(self.slots.len());
        vals.extend_from_slice(x);
        vals.extend_from_slice(&self.params);
        let mut scratch = Vec::new();
        self.spray.eval_into(&vals, &mut scratch, out);
        let mut tmp = vec![0.0; out.len()];
        for (prog, ua) in self.inputs.iter().zip(u) {
            if *ua == 0.0 {
                continue;
            }
            prog.eval_into(&vals, &mut scratch, &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += ua * t;
            }
        }
    }

    /// Classical RK4 from `x0` over `[0, horizon]` with step `dt`; the control
    /// is sampled at the start of each stage's time.
    pub fn integrate(&self, x0: &[f64], u: &ControlSignal, horizon: f64, dt: f64) -> Result<Trajectory, ReachError> {
        if dt.is_nan() || dt <= 0.0 || horizon.is_nan() || horizon < dt {
            return Err(ReachError::BadStep { dt, horizon });
        }
        if x0.len() != self.state_dim() {
            return Err(ReachError::StateLength {
                expected: self.state_dim(),
                got: x0.len(),
            });
        }
        if u.inputs() != self.inputs() {
            return Err(ReachError::ControlLength {
                expected: self.inputs(),
                got: u.inputs(),
            });
        }
        let steps = (horizon / dt).round() as usize;
        let h = horizon / steps as f64;
        let d = self.state_dim();
        let mut times = Vec::with_capacity(steps + 1);
        let mut states = Vec::with_capacity(steps + 1);
        let mut x = x0.to_vec();
        times.push(0.0);
        states.push(x.clone());
        let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
        let mut tmp = vec![0.0; d];
        for s in 0..steps {
            let t = s as f64 * h;
            self.rhs(&x, u.at(t), &mut k1);
            axpy(&x, 0.5 * h, &k1, &mut tmp);
            self.rhs(&tmp, u.at(t + 0.5 * h), &mut k2);
            axpy(&x, 0.5 * h, &k2, &mut tmp);
            self.rhs(&tmp, u.at(t + 0.5 * h), &mut k3);
            axpy(&x, h, &k3, &mut tmp);
            self.rhs(&tmp, u.at(t + h), &mut k4);
            for i in 0..d {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Ok(Trajectory {
                    times,
                    states,
                    blew_up: true,
                });
            }
            times.push(t + h);
            states.push(x.clone());
        }
        Ok(Trajectory {
            times,
            states,
            blew_up: false,
        })
    }
}

fn axpy(x: &[f64], a: f64, k: &[f64], out: &mut [f64]) {
    for ((o, xi), ki) in out.iter_mut().zip(x).zip(k) {
        *o = xi + a * ki;
    }
}

/// `(q, v)` of a tangent point in chart order.
pub fn initial_state(system: &SystemModel, p: &TangentPoint) -> Result<Vec<f64>, ReachError> {
    let mut x = Vec::with_capacity(2 * system.chart().dim());
    for s in system.chart().coords() {
        x.push(p.base.require(s)?);
    }
    if p.velocity.len() != system.chart().dim() {
        return Err(ReachError::StateLength {
            expected: system.chart().dim(),
            got: p.velocity.len(),
        });
    }
    x.extend_from_slice(&p.velocity);
    Ok(x)
}

/// Integrates the lifted system from `p` under `u`.
pub fn integrate(
    system: &SystemModel,
    p: &TangentPoint,
    u: &ControlSignal,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory, ReachError> {
    let dynamics = LiftedDynamics::new(system)?;
    dynamics.integrate(&initial_state(system, p)?, u, horizon, dt)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReachOptions {
    pub samples: usize,
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
    pub switches: usize,
    /// Singular values below `threshold · σ_max` of the centred cloud are
    /// treated as zero.
    pub threshold: f64,
}

impl ReachOptions {
    pub fn new(samples: usize, horizon: f64, dt: f64, seed: u64) -> ReachOptions {
        ReachOptions {
            samples,
            horizon,
            dt,
            seed,
            switches: DEFAULT_SWITCHES,
            threshold: DEFAULT_DIM_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReachEstimate {
    pub dim_tq: usize,
    pub dim_q: usize,
    pub dropped: usize,
    /// One `(q, v)` row per surviving sample.
    #[serde(skip)]
    pub endpoints: Vec<Vec<f64>>,
}

/// Affine dimension of a point cloud: rank of the centred cloud with the
/// relative singular-value cutoff `threshold`.
pub fn affine_dimension(points: &[Vec<f64>], threshold: f64) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let d = first.len();
    let mut mean = vec![0.0; d];
    for p in points {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x / points.len() as f64;
        }
    }
    let centred: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let sv = singular_values(&centred);
    let Some(&spread) = sv.first() else {
        return 0;
    };
    if spread <= ABSOLUTE_FLOOR {
        return 0;
    }
    sv.iter().filter(|&&s| s > threshold * spread).count()
}

/// Monte Carlo estimate of the dimension of the reachable set from `p` in
/// `TQ` and of its projection to `Q`.
pub fn reachable_dimension(
    system: &SystemModel,
    p: &TangentPoint,
    opts: &ReachOptions,
) -> Result<ReachEstimate, ReachError> {
    let n = system.chart().dim();
    let min = 2 * n + 2;
    if opts.samples < min {
        return Err(ReachError::TooFewSamples { min, got: opts.samples });
    }
    let dynamics = LiftedDynamics::new(system)?;
    let x0 = initial_state(system, p)?;
    let r = dynamics.inputs();
    let runs: Vec<Result<Trajectory, ReachError>> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            let u = if r == 0 {
                ControlSignal::constant(Vec::new())
            } else {
                ControlSignal::random(r, opts.horizon, opts.switches, &mut rng)
            };
            dynamics.integrate(&x0, &u, opts.horizon, opts.dt)
        })
        .collect();
    let mut endpoints = Vec::new();
    let mut dropped = 0;
    for run in runs {
        let t = run?;
        if t.blew_up {
            dropped += 1;
        } else {
            endpoints.push(t.last().to_vec());
        }
    }
    if 2 * dropped > opts.samples {
        return Err(ReachError::TooManyDropped {
            dropped,
            total: opts.samples,
        });
    }
    let projected: Vec<Vec<f64>> = endpoints.iter().map(|e| e[..n].to_vec()).collect();
    Ok(ReachEstimate {
        dim_tq: affine_dimension(&endpoints, opts.threshold),
        dim_q: affine_dimension(&projected, opts.threshold),
        dropped,
        endpoints,
    })
}

/// Writes endpoints as CSV with a header of coordinate and velocity names.
pub fn write_csv<W: Write>(system: &SystemModel, endpoints: &[Vec<f64>], mut out: W) -> io::Result<()> {
    let header: Vec<String> = system
        .chart()
        .doubled()
        .coords()
        .iter()
        .map(ToString::to_string)
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for row in endpoints {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
