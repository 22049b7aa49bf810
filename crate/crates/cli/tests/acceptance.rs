#![allow(clippy::needless_range_loop)]

//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use accs::analysis::{analyze, closures, velocity_in_span, AccessReport, AnalysisOptions, Answer, Method, SystemModel};
use accs::distributions::Verdict;
use accs::geometry::{levi_civita, Chart, Connection, Metric, VectorField};
use accs::models::{planar_body, rolling_disk};
use accs::numeric::{in_span, DEFAULT_RANK_TOL};
use accs::randgen;
use accs::reachability::{reachable_dimension, ReachOptions};
use accs::symcore::{Binding, Expr, Symbol, ZeroTest};
use accs::tangent::{
    primitive_generators, recursion_coefficients, BracketWord, Caps, FamilyTag, SplitCalculus, SplitField,
    TangentPoint, WordEvaluator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn zero_expr(e: &Expr) -> bool {
    ZeroTest::default().is_zero(e).unwrap()
}

fn zero_field(f: &VectorField) -> bool {
    f.components().iter().all(zero_expr)
}

fn same_field(a: &VectorField, b: &VectorField) -> bool {
    zero_field(&a.sub(b).unwrap())
}

fn same_split(a: &SplitField, b: &SplitField) -> bool {
    a.hor
        .iter()
        .zip(&b.hor)
        .chain(a.ver.iter().zip(&b.ver))
        .all(|(x, y)| zero_expr(&(x - y)))
}

fn random_q<R: Rng>(s: &SystemModel, rng: &mut R) -> Vec<f64> {
    (0..s.chart().dim())
        .map(|i| {
            if s.chart().is_angle(i) {
                rng.gen_range(0.0..std::f64::consts::TAU)
            } else {
                rng.gen_range(-1.0..1.0)
            }
        })
        .collect()
}

/// A random `v_q = Σ cᵢ gᵢ(q)` over the symmetric closure generators.
fn point_in_sym<R: Rng>(s: &SystemModel, rng: &mut R) -> TangentPoint {
    let c = closures(s, &AnalysisOptions::default()).unwrap();
    let q = random_q(s, rng);
    let p0 = s.point(&q, &vec![0.0; q.len()]);
    let coeffs: Vec<f64> = (0..c.sym.distribution.len()).map(|_| rng.gen_range(0.3..1.0)).collect();
    let v = velocity_in_span(&c.sym.distribution, &p0.base, &coeffs).unwrap();
    TangentPoint::new(p0.base, v)
}

fn report(s: &SystemModel, p: &TangentPoint) -> AccessReport {
    analyze(s, p, &AnalysisOptions::default()).unwrap()
}

fn yes_yes(r: &AccessReport) -> bool {
    r.verdicts.accessible == Answer::Yes && r.verdicts.configuration_accessible == Answer::Yes
}

fn both_hypotheses(r: &AccessReport) -> bool {
    r.hypotheses.velocity_in_sym == Verdict::Holds && r.hypotheses.connection_restricts == Verdict::Holds
}

fn criterion_1() -> Check {
    let s = planar_body(1.0, 1.0, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let rest = s.point(&random_q(&s, &mut rng), &[0.0; 3]);
    let r = report(&s, &rest);
    ensure!(
        (r.ranks.sym, r.ranks.lie_of_sym) == (3, 3),
        "ranks at rest {:?}",
        r.ranks
    );
    ensure!(
        r.method == Method::ZeroVelocity && yes_yes(&r),
        "at rest: {:?} {:?}",
        r.method,
        r.verdicts
    );
    for i in 0..5 {
        let r = report(&s, &point_in_sym(&s, &mut rng));
        ensure!(
            (r.ranks.sym, r.ranks.lie_of_sym) == (3, 3),
            "ranks at v_q #{i}: {:?}",
            r.ranks
        );
        ensure!(both_hypotheses(&r), "hypotheses at v_q #{i}: {:?}", r.hypotheses);
        ensure!(
            r.method == Method::NonzeroRestricted && yes_yes(&r),
            "v_q #{i}: {:?}",
            r.verdicts
        );
    }
    Ok(())
}

fn criterion_2() -> Check {
    let s = rolling_disk(1.0, 1.0, 1.0, 1.0).unwrap();
    let conn = s.connection();
    let frame = conn.frame().ok_or("constrained connection has no adapted frame")?;
    let d = s.constraint().ok_or("no constraint")?;
    // The adapted frame starts with the constraint generators.
    for (a, g) in d.generators().iter().enumerate() {
        ensure!(
            same_field(frame.field(a), &g.field),
            "frame field {a} is not {}",
            g.label
        );
    }
    for c in 0..4 {
        for a in 0..2 {
            for b in 0..2 {
                let e = conn.frame_christoffel(c, a, b).ok_or("missing frame symbol")?;
                ensure!(zero_expr(e), "Γ^{c}_{{{a}{b}}} = {e}");
            }
        }
    }
    Ok(())
}

fn criterion_3() -> Check {
    let disk = rolling_disk(1.0, 1.0, 1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for (inputs, accessible, config) in [
        (vec!["Y1"], Answer::No, None),
        (vec!["Y2"], Answer::No, None),
        (vec!["Y1", "Y2"], Answer::Yes, Some(Answer::Yes)),
    ] {
        let s = disk.with_inputs(&inputs).unwrap();
        for i in 0..3 {
            let r = report(&s, &point_in_sym(&s, &mut rng));
            ensure!(both_hypotheses(&r), "{inputs:?} #{i}: hypotheses {:?}", r.hypotheses);
            ensure!(
                r.verdicts.accessible == accessible,
                "{inputs:?} #{i}: {:?} ranks {:?}",
                r.verdicts,
                r.ranks
            );
            if let Some(c) = config {
                ensure!(
                    r.verdicts.configuration_accessible == c,
                    "{inputs:?} #{i}: {:?}",
                    r.verdicts
                );
            }
        }
    }
    Ok(())
}

fn criterion_4() -> Check {
    let disk = rolling_disk(1.0, 1.0, 1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for input in ["Y1", "Y2"] {
        let s = disk.with_inputs(&[input]).unwrap();
        for i in 0..5 {
            let p = if i == 0 {
                s.point(&random_q(&s, &mut rng), &[0.0; 4])
            } else {
                point_in_sym(&s, &mut rng)
            };
            let r = report(&s, &p);
            ensure!(!r.caps.any(), "{input} #{i}: caps hit");
            ensure!(
                r.ranks.acc_horizontal < 4,
                "{input} #{i}: horizontal rank {}",
                r.ranks.acc_horizontal
            );
        }
    }
    Ok(())
}

/// `q̇ = hor`, `v̇ = ver − Γ̃(hor, v)` with `Γ̃` the symmetric part.
struct Oracle<'c> {
    conn: &'c Connection,
    n: usize,
    v: Vec<Expr>,
}

impl<'c> Oracle<'c> {
    fn new(conn: &'c Connection) -> Oracle<'c> {
        Oracle {
            conn,
            n: conn.dim(),
            v: conn.chart().velocities().iter().map(Expr::symbol).collect(),
        }
    }

    fn gamma(&self, k: usize, i: usize, j: usize) -> Expr {
        (self.conn.christoffel(k, i, j) + self.conn.christoffel(k, j, i)) * Expr::rational(1, 2)
    }

    fn unsplit(&self, f: &SplitField) -> VectorField {
        let mut comps = f.hor.clone();
        for l in 0..self.n {
            let mut acc = f.ver[l].clone();
            for i in 0..self.n {
                for j in 0..self.n {
                    acc = acc - self.gamma(l, i, j) * &f.hor[i] * &self.v[j];
                }
            }
            comps.push(acc);
        }
        VectorField::new(&self.conn.chart().doubled(), comps).unwrap()
    }

    fn split(&self, f: &VectorField) -> SplitField {
        let hor = f.components()[..self.n].to_vec();
        let ver = (0..self.n)
            .map(|l| {
                let mut acc = f.component(self.n + l).clone();
                for i in 0..self.n {
                    for j in 0..self.n {
                        acc = acc + self.gamma(l, i, j) * &hor[i] * &self.v[j];
                    }
                }
                acc
            })
            .collect();
        SplitField { hor, ver }
    }

    fn bracket(&self, a: &SplitField, b: &SplitField) -> SplitField {
        self.split(&self.unsplit(a).lie_bracket(&self.unsplit(b)).unwrap())
    }

    fn spray(&self) -> SplitField {
        SplitField {
            hor: self.v.clone(),
            ver: vec![Expr::zero(); self.n],
        }
    }

    fn vertical(&self, y: &[Expr]) -> SplitField {
        SplitField {
            hor: vec![Expr::zero(); self.n],
            ver: y.to_vec(),
        }
    }

    /// `a^H(f) = aʲ(∂_{qʲ} f − Γ̃ᵐ_{jk} vᵏ ∂_{vᵐ} f)`.
    fn horizontal_derivative(&self, a: &[Expr], f: &Expr) -> Expr {
        let chart = self.conn.chart();
        let vel = chart.velocities();
        let mut acc = Expr::zero();
        for j in 0..self.n {
            let mut d = f.diff(chart.coord(j));
            for m in 0..self.n {
                for k in 0..self.n {
                    d = d - self.gamma(m, j, k) * &self.v[k] * f.diff(&vel[m]);
                }
            }
            acc = acc + &a[j] * d;
        }
        acc
    }

    /// `∇_a b` along the horizontal lift, for `b` possibly velocity dependent.
    fn nabla(&self, a: &[Expr], b: &[Expr]) -> Vec<Expr> {
        (0..self.n)
            .map(|l| {
                let mut acc = self.horizontal_derivative(a, &b[l]);
                for i in 0..self.n {
                    for j in 0..self.n {
                        acc = acc + self.gamma(l, i, j) * &a[i] * &b[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// `R(Y, v)v` for the symmetric part, with
    /// `Rᵖ_{jkl} = ∂_k Γ̃ᵖ_{lj} − ∂_l Γ̃ᵖ_{kj} + Γ̃ᵖ_{km} Γ̃ᵐ_{lj} − Γ̃ᵖ_{lm} Γ̃ᵐ_{kj}`.
    fn curvature_yvv(&self, y: &[Expr]) -> Vec<Expr> {
        let chart = self.conn.chart();
        let n = self.n;
        (0..n)
            .map(|p| {
                let mut acc = Expr::zero();
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut r =
                                self.gamma(p, l, j).diff(chart.coord(k)) - self.gamma(p, k, j).diff(chart.coord(l));
                            for m in 0..n {
                                r = r + self.gamma(p, k, m) * self.gamma(m, l, j)
                                    - self.gamma(p, l, m) * self.gamma(m, k, j);
                            }
                            acc = acc + r * &self.v[j] * &y[k] * &self.v[l];
                        }
                    }
                }
                acc
            })
            .collect()
    }
}

fn random_split<R: Rng>(doubled: &Chart, n: usize, rng: &mut R) -> SplitField {
    SplitField {
        hor: (0..n).map(|_| randgen::sparse_expr(doubled, rng, 0.3)).collect(),
        ver: (0..n).map(|_| randgen::sparse_expr(doubled, rng, 0.3)).collect(),
    }
}

fn chart_of_dim(n: usize) -> Chart {
    let names = ["a", "b", "c"];
    Chart::new(names[..n].iter().map(|s| Symbol::coordinate(s)).collect(), vec![]).unwrap()
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for case in 0..20 {
        let n = 2 + case % 2;
        let c = chart_of_dim(n);
        let conn = randgen::connection(&c, &mut rng, case % 3 != 0);
        let calc = SplitCalculus::new(&conn);
        let o = Oracle::new(&conn);
        let y = randgen::field(&c, &mut rng);
        let w = randgen::field(&c, &mut rng);
        let x = randgen::field(&c, &mut rng);
        let yv = calc.vertical(&y);
        let z = calc.spray();
        ensure!(same_split(&z, &o.spray()), "case {case}: spray");
        ensure!(
            same_split(&yv, &o.vertical(y.components())),
            "case {case}: vertical lift"
        );

        // [Z, X^H + W^V] and [Y^V, X^H + W^V] with velocity-free X, W.
        let xw = SplitField {
            hor: x.components().to_vec(),
            ver: w.components().to_vec(),
        };
        ensure!(
            same_split(&calc.bracket_with_spray(&xw), &o.bracket(&z, &xw)),
            "case {case}: Z bracket"
        );
        let yv_xw = calc.bracket_with_vertical(&y, &xw);
        ensure!(same_split(&yv_xw, &o.bracket(&yv, &xw)), "case {case}: Y^V bracket");
        let closed = SplitField {
            hor: vec![Expr::zero(); n],
            ver: o.nabla(x.components(), y.components()).iter().map(|e| -e).collect(),
        };
        ensure!(same_split(&yv_xw, &closed), "case {case}: Y^V bracket closed form");

        // [Z, Y^V] = −Y^H + (∇_v Y)^V.
        let zy = calc.bracket_with_spray(&yv);
        let nv_y = o.nabla(&o.v, y.components());
        let closed = SplitField {
            hor: y.neg().components().to_vec(),
            ver: nv_y.clone(),
        };
        ensure!(same_split(&zy, &o.bracket(&z, &yv)), "case {case}: [Z,Y^V]");
        ensure!(same_split(&zy, &closed), "case {case}: [Z,Y^V] closed form");

        // [Z, [Z, Y^V]] = −2(∇_v Y)^H + (∇_v∇_v Y − R(Y, v)v)^V.
        let zzy = calc.bracket_with_spray(&zy);
        let nvnv = o.nabla(&o.v, &nv_y);
        let ryvv = o.curvature_yvv(y.components());
        let closed = SplitField {
            hor: nv_y.iter().map(|e| e * Expr::int(-2)).collect(),
            ver: nvnv.iter().zip(&ryvv).map(|(a, b)| a - b).collect(),
        };
        ensure!(
            same_split(&zzy, &o.bracket(&z, &o.bracket(&z, &yv))),
            "case {case}: [Z,[Z,Y^V]]"
        );
        ensure!(same_split(&zzy, &closed), "case {case}: [Z,[Z,Y^V]] closed form");

        // [W^V, [Z, Y^V]] = ⟨W:Y⟩^V for torsion-free data.
        if conn.is_torsion_free(&ZeroTest::default()).unwrap() {
            let sp = conn.symmetric_product(&w, &y).unwrap();
            ensure!(
                same_split(&calc.bracket_with_vertical(&w, &zy), &calc.vertical(&sp)),
                "case {case}: symmetric product"
            );
        }

        // Velocity-dependent fields.
        let f = random_split(&c.doubled(), n, &mut rng);
        ensure!(
            same_split(&calc.bracket_with_spray(&f), &o.bracket(&z, &f)),
            "case {case}: Z bracket, v-dependent"
        );
        ensure!(
            same_split(&calc.bracket_with_vertical(&y, &f), &o.bracket(&yv, &f)),
            "case {case}: Y^V bracket, v-dependent"
        );
    }
    Ok(())
}

fn criterion_6() -> Check {
    for (k, row) in [(2, vec![1, 1]), (3, vec![1, 1, 2]), (4, vec![1, 1, 3, 3])] {
        let got = recursion_coefficients(k).map_err(|e| e.to_string())?;
        ensure!(got == row, "k = {k}: {got:?}");
    }
    let c = Chart::new(vec![Symbol::coordinate("r"), Symbol::angle("phi")], vec![]).unwrap();
    let g = Metric::diagonal(&c, vec![Expr::one(), c.parse("r^2").unwrap()]).unwrap();
    let conn = levi_civita(&g).unwrap();
    let calc = SplitCalculus::new(&conn);
    let o = Oracle::new(&conn);
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for trial in 0..2 {
        let mut poly = || {
            let comps = (0..2)
                .map(|_| {
                    let (a, b, d) = (
                        rng.gen_range(-2i64..=2),
                        rng.gen_range(-2i64..=2),
                        rng.gen_range(-2i64..=2),
                    );
                    c.parse(&format!("{a}*r + {b}*r^2 + {d}*r*phi + 1")).unwrap()
                })
                .collect();
            VectorField::new(&c, comps).unwrap()
        };
        let y = poly();
        let w = poly();
        let sp = conn.symmetric_product(&y, &w).unwrap();
        let alphabet = vec![y, w, sp];
        let eval = WordEvaluator::new(&calc, &alphabet);
        // ad_Z^j of a vertical lift, through the oracle.
        let spray_power = |j: usize, i: usize| {
            let mut f = o.vertical(alphabet[i].components());
            for _ in 0..j {
                f = o.bracket(&o.spray(), &f);
            }
            f
        };
        for k in 2..=4 {
            let a = recursion_coefficients(k).unwrap();
            let lhs = eval.eval(&BracketWord::bracket(
                BracketWord::Lift(0),
                BracketWord::spray_power(k, 1),
            ));
            ensure!(
                same_split(
                    &lhs,
                    &o.bracket(&o.vertical(alphabet[0].components()), &spray_power(k, 1))
                ),
                "trial {trial} k = {k}: evaluator"
            );
            let mut rhs = spray_power(k - 1, 2);
            for j in 1..k {
                let term = o.bracket(&spray_power(j, 1), &spray_power(k - j, 0));
                rhs = rhs.add(&term.scale(&Expr::int(a[j] as i64)));
            }
            ensure!(same_split(&lhs, &rhs), "trial {trial} k = {k}: identity");
        }
    }
    Ok(())
}

fn random_restricted<R: Rng>(rng: &mut R) -> SystemModel {
    let c = chart_of_dim(3);
    let (conn, _) = randgen::restricted_connection(&c, 2, rng);
    let inputs = (0..2)
        .map(|i| (format!("Y{}", i + 1), randgen::field_in_span(&c, 2, rng)))
        .collect();
    SystemModel::new("random", conn, inputs, Binding::new()).unwrap()
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let disk = rolling_disk(1.0, 1.0, 1.0, 1.0).unwrap();
    let mut bank = vec![
        planar_body(1.0, 1.0, 0.5).unwrap(),
        disk.with_inputs(&["Y1"]).unwrap(),
        disk.with_inputs(&["Y2"]).unwrap(),
        disk,
    ];
    bank.extend((0..5).map(|_| random_restricted(&mut rng)));
    let caps = Caps {
        adz_power: 3,
        bracket_depth: 2,
    };
    for s in &bank {
        let name = s.name();
        let n = s.chart().dim();
        let rest = s.point(&random_q(s, &mut rng), &vec![0.0; n]);
        let r = report(s, &rest);
        ensure!(
            r.ranks.acc_horizontal == r.ranks.lie_of_sym && r.ranks.acc_vertical == r.ranks.sym,
            "{name} at rest: {:?}",
            r.ranks
        );
        let c = closures(s, &AnalysisOptions::default()).unwrap();
        let p = point_in_sym(s, &mut rng);
        let r = report(s, &p);
        if both_hypotheses(&r) {
            ensure!(r.ranks.acc_vertical == r.ranks.sym, "{name}: vertical {:?}", r.ranks);
            ensure!(
                r.ranks.acc_horizontal >= r.ranks.lie_of_sym,
                "{name}: horizontal {:?}",
                r.ranks
            );
        }
        if !c.restricts.holds() {
            continue;
        }
        // Tangency of the primitive brackets to the subbundle over Sym, read in
        // the splitting of the connection itself.
        let calc = SplitCalculus::new(s.connection());
        let b = p.binding(&calc).unwrap();
        let sym_rows = c.sym.distribution.evaluate(&b).unwrap();
        let torsion_free = s.connection().is_torsion_free(&ZeroTest::default()).unwrap();
        let set = primitive_generators(&calc, &c.sym.distribution.fields(), caps, std::slice::from_ref(&b)).unwrap();
        for e in &set.entries {
            let coords = calc.to_coordinates(&e.field).evaluate(&b).unwrap();
            let (hor, vdot) = coords.split_at(n);
            let ver: Vec<f64> = (0..n)
                .map(|l| {
                    let mut acc = vdot[l];
                    for i in 0..n {
                        for k in 0..n {
                            acc += s.connection().christoffel(l, i, k).evaluate(&b).unwrap() * hor[i] * p.velocity[k];
                        }
                    }
                    acc
                })
                .collect();
            ensure!(
                in_span(&sym_rows, &ver, DEFAULT_RANK_TOL),
                "{name}: vertical part of {} leaves Sym",
                e.word
            );
            if torsion_free && matches!(e.tag, FamilyTag::A | FamilyTag::B) {
                ensure!(
                    in_span(&sym_rows, hor, DEFAULT_RANK_TOL),
                    "{name}: horizontal part of {} leaves Sym",
                    e.word
                );
            }
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    let disk = rolling_disk(1.0, 1.0, 1.0, 1.0).unwrap();
    let bank = [
        planar_body(1.0, 1.0, 0.5).unwrap(),
        disk.with_inputs(&["Y1"]).unwrap(),
        disk.with_inputs(&["Y2"]).unwrap(),
        disk,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let opts = ReachOptions::new(64, 0.5, 1e-3, 808);
    let mut violations = Vec::new();
    for s in &bank {
        let n = s.chart().dim();
        let rest = s.point(&random_q(s, &mut rng), &vec![0.0; n]);
        for (kind, p) in [("rest", rest), ("moving", point_in_sym(s, &mut rng))] {
            let r = report(s, &p);
            let est = reachable_dimension(s, &p, &opts).map_err(|e| e.to_string())?;
            if est.dim_tq > r.ranks.acc_total {
                violations.push(format!(
                    "{} [{}] {kind}: dim_TQ {} > acc_total {}",
                    s.name(),
                    s.inputs()
                        .generators()
                        .iter()
                        .map(|g| g.label.as_str())
                        .collect::<Vec<_>>()
                        .join(","),
                    est.dim_tq,
                    r.ranks.acc_total
                ));
            }
        }
    }
    let planar = &bank[0];
    let est = reachable_dimension(planar, &planar.point(&[0.0; 3], &[0.0; 3]), &opts).map_err(|e| e.to_string())?;
    ensure!(
        est.dim_tq == 6,
        "planar body from rest reaches dimension {}",
        est.dim_tq
    );
    ensure!(violations.is_empty(), "{}", violations.join("; "));
    Ok(())
}

fn criterion_9() -> Check {
    const INSTANCES: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let c3 = Chart::new(
        vec![Symbol::coordinate("a"), Symbol::angle("b"), Symbol::coordinate("c")],
        vec![],
    )
    .unwrap();
    for i in 0..INSTANCES {
        let (x, y, w) = (
            randgen::field(&c3, &mut rng),
            randgen::field(&c3, &mut rng),
            randgen::field(&c3, &mut rng),
        );
        let jac = x
            .lie_bracket(&y.lie_bracket(&w).unwrap())
            .unwrap()
            .add(&y.lie_bracket(&w.lie_bracket(&x).unwrap()).unwrap())
            .unwrap()
            .add(&w.lie_bracket(&x.lie_bracket(&y).unwrap()).unwrap())
            .unwrap();
        ensure!(zero_field(&jac), "Jacobi, instance {i}");
    }
    for i in 0..INSTANCES {
        let conn = randgen::connection(&c3, &mut rng, i % 2 == 0);
        let (x, y) = (randgen::field(&c3, &mut rng), randgen::field(&c3, &mut rng));
        let f = randgen::expr(&c3, &mut rng);
        let sxy = conn.symmetric_product(&x, &y).unwrap();
        ensure!(
            same_field(&sxy, &conn.symmetric_product(&y, &x).unwrap()),
            "symmetry, instance {i}"
        );
        // ⟨fX:Y⟩ = f⟨X:Y⟩ + (Y f) X
        let lhs = conn.symmetric_product(&x.scale(&f), &y).unwrap();
        let rhs = sxy.scale(&f).add(&x.scale(&y.apply(&f))).unwrap();
        ensure!(same_field(&lhs, &rhs), "Leibniz, instance {i}");
    }
    let c2 = Chart::new(vec![Symbol::coordinate("a"), Symbol::angle("b")], vec![]).unwrap();
    for i in 0..INSTANCES {
        let conn = randgen::connection(&c2, &mut rng, i % 2 == 0);
        let (x, y, w) = (
            randgen::field(&c2, &mut rng),
            randgen::field(&c2, &mut rng),
            randgen::field(&c2, &mut rng),
        );
        let f = randgen::expr(&c2, &mut rng);
        let r = conn.curvature(&x, &y, &w).unwrap();
        ensure!(
            same_field(&conn.curvature(&y, &x, &w).unwrap(), &r.neg()),
            "antisymmetry, instance {i}"
        );
        ensure!(
            same_field(&conn.curvature(&x.scale(&f), &y, &w).unwrap(), &r.scale(&f)),
            "tensorial in X, instance {i}"
        );
        ensure!(
            same_field(&conn.curvature(&x, &y.scale(&f), &w).unwrap(), &r.scale(&f)),
            "tensorial in Y, instance {i}"
        );
        ensure!(
            same_field(&conn.curvature(&x, &y, &w.scale(&f)).unwrap(), &r.scale(&f)),
            "tensorial in W, instance {i}"
        );
    }
    for i in 0..INSTANCES {
        // g = [[2 + s², ε], [ε, 2 + t²]] with |ε| ≤ 1/2 is positive definite.
        let s = randgen::expr(&c2, &mut rng);
        let t = randgen::expr(&c2, &mut rng);
        let eps = c2.parse(if i % 2 == 0 { "sin(b)/2" } else { "cos(a)/3" }).unwrap();
        let g = Metric::new(
            &c2,
            vec![
                vec![Expr::int(2) + &s * &s, eps.clone()],
                vec![eps, Expr::int(2) + &t * &t],
            ],
        )
        .map_err(|e| format!("metric {i}: {e}"))?;
        let lc = levi_civita(&g).unwrap();
        ensure!(
            lc.is_torsion_free(&ZeroTest::default()).unwrap(),
            "Levi-Civita torsion, instance {i}"
        );
        let (x, y, w) = (
            randgen::field(&c2, &mut rng),
            randgen::field(&c2, &mut rng),
            randgen::field(&c2, &mut rng),
        );
        let e = x.apply(&g.pairing(&y, &w))
            - g.pairing(&lc.covariant_derivative(&x, &y).unwrap(), &w)
            - g.pairing(&y, &lc.covariant_derivative(&x, &w).unwrap());
        ensure!(zero_expr(&e), "metric compatibility, instance {i}");
    }
    Ok(())
}

fn criterion_10() -> Check {
    let invocations: [&[&str]; 5] = [
        &[
            "analyze",
            "--model",
            "planar_body",
            "--velocity-in",
            "span:0.5,0.2,0.1",
            "--seed",
            "7",
        ],
        &[
            "analyze",
            "--model",
            "rolling_disk",
            "--inputs",
            "Y1,Y2",
            "--velocity-in",
            "span:0.3,0.4",
            "--seed",
            "7",
        ],
        &["closure", "lie-of-sym", "--model", "rolling_disk", "--seed", "7"],
        &[
            "bracket",
            "[Z,[Z,Y2^V]]",
            "--model",
            "planar_body",
            "--velocity-in",
            "span:1,1",
            "--seed",
            "7",
        ],
        &[
            "reach",
            "--model",
            "planar_body",
            "--zero-velocity",
            "--samples",
            "16",
            "--dt",
            "1e-2",
            "--seed",
            "7",
        ],
    ];
    let bin = env!("CARGO_BIN_EXE_accs");
    for args in invocations {
        let first = accs_cli::run(std::iter::once("accs").chain(args.iter().copied()));
        ensure!(first.code == 0, "{args:?} exited {}: {}", first.code, first.stderr);
        let second = accs_cli::run(std::iter::once("accs").chain(args.iter().copied()));
        ensure!(first.stdout == second.stdout, "{args:?}: in-process runs differ");
        let out = std::process::Command::new(bin)
            .args(args)
            .env_remove("ACCS_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            out.stdout == first.stdout.as_bytes(),
            "{args:?}: separate process differs"
        );
    }
    Ok(())
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "planar body ranks and verdicts at rest and at 5 velocities",
            criterion_1,
        ),
        ("rolling disk frame Christoffel symbols vanish", criterion_2),
        ("rolling disk three-case verdict table", criterion_3),
        ("rolling disk single input never reaches horizontal rank 4", criterion_4),
        (
            "split bracket formulas match coordinate brackets on 20 instances",
            criterion_5,
        ),
        (
            "recursion coefficients and bracket identity for k = 2, 3, 4",
            criterion_6,
        ),
        (
            "structural rank statements on models and random restricted systems",
            criterion_7,
        ),
        ("Monte Carlo dimension bounded by accessibility rank", criterion_8),
        ("geometry identities on 100 random instances each", criterion_9),
        ("repeated CLI runs are byte-identical", criterion_10),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
