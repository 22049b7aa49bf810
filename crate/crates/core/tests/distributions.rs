use accs::distributions::{
    curvature_invariance_check, geodesically_invariant, lie_closure, pointwise_rank, rank_profile, restricts_to,
    sym_closure, ClosureOptions, Distribution, Provenance, SampleSet, Verdict, DEFAULT_SAMPLE_SEED,
};
use accs::geometry::{Chart, Connection, VectorField};
use accs::models::{planar_body, rolling_disk};
use accs::numeric::DEFAULT_RANK_TOL;
use accs::randgen;
use accs::symcore::{Binding, Symbol};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = DEFAULT_RANK_TOL;

fn plane() -> Chart {
    Chart::new(vec![Symbol::coordinate("x"), Symbol::coordinate("y")], vec![]).unwrap()
}

fn standard(chart: &Chart, params: &Binding) -> SampleSet {
    SampleSet::standard(chart, params)
}

fn at(chart: &Chart, params: &Binding, q: &[f64]) -> Binding {
    let mut b = params.clone();
    for (s, v) in chart.coords().iter().zip(q) {
        b.set(s.clone(), *v);
    }
    b
}

#[test]
fn pointwise_rank_examples() {
    let c = Chart::new(
        vec![
            Symbol::coordinate("x"),
            Symbol::coordinate("y"),
            Symbol::coordinate("z"),
        ],
        vec![],
    )
    .unwrap();
    let d =
        Distribution::from_fields(&c, vec![VectorField::coordinate(&c, 0), VectorField::coordinate(&c, 1)]).unwrap();
    assert_eq!(
        pointwise_rank(&d, &at(&c, &Binding::new(), &[0.4, -2.0, 7.0]), TOL).unwrap(),
        2
    );

    let s = planar_body(1.0, 1.0, 1.0).unwrap();
    let conn = s.connection();
    let f = s.inputs().fields();
    let sp = conn.symmetric_product(&f[0], &f[1]).unwrap();
    let d = Distribution::from_fields(s.chart(), vec![f[0].clone(), f[1].clone(), sp]).unwrap();
    let b = at(s.chart(), s.params(), &[0.3, 0.0, 0.0]);
    assert_eq!(pointwise_rank(&d, &b, TOL).unwrap(), 3);

    let disk = rolling_disk(1.0, 1.0, 1.0, 1.0).unwrap().with_inputs(&["Y1"]).unwrap();
    let prof = rank_profile(disk.inputs(), &disk.samples(DEFAULT_SAMPLE_SEED), TOL);
    assert!(prof.ranks.iter().all(|r| *r == Some(1)));
    assert!(prof.degenerate.is_empty());
}

#[test]
fn sym_closure_examples() {
    let opts = ClosureOptions::default();
    let s = planar_body(1.0, 1.0, 0.5).unwrap();
    let cl = sym_closure(s.connection(), s.inputs(), &s.samples(DEFAULT_SAMPLE_SEED), &opts).unwrap();
    assert_eq!(cl.rank(), 3);
    assert!(cl.conclusive());
    assert!(cl
        .distribution
        .generators()
        .iter()
        .any(|g| g.provenance == Provenance::Symmetric { left: 0, right: 1 }));

    let flat = planar_body(1.0, 1.0, 0.0).unwrap();
    let cl = sym_closure(
        flat.connection(),
        flat.inputs(),
        &flat.samples(DEFAULT_SAMPLE_SEED),
        &opts,
    )
    .unwrap();
    assert_eq!(cl.rank(), 2);
    assert!(cl.saturated);

    let disk = rolling_disk(1.0, 1.0, 1.0, 1.0).unwrap();
    let samples = disk.samples(DEFAULT_SAMPLE_SEED);
    for (inputs, rank) in [(vec!["Y1"], 1), (vec!["Y2"], 1), (vec!["Y1", "Y2"], 2)] {
        let sub = disk.with_inputs(&inputs).unwrap();
        let cl = sym_closure(sub.connection(), sub.inputs(), &samples, &opts).unwrap();
        assert_eq!(cl.rank(), rank, "{inputs:?}");
        assert_eq!(cl.distribution.len(), rank);
        assert!(cl.conclusive());
    }
}

#[test]
fn lie_closure_examples() {
    let opts = ClosureOptions::default();
    let c = plane();
    let d =
        Distribution::from_fields(&c, vec![VectorField::coordinate(&c, 0), VectorField::coordinate(&c, 1)]).unwrap();
    let cl = lie_closure(&d, &standard(&c, &Binding::new()), &opts).unwrap();
    assert_eq!((cl.rank(), cl.distribution.len()), (2, 2));

    let disk = rolling_disk(1.0, 1.0, 1.0, 1.0).unwrap();
    let x = disk.constraint().unwrap();
    let cl = lie_closure(x, &disk.samples(DEFAULT_SAMPLE_SEED), &opts).unwrap();
    assert_eq!(cl.rank(), 4);
    assert_eq!(cl.distribution.len(), 4);

    let s = planar_body(1.0, 1.0, 0.5).unwrap();
    let samples = s.samples(DEFAULT_SAMPLE_SEED);
    let sym = sym_closure(s.connection(), s.inputs(), &samples, &opts).unwrap();
    assert_eq!(lie_closure(&sym.distribution, &samples, &opts).unwrap().rank(), 3);
}

#[test]
fn restriction_examples() {
    let s = planar_body(1.0, 1.0, 0.5).unwrap();
    let samples = s.samples(DEFAULT_SAMPLE_SEED);
    let sym = sym_closure(s.connection(), s.inputs(), &samples, &ClosureOptions::default()).unwrap();
    assert_eq!(
        restricts_to(s.connection(), &sym.distribution, &samples, TOL).unwrap(),
        Verdict::Holds
    );
    assert_eq!(
        curvature_invariance_check(s.connection(), &sym.distribution, &samples, TOL).unwrap(),
        Verdict::Holds
    );

    let disk = rolling_disk(1.0, 1.0, 1.0, 1.0).unwrap();
    let samples = disk.samples(DEFAULT_SAMPLE_SEED);
    let y1 = disk.with_inputs(&["Y1"]).unwrap();
    assert_eq!(
        restricts_to(disk.connection(), y1.inputs(), &samples, TOL).unwrap(),
        Verdict::Holds
    );
    assert_eq!(
        geodesically_invariant(disk.connection(), y1.inputs(), &samples, TOL).unwrap(),
        Verdict::Holds
    );
    assert_eq!(
        curvature_invariance_check(disk.connection(), disk.inputs(), &samples, TOL).unwrap(),
        Verdict::Holds
    );

    let c = plane();
    let flat = Connection::flat(&c);
    let y = VectorField::parse(&c, &["cos(y)", "sin(y)"]).unwrap();
    let d = Distribution::from_fields(&c, vec![y]).unwrap();
    let samples = standard(&c, &Binding::new());
    match restricts_to(&flat, &d, &samples, TOL).unwrap() {
        Verdict::Fails { witness } => assert!(witness.description.contains("nabla_d_y"), "{}", witness.description),
        v => panic!("expected failure, got {v}"),
    }
    assert!(matches!(
        geodesically_invariant(&flat, &d, &samples, TOL).unwrap(),
        Verdict::Fails { .. }
    ));
    assert_eq!(
        curvature_invariance_check(&flat, &d, &samples, TOL).unwrap(),
        Verdict::NotApplicable
    );
    let dx = Distribution::from_fields(&c, vec![VectorField::coordinate(&c, 0)]).unwrap();
    assert_eq!(
        curvature_invariance_check(&flat, &dx, &samples, TOL).unwrap(),
        Verdict::Holds
    );
}

#[test]
fn rank_drop_is_reported_as_degenerate() {
    let c = plane();
    let d = Distribution::from_fields(&c, vec![VectorField::parse(&c, &["x", "0"]).unwrap()]).unwrap();
    let mut pts = standard(&c, &Binding::new()).points().to_vec();
    pts.push(at(&c, &Binding::new(), &[0.0, 0.5]));
    let samples = SampleSet::from_points(pts);
    let v = restricts_to(&Connection::flat(&c), &d, &samples, TOL).unwrap();
    assert_eq!(v, Verdict::Degenerate { points: vec![12] });
}

#[test]
fn restriction_implies_invariance_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd15);
    let c = Chart::new(
        vec![
            Symbol::coordinate("a"),
            Symbol::coordinate("b"),
            Symbol::coordinate("c"),
        ],
        vec![],
    )
    .unwrap();
    let samples = standard(&c, &Binding::new());
    for _ in 0..5 {
        let (conn, gens) = randgen::restricted_connection(&c, 2, &mut rng);
        let d = Distribution::from_fields(&c, gens).unwrap();
        assert_eq!(restricts_to(&conn, &d, &samples, TOL).unwrap(), Verdict::Holds);
        assert_eq!(
            geodesically_invariant(&conn, &d, &samples, TOL).unwrap(),
            Verdict::Holds
        );
    }
    let flat = Connection::flat(&c);
    for _ in 0..5 {
        let d = Distribution::from_fields(&c, vec![randgen::field(&c, &mut rng)]).unwrap();
        if restricts_to(&flat, &d, &samples, TOL).unwrap().holds() {
            assert!(geodesically_invariant(&flat, &d, &samples, TOL).unwrap().holds());
        }
    }
}

#[test]
fn closures_are_closed_and_order_independent() {
    let opts = ClosureOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let c = Chart::new(
        vec![
            Symbol::coordinate("a"),
            Symbol::coordinate("b"),
            Symbol::coordinate("c"),
        ],
        vec![],
    )
    .unwrap();
    let samples = standard(&c, &Binding::new());
    for _ in 0..4 {
        let conn = randgen::connection(&c, &mut rng, true);
        let mut fields = vec![randgen::field(&c, &mut rng), randgen::field(&c, &mut rng)];
        let d = Distribution::from_fields(&c, fields.clone()).unwrap();
        let cl = sym_closure(&conn, &d, &samples, &opts).unwrap();
        let again = sym_closure(&conn, &cl.distribution, &samples, &opts).unwrap();
        assert_eq!(again.rank(), cl.rank());
        assert!(cl.rank() >= rank_profile(&d, &samples, TOL).generic);

        fields.shuffle(&mut rng);
        let d2 = Distribution::from_fields(&c, fields).unwrap();
        let cl2 = sym_closure(&conn, &d2, &samples, &opts).unwrap();
        assert_eq!(cl.profile.ranks, cl2.profile.ranks);
        let l1 = lie_closure(&d, &samples, &opts).unwrap();
        let l2 = lie_closure(&d2, &samples, &opts).unwrap();
        assert_eq!(l1.profile.ranks, l2.profile.ranks);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lie_rank_invariant_under_scaling(seed in any::<u64>(), num in 1i64..5, den in 1i64..5, neg in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = plane();
        let samples = standard(&c, &Binding::new());
        let fields = vec![randgen::field(&c, &mut rng), randgen::field(&c, &mut rng)];
        let k = accs::symcore::Expr::rational(if neg { -num } else { num }, den);
        let scaled: Vec<VectorField> = fields.iter().map(|f| f.scale(&k)).collect();
        let opts = ClosureOptions::default();
        let a = lie_closure(&Distribution::from_fields(&c, fields).unwrap(), &samples, &opts).unwrap();
        let b = lie_closure(&Distribution::from_fields(&c, scaled).unwrap(), &samples, &opts).unwrap();
        prop_assert_eq!(a.profile.ranks, b.profile.ranks);
    }
}
