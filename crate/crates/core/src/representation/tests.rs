use std::sync::Arc;

use super::*;
use crate::geometry::vector::dist;
use crate::geometry::ConvexBody;
use crate::models::{catalog, find_example, AbsFamilyTriple, ControlTriple, Ex1GraphicalTriple, Ex1Triple, Ex2Triple};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rep(name: &str) -> Representation {
    let e = find_example(name).unwrap();
    Representation::new(&e.hamiltonian, &e.lagrangian, RepOptions::default()).unwrap()
}

/// `d(z, epi L)` by brute force over a fine grid of `[lo, hi]`.
fn dense_distance(l: impl Fn(f64) -> f64, lo: f64, hi: f64, z: [f64; 2]) -> f64 {
    let n = 400_001;
    (0..n)
        .map(|i| {
            let v = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            (v - z[0]).hypot((l(v) - z[1]).max(0.0))
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn omega_examples() {
    let e = find_example("EX2").unwrap();
    assert_eq!(omega(&e.hamiltonian, &e.lagrangian, 0.0, &[0.0]).unwrap(), 3.0);
    let e = find_example("EX1").unwrap();
    assert_eq!(omega(&e.hamiltonian, &e.lagrangian, 0.0, &[0.0]).unwrap(), 3.0);
    for e in catalog().into_iter().filter(|e| e.lagrangian.has_lambda()) {
        for x in [-2.0, -0.3, 0.0, 1.5] {
            let xs = vec![x; e.hamiltonian.n];
            assert!(omega(&e.hamiltonian, &e.lagrangian, 0.5, &xs).unwrap() >= 1.0);
        }
    }
    let e = find_example("EX4").unwrap();
    assert!(matches!(omega(&e.hamiltonian, &e.lagrangian, 0.0, &[1.0]), Err(Error::BlcRequired(_))));
    assert!(matches!(
        Representation::new(&e.hamiltonian, &e.lagrangian, RepOptions::default()),
        Err(Error::BlcRequired(_))
    ));
}

#[test]
fn construct_examples() {
    let r = rep("EX2");
    let tr = r.construct(0.0, &[0.0], &[0.0, -1.0 / 3.0]).unwrap();
    assert_eq!(tr.e, vec![0.0, -1.0]);
    assert_eq!(tr.d, 0.0);
    assert_eq!(r.e(0.0, &[0.0], &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);

    let tr = r.construct(0.0, &[0.0], &[1.0, 0.0]).unwrap();
    assert_eq!(tr.center, vec![3.0, 0.0]);
    let oracle = dense_distance(|v| -(1.0 - v * v).max(0.0).sqrt(), -1.0, 1.0, [3.0, 0.0]);
    assert!((oracle - 2.0).abs() < 1e-9);
    let sag = r.section(0.0, &[0.0]).unwrap().hull_sag();
    assert!(tr.d >= oracle - 1e-12 && tr.d <= oracle + sag, "{} {oracle}", tr.d);
    assert_eq!(tr.radius, 2.0 * tr.d);
    assert!(tr.phi.contains(&tr.e, 1e-9).unwrap());
    assert!(tr.l() >= -(1.0 - tr.f()[0] * tr.f()[0]).sqrt());
    assert!(trace_defect(&tr).unwrap() <= 1e-9);
}

#[test]
fn construct_rejects_bad_controls() {
    let r = rep("EX2");
    assert!(matches!(r.construct(0.0, &[0.0], &[1.0, 1.0]), Err(Error::Input(_))));
    assert!(matches!(r.construct(0.0, &[0.0], &[1.0]), Err(Error::Dimension { .. })));
}

#[test]
fn traces_are_coherent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["EX1", "EX2", "ABS", "EX2T"] {
        let r = rep(name);
        for i in 0..60 {
            let x = [-1.5 + 3.0 * (i % 7) as f64 / 6.0];
            let t = (i % 3) as f64 / 2.0;
            let a = random_ball_point(&mut rng, 2);
            let tr = r.construct(t, &x, &a).unwrap();
            assert!(trace_defect(&tr).unwrap() <= 1e-9, "{name} {x:?} {a:?}");
            let s = r.section(t, &x).unwrap();
            assert!(s.member(&tr.e).unwrap(), "{name} {x:?} {a:?} {:?}", tr.e);
            for v in tr.phi.iter() {
                assert!(s.window().contains(v) && v[1] <= s.window().eta_cap + 1e-9);
            }
        }
    }
}

#[test]
fn two_dimensional_construction() {
    let r = rep("EX2D");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let a = random_ball_point(&mut rng, 3);
        let tr = r.construct(0.0, &[0.3, -0.2], &a).unwrap();
        assert!(r.section(0.0, &[0.3, -0.2]).unwrap().member(&tr.e).unwrap());
        assert!(trace_defect(&tr).unwrap() <= 1e-6);
    }
}

#[test]
fn steiner_rules_agree() {
    let e = find_example("EX2").unwrap();
    let q = Representation::new(
        &e.hamiltonian,
        &e.lagrangian,
        RepOptions { steiner: SteinerRule::Quadrature, ..RepOptions::default() },
    )
    .unwrap();
    let r = rep("EX2");
    for a in [[1.0, 0.0], [0.6, -0.8], [-0.2, -0.9]] {
        let d = dist(&r.e(0.0, &[0.4], &a).unwrap(), &q.e(0.0, &[0.4], &a).unwrap());
        assert!(d < 1e-3, "{a:?} {d}");
    }
}

#[test]
fn sup_formula_examples() {
    let r = rep("EX2");
    let ps: Vec<Vec<f64>> = [-3.0, -1.0, 0.0, 0.5, 3.0].iter().map(|p| vec![*p]).collect();
    let cloud = control_cloud(2, 512, 0);
    let s = verify_sup_formula(&r, 0.0, &[0.0], &ps, &cloud).unwrap();
    assert!(s.residual(2).abs() <= 1e-12, "{}", s.residual(2));
    let h = r.section(0.0, &[0.0]).unwrap().node_spacing();
    for i in 0..ps.len() {
        assert!(s.residual(i) >= -1e-9);
        assert!(s.graph_residual(i) <= 2.0 * h * (1.0 + ps[i][0].abs()), "{i}");
        assert!(s.half_cloud_residual(i) >= s.cloud_residual(i));
    }
    assert!(s.records(5e-2).iter().all(|r| r.pass));

    // hand-written EX1 triple at (x,p) = (1,2): sup = 1
    let tr = Ex1Triple;
    let best = tr
        .controls()
        .grid(41)
        .iter()
        .map(|a| 2.0 * tr.f(0.0, &[1.0], a)[0] - tr.l(0.0, &[1.0], a))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((best - 1.0).abs() < 1e-12);
}

#[test]
fn sandwich_examples() {
    let cloud = control_cloud(2, 400, 5);
    for (name, x) in [("EX2", 0.0), ("EX2", 0.7), ("EX1", 0.5), ("EX1", 0.0), ("ABS", 1.0)] {
        let r = rep(name);
        let recs = verify_sandwich(&r, 0.0, &[x], &cloud).unwrap();
        for rec in &recs {
            assert!(rec.pass, "{name} {x}: {rec:?}");
        }
    }
    let r = rep("EX1");
    for a in control_cloud(2, 50, 1) {
        assert_eq!(r.f(0.0, &[0.0], &a).unwrap(), vec![0.0]);
    }
}

#[test]
fn continuity_negative_control() {
    let pts: Vec<(f64, Vec<f64>, Vec<f64>)> = [0.5, -0.5, 1.0].iter().map(|a| (0.0, vec![0.0], vec![*a])).collect();
    let g = Ex1GraphicalTriple;
    let rec = continuity_audit(triple_eval(&g), &pts, 10.0, 4..=20, 1e-12).unwrap();
    assert!(!rec.pass);
    let t = Ex1Triple;
    let pts: Vec<(f64, Vec<f64>, Vec<f64>)> =
        [[0.5, 0.5], [-0.5, 0.0], [1.0, -1.0]].iter().map(|a| (0.0, vec![0.0], a.to_vec())).collect();
    let rec = continuity_audit(triple_eval(&t), &pts, 10.0, 4..=20, 1e-12).unwrap();
    assert!(rec.pass, "{rec:?}");
}

#[test]
fn constructed_map_is_continuous() {
    let r = rep("EX2");
    let pts: Vec<(f64, Vec<f64>, Vec<f64>)> =
        [[0.9, 0.1], [0.0, -0.5], [-0.3, 0.9], [0.0, 0.0]].iter().map(|a| (0.0, vec![0.2], a.to_vec())).collect();
    let bound = a1_bound(&r, 0.0, 1.0);
    let rec = continuity_audit(|t, x, a| r.e(t, x, a), &pts, bound, 2..=12, 1e-4).unwrap();
    assert!(rec.pass, "{rec:?}");
}

#[test]
fn a1_examples() {
    let r = rep("EX2");
    assert_eq!(a1_bound(&r, 0.0, 1.0), 220.0);
    assert_eq!(dist(&r.e(0.0, &[0.3], &[0.2, 0.1]).unwrap(), &r.e(0.0, &[0.3], &[0.2, 0.1]).unwrap()), 0.0);
    for name in ["EX1", "EX2"] {
        let r = rep(name);
        let recs =
            audit_lipschitz_a1(&r, A1Options { pairs: 300, intermediate_pairs: 40, ..A1Options::default() }).unwrap();
        for rec in &recs {
            assert!(rec.pass, "{name}: {rec:?}");
        }
        assert!(recs[0].empirical_constant.unwrap() < a1_bound(&r, 0.0, 1.0));
    }
}

#[test]
fn epi_membership_examples() {
    let e = find_example("EX2").unwrap();
    assert_eq!(check_epi_membership(&e.lagrangian, &Ex2Triple, 0.0, &[0.0], &[0.0, 1.0]), 2.0);

    struct Lowered;
    impl ControlTriple for Lowered {
        fn name(&self) -> &str {
            "lowered"
        }
        fn controls(&self) -> crate::models::ControlSet {
            crate::models::ControlSet::Ball(2)
        }
        fn f(&self, t: f64, x: &[f64], a: &[f64]) -> Vec<f64> {
            Ex2Triple.f(t, x, a)
        }
        fn l(&self, t: f64, x: &[f64], a: &[f64]) -> f64 {
            Ex2Triple.l(t, x, a) - 1.0
        }
    }
    // a = (0, −1) sits on the graph, so lowering l by 1 goes below it
    assert!(check_epi_membership(&e.lagrangian, &Lowered, 0.0, &[0.0], &[0.0, -1.0]) < -0.5);

    let r = rep("EX2");
    for a in r.graph_controls(0.0, &[0.4]).unwrap().iter().step_by(37) {
        let ev = r.e(0.0, &[0.4], a).unwrap();
        // zero up to the rounding of a = (v, L(v))/ω
        assert!((ev[1] - e.lagrangian.eval(0.0, &[0.4], &ev[..1]).to_f64()).abs() <= 1e-12);
    }
}

#[test]
fn convexify_examples() {
    assert!(convexify(vec![], 1, |_, _, a| a.to_vec(), |_, _, _| 0.0).is_err());
    let c = convexify(vec![vec![0.3]], 1, |_, x, a| vec![a[0] * x[0]], |_, _, _| 1.0).unwrap();
    let (f, l) = c.eval(0.0, &[2.0], &[0, 0], &[0.25, 0.75]).unwrap();
    assert_eq!((f, l), (vec![0.6], 1.0));
    assert!(c.eval(0.0, &[2.0], &[0, 0], &[0.5, 0.6]).is_err());

    let c = convexify(vec![vec![-1.0], vec![1.0]], 1, |_, _, a| a.to_vec(), |_, _, _| 0.0).unwrap();
    assert_eq!(c.lambda(0.0, &[3.0]), 0.0);
    let rec = c.hull_check(0.0, &[3.0], 200, 1).unwrap();
    assert!(rec.pass, "{rec:?}");
    let hull = ConvexBody::from_points(1, &[-1.0, 1.0]).unwrap();
    assert_eq!(hull.vertices(), &[-1.0, 1.0]);

    // λ from the EX2 hand-written triple is 1 + |x| and bounds L
    let e = find_example("EX2").unwrap();
    let base = Ex2Triple.controls().grid(21);
    let c = convexify_triple(Arc::new(Ex2Triple), base, 1).unwrap();
    for x in [-1.0, 0.0, 0.5, 2.0] {
        let lam = c.lambda(0.0, &[x]);
        assert!((lam - (1.0 + f64::abs(x))).abs() < 1e-12);
        for v in [-1.0, -0.5, 0.0, 0.9, 1.0] {
            assert!(e.lagrangian.eval(0.0, &[x], &[v]).to_f64() <= lam);
        }
        assert!(c.hull_check(0.0, &[x], 100, 2).unwrap().pass);
    }
    let xs: Vec<Vec<f64>> = [-1.0, -0.2, 0.4, 1.0].iter().map(|x| vec![*x]).collect();
    let rec = c.modulus_check(0.0, &xs, 50, 3).unwrap();
    assert!(rec.pass && (rec.empirical_constant.unwrap() - 1.0).abs() < 1e-9, "{rec:?}");

    // ABS family with f(x,±1) = ±1, l(x,±1) = 0
    let fam = AbsFamilyTriple::new(|x| x[0].abs(), |x| 1.0 + x[0] * x[0]);
    let c = convexify_triple(Arc::new(fam), vec![vec![-1.0], vec![1.0]], 1).unwrap();
    assert_eq!(c.lambda(0.0, &[0.7]), 0.0);
    assert!(c.hull_check(0.0, &[0.7], 50, 4).unwrap().pass);
}

#[test]
fn trace_csv_columns() {
    let r = rep("EX2");
    let tr = vec![r.construct(0.0, &[0.0], &[0.0, -1.0 / 3.0]).unwrap()];
    let csv = trace_csv(&tr);
    assert!(csv.starts_with("a1,a2,omega,d,e_f,e_l\n"), "{csv}");
    assert_eq!(csv.lines().nth(1).unwrap(), format!("0,{},3,0,0,-1", -1.0 / 3.0));
}

#[test]
fn frame_fixes_omega_and_window() {
    let e = find_example("EX2").unwrap();
    let (h, l) = (&e.hamiltonian, &e.lagrangian);
    let h2 = h.shifted("EX2+", |_, _| 0.25, {
        let k = h.clone();
        move |r, t| k.modulus(r, t)
    });
    let l2 = l.shifted("EX2+", |_, _| 0.25, false);
    let own = Representation::new(&h2, &l2, RepOptions::default()).unwrap();
    let framed = Representation::with_frame(&h2, &l2, RepOptions::default(), (h, l)).unwrap();
    let base = Representation::new(h, l, RepOptions::default()).unwrap();
    let x = [0.5];
    assert_eq!(framed.omega(0.0, &x).unwrap(), base.omega(0.0, &x).unwrap());
    assert_eq!(own.omega(0.0, &x).unwrap(), base.omega(0.0, &x).unwrap() + 0.25);
    assert_eq!(framed.section(0.0, &x).unwrap().window(), base.section(0.0, &x).unwrap().window());
    // ωa inside both epigraphs is returned unchanged by either
    let a = [0.0, 0.9];
    assert_eq!(framed.e(0.0, &x, &a).unwrap(), base.e(0.0, &x, &a).unwrap());
}
