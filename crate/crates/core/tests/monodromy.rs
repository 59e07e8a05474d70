use junctionlab::junctions::{identify_algebra, Junction, JunctionBasis};
use junctionlab::model::templates::Template;
use junctionlab::model::WeierstrassModel;
use junctionlab::monodromy::{extract_braid, fold, induced_automorphism, BraidLetter, Family, SliceLoop, MIN_LOOP_STEPS};
use junctionlab::pipeline::{analyze_loop, AnalysisConfig, LoopConfig};
use junctionlab::poly::Poly;
use junctionlab::tracking::TrackingConfig;
use junctionlab::{Error, Result};
use num_complex::Complex;
use std::collections::BTreeSet;

type C = Complex<f64>;

fn apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn zero() -> C {
    C::new(0.0, 0.0)
}

/// The I2 points `+-0.1 i` turned by `e^{i theta / 2}`: one loop trades them.
struct HalfTwist;

impl Family<f64> for HalfTwist {
    fn at(&self, theta: f64) -> Result<WeierstrassModel<f64>> {
        let f = Poly::constant(C::new(-3.0, 0.0));
        let g = Poly::new(vec![C::new(2.01, 0.0), zero(), C::from_polar(1.0, -theta)]);
        WeierstrassModel::new(f, g)
    }
}

fn i2() -> JunctionBasis {
    JunctionBasis::new(vec![[0, 1], [0, 1]]).unwrap()
}

#[test]
fn half_twist_swaps_the_prongs() {
    let w = extract_braid::<f64>(&HalfTwist, zero(), 0.5, 64, &TrackingConfig::default()).unwrap();
    assert_eq!(w.points, 2);
    assert_eq!(w.fiber_monodromy, [[1, 0], [0, 1]]);
    assert!(w.events.iter().all(|e| matches!(e.letter, BraidLetter::Rotate { ccw: true })));
    let jb = i2();
    let roots = jb.enumerate_roots().unwrap();
    let lam = induced_automorphism(&w, &jb, &roots).unwrap();
    assert_eq!(lam.matrix, vec![vec![0, 1], vec![1, 0]]);
    assert_eq!((lam.order, lam.root_order, lam.determinant), (Some(2), Some(2), -1));

    let alg = identify_algebra(&jb, &roots).unwrap();
    let f = fold(&jb, &roots, &alg, &lam, u64::MAX).unwrap();
    // -1 on the single root of A1 is a Weyl reflection, so nothing folds.
    assert!(!f.trivial);
    assert_eq!(f.label, "A1");
}

#[test]
fn constant_loop_is_trivial() {
    let fam = SliceLoop { a: C::new(-1.0, 0.0), c: C::new(1.0, 0.0), t: C::new(1.0, 0.0), eps: C::new(1e-3, 0.0), radius: 0.0 };
    let w = extract_braid::<f64>(&fam, zero(), 0.5, 32, &TrackingConfig::default()).unwrap();
    assert!(w.events.is_empty());
    assert_eq!(w.fiber_monodromy, [[1, 0], [0, 1]]);

    let an = analyze_loop(&AnalysisConfig::template(Template::I0StarSlice), LoopConfig { steps: 32, radius: Some(0.0) }).unwrap();
    let outer = an.report.outer_monodromy.unwrap();
    assert_eq!(outer.automorphism.order, Some(1));
    assert!(outer.fold.trivial);
    assert_eq!(outer.fold.label, "D4");
}

#[test]
fn coarse_or_malformed_loops_are_rejected() {
    let cfg = AnalysisConfig::template(Template::I0StarSlice);
    let e = analyze_loop(&cfg, LoopConfig { steps: 3, radius: None }).err().expect("loop should fail");
    assert!(matches!(e.error, Error::Monodromy(_)));
    assert_eq!(e.exit_code(), 3);
    assert!(analyze_loop(&cfg, LoopConfig { steps: MIN_LOOP_STEPS, radius: None }).is_ok());
    assert_eq!(analyze_loop(&cfg, LoopConfig { steps: 64, radius: Some(-1.0) }).err().expect("loop should fail").exit_code(), 2);
    assert_eq!(
        analyze_loop(&AnalysisConfig::template(Template::IV), LoopConfig::default()).err().expect("loop should fail").exit_code(),
        2
    );

    // A braid on the wrong number of strands.
    let w = extract_braid::<f64>(&HalfTwist, zero(), 0.5, 32, &TrackingConfig::default()).unwrap();
    let jb = JunctionBasis::new(vec![[1, 0], [0, 1], [-1, -1]]).unwrap();
    assert!(induced_automorphism(&w, &jb, &[]).is_err());
}

#[test]
fn slice_automorphism_is_an_isometry_of_the_roots() {
    let an = analyze_loop(&AnalysisConfig::template(Template::I0StarSlice), LoopConfig { steps: 128, radius: None }).unwrap();
    let outer = an.report.outer_monodromy.as_ref().unwrap();
    let lam = &outer.automorphism.matrix;
    let jb = &an.junctions;
    let roots: BTreeSet<Junction> = an.roots.iter().cloned().collect();
    assert_eq!(outer.automorphism.determinant.abs(), 1);
    assert!(an.roots.iter().all(|r| roots.contains(&apply(lam, r))));
    for a in &an.roots {
        for b in &an.roots {
            assert_eq!(jb.pairing2(&apply(lam, a), &apply(lam, b)), jb.pairing2(a, b));
        }
    }
    let k = outer.automorphism.root_order.expect("finite order on roots");
    assert!(k <= 12 && outer.automorphism.order.unwrap().is_multiple_of(k));
    // Charges follow the fiber monodromy.
    let m = outer.braid.fiber_monodromy;
    for j in 0..jb.len() {
        let e: Vec<i64> = (0..jb.len()).map(|i| i64::from(i == j)).collect();
        let c = jb.cycles[j];
        assert_eq!(jb.charge(&apply(lam, &e)), [c[0] * m[0][0] + c[1] * m[1][0], c[0] * m[0][1] + c[1] * m[1][1]]);
    }

    let fold = &outer.fold;
    assert_eq!(fold.cartan.len(), fold.orbits.len());
    assert_eq!(fold.orbits.iter().map(Vec::len).sum::<usize>(), an.algebra.rank);
    assert!(fold.cartan.iter().enumerate().all(|(i, r)| r[i] == 2));
}

/// Shifting the prong coordinates by one inside each triple looks like the
/// obvious order-three symmetry, but it moves roots off the root set.
#[test]
fn naive_coordinate_shift_is_not_an_automorphism() {
    let jb = JunctionBasis::new(vec![[0, 1], [-1, -1], [1, 0], [0, 1], [-1, -1], [1, 0]]).unwrap();
    let roots = jb.enumerate_roots().unwrap();
    let set: BTreeSet<Junction> = roots.iter().cloned().collect();
    let shift: Vec<Vec<i64>> = (0..6).map(|i| (0..6).map(|j| i64::from(j / 3 == i / 3 && j % 3 == (i + 2) % 3)).collect()).collect();
    assert!(!roots.iter().all(|r| set.contains(&apply(&shift, r))));
    assert!(!roots.iter().all(|a| roots.iter().all(|b| jb.pairing2(&apply(&shift, a), &apply(&shift, b)) == jb.pairing2(a, b))));
}

#[test]
fn finer_loop_grid_gives_the_same_map() {
    let cfg = AnalysisConfig::template(Template::I0StarSlice);
    let a = analyze_loop(&cfg, LoopConfig { steps: 64, radius: None }).unwrap();
    let b = analyze_loop(&cfg, LoopConfig { steps: 128, radius: None }).unwrap();
    let (a, b) = (a.report.outer_monodromy.unwrap(), b.report.outer_monodromy.unwrap());
    assert_eq!(a.automorphism.matrix, b.automorphism.matrix);
    let letters = |o: &junctionlab::pipeline::OuterReport| o.braid.events.iter().map(|e| e.letter).collect::<Vec<_>>();
    assert_eq!(letters(&a), letters(&b));
}
