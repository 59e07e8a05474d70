use junctionlab::model::templates::{deform_template, Template};
use junctionlab::tracking::{
    build_paths, fiber_is_generic, fiber_roots, find_discriminant_points, track_roots, write_points_csv, write_trajectory_csv,
    DiscriminantPoint, Path, RootTrajectory, TrackingConfig,
};
use junctionlab::{Error, Model};
use num_complex::Complex;
use std::collections::BTreeMap;
use std::f64::consts::PI;

type C = Complex<f64>;

fn template(name: &str) -> (Model, f64, usize) {
    let d = deform_template::<f64>(Template::parse(name).unwrap(), &BTreeMap::new(), 1).unwrap();
    (d.model, d.radius, d.expected_points)
}

type Traced = (Vec<DiscriminantPoint<f64>>, Vec<Path<f64>>, Vec<RootTrajectory<f64>>);

fn trajectories(name: &str, cfg: &TrackingConfig) -> Traced {
    let (m, r, n) = template(name);
    let base = C::new(0.0, 0.0);
    let pts = find_discriminant_points(&m, r, base, Some(n), cfg).unwrap();
    let paths = build_paths(base, &pts, cfg).unwrap();
    let start = fiber_roots(&m, base).unwrap();
    let trs = paths.iter().map(|p| track_roots(&m, p, start, cfg).unwrap()).collect();
    (pts, paths, trs)
}

#[test]
fn i2_points_are_plus_minus_a_tenth_i() {
    let (m, r, _) = template("I2");
    let pts = find_discriminant_points(&m, r, C::new(0.0, 0.0), Some(2), &TrackingConfig::default()).unwrap();
    assert!((pts[0].s - C::new(0.0, 0.1)).norm() < 1e-12);
    assert!((pts[1].s - C::new(0.0, -0.1)).norm() < 1e-12);
    assert!(pts.iter().all(|p| p.residual < 1e-10));
}

#[test]
fn iv_has_four_points_near_origin() {
    let (m, r, _) = template("IV");
    let pts = find_discriminant_points(&m, r, C::new(0.0, 0.0), Some(4), &TrackingConfig::default()).unwrap();
    assert_eq!(pts.len(), 4);
    assert!(pts.iter().all(|p| p.s.norm() < 0.5));
}

#[test]
fn slice_points_interleave_two_cube_root_families() {
    let (m, r, _) = template("I0star-slice");
    let pts = find_discriminant_points(&m, r, C::new(0.0, 0.0), Some(6), &TrackingConfig::default()).unwrap();
    let inner = (1.0f64 / 3000.0).cbrt();
    for (k, p) in pts.iter().enumerate() {
        let want = C::from_polar(if k % 2 == 0 { 0.1 } else { inner }, k as f64 * PI / 3.0);
        assert!((p.s - want).norm() < 1e-9, "point {k}: {} vs {want}", p.s);
    }
}

#[test]
fn point_search_errors() {
    let cfg = TrackingConfig::default();
    let (m, r, _) = template("I2");
    let zero = C::new(0.0, 0.0);
    assert!(matches!(find_discriminant_points(&m, r, zero, Some(3), &cfg), Err(Error::RootCountMismatch { expected: 3, found: 2, .. })));
    assert!(matches!(find_discriminant_points(&m, -1.0, zero, None, &cfg), Err(Error::Config(_))));
    // A double root of the discriminant.
    let m = Model::parse("f = -3; g = 2 + s^2").unwrap();
    let e = find_discriminant_points(&m, 0.5, C::new(0.1, 0.1), None, &cfg);
    assert!(matches!(e, Err(Error::MultipleRoot(_))), "{e:?}");
}

fn point(index: usize, s: C) -> DiscriminantPoint<f64> {
    DiscriminantPoint { index, s, residual: 0.0 }
}

#[test]
fn opposite_points_get_straight_paths() {
    let cfg = TrackingConfig::default();
    let pts = [point(0, C::new(0.0, 0.1)), point(1, C::new(0.0, -0.1))];
    let paths = build_paths(C::new(0.0, 0.0), &pts, &cfg).unwrap();
    assert!(paths.iter().all(|p| !p.bent && p.vertices.len() == 2));
}

#[test]
fn tied_rays_bend_the_farther_path() {
    let cfg = TrackingConfig::default();
    let base = C::new(0.0, 0.0);
    let pts = [point(0, C::new(0.1, 0.1)), point(1, C::new(0.2, 0.2))];
    let paths = build_paths(base, &pts, &cfg).unwrap();
    assert!(!paths[0].bent);
    assert!(paths[1].bent);
    let bend = paths[1].vertices[1];
    assert!((bend.norm() - cfg.bend_fraction * pts[0].s.norm()).abs() < 1e-12);
    assert!((bend.arg() - (PI / 4.0 + cfg.angle_nudge)).abs() < 1e-12);
}

#[test]
fn zero_length_path_is_rejected() {
    let base = C::new(0.05, 0.0);
    assert!(matches!(build_paths(base, &[point(0, base)], &TrackingConfig::default()), Err(Error::Degenerate(_))));
}

#[test]
fn i2_conjugate_pair_merges() {
    let cfg = TrackingConfig::default();
    let (_, _, trs) = trajectories("I2", &cfg);
    let start = trs[0].samples[0].roots;
    let want = [C::new(-2.000_833, 0.0), C::new(1.000_417, -0.057_7), C::new(1.000_417, 0.057_7)];
    for (z, w) in start.iter().zip(&want) {
        assert!((z - w).norm() < 1e-3, "{z} vs {w}");
    }
    for tr in &trs {
        assert_eq!(tr.merging, (1, 2));
        assert_eq!(tr.survivor, 0);
        let end = tr.samples.last().unwrap();
        assert!((end.roots[0] - C::new(-2.0, 0.0)).norm() < 0.01);
    }
}

#[test]
fn iii_paths_merge_exactly_two_roots() {
    let cfg = TrackingConfig::default();
    let (_, _, trs) = trajectories("III", &cfg);
    assert_eq!(trs.len(), 3);
    let mut pairs: Vec<_> = trs.iter().map(|t| t.merging).collect();
    pairs.sort();
    pairs.dedup();
    // Each pair of roots merges once.
    assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
}

#[test]
fn samples_solve_the_fiber_and_stay_apart() {
    let cfg = TrackingConfig::default();
    for name in ["I3", "III", "IV", "I0star-slice", "IVstar"] {
        let (m, _, _) = template(name);
        let (_, _, trs) = trajectories(name, &cfg);
        for tr in &trs {
            let n = tr.samples.len();
            for smp in &tr.samples[..n - 1] {
                let (f, g) = m.fiber(smp.s);
                for z in smp.roots {
                    let scale = 1.0 + z.norm().powi(3) + f.norm() * z.norm() + g.norm();
                    assert!((z * z * z + f * z + g).norm() < 1e-10 * scale, "{name}");
                }
                let r = smp.roots;
                let gap = (r[0] - r[1]).norm().min((r[1] - r[2]).norm()).min((r[0] - r[2]).norm());
                assert!(gap > cfg.tol_merge, "{name}: roots meet before the end");
            }
            let end = tr.samples[n - 1].roots;
            assert_eq!(end[tr.merging.0], end[tr.merging.1]);
        }
    }
}

#[test]
fn in_trajectories_do_not_depend_on_the_path() {
    let cfg = TrackingConfig::default();
    let (m, _, _) = template("I4");
    let (_, paths, _) = trajectories("I4", &cfg);
    for k in 0..=20 {
        let t = k as f64 / 20.0;
        let r0 = fiber_roots(&m, paths[0].point(t)).unwrap();
        for p in &paths[1..] {
            let r = fiber_roots(&m, p.point(t)).unwrap();
            for (a, b) in r0.iter().zip(&r) {
                assert!((a - b).norm() < 1e-8, "t = {t}");
            }
        }
    }
}

#[test]
fn doubling_steps_keeps_labels() {
    let cfg = TrackingConfig::default();
    let fine = TrackingConfig { initial_steps: 2 * cfg.initial_steps, ..cfg.clone() };
    for name in ["I5", "III", "IV", "I1star", "IIIstar"] {
        let (_, _, a) = trajectories(name, &cfg);
        let (_, _, b) = trajectories(name, &fine);
        let key = |v: &[RootTrajectory<f64>]| v.iter().map(|t| (t.merging, t.survivor)).collect::<Vec<_>>();
        assert_eq!(key(&a), key(&b), "{name}");
    }
}

#[test]
fn collinear_fiber_is_not_generic() {
    let cfg = TrackingConfig::default();
    let r = [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(2.0, 0.0)];
    assert!(!fiber_is_generic(&r, &cfg));
    let r = [C::new(1.0, 0.0577), C::new(1.0, -0.0577), C::new(-2.0008, 0.0)];
    assert!(fiber_is_generic(&r, &cfg));
}

#[test]
fn single_precision_tracking() {
    let d = deform_template::<f32>(Template::I(2), &BTreeMap::new(), 1).unwrap();
    let cfg = TrackingConfig { tol_root: 1e-4, tol_merge: 1e-2, ..TrackingConfig::default() };
    let base = Complex::new(0.0f32, 0.0);
    let pts = find_discriminant_points(&d.model, d.radius, base, Some(2), &cfg).unwrap();
    let paths = build_paths(base, &pts, &cfg).unwrap();
    let start = fiber_roots(&d.model, base).unwrap();
    let tr = track_roots(&d.model, &paths[0], start, &cfg).unwrap();
    assert_eq!((tr.merging, tr.survivor), ((1, 2), 0));
}

#[test]
fn csv_layout() {
    let cfg = TrackingConfig::default();
    let (pts, _, trs) = trajectories("I2", &cfg);
    let mut buf = Vec::new();
    write_points_csv(&pts, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,re,im");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,"));

    let mut buf = Vec::new();
    write_trajectory_csv(&trs[1], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path_index,t,re1,im1,re2,im2,re3,im3,merging_pair,survivor"));
    let last = text.lines().last().unwrap();
    let cells: Vec<&str> = last.split(',').collect();
    assert_eq!(cells[0], "2");
    assert_eq!(cells[1], "1");
    assert_eq!(&cells[8..], ["2-3", "1"]);
}
