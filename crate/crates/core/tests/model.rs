use junctionlab::model::kodaira::{classify_kodaira, AlgebraHint, FiberType};
use junctionlab::model::templates::{deform_template, split_radius, template_names, Template};
use junctionlab::model::{discriminant, WeierstrassModel};
use junctionlab::poly::Poly;
use junctionlab::{Error, Model, Model32};
use num_complex::Complex;
use proptest::prelude::*;
use std::collections::BTreeMap;

type C = Complex<f64>;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn coeffs(p: &Poly<f64>) -> Vec<C> {
    p.coeffs().to_vec()
}

fn close(a: &[C], b: &[C]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
}

#[test]
fn parses_literal_model() {
    let m = Model::parse("f = -3*s^2; g = 2*s^3 + 0.001").unwrap();
    assert!(close(&coeffs(m.f()), &[c(0.0), c(0.0), c(-3.0)]));
    assert!(close(&coeffs(m.g()), &[c(0.001), c(0.0), c(0.0), c(2.0)]));
}

#[test]
fn parses_parameters_comments_and_complex_literals() {
    let src = "# III template\nf = (s+eps)\ng = (s^2+eps)\neps = 0.01\n";
    let m = Model::parse(src).unwrap();
    assert!(close(&coeffs(m.f()), &[c(0.01), c(1.0)]));
    assert!(close(&coeffs(m.g()), &[c(0.01), c(0.0), c(1.0)]));
    assert_eq!(m.params()["eps"], c(0.01));

    let m = Model::parse("f = 2+3i; g = s*0.5i - (1 - s)^2").unwrap();
    assert!(close(&coeffs(m.f()), &[C::new(2.0, 3.0)]));
    assert!(close(&coeffs(m.g()), &[c(-1.0), C::new(2.0, 0.5), c(-1.0)]));
}

#[test]
fn cli_overrides_replace_bindings() {
    let mut o = BTreeMap::new();
    o.insert("eps".to_string(), c(0.5));
    let m = Model::parse_with("f = s + eps; g = 1; eps = 0.01", &o).unwrap();
    assert!(close(&coeffs(m.f()), &[c(0.5), c(1.0)]));

    o.insert("nope".to_string(), c(1.0));
    let e = Model::parse_with("f = s + eps; g = 1; eps = 0.01", &o).unwrap_err();
    assert!(matches!(e, Error::Config(_)), "{e}");
}

fn parse_err(src: &str) -> (usize, usize, String) {
    match Model::parse(src) {
        Err(Error::Parse { line, column, message }) => (line, column, message),
        other => panic!("expected a parse error for {src:?}, got {other:?}"),
    }
}

#[test]
fn missing_exponent_points_at_caret() {
    let (line, column, msg) = parse_err("f = s^; g = 1");
    assert_eq!((line, column), (1, 6), "{msg}");
}

#[test]
fn rejects_malformed_models() {
    for src in [
        "f = s/2; g = 1",
        "f = s^1.5; g = 1",
        "f = s^-1; g = 1",
        "f = s; g = q",
        "f = s; f = 1; g = 1",
        "f = s",
        "f = s; g = 1; s = 2",
        "f = s; g = a; a = a + 1",
        "f = s; g = a; a = s",
        "f = (s; g = 1",
        "f = s; g = 1 $",
    ] {
        parse_err(src);
    }
    let (line, _, _) = parse_err("f = s\ng = 1 +\n");
    assert!(line >= 2);
}

#[test]
fn zero_discriminant_is_rejected() {
    assert!(matches!(Model::parse("f = 0; g = 0"), Err(Error::DegenerateDiscriminant)));
    assert!(matches!(Model::parse("f = -3*s^2; g = 2*s^3"), Err(Error::DegenerateDiscriminant)));
}

#[test]
fn discriminant_examples() {
    let m = Model::parse("f = 0; g = 1").unwrap();
    assert!(close(&coeffs(m.discriminant()), &[c(27.0)]));

    // 4 (s+e)^3 + 27 (s^2+e)^2 expanded by hand.
    let e = 0.01;
    let m = Model::parse("f = s + 0.01; g = s^2 + 0.01").unwrap();
    let want = [4.0 * e * e * e + 27.0 * e * e, 12.0 * e * e, 12.0 * e + 54.0 * e, 4.0, 27.0];
    assert!(close(&coeffs(m.discriminant()), &want.map(c)));

    // Vanishes where (2.01 + s^2)^2 = 4, i.e. s^2 = -0.01.
    let m = Model::parse("f = -3*a^2; g = 2*a^3 + eps + s^2; a = 1; eps = 0.01").unwrap();
    for s in [C::new(0.0, 0.1), C::new(0.0, -0.1)] {
        assert!(m.discriminant().eval(s).norm() < 1e-9);
    }
}

#[test]
fn kodaira_examples_and_errors() {
    assert_eq!(classify_kodaira(Some(0), Some(0), Some(3)).unwrap(), FiberType::I(3));
    assert_eq!(FiberType::I(3).algebra(), AlgebraHint::A(2));
    assert_eq!(classify_kodaira(Some(1), Some(2), Some(3)).unwrap(), FiberType::III);
    assert_eq!(FiberType::III.algebra(), AlgebraHint::A(1));
    assert_eq!(classify_kodaira(Some(4), Some(5), Some(10)).unwrap(), FiberType::IIStar);
    assert_eq!(FiberType::IIStar.algebra(), AlgebraHint::E(8));
    // Both I_n* rows give the same type.
    assert_eq!(classify_kodaira(Some(2), Some(4), Some(7)).unwrap(), classify_kodaira(Some(3), Some(3), Some(7)).unwrap());
    assert!(matches!(classify_kodaira(Some(1), Some(1), Some(5)), Err(Error::UnknownKodaira { .. })));
    assert_eq!(Model::parse("f = s^3; g = s^2 + s^5").unwrap().kodaira_at_zero().unwrap(), FiberType::IV);
    assert_eq!(Model::parse("f = s^2; g = s^4").unwrap().kodaira_at_zero().unwrap(), FiberType::IStar(0));
}

#[test]
fn fiber_type_names_round_trip() {
    for t in [FiberType::I(4), FiberType::II, FiberType::IStar(2), FiberType::IVStar, FiberType::IIIStar, FiberType::IIStar] {
        assert_eq!(FiberType::parse(&t.to_string()), Some(t));
        assert_eq!(FiberType::parse(&t.to_string().replace('*', "star")), Some(t));
    }
}

#[test]
fn template_examples() {
    let none = BTreeMap::new();
    let d = deform_template::<f64>(Template::I(2), &none, 1).unwrap();
    assert!(close(&coeffs(d.model.f()), &[c(-3.0)]));
    assert!(close(&coeffs(d.model.g()), &[c(2.01), c(0.0), c(1.0)]));

    let d = deform_template::<f64>(Template::IV, &none, 1).unwrap();
    assert!(close(&coeffs(d.model.f()), &[c(0.02), c(0.0), c(1.0)]));
    assert!(close(&coeffs(d.model.g()), &[c(0.01), c(0.0), c(1.0)]));

    let d = deform_template::<f64>(Template::I0StarSlice, &none, 1).unwrap();
    assert!(close(&coeffs(d.model.f()), &[c(0.0), c(0.0), c(-3.0)]));
    assert!(close(&coeffs(d.model.g()), &[c(0.001), c(0.0), c(0.0), c(1.0)]));
    assert_eq!(d.expected_points, 6);
}

#[test]
fn template_parameter_errors() {
    let mut p = BTreeMap::new();
    p.insert("eps".to_string(), c(0.0));
    assert!(deform_template::<f64>(Template::III, &p, 1).is_err());
    let mut p = BTreeMap::new();
    p.insert("bogus".to_string(), c(1.0));
    assert!(matches!(deform_template::<f64>(Template::IV, &p, 1), Err(Error::Config(_))));
    assert!(Template::parse("I0").is_none());
    assert!(Template::parse("V").is_none());
}

/// `gcd(D, D')` has degree zero inside the disc: no root of `D` is close to
/// a root of `D'`.
#[test]
fn templates_split_into_simple_points() {
    for name in template_names() {
        let t = Template::parse(&name).unwrap();
        let d = deform_template::<f64>(t, &BTreeMap::new(), 1).unwrap();
        let disc = d.model.discriminant();
        let dd = disc.derivative();
        let scale = disc.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let roots = junctionlab::roots::aberth(disc, None, Default::default()).unwrap();
        let inside: Vec<_> = roots.iter().filter(|z| z.norm() < d.radius).collect();
        assert_eq!(inside.len(), d.expected_points, "{name}");
        assert_eq!(d.expected_points as u32, t.fiber_type().disc_order(), "{name}");
        for z in inside {
            assert!(dd.eval(*z).norm() > 1e-12 * scale, "{name}: double root at {z}");
        }
        assert!(split_radius(&d.model, d.expected_points).is_some(), "{name}");
    }
}

#[test]
fn generic_deformation_is_seeded() {
    let none = BTreeMap::new();
    let t = Template::Generic(FiberType::IVStar);
    let a = deform_template::<f64>(t, &none, 7).unwrap();
    let b = deform_template::<f64>(t, &none, 7).unwrap();
    let other = deform_template::<f64>(t, &none, 8).unwrap();
    assert_eq!(coeffs(a.model.g()), coeffs(b.model.g()));
    assert_ne!(coeffs(a.model.g()), coeffs(other.model.g()));
    // The undeformed part is untouched.
    assert_eq!(a.model.g().coeff(4), c(1.0));
}

#[test]
fn single_precision_model() {
    let m = Model32::parse("f = s + 0.25; g = s^2 - 1").unwrap();
    let v = m.discriminant().eval(Complex::new(0.5f32, 0.0));
    let want = 4.0 * 0.75f32.powi(3) + 27.0 * 0.75f32.powi(2);
    assert!((v.re - want).abs() < 1e-4);
}

fn small_poly() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..5)
}

fn to_poly(v: &[(f64, f64)]) -> Poly<f64> {
    Poly::new(v.iter().map(|&(a, b)| C::new(a, b)).collect())
}

proptest! {
    #[test]
    fn discriminant_matches_pointwise_value(f in small_poly(), g in small_poly(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let (f, g) = (to_poly(&f), to_poly(&g));
        let s = C::new(re, im);
        let d = discriminant(&f, &g).eval(s);
        let fv = f.eval(s);
        let gv = g.eval(s);
        let direct = 4.0 * fv * fv * fv + 27.0 * gv * gv;
        let scale = 1.0 + 4.0 * fv.norm().powi(3) + 27.0 * gv.norm().powi(2);
        prop_assert!((d - direct).norm() <= 1e-9 * scale);
    }

    #[test]
    fn printed_model_parses_back(f in small_poly(), g in small_poly()) {
        let (f, g) = (to_poly(&f), to_poly(&g));
        prop_assume!(!discriminant(&f, &g).is_zero());
        let m = WeierstrassModel::new(f, g).unwrap();
        let back = Model::parse(&m.to_spec_string()).unwrap();
        prop_assert_eq!(coeffs(back.f()), coeffs(m.f()));
        prop_assert_eq!(coeffs(back.g()), coeffs(m.g()));
    }
}
