//! Deformation templates: explicit families whose discriminant splits a
//! degenerate fiber at `s = 0` into simple points.

use super::kodaira::FiberType;
use super::WeierstrassModel;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::roots::{aberth, AberthOptions};
use crate::scalar::{from_c64, Scalar};
use num_complex::Complex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

type Params = BTreeMap<String, Complex<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    I(u32),
    III,
    IV,
    I0StarSlice,
    /// Base model of the given type plus generic constant perturbations of `f` and `g`.
    Generic(FiberType),
}

impl Template {
    pub fn parse(name: &str) -> Option<Template> {
        match name {
            "I0star-slice" | "I0*-slice" => return Some(Template::I0StarSlice),
            "III" => return Some(Template::III),
            "IV" => return Some(Template::IV),
            _ => {}
        }
        match FiberType::parse(name)? {
            FiberType::I(n) => Some(Template::I(n)),
            FiberType::Smooth => None,
            t => Some(Template::Generic(t)),
        }
    }

    pub fn name(self) -> String {
        match self {
            Template::I(n) => format!("I{n}"),
            Template::III => "III".into(),
            Template::IV => "IV".into(),
            Template::I0StarSlice => "I0star-slice".into(),
            Template::Generic(t) => t.to_string().replace('*', "star"),
        }
    }

    pub fn fiber_type(self) -> FiberType {
        match self {
            Template::I(n) => FiberType::I(n),
            Template::III => FiberType::III,
            Template::IV => FiberType::IV,
            Template::I0StarSlice => FiberType::IStar(0),
            Template::Generic(t) => t,
        }
    }

    fn defaults(self) -> Vec<(&'static str, Complex<f64>)> {
        let r = |x: f64| Complex::new(x, 0.0);
        match self {
            Template::I(_) => vec![("a", r(1.0)), ("eps", r(0.01))],
            Template::III => vec![("eps", r(1e-3))],
            Template::IV => vec![("eps", r(0.01))],
            Template::I0StarSlice => vec![("a", r(-1.0)), ("c", r(1.0)), ("t", r(1.0)), ("eps", r(1e-3))],
            Template::Generic(_) => vec![("scale", r(1e-3))],
        }
    }
}

/// Names accepted by `--template`, for help output.
pub fn template_names() -> Vec<String> {
    let mut v: Vec<String> = (1..=9).map(|n| format!("I{n}")).collect();
    v.extend(["II", "III", "IV", "I0star-slice"].map(String::from));
    v.extend((0..=4).map(|n| format!("I{n}star")));
    v.extend(["IVstar", "IIIstar", "IIstar"].map(String::from));
    v
}

/// A deformed model together with what it is supposed to split into.
#[derive(Clone, Debug)]
pub struct Deformation<T: Scalar> {
    pub template: Template,
    pub model: WeierstrassModel<T>,
    /// Number of simple discriminant points expected near `s = 0`.
    pub expected_points: usize,
    /// Radius separating those points from the rest of the discriminant.
    pub radius: f64,
    /// Random draws consumed before an acceptable perturbation was found.
    pub attempts: u32,
}

const MAX_ATTEMPTS: u32 = 32;

pub fn deform_template<T: Scalar>(template: Template, params: &Params, seed: u64) -> Result<Deformation<T>> {
    let ft = template.fiber_type();
    if ft == FiberType::Smooth {
        return Err(Error::Config("nothing to deform for a smooth fiber".into()));
    }
    let mut p: Params = template.defaults().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let generic = matches!(template, Template::Generic(_));
    for (k, v) in params {
        let known = p.contains_key(k) || (generic && (k == "eps_f" || k == "eps_g"));
        if !known {
            return Err(Error::Config(format!("template {} has no parameter '{k}'", template.name())));
        }
        p.insert(k.clone(), *v);
    }
    let zero = |k: &str| p.get(k).is_some_and(|v| v.norm() == 0.0);
    if zero("eps") || zero("scale") {
        return Err(Error::Config("eps = 0 leaves the fiber undeformed".into()));
    }
    let expected = ft.disc_order() as usize;
    let fixed = !generic || p.contains_key("eps_f") || p.contains_key("eps_g");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        if generic && !fixed {
            let scale = p["scale"].norm();
            for key in ["eps_f", "eps_g"] {
                let m = scale * (0.5 + rng.random::<f64>());
                let a = std::f64::consts::TAU * rng.random::<f64>();
                p.insert(key.to_string(), Complex::from_polar(m, a));
            }
        }
        let (f, g) = build(template, &p);
        let mut shown = p.clone();
        if generic && !fixed {
            shown.remove("scale");
        }
        let model = WeierstrassModel::with_params(
            f.map(from_c64),
            g.map(from_c64),
            shown.iter().map(|(k, v)| (k.clone(), from_c64::<T>(*v))).collect(),
        )?;
        match split_radius(&model, expected) {
            Some(radius) => return Ok(Deformation { template, model, expected_points: expected, radius, attempts: attempt }),
            None if fixed => {
                return Err(Error::Config(format!(
                    "parameters of {} do not split the fiber into {expected} simple points",
                    template.name()
                )))
            }
            None => continue,
        }
    }
    Err(Error::Config(format!("no admissible perturbation of {} after {MAX_ATTEMPTS} draws", template.name())))
}

fn build(template: Template, p: &Params) -> (Poly<f64>, Poly<f64>) {
    let c = |x: f64| Complex::new(x, 0.0);
    let mono = |k: usize, v: Complex<f64>| Poly::monomial(v, k);
    match template {
        Template::I(n) => {
            let (a, eps) = (p["a"], p["eps"]);
            let f = mono(0, -a * a * 3.0);
            (f, &mono(0, a * a * a * 2.0 + eps) + &mono(n as usize, c(1.0)))
        }
        Template::III => {
            let e = p["eps"];
            (Poly::new(vec![e, c(1.0)]), Poly::new(vec![e, c(0.0), c(1.0)]))
        }
        Template::IV => {
            let e = p["eps"];
            (Poly::new(vec![e * 2.0, c(0.0), c(1.0)]), Poly::new(vec![e, c(0.0), c(1.0)]))
        }
        Template::I0StarSlice => i0star_slice_polys(p["a"], p["c"], p["t"], p["eps"]),
        Template::Generic(t) => {
            let (f0, g0) = base_polys(t);
            (&f0 + &mono(0, p["eps_f"]), &g0 + &mono(0, p["eps_g"]))
        }
    }
}

/// `f = -3 c^2 s^2`, `g = (2 c^3 + a t) s^3 + t eps`
pub fn i0star_slice_polys(a: Complex<f64>, c: Complex<f64>, t: Complex<f64>, eps: Complex<f64>) -> (Poly<f64>, Poly<f64>) {
    let f = Poly::monomial(-c * c * 3.0, 2);
    let g = Poly::new(vec![t * eps, Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), c * c * c * 2.0 + a * t]);
    (f, g)
}

/// Undeformed Weierstrass coefficients realising each type at `s = 0`.
pub fn base_polys(t: FiberType) -> (Poly<f64>, Poly<f64>) {
    let one = Complex::new(1.0, 0.0);
    let m = |c: f64, k: usize| Poly::monomial(Complex::new(c, 0.0), k);
    match t {
        FiberType::Smooth => (Poly::zero(), Poly::constant(one)),
        FiberType::I(n) => (m(-3.0, 0), &m(2.0, 0) + &m(1.0, n as usize)),
        FiberType::II => (Poly::zero(), m(1.0, 1)),
        FiberType::III => (m(1.0, 1), m(1.0, 2)),
        FiberType::IV => (m(1.0, 2), m(1.0, 2)),
        FiberType::IStar(n) => (m(-3.0, 2), &m(2.0, 3) + &m(1.0, n as usize + 3)),
        FiberType::IVStar => (Poly::zero(), m(1.0, 4)),
        FiberType::IIIStar => (m(1.0, 3), Poly::zero()),
        FiberType::IIStar => (Poly::zero(), m(1.0, 5)),
    }
}

/// Radius between the `k`-th and `k+1`-th smallest discriminant roots, if the
/// `k` innermost roots are simple, clearly separated from the rest, and the
/// fiber over `s = 0` is smooth.
pub fn split_radius<T: Scalar>(model: &WeierstrassModel<T>, k: usize) -> Option<f64> {
    let disc = model.discriminant().map(|c| Complex::new(c.re.as_f64(), c.im.as_f64()));
    if disc.coeff(0).norm() == 0.0 {
        return None;
    }
    let roots = aberth(&disc, None, AberthOptions::default())?;
    if roots.len() < k {
        return None;
    }
    let mut mods: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| a.total_cmp(b));
    let inner = &mods[..k];
    let scale = inner.last().copied().unwrap_or(1.0).max(1e-300);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < 1e-4 * scale {
                return None;
            }
        }
    }
    match mods.get(k) {
        Some(&next) if next > 1.5 * scale => Some((scale * next).sqrt()),
        Some(_) => None,
        None => Some(2.0 * scale),
    }
}
