//! Outer monodromy: follow the discriminant points around a loop in parameter
//! space, record how their counterclockwise order changes, and turn that into
//! an automorphism of the junction lattice.

use crate::cycles::{lattice_coords, normalize, skew, Cycle, FiberBasis, LatticeTransport, Mat2};
use crate::error::{Error, Result};
use crate::junctions::lattice::{det, IVec};
use crate::junctions::{dynkin, simple_systems, AlgebraId, Junction, JunctionBasis};
use crate::model::templates::i0star_slice_polys;
use crate::model::WeierstrassModel;
use crate::roots::{aberth, match_cloud, match_three, min_gap, AberthOptions};
use crate::scalar::{from_c64, Scalar, C};
use crate::tracking::{fiber_roots, order_points, ray_angle, TrackingConfig};
use num_complex::Complex;
use serde::Serialize;
use std::collections::HashMap;

/// A one-parameter family of models, periodic in `theta` with period `2 pi`.
pub trait Family<T: Scalar>: Sync {
    fn at(&self, theta: f64) -> Result<WeierstrassModel<T>>;
}

/// The `I0*` slice with `t` running over the circle `t_c + r e^{i theta}`,
/// `t_c = t - r`, so the loop starts at `t` and `r = 0` is the constant family.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SliceLoop {
    pub a: Complex<f64>,
    pub c: Complex<f64>,
    pub t: Complex<f64>,
    pub eps: Complex<f64>,
    pub radius: f64,
}

impl SliceLoop {
    pub fn t_at(&self, theta: f64) -> Complex<f64> {
        self.t - self.radius + Complex::from_polar(self.radius, theta)
    }
}

impl<T: Scalar> Family<T> for SliceLoop {
    fn at(&self, theta: f64) -> Result<WeierstrassModel<T>> {
        let (f, g) = i0star_slice_polys(self.a, self.c, self.t_at(theta), self.eps);
        WeierstrassModel::new(f.map(from_c64), g.map(from_c64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BraidLetter {
    /// Points at 1-based positions `index`, `index+1` exchange places. `sign`
    /// is +1 when the nearer point started at `index`.
    Swap { index: usize, sign: i8 },
    /// A point crosses the start ray: counterclockwise moves the last to the front.
    Rotate { ccw: bool },
}

#[derive(Debug, Clone, Serialize)]
pub struct BraidEvent {
    pub theta: f64,
    pub letter: BraidLetter,
}

#[derive(Debug, Clone, Serialize)]
pub struct BraidWord {
    pub events: Vec<BraidEvent>,
    /// Rows are the transported base classes `Z_1`, `Z_2` in base coordinates.
    pub fiber_monodromy: Mat2,
    pub points: usize,
    pub steps: usize,
}

struct LoopState<T: Scalar> {
    all: Vec<C<T>>,
    /// Indices into `all` of the tracked points, by label.
    inside: Vec<usize>,
    fiber: [C<T>; 3],
    transport: LatticeTransport<T>,
}

/// Coarsest nominal loop grid. Halving only reacts to steps whose endpoints
/// cannot be matched, so on a coarser grid two crossings that undo each other
/// inside one step would go unseen.
pub const MIN_LOOP_STEPS: usize = 16;

/// Follow the points of the family's discriminant inside `|s| < radius` once around the loop.
pub fn extract_braid<T: Scalar>(family: &dyn Family<T>, base: C<T>, radius: f64, steps: usize, cfg: &TrackingConfig) -> Result<BraidWord> {
    if steps < MIN_LOOP_STEPS {
        return Err(Error::Monodromy(format!("loop grid of {steps} steps is too coarse, need at least {MIN_LOOP_STEPS}")));
    }
    let m0 = family.at(0.0)?;
    let all0 = aberth(m0.discriminant(), None, AberthOptions::default())
        .ok_or_else(|| Error::NoConvergence("discriminant roots at theta = 0".into()))?;
    let inside: Vec<usize> = (0..all0.len()).filter(|&i| all0[i].norm().as_f64() < radius).collect();
    let pts0: Vec<C<T>> = inside.iter().map(|&i| all0[i]).collect();
    // Labels are positions in the initial order.
    let order0 = order_points(base, &pts0, cfg);
    let inside: Vec<usize> = order0.iter().map(|&k| inside[k]).collect();
    let basis = FiberBasis::at(&m0, base, cfg)?;
    let mut st = LoopState { all: all0.clone(), inside, fiber: basis.roots, transport: LatticeTransport::start(&basis) };
    let n = st.inside.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut events = Vec::new();
    let tau = std::f64::consts::TAU;
    let h0 = tau / steps as f64;
    let h_min = h0 / f64::powi(2.0, cfg.max_halvings as i32);
    let mut theta = 0.0f64;
    let mut h = h0;
    let mut taken = 0usize;
    while theta < tau {
        let next = (theta + h).min(tau);
        match loop_step(family, base, radius, &st, &order, next, cfg)? {
            Some((new_state, new_order, letters)) => {
                events.extend(letters.into_iter().map(|letter| BraidEvent { theta: next, letter }));
                st = new_state;
                order = new_order;
                theta = next;
                h = (h * 2.0).min(h0);
                taken += 1;
            }
            None => {
                h /= 2.0;
                if h < h_min {
                    return Err(Error::Monodromy(format!("step refinement exhausted at theta = {theta}")));
                }
            }
        }
    }
    // Back at the start: the same point set, and the fiber over the base is the base fiber again.
    let final_pts: Vec<C<T>> = st.inside.iter().map(|&i| st.all[i]).collect();
    for p in &pts0 {
        if !final_pts.iter().any(|q| (*q - *p).norm().as_f64() < cfg.sep_min * radius) {
            return Err(Error::Monodromy("points did not return to their initial positions".into()));
        }
    }
    let mut m = [[0i64; 2]; 2];
    let w0 = [basis.periods[0], basis.periods[1]];
    for (row, om) in m.iter_mut().zip(st.transport.omega) {
        let c = lattice_coords(w0, om).ok_or_else(|| Error::Monodromy("degenerate base periods".into()))?;
        for (x, v) in row.iter_mut().zip(c) {
            let r = v.round();
            if (v - r).abs().as_f64() > 1e-3 {
                return Err(Error::Monodromy("fiber monodromy is not integral".into()));
            }
            *x = r.as_f64() as i64;
        }
    }
    Ok(BraidWord { events, fiber_monodromy: m, points: n, steps: taken })
}

type StepResult<T> = Option<(LoopState<T>, Vec<usize>, Vec<BraidLetter>)>;

fn loop_step<T: Scalar>(
    family: &dyn Family<T>,
    base: C<T>,
    radius: f64,
    st: &LoopState<T>,
    order: &[usize],
    next: f64,
    cfg: &TrackingConfig,
) -> Result<StepResult<T>> {
    let model = family.at(next)?;
    let Some(raw) = aberth(model.discriminant(), Some(&st.all), AberthOptions::default()) else {
        return Ok(None);
    };
    let Some(perm) = match_cloud(&st.all, &raw) else { return Ok(None) };
    let all: Vec<C<T>> = perm.iter().map(|&j| raw[j]).collect();
    for (i, z) in all.iter().enumerate() {
        let tracked = st.inside.contains(&i);
        if tracked != (z.norm().as_f64() < radius) {
            return Err(Error::Monodromy(format!("a discriminant point crossed |s| = {radius} at theta = {next}")));
        }
    }
    // Base fiber.
    let Some(fr) = fiber_roots(&model, base) else { return Ok(None) };
    let (p3, cost, second) = match_three(&st.fiber, &fr);
    if !(cost * T::lit(3.0) < min_gap(&st.fiber) && second > cost * T::lit(2.0)) {
        return Ok(None);
    }
    let fiber = [fr[p3[0]], fr[p3[1]], fr[p3[2]]];
    let mut transport = st.transport.clone();
    if !transport.advance(&fiber) {
        return Ok(None);
    }

    let old: Vec<C<T>> = st.inside.iter().map(|&i| st.all[i]).collect();
    let new: Vec<C<T>> = st.inside.iter().map(|&i| all[i]).collect();
    let new_order = order_points(base, &new, cfg);
    let letters = match classify_step(base, &old, &new, order, &new_order, cfg) {
        Some(l) => l,
        None => return Ok(None),
    };
    Ok(Some((LoopState { all, inside: st.inside.clone(), fiber, transport }, new_order, letters)))
}

/// Interpret the change of order over one step as either a rotation or a set
/// of disjoint adjacent swaps. `None` asks for a smaller step.
fn classify_step<T: Scalar>(
    base: C<T>,
    old: &[C<T>],
    new: &[C<T>],
    order: &[usize],
    new_order: &[usize],
    cfg: &TrackingConfig,
) -> Option<Vec<BraidLetter>> {
    let n = order.len();
    if order == new_order {
        return Some(vec![]);
    }
    let pi = std::f64::consts::PI;
    let wraps: Vec<(usize, bool)> = (0..n)
        .filter_map(|l| {
            let d = ray_angle(base, new[l], cfg.start_angle) - ray_angle(base, old[l], cfg.start_angle);
            if d < -pi {
                Some((l, true))
            } else if d > pi {
                Some((l, false))
            } else {
                None
            }
        })
        .collect();
    match wraps.as_slice() {
        [] => {}
        [(l, ccw)] => {
            let mut rotated = order.to_vec();
            if *ccw {
                rotated.rotate_right(1);
            } else {
                rotated.rotate_left(1);
            }
            let moved = if *ccw { rotated[0] } else { rotated[n - 1] };
            return (rotated == new_order && moved == *l).then(|| vec![BraidLetter::Rotate { ccw: *ccw }]);
        }
        _ => return None,
    }
    let mut cur = order.to_vec();
    let mut letters = Vec::new();
    let mut i = 0;
    while i < n {
        if cur[i] == new_order[i] {
            i += 1;
            continue;
        }
        if i + 1 < n && cur[i] == new_order[i + 1] && cur[i + 1] == new_order[i] {
            let (x, y) = (cur[i], cur[i + 1]);
            let rx = (old[x] - base).norm();
            let ry = (old[y] - base).norm();
            if ((rx - ry).abs() / rx.max(ry)).as_f64() < 1e-9 {
                return None;
            }
            letters.push(BraidLetter::Swap { index: i + 1, sign: if rx < ry { 1 } else { -1 } });
            cur.swap(i, i + 1);
            i += 2;
        } else {
            return None;
        }
    }
    Some(letters)
}

/// Integer automorphism of the junction lattice induced by a braid word.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeAutomorphism {
    /// Acts on column vectors of junction coordinates.
    pub matrix: Vec<IVec>,
    /// Smallest `p <= 24` with `lambda^p = 1` on the full junction lattice.
    pub order: Option<u32>,
    /// Same, for the action on roots.
    pub root_order: Option<u32>,
    pub determinant: i64,
}

fn mat_apply(m: &[IVec], v: &[i64]) -> IVec {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn mat_mul(a: &[IVec], b: &[IVec]) -> Vec<IVec> {
    let n = b.first().map_or(0, Vec::len);
    a.iter().map(|r| (0..n).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect()).collect()
}

fn identity(n: usize) -> Vec<IVec> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Apply the Hurwitz moves of `word` to the basis cycles, tracking prong
/// coordinates, then identify the result with the original basis through the
/// fiber monodromy.
pub fn induced_automorphism(word: &BraidWord, basis: &JunctionBasis, roots: &[Junction]) -> Result<LatticeAutomorphism> {
    let n = basis.len();
    if word.points != n {
        return Err(Error::Monodromy(format!("braid on {} points, basis has {n} cycles", word.points)));
    }
    let mut cyc: Vec<Cycle> = basis.cycles.clone();
    let mut l = identity(n);
    for ev in &word.events {
        let mut r = identity(n);
        match ev.letter {
            BraidLetter::Swap { index, sign } => {
                let i = index - 1;
                if i + 1 >= n {
                    return Err(Error::Monodromy(format!("swap index {index} out of range")));
                }
                let (a, b) = (cyc[i], cyc[i + 1]);
                r[i][i] = 0;
                r[i + 1][i + 1] = 0;
                if sign > 0 {
                    // Nearer point moves past: (A, B) -> (T_A B, A).
                    let c = skew(b, a);
                    let (b2, s) = normalize([b[0] - c * a[0], b[1] - c * a[1]]);
                    r[i][i + 1] = s;
                    r[i + 1][i] = 1;
                    r[i + 1][i + 1] = c;
                    cyc[i] = b2;
                    cyc[i + 1] = a;
                } else {
                    // (A, B) -> (B, T_B^{-1} A).
                    let c = skew(a, b);
                    let (a2, s) = normalize([a[0] + c * b[0], a[1] + c * b[1]]);
                    r[i][i + 1] = 1;
                    r[i][i] = -c;
                    r[i + 1][i] = s;
                    cyc[i] = b;
                    cyc[i + 1] = a2;
                }
            }
            BraidLetter::Rotate { ccw } => {
                r = (0..n)
                    .map(|i| (0..n).map(|j| i64::from(if ccw { j == (i + n - 1) % n } else { j == (i + 1) % n })).collect())
                    .collect();
                if ccw {
                    cyc.rotate_right(1);
                } else {
                    cyc.rotate_left(1);
                }
            }
        }
        l = mat_mul(&r, &l);
    }
    let m = word.fiber_monodromy;
    for k in 0..n {
        let lit = [cyc[k][0] * m[0][0] + cyc[k][1] * m[1][0], cyc[k][0] * m[0][1] + cyc[k][1] * m[1][1]];
        let v = basis.cycles[k];
        let s = if lit == v {
            1
        } else if lit == [-v[0], -v[1]] {
            -1
        } else {
            return Err(Error::Monodromy(format!("cycle at position {} returns as {:?}, expected +-{:?}", k + 1, lit, v)));
        };
        for x in l[k].iter_mut() {
            *x *= s;
        }
    }
    let determinant = det(&l) as i64;
    if determinant.abs() != 1 {
        return Err(Error::Monodromy(format!("induced map has determinant {determinant}")));
    }
    // Charges transform through the fiber monodromy, and the pairing is preserved.
    for j in 0..n {
        let e: IVec = (0..n).map(|i| i64::from(i == j)).collect();
        let img = mat_apply(&l, &e);
        let a = basis.charge(&img);
        let c = basis.cycles[j];
        let want = [c[0] * m[0][0] + c[1] * m[1][0], c[0] * m[0][1] + c[1] * m[1][1]];
        if a != want {
            return Err(Error::Monodromy(format!("charge of prong {} maps to {a:?}, expected {want:?}", j + 1)));
        }
    }
    let set: std::collections::HashSet<&Junction> = roots.iter().collect();
    for r in roots {
        let img = mat_apply(&l, r);
        if basis.self_pairing(&img) != -2 || !set.contains(&img) {
            return Err(Error::Monodromy(format!("root {r:?} maps to {img:?}, which is not a root")));
        }
    }
    for a in roots {
        for b in roots {
            if basis.pairing2(&mat_apply(&l, a), &mat_apply(&l, b)) != basis.pairing2(a, b) {
                return Err(Error::Monodromy("induced map does not preserve the pairing".into()));
            }
        }
    }
    let order = matrix_order(&l, |p| p == identity(n));
    let root_order = matrix_order(&l, |p| roots.iter().all(|r| mat_apply(&p, r) == *r));
    Ok(LatticeAutomorphism { matrix: l, order, root_order, determinant })
}

fn matrix_order(l: &[IVec], is_id: impl Fn(Vec<IVec>) -> bool) -> Option<u32> {
    let mut p = l.to_vec();
    for k in 1..=24 {
        if is_id(p.clone()) {
            return Some(k);
        }
        p = mat_mul(l, &p);
    }
    None
}

/// Result of folding the root system by the outer action.
#[derive(Debug, Clone, Serialize)]
pub struct FoldResult {
    /// The automorphism fixes every root.
    pub trivial: bool,
    /// A simple system mapped to itself was found (otherwise the diagram
    /// action was obtained by reducing with Weyl reflections).
    pub stable_simple_system: bool,
    pub simple_roots: Vec<Junction>,
    /// Orbits of the diagram action, as indices into `simple_roots`.
    pub orbits: Vec<Vec<usize>>,
    pub cartan: Vec<IVec>,
    /// Gram matrix `(b_i, b_j)` of the orbit sums for the positive form `-<,>`.
    pub gram: Vec<IVec>,
    pub gram_determinant: i64,
    pub label: String,
}

pub fn fold(basis: &JunctionBasis, roots: &[Junction], algebra: &AlgebraId, lambda: &LatticeAutomorphism, cap: u64) -> Result<FoldResult> {
    let apply = |v: &[i64]| mat_apply(&lambda.matrix, v);
    if roots.iter().all(|r| apply(r) == *r) {
        return Ok(FoldResult {
            trivial: true,
            stable_simple_system: true,
            simple_roots: algebra.simple_roots.clone(),
            orbits: (0..algebra.rank).map(|i| vec![i]).collect(),
            cartan: algebra.cartan.clone(),
            gram: algebra.cartan.clone(),
            gram_determinant: det(&algebra.cartan) as i64,
            label: algebra.label.clone(),
        });
    }
    let index: HashMap<&Junction, usize> = roots.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let img: Vec<usize> = roots.iter().map(|r| index[&apply(r)]).collect();
    let search = simple_systems(basis, roots, algebra, cap, |s| {
        let mut a: Vec<usize> = s.to_vec();
        let mut b: Vec<usize> = s.iter().map(|&i| img[i]).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    });
    let (simple, sigma, stable): (Vec<Junction>, Vec<usize>, bool) = match search {
        Ok((_, Some(s))) => {
            let pos: HashMap<usize, usize> = s.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let simple: Vec<Junction> = s.iter().map(|&i| roots[i].clone()).collect();
            let sigma: Vec<usize> = s.iter().map(|&i| pos[&img[i]]).collect();
            (simple, sigma, true)
        }
        Ok((_, None)) | Err(Error::Budget(_)) => {
            let (sigma, simple) = diagram_action(basis, roots, algebra, &apply)?;
            (simple, sigma, false)
        }
        Err(e) => return Err(e),
    };
    let r = simple.len();
    let mut seen = vec![false; r];
    let mut orbits = Vec::new();
    for i in 0..r {
        if seen[i] {
            continue;
        }
        let mut o = vec![];
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            o.push(j);
            j = sigma[j];
        }
        o.sort_unstable();
        orbits.push(o);
    }
    let sums: Vec<Junction> = orbits.iter().map(|o| (0..basis.len()).map(|k| o.iter().map(|&i| simple[i][k]).sum()).collect()).collect();
    let ip = |a: &[i64], b: &[i64]| -basis.pairing2(a, b) / 2;
    let gram: Vec<IVec> = sums.iter().map(|a| sums.iter().map(|b| ip(a, b)).collect()).collect();
    let m = orbits.len();
    let mut cartan = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in 0..m {
            let num = 2 * gram[i][j];
            if num % gram[j][j] != 0 {
                return Err(Error::Classification("folded Cartan matrix is not integral".into()));
            }
            cartan[i][j] = num / gram[j][j];
        }
    }
    let norms: Vec<f64> = orbits.iter().zip(&gram).enumerate().map(|(i, (o, _))| gram[i][i] as f64 / (o.len() * o.len()) as f64).collect();
    let comps = dynkin::classify(&cartan, Some(&norms))?;
    Ok(FoldResult {
        trivial: false,
        stable_simple_system: stable,
        simple_roots: simple,
        orbits,
        gram_determinant: det(&gram) as i64,
        cartan,
        gram,
        label: dynkin::label(&comps),
    })
}

/// Diagram automorphism in the outer class of `apply`: reflect the image of the
/// canonical simple system back into the positive chamber.
fn diagram_action(
    basis: &JunctionBasis,
    roots: &[Junction],
    algebra: &AlgebraId,
    apply: &dyn Fn(&[i64]) -> IVec,
) -> Result<(Vec<usize>, Vec<Junction>)> {
    let b = roots.iter().flatten().map(|x| x.abs()).max().unwrap_or(1) as i128;
    let ell = |j: &[i64]| j.iter().rev().fold(0i128, |acc, &x| acc * (2 * b + 1) + x as i128);
    let simple = &algebra.simple_roots;
    let mut cur: Vec<Junction> = simple.iter().map(|s| apply(s)).collect();
    for _ in 0..10_000 {
        let Some(k) = cur.iter().position(|v| ell(v) < 0) else { break };
        let beta = cur[k].clone();
        cur = cur
            .iter()
            .map(|x| {
                let p = basis.pairing2(x, &beta) / 2;
                x.iter().zip(&beta).map(|(a, c)| a + p * c).collect()
            })
            .collect();
    }
    let sigma: Option<Vec<usize>> = cur.iter().map(|v| simple.iter().position(|s| s == v)).collect();
    let sigma = sigma.ok_or_else(|| Error::Classification("outer action does not permute the simple roots".into()))?;
    Ok((sigma, simple.clone()))
}

/// Rows of the fiber monodromy act on row vectors; exposed for reports.
pub fn fiber_monodromy_trace(word: &BraidWord) -> i64 {
    word.fiber_monodromy[0][0] + word.fiber_monodromy[1][1]
}
