//! Vanishing cycles in `H_1` of the base fiber.
//!
//! Classes are tracked by transporting periods: along a path the edge periods
//! of the current fiber are expressed in the lattice spanned by the transported
//! base periods, and rounding those coordinates keeps an exact integer record of
//! how the edge classes move. The crossing-parity rule is kept as an
//! independent cross-check.

use crate::error::{Error, Result};
use crate::model::WeierstrassModel;
use crate::roots::{cubic_roots, match_three};
use crate::scalar::{cross, Scalar, C};
use crate::tracking::{fiber_is_generic, fiber_roots, Path, RootTrajectory, Sample, TrackingConfig};
use num_traits::One;
use serde::Serialize;

/// Class in `H_1(E, Z)` in the `(Z_1, Z_2)` basis of the base fiber.
pub type Cycle = [i64; 2];
pub type Mat2 = [[i64; 2]; 2];

/// Intersection form: `(a, b) . (c, d) = ad - bc`.
pub fn skew(a: Cycle, b: Cycle) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Sign-normalised class. `+-Z_3` becomes `Z_3 = (-1,-1)` so that the three
/// edge classes of the base fiber keep summing to zero; every other class gets
/// its first nonzero coordinate positive. Also returns the sign used.
pub fn normalize(c: Cycle) -> (Cycle, i64) {
    if c == [1, 1] {
        ([-1, -1], -1)
    } else if c == [-1, -1] {
        (c, 1)
    } else if c[0] < 0 || (c[0] == 0 && c[1] < 0) {
        ([-c[0], -c[1]], -1)
    } else {
        (c, 1)
    }
}

/// Period of the edge class joining roots `a` and `b` of `(x-a)(x-b)(x-c)`,
/// computed by the trapezoid rule in `x = m + h cos(phi)`, which is spectrally
/// accurate for this periodic integrand.
pub fn edge_period<T: Scalar>(a: C<T>, b: C<T>, c: C<T>) -> C<T> {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let h = (b - a) / two;
    let wm = m - c;
    let root_wm = wm.sqrt();
    let f = |phi: T| C::<T>::one() / (root_wm * ((wm + h * phi.cos()) / wm).sqrt());
    let pi = T::PI();
    let mut n = 64usize;
    let rule = |n: usize| {
        let mut acc = (f(T::zero()) + f(pi)) / two;
        for k in 1..n {
            acc = acc + f(pi * T::lit(k as f64) / T::lit(n as f64));
        }
        acc * (pi / T::lit(n as f64))
    };
    let mut prev = rule(n);
    let tol = (T::epsilon() * T::lit(64.0)).max(T::lit(1e-12));
    while n < 1 << 16 {
        n *= 2;
        let next = rule(n);
        let done = (next - prev).norm() <= tol * next.norm();
        prev = next;
        if done {
            break;
        }
    }
    prev * C::new(T::zero(), -two)
}

/// Periods of the three edge classes `(0,1)`, `(1,2)`, `(2,0)`, signed so they sum to zero.
pub fn z_periods<T: Scalar>(r: &[C<T>; 3]) -> [C<T>; 3] {
    let p = [edge_period(r[0], r[1], r[2]), edge_period(r[1], r[2], r[0]), edge_period(r[2], r[0], r[1])];
    let mut best = (T::infinity(), p);
    for s1 in [T::one(), -T::one()] {
        for s2 in [T::one(), -T::one()] {
            let q = [p[0], p[1] * s1, p[2] * s2];
            let v = (q[0] + q[1] + q[2]).norm();
            if v < best.0 {
                best = (v, q);
            }
        }
    }
    best.1
}

/// Real coordinates of `q` in the lattice basis `(w1, w2)`.
pub fn lattice_coords<T: Scalar>(w: [C<T>; 2], q: C<T>) -> Option<[T; 2]> {
    let det = cross(w[0], w[1]);
    if det == T::zero() {
        return None;
    }
    Some([cross(q, w[1]) / det, cross(w[0], q) / det])
}

/// Labelled base fiber: `Z_1` joins roots 0,1 and `Z_2` joins roots 1,2, oriented so `Z_1 . Z_2 = 1`.
#[derive(Debug, Clone)]
pub struct FiberBasis<T: Scalar> {
    pub s: C<T>,
    pub roots: [C<T>; 3],
    pub periods: [C<T>; 3],
}

impl<T: Scalar> FiberBasis<T> {
    pub fn new(s: C<T>, roots: [C<T>; 3], cfg: &TrackingConfig) -> Result<Self> {
        if !fiber_is_generic(&roots, cfg) {
            return Err(Error::Degenerate(format!("fiber over {s} is singular or its roots are collinear")));
        }
        let mut r = roots;
        r.sort_by(|a, b| {
            a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
        });
        let mut periods = z_periods(&r);
        // Orientation calibrated so that the junction pairing has the standard sign.
        if (periods[0].conj() * periods[1]).im > T::zero() {
            r.swap(1, 2);
            periods = z_periods(&r);
        }
        Ok(FiberBasis { s, roots: r, periods })
    }

    pub fn at(model: &WeierstrassModel<T>, s: C<T>, cfg: &TrackingConfig) -> Result<Self> {
        let r = fiber_roots(model, s).ok_or_else(|| Error::NoConvergence(format!("fiber roots over {s}")))?;
        Self::new(s, r, cfg)
    }

    /// Classes of `Z_1, Z_2, Z_3` in this basis.
    pub fn z_classes() -> [Cycle; 3] {
        [[1, 0], [0, 1], [-1, -1]]
    }

    /// Base-literal class of the edge joining two root labels.
    pub fn edge_class(a: usize, b: usize) -> Cycle {
        match (a.min(b), a.max(b)) {
            (0, 1) => [1, 0],
            (1, 2) => [0, 1],
            _ => [-1, -1],
        }
    }
}

/// Transported base periods plus the integer matrix whose rows are the current
/// `Z_1, Z_2` in base coordinates.
#[derive(Debug, Clone)]
pub struct LatticeTransport<T: Scalar> {
    pub omega: [C<T>; 2],
    pub n: Mat2,
    pub round_tol: f64,
}

impl<T: Scalar> LatticeTransport<T> {
    pub fn start(basis: &FiberBasis<T>) -> Self {
        LatticeTransport { omega: [basis.periods[0], basis.periods[1]], n: [[1, 0], [0, 1]], round_tol: 0.1 }
    }

    /// Move to a nearby fiber whose roots carry the same labels. Fails without
    /// changing state if the step is too large to round reliably.
    pub fn advance(&mut self, roots: &[C<T>; 3]) -> bool {
        let z = z_periods(roots);
        let (Some(c1), Some(c2)) = (lattice_coords(self.omega, z[0]), lattice_coords(self.omega, z[1])) else {
            return false;
        };
        let mut n = [[0i64; 2]; 2];
        for (row, c) in n.iter_mut().zip([c1, c2]) {
            for (x, v) in row.iter_mut().zip(c) {
                let r = v.round();
                if !((v - r).abs().as_f64() < self.round_tol) {
                    return false;
                }
                *x = r.as_f64() as i64;
            }
        }
        let det = n[0][0] * n[1][1] - n[0][1] * n[1][0];
        if det.abs() != 1 {
            return false;
        }
        // omega = N^{-1} [Q1, Q2]
        let d = T::lit(det as f64);
        let m = |x: i64| T::lit(x as f64);
        self.omega = [(z[0] * m(n[1][1]) - z[1] * m(n[0][1])) / d, (z[1] * m(n[0][0]) - z[0] * m(n[1][0])) / d];
        self.n = n;
        true
    }

    /// Current class of the edge joining labels `a`, `b`, in base coordinates.
    pub fn edge(&self, a: usize, b: usize) -> Cycle {
        let [r0, r1] = self.n;
        match (a.min(b), a.max(b)) {
            (0, 1) => r0,
            (1, 2) => r1,
            _ => [-(r0[0] + r1[0]), -(r0[1] + r1[1])],
        }
    }
}

/// Transport from `from` to `to`, inserting intermediate fibers along `path`
/// whenever the coordinates cannot be rounded safely.
fn transport_step<T: Scalar>(
    model: &WeierstrassModel<T>,
    path: &Path<T>,
    lt: &mut LatticeTransport<T>,
    from: &Sample<T>,
    to: &Sample<T>,
    depth: u32,
) -> Result<()> {
    if lt.advance(&to.roots) {
        return Ok(());
    }
    if depth == 0 {
        return Err(Error::Tracking { path: path.index, reason: format!("period transport failed near t = {}", to.t) });
    }
    let tm = (from.t + to.t) / T::lit(2.0);
    let s = path.point(tm);
    let (f, g) = model.fiber(s);
    let mid = cubic_roots(f, g, Some(&from.roots))
        .ok_or_else(|| Error::Tracking { path: path.index, reason: "no convergence while refining transport".into() })?;
    let (perm, _, _) = match_three(&from.roots, &mid);
    let mid = Sample { t: tm, s, roots: [mid[perm[0]], mid[perm[1]], mid[perm[2]]] };
    transport_step(model, path, lt, from, &mid, depth - 1)?;
    transport_step(model, path, lt, &mid, to, depth - 1)
}

/// Crossing-parity data for one path.
#[derive(Debug, Clone, Serialize)]
pub struct ParityCheck {
    /// Crossings of the open segment between the two merging base roots.
    pub m1: i64,
    /// Half the signed endpoint contributions.
    pub m2: i64,
    pub odd: bool,
    /// The survivor's trace stays off the merging roots' traces.
    pub hypothesis: bool,
    /// Parity prediction matches the transported class; `None` when the class
    /// is outside the two cases the parity rule distinguishes.
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VanishingCycle {
    pub path_index: usize,
    pub class: Cycle,
    pub merging: (usize, usize),
    pub survivor: usize,
    pub parity: ParityCheck,
}

/// Stop transporting once the merging pair is this much closer than the survivor.
pub const STOP_RATIO: f64 = 0.02;

/// Vanishing class of one trajectory, in base coordinates, sign-normalised.
pub fn vanishing_cycle<T: Scalar>(
    model: &WeierstrassModel<T>,
    path: &Path<T>,
    traj: &RootTrajectory<T>,
    basis: &FiberBasis<T>,
) -> Result<VanishingCycle> {
    let mut lt = LatticeTransport::start(basis);
    let (a, b) = traj.merging;
    let last = traj.samples.len() - 1;
    let mut reached = false;
    for k in 1..last {
        transport_step(model, path, &mut lt, &traj.samples[k - 1], &traj.samples[k], 24)?;
        let (d, dd) = traj.pair_ratio(k);
        if d.as_f64() < STOP_RATIO * dd.as_f64() {
            reached = true;
            break;
        }
    }
    if !reached {
        return Err(Error::Tracking { path: path.index, reason: "merging pair never became close".into() });
    }
    let (class, _) = normalize(lt.edge(a, b));
    let parity = crossing_parity(traj, class);
    Ok(VanishingCycle { path_index: traj.path_index, class, merging: traj.merging, survivor: traj.survivor, parity })
}

fn segments_cross<T: Scalar>(p: C<T>, p2: C<T>, q: C<T>, q2: C<T>) -> Option<(T, T)> {
    let r = p2 - p;
    let s = q2 - q;
    let den = cross(r, s);
    if den == T::zero() {
        return None;
    }
    let t = cross(q - p, s) / den;
    let u = cross(q - p, r) / den;
    Some((t, u))
}

/// Crossing parity of the merging roots' joint trace against the straight
/// segment between them in the base fiber.
pub fn crossing_parity<T: Scalar>(traj: &RootTrajectory<T>, class: Cycle) -> ParityCheck {
    let (a, b) = traj.merging;
    let c = traj.survivor;
    let mut trace: Vec<C<T>> = traj.samples.iter().map(|s| s.roots[a]).collect();
    trace.extend(traj.samples.iter().rev().skip(1).map(|s| s.roots[b]));
    let p0 = trace[0];
    let p1 = *trace.last().expect("nonempty trace");
    let dir = p1 - p0;
    let len = dir.norm();
    let tiny = len * T::lit(1e-9);

    let mut m1 = 0i64;
    for w in trace.windows(2) {
        if let Some((t, u)) = segments_cross(w[0], w[1], p0, p1) {
            let inside_edge = t > T::zero() && t <= T::one();
            let inside_seg = u * len > tiny && (T::one() - u) * len > tiny;
            if inside_edge && inside_seg && (w[1] - p1).norm() > tiny {
                m1 += 1;
            }
        }
    }
    let side = |z: C<T>| -> i64 {
        let v = cross(dir, z - p0);
        if v.abs() <= tiny * len {
            0
        } else if v > T::zero() {
            1
        } else {
            -1
        }
    };
    let s_start = trace.iter().map(|&z| side(z)).find(|&v| v != 0).unwrap_or(0);
    let s_end = trace.iter().rev().map(|&z| side(z)).find(|&v| v != 0).unwrap_or(0);
    let m2 = (s_start - s_end) / 2;
    let odd = (m1 + m2.abs()) % 2 == 1;

    let surv: Vec<C<T>> = traj.samples.iter().map(|s| s.roots[c]).collect();
    let mut hypothesis = true;
    'outer: for w in trace.windows(2) {
        for v in surv.windows(2) {
            if let Some((t, u)) = segments_cross(w[0], w[1], v[0], v[1]) {
                if t >= T::zero() && t <= T::one() && u >= T::zero() && u <= T::one() {
                    hypothesis = false;
                    break 'outer;
                }
            }
        }
    }

    let z_ab = normalize(FiberBasis::<T>::edge_class(a, b)).0;
    let same_parity = (class[0] - z_ab[0]).rem_euclid(2) == 0 && (class[1] - z_ab[1]).rem_euclid(2) == 0;
    let agrees = same_parity.then(|| (class == z_ab) != odd);
    ParityCheck { m1, m2, odd, hypothesis, agrees }
}

/// Matrix of `x -> x - (x . g) g` acting on column vectors.
pub fn pl_matrix(g: Cycle) -> Result<Mat2> {
    if g == [0, 0] {
        return Err(Error::Degenerate("Picard-Lefschetz matrix of the zero cycle".into()));
    }
    let [p, q] = g;
    Ok([[1 - p * q, p * p], [-q * q, 1 + p * q]])
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[0; 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// Product `T_{g_1} T_{g_2} ... T_{g_N}` of the Picard–Lefschetz matrices.
pub fn total_monodromy(cycles: &[Cycle]) -> Result<Mat2> {
    cycles.iter().try_fold([[1, 0], [0, 1]], |acc, &g| Ok(mat_mul(&acc, &pl_matrix(g)?)))
}

pub fn trace(m: &Mat2) -> i64 {
    m[0][0] + m[1][1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn lattice_coordinates() {
        let w = [Complex::new(1.0f64, 0.0), Complex::new(0.5, 2.0)];
        let q = w[0] * 3.0 - w[1] * 2.0;
        let c = lattice_coords(w, q).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-12 && (c[1] + 2.0).abs() < 1e-12);
        assert!(lattice_coords([w[0], w[0] * 2.0], q).is_none());
    }

    #[test]
    fn segment_intersection() {
        let c = |x: f64, y: f64| Complex::new(x, y);
        let (t, u) = segments_cross(c(0.0, 0.0), c(2.0, 0.0), c(1.0, -1.0), c(1.0, 1.0)).unwrap();
        assert!((t - 0.5).abs() < 1e-15 && (u - 0.5).abs() < 1e-15);
        assert!(segments_cross(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)).is_none());
    }

    #[test]
    fn composition_order() {
        // T_a T_b differs from T_b T_a for intersecting cycles.
        let (a, b) = ([1, 0], [0, 1]);
        assert_eq!(total_monodromy(&[a, b]).unwrap(), mat_mul(&pl_matrix(a).unwrap(), &pl_matrix(b).unwrap()));
        assert_ne!(total_monodromy(&[a, b]).unwrap(), total_monodromy(&[b, a]).unwrap());
        assert_eq!(total_monodromy(&[]).unwrap(), [[1, 0], [0, 1]]);
    }
}
