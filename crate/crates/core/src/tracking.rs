//! Discriminant points, radial paths from the base point, and continuation
//! of the three fiber roots along each path.

use crate::error::{Error, Result};
use crate::model::WeierstrassModel;
use crate::poly::Poly;
use crate::roots::{aberth, cubic_roots, match_three, min_gap, relative_residual, AberthOptions};
use crate::scalar::{cross, Scalar, C};

use num_traits::{One, Zero};
use serde::Serialize;
use std::io::Write;

/// Numerical knobs. All lengths are relative to the disc radius unless noted.
#[derive(Debug, Clone, Serialize)]
pub struct TrackingConfig {
    /// Relative residual accepted for any computed root.
    pub tol_root: f64,
    /// Smallest admissible separation between distinct points.
    pub sep_min: f64,
    /// Distance below which the two merging roots count as coincident at `t = 1`.
    pub tol_merge: f64,
    pub initial_steps: usize,
    pub max_halvings: u32,
    /// Angular tolerance under which two points count as lying on one ray.
    pub tie_tol: f64,
    /// Angular offset of the bend inserted into the farther of two tied paths.
    pub angle_nudge: f64,
    /// Bend radius as a fraction of the nearer tied point's distance.
    pub bend_fraction: f64,
    /// Direction, in radians, of the ray that starts the counterclockwise order.
    pub start_angle: f64,
    /// Tracking jumps to `t = 1` once the merging pair is this much closer
    /// than the survivor.
    pub end_ratio: f64,
    /// Minimal triangle area / longest side^2 for a usable base fiber.
    pub collinear_tol: f64,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        TrackingConfig {
            tol_root: 1e-10,
            sep_min: 1e-4,
            tol_merge: 1e-6,
            initial_steps: 64,
            max_halvings: 16,
            tie_tol: 1e-9,
            angle_nudge: 1e-2,
            bend_fraction: 0.6,
            start_angle: -1e-6,
            end_ratio: 1e-2,
            collinear_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscriminantPoint<T: Scalar> {
    pub index: usize,
    #[serde(serialize_with = "ser_c")]
    pub s: C<T>,
    pub residual: f64,
}

pub(crate) fn ser_c<T: Scalar, S: serde::Serializer>(z: &C<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re.as_f64(), z.im.as_f64()].serialize(s)
}

/// Angle of `z - base` measured counterclockwise from the start ray, in `[0, 2pi)`.
pub fn ray_angle<T: Scalar>(base: C<T>, z: C<T>, start: f64) -> f64 {
    let a = (z - base).arg().as_f64() - start;
    a.rem_euclid(std::f64::consts::TAU)
}

/// Counterclockwise order around `base`; ties on a ray go nearer-first.
pub fn order_points<T: Scalar>(base: C<T>, pts: &[C<T>], cfg: &TrackingConfig) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let key = |i: usize| (ray_angle(base, pts[i], cfg.start_angle), (pts[i] - base).norm().as_f64());
    idx.sort_by(|&i, &j| {
        let (ai, ri) = key(i);
        let (aj, rj) = key(j);
        if (ai - aj).abs() < cfg.tie_tol {
            ri.total_cmp(&rj)
        } else {
            ai.total_cmp(&aj)
        }
    });
    idx
}

/// Simple zeros of the discriminant with `|s| < radius`, ordered around `base`.
pub fn find_discriminant_points<T: Scalar>(
    model: &WeierstrassModel<T>,
    radius: f64,
    base: C<T>,
    expected: Option<usize>,
    cfg: &TrackingConfig,
) -> Result<Vec<DiscriminantPoint<T>>> {
    if !(radius > 0.0) {
        return Err(Error::Config(format!("radius must be positive, got {radius}")));
    }
    let disc = model.discriminant();
    let all = aberth(disc, None, AberthOptions::default()).ok_or_else(|| Error::NoConvergence("discriminant roots".into()))?;
    let sep = cfg.sep_min * radius;
    let r = T::lit(radius);
    let mut inside = Vec::new();
    for (i, &q) in all.iter().enumerate() {
        let res = relative_residual(disc, q).as_f64();
        if !(res < cfg.tol_root) {
            return Err(Error::NoConvergence(format!("discriminant root {q} has residual {res:e}")));
        }
        if (q.norm() - r).abs().as_f64() < sep {
            return Err(Error::Degenerate(format!("discriminant point {q} lies on the boundary circle")));
        }
        if q.norm() < r {
            for (j, &p) in all.iter().enumerate() {
                if i != j && ((q - p).norm().as_f64()) < sep {
                    return Err(Error::MultipleRoot(format!("{q}")));
                }
            }
            inside.push((q, res));
        }
    }
    if let Some(k) = expected {
        if k != inside.len() {
            return Err(Error::RootCountMismatch { expected: k, found: inside.len(), radius });
        }
    }
    if base.norm() >= r {
        return Err(Error::Config("base point must lie inside the disc".into()));
    }
    for &(q, _) in &inside {
        if (q - base).norm().as_f64() < sep {
            return Err(Error::Degenerate(format!("base point coincides with discriminant point {q}")));
        }
    }
    let pts: Vec<C<T>> = inside.iter().map(|p| p.0).collect();
    Ok(order_points(base, &pts, cfg)
        .into_iter()
        .enumerate()
        .map(|(index, i)| DiscriminantPoint { index, s: inside[i].0, residual: inside[i].1 })
        .collect())
}

/// Polyline from the base point to one discriminant point.
#[derive(Debug, Clone, Serialize)]
pub struct Path<T: Scalar> {
    pub index: usize,
    #[serde(skip)]
    pub vertices: Vec<C<T>>,
    pub bent: bool,
}

impl<T: Scalar> Path<T> {
    pub fn base(&self) -> C<T> {
        self.vertices[0]
    }

    pub fn target(&self) -> C<T> {
        *self.vertices.last().expect("path has vertices")
    }

    pub fn length(&self) -> T {
        self.vertices.windows(2).fold(T::zero(), |acc, w| acc + (w[1] - w[0]).norm())
    }

    /// Point at arc-length fraction `t` in `[0, 1]`.
    pub fn point(&self, t: T) -> C<T> {
        if t >= T::one() {
            return self.target();
        }
        let mut left = t.max(T::zero()) * self.length();
        for w in self.vertices.windows(2) {
            let seg = (w[1] - w[0]).norm();
            if left <= seg && seg > T::zero() {
                return w[0] + (w[1] - w[0]) * (left / seg);
            }
            left = left - seg;
        }
        self.target()
    }
}

/// Straight paths, except that when several points share a ray the farther
/// ones detour through a bend just counterclockwise of it.
pub fn build_paths<T: Scalar>(base: C<T>, points: &[DiscriminantPoint<T>], cfg: &TrackingConfig) -> Result<Vec<Path<T>>> {
    let mut out = Vec::with_capacity(points.len());
    let angles: Vec<f64> = points.iter().map(|p| ray_angle(base, p.s, cfg.start_angle)).collect();
    for (k, p) in points.iter().enumerate() {
        if (p.s - base).norm() == T::zero() {
            return Err(Error::Degenerate(format!("path {k} has zero length")));
        }
        let nearer: Vec<usize> = (0..k).filter(|&j| (angles[j] - angles[k]).abs() < cfg.tie_tol).collect();
        if nearer.is_empty() {
            out.push(Path { index: k, vertices: vec![base, p.s], bent: false });
            continue;
        }
        let r_near = (points[nearer[0]].s - base).norm().as_f64();
        let phi = (p.s - base).arg().as_f64() + cfg.angle_nudge * nearer.len() as f64;
        let bend = base + C::from_polar(T::lit(cfg.bend_fraction * r_near), T::lit(phi));
        // Nothing else may sit inside the wedge swept by the detour.
        for (j, q) in points.iter().enumerate() {
            let a = angles[j] - angles[k];
            if j != k && a > cfg.tie_tol && a <= cfg.angle_nudge * (nearer.len() as f64 + 1.0) {
                return Err(Error::Degenerate(format!("point {j} lies inside the detour wedge of path {k}; q = {}", q.s)));
            }
        }
        out.push(Path { index: k, vertices: vec![base, bend, p.s], bent: true });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Sample<T: Scalar> {
    pub t: T,
    pub s: C<T>,
    pub roots: [C<T>; 3],
}

/// Fiber roots along one path. Root labels are those of the base fiber.
#[derive(Debug, Clone)]
pub struct RootTrajectory<T: Scalar> {
    pub path_index: usize,
    pub samples: Vec<Sample<T>>,
    /// Labels of the two roots that collide at the discriminant point.
    pub merging: (usize, usize),
    pub survivor: usize,
    pub refinements: u32,
}

impl<T: Scalar> RootTrajectory<T> {
    /// `(d, D)`: merging-pair distance and survivor distance at sample `k`.
    pub fn pair_ratio(&self, k: usize) -> (T, T) {
        pair_distances(&self.samples[k].roots, self.merging)
    }
}

fn pair_distances<T: Scalar>(r: &[C<T>; 3], (a, b): (usize, usize)) -> (T, T) {
    let c = 3 - a - b;
    let d = (r[a] - r[b]).norm();
    let dd = (r[c] - r[a]).norm().min((r[c] - r[b]).norm());
    (d, dd)
}

fn closest_pair<T: Scalar>(r: &[C<T>; 3]) -> (usize, usize) {
    let pairs = [(0, 1), (1, 2), (0, 2)];
    *pairs
        .iter()
        .min_by(|p, q| (r[p.0] - r[p.1]).norm().partial_cmp(&(r[q.0] - r[q.1]).norm()).unwrap_or(std::cmp::Ordering::Equal))
        .expect("three pairs")
}

/// Roots of the fiber cubic at `s`, sorted lexicographically.
pub fn fiber_roots<T: Scalar>(model: &WeierstrassModel<T>, s: C<T>) -> Option<[C<T>; 3]> {
    let (f, g) = model.fiber(s);
    let mut r = cubic_roots(f, g, None)?;
    r.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Some(r)
}

/// A fiber is usable as a base if its roots are distinct and not collinear.
pub fn fiber_is_generic<T: Scalar>(r: &[C<T>; 3], cfg: &TrackingConfig) -> bool {
    let e = [(r[1] - r[0]).norm(), (r[2] - r[1]).norm(), (r[0] - r[2]).norm()];
    let longest = e.iter().copied().fold(T::zero(), T::max);
    if longest == T::zero() {
        return false;
    }
    let area = cross(r[1] - r[0], r[2] - r[0]).abs() / T::lit(2.0);
    (area / (longest * longest)).as_f64() > cfg.collinear_tol
}

fn fiber_residual_ok<T: Scalar>(f: C<T>, g: C<T>, r: &[C<T>; 3], tol: f64) -> bool {
    let p = Poly::new(vec![g, f, C::zero(), C::one()]);
    r.iter().all(|&z| relative_residual(&p, z).as_f64() < tol)
}

/// Continue the base roots along `path` until two of them merge.
pub fn track_roots<T: Scalar>(
    model: &WeierstrassModel<T>,
    path: &Path<T>,
    start: [C<T>; 3],
    cfg: &TrackingConfig,
) -> Result<RootTrajectory<T>> {
    let fail = |reason: String| Error::Tracking { path: path.index, reason };
    let dt0 = 1.0 / cfg.initial_steps.max(1) as f64;
    let dt_min = dt0 / f64::powi(2.0, cfg.max_halvings as i32);
    let mut dt = dt0;
    let mut t = 0.0f64;
    let mut roots = start;
    let mut samples = vec![Sample { t: T::zero(), s: path.point(T::zero()), roots }];
    let mut refinements = 0u32;
    loop {
        let pair = closest_pair(&roots);
        let (d, dd) = pair_distances(&roots, pair);
        if d.as_f64() < cfg.end_ratio * dd.as_f64() {
            let (merging, survivor, last) = land(model, path, &roots, pair, cfg).map_err(fail)?;
            samples.push(last);
            return Ok(RootTrajectory { path_index: path.index, samples, merging, survivor, refinements });
        }
        // The endpoint itself is only reached through `land`.
        let h = dt.min((1.0 - t) / 2.0);
        let t_new = t + h;
        let accepted = {
            let s = path.point(T::lit(t_new));
            let (f, g) = model.fiber(s);
            cubic_roots(f, g, Some(&roots)).and_then(|new| {
                let (perm, cost, second) = match_three(&roots, &new);
                let gap = min_gap(&roots);
                let ok = cost * T::lit(3.0) < gap && second > cost * T::lit(2.0) && fiber_residual_ok(f, g, &new, cfg.tol_root);
                ok.then(|| (s, [new[perm[0]], new[perm[1]], new[perm[2]]]))
            })
        };
        match accepted {
            Some((s, next)) => {
                t = t_new;
                roots = next;
                samples.push(Sample { t: T::lit(t), s, roots });
                dt = (dt * 2.0).min(dt0);
            }
            None => {
                dt = h / 2.0;
                refinements += 1;
                if dt < dt_min {
                    return Err(fail(format!("step refinement exhausted at t = {t}")));
                }
            }
        }
    }
}

type Landing<T> = ((usize, usize), usize, Sample<T>);

fn land<T: Scalar>(
    model: &WeierstrassModel<T>,
    path: &Path<T>,
    roots: &[C<T>; 3],
    pair: (usize, usize),
    cfg: &TrackingConfig,
) -> std::result::Result<Landing<T>, String> {
    let q = path.target();
    let (f, g) = model.fiber(q);
    let new = cubic_roots(f, g, Some(roots)).ok_or("no convergence at the discriminant point")?;
    let k = 3 - pair.0 - pair.1;
    let (ks, _) = new
        .iter()
        .enumerate()
        .map(|(i, z)| (i, (*z - roots[k]).norm()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("three roots");
    let rest: Vec<usize> = (0..3).filter(|&i| i != ks).collect();
    let (x, y) = (new[rest[0]], new[rest[1]]);
    let scale = T::one().max(x.norm());
    if ((x - y).norm() / scale).as_f64() > cfg.tol_merge {
        return Err(format!("roots do not merge at the endpoint (gap {})", (x - y).norm()));
    }
    let sep = (new[ks] - x).norm().min((new[ks] - y).norm());
    if sep < (x - y).norm() * T::lit(10.0) || (sep / scale).as_f64() < cfg.tol_merge {
        return Err("survivor collides with the merging pair (triple root)".into());
    }
    let mid = (x + y) / T::lit(2.0);
    let mut out = [C::zero(); 3];
    out[k] = new[ks];
    out[pair.0] = mid;
    out[pair.1] = mid;
    let merging = if pair.0 < pair.1 { pair } else { (pair.1, pair.0) };
    Ok((merging, k, Sample { t: T::one(), s: q, roots: out }))
}

/// `index,re,im` rows for the discriminant points.
pub fn write_points_csv<T: Scalar, W: Write>(points: &[DiscriminantPoint<T>], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    wr.write_record(["index", "re", "im"]).map_err(io)?;
    for p in points {
        wr.write_record([(p.index + 1).to_string(), p.s.re.as_f64().to_string(), p.s.im.as_f64().to_string()]).map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

/// One row per sample; labels are 1-based.
pub fn write_trajectory_csv<T: Scalar, W: Write>(traj: &RootTrajectory<T>, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    wr.write_record(["path_index", "t", "re1", "im1", "re2", "im2", "re3", "im3", "merging_pair", "survivor"]).map_err(io)?;
    let pair = format!("{}-{}", traj.merging.0 + 1, traj.merging.1 + 1);
    let surv = (traj.survivor + 1).to_string();
    for smp in &traj.samples {
        let mut row = vec![(traj.path_index + 1).to_string(), smp.t.as_f64().to_string()];
        for z in smp.roots {
            row.push(z.re.as_f64().to_string());
            row.push(z.im.as_f64().to_string());
        }
        row.push(pair.clone());
        row.push(surv.clone());
        wr.write_record(&row).map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}
