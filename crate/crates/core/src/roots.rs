//! Simultaneous polynomial root finding (Aberth–Ehrlich) and root matching.

use crate::poly::Poly;
use crate::scalar::{Scalar, C};
use num_traits::{One, Zero};

#[derive(Debug, Clone, Copy)]
pub struct AberthOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for AberthOptions {
    fn default() -> Self {
        AberthOptions { max_iter: 400, tol: 1e-15 }
    }
}

/// All roots of `p`, optionally seeded. Returns `None` if `p` is constant or
/// the iteration produced non-finite values.
pub fn aberth<T: Scalar>(p: &Poly<T>, seed: Option<&[C<T>]>, opts: AberthOptions) -> Option<Vec<C<T>>> {
    let n = p.degree()?;
    if n == 0 {
        return Some(vec![]);
    }
    let lead = p.coeff(n);
    let monic = p.scale(C::<T>::one() / lead);
    let dp = monic.derivative();
    let mut z: Vec<C<T>> = match seed {
        Some(s) if s.len() == n => s.to_vec(),
        _ => initial_guesses(&monic),
    };
    let tol = T::lit(opts.tol);
    for _ in 0..opts.max_iter {
        let mut done = true;
        let prev = z.clone();
        for i in 0..n {
            let pz = monic.eval(z[i]);
            if pz.is_zero() {
                continue;
            }
            let ratio = pz / dp.eval(z[i]);
            let mut repulse = C::<T>::zero();
            for (j, &zj) in prev.iter().enumerate() {
                if j != i {
                    let d = z[i] - zj;
                    if !d.is_zero() {
                        repulse = repulse + C::<T>::one() / d;
                    }
                }
            }
            let denom: C<T> = C::<T>::one() - ratio * repulse;
            let step = if denom.norm().is_finite() && !denom.is_zero() { ratio / denom } else { ratio };
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] = z[i] - step;
            if step.norm() > tol * (T::one() + z[i].norm()) {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    for zi in z.iter_mut() {
        *zi = newton_polish(&monic, &dp, *zi);
    }
    z.iter().all(|w| w.re.is_finite() && w.im.is_finite()).then_some(z)
}

fn newton_polish<T: Scalar>(p: &Poly<T>, dp: &Poly<T>, mut z: C<T>) -> C<T> {
    let mut best = p.eval(z).norm();
    for _ in 0..3 {
        let d = dp.eval(z);
        if d.is_zero() {
            break;
        }
        let cand = z - p.eval(z) / d;
        let r = p.eval(cand).norm();
        if !(r < best) {
            break;
        }
        best = r;
        z = cand;
    }
    z
}

fn initial_guesses<T: Scalar>(monic: &Poly<T>) -> Vec<C<T>> {
    let n = monic.degree().unwrap_or(0);
    // Geometric mean of the Fujiwara-type terms keeps the circle near the root cloud.
    let mut r = T::zero();
    for k in 0..n {
        let c = monic.coeff(k).norm();
        if c > T::zero() {
            r = r.max(c.powf(T::one() / T::lit((n - k) as f64)));
        }
    }
    if r == T::zero() {
        r = T::one();
    }
    let center = -monic.coeff(n - 1) / T::lit(n as f64);
    (0..n)
        .map(|k| {
            let a = T::lit(2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4);
            center + C::from_polar(r, a)
        })
        .collect()
}

/// Backward error of `z` as a root: the smaller of `|p(z)| / sum |c_k||z|^k`
/// and the normwise `|p(z)| / (sum |c_k| max(1,|z|)^n)`. The second one keeps
/// roots at (numerically) zero of polynomials with vanishing low coefficients.
pub fn relative_residual<T: Scalar>(p: &Poly<T>, z: C<T>) -> T {
    let v = p.eval(z).norm();
    if v == T::zero() {
        return T::zero();
    }
    let n = p.degree().unwrap_or(0) as i32;
    let norm = p.coeffs().iter().map(|c| c.norm()).fold(T::zero(), |a, b| a + b) * z.norm().max(T::one()).powi(n);
    let comp = p.eval_abs(z);
    let r = |s: T| if s > T::zero() { v / s } else { T::infinity() };
    r(comp).min(r(norm))
}

/// Best and runner-up assignment of three roots: `next[perm[i]]` continues `prev[i]`.
pub fn match_three<T: Scalar>(prev: &[C<T>; 3], next: &[C<T>; 3]) -> ([usize; 3], T, T) {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut scored: Vec<(T, [usize; 3])> = PERMS
        .iter()
        .map(|p| {
            let cost = (0..3).map(|i| (prev[i] - next[p[i]]).norm()).fold(T::zero(), T::max);
            (cost, *p)
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    (scored[0].1, scored[0].0, scored[1].0)
}

/// Nearest-neighbour continuation of a point cloud. Fails unless every
/// point moved less than a third of the smallest gap in `prev`.
pub fn match_cloud<T: Scalar>(prev: &[C<T>], next: &[C<T>]) -> Option<Vec<usize>> {
    if prev.len() != next.len() {
        return None;
    }
    let gap = min_gap(prev);
    let mut used = vec![false; next.len()];
    let mut perm = Vec::with_capacity(prev.len());
    for &p in prev {
        let (j, d) = next
            .iter()
            .enumerate()
            .map(|(j, &q)| (j, (p - q).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))?;
        if used[j] || (prev.len() > 1 && d * T::lit(3.0) >= gap) {
            return None;
        }
        used[j] = true;
        perm.push(j);
    }
    Some(perm)
}

pub fn min_gap<T: Scalar>(z: &[C<T>]) -> T {
    let mut g = T::infinity();
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            g = g.min((z[i] - z[j]).norm());
        }
    }
    g
}

/// Roots of the fiber cubic `x^3 + f x + g`.
pub fn cubic_roots<T: Scalar>(f: C<T>, g: C<T>, seed: Option<&[C<T>; 3]>) -> Option<[C<T>; 3]> {
    let p = Poly::new(vec![g, f, C::<T>::zero(), C::<T>::one()]);
    let z = aberth(&p, seed.map(|s| &s[..]), AberthOptions::default())?;
    Some([z[0], z[1], z[2]])
}
