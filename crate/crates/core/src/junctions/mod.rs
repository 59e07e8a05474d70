//! String junctions: integer combinations of prongs on the ordered vanishing
//! cycles, with asymptotic charge and self-intersection.

pub mod dynkin;
pub mod lattice;

use crate::cycles::{skew, Cycle};
use crate::error::{Error, Result};
use dynkin::Component;
use lattice::{integer_kernel, is_positive_definite, lll, vectors_of_norm, IVec};
use serde::Serialize;
use std::collections::HashSet;

pub type Junction = IVec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JunctionBasis {
    pub cycles: Vec<Cycle>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl JunctionBasis {
    pub fn new(cycles: Vec<Cycle>) -> Result<Self> {
        for (i, c) in cycles.iter().enumerate() {
            if gcd(c[0], c[1]) != 1 {
                return Err(Error::Lattice(format!("cycle {} = {:?} is not primitive", i + 1, c)));
            }
        }
        Ok(JunctionBasis { cycles })
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    fn check(&self, j: &[i64]) {
        assert_eq!(j.len(), self.len(), "junction length does not match the basis");
    }

    /// `a(J) = sum J_i gamma_i`
    pub fn charge(&self, j: &[i64]) -> Cycle {
        self.check(j);
        j.iter().zip(&self.cycles).fold([0, 0], |acc, (&x, c)| [acc[0] + x * c[0], acc[1] + x * c[1]])
    }

    /// `<J,J> = -sum_{k>j>=2} J_k J_j (gamma_k . gamma_j) - sum_j J_j^2` (indices 1-based).
    pub fn self_pairing(&self, j: &[i64]) -> i64 {
        self.check(j);
        let mut w = [0i64, 0];
        let mut q = 0;
        for (k, (&x, &c)) in j.iter().zip(&self.cycles).enumerate() {
            if k >= 1 {
                q -= x * skew(c, w);
                w = [w[0] + x * c[0], w[1] + x * c[1]];
            }
            q -= x * x;
        }
        q
    }

    /// `2<J,K>`, always an integer.
    pub fn pairing2(&self, j: &[i64], k: &[i64]) -> i64 {
        let sum: Vec<i64> = j.iter().zip(k).map(|(a, b)| a + b).collect();
        self.self_pairing(&sum) - self.self_pairing(j) - self.self_pairing(k)
    }

    /// Polarised pairing. Integral when either junction has zero charge; other
    /// pairs can land on a half-integer, which is reported as an error.
    pub fn pairing(&self, j: &[i64], k: &[i64]) -> Result<i64> {
        let p = self.pairing2(j, k);
        if p % 2 != 0 {
            return Err(Error::Lattice(format!("pairing of {j:?} and {k:?} is the half-integer {p}/2")));
        }
        Ok(p / 2)
    }

    /// Basis of the zero-charge sublattice, LLL reduced for `-<,>` and sign normalised.
    pub fn kernel_basis(&self) -> Result<Vec<Junction>> {
        let n = self.len();
        let rows: Vec<IVec> = vec![self.cycles.iter().map(|c| c[0]).collect(), self.cycles.iter().map(|c| c[1]).collect()];
        let ker = integer_kernel(&rows, n);
        let gram = |ker: &[IVec]| -> Vec<IVec> { ker.iter().map(|a| ker.iter().map(|b| -self.pairing2(a, b) / 2).collect()).collect() };
        if !is_positive_definite(&gram(&ker)) {
            return Err(Error::Lattice("pairing is not negative definite on the zero-charge lattice".into()));
        }
        let mut red = lll(ker, |a, b| -self.pairing2(a, b) / 2);
        for v in red.iter_mut() {
            if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        Ok(red)
    }

    /// Matrix of `<k_i, k_j>` on a kernel basis.
    pub fn gram(&self, kernel: &[Junction]) -> Result<Vec<IVec>> {
        kernel.iter().map(|a| kernel.iter().map(|b| self.pairing(a, b)).collect()).collect()
    }

    /// Every zero-charge junction of self-intersection `-2`, with no bound on
    /// coordinates, by short-vector enumeration in the kernel lattice.
    pub fn lattice_roots(&self, kernel: &[Junction], cap: u64) -> Result<Vec<Junction>> {
        let g: Vec<IVec> = self.gram(kernel)?.into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
        if g.iter().enumerate().any(|(i, r)| r[i] % 2 != 0) {
            return Err(Error::Lattice("zero-charge lattice is odd".into()));
        }
        let xs = vectors_of_norm(&g, 2, cap).ok_or_else(|| Error::Budget("root enumeration in the kernel lattice".into()))?;
        let mut out: Vec<Junction> =
            xs.iter().map(|x| (0..self.len()).map(|i| x.iter().zip(kernel).map(|(c, k)| c * k[i]).sum()).collect()).collect();
        out.sort();
        Ok(out)
    }

    /// Junctions with coordinates in `[-bound, bound]`, given charge and self-intersection.
    pub fn enumerate_box(&self, bound: i64, charge: Cycle, norm: i64, cap: u64) -> Result<Vec<Junction>> {
        let n = self.len();
        if n == 0 {
            return Ok(if charge == [0, 0] && norm == 0 { vec![vec![]] } else { vec![] });
        }
        // Largest charge the remaining coordinates can still contribute.
        let mut reach = vec![[0i64; 2]; n + 1];
        for k in (0..n).rev() {
            let c = self.cycles[k];
            reach[k] = [reach[k + 1][0] + bound * c[0].abs(), reach[k + 1][1] + bound * c[1].abs()];
        }
        let mut out = Vec::new();
        let mut j = vec![0i64; n];
        let mut visited = 0u64;
        let mut st = BoxSearch { basis: self, bound, target: charge, norm, reach: &reach, out: &mut out, visited: &mut visited, cap };
        if !st.rec(0, &mut j, [0, 0], [0, 0], 0) {
            return Err(Error::Budget(format!("box enumeration with bound {bound} over {n} prongs")));
        }
        out.sort();
        Ok(out)
    }

    /// Roots with all `|J_i| <= 1`.
    pub fn enumerate_roots(&self) -> Result<Vec<Junction>> {
        if self.len() > 16 {
            return Err(Error::Budget("box enumeration is limited to 16 prongs".into()));
        }
        self.enumerate_box(1, [0, 0], -2, u64::MAX)
    }

    /// Junctions of given charge and self-intersection inside the box.
    pub fn enumerate_weights(&self, charge: Cycle, norm: i64, bound: i64, cap: u64) -> Result<Vec<Junction>> {
        self.enumerate_box(bound, charge, norm, cap)
    }
}

struct BoxSearch<'a> {
    basis: &'a JunctionBasis,
    bound: i64,
    target: Cycle,
    norm: i64,
    reach: &'a [[i64; 2]],
    out: &'a mut Vec<Junction>,
    visited: &'a mut u64,
    cap: u64,
}

impl BoxSearch<'_> {
    fn rec(&mut self, k: usize, j: &mut Vec<i64>, charge: Cycle, w: Cycle, q: i64) -> bool {
        *self.visited += 1;
        if *self.visited > self.cap {
            return false;
        }
        let gap = [self.target[0] - charge[0], self.target[1] - charge[1]];
        if gap[0].abs() > self.reach[k][0] || gap[1].abs() > self.reach[k][1] {
            return true;
        }
        if k == j.len() {
            if q == self.norm {
                self.out.push(j.clone());
            }
            return true;
        }
        let c = self.basis.cycles[k];
        for x in -self.bound..=self.bound {
            j[k] = x;
            let (dq, w2) = if k >= 1 { (-x * skew(c, w) - x * x, [w[0] + x * c[0], w[1] + x * c[1]]) } else { (-x * x, w) };
            if !self.rec(k + 1, j, [charge[0] + x * c[0], charge[1] + x * c[1]], w2, q + dq) {
                return false;
            }
        }
        j[k] = 0;
        true
    }
}

/// Root system data recovered from a set of `-2` junctions.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraId {
    pub label: String,
    pub rank: usize,
    /// Simple roots in Bourbaki order, component by component.
    pub simple_roots: Vec<Junction>,
    pub cartan: Vec<IVec>,
    pub positive_count: usize,
    #[serde(skip)]
    pub components: Vec<Component>,
}

/// Positivity functional `l(J) = sum J_i M^i`, injective on the root box.
fn functional(roots: &[Junction]) -> impl Fn(&[i64]) -> i128 {
    let b = roots.iter().flatten().map(|x| x.abs()).max().unwrap_or(1) as i128;
    let m = 2 * b + 1;
    move |j: &[i64]| j.iter().rev().fold(0i128, |acc, &x| acc * m + x as i128)
}

pub fn identify_algebra(basis: &JunctionBasis, roots: &[Junction]) -> Result<AlgebraId> {
    let ell = functional(roots);
    let set: HashSet<&Junction> = roots.iter().collect();
    for r in roots {
        let neg: Junction = r.iter().map(|x| -x).collect();
        if !set.contains(&neg) || basis.charge(r) != [0, 0] || basis.self_pairing(r) != -2 {
            return Err(Error::Classification("input is not a root system".into()));
        }
    }
    let pos: Vec<&Junction> = roots.iter().filter(|r| ell(r) > 0).collect();
    let pos_set: HashSet<&Junction> = pos.iter().copied().collect();
    let simple: Vec<Junction> = pos
        .iter()
        .filter(|a| {
            !pos.iter().any(|b| {
                let d: Junction = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
                pos_set.contains(&d)
            })
        })
        .map(|a| (*a).clone())
        .collect();
    let cartan =
        |s: &[Junction]| -> Result<Vec<IVec>> { s.iter().map(|a| s.iter().map(|b| basis.pairing(a, b).map(|p| -p)).collect()).collect() };
    let c = cartan(&simple)?;
    let comps = dynkin::classify(&c, None)?;
    let order: Vec<usize> = comps.iter().flat_map(|k| k.order.iter().copied()).collect();
    let simple: Vec<Junction> = order.iter().map(|&i| simple[i].clone()).collect();
    let expected: usize = comps.iter().map(Component::root_count).sum();
    if expected != roots.len() {
        return Err(Error::Classification(format!(
            "{} roots do not fill a root system of type {} ({} expected)",
            roots.len(),
            dynkin::label(&comps),
            expected
        )));
    }
    let cartan = cartan(&simple)?;
    let mut offset = 0;
    let components = comps
        .iter()
        .map(|k| {
            let c = Component { series: k.series, rank: k.rank, order: (offset..offset + k.rank).collect() };
            offset += k.rank;
            c
        })
        .collect();
    Ok(AlgebraId { label: dynkin::label(&comps), rank: simple.len(), simple_roots: simple, cartan, positive_count: pos.len(), components })
}

/// Number of unordered subsets of `roots` whose pairings form a Cartan
/// matrix of the identified type.
pub fn count_simple_systems(basis: &JunctionBasis, roots: &[Junction], algebra: &AlgebraId, cap: u64) -> Result<u64> {
    Ok(simple_systems(basis, roots, algebra, cap, |_| false)?.0)
}

/// Walks all simple systems; `stop` may end the search early by returning true.
/// Returns the count so far and the system that triggered the stop.
pub fn simple_systems(
    basis: &JunctionBasis,
    roots: &[Junction],
    algebra: &AlgebraId,
    cap: u64,
    mut stop: impl FnMut(&[usize]) -> bool,
) -> Result<(u64, Option<Vec<usize>>)> {
    let r = algebra.rank;
    if r == 0 {
        return Ok((1, Some(vec![])));
    }
    let n = roots.len();
    let p: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| basis.pairing2(&roots[i], &roots[j]) / 2).collect()).collect();
    let target = algebra.label.clone();
    let mut chosen = Vec::with_capacity(r);
    let mut count = 0u64;
    let mut visited = 0u64;
    let mut found = None;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        start: usize,
        chosen: &mut Vec<usize>,
        p: &[Vec<i64>],
        r: usize,
        target: &str,
        count: &mut u64,
        visited: &mut u64,
        cap: u64,
        stop: &mut dyn FnMut(&[usize]) -> bool,
        found: &mut Option<Vec<usize>>,
    ) -> Result<bool> {
        *visited += 1;
        if *visited > cap {
            return Err(Error::Budget("simple system search".into()));
        }
        if chosen.len() == r {
            let c: Vec<IVec> = chosen.iter().map(|&a| chosen.iter().map(|&b| -p[a][b]).collect()).collect();
            if dynkin::classify(&c, None).is_ok_and(|k| dynkin::label(&k) == target) {
                *count += 1;
                if stop(chosen) {
                    *found = Some(chosen.clone());
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        for i in start..p.len() {
            // Distinct simple roots pair to 0 or 1, and the diagram stays a forest.
            if chosen.iter().any(|&a| p[a][i] != 0 && p[a][i] != 1) {
                continue;
            }
            let links = chosen.iter().filter(|&&a| p[a][i] == 1).count();
            if links > 3 {
                continue;
            }
            chosen.push(i);
            let ok = forest(chosen, p);
            let go = if ok { rec(i + 1, chosen, p, r, target, count, visited, cap, stop, found)? } else { true };
            chosen.pop();
            if !go {
                return Ok(false);
            }
        }
        Ok(true)
    }
    rec(0, &mut chosen, &p, r, &target, &mut count, &mut visited, cap, &mut stop, &mut found)?;
    Ok((count, found))
}

fn forest(chosen: &[usize], p: &[Vec<i64>]) -> bool {
    let k = chosen.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for a in 0..k {
        for b in a + 1..k {
            if p[chosen[a]][chosen[b]] != 0 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    return false;
                }
                parent[ra] = rb;
            }
        }
    }
    true
}
