//! Integer lattice helpers: kernels by unimodular column reduction, LLL,
//! exact definiteness tests and short-vector enumeration.

pub type IVec = Vec<i64>;

/// Basis of `{x in Z^n : A x = 0}` for an integer matrix with rows `a`.
pub fn integer_kernel(a: &[IVec], n: usize) -> Vec<IVec> {
    let mut m: Vec<IVec> = a.to_vec();
    // Columns of `u` track the unimodular column operations.
    let mut u: Vec<IVec> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let col_op = |m: &mut Vec<IVec>, u: &mut Vec<IVec>, dst: usize, src: usize, k: i64| {
        for row in m.iter_mut() {
            row[dst] -= k * row[src];
        }
        for row in u.iter_mut() {
            row[dst] -= k * row[src];
        }
    };
    let swap = |m: &mut Vec<IVec>, u: &mut Vec<IVec>, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
        for row in u.iter_mut() {
            row.swap(i, j);
        }
    };
    let mut pivot = 0;
    for r in 0..m.len() {
        if pivot >= n {
            break;
        }
        loop {
            let best = (pivot..n).filter(|&c| m[r][c] != 0).min_by_key(|&c| m[r][c].abs());
            let Some(b) = best else { break };
            swap(&mut m, &mut u, pivot, b);
            let mut clean = true;
            for c in pivot + 1..n {
                if m[r][c] != 0 {
                    let k = m[r][c].div_euclid(m[r][pivot]);
                    col_op(&mut m, &mut u, c, pivot, k);
                    if m[r][c] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                pivot += 1;
                break;
            }
        }
    }
    (pivot..n).map(|c| (0..n).map(|i| u[i][c]).collect()).collect()
}

/// LLL reduction (delta = 0.99) of `basis` for the positive definite form `ip`.
pub fn lll(mut basis: Vec<IVec>, ip: impl Fn(&[i64], &[i64]) -> i64) -> Vec<IVec> {
    let n = basis.len();
    if n < 2 {
        return basis;
    }
    let gso = |b: &[IVec]| {
        let mut mu = vec![vec![0.0f64; n]; n];
        let mut norms = vec![0.0f64; n];
        // Work through the Gram matrix so only `ip` is needed.
        let g: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| ip(&b[i], &b[j]) as f64).collect()).collect();
        for i in 0..n {
            for j in 0..i {
                let mut s = g[i][j];
                for k in 0..j {
                    s -= mu[j][k] * mu[i][k] * norms[k];
                }
                mu[i][j] = s / norms[j];
            }
            let mut s = g[i][i];
            for k in 0..i {
                s -= mu[i][k] * mu[i][k] * norms[k];
            }
            norms[i] = s;
        }
        (mu, norms)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        let (mu, _) = gso(&basis);
        for j in (0..k).rev() {
            let q = mu[k][j].round() as i64;
            if q != 0 {
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(bj) {
                    *x -= q * y;
                }
            }
        }
        let (mu, norms) = gso(&basis);
        if norms[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    basis
}

/// Determinant by fraction-free elimination.
pub fn det(m: &[IVec]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Every leading principal minor positive.
pub fn is_positive_definite(g: &[IVec]) -> bool {
    (1..=g.len()).all(|k| {
        let sub: Vec<IVec> = g[..k].iter().map(|r| r[..k].to_vec()).collect();
        det(&sub) > 0
    })
}

/// All `x` with `x^T G x == target` for positive definite integer `G`.
/// Returns `None` once more than `cap` candidates have been visited.
pub fn vectors_of_norm(g: &[IVec], target: i64, cap: u64) -> Option<Vec<IVec>> {
    let n = g.len();
    if n == 0 {
        return Some(vec![]);
    }
    // q[i][i] = Cholesky pivots, q[i][j] (j > i) = coefficients in the completed square.
    let mut q = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i..n {
            q[i][j] = g[i][j] as f64;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let bound = target as f64 + 1e-6;
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut visited = 0u64;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        rem: f64,
        q: &[Vec<f64>],
        g: &[IVec],
        x: &mut Vec<i64>,
        target: i64,
        out: &mut Vec<IVec>,
        visited: &mut u64,
        cap: u64,
    ) -> bool {
        *visited += 1;
        if *visited > cap {
            return false;
        }
        let n = q.len();
        let c: f64 = -(i + 1..n).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
        let r = (rem.max(0.0) / q[i][i]).sqrt();
        let lo = (c - r - 1e-9).ceil() as i64;
        let hi = (c + r + 1e-9).floor() as i64;
        for v in lo..=hi {
            x[i] = v;
            let d = v as f64 - c;
            let rem2 = rem - q[i][i] * d * d;
            if rem2 < -1e-6 {
                continue;
            }
            if i == 0 {
                let val: i64 = (0..n).map(|a| (0..n).map(|b| x[a] * g[a][b] * x[b]).sum::<i64>()).sum();
                if val == target {
                    out.push(x.clone());
                }
            } else if !rec(i - 1, rem2, q, g, x, target, out, visited, cap) {
                return false;
            }
        }
        x[i] = 0;
        true
    }
    if !rec(n - 1, bound, &q, g, &mut x, target, &mut out, &mut visited, cap) {
        return None;
    }
    Some(out)
}
