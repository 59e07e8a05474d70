//! Dynkin diagram recognition for (possibly non-simply-laced) Cartan matrices.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub series: char,
    pub rank: usize,
    /// Indices into the input, in Bourbaki order.
    pub order: Vec<usize>,
}

impl Component {
    pub fn label(&self) -> String {
        format!("{}{}", self.series, self.rank)
    }

    /// Number of roots of this simple factor.
    pub fn root_count(&self) -> usize {
        let n = self.rank;
        match (self.series, n) {
            ('A', _) => n * (n + 1),
            ('B', _) | ('C', _) => 2 * n * n,
            ('D', _) => 2 * n * (n - 1),
            ('E', 6) => 72,
            ('E', 7) => 126,
            ('E', 8) => 240,
            ('F', 4) => 48,
            ('G', 2) => 12,
            _ => 0,
        }
    }
}

/// Components sorted by series then descending rank; `"trivial"` when empty.
pub fn label(components: &[Component]) -> String {
    if components.is_empty() {
        return "trivial".into();
    }
    components.iter().map(Component::label).collect::<Vec<_>>().join("+")
}

/// Recognise the diagram of `cartan`. `norms` gives squared root lengths and is
/// only consulted to tell `B` from `C`; without it a double bond at the end
/// of a chain reads as `B`.
pub fn classify(cartan: &[Vec<i64>], norms: Option<&[f64]>) -> Result<Vec<Component>> {
    let n = cartan.len();
    let bad = |msg: &str| Error::Classification(format!("not a Dynkin diagram: {msg}"));
    for i in 0..n {
        if cartan[i][i] != 2 {
            return Err(bad("diagonal entry differs from 2"));
        }
        for j in 0..n {
            if i != j && (cartan[i][j] > 0 || (cartan[i][j] == 0) != (cartan[j][i] == 0)) {
                return Err(bad("off-diagonal entries are inconsistent"));
            }
        }
    }
    let mult = |i: usize, j: usize| (cartan[i][j] * cartan[j][i]) as usize;
    let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| j != i && cartan[i][j] != 0).collect()).collect();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut nodes = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < nodes.len() {
            for &j in &adj[nodes[k]] {
                if !seen[j] {
                    seen[j] = true;
                    nodes.push(j);
                }
            }
            k += 1;
        }
        nodes.sort_unstable();
        let edges: usize = nodes.iter().map(|&i| adj[i].len()).sum::<usize>() / 2;
        if edges + 1 != nodes.len() {
            return Err(bad("diagram contains a cycle"));
        }
        comps.push(component(&nodes, &adj, &mult, norms).ok_or_else(|| bad("unrecognised tree"))?);
    }
    comps.sort_by(|a, b| a.series.cmp(&b.series).then(b.rank.cmp(&a.rank)).then(a.order.cmp(&b.order)));
    Ok(comps)
}

fn walk(from: usize, prev: Option<usize>, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut out = vec![from];
    let (mut cur, mut prev) = (from, prev);
    loop {
        let next: Vec<usize> = adj[cur].iter().copied().filter(|&j| Some(j) != prev).collect();
        if next.len() != 1 {
            return out;
        }
        prev = Some(cur);
        cur = next[0];
        out.push(cur);
    }
}

fn component(nodes: &[usize], adj: &[Vec<usize>], mult: &dyn Fn(usize, usize) -> usize, norms: Option<&[f64]>) -> Option<Component> {
    let r = nodes.len();
    if r == 1 {
        return Some(Component { series: 'A', rank: 1, order: nodes.to_vec() });
    }
    let branch: Vec<usize> = nodes.iter().copied().filter(|&i| adj[i].len() >= 3).collect();
    let multi: Vec<(usize, usize)> =
        nodes.iter().flat_map(|&i| adj[i].iter().map(move |&j| (i, j))).filter(|&(i, j)| i < j && mult(i, j) > 1).collect();
    if branch.is_empty() {
        let ends: Vec<usize> = nodes.iter().copied().filter(|&i| adj[i].len() == 1).collect();
        let chain = walk(ends[0], None, adj);
        match multi.as_slice() {
            [] => Some(Component { series: 'A', rank: r, order: chain }),
            [(i, j)] => {
                let m = mult(*i, *j);
                let pos = |x: usize| chain.iter().position(|&c| c == x).unwrap_or(0);
                let (lo, hi) = (pos(*i).min(pos(*j)), pos(*i).max(pos(*j)));
                if m == 3 && r == 2 {
                    let long_first = norms.is_none_or(|w| w[chain[0]] >= w[chain[1]]);
                    let order = if long_first { vec![chain[1], chain[0]] } else { chain };
                    return Some(Component { series: 'G', rank: 2, order });
                }
                if m != 2 {
                    return None;
                }
                if r == 4 && lo == 1 && hi == 2 {
                    // F4: long roots first.
                    let order = match norms {
                        Some(w) if w[chain[0]] < w[chain[3]] => chain.into_iter().rev().collect(),
                        _ => chain,
                    };
                    return Some(Component { series: 'F', rank: 4, order });
                }
                // Double bond must sit at an end; orient the chain so it is last.
                let order: Vec<usize> = if lo == 0 {
                    chain.into_iter().rev().collect()
                } else if hi == r - 1 {
                    chain
                } else {
                    return None;
                };
                let end = order[r - 1];
                let before = order[r - 2];
                let series = match norms {
                    Some(w) if w[end] > w[before] => 'C',
                    _ => 'B',
                };
                let series = if r == 2 { 'B' } else { series };
                Some(Component { series, rank: r, order })
            }
            _ => None,
        }
    } else {
        if branch.len() != 1 || !multi.is_empty() || adj[branch[0]].len() != 3 {
            return None;
        }
        let b = branch[0];
        let mut arms: Vec<Vec<usize>> = adj[b].iter().map(|&j| walk(j, Some(b), adj)).collect();
        arms.sort_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)));
        let lens: Vec<usize> = arms.iter().map(Vec::len).collect();
        // Arms run outward from the branch node.
        let inward = |a: &Vec<usize>| a.iter().rev().copied().collect::<Vec<_>>();
        match lens.as_slice() {
            [1, 1, _] => {
                let mut order = inward(&arms[2]);
                order.push(b);
                order.push(arms[0][0]);
                order.push(arms[1][0]);
                Some(Component { series: 'D', rank: r, order })
            }
            [1, 2, 2..=4] => {
                // Bourbaki: 1 - 3 - 4 - 5 - 6 (- 7 - 8) with 2 attached to 4.
                let mut order = vec![arms[1][1], arms[0][0], arms[1][0], b];
                order.extend(arms[2].iter().copied());
                Some(Component { series: 'E', rank: r, order })
            }
            _ => None,
        }
    }
}
