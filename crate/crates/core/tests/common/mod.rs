//! Graph enumeration and brute-force obstruction oracle shared by the
//! census tests.

use std::collections::HashSet;

use corrscen::scenario::ObstructionKind;

/// Lexicographically smallest edge code over relabelings that sort vertices
/// by degree.
pub fn canonical(adj: &[u64]) -> u64 {
    let n = adj.len();
    let deg: Vec<u32> = adj.iter().map(|m| m.count_ones()).collect();
    let mut target: Vec<u32> = deg.clone();
    target.sort_unstable_by(|a, b| b.cmp(a));
    let mut best = u64::MAX;
    let mut order = Vec::with_capacity(n);
    fn rec(
        adj: &[u64],
        deg: &[u32],
        target: &[u32],
        order: &mut Vec<usize>,
        used: u64,
        best: &mut u64,
    ) {
        let n = adj.len();
        if order.len() == n {
            let mut code = 0u64;
            let mut bit = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if adj[order[i]] >> order[j] & 1 == 1 {
                        code |= 1 << bit;
                    }
                    bit += 1;
                }
            }
            *best = (*best).min(code);
            return;
        }
        for v in 0..n {
            if used >> v & 1 == 0 && deg[v] == target[order.len()] {
                order.push(v);
                rec(adj, deg, target, order, used | 1 << v, best);
                order.pop();
            }
        }
    }
    rec(adj, &deg, &target, &mut order, 0, &mut best);
    best
}

pub fn connected(adj: &[u64]) -> bool {
    let n = adj.len();
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & !seen;
        seen |= new;
        frontier |= new;
    }
    seen.count_ones() as usize == n
}

/// Brute force over all 3- and 4-vertex subsets.
pub fn oracle_obstructions(adj: &[u64]) -> Vec<(ObstructionKind, Vec<usize>)> {
    let n = adj.len();
    let e = |u: usize, v: usize| adj[u] >> v & 1 == 1;
    let mut out = Vec::new();
    for mask in 0u64..1 << n {
        let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let edges: usize = (0..vs.len())
            .flat_map(|i| (i + 1..vs.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| e(vs[i], vs[j]))
            .count();
        let mut deg: Vec<usize> = vs
            .iter()
            .map(|&u| vs.iter().filter(|&&w| w != u && e(u, w)).count())
            .collect();
        deg.sort_unstable();
        match (vs.len(), edges, deg.as_slice()) {
            (3, 3, _) => out.push((ObstructionKind::C3, vs)),
            (4, 4, [2, 2, 2, 2]) => out.push((ObstructionKind::C4, vs)),
            (4, 3, [1, 1, 2, 2]) => out.push((ObstructionKind::P4, vs)),
            _ => {}
        }
    }
    out
}

pub fn is_star(adj: &[u64]) -> bool {
    let n = adj.len();
    let edges: u32 = adj.iter().map(|m| m.count_ones()).sum::<u32>() / 2;
    n <= 2 || (edges as usize == n - 1 && adj.iter().any(|m| m.count_ones() as usize == n - 1))
}

/// Non-isomorphic graphs on `0..=max_n` vertices, by vertex count, as
/// adjacency masks.
pub fn graphs_up_to(max_n: usize) -> Vec<Vec<Vec<u64>>> {
    let mut out = vec![vec![vec![]], vec![vec![0]]];
    for n in 2..=max_n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &out[n - 1] {
            for nb in 0u64..1 << (n - 1) {
                let mut adj: Vec<u64> = g.clone();
                for (v, a) in adj.iter_mut().enumerate() {
                    if nb >> v & 1 == 1 {
                        *a |= 1 << (n - 1);
                    }
                }
                adj.push(nb);
                if seen.insert(canonical(&adj)) {
                    next.push(adj);
                }
            }
        }
        out.push(next);
    }
    out
}
