//! Small-DAG helpers over `n` nodes and an edge list.

use std::collections::BTreeSet;

pub fn successors(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n];
    for &(a, b) in edges {
        out[a].push(b);
    }
    for s in &mut out {
        s.sort_unstable();
        s.dedup();
    }
    out
}

/// Kahn's algorithm, smallest ready node first; `None` on a cycle.
pub fn topo_order(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let succ = successors(n, edges);
    let mut indeg = vec![0usize; n];
    for s in &succ {
        for &b in s {
            indeg[b] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &b in &succ[v] {
            indeg[b] -= 1;
            if indeg[b] == 0 {
                ready.insert(b);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Strict descendants of every node. The graph must be acyclic.
pub fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
    let succ = successors(n, edges);
    let order = topo_order(n, edges).expect("acyclic graph");
    let mut reach = vec![BTreeSet::new(); n];
    for &v in order.iter().rev() {
        let mut r = BTreeSet::new();
        for &b in &succ[v] {
            r.insert(b);
            r.extend(reach[b].iter().copied());
        }
        reach[v] = r;
    }
    reach
}

/// The unique minimal edge set with the same reachability.
pub fn transitive_reduction(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let succ = successors(n, edges);
    let reach = reachability(n, edges);
    let mut out = Vec::new();
    for u in 0..n {
        for &v in &succ[u] {
            if !succ[u].iter().any(|&w| w != v && reach[w].contains(&v)) {
                out.push((u, v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_drops_shortcut() {
        assert_eq!(transitive_reduction(3, &[(0, 1), (1, 2), (0, 2)]), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn cycle_has_no_order() {
        assert!(topo_order(2, &[(0, 1), (1, 0)]).is_none());
    }
}
