//! Graph edit distance under unit costs: inserting or deleting a node or an
//! edge costs 1, relabelling a node costs 1. The start and end nodes are
//! anchors: they always map to each other.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::graam::Graam;

pub const DEFAULT_SIZE_CAP: usize = 20;
const EXPANSION_BUDGET: usize = 400_000;
/// Start and end.
const ANCHORS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GedResult {
    pub distance: u32,
    /// False when the size cap or search budget forced the greedy bound.
    pub exact: bool,
    /// Image of every node of the first graph; `None` means deleted.
    pub mapping: Vec<Option<usize>>,
}

struct Side {
    sigs: Vec<String>,
    adj: Vec<Vec<bool>>,
    edges: usize,
}

impl Side {
    fn of(g: &Graam) -> Side {
        let n = g.nodes.len();
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in &g.edges {
            adj[a][b] = true;
        }
        Side { sigs: g.sigs(), adj, edges: g.edges.len() }
    }

    fn n(&self) -> usize {
        self.sigs.len()
    }
}

/// Cost of the edit script induced by a node mapping.
pub fn edit_cost(a: &Graam, b: &Graam, mapping: &[Option<usize>]) -> u32 {
    let (sa, sb) = (Side::of(a), Side::of(b));
    let mut cost = 0;
    let mut used = vec![false; sb.n()];
    for (i, m) in mapping.iter().enumerate() {
        match m {
            Some(w) => {
                used[*w] = true;
                cost += u32::from(sa.sigs[i] != sb.sigs[*w]);
            }
            None => cost += 1,
        }
    }
    cost += used.iter().filter(|u| !**u).count() as u32;
    let mut matched_b_edges = 0;
    for &(x, y) in &a.edges {
        match (mapping[x], mapping[y]) {
            (Some(p), Some(q)) if sb.adj[p][q] => matched_b_edges += 1,
            _ => cost += 1,
        }
    }
    cost + (sb.edges - matched_b_edges) as u32
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Entry {
    f: Reverse<u32>,
    depth: usize,
    id: usize,
}

struct Search<'a> {
    a: &'a Side,
    b: &'a Side,
    /// Whether a node may map to one with a different label.
    relabel: bool,
}

impl Search<'_> {
    /// Cost added by mapping node `i` of `a` to `t`, given `map[..i]`.
    fn step(&self, map: &[Option<usize>], i: usize, t: Option<usize>) -> u32 {
        let mut c = match t {
            Some(w) => u32::from(self.a.sigs[i] != self.b.sigs[w]),
            None => 1,
        };
        for (j, mj) in map.iter().enumerate().take(i) {
            for (x, y, mx, my) in [(i, j, t, *mj), (j, i, *mj, t)] {
                let in_a = self.a.adj[x][y];
                match (mx, my) {
                    (Some(p), Some(q)) => c += u32::from(in_a != self.b.adj[p][q]),
                    _ => c += u32::from(in_a),
                }
            }
        }
        c
    }

    /// Insertions of unused `b` nodes and of the `b` edges touching them.
    fn finish(&self, used: &[bool]) -> u32 {
        let mut c = used.iter().filter(|u| !**u).count() as u32;
        for p in 0..self.b.n() {
            for q in 0..self.b.n() {
                if self.b.adj[p][q] && (!used[p] || !used[q]) {
                    c += 1;
                }
            }
        }
        c
    }

    fn heuristic(&self, depth: usize, used: &[bool]) -> u32 {
        let mut rest: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for i in depth..self.a.n() {
            rest.entry(&self.a.sigs[i]).or_default().0 += 1;
        }
        let mut free_b = 0;
        for (w, u) in used.iter().enumerate() {
            if !*u {
                free_b += 1;
                rest.entry(&self.b.sigs[w]).or_default().1 += 1;
            }
        }
        let common: usize = rest.values().map(|(x, y)| (*x).min(*y)).sum();
        let nodes = (self.a.n() - depth).max(free_b) - common;
        let mut ea = 0usize;
        for x in 0..self.a.n() {
            for y in 0..self.a.n() {
                if self.a.adj[x][y] && (x >= depth || y >= depth) {
                    ea += 1;
                }
            }
        }
        let mut eb = 0usize;
        for p in 0..self.b.n() {
            for q in 0..self.b.n() {
                if self.b.adj[p][q] && (!used[p] || !used[q]) {
                    eb += 1;
                }
            }
        }
        (nodes + ea.abs_diff(eb)) as u32
    }

    fn astar(&self) -> Option<(u32, Vec<Option<usize>>)> {
        let na = self.a.n();
        let nb = self.b.n();
        // arena of partial assignments: (parent, target, g, depth, used)
        let mut arena: Vec<(usize, Option<usize>, u32, usize)> = vec![(usize::MAX, None, 0, 0)];
        let mut heap = BinaryHeap::new();
        heap.push(Entry { f: Reverse(self.heuristic(0, &vec![false; nb])), depth: 0, id: 0 });
        let mut expansions = 0;
        while let Some(Entry { f, id, .. }) = heap.pop() {
            let (_, _, g, depth) = arena[id];
            let map = unwind(&arena, id);
            let mut used = vec![false; nb];
            for w in map.iter().flatten() {
                used[*w] = true;
            }
            if depth == na {
                if g == f.0 {
                    return Some((g, map));
                }
                continue;
            }
            expansions += 1;
            if expansions > EXPANSION_BUDGET {
                return None;
            }
            let options = self.targets(depth, &used);
            for t in options {
                let mut next_map = map.clone();
                next_map.push(t);
                let cost = g + self.step(&next_map, depth, t);
                let mut next_used = used.clone();
                if let Some(w) = t {
                    next_used[w] = true;
                }
                let (gg, h) = if depth + 1 == na {
                    (cost + self.finish(&next_used), 0)
                } else {
                    (cost, self.heuristic(depth + 1, &next_used))
                };
                arena.push((id, t, gg, depth + 1));
                heap.push(Entry { f: Reverse(gg + h), depth: depth + 1, id: arena.len() - 1 });
            }
        }
        None
    }

    /// Candidate images of node `i` of the first graph.
    fn targets(&self, i: usize, used: &[bool]) -> Vec<Option<usize>> {
        if i < ANCHORS {
            return vec![Some(i)];
        }
        let mut out: Vec<Option<usize>> = (ANCHORS..used.len())
            .filter(|&w| !used[w] && (self.relabel || self.a.sigs[i] == self.b.sigs[w]))
            .map(Some)
            .collect();
        out.push(None);
        out
    }

    fn greedy(&self) -> Vec<Option<usize>> {
        let nb = self.b.n();
        let mut map: Vec<Option<usize>> = Vec::new();
        let mut used = vec![false; nb];
        for i in 0..self.a.n() {
            let mut best: (u32, Option<usize>) = (u32::MAX, None);
            for t in self.targets(i, &used) {
                let c = self.step(&map, i, t);
                if c < best.0 {
                    best = (c, t);
                }
            }
            if let Some(w) = best.1 {
                used[w] = true;
            }
            map.push(best.1);
        }
        map
    }
}


fn unwind(arena: &[(usize, Option<usize>, u32, usize)], mut id: usize) -> Vec<Option<usize>> {
    let mut out = Vec::with_capacity(arena[id].3);
    while arena[id].0 != usize::MAX {
        out.push(arena[id].1);
        id = arena[id].0;
    }
    out.reverse();
    out
}

pub fn ged(a: &Graam, b: &Graam) -> GedResult {
    ged_with_cap(a, b, DEFAULT_SIZE_CAP)
}

/// Exact best-first search when both graphs have at most `cap` nodes;
/// otherwise, or when the search budget runs out, a greedy upper bound.
pub fn ged_with_cap(a: &Graam, b: &Graam, cap: usize) -> GedResult {
    search(a, b, cap, true)
}

/// Cheapest edit script that never relabels: nodes only map to nodes with
/// the same label. Its cost bounds the edit distance from above.
pub fn align(a: &Graam, b: &Graam) -> GedResult {
    search(a, b, DEFAULT_SIZE_CAP, false)
}

fn search(a: &Graam, b: &Graam, cap: usize, relabel: bool) -> GedResult {
    let (sa, sb) = (Side::of(a), Side::of(b));
    let s = Search { a: &sa, b: &sb, relabel };
    if a.nodes.len() <= cap && b.nodes.len() <= cap {
        if let Some((distance, mapping)) = s.astar() {
            return GedResult { distance, exact: true, mapping };
        }
    }
    let mapping = s.greedy();
    GedResult { distance: edit_cost(a, b, &mapping), exact: false, mapping }
}
