#![allow(dead_code)]

use std::collections::BTreeSet;

use fspec_miner::fspec::FSpec;
use fspec_miner::graam::Graam;

/// Edit cost of mapping `a` onto `b` (`None` = delete), start and end fixed.
pub fn mapping_cost(a: &Graam, b: &Graam, map: &[Option<usize>]) -> u32 {
    let sa = a.sigs();
    let sb = b.sigs();
    let eb: BTreeSet<(usize, usize)> = b.edges.iter().copied().collect();
    let mut cost = 0;
    let mut hit = BTreeSet::new();
    for (x, m) in map.iter().enumerate() {
        match m {
            Some(w) => cost += u32::from(sa[x] != sb[*w]),
            None => cost += 1,
        }
    }
    let used: BTreeSet<usize> = map.iter().flatten().copied().collect();
    cost += (b.nodes.len() - used.len()) as u32;
    for &(x, y) in &a.edges {
        match (map[x], map[y]) {
            (Some(p), Some(q)) if eb.contains(&(p, q)) => {
                hit.insert((p, q));
            }
            _ => cost += 1,
        }
    }
    cost + (eb.len() - hit.len()) as u32
}

/// Minimum over every injective partial mapping of API nodes.
pub fn brute_force_ged(a: &Graam, b: &Graam) -> u32 {
    fn go(a: &Graam, b: &Graam, i: usize, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>, best: &mut u32) {
        if i == a.nodes.len() {
            *best = (*best).min(mapping_cost(a, b, map));
            return;
        }
        map.push(None);
        go(a, b, i + 1, map, used, best);
        map.pop();
        for w in 2..b.nodes.len() {
            if !used[w] {
                used[w] = true;
                map.push(Some(w));
                go(a, b, i + 1, map, used, best);
                map.pop();
                used[w] = false;
            }
        }
    }
    let mut best = u32::MAX;
    let mut used = vec![false; b.nodes.len()];
    go(a, b, 2, &mut vec![Some(0), Some(1)], &mut used, &mut best);
    best
}

/// Tries every permutation of API nodes.
pub fn brute_force_isomorphic(a: &Graam, b: &Graam) -> bool {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let eb: BTreeSet<(usize, usize)> = b.edges.iter().copied().collect();
    let (sa, sb) = (a.sigs(), b.sigs());
    fn go(
        a: &Graam,
        eb: &BTreeSet<(usize, usize)>,
        sa: &[String],
        sb: &[String],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let i = perm.len();
        if i == sa.len() {
            return a.edges.iter().all(|&(x, y)| eb.contains(&(perm[x], perm[y])));
        }
        for w in 2..sb.len() {
            if !used[w] && sa[i] == sb[w] {
                used[w] = true;
                perm.push(w);
                if go(a, eb, sa, sb, perm, used) {
                    return true;
                }
                perm.pop();
                used[w] = false;
            }
        }
        false
    }
    let mut used = vec![false; b.nodes.len()];
    go(a, &eb, &sa, &sb, &mut vec![0, 1], &mut used)
}

/// Start-to-end label sequences.
pub fn graam_paths(g: &Graam) -> BTreeSet<Vec<String>> {
    let sigs = g.sigs();
    let mut out = BTreeSet::new();
    fn go(g: &Graam, sigs: &[String], v: usize, path: &mut Vec<String>, out: &mut BTreeSet<Vec<String>>) {
        if v == 1 {
            out.insert(path.clone());
            return;
        }
        for w in g.succs(v) {
            if w >= 2 {
                path.push(sigs[w].clone());
            }
            go(g, sigs, w, path, out);
            if w >= 2 {
                path.pop();
            }
        }
    }
    go(g, &sigs, 0, &mut Vec::new(), &mut out);
    out
}

pub fn fspec_paths(f: &FSpec) -> BTreeSet<Vec<String>> {
    f.paths()
        .into_iter()
        .map(|p| p[1..p.len() - 1].iter().map(|&v| f.nodes[v].sig()).collect())
        .collect()
}
