//! Graph-based API usage models: order-constraint DAGs anchored at a start
//! and an end node, stored in canonical node order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::graph;
use crate::ifd::{same_lineage, IfdModel};
use crate::slicer::{ApiKind, ApiLabel, Paug, PaugEdgeKind};

pub const START: usize = 0;
pub const END: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum GNode {
    Start,
    End,
    Api { label: ApiLabel },
}

impl GNode {
    /// Matching key; start and end sort before every API label.
    pub fn sig(&self) -> String {
        match self {
            GNode::Start => "#0start".to_string(),
            GNode::End => "#1end".to_string(),
            GNode::Api { label } => label.sig(),
        }
    }

    pub fn label(&self) -> Option<&ApiLabel> {
        match self {
            GNode::Api { label } => Some(label),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graam {
    pub framework: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Node 0 is the start, node 1 the end, API nodes follow.
    pub nodes: Vec<GNode>,
    pub edges: Vec<(usize, usize)>,
    pub canonical_key: String,
}

impl Graam {
    /// Builds a GRAAM from API labels and order constraints between them
    /// (indices into `labels`). Constraints are transitively reduced, start
    /// and end are attached to sources and sinks, and nodes are put into
    /// canonical order.
    pub fn from_api(framework: &str, labels: Vec<ApiLabel>, constraints: &[(usize, usize)]) -> Result<Graam, Error> {
        let n = labels.len();
        let constraints: Vec<(usize, usize)> = constraints.iter().copied().filter(|(a, b)| a != b).collect();
        if graph::topo_order(n, &constraints).is_none() {
            let (a, _) = constraints[0];
            let on_cycle = graph::successors(n, &constraints)
                .iter()
                .enumerate()
                .find(|(v, _)| graph::topo_order(n, &constraints_without(&constraints, *v)).is_some())
                .map(|(v, _)| v)
                .unwrap_or(a);
            return Err(Error::Cycle(labels[on_cycle].to_string()));
        }
        let reduced = graph::transitive_reduction(n, &constraints);
        let mut nodes = vec![GNode::Start, GNode::End];
        nodes.extend(labels.into_iter().map(|label| GNode::Api { label }));
        let mut edges: Vec<(usize, usize)> = reduced.iter().map(|(a, b)| (a + 2, b + 2)).collect();
        for v in 0..n {
            if !reduced.iter().any(|(_, b)| *b == v) {
                edges.push((START, v + 2));
            }
            if !reduced.iter().any(|(a, _)| *a == v) {
                edges.push((v + 2, END));
            }
        }
        let mut g = Graam { framework: framework.to_string(), source: None, nodes, edges, canonical_key: String::new() };
        g.canonicalize_in_place();
        Ok(g)
    }

    pub fn empty(framework: &str) -> Graam {
        Graam::from_api(framework, Vec::new(), &[]).expect("empty graph is acyclic")
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Graam {
        self.source = Some(source.into());
        self
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn api_count(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn api_nodes(&self) -> std::ops::Range<usize> {
        2..self.nodes.len()
    }

    pub fn label(&self, v: usize) -> Option<&ApiLabel> {
        self.nodes[v].label()
    }

    pub fn sigs(&self) -> Vec<String> {
        self.nodes.iter().map(GNode::sig).collect()
    }

    pub fn preds(&self, v: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.1 == v).map(|e| e.0).collect()
    }

    pub fn succs(&self, v: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.0 == v).map(|e| e.1).collect()
    }

    /// API-to-API constraint edges, as indices into `api_labels()`.
    pub fn api_constraints(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter(|(a, b)| *a >= 2 && *b >= 2)
            .map(|(a, b)| (a - 2, b - 2))
            .collect()
    }

    pub fn api_labels(&self) -> Vec<ApiLabel> {
        self.api_nodes().map(|v| self.label(v).expect("api node").clone()).collect()
    }

    /// Strict descendants of every node.
    pub fn reachability(&self) -> Vec<BTreeSet<usize>> {
        graph::reachability(self.nodes.len(), &self.edges)
    }

    /// API nodes without API successors.
    pub fn sinks(&self) -> Vec<usize> {
        self.api_nodes().filter(|&v| self.succs(v) == [END]).collect()
    }

    /// The sub-GRAAM over `keep` (API node ids): orders between kept nodes
    /// are those implied by the whole graph.
    pub fn sub_graam(&self, keep: &BTreeSet<usize>) -> Graam {
        let reach = self.reachability();
        let kept: Vec<usize> = self.api_nodes().filter(|v| keep.contains(v)).collect();
        let index: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut cons = Vec::new();
        for &a in &kept {
            for &b in &kept {
                if reach[a].contains(&b) {
                    cons.push((index[&a], index[&b]));
                }
            }
        }
        let labels = kept.iter().map(|&v| self.label(v).expect("api").clone()).collect();
        let mut g = Graam::from_api(&self.framework, labels, &cons).expect("restriction of a DAG is a DAG");
        g.source = self.source.clone();
        g
    }

    pub fn without_node(&self, v: usize) -> Graam {
        let keep: BTreeSet<usize> = self.api_nodes().filter(|&u| u != v).collect();
        self.sub_graam(&keep)
    }

    fn canonicalize_in_place(&mut self) {
        let form = canonical_form(self);
        let mut inverse = vec![0; form.order.len()];
        for (pos, &v) in form.order.iter().enumerate() {
            inverse[v] = pos;
        }
        self.nodes = form.order.iter().map(|&v| self.nodes[v].clone()).collect();
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (inverse[a], inverse[b])).collect();
        edges.sort_unstable();
        edges.dedup();
        self.edges = edges;
        self.canonical_key = form.key;
    }
}

fn constraints_without(cons: &[(usize, usize)], v: usize) -> Vec<(usize, usize)> {
    cons.iter().copied().filter(|(a, b)| *a != v && *b != v).collect()
}

/// A canonical node order and the digest of the graph written in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub order: Vec<usize>,
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Encoding {
    sigs: Vec<String>,
    edges: Vec<(usize, usize)>,
}

struct Canon<'a> {
    sigs: Vec<String>,
    ins: Vec<Vec<usize>>,
    outs: Vec<Vec<usize>>,
    edges: &'a [(usize, usize)],
    best: Option<(Encoding, Vec<usize>)>,
}

impl Canon<'_> {
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let n = colors.len();
        loop {
            let classes = colors.iter().collect::<BTreeSet<_>>().len();
            let keys: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
                .map(|v| {
                    let mut i: Vec<usize> = self.ins[v].iter().map(|&u| colors[u]).collect();
                    let mut o: Vec<usize> = self.outs[v].iter().map(|&u| colors[u]).collect();
                    i.sort_unstable();
                    o.sort_unstable();
                    (colors[v], i, o)
                })
                .collect();
            colors = rank(&keys);
            if colors.iter().collect::<BTreeSet<_>>().len() == classes {
                return colors;
            }
        }
    }

    fn leaf(&mut self, colors: &[usize]) {
        let mut order: Vec<usize> = (0..colors.len()).collect();
        order.sort_by_key(|&v| colors[v]);
        let mut pos = vec![0; order.len()];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
        edges.sort_unstable();
        edges.dedup();
        let enc = Encoding { sigs: order.iter().map(|&v| self.sigs[v].clone()).collect(), edges };
        if self.best.as_ref().is_none_or(|(b, _)| enc.cmp(b) == Ordering::Less) {
            self.best = Some((enc, order));
        }
    }

    fn search(&mut self, colors: Vec<usize>) {
        let colors = self.refine(colors);
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            cells.entry(c).or_default().push(v);
        }
        let Some(cell) = cells.values().find(|c| c.len() > 1) else {
            self.leaf(&colors);
            return;
        };
        let twins = cell.iter().all(|&v| self.ins[v] == self.ins[cell[0]] && self.outs[v] == self.outs[cell[0]]);
        let branches: Vec<usize> = if twins { vec![cell[0]] } else { cell.clone() };
        for v in branches {
            let keys: Vec<(usize, bool)> = colors.iter().enumerate().map(|(u, &c)| (c, u != v)).collect();
            self.search(rank(&keys));
        }
    }
}

fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let distinct: Vec<K> = keys.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    keys.iter().map(|k| distinct.binary_search(k).expect("present")).collect()
}

/// Colour refinement seeded with node labels, then individualisation of
/// ambiguous cells; the smallest encoding over all leaves is canonical.
/// Nodes with identical neighbourhoods are interchangeable, so such cells
/// are split on one member only.
pub fn canonical_form(g: &Graam) -> CanonicalForm {
    let n = g.nodes.len();
    let mut ins = vec![Vec::new(); n];
    let mut outs = vec![Vec::new(); n];
    for &(a, b) in &g.edges {
        outs[a].push(b);
        ins[b].push(a);
    }
    for v in 0..n {
        ins[v].sort_unstable();
        outs[v].sort_unstable();
    }
    let sigs = g.sigs();
    let mut c = Canon { sigs: sigs.clone(), ins, outs, edges: &g.edges, best: None };
    c.search(rank(&sigs));
    let (enc, order) = c.best.expect("at least one leaf");
    let mut h = Sha256::new();
    for s in &enc.sigs {
        h.update(s.as_bytes());
        h.update(b"\n");
    }
    for (a, b) in &enc.edges {
        h.update(format!("{a}>{b};").as_bytes());
    }
    CanonicalForm { order, key: hex::encode(h.finalize()) }
}

pub fn canonicalize(g: &Graam) -> CanonicalForm {
    canonical_form(g)
}

/// Label-preserving isomorphism by plain backtracking.
pub fn isomorphic(a: &Graam, b: &Graam) -> bool {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let (sa, sb) = (a.sigs(), b.sigs());
    let mut la = sa.clone();
    let mut lb = sb.clone();
    la.sort();
    lb.sort();
    if la != lb {
        return false;
    }
    let eb: BTreeSet<(usize, usize)> = b.edges.iter().copied().collect();
    let mut map = vec![usize::MAX; a.nodes.len()];
    let mut used = vec![false; b.nodes.len()];
    fn go(
        v: usize,
        a: &Graam,
        sa: &[String],
        sb: &[String],
        eb: &BTreeSet<(usize, usize)>,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if v == map.len() {
            return a.edges.iter().all(|&(x, y)| eb.contains(&(map[x], map[y])));
        }
        for w in 0..sb.len() {
            if used[w] || sa[v] != sb[w] {
                continue;
            }
            let consistent = a.edges.iter().all(|&(x, y)| {
                if x == v && y < v {
                    eb.contains(&(w, map[y]))
                } else if y == v && x < v {
                    eb.contains(&(map[x], w))
                } else if x == v && y == v {
                    eb.contains(&(w, w))
                } else {
                    true
                }
            });
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if go(v + 1, a, sa, sb, eb, map, used) {
                return true;
            }
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }
    go(0, a, &sa, &sb, &eb, &mut map, &mut used)
}

/// Equal canonical keys, confirmed by an exact isomorphism check.
pub fn semantically_equivalent(a: &Graam, b: &Graam) -> bool {
    a.canonical_key == b.canonical_key && isomorphic(a, b)
}

/// Data edges of the PAUG plus the framework-mandated orders that the
/// program actually follows.
pub fn build_graam(paug: &Paug, ifd: &IfdModel) -> Result<Graam, Error> {
    let api: Vec<u32> = paug.seq_order();
    let index: BTreeMap<u32, usize> = api.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let labels: Vec<ApiLabel> = api.iter().map(|&v| paug.label(v).expect("api node").clone()).collect();
    let mut cons: BTreeSet<(usize, usize)> = paug
        .edges_of(PaugEdgeKind::Data)
        .filter_map(|e| Some((*index.get(&e.from)?, *index.get(&e.to)?)))
        .collect();
    for &r in &api {
        let before = paug.seq_ancestors(r);
        let rl = &labels[index[&r]];
        if !matches!(rl.kind, ApiKind::Init | ApiKind::Invoke) {
            continue;
        }
        for &w in &api {
            let wl = &labels[index[&w]];
            if w != r
                && wl.target == rl.target
                && before.contains(&w)
                && ifd.requires(&rl.target, &wl.member, &rl.member)
                && same_lineage(paug, w, r)
            {
                cons.insert((index[&w], index[&r]));
            }
        }
    }
    let cons: Vec<(usize, usize)> = cons.into_iter().collect();
    Ok(Graam::from_api(&ifd.framework, labels, &cons)?.with_source(format!("{}#{}", paug.unit, paug.entry)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> ApiLabel {
        ApiLabel::invoke("fw.T", s)
    }

    #[test]
    fn star_when_no_constraints() {
        let g = Graam::from_api("fw", vec![l("a/0"), l("b/0")], &[]).unwrap();
        assert_eq!(g.edges.len(), 4);
        assert!(g.edges.contains(&(START, 2)) && g.edges.contains(&(3, END)));
    }

    #[test]
    fn node_order_does_not_change_key() {
        let a = Graam::from_api("fw", vec![l("a/0"), l("b/0"), l("c/0")], &[(0, 2), (1, 2)]).unwrap();
        let b = Graam::from_api("fw", vec![l("c/0"), l("b/0"), l("a/0")], &[(2, 0), (1, 0)]).unwrap();
        assert_eq!(a, b);
        assert!(semantically_equivalent(&a, &b));
    }

    #[test]
    fn label_change_changes_key() {
        let a = Graam::from_api("fw", vec![l("login/0"), l("x/0")], &[(0, 1)]).unwrap();
        let b = Graam::from_api("fw", vec![l("logout/0"), l("x/0")], &[(0, 1)]).unwrap();
        assert_ne!(a.canonical_key, b.canonical_key);
        assert!(!semantically_equivalent(&a, &b));
    }

    #[test]
    fn cycle_is_rejected() {
        let err = Graam::from_api("fw", vec![l("a/0"), l("b/0")], &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::Cycle(_)));
    }

    #[test]
    fn symmetric_graph_keys_agree() {
        // two identical diamonds side by side, listed in different orders
        let labels = vec![l("a/0"), l("b/0"), l("b/0"), l("c/0"), l("a/0"), l("b/0"), l("b/0"), l("c/0")];
        let e1 = [(0, 1), (0, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 7), (6, 7)];
        let a = Graam::from_api("fw", labels.clone(), &e1).unwrap();
        let perm = [7, 3, 5, 1, 0, 6, 2, 4];
        let mut labels2 = vec![l("x/0"); 8];
        for (i, &p) in perm.iter().enumerate() {
            labels2[p] = labels[i].clone();
        }
        let e2: Vec<_> = e1.iter().map(|&(x, y)| (perm[x], perm[y])).collect();
        let b = Graam::from_api("fw", labels2, &e2).unwrap();
        assert_eq!(a.canonical_key, b.canonical_key);
        assert!(isomorphic(&a, &b));
    }

    #[test]
    fn sub_graam_keeps_implied_order() {
        let g = Graam::from_api("fw", vec![l("a/0"), l("b/0"), l("c/0")], &[(0, 1), (1, 2)]).unwrap();
        let b = g.api_nodes().find(|&v| g.label(v).unwrap().member == "b/0").unwrap();
        let sub = g.without_node(b);
        assert_eq!(sub.api_constraints().len(), 1);
    }
}
