//! Framework API specifications: GRAAMs merged along their upper parts,
//! with a frequency on every edge.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::graam::{GNode, Graam, END, START};
use crate::graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FEdge {
    pub from: usize,
    pub to: usize,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FSpec {
    pub framework: String,
    /// Node 0 is the start, node 1 the end.
    pub nodes: Vec<GNode>,
    pub edges: Vec<FEdge>,
    pub graams_merged: u64,
    pub merge_order_digest: String,
}

/// Matched part of a GRAAM: API node of the GRAAM → node of the FSpec.
pub type Embedding = BTreeMap<usize, usize>;

impl FSpec {
    pub fn new(framework: &str) -> FSpec {
        FSpec {
            framework: framework.to_string(),
            nodes: vec![GNode::Start, GNode::End],
            edges: Vec::new(),
            graams_merged: 0,
            merge_order_digest: hex::encode(Sha256::digest(b"")),
        }
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn api_nodes(&self) -> std::ops::Range<usize> {
        2..self.nodes.len()
    }

    pub fn frequency(&self, from: usize, to: usize) -> Option<u64> {
        self.edges
            .binary_search_by(|e| (e.from, e.to).cmp(&(from, to)))
            .ok()
            .map(|i| self.edges[i].frequency)
    }

    pub fn preds(&self, v: usize) -> BTreeSet<usize> {
        self.edges.iter().filter(|e| e.to == v).map(|e| e.from).collect()
    }

    pub fn succs(&self, v: usize) -> Vec<(usize, u64)> {
        self.edges.iter().filter(|e| e.from == v).map(|e| (e.to, e.frequency)).collect()
    }

    /// Merged GRAAMs that pass through API node `v`. Nodes only merge when
    /// their predecessor sets agree, so every in-edge carries this count.
    pub fn usages(&self, v: usize) -> u64 {
        self.edges.iter().filter(|e| e.to == v).map(|e| e.frequency).max().unwrap_or(0)
    }

    pub fn total_frequency(&self) -> u64 {
        self.edges.iter().map(|e| e.frequency).sum()
    }

    /// The sub-graph over API nodes `keep`, as a GRAAM. Orders between
    /// kept nodes are those implied by the whole specification.
    pub fn subgraph(&self, keep: &BTreeSet<usize>) -> Graam {
        let plain: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.from, e.to)).collect();
        let reach = graph::reachability(self.nodes.len(), &plain);
        let kept: Vec<usize> = keep.iter().copied().filter(|&v| v >= 2).collect();
        let index: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut cons = Vec::new();
        for &a in &kept {
            for &b in &kept {
                if reach[a].contains(&b) {
                    cons.push((index[&a], index[&b]));
                }
            }
        }
        let labels = kept.iter().map(|&v| self.nodes[v].label().expect("api node").clone()).collect();
        Graam::from_api(&self.framework, labels, &cons).expect("sub-graph of a DAG")
    }

    /// Every start → end path as a list of node ids. Exponential; meant for
    /// small specifications.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![START];
        fn go(f: &FSpec, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let v = *stack.last().expect("non-empty");
            if v == END {
                out.push(stack.clone());
                return;
            }
            for (w, _) in f.succs(v) {
                stack.push(w);
                go(f, stack, out);
                stack.pop();
            }
        }
        go(self, &mut stack, &mut out);
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph fspec {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let name = match n {
                GNode::Start => "start".to_string(),
                GNode::End => "end".to_string(),
                GNode::Api { label } => label.to_string(),
            };
            s.push_str(&format!("  n{i} [label=\"{name}\"];\n"));
        }
        for e in &self.edges {
            s.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", e.from, e.to, e.frequency));
        }
        s.push_str("}\n");
        s
    }
}

struct Matcher<'a> {
    g: &'a Graam,
    order: Vec<usize>,
    gpreds: Vec<Vec<usize>>,
    /// (sig, exact predecessor set) → FSpec nodes
    index: BTreeMap<(String, BTreeSet<usize>), Vec<usize>>,
    best: usize,
    found: Vec<Embedding>,
    keep_all: bool,
    budget: usize,
}

impl Matcher<'_> {
    fn go(&mut self, i: usize, map: &mut Embedding, used: &mut BTreeSet<usize>, skipped: &mut BTreeSet<usize>) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        let limit = if self.keep_all || self.found.is_empty() { self.best } else { self.best + 1 };
        if map.len() + (self.order.len() - i) < limit {
            return;
        }
        if i == self.order.len() {
            if map.len() > self.best {
                self.best = map.len();
                self.found.clear();
            }
            if map.len() == self.best && (self.keep_all || self.found.is_empty()) {
                self.found.push(map.clone());
            }
            return;
        }
        let v = self.order[i];
        let preds = &self.gpreds[v];
        let mut image = BTreeSet::new();
        let mut all_matched = true;
        for &p in preds {
            if p == START {
                image.insert(START);
            } else if let Some(&q) = map.get(&p) {
                image.insert(q);
            } else {
                all_matched = false;
            }
        }
        if all_matched {
            let key = (self.g.nodes[v].sig(), image);
            let cands: Vec<usize> = self.index.get(&key).cloned().unwrap_or_default();
            for c in cands {
                if used.contains(&c) {
                    continue;
                }
                map.insert(v, c);
                used.insert(c);
                self.go(i + 1, map, used, skipped);
                used.remove(&c);
                map.remove(&v);
            }
        }
        skipped.insert(v);
        self.go(i + 1, map, used, skipped);
        skipped.remove(&v);
    }
}

const MATCH_BUDGET: usize = 2_000_000;

/// Largest start-anchored matches of `g` into `f`. Matched nodes carry the
/// same label and their predecessor sets correspond exactly, so every
/// matched node's ancestry is matched too. With `all`, every maximum match
/// is returned; otherwise the first one found, which is the smallest under
/// the fixed search order.
pub fn upper_part_embeddings(g: &Graam, f: &FSpec, all: bool) -> Vec<Embedding> {
    let order: Vec<usize> = graph::topo_order(g.nodes.len(), &g.edges)
        .expect("GRAAM is acyclic")
        .into_iter()
        .filter(|&v| v >= 2)
        .collect();
    let mut gpreds = vec![Vec::new(); g.nodes.len()];
    for &(a, b) in &g.edges {
        gpreds[b].push(a);
    }
    let mut index: BTreeMap<(String, BTreeSet<usize>), Vec<usize>> = BTreeMap::new();
    for v in f.api_nodes() {
        index.entry((f.nodes[v].sig(), f.preds(v))).or_default().push(v);
    }
    let mut m = Matcher { g, order, gpreds, index, best: 0, found: Vec::new(), keep_all: all, budget: MATCH_BUDGET };
    m.go(0, &mut BTreeMap::new(), &mut BTreeSet::new(), &mut BTreeSet::new());
    if m.found.is_empty() {
        m.found.push(BTreeMap::new());
    }
    m.found
}

/// Merges `g` into `acc` along the largest matching upper part; the rest of
/// `g` is grafted on as new nodes. Every edge of `g` adds one to the
/// frequency of its image.
pub fn merge(acc: &FSpec, g: &Graam) -> Result<FSpec, Error> {
    if acc.framework != g.framework {
        return Err(Error::FrameworkMismatch { expected: acc.framework.clone(), found: g.framework.clone() });
    }
    let embedding = upper_part_embeddings(g, acc, false).remove(0);
    let mut out = acc.clone();
    let mut image = vec![usize::MAX; g.nodes.len()];
    image[START] = START;
    image[END] = END;
    for v in g.api_nodes() {
        image[v] = match embedding.get(&v) {
            Some(&c) => c,
            None => {
                out.nodes.push(g.nodes[v].clone());
                out.nodes.len() - 1
            }
        };
    }
    let mut freq: BTreeMap<(usize, usize), u64> = out.edges.iter().map(|e| ((e.from, e.to), e.frequency)).collect();
    for &(a, b) in &g.edges {
        *freq.entry((image[a], image[b])).or_insert(0) += 1;
    }
    out.edges = freq.into_iter().map(|((from, to), frequency)| FEdge { from, to, frequency }).collect();
    out.graams_merged += 1;
    out.merge_order_digest = hex::encode(Sha256::digest(format!("{}{}", out.merge_order_digest, g.canonical_key)));
    Ok(out)
}

/// Feed order: larger GRAAMs first, ties by canonical key.
pub fn feed_order(graams: &[Graam]) -> Vec<&Graam> {
    let mut v: Vec<&Graam> = graams.iter().collect();
    v.sort_by(|a, b| b.node_count().cmp(&a.node_count()).then_with(|| a.canonical_key.cmp(&b.canonical_key)));
    v
}

pub fn infer(framework: &str, graams: &[Graam]) -> Result<FSpec, Error> {
    feed_order(graams).into_iter().try_fold(FSpec::new(framework), |acc, g| merge(&acc, g))
}

pub fn fspec_size(f: &FSpec) -> usize {
    f.size()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub cumulative_nodes: usize,
    pub fspec_nodes: usize,
}

/// FSpec size after each GRAAM, in the order given.
pub fn learning_curve(framework: &str, graams: &[Graam]) -> Result<Vec<CurvePoint>, Error> {
    let mut acc = FSpec::new(framework);
    let mut cumulative = 0;
    let mut out = Vec::with_capacity(graams.len());
    for (i, g) in graams.iter().enumerate() {
        acc = merge(&acc, g)?;
        cumulative += g.node_count();
        out.push(CurvePoint { k: i + 1, cumulative_nodes: cumulative, fspec_nodes: acc.size() });
    }
    Ok(out)
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("k,cumulative_nodes,fspec_nodes\n");
    for p in points {
        s.push_str(&format!("{},{},{}\n", p.k, p.cumulative_nodes, p.fspec_nodes));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slicer::ApiLabel;

    fn chain(labels: &[&str]) -> Graam {
        let ls = labels.iter().map(|l| ApiLabel::invoke("fw.T", &format!("{l}/0"))).collect();
        let cons: Vec<_> = (1..labels.len()).map(|i| (i - 1, i)).collect();
        Graam::from_api("fw", ls, &cons).unwrap()
    }

    #[test]
    fn empty_spec_has_two_nodes() {
        let f = infer("fw", &[]).unwrap();
        assert_eq!(fspec_size(&f), 2);
        assert!(f.edges.is_empty());
    }

    #[test]
    fn self_merge_doubles_frequencies() {
        let g = chain(&["a", "b", "c"]);
        let f = infer("fw", &[g.clone(), g.clone()]).unwrap();
        assert_eq!(f.size(), g.node_count());
        assert!(f.edges.iter().all(|e| e.frequency == 2));
    }

    #[test]
    fn middle_parts_are_never_merged() {
        let g1 = chain(&["1", "2", "3", "4"]);
        let g2 = chain(&["5", "2", "3", "6"]);
        let f = infer("fw", &[g1, g2]).unwrap();
        let paths: Vec<Vec<String>> = f
            .paths()
            .iter()
            .map(|p| p[1..p.len() - 1].iter().map(|&v| f.nodes[v].label().unwrap().member.clone()).collect())
            .collect();
        assert_eq!(paths.len(), 2);
        assert!(!paths.contains(&vec!["1/0".into(), "2/0".into(), "3/0".into(), "6/0".into()]));
        assert!(!paths.contains(&vec!["5/0".into(), "2/0".into(), "3/0".into(), "4/0".into()]));
    }

    #[test]
    fn shared_prefix_is_counted_twice() {
        let f = infer("fw", &[chain(&["a", "b"]), chain(&["a", "b", "c"])]).unwrap();
        assert_eq!(f.size(), 5);
        let freqs: Vec<u64> = f.edges.iter().map(|e| e.frequency).collect();
        assert_eq!(freqs.iter().filter(|&&x| x == 2).count(), 2);
        assert_eq!(f.total_frequency(), 3 + 4);
    }

    #[test]
    fn framework_mismatch_is_an_error() {
        let g = Graam::from_api("other", vec![ApiLabel::init("o.X")], &[]).unwrap();
        assert!(matches!(merge(&FSpec::new("fw"), &g), Err(Error::FrameworkMismatch { .. })));
    }

    #[test]
    fn curve_has_one_point_per_graam() {
        let c = learning_curve("fw", &[chain(&["a"])]).unwrap();
        assert_eq!(c, vec![CurvePoint { k: 1, cumulative_nodes: 3, fspec_nodes: 3 }]);
        assert_eq!(curve_csv(&c), "k,cumulative_nodes,fspec_nodes\n1,3,3\n");
    }
}
