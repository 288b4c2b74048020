//! Next-API suggestions and misuse fixes against a learned specification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fspec::{upper_part_embeddings, FSpec};
use crate::ged::{align, ged, GedResult};
use crate::graam::{Graam, END, START};
use crate::graph;
use crate::slicer::ApiLabel;

/// Above this many API nodes only the best candidates by lower bound are
/// scored exactly.
pub const BEAM_THRESHOLD: usize = 200;
pub const BEAM_WIDTH: usize = 64;
/// Labels a candidate may use that the program does not.
pub const MAX_FOREIGN_LABELS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Green,
    Blue,
    Orange,
    Red,
}

impl Band {
    pub fn of(score: f64) -> Band {
        if score >= 0.8 {
            Band::Green
        } else if score >= 0.5 {
            Band::Blue
        } else if score >= 0.2 {
            Band::Orange
        } else {
            Band::Red
        }
    }
}

/// 1 − d / (|V_a| + |E_a| + |V_b| + |E_b|), clamped to [0, 1].
pub fn score(d: u32, a: &Graam, b: &Graam) -> f64 {
    let total = a.nodes.len() + a.edges.len() + b.nodes.len() + b.edges.len();
    if total == 0 {
        return 1.0;
    }
    (1.0 - f64::from(d) / total as f64).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecommendationKind {
    NextApi,
    InsertApi,
    ReorderApi,
    Conforms,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum EditStep {
    Insert { label: ApiLabel, after: Vec<ApiLabel>, before: Vec<ApiLabel> },
    Reorder { first: ApiLabel, then: ApiLabel },
    Remove { label: ApiLabel },
}

impl fmt::Display for EditStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[ApiLabel]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            EditStep::Insert { label, after, before } => {
                write!(f, "insert {label}")?;
                if !after.is_empty() {
                    write!(f, " after [{}]", list(after))?;
                }
                if !before.is_empty() {
                    write!(f, " before [{}]", list(before))?;
                }
                Ok(())
            }
            EditStep::Reorder { first, then } => write!(f, "call {first} before {then}"),
            EditStep::Remove { label } => write!(f, "remove {label}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub kind: RecommendationKind,
    pub patch: Vec<EditStep>,
    pub score: f64,
    pub band: Band,
    pub support: u64,
    /// FSpec API nodes of the matched sub-graph.
    pub subgraph: Vec<usize>,
    pub distance: u32,
    pub approximate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextApiCandidate {
    pub label: ApiLabel,
    pub frequency: u64,
    /// Adding the call turns the partial usage into a complete learned one.
    pub completes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextApiResult {
    /// The partial usage is a complete learned usage.
    pub conforms: bool,
    pub candidates: Vec<NextApiCandidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Nodes whose predecessors all lie in `image` (or are the start).
fn addable(f: &FSpec, image: &BTreeSet<usize>) -> Vec<(usize, u64)> {
    f.api_nodes()
        .filter(|v| !image.contains(v))
        .filter_map(|v| {
            let preds = f.preds(v);
            if preds.iter().all(|p| *p == START || image.contains(p)) {
                let freq = preds.iter().filter_map(|&p| f.frequency(p, v)).min().unwrap_or(0);
                Some((v, freq))
            } else {
                None
            }
        })
        .collect()
}

/// Every node of `set` either continues inside the set or ends a learned
/// usage, and no successor that every usage through a member went on to call
/// is left out.
fn is_complete(f: &FSpec, set: &BTreeSet<usize>) -> bool {
    set.iter().all(|&v| {
        let succs = f.succs(v);
        let continues = succs.iter().any(|(w, _)| set.contains(w));
        let mandatory_missing = succs.iter().any(|&(w, _)| w != END && !set.contains(&w) && f.usages(w) == f.usages(v));
        (continues || f.frequency(v, END).is_some()) && !mandatory_missing
    })
}

/// Ranked continuations of a partial usage: FSpec nodes some maximum
/// embedding of the partial can be extended with. Calls that complete a
/// learned usage come first, then higher frequency, then label order.
pub fn next_api(partial: &Graam, f: &FSpec, k: usize) -> NextApiResult {
    let embeddings = upper_part_embeddings(partial, f, true);
    if embeddings[0].len() < partial.api_count() {
        return NextApiResult {
            conforms: false,
            candidates: Vec::new(),
            diagnostic: Some(format!(
                "no embedding: only {} of {} API nodes match a learned usage",
                embeddings[0].len(),
                partial.api_count()
            )),
        };
    }
    let mut best: BTreeMap<String, (bool, u64, ApiLabel)> = BTreeMap::new();
    let mut conforms = false;
    for emb in &embeddings {
        let image: BTreeSet<usize> = emb.values().copied().collect();
        conforms |= !image.is_empty() && is_complete(f, &image);
        for (v, freq) in addable(f, &image) {
            let mut grown = image.clone();
            grown.insert(v);
            let completes = !image.is_empty() && is_complete(f, &grown);
            let label = f.nodes[v].label().expect("api").clone();
            let slot = best.entry(label.sig()).or_insert((false, 0, label));
            if (completes, freq) > (slot.0, slot.1) {
                slot.0 = completes;
                slot.1 = freq;
            }
        }
    }
    let mut candidates: Vec<NextApiCandidate> = best
        .into_values()
        .map(|(completes, frequency, label)| NextApiCandidate { label, frequency, completes })
        .collect();
    candidates.sort_by(|a, b| {
        (b.completes, b.frequency).cmp(&(a.completes, a.frequency)).then_with(|| a.label.sig().cmp(&b.label.sig()))
    });
    candidates.truncate(k);
    NextApiResult { conforms, candidates, diagnostic: None }
}

fn multiset(sigs: impl Iterator<Item = String>) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for s in sigs {
        *m.entry(s).or_insert(0) += 1;
    }
    m
}

/// Complete start-anchored node sets of `f` with at most `max_nodes` API
/// nodes and few labels absent from the program.
fn candidate_sets(f: &FSpec, program: &BTreeSet<String>, max_nodes: usize) -> Vec<BTreeSet<usize>> {
    let plain: Vec<(usize, usize)> = f.edges.iter().map(|e| (e.from, e.to)).collect();
    let order: Vec<usize> = graph::topo_order(f.nodes.len(), &plain)
        .expect("FSpec is acyclic")
        .into_iter()
        .filter(|&v| v >= 2)
        .collect();
    let preds: Vec<BTreeSet<usize>> = (0..f.nodes.len()).map(|v| f.preds(v)).collect();
    let foreign: Vec<bool> = (0..f.nodes.len()).map(|v| !program.contains(&f.nodes[v].sig())).collect();
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        order: &[usize],
        preds: &[BTreeSet<usize>],
        foreign: &[bool],
        max_nodes: usize,
        set: &mut BTreeSet<usize>,
        n_foreign: usize,
        f: &FSpec,
        out: &mut Vec<BTreeSet<usize>>,
    ) {
        if i == order.len() {
            if !set.is_empty() && is_complete(f, set) {
                out.push(set.clone());
            }
            return;
        }
        let v = order[i];
        let closed = preds[v].iter().all(|p| *p == START || set.contains(p));
        let nf = n_foreign + usize::from(foreign[v]);
        if closed && set.len() < max_nodes && nf <= MAX_FOREIGN_LABELS {
            set.insert(v);
            go(i + 1, order, preds, foreign, max_nodes, set, nf, f, out);
            set.remove(&v);
        }
        go(i + 1, order, preds, foreign, max_nodes, set, n_foreign, f, out);
    }
    go(0, &order, &preds, &foreign, max_nodes, &mut BTreeSet::new(), 0, f, &mut out);
    out
}

fn lower_bound(g: &Graam, s: &Graam) -> u32 {
    let a = multiset(g.sigs().into_iter());
    let b = multiset(s.sigs().into_iter());
    let common: usize = a.iter().map(|(k, x)| (*x).min(*b.get(k).unwrap_or(&0))).sum();
    let nodes = g.nodes.len().max(s.nodes.len()) - common;
    (nodes + g.edges.len().abs_diff(s.edges.len())) as u32
}

fn support(f: &FSpec, set: &BTreeSet<usize>) -> u64 {
    f.edges
        .iter()
        .filter(|e| {
            (e.from == START || set.contains(&e.from)) && (e.to == END || set.contains(&e.to))
        })
        .map(|e| e.frequency)
        .min()
        .unwrap_or(0)
}

/// Edit steps that turn `g` into `s` under a label-preserving node mapping:
/// calls of `s` without a counterpart are inserted, calls of `g` without one
/// removed, and matched pairs ordered the other way round in `g` reordered.
pub fn derive_patch(g: &Graam, s: &Graam, r: &GedResult) -> Vec<EditStep> {
    let rg = g.reachability();
    let rs = s.reachability();
    let mut steps = BTreeSet::new();
    let mapped: BTreeSet<usize> = r.mapping.iter().flatten().copied().collect();
    let api = |x: usize| x >= 2;
    for w in s.api_nodes().filter(|w| !mapped.contains(w)) {
        let after = s.preds(w).into_iter().filter(|&p| api(p)).map(|p| s.label(p).unwrap().clone()).collect();
        let before = s.succs(w).into_iter().filter(|&p| api(p)).map(|p| s.label(p).unwrap().clone()).collect();
        steps.insert(EditStep::Insert { label: s.label(w).unwrap().clone(), after, before });
    }
    let pairs: Vec<(usize, usize)> =
        g.api_nodes().filter_map(|x| r.mapping[x].filter(|&w| api(w)).map(|w| (x, w))).collect();
    for &(x, xw) in &pairs {
        for &(y, yw) in &pairs {
            if rs[xw].contains(&yw) && rg[y].contains(&x) {
                steps.insert(EditStep::Reorder { first: s.label(xw).unwrap().clone(), then: s.label(yw).unwrap().clone() });
            }
        }
    }
    for x in g.api_nodes() {
        if !matches!(r.mapping[x], Some(w) if api(w)) {
            steps.insert(EditStep::Remove { label: g.label(x).unwrap().clone() });
        }
    }
    steps.into_iter().collect()
}

fn kind_of(patch: &[EditStep]) -> RecommendationKind {
    if patch.is_empty() {
        RecommendationKind::Conforms
    } else if patch.iter().any(|s| matches!(s, EditStep::Insert { .. })) {
        RecommendationKind::InsertApi
    } else {
        RecommendationKind::ReorderApi
    }
}

fn patch_key(patch: &[EditStep]) -> String {
    patch.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("; ")
}

/// Closest learned usages to `g`, best first: each candidate is a complete
/// start-anchored sub-graph of `f` at most one API node larger than `g`,
/// scored by normalized edit distance and tie-broken by frequency support.
pub fn detect_and_fix(g: &Graam, f: &FSpec, k: usize) -> Vec<Recommendation> {
    let program: BTreeSet<String> = g.api_nodes().map(|v| g.nodes[v].sig()).collect();
    let sets = candidate_sets(f, &program, g.api_count() + 1);
    let mut scored: Vec<(f64, BTreeSet<usize>, Graam)> = sets
        .into_iter()
        .map(|set| {
            let s = f.subgraph(&set);
            let ub = score(lower_bound(g, &s), g, &s);
            (ub, set, s)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    if f.api_nodes().len() > BEAM_THRESHOLD {
        scored.truncate(BEAM_WIDTH);
    }

    let mut recs: Vec<Recommendation> = Vec::new();
    for (ub, set, s) in scored {
        if recs.len() >= k {
            let mut by_score: Vec<f64> = recs.iter().map(|r| r.score).collect();
            by_score.sort_by(|a, b| b.total_cmp(a));
            if ub < by_score[k - 1] {
                break;
            }
        }
        let r = ged(g, &s);
        let sc = score(r.distance, g, &s);
        let sup = support(f, &set);
        if r.distance == 0 {
            return vec![Recommendation {
                kind: RecommendationKind::Conforms,
                patch: Vec::new(),
                score: 1.0,
                band: Band::Green,
                support: sup,
                subgraph: set.into_iter().collect(),
                distance: 0,
                approximate: !r.exact,
            }];
        }
        let patch = derive_patch(g, &s, &align(g, &s));
        recs.push(Recommendation {
            kind: kind_of(&patch),
            patch,
            score: sc,
            band: Band::of(sc),
            support: sup,
            subgraph: set.into_iter().collect(),
            distance: r.distance,
            approximate: !r.exact,
        });
    }
    recs.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.support.cmp(&a.support))
            .then_with(|| patch_key(&a.patch).cmp(&patch_key(&b.patch)))
    });
    let mut seen = BTreeSet::new();
    recs.retain(|r| seen.insert(patch_key(&r.patch)));
    recs.truncate(k);
    recs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fspec::infer;

    fn l(m: &str) -> ApiLabel {
        ApiLabel::invoke("fw.T", &format!("{m}/0"))
    }

    fn chain(ms: &[&str]) -> Graam {
        let cons: Vec<_> = (1..ms.len()).map(|i| (i - 1, i)).collect();
        Graam::from_api("fw", ms.iter().map(|m| l(m)).collect(), &cons).unwrap()
    }

    #[test]
    fn bands_follow_thresholds() {
        assert_eq!(Band::of(1.0), Band::Green);
        assert_eq!(Band::of(0.8), Band::Green);
        assert_eq!(Band::of(0.79), Band::Blue);
        assert_eq!(Band::of(0.5), Band::Blue);
        assert_eq!(Band::of(0.2), Band::Orange);
        assert_eq!(Band::of(0.19), Band::Red);
    }

    #[test]
    fn conforming_program_gets_single_conforms() {
        let g = chain(&["open", "read", "close"]);
        let f = infer("fw", &[g.clone()]).unwrap();
        let recs = detect_and_fix(&g, &f, 5);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].kind, RecommendationKind::Conforms);
        assert_eq!(recs[0].score, 1.0);
    }

    #[test]
    fn missing_middle_call_is_inserted() {
        let full = chain(&["open", "read", "close"]);
        let f = infer("fw", &[full.clone()]).unwrap();
        let mutant = chain(&["open", "close"]);
        let recs = detect_and_fix(&mutant, &f, 3);
        assert_eq!(recs[0].kind, RecommendationKind::InsertApi);
        assert!(matches!(&recs[0].patch[0], EditStep::Insert { label, .. } if label.member == "read/0"));
    }

    #[test]
    fn swapped_calls_are_reordered() {
        let f = infer("fw", &[chain(&["open", "read", "close"])]).unwrap();
        let recs = detect_and_fix(&chain(&["open", "close", "read"]), &f, 3);
        assert_eq!(recs[0].kind, RecommendationKind::ReorderApi);
        assert!(recs[0]
            .patch
            .iter()
            .any(|s| matches!(s, EditStep::Reorder { first, then } if first.member == "read/0" && then.member == "close/0")));
    }

    #[test]
    fn next_api_from_empty_partial_is_most_frequent_first_call() {
        let f = infer("fw", &[chain(&["a", "b"]), chain(&["a", "c"]), chain(&["d"])]).unwrap();
        let r = next_api(&Graam::empty("fw"), &f, 3);
        assert_eq!(r.candidates[0].label.member, "a/0");
        assert_eq!(r.candidates[0].frequency, 2);
    }

    #[test]
    fn next_api_without_embedding_is_empty() {
        let f = infer("fw", &[chain(&["a", "b"])]).unwrap();
        let r = next_api(&chain(&["z"]), &f, 3);
        assert!(r.candidates.is_empty());
        assert!(r.diagnostic.is_some());
    }
}
