//! Top-k accuracy of the recommender on mutated usages.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fspec::FSpec;
use crate::graam::{isomorphic, Graam};
use crate::recommend::{detect_and_fix, next_api, EditStep};
use crate::slicer::ApiLabel;
use crate::synth::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    NextApi,
    MissedApi,
    SwappedApi,
}

impl CaseKind {
    pub const ALL: [CaseKind; 3] = [CaseKind::NextApi, CaseKind::MissedApi, CaseKind::SwappedApi];

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::NextApi => "next_api",
            CaseKind::MissedApi => "missed_api",
            CaseKind::SwappedApi => "swapped_api",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "expect", rename_all = "snake_case")]
pub enum Expected {
    Api { label: ApiLabel },
    Order { first: ApiLabel, then: ApiLabel },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub kind: CaseKind,
    pub source: String,
    pub mutant: Graam,
    pub expected: Expected,
}

/// One case per sink: the usage without its last call.
pub fn make_next_api_cases(graams: &[Graam]) -> Vec<TestCase> {
    graams
        .iter()
        .flat_map(|g| {
            g.sinks().into_iter().map(move |s| TestCase {
                kind: CaseKind::NextApi,
                source: g.source.clone().unwrap_or_default(),
                mutant: g.without_node(s),
                expected: Expected::Api { label: g.label(s).expect("api").clone() },
            })
        })
        .collect()
}

/// One case per API node: the usage without that call.
pub fn make_missed_api_cases(graams: &[Graam], seed: u64) -> Vec<TestCase> {
    let mut cases: Vec<TestCase> = graams
        .iter()
        .flat_map(|g| {
            g.api_nodes().map(move |v| TestCase {
                kind: CaseKind::MissedApi,
                source: g.source.clone().unwrap_or_default(),
                mutant: g.without_node(v),
                expected: Expected::Api { label: g.label(v).expect("api").clone() },
            })
        })
        .collect();
    cases.shuffle(&mut rng(seed));
    cases
}

/// One case per ordered pair of differently labelled calls: the two labels
/// trade places. Swaps that leave the usage unchanged up to isomorphism are
/// dropped.
pub fn make_swapped_api_cases(graams: &[Graam], seed: u64) -> Vec<TestCase> {
    let mut cases = Vec::new();
    for g in graams {
        let reach = g.reachability();
        let labels = g.api_labels();
        let cons = g.api_constraints();
        for x in g.api_nodes() {
            for y in g.api_nodes() {
                if !reach[x].contains(&y) || labels[x - 2].sig() == labels[y - 2].sig() {
                    continue;
                }
                let mut swapped = labels.clone();
                swapped.swap(x - 2, y - 2);
                let mutant = Graam::from_api(&g.framework, swapped, &cons).expect("same DAG").with_source(g.source.clone().unwrap_or_default());
                if isomorphic(&mutant, g) {
                    continue;
                }
                cases.push(TestCase {
                    kind: CaseKind::SwappedApi,
                    source: g.source.clone().unwrap_or_default(),
                    mutant,
                    expected: Expected::Order { first: labels[x - 2].clone(), then: labels[y - 2].clone() },
                });
            }
        }
    }
    cases.shuffle(&mut rng(seed));
    cases
}

pub fn make_cases(kind: CaseKind, graams: &[Graam], seed: u64) -> Vec<TestCase> {
    match kind {
        CaseKind::NextApi => make_next_api_cases(graams),
        CaseKind::MissedApi => make_missed_api_cases(graams, seed),
        CaseKind::SwappedApi => make_swapped_api_cases(graams, seed),
    }
}

fn hits(step: &EditStep, expected: &Expected) -> bool {
    match (step, expected) {
        (EditStep::Insert { label, .. }, Expected::Api { label: want }) => label.sig() == want.sig(),
        (EditStep::Reorder { first, then }, Expected::Order { first: f, then: t }) => {
            first.sig() == f.sig() && then.sig() == t.sig()
        }
        _ => false,
    }
}

/// 1-based rank of the first recommendation that fixes the case.
pub fn rank_of(case: &TestCase, f: &FSpec, k_max: usize) -> Option<usize> {
    match case.kind {
        CaseKind::NextApi => {
            let Expected::Api { label } = &case.expected else { return None };
            next_api(&case.mutant, f, k_max)
                .candidates
                .iter()
                .position(|c| c.label.sig() == label.sig())
                .map(|p| p + 1)
        }
        CaseKind::MissedApi | CaseKind::SwappedApi => detect_and_fix(&case.mutant, f, k_max)
            .iter()
            .position(|r| r.patch.iter().any(|s| hits(s, &case.expected)))
            .map(|p| p + 1),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub kind: CaseKind,
    pub cases: usize,
    /// `topk[i]` is the top-(i + 1) accuracy.
    pub topk: Vec<f64>,
    /// Sources of cases the recommender missed within `k_max`.
    pub misses: Vec<String>,
}

impl EvalReport {
    pub fn top(&self, k: usize) -> f64 {
        self.topk[k - 1]
    }
}

pub fn topk_accuracy(cases: &[TestCase], f: &FSpec, k_max: usize) -> Result<EvalReport, Error> {
    let Some(first) = cases.first() else {
        return Err(Error::EmptyEvalSet);
    };
    let ranks: Vec<Option<usize>> = cases.par_iter().map(|c| rank_of(c, f, k_max)).collect();
    let n = cases.len() as f64;
    let topk = (1..=k_max)
        .map(|k| ranks.iter().filter(|r| r.is_some_and(|r| r <= k)).count() as f64 / n)
        .collect();
    let misses = cases
        .iter()
        .zip(&ranks)
        .filter(|(_, r)| r.is_none())
        .map(|(c, _)| c.source.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(EvalReport { kind: first.kind, cases: cases.len(), topk, misses })
}

/// One representative per canonical key, in key order.
pub fn distinct(graams: &[Graam]) -> Vec<Graam> {
    let mut by_key: BTreeMap<&str, &Graam> = BTreeMap::new();
    for g in graams {
        by_key.entry(g.canonical_key.as_str()).or_insert(g);
    }
    by_key.into_values().cloned().collect()
}

/// Train/test split stratified by canonical key: about `test_fraction` of
/// each group goes to the test side, never a whole group of two or more.
pub fn split_corpus(graams: &[Graam], test_fraction: f64, seed: u64) -> (Vec<Graam>, Vec<Graam>) {
    let mut groups: BTreeMap<&str, Vec<&Graam>> = BTreeMap::new();
    for g in graams {
        groups.entry(g.canonical_key.as_str()).or_default().push(g);
    }
    let mut r = rng(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for members in groups.into_values() {
        let mut members = members;
        members.shuffle(&mut r);
        let n = members.len();
        let mut k = (n as f64 * test_fraction).round() as usize;
        if n >= 2 {
            k = k.clamp(1, n - 1);
        } else {
            k = 0;
        }
        for (i, g) in members.into_iter().enumerate() {
            if i < k {
                test.push(g.clone());
            } else {
                train.push(g.clone());
            }
        }
    }
    (train, test)
}
