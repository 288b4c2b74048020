mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use fspec_miner::artifact;
use fspec_miner::eval::{make_cases, split_corpus, topk_accuracy, CaseKind};
use fspec_miner::frontend::parse;
use fspec_miner::fspec::{infer, merge, upper_part_embeddings, FSpec};
use fspec_miner::ged::{ged, ged_with_cap};
use fspec_miner::graam::{build_graam, semantically_equivalent, Graam};
use fspec_miner::ifd::{validate, IfdEntry, IfdModel};
use fspec_miner::recommend::score;
use fspec_miner::slicer::{build_paugs, ApiLabel, Paug, PaugEdge, PaugEdgeKind, PaugNode, PaugNodeKind};
use fspec_miner::synth::{random_graam, random_manifest, random_order, random_program, rng, shuffled_copy};

use common::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn graam_of(src: &str) -> Graam {
    let ir = parse(src, "prog").unwrap();
    let paug = build_paugs(&ir, &random_manifest()).remove(0).unwrap();
    build_graam(&paug, &IfdModel { framework: "fw".into(), entries: vec![] }).unwrap()
}

proptest! {
    #![proptest_config(config(64))]

    /// API-to-API data edges are exactly def-use chains, possibly through
    /// plain local copies.
    #[test]
    fn paug_data_edges_follow_def_use(seed in any::<u64>(), perm in any::<u64>()) {
        let p = random_program(&mut rng(seed), 8);
        let order = random_order(&mut rng(perm), &p.lines);
        let ir = parse(&p.render(&order), "prog").unwrap();
        let paug = build_paugs(&ir, &random_manifest()).remove(0).unwrap();

        let is_api = |i: usize| p.lines[i].defs.iter().any(|d| d.starts_with('o') || d.starts_with('r'));
        let definer: BTreeMap<&str, usize> =
            p.lines.iter().enumerate().flat_map(|(i, l)| l.defs.iter().map(move |d| (d.as_str(), i))).collect();
        // API lines whose values reach line i, looking through copies
        fn sources(p: &fspec_miner::synth::RandomProgram, definer: &BTreeMap<&str, usize>, i: usize, api: &dyn Fn(usize) -> bool) -> BTreeSet<usize> {
            let mut out = BTreeSet::new();
            for u in &p.lines[i].uses {
                let d = definer[u.as_str()];
                if api(d) { out.insert(d); } else { out.extend(sources(p, definer, d, api)); }
            }
            out
        }
        // rendered line numbers: 4 imports, a blank, class and method headers
        let line_of: BTreeMap<usize, u32> = order.iter().enumerate().map(|(pos, &i)| (i, pos as u32 + 8)).collect();
        let mut expected = BTreeSet::new();
        for i in (0..p.lines.len()).filter(|&i| is_api(i)) {
            for s in sources(&p, &definer, i, &is_api) {
                expected.insert((line_of[&s], line_of[&i]));
            }
        }
        let node_line: BTreeMap<u32, u32> =
            paug.api_nodes().map(|n| (n.id, n.origin.as_ref().unwrap().line)).collect();
        let actual: BTreeSet<(u32, u32)> =
            paug.edges_of(PaugEdgeKind::Data).map(|e| (node_line[&e.from], node_line[&e.to])).collect();
        prop_assert_eq!(paug.api_nodes().count(), (0..p.lines.len()).filter(|&i| is_api(i)).count());
        prop_assert_eq!(actual, expected);
    }

    #[test]
    fn graam_key_ignores_statement_order(seed in any::<u64>(), perm in any::<u64>()) {
        let p = random_program(&mut rng(seed), 8);
        let a = graam_of(&p.render_in_order());
        let b = graam_of(&p.render(&random_order(&mut rng(perm), &p.lines)));
        prop_assert_eq!(&a.canonical_key, &b.canonical_key);
        prop_assert!(semantically_equivalent(&a, &b));
    }

    #[test]
    fn canonical_key_agrees_with_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_graam(&mut r, 7, 3);
        let b = if seed % 2 == 0 { shuffled_copy(&mut r, &a) } else { random_graam(&mut r, 7, 3) };
        prop_assert_eq!(a.canonical_key == b.canonical_key, brute_force_isomorphic(&a, &b));
    }

    #[test]
    fn ged_equals_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_graam(&mut r, 4, 3);
        let b = random_graam(&mut r, 4, 3);
        let res = ged(&a, &b);
        prop_assert!(res.exact);
        prop_assert_eq!(res.distance, brute_force_ged(&a, &b));
        prop_assert_eq!(res.distance, mapping_cost(&a, &b, &res.mapping));
    }

    #[test]
    fn ged_is_a_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let [a, b, c] = [0, 1, 2].map(|_| random_graam(&mut r, 5, 3));
        let (ab, ba) = (ged(&a, &b).distance, ged(&b, &a).distance);
        prop_assert_eq!(ged(&a, &a).distance, 0);
        prop_assert_eq!(ab, ba);
        prop_assert!(ab <= ged(&a, &c).distance + ged(&c, &b).distance);
        prop_assert_eq!(ab == 0, semantically_equivalent(&a, &b));
    }

    #[test]
    fn greedy_bound_is_never_below_exact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_graam(&mut r, 5, 3);
        let b = random_graam(&mut r, 5, 3);
        prop_assert!(ged_with_cap(&a, &b, 0).distance >= ged(&a, &b).distance);
    }

    #[test]
    fn score_is_in_unit_interval(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_graam(&mut r, 5, 4);
        let b = random_graam(&mut r, 5, 4);
        let s = score(ged(&a, &b).distance, &a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
    }

    /// Every start-to-end path of a merge is a path of one of its inputs.
    #[test]
    fn merge_creates_no_new_paths(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_graam(&mut r, 8, 3);
        let b = random_graam(&mut r, 8, 3);
        let f = infer("fw", &[a.clone(), b.clone()]).unwrap();
        let allowed: BTreeSet<Vec<String>> = graam_paths(&a).union(&graam_paths(&b)).cloned().collect();
        prop_assert!(fspec_paths(&f).is_subset(&allowed));
    }

    #[test]
    fn merge_accounts_for_every_graam(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let gs: Vec<Graam> = (0..n).map(|_| random_graam(&mut r, 6, 3)).collect();
        let mut f = FSpec::new("fw");
        for g in &gs {
            let next = merge(&f, g).unwrap();
            prop_assert!(next.size() >= f.size());
            // the merged GRAAM now embeds completely
            prop_assert_eq!(upper_part_embeddings(g, &next, false)[0].len(), g.api_count());
            f = next;
        }
        let sources: u64 = gs.iter().map(|g| g.succs(0).len() as u64).sum();
        let start_out: u64 = f.edges.iter().filter(|e| e.from == 0).map(|e| e.frequency).sum();
        prop_assert_eq!(start_out, sources);
        prop_assert_eq!(f.graams_merged, n as u64);
        prop_assert_eq!(f.total_frequency(), gs.iter().map(|g| g.edges.len() as u64).sum::<u64>());
    }

    #[test]
    fn validation_matches_sequence_oracle(members in prop::collection::vec(0usize..5, 1..8), pairs in prop::collection::vec((0usize..5, 0usize..5, 0usize..2), 0..5)) {
        let ifd = ifd_from(&pairs);
        let paug = chain_paug(&members);
        prop_assert_eq!(validate(&paug, &ifd).is_sound(), oracle_sound(&members, &ifd));
    }

    /// Without members that both read and write, dropping the reader of a
    /// single violation makes the usage sound.
    #[test]
    fn dropping_the_cited_reader_restores_soundness(members in prop::collection::vec(0usize..5, 1..8), pairs in prop::collection::vec((0usize..5, 0usize..5, 0usize..2), 0..5)) {
        let ifd = ifd_from(&pairs);
        let readers: BTreeSet<&str> = ifd.entries.iter().map(|e| e.reader.as_str()).collect();
        prop_assume!(ifd.entries.iter().all(|e| !readers.contains(e.writer.as_str())));
        let paug = chain_paug(&members);
        if let fspec_miner::ifd::SoundnessVerdict::Unsound { violations } = validate(&paug, &ifd) {
            if violations.len() == 1 {
                prop_assert!(validate(&paug.without_node(violations[0].reader_node), &ifd).is_sound());
            }
        }
    }

    #[test]
    fn accuracy_is_monotone_in_k(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gs: Vec<Graam> = (0..4).map(|_| random_graam(&mut r, 4, 4)).collect();
        let f = infer("fw", &gs).unwrap();
        for kind in CaseKind::ALL {
            if let Ok(rep) = topk_accuracy(&make_cases(kind, &gs, seed), &f, 4) {
                prop_assert!(rep.topk.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn split_is_seeded_and_complete(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gs: Vec<Graam> = (0..12).map(|_| random_graam(&mut r, 3, 2)).collect();
        let (tr, te) = split_corpus(&gs, 0.2, seed);
        prop_assert_eq!(tr.len() + te.len(), gs.len());
        prop_assert_eq!(split_corpus(&gs, 0.2, seed), (tr, te));
    }

    #[test]
    fn fspec_artifact_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gs: Vec<Graam> = (0..3).map(|_| random_graam(&mut r, 5, 3)).collect();
        let f = infer("fw", &gs).unwrap();
        let back: FSpec = artifact::from_json("fspec", &artifact::to_json("fspec", &f)).unwrap();
        prop_assert_eq!(back, f);
    }
}

const MEMBERS: [&str; 5] = ["a/0", "b/0", "c/0", "d/0", "e/0"];

fn ifd_from(pairs: &[(usize, usize, usize)]) -> IfdModel {
    let entries: BTreeSet<IfdEntry> = pairs
        .iter()
        .filter(|(w, r, _)| w != r)
        .map(|&(w, r, f)| IfdEntry {
            ty: "fw.T".into(),
            writer: MEMBERS[w].into(),
            field: format!("f{f}"),
            reader: MEMBERS[r].into(),
        })
        .collect();
    IfdModel { framework: "fw".into(), entries: entries.into_iter().collect() }
}

fn chain_paug(members: &[usize]) -> Paug {
    let n = members.len() as u32;
    let mut nodes = vec![PaugNode { id: 0, kind: PaugNodeKind::Start, label: None, origin: None }];
    for (i, &m) in members.iter().enumerate() {
        nodes.push(PaugNode {
            id: i as u32 + 1,
            kind: PaugNodeKind::Api,
            label: Some(ApiLabel::invoke("fw.T", MEMBERS[m])),
            origin: None,
        });
    }
    nodes.push(PaugNode { id: n + 1, kind: PaugNodeKind::End, label: None, origin: None });
    let edges = (0..=n).map(|i| PaugEdge { from: i, to: i + 1, kind: PaugEdgeKind::Seq, via: None }).collect();
    Paug { unit: "u".into(), entry: "main".into(), nodes, edges }
}

/// Every reader finds, for each field it reads, one of that field's
/// writers somewhere earlier.
fn oracle_sound(members: &[usize], ifd: &IfdModel) -> bool {
    members.iter().enumerate().all(|(i, &m)| {
        let mut fields: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in ifd.entries.iter().filter(|e| e.reader == MEMBERS[m]) {
            fields.entry(&e.field).or_default().push(&e.writer);
        }
        fields.values().all(|ws| members[..i].iter().any(|&p| ws.contains(&MEMBERS[p])))
    })
}
