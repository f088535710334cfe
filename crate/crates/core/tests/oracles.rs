//! Lattice enumeration against independent brute-force computations.

use std::collections::BTreeSet;

use dedekind_core::lattice::all_subgroups;
use dedekind_core::verify::{build_corpus, CorpusConfig};
use dedekind_core::{FiniteGroup, Limits};

/// Every subset containing the identity that is closed under
/// multiplication, as bit masks.
fn closed_subsets(g: &FiniteGroup) -> BTreeSet<u32> {
    let n = g.order();
    assert!(n <= 24);
    let table = g.table();
    let mut out = BTreeSet::new();
    for rest in 0u32..(1 << (n - 1)) {
        let mask = (rest << 1) | 1;
        let closed = (0..n).filter(|&a| mask >> a & 1 == 1).all(|a| {
            (0..n)
                .filter(|&b| mask >> b & 1 == 1)
                .all(|b| mask >> table[a * n + b] & 1 == 1)
        });
        if closed {
            out.insert(mask);
        }
    }
    out
}

fn mask_of(members: impl Iterator<Item = usize>) -> u32 {
    members.fold(0, |m, x| m | 1 << x)
}

fn conjugate_mask(g: &FiniteGroup, mask: u32, x: usize) -> u32 {
    mask_of(
        (0..g.order())
            .filter(|&y| mask >> y & 1 == 1)
            .map(|y| g.conjugate(x, y)),
    )
}

fn small_corpus() -> Vec<(String, FiniteGroup)> {
    build_corpus(&CorpusConfig::default())
        .entries
        .into_iter()
        .filter(|e| e.group.order() <= 24)
        .map(|e| (e.name, e.group))
        .collect()
}

#[test]
fn subgroups_match_closed_subsets() {
    let groups = small_corpus();
    assert!(groups.len() >= 30);
    for (name, g) in groups {
        let l = all_subgroups(&g, &Limits::default()).unwrap();
        let enumerated: BTreeSet<u32> = l
            .subgroups()
            .iter()
            .map(|h| mask_of(h.members().iter()))
            .collect();
        assert_eq!(enumerated.len(), l.len(), "{name}: duplicate subgroups");
        assert_eq!(enumerated, closed_subsets(&g), "{name}");
    }
}

#[test]
fn classes_match_conjugation_by_every_element() {
    for (name, g) in small_corpus() {
        let l = all_subgroups(&g, &Limits::default()).unwrap();
        let masks: Vec<u32> = l
            .subgroups()
            .iter()
            .map(|h| mask_of(h.members().iter()))
            .collect();
        for (i, &m) in masks.iter().enumerate() {
            let orbit: BTreeSet<u32> = (0..g.order()).map(|x| conjugate_mask(&g, m, x)).collect();
            let class: BTreeSet<u32> = l.conjugacy_classes()[l.class_of(i)]
                .iter()
                .map(|&j| masks[j])
                .collect();
            assert_eq!(orbit, class, "{name}: class of subgroup {i}");
            let normalizer = (0..g.order())
                .filter(|&x| conjugate_mask(&g, m, x) == m)
                .count();
            assert_eq!(
                orbit.len() * normalizer,
                g.order(),
                "{name}: orbit-stabilizer at {i}"
            );
            assert_eq!(l.is_normal(i), orbit.len() == 1);
        }
        assert_eq!(
            l.class_count(),
            l.normal_subgroup_count() + l.nu(),
            "{name}"
        );
    }
}

#[test]
fn hasse_edges_are_covering_pairs() {
    for (name, g) in small_corpus() {
        let l = all_subgroups(&g, &Limits::default()).unwrap();
        let masks: Vec<u32> = l
            .subgroups()
            .iter()
            .map(|h| mask_of(h.members().iter()))
            .collect();
        let sub = |a: usize, b: usize| masks[a] & masks[b] == masks[a];
        let mut covers = Vec::new();
        for a in 0..masks.len() {
            for b in 0..masks.len() {
                if a != b
                    && sub(a, b)
                    && !(0..masks.len()).any(|c| c != a && c != b && sub(a, c) && sub(c, b))
                {
                    covers.push((a, b));
                }
            }
        }
        covers.sort_unstable();
        assert_eq!(l.hasse_edges(), covers, "{name}");
        let maximal: Vec<usize> = covers
            .iter()
            .filter(|e| e.1 == l.top())
            .map(|e| e.0)
            .collect();
        assert_eq!(l.maximal_subgroups(), maximal, "{name}");
    }
}

#[test]
fn corpus_tables_are_groups() {
    let corpus = build_corpus(&CorpusConfig::default());
    for e in &corpus.entries {
        e.group
            .check_axioms(true)
            .unwrap_or_else(|err| panic!("{}: {err}", e.name));
        assert!(e.group.order() <= corpus.config.max_order);
    }
    let mut names: Vec<&str> = corpus.entries.iter().map(|e| e.name.as_str()).collect();
    let total = names.len();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), total, "corpus names are unique");
}

#[test]
fn corpus_is_deterministic() {
    let a = build_corpus(&CorpusConfig::default());
    let b = build_corpus(&CorpusConfig::default());
    let names = |c: &dedekind_core::verify::Corpus| {
        c.entries.iter().map(|e| e.name.clone()).collect::<Vec<_>>()
    };
    assert_eq!(names(&a), names(&b));
    for name in [
        "D(6)",
        "SD(2,3)",
        "D(8)",
        "D(128)",
        "M(2,4)",
        "M(2,6)",
        "M(3,3)",
        "M(3,4)",
        "He(3)",
        "He(5)",
        "Q(8)",
        "Q(16)",
        "C27Q8",
        "C(2) x He(3)",
        "C(2) x D(8)",
    ] {
        assert!(a.get(name).is_some(), "{name} missing");
    }
}
