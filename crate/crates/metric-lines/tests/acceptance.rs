//! Acceptance gate: nine criteria, each a test printing one PASS line.
//! The shared corpus is every labeled connected graph on 2..=6 vertices
//! plus 1000 random metrics (seeds 1..=1000, 2..=10 points).

use itertools::Itertools;
use once_cell::sync::Lazy;

use metric_lines::catalog::{build_catalog, check_chen_chvatal};
use metric_lines::instances::{builtin, enumerate_connected_graphs, graph_metric, random_metric};
use metric_lines::levels::{audit_structure, build_levels, LevelDecomposition};
use metric_lines::metric::{Pair, PointId};
use metric_lines::ordering::{
    concat_two_components, insert_point, order_component, SidePlacement,
};
use metric_lines::witness::{extract_witness, level_special_lines, WitnessMode};
use metric_lines::Space;

static GRAPHS: Lazy<Vec<Space>> = Lazy::new(|| {
    (2..=6)
        .flat_map(|n| enumerate_connected_graphs(n, false).unwrap())
        .map(|spec| graph_metric(&spec).unwrap())
        .collect()
});

static CORPUS: Lazy<Vec<Space>> = Lazy::new(|| {
    let mut corpus = GRAPHS.clone();
    for seed in 1..=1000u64 {
        let n = 2 + ((seed - 1) % 9) as usize;
        corpus.push(random_metric(n, seed, 10));
    }
    corpus
});

/// Applies `f` to the level decomposition of every line of every corpus
/// instance. Succeeding at all means every duo of generating pairs was
/// classified into exactly one relation kind along the way.
fn for_each_decomposition(mut f: impl FnMut(&Space, &LevelDecomposition)) {
    for space in CORPUS.iter() {
        let catalog = build_catalog(space);
        for (line, members) in catalog.entries() {
            let decomp = build_levels(space, line, members)
                .unwrap_or_else(|e| panic!("classification failed on line {line:?}: {e}"));
            f(space, &decomp);
        }
    }
}

fn endpoints(component: &[Pair]) -> Vec<PointId> {
    let mut pts: Vec<PointId> = component.iter().flat_map(|e| e.points()).collect();
    pts.sort();
    pts.dedup();
    pts
}

#[test]
fn criterion_1_exhaustive_conjecture_check() {
    let mut count = 0;
    for space in GRAPHS.iter() {
        let check = check_chen_chvatal(space);
        assert!(
            check.holds,
            "conjecture fails on a connected graph with n={}",
            space.n()
        );
        count += 1;
    }
    assert_eq!(count, 1 + 4 + 38 + 728 + 26704);
    println!("criterion 1 PASS: conjecture holds on all {count} connected graphs (n = 2..=6)");
}

#[test]
fn criterion_2_classification_totality() {
    let mut duos = 0usize;
    for_each_decomposition(|_, decomp| {
        // build_levels already classified every duo or panicked above;
        // count them via the stored relations.
        let k = decomp.members.len();
        duos += k * (k - 1) / 2;
        for (i, &e) in decomp.members.iter().enumerate() {
            for &f in &decomp.members[i + 1..] {
                assert!(decomp.relation(e, f).is_some());
            }
        }
    });
    println!("criterion 2 PASS: {duos} generating-pair duos all classify into exactly one kind");
}

#[test]
fn criterion_3_ordering_matches_brute_force() {
    let mut components = 0usize;
    for_each_decomposition(|space, decomp| {
        for gl in decomp.green_levels() {
            for comp in &gl.components {
                let pts = endpoints(comp);
                if pts.len() > 8 {
                    continue;
                }
                let ordering = order_component(space, &decomp.line, comp).unwrap();
                let forward = ordering.sequence.points().to_vec();
                let mut reverse = forward.clone();
                reverse.reverse();
                let found: Vec<Vec<PointId>> = pts
                    .iter()
                    .copied()
                    .permutations(pts.len())
                    .filter(|p| space.check_collinear_sequence(p).unwrap())
                    .collect();
                assert_eq!(
                    found.len(),
                    2,
                    "component {comp:?} has {} collinear orderings",
                    found.len()
                );
                assert!(found.contains(&forward) && found.contains(&reverse));
                components += 1;
            }
        }
    });
    println!(
        "criterion 3 PASS: {components} green components each have exactly two collinear \
         orderings, matching order_component"
    );
}

#[test]
fn criterion_4_insertion_uniqueness() {
    let mut insertions = 0usize;
    for_each_decomposition(|space, decomp| {
        for gl in decomp.green_levels() {
            for comp in &gl.components {
                if endpoints(comp).len() > 8 {
                    continue;
                }
                let ordering = order_component(space, &decomp.line, comp).unwrap();
                let seq = ordering.sequence.points();
                for &v in &decomp.line {
                    if seq.contains(&v) {
                        continue;
                    }
                    let brute: Vec<usize> = (0..=seq.len())
                        .filter(|&pos| {
                            let mut cand = seq.to_vec();
                            cand.insert(pos, v);
                            space.check_collinear_sequence(&cand).unwrap()
                        })
                        .collect();
                    assert_eq!(brute.len(), 1, "point {v} has positions {brute:?}");
                    let placement = insert_point(space, &decomp.line, seq, v).unwrap();
                    let expected = match brute[0] {
                        0 => SidePlacement::OutsideLeft,
                        p if p == seq.len() => SidePlacement::OutsideRight,
                        p => SidePlacement::Inside(p),
                    };
                    assert_eq!(placement, expected);
                    insertions += 1;
                }
            }
        }
    });
    println!("criterion 4 PASS: {insertions} point insertions each have exactly one position");
}

#[test]
fn criterion_5_structural_audit() {
    let mut lines = 0usize;
    for_each_decomposition(|space, decomp| {
        let violations = audit_structure(space, decomp);
        assert!(
            violations.is_empty(),
            "audit violations on line {:?}: {violations:?}",
            decomp.line
        );
        lines += 1;
    });
    println!("criterion 5 PASS: structural audit clean on all {lines} lines of the corpus");
}

#[test]
fn criterion_6_special_line_certification() {
    let mut families = 0usize;
    for space in CORPUS.iter() {
        let catalog = build_catalog(space);
        if catalog.universal().is_some() {
            continue;
        }
        for (line, members) in catalog.entries() {
            let decomp = build_levels(space, line, members).unwrap();
            for gl in decomp.green_levels() {
                // Construction verifies the excluded opening is off each
                // special line and runs the outside-point exclusion audit.
                let family = level_special_lines(space, &decomp, gl.k).unwrap();
                for (i, a) in family.lines.iter().enumerate() {
                    for b in &family.lines[i + 1..] {
                        assert_ne!(a, b, "duplicate special lines on {line:?}");
                    }
                }
                if !family.lines.is_empty() {
                    families += 1;
                }
            }
        }
    }
    println!("criterion 6 PASS: {families} special-line families certified across the corpus");
}

#[test]
fn criterion_7_two_component_concatenation() {
    // Levels with two or more green components are rare; widen the random
    // entry range and point count beyond the shared corpus so the check is
    // not vacuous. Components sharing an endpoint cannot concatenate into a
    // sequence of distinct points, so the claim applies to
    // endpoint-disjoint duos only.
    let wide: Vec<Space> = (8..=12)
        .flat_map(|n| (0..400u64).map(move |seed| random_metric(n, seed, 30)))
        .collect();
    let mut duos = 0usize;
    let mut check = |space: &Space, decomp: &LevelDecomposition| {
        for gl in decomp.green_levels() {
            if gl.components.len() < 2 {
                continue;
            }
            let orderings: Vec<_> = gl
                .components
                .iter()
                .map(|comp| order_component(space, &decomp.line, comp).unwrap())
                .collect();
            for (i, c1) in orderings.iter().enumerate() {
                for c2 in &orderings[i + 1..] {
                    let disjoint = c1
                        .sequence
                        .points()
                        .iter()
                        .all(|p| !c2.sequence.contains(*p));
                    if !disjoint {
                        continue;
                    }
                    assert!(
                        concat_two_components(space, c1, c2).unwrap(),
                        "no orientation concatenates {:?} and {:?}",
                        c1.pairs,
                        c2.pairs
                    );
                    duos += 1;
                }
            }
        }
    };
    for_each_decomposition(&mut check);
    for space in &wide {
        let catalog = build_catalog(space);
        for (line, members) in catalog.entries() {
            let decomp = build_levels(space, line, members).unwrap();
            check(space, &decomp);
        }
    }
    assert!(duos > 0, "no endpoint-disjoint same-level component duo found");
    println!("criterion 7 PASS: all {duos} same-level component duos concatenate collinearly");
}

#[test]
fn criterion_8_exact_small_instance_counts() {
    let c5 = check_chen_chvatal(&builtin("C5").unwrap());
    assert_eq!((c5.line_count, c5.universal), (10, false));
    for n in 3..=7 {
        let kn = check_chen_chvatal(&builtin(&format!("K{n}")).unwrap());
        assert_eq!((kn.line_count, kn.universal), (n * (n - 1) / 2, false));
    }
    for name in ["P2", "P3", "P4", "P5", "P6", "P7", "C4", "C6", "C8"] {
        let check = check_chen_chvatal(&builtin(name).unwrap());
        assert!(check.universal, "{name} should have a universal line");
    }
    println!(
        "criterion 8 PASS: C5 and K_n line counts exact; paths and even cycles universal"
    );
}

#[test]
fn criterion_9_witness_soundness() {
    let mut instances = 0usize;
    for space in CORPUS.iter() {
        let catalog = build_catalog(space);
        if catalog.universal().is_some() {
            continue;
        }
        let report = extract_witness(space, WitnessMode::Best).unwrap();
        assert!(report.certified_lower_bound <= report.m);
        for family in &report.families {
            assert!(family.size() <= report.m);
            for (i, a) in family.lines.iter().enumerate() {
                for b in &family.lines[i + 1..] {
                    assert_ne!(a, b, "duplicate lines in a {:?} family", family.kind);
                }
            }
        }
        instances += 1;
    }
    println!(
        "criterion 9 PASS: witness reports sound on all {instances} universal-line-free instances"
    );
}
