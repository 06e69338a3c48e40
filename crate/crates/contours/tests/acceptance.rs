//! End-to-end acceptance suite: formula-vs-oracle equivalence and property
//! checks, one test per criterion, each printing a pass line on success.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::Zero;

use contours::counters::{
    bound_bollobas, bounds_dary, count_dary, count_dary_upto, count_grammar, count_regular,
    count_regular_upto, count_rooted_dary_upto, count_rooted_regular_upto, dary_report, Count,
};
use contours::enumerator::{enumerate_contours, is_root_contour, size_counts};
use contours::peierls::{critical_activity_bound, estimate_growth_rate};
use contours::series_engine::{lagrange_dary_coefficient, solve_dary_fixed_point};
use contours::structure_analyzer::{
    infinitely_many_sizes, verify_path_product_identity,
};
use contours::tree_core::{
    binarize, expand_grammar, subdivide_uniform, ExplicitTree, TreeGrammar,
    DEFAULT_VERTEX_BUDGET,
};
use contours::Error;

fn grammar(json: &str) -> TreeGrammar {
    TreeGrammar::from_json(json).unwrap()
}

/// Expands `g` just deep enough that size-`n_max` enumeration is exact.
fn expand_for(g: &TreeGrammar, n_max: usize) -> ExplicitTree {
    let mut depth = 2;
    loop {
        let tree = expand_grammar(g, depth, DEFAULT_VERTEX_BUDGET).unwrap();
        match enumerate_contours(&tree, n_max, false) {
            Ok(_) => return tree,
            Err(Error::TruncationTooShallow { required, .. }) => depth = required,
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
}

fn enumerated_counts(g: &TreeGrammar, n_max: usize, rooted: bool) -> BTreeMap<usize, usize> {
    let tree = expand_for(g, n_max);
    size_counts(&enumerate_contours(&tree, n_max, rooted).unwrap())
}

#[test]
fn criterion_01_binary_catalan_agreement() {
    let all = count_dary_upto(2, 300);
    for n in 2..=300usize {
        let catalan = binomial(BigInt::from(2 * n - 2), BigInt::from(n - 1)) / BigInt::from(n);
        assert_eq!(all[n], catalan, "closed form vs Catalan at n={n}");
        assert_eq!(all[n], count_dary(2, n));
    }
    let tree = expand_grammar(&TreeGrammar::dary(2), 12, DEFAULT_VERTEX_BUDGET).unwrap();
    let enumerated = size_counts(&enumerate_contours(&tree, 12, false).unwrap());
    for n in 2..=12usize {
        let brute = BigInt::from(enumerated.get(&n).copied().unwrap_or(0));
        assert_eq!(all[n], brute, "closed form vs enumeration at n={n}");
    }
    println!("criterion 1: PASS - binary counts match Catalan closed form (n<=300) and brute force (n<=12)");
}

#[test]
fn criterion_02_dary_closed_form_vs_recurrence_vs_oracle() {
    for d in 2..=5usize {
        let series = solve_dary_fixed_point(d, 200);
        for n in 2..=200usize {
            assert_eq!(
                *series.coeff(n),
                lagrange_dary_coefficient(d, n),
                "series vs closed form d={d} n={n}"
            );
            if (n - 1) % (d - 1) != 0 {
                assert!(series.coeff(n).is_zero(), "vanishing pattern d={d} n={n}");
            }
        }
        let n_max = if d == 2 { 12 } else { 10 };
        let enumerated = enumerated_counts(&TreeGrammar::dary(d), n_max, false);
        for n in 1..=n_max {
            let brute = BigInt::from(enumerated.get(&n).copied().unwrap_or(0));
            assert_eq!(count_dary(d, n), brute, "formula vs oracle d={d} n={n}");
        }
    }
    println!("criterion 2: PASS - d-ary closed form, fixed point and oracle agree for d in 2..=5");
}

#[test]
fn criterion_03_regular_tree_convolution() {
    for k in 3..=5usize {
        let series = count_regular_upto(k, 300);
        for n in 1..=300usize {
            assert_eq!(series[n], count_regular(k, n), "convolution vs series k={k} n={n}");
        }
        let enumerated = enumerated_counts(&TreeGrammar::regular(k), 10, false);
        for n in 1..=10usize {
            let brute = BigInt::from(enumerated.get(&n).copied().unwrap_or(0));
            assert_eq!(count_regular(k, n), brute, "formula vs oracle k={k} n={n}");
        }
    }
    println!("criterion 3: PASS - regular-tree convolution matches series (n<=300) and oracle (n<=10)");
}

#[test]
fn criterion_04_rooted_counts() {
    for d in 2..=3usize {
        let rooted = count_rooted_dary_upto(d, 10);
        let enumerated = enumerated_counts(&TreeGrammar::dary(d), 10, true);
        for n in 1..=10usize {
            let brute = BigInt::from(enumerated.get(&n).copied().unwrap_or(0));
            assert_eq!(rooted[n], brute, "rooted d-ary vs oracle d={d} n={n}");
            if n < d {
                assert!(rooted[n].is_zero(), "rooted count must vanish for n < d");
            }
        }
    }
    for k in 3..=4usize {
        let rooted = count_rooted_regular_upto(k, 10);
        let enumerated = enumerated_counts(&TreeGrammar::regular(k), 10, true);
        for n in 1..=10usize {
            let brute = BigInt::from(enumerated.get(&n).copied().unwrap_or(0));
            assert_eq!(rooted[n], brute, "rooted regular vs oracle k={k} n={n}");
        }
    }
    println!("criterion 4: PASS - rooted series subtraction matches root-incidence-filtered enumeration");
}

fn extremality_corpus() -> Vec<TreeGrammar> {
    vec![
        TreeGrammar::dary(2),
        TreeGrammar::dary(3),
        TreeGrammar::dary(4),
        grammar(r#"{"root":"R","classes":{"R":["A","A"],"A":["A","A","A"]}}"#),
        grammar(r#"{"root":"R","classes":{"R":["A","A","A"],"A":["A","A"]}}"#),
        grammar(r#"{"root":"R","classes":{"R":["A","B"],"A":["A","A"],"B":["B","B","B"]}}"#),
        grammar(r#"{"root":"R","classes":{"R":["A","A"],"A":["B","B"],"B":["A","A","A"]}}"#),
        grammar(r#"{"root":"R","classes":{"R":["A","A","A","A"],"A":["A","A"]}}"#),
        grammar(r#"{"root":"R","classes":{"R":["A","B"],"A":["B","A"],"B":["A","A","B"]}}"#),
        grammar(r#"{"root":"R","classes":{"R":["B","B"],"B":["B","B","B","B"]}}"#),
        grammar(r#"{"root":"R","classes":{"R":["A","A"],"A":["R","A","A"]}}"#),
    ]
}

#[test]
fn criterion_05_extremality_and_binarize_minor() {
    let catalan = count_dary_upto(2, 20);
    for g in extremality_corpus() {
        let report = count_grammar(&g, 20).unwrap();
        for n in 1..=20usize {
            match &report.counts[&n] {
                Count::Finite(c) => {
                    assert!(*c <= catalan[n], "extremality fails for {} at n={n}", g.to_json())
                }
                Count::Infinite => panic!("corpus grammars have no infinite sizes"),
            }
        }
        // the binarize image of every contour is a contour of the binarized
        // tree, same size, injectively
        let tree = expand_for(&g, 8);
        let (bin, map) = binarize(&tree).unwrap();
        let subtree_open = bin.subtree_has_open_end();
        let by_size = enumerate_contours(&tree, 8, false).unwrap();
        let mut images: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut total = 0usize;
        for group in by_size.values() {
            for c in group {
                let mapped: Vec<usize> =
                    c.edges.iter().map(|&e| map.edge_map[e].unwrap()).collect();
                let interior = is_root_contour(&bin, &mapped, &subtree_open);
                assert!(interior.is_some(), "image must be a contour of the binarized tree");
                assert_eq!(mapped.len(), c.edges.len(), "image has equal size");
                let mut key = mapped;
                key.sort_unstable();
                images.insert(key);
                total += 1;
            }
        }
        assert_eq!(images.len(), total, "binarize image must be injective on contours");
    }
    println!("criterion 5: PASS - extremality vs the binary tree (n<=20) and injective binarize minor images (n<=8) on an 11-grammar corpus");
}

#[test]
fn criterion_06_bounds() {
    for d in 2..=4usize {
        let all = count_dary_upto(d, 200);
        for n in 2..=200usize {
            if (n - 1) % (d - 1) != 0 {
                continue;
            }
            let (lower, upper) = bounds_dary(d, n).unwrap();
            let count = BigRational::from(all[n].clone());
            assert!(lower <= count, "lower bound fails d={d} n={n}");
            assert!(count <= upper, "upper bound fails d={d} n={n}");
        }
    }
    // the set-pair binomial bound dominates enumerated counts whenever every
    // vertex has at least r children
    let cases: Vec<(usize, TreeGrammar)> = vec![
        (2, TreeGrammar::dary(2)),
        (2, grammar(r#"{"root":"R","classes":{"R":["A","B"],"A":["A","A"],"B":["A","B","B"]}}"#)),
        (3, TreeGrammar::dary(3)),
        (3, grammar(r#"{"root":"R","classes":{"R":["A","A","A"],"A":["A","R","A","A"]}}"#)),
    ];
    for (r, g) in cases {
        let enumerated = enumerated_counts(&g, 12, false);
        for n in 1..=12usize {
            let count = BigInt::from(enumerated.get(&n).copied().unwrap_or(0));
            assert!(
                count <= bound_bollobas(r, n),
                "binomial bound fails for {} at r={r} n={n}",
                g.to_json()
            );
        }
    }
    println!("criterion 6: PASS - d-ary sandwich bounds (d<=4, n<=200) and binomial bound domination (r in {{2,3}}, n<=12)");
}

#[test]
fn criterion_07_contraction_identity() {
    let bases: Vec<(TreeGrammar, usize, usize)> = vec![
        (TreeGrammar::dary(2), 8, 1),
        (TreeGrammar::dary(2), 8, 2),
        (TreeGrammar::dary(3), 8, 1),
        (TreeGrammar::regular(3), 8, 1),
        (grammar(r#"{"root":"R","classes":{"R":["A","A"],"A":["A","A","A"]}}"#), 8, 1),
        (grammar(r#"{"root":"R","classes":{"R":["A","A","A"],"A":["A","A"]}}"#), 8, 2),
    ];
    for (g, depth, extra) in bases {
        let base = expand_grammar(&g, depth, DEFAULT_VERTEX_BUDGET).unwrap();
        let t = subdivide_uniform(&base, extra);
        let report = verify_path_product_identity(&t, 8).unwrap();
        assert!(
            report.ok,
            "path-product identity fails for {} subdivided by {extra}: {:?}",
            g.to_json(),
            report.per_size
        );
    }
    println!("criterion 7: PASS - sum of contracted-edge-length products equals the direct count on 6 subdivided trees (n<=8)");
}

#[test]
fn criterion_08_finiteness_decisions() {
    let budget = DEFAULT_VERTEX_BUDGET;
    let z = grammar(r#"{"root":"R","classes":{"R":["P","P"],"P":["P"]}}"#);
    let report = infinitely_many_sizes(&z, 6, budget).unwrap();
    assert!(report.has_infinite_path);
    assert_eq!(report.infinite_sizes_found, vec![2], "the two-ray tree is infinite exactly at size 2");
    assert!(!report.infinitely_many_sizes);

    let ray = grammar(r#"{"root":"R","classes":{"R":["P"],"P":["P"]}}"#);
    let report = infinitely_many_sizes(&ray, 6, budget).unwrap();
    assert_eq!(report.infinite_sizes_found, vec![1], "a single ray is infinite exactly at size 1");
    assert!(!report.infinitely_many_sizes);

    let comb = grammar(r#"{"root":"C","classes":{"C":["C","L"],"L":["L"]}}"#);
    let report = infinitely_many_sizes(&comb, 6, budget).unwrap();
    assert!(report.has_infinite_path);
    assert!(report.infinitely_many_sizes, "the comb has unboundedly many branch vertices");

    let report = infinitely_many_sizes(&TreeGrammar::dary(2), 6, budget).unwrap();
    assert!(!report.has_infinite_path);
    assert!(!report.infinitely_many_sizes);
    assert!(report.infinite_sizes_found.is_empty());
    println!("criterion 8: PASS - finiteness verdicts for the two-ray, single-ray, comb and binary trees");
}

#[test]
fn criterion_09_growth_diagnostics() {
    let counts = dary_report(2, 500, false);
    let rate = estimate_growth_rate(&counts, 500).unwrap();
    assert!((rate - 4.0).abs() / 4.0 < 0.01, "growth estimate {rate} not within 1% of 4");
    let bound = critical_activity_bound(2, 64);
    assert!(bound < BigRational::new(BigInt::from(1), BigInt::from(4)));
    assert!(bound > BigRational::new(BigInt::from(18), BigInt::from(100)));
    println!("criterion 9: PASS - binary growth rate {rate:.4} within 1% of 4; certified activity bound below 1/4");
}

#[test]
fn criterion_10_cli_integration() {
    let bin = env!("CARGO_BIN_EXE_contours");
    let ok = Command::new(bin)
        .args(["verify", "--family", "dary:2", "--n-max", "10"])
        .output()
        .unwrap();
    assert!(ok.status.success(), "verify must exit 0: {}", String::from_utf8_lossy(&ok.stderr));

    let corrupted = Command::new(bin)
        .args([
            "verify", "--family", "dary:2", "--n-max", "10",
            "--expect", r#"{"4":"6"}"#,
        ])
        .output()
        .unwrap();
    assert_eq!(corrupted.status.code(), Some(5), "corrupted expectation must exit 5");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"root":"A","classes":{"A":[]}}"#).unwrap();
    let schema = Command::new(bin)
        .args(["count", "--grammar", bad.to_str().unwrap(), "--n-max", "3"])
        .output()
        .unwrap();
    assert_eq!(schema.status.code(), Some(3), "schema violation must exit 3");

    let run = || {
        Command::new(bin)
            .args(["count", "--family", "dary:3", "--n-max", "12"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reports must be byte-identical across runs");
    println!("criterion 10: PASS - CLI verify/exit codes and deterministic output");
}
