//! Property-based tests: series ring laws, minor-construction round trips,
//! and structural invariants of enumerated contours.

use num_bigint::BigInt;
use proptest::prelude::*;

use contours::enumerator::{enumerate_contours, is_contour, size_counts};
use contours::series_engine::IntSeries;
use contours::tree_core::{
    binarize, contract_independent_paths, expand_grammar, subdivide, subdivide_uniform,
    TreeGrammar, DEFAULT_VERTEX_BUDGET,
};

const ORDER: usize = 12;

fn series() -> impl Strategy<Value = IntSeries> {
    prop::collection::vec(-6i64..=6, ORDER + 1).prop_map(|mut v| {
        v[0] = 0; // all series here have zero constant term
        IntSeries::from_coeffs(v.into_iter().map(BigInt::from).collect())
    })
}

/// A random grammar over classes c0..c{k-1} where every class has 2 or 3
/// children, so generated trees are leafless with no independent paths.
fn branching_grammar() -> impl Strategy<Value = TreeGrammar> {
    (2usize..=4).prop_flat_map(|k| {
        prop::collection::vec(prop::collection::vec(0..k, 2..=3), k).prop_map(move |rows| {
            let classes = rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    (format!("c{i}"), row.iter().map(|j| format!("c{j}")).collect())
                })
                .collect();
            TreeGrammar::new("c0", classes).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_commutes(a in series(), b in series()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn multiplication_distributes(a in series(), b in series(), c in series()) {
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn multiplication_associates(a in series(), b in series(), c in series()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pow_is_repeated_multiplication(a in series(), e in 1u32..=4) {
        let mut expected = a.clone();
        for _ in 1..e {
            expected = expected.mul(&a).unwrap();
        }
        prop_assert_eq!(a.pow(e), expected);
    }

    #[test]
    fn contract_subdivide_round_trip(g in branching_grammar(), extra in 1usize..=3) {
        let base = expand_grammar(&g, 5, DEFAULT_VERTEX_BUDGET).unwrap();
        let t = subdivide_uniform(&base, extra);
        let (ct, _) = contract_independent_paths(&t).unwrap();
        // contracting undoes the uniform subdivision
        prop_assert_eq!(ct.tree.len(), base.len());
        for v in 0..base.len() {
            prop_assert_eq!(ct.tree.children(v), base.children(v));
        }
        // and subdividing the contraction recovers the subdivided tree size
        prop_assert_eq!(subdivide(&ct).len(), t.len());
    }

    #[test]
    fn binarized_tree_is_binary_with_same_open_ends(g in branching_grammar()) {
        let t = expand_grammar(&g, 4, DEFAULT_VERTEX_BUDGET).unwrap();
        let (bin, map) = binarize(&t).unwrap();
        let opens = (0..t.len()).filter(|&v| t.is_open_end(v)).count();
        let bin_opens = (0..bin.len()).filter(|&v| bin.is_open_end(v)).count();
        prop_assert_eq!(opens, bin_opens);
        for v in 0..bin.len() {
            let c = bin.children(v).len();
            prop_assert!(c == 0 || c == 2, "vertex {} has {} children", v, c);
        }
        // every original edge has a distinct image edge
        let mut images: Vec<_> = t.edges().map(|e| map.edge_map[e].unwrap()).collect();
        images.sort_unstable();
        images.dedup();
        prop_assert_eq!(images.len(), t.len() - 1);
    }

    #[test]
    fn enumerated_contours_validate_and_nest(g in branching_grammar()) {
        let t = expand_grammar(&g, 6, DEFAULT_VERTEX_BUDGET).unwrap();
        let by_size = enumerate_contours(&t, 6, false).unwrap();
        for group in by_size.values() {
            for c in group {
                let interior = is_contour(&t, &c.edges);
                prop_assert_eq!(interior.as_deref(), Some(&c.interior[..]));
                prop_assert!(c.interior.contains(&t.root()));
            }
        }
        // rooted counts never exceed unrooted counts
        let rooted = size_counts(&enumerate_contours(&t, 6, true).unwrap());
        for (n, total) in size_counts(&by_size) {
            prop_assert!(rooted.get(&n).copied().unwrap_or(0) <= total);
        }
    }
}
