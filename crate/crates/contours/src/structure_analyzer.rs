//! Finiteness decision procedures: a grammar tree has infinitely many
//! contours of some size iff it has an infinite independent path, i.e. iff
//! some class reachable from the root heads an endless chain of one-child
//! classes. Also verifies the path-product contraction identity.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::enumerator::{self, depth_bound, enumerate_contours};
use crate::error::Result;
use crate::series_engine::solve_grammar_system;
use crate::tree_core::{
    contract_independent_paths, expand_grammar_tracked, ExplicitTree, TreeGrammar,
};

/// A concrete infinite independent path in a grammar tree: a chain of classes
/// from the root leading into a closed cycle of one-child classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathWitness {
    pub entry_path: Vec<String>,
    pub class_cycle: Vec<String>,
}

/// Whether a given contour size has finite or infinite multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SizeClass {
    Finite(BigInt),
    Infinite,
}

#[derive(Debug, Clone)]
pub struct FinitenessReport {
    pub has_infinite_path: bool,
    pub witness: Option<PathWitness>,
    pub infinitely_many_sizes: bool,
    /// Sizes found to have infinite multiplicity, up to the probe bound.
    pub infinite_sizes_found: Vec<usize>,
    pub probe_bound: usize,
}

/// Default number of sizes probed by [`infinitely_many_sizes`].
pub const DEFAULT_PROBE_BOUND: usize = 8;

/// Classes whose generated subtree is a single infinite path: every class
/// reachable from them (themselves included) has exactly one child.
pub(crate) fn ray_classes(grammar: &TreeGrammar) -> BTreeSet<String> {
    let mut ray: BTreeSet<String> = grammar
        .class_names()
        .filter(|c| grammar.children_of(c).len() == 1)
        .map(String::from)
        .collect();
    loop {
        let drop: Vec<String> = ray
            .iter()
            .filter(|c| !ray.contains(&grammar.children_of(c)[0]))
            .cloned()
            .collect();
        if drop.is_empty() {
            return ray;
        }
        for c in drop {
            ray.remove(&c);
        }
    }
}

/// Longest run of consecutive non-ray one-child classes along any child
/// chain; after contraction no edge expands to more than `result + 1`
/// original edges.
pub(crate) fn max_contracted_edge_length(grammar: &TreeGrammar) -> usize {
    let rays = ray_classes(grammar);
    let chain: BTreeSet<&str> = grammar
        .class_names()
        .filter(|c| grammar.children_of(c).len() == 1 && !rays.contains(*c))
        .collect();
    // the chain classes form a DAG (a one-child cycle would be a ray)
    let mut memo: BTreeMap<String, usize> = BTreeMap::new();
    fn longest(
        c: &str,
        grammar: &TreeGrammar,
        chain: &BTreeSet<&str>,
        memo: &mut BTreeMap<String, usize>,
    ) -> usize {
        if !chain.contains(c) {
            return 0;
        }
        if let Some(&v) = memo.get(c) {
            return v;
        }
        let v = 1 + longest(&grammar.children_of(c)[0], grammar, chain, memo);
        memo.insert(c.to_string(), v);
        v
    }
    let run = grammar
        .class_names()
        .map(|c| longest(c, grammar, &chain, &mut memo))
        .max()
        .unwrap_or(0);
    run + 1
}

/// Reports an infinite independent path when one exists: the witness names a
/// reachable class heading an endless one-child chain, together with the
/// one-child cycle the chain falls into.
pub fn find_infinite_independent_path(grammar: &TreeGrammar) -> Option<PathWitness> {
    let rays = ray_classes(grammar);
    // BFS from the root, remembering the discovery path.
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut queue: std::collections::VecDeque<Vec<String>> = Default::default();
    queue.push_back(vec![grammar.root_class().to_string()]);
    seen.insert(grammar.root_class().to_string());
    while let Some(path) = queue.pop_front() {
        let class = path.last().unwrap().clone();
        if rays.contains(&class) {
            // follow the unique chain until a class repeats: that is the cycle
            let mut chain = path.clone();
            let mut on_chain: BTreeSet<String> = chain.iter().cloned().collect();
            let mut cur = class;
            let cycle_start = loop {
                let next = grammar.children_of(&cur)[0].clone();
                if on_chain.contains(&next) && rays.contains(&next) {
                    break next;
                }
                on_chain.insert(next.clone());
                chain.push(next.clone());
                cur = next;
            };
            let start_idx = chain.iter().position(|c| *c == cycle_start).unwrap();
            return Some(PathWitness {
                entry_path: chain[..start_idx].to_vec(),
                class_cycle: chain[start_idx..].to_vec(),
            });
        }
        for child in grammar.children_of(&class) {
            if seen.insert(child.clone()) {
                let mut next = path.clone();
                next.push(child.clone());
                queue.push_back(next);
            }
        }
    }
    None
}

/// Expands the grammar with every ray-class child replaced by a leaf that may
/// be cut (representing the whole infinite family of cuts along that ray) but
/// never entered. Returns the tree and the set of those ray leaves.
fn expand_with_ray_leaves(
    grammar: &TreeGrammar,
    depth: usize,
    budget: usize,
) -> Result<(ExplicitTree, Vec<bool>)> {
    let rays = ray_classes(grammar);
    let exp = expand_grammar_tracked(grammar, depth, budget, &rays)?;
    Ok((exp.tree, exp.stopped))
}

/// Decides whether size `n` has infinite contour multiplicity: it does iff
/// some contour of size `n` cuts an edge whose expansion is an infinite
/// independent path (any such contour stands for infinitely many, obtained by
/// sliding the cut along the path). Finite sizes are counted exactly, with
/// rays excluded from interiors.
pub fn classify_size(grammar: &TreeGrammar, n: usize, budget: usize) -> Result<SizeClass> {
    grammar.validate()?;
    assert!(n >= 1);
    let rays = ray_classes(grammar);
    let reachable = grammar.reachable_classes();
    if !reachable.iter().any(|c| rays.contains(c)) {
        // restrict to reachable classes so an unreachable ray cannot make the
        // series solver report infinite coefficients
        let restricted = TreeGrammar::new(
            grammar.root_class().to_string(),
            reachable
                .iter()
                .map(|c| (c.clone(), grammar.children_of(c).to_vec()))
                .collect(),
        )?;
        let sol = solve_grammar_system(&restricted, n)?;
        return Ok(SizeClass::Finite(sol[grammar.root_class()].coeff(n).clone()));
    }
    let l_max = max_contracted_edge_length(grammar);
    // one extra contracted step of slack for a root with a single child
    let depth = depth_bound(2, l_max, n)? + l_max;
    let (tree, is_ray) = expand_with_ray_leaves(grammar, depth, budget)?;
    let contours = enumerator::enumerate_unchecked(&tree, n);
    let mut finite_count = BigInt::from(0u32);
    for c in &contours {
        if c.edges.len() != n {
            continue;
        }
        if c.edges.iter().any(|&e| is_ray[e]) {
            return Ok(SizeClass::Infinite);
        }
        finite_count += 1;
    }
    Ok(SizeClass::Finite(finite_count))
}

/// Decides whether infinitely many sizes have infinite multiplicity: true iff
/// the tree has an infinite independent path and vertices of degree at least
/// three recur at unboundedly many depths — on the class graph, some class
/// with two or more children is reachable from a cycle of reachable classes.
pub fn infinitely_many_sizes(
    grammar: &TreeGrammar,
    probe_bound: usize,
    budget: usize,
) -> Result<FinitenessReport> {
    grammar.validate()?;
    let witness = find_infinite_independent_path(grammar);
    let has = witness.is_some();
    let reachable = grammar.reachable_classes();
    let branching_recurs = {
        // classes reachable from a cycle of the reachable class graph
        let on_or_after_cycle: BTreeSet<&String> = reachable
            .iter()
            .filter(|c| reaches(grammar, c, c))
            .collect();
        let mut after: BTreeSet<String> = BTreeSet::new();
        for c in &reachable {
            if on_or_after_cycle.iter().any(|d| reaches(grammar, d, c)) {
                after.insert(c.clone());
            }
        }
        after.iter().any(|c| grammar.children_of(c).len() >= 2)
    };
    let infinite_sizes_found = if has {
        let mut found = Vec::new();
        for n in 1..=probe_bound {
            if classify_size(grammar, n, budget)? == SizeClass::Infinite {
                found.push(n);
            }
        }
        found
    } else {
        Vec::new()
    };
    Ok(FinitenessReport {
        has_infinite_path: has,
        witness,
        infinitely_many_sizes: has && branching_recurs,
        infinite_sizes_found,
        probe_bound,
    })
}

/// True when `to` is reachable from `from` by a nonempty chain of child
/// edges.
fn reaches(grammar: &TreeGrammar, from: &str, to: &str) -> bool {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut stack: Vec<&str> = vec![from];
    while let Some(c) = stack.pop() {
        for child in grammar.children_of(c) {
            if child == to {
                return true;
            }
            if seen.insert(child) {
                stack.push(child);
            }
        }
    }
    false
}

/// Both sides of the contraction identity at one size.
#[derive(Debug, Clone)]
pub struct PathProductReport {
    /// (size, weighted count over the contracted tree, direct count)
    pub per_size: Vec<(usize, BigInt, BigInt)>,
    pub ok: bool,
}

/// Verifies, for every size up to `n`, that the sum over contours of the
/// contracted tree of the product of contracted edge lengths equals the
/// direct contour count of the tree itself.
pub fn verify_path_product_identity(tree: &ExplicitTree, n: usize) -> Result<PathProductReport> {
    let (ct, _) = contract_independent_paths(tree)?;
    let on_contracted = enumerate_contours(&ct.tree, n, false)?;
    let direct = enumerate_contours(tree, n, false)?;
    let mut per_size = Vec::new();
    let mut ok = true;
    for size in 1..=n {
        let mut weighted = BigInt::from(0u32);
        if let Some(group) = on_contracted.get(&size) {
            for c in group {
                let mut prod = BigInt::from(1u32);
                for &e in &c.edges {
                    prod *= BigInt::from(ct.edge_length[e]);
                }
                weighted += prod;
            }
        }
        let count = BigInt::from(direct.get(&size).map_or(0, Vec::len));
        if weighted != count {
            ok = false;
        }
        per_size.push((size, weighted, count));
    }
    Ok(PathProductReport { per_size, ok })
}
