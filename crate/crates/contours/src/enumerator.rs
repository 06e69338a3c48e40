//! Independent brute-force oracle: enumerate contours on explicit (truncated)
//! trees two ways — by the minimal-cut-set definition and via the bijection
//! with finite root-containing subtrees — and cross-check them.
//!
//! A component of a truncated tree counts as infinite exactly when it
//! contains an open end.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tree_core::{contract_independent_paths, ExplicitTree, VertexId};

/// An edge set together with the interior it isolates. Edges are identified
/// by their child endpoint and kept sorted; contours are equal iff their edge
/// sets are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Contour {
    pub edges: Vec<VertexId>,
    pub interior: Vec<VertexId>,
}

/// Default size cap for the direct edge-subset search in [`cross_check`].
pub const DIRECT_SEARCH_CAP: usize = 6;

/// Depth such that every contour of size <= `n` on a tree whose contraction
/// has all vertices with at least `min_children` children and contracted edge
/// lengths at most `max_edge_len` lies strictly inside the truncation:
/// `floor((n-1)/(min_children-1)) * max_edge_len + 1`.
///
/// `min_children < 2` after contraction means the tree has an infinite
/// independent path and no finite depth suffices.
pub fn depth_bound(min_children: usize, max_edge_len: usize, n: usize) -> Result<usize> {
    if min_children < 2 {
        return Err(Error::Precondition(
            "min children < 2 after contraction: infinite independent path".into(),
        ));
    }
    assert!(n >= 1 && max_edge_len >= 1);
    Ok(((n - 1) / (min_children - 1)) * max_edge_len + 1)
}

/// Tests whether `edges` is a contour: removing them leaves exactly one
/// finite component, and removing any proper subset leaves none. Returns the
/// interior (the finite component) when true.
pub fn is_contour(tree: &ExplicitTree, edges: &[VertexId]) -> Option<Vec<VertexId>> {
    let mut cut = edges.to_vec();
    cut.sort_unstable();
    cut.dedup();
    if cut.len() != edges.len() || cut.iter().any(|&e| e == tree.root() || e >= tree.len()) {
        return None;
    }
    let interior = unique_finite_component(tree, &cut)?;
    // Minimality: restoring any single edge must destroy every finite
    // component.
    for skip in 0..cut.len() {
        let reduced: Vec<VertexId> =
            cut.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &e)| e).collect();
        if unique_finite_component_exists(tree, &reduced) {
            return None;
        }
    }
    Some(interior)
}

fn components(tree: &ExplicitTree, cut: &[VertexId]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; tree.len()];
    let mut is_cut = vec![false; tree.len()];
    for &e in cut {
        is_cut[e] = true;
    }
    let mut next = 0;
    for start in 0..tree.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = next;
        next += 1;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            if comp[v] != usize::MAX {
                continue;
            }
            comp[v] = id;
            if !is_cut[v] {
                if let Some(p) = tree.parent(v) {
                    stack.push(p);
                }
            }
            for &c in tree.children(v) {
                if !is_cut[c] {
                    stack.push(c);
                }
            }
        }
    }
    comp
}

fn finite_components(tree: &ExplicitTree, cut: &[VertexId]) -> Vec<Vec<VertexId>> {
    let comp = components(tree, cut);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut infinite = vec![false; ncomp];
    for v in 0..tree.len() {
        if tree.is_open_end(v) {
            infinite[comp[v]] = true;
        }
    }
    let mut members: Vec<Vec<VertexId>> = vec![Vec::new(); ncomp];
    for v in 0..tree.len() {
        if !infinite[comp[v]] {
            members[comp[v]].push(v);
        }
    }
    members.into_iter().filter(|m| !m.is_empty()).collect()
}

fn unique_finite_component(tree: &ExplicitTree, cut: &[VertexId]) -> Option<Vec<VertexId>> {
    let mut finite = finite_components(tree, cut);
    if finite.len() == 1 {
        finite.pop()
    } else {
        None
    }
}

fn unique_finite_component_exists(tree: &ExplicitTree, cut: &[VertexId]) -> bool {
    !finite_components(tree, cut).is_empty()
}

/// Fast check that `edges` is a contour whose interior contains the root.
/// `subtree_open[v]` must say whether the subtree of `v` contains an open
/// end. Returns the interior.
pub fn is_root_contour(
    tree: &ExplicitTree,
    edges: &[VertexId],
    subtree_open: &[bool],
) -> Option<Vec<VertexId>> {
    let mut is_cut = vec![false; tree.len()];
    for &e in edges {
        if e == tree.root() || is_cut[e] {
            return None;
        }
        is_cut[e] = true;
    }
    let mut interior = Vec::new();
    let mut boundary = 0usize;
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        if tree.is_open_end(v) {
            return None; // root component is infinite
        }
        interior.push(v);
        for &c in tree.children(v) {
            if is_cut[c] {
                boundary += 1;
                // the severed side must be infinite, else a second finite
                // component appears (and minimality would fail)
                if !subtree_open[c] {
                    return None;
                }
            } else {
                stack.push(c);
            }
        }
    }
    if boundary != edges.len() {
        return None; // some cut edge dangles outside the root component
    }
    interior.sort_unstable();
    Some(interior)
}

fn min_internal_children(contracted: &ExplicitTree) -> usize {
    (0..contracted.len())
        .filter(|&v| v != contracted.root() && !contracted.is_open_end(v))
        .map(|v| contracted.children(v).len())
        .min()
        .unwrap_or(2)
        .max(2)
}

/// Enumerates all contours of size <= `n_max` whose interior contains the
/// root, by depth-first frontier extension over finite root-containing
/// subtrees. `rooted_only` keeps only contours containing an edge incident
/// with the root.
///
/// The truncation must be deep enough for the answer to be exact: every open
/// end must lie at depth >= the bound computed from the contracted tree.
pub fn enumerate_contours(
    tree: &ExplicitTree,
    n_max: usize,
    rooted_only: bool,
) -> Result<BTreeMap<usize, Vec<Contour>>> {
    assert!(n_max >= 1);
    if !tree.is_leafless() {
        return Err(Error::Precondition(
            "tree has a non-open-end leaf; contours are defined on leafless trees".into(),
        ));
    }
    let (ct, _) = contract_independent_paths(tree)?;
    let r = min_internal_children(&ct.tree);
    let l_max = ct.max_edge_length();
    let mut required = depth_bound(r, l_max, n_max)?;
    if ct.tree.children(ct.tree.root()).len() < r {
        // the root may sit in the interior with fewer children than r,
        // allowing one extra interior vertex
        required += l_max;
    }
    if let Some(actual) = tree.min_open_depth() {
        if actual < required {
            return Err(Error::TruncationTooShallow { required, actual });
        }
    }
    Ok(group_by_size(enumerate_unchecked(tree, n_max), rooted_only, tree))
}

fn group_by_size(
    contours: Vec<Contour>,
    rooted_only: bool,
    tree: &ExplicitTree,
) -> BTreeMap<usize, Vec<Contour>> {
    let mut by_size: BTreeMap<usize, Vec<Contour>> = BTreeMap::new();
    for c in contours {
        if rooted_only && !c.edges.iter().any(|&e| tree.parent(e) == Some(tree.root())) {
            continue;
        }
        by_size.entry(c.edges.len()).or_default().push(c);
    }
    for group in by_size.values_mut() {
        group.sort();
    }
    by_size
}

/// Frontier-extension search without the truncation-depth precondition.
/// Each finite root-containing subtree with boundary <= `n_max` yields
/// exactly one contour.
pub(crate) fn enumerate_unchecked(tree: &ExplicitTree, n_max: usize) -> Vec<Contour> {
    if tree.is_open_end(tree.root()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut frontier: Vec<VertexId> = tree.children(tree.root()).to_vec();
    let mut cut: Vec<VertexId> = Vec::new();
    let mut interior: Vec<VertexId> = vec![tree.root()];
    extend(tree, n_max, &mut frontier, 0, &mut cut, &mut interior, &mut out);
    out
}

fn extend(
    tree: &ExplicitTree,
    n_max: usize,
    frontier: &mut Vec<VertexId>,
    pos: usize,
    cut: &mut Vec<VertexId>,
    interior: &mut Vec<VertexId>,
    out: &mut Vec<Contour>,
) {
    // every remaining frontier vertex contributes at least one boundary edge
    if cut.len() + (frontier.len() - pos) > n_max {
        return;
    }
    if pos == frontier.len() {
        let mut edges = cut.clone();
        edges.sort_unstable();
        let mut inside = interior.clone();
        inside.sort_unstable();
        out.push(Contour { edges, interior: inside });
        return;
    }
    let v = frontier[pos];
    // close v into the boundary
    cut.push(v);
    extend(tree, n_max, frontier, pos + 1, cut, interior, out);
    cut.pop();
    // or expand v into the interior
    if !tree.is_open_end(v) {
        let added = tree.children(v).len();
        frontier.extend_from_slice(tree.children(v));
        interior.push(v);
        extend(tree, n_max, frontier, pos + 1, cut, interior, out);
        interior.pop();
        frontier.truncate(frontier.len() - added);
    }
}

/// Direct search over antichains of edges, validated by [`is_contour`] and
/// filtered to interiors containing the root. Doubly exponential; exists to
/// validate the subtree-boundary bijection at tiny sizes.
pub(crate) fn direct_enumerate(
    tree: &ExplicitTree,
    n_max: usize,
) -> BTreeMap<usize, Vec<Contour>> {
    let edges: Vec<VertexId> = tree.edges().collect();
    let mut chosen: Vec<VertexId> = Vec::new();
    let mut chosen_mark = vec![false; tree.len()];
    let mut out = Vec::new();
    direct_rec(tree, &edges, 0, n_max, &mut chosen, &mut chosen_mark, &mut out);
    group_by_size(out, false, tree)
}

fn direct_rec(
    tree: &ExplicitTree,
    edges: &[VertexId],
    idx: usize,
    n_max: usize,
    chosen: &mut Vec<VertexId>,
    mark: &mut [bool],
    out: &mut Vec<Contour>,
) {
    if idx == edges.len() {
        return;
    }
    // skip edges[idx]
    direct_rec(tree, edges, idx + 1, n_max, chosen, mark, out);
    if chosen.len() == n_max {
        return;
    }
    // edges of a contour are pairwise incomparable: reject if an ancestor is
    // already chosen (descendants cannot be chosen yet: ids ascend with BFS
    // depth)
    let e = edges[idx];
    let mut up = tree.parent(e);
    while let Some(p) = up {
        if mark[p] {
            return;
        }
        up = tree.parent(p);
    }
    chosen.push(e);
    mark[e] = true;
    if let Some(interior) = is_contour(tree, chosen) {
        if interior.binary_search(&tree.root()).is_ok() {
            let mut edges_sorted = chosen.clone();
            edges_sorted.sort_unstable();
            out.push(Contour { edges: edges_sorted, interior });
        }
    }
    direct_rec(tree, edges, idx + 1, n_max, chosen, mark, out);
    mark[e] = false;
    chosen.pop();
}

/// Per-size counts from both enumeration methods.
#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    pub subtree_counts: BTreeMap<usize, usize>,
    pub direct_counts: BTreeMap<usize, usize>,
    /// Largest size the direct method was run at.
    pub direct_cap: usize,
}

/// Runs the subtree-boundary enumeration and the direct edge-subset search
/// (the latter capped at `direct_cap`, default [`DIRECT_SEARCH_CAP`]) and
/// compares the contour multisets size by size.
pub fn cross_check(
    tree: &ExplicitTree,
    n_max: usize,
    direct_cap: Option<usize>,
) -> Result<CrossCheckReport> {
    let cap = direct_cap.unwrap_or(DIRECT_SEARCH_CAP).min(n_max);
    let by_subtree = enumerate_contours(tree, n_max, false)?;
    let by_direct = direct_enumerate(tree, cap);
    for n in 1..=cap {
        let a = by_subtree.get(&n).map_or(&[][..], Vec::as_slice);
        let b = by_direct.get(&n).map_or(&[][..], Vec::as_slice);
        if a != b {
            let first = a.iter().zip(b.iter()).find(|(x, y)| x != y);
            let (left, right) = match first {
                Some((x, y)) => (format!("{:?}", x.edges), format!("{:?}", y.edges)),
                None => (format!("{} contours", a.len()), format!("{} contours", b.len())),
            };
            return Err(Error::Mismatch { n, left, right });
        }
    }
    Ok(CrossCheckReport {
        subtree_counts: by_subtree.iter().map(|(&n, v)| (n, v.len())).collect(),
        direct_counts: by_direct.iter().map(|(&n, v)| (n, v.len())).collect(),
        direct_cap: cap,
    })
}

/// Per-size counts only, as exact integers are not needed for oracle sizes.
pub fn size_counts(by_size: &BTreeMap<usize, Vec<Contour>>) -> BTreeMap<usize, usize> {
    by_size.iter().map(|(&n, v)| (n, v.len())).collect()
}
