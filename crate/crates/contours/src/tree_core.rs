//! Finite explicit trees, finitely-presented infinite trees, and the two
//! minor constructions used by the counting arguments: binarization and
//! contraction of independent paths.
//!
//! Truncating an infinite tree necessarily creates leaves; the trees we count
//! on are leafless, so every truncation leaf is flagged `open_end` and all
//! downstream code treats such a vertex as "infinite beyond here".

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Default cap on the number of vertices any expansion may create.
pub const DEFAULT_VERTEX_BUDGET: usize = 10_000_000;

/// A finite rooted tree with array-indexed vertices.
///
/// Vertices flagged `open_end` stand for infinite continuations cut off by
/// truncation; they never have children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    open_end: Vec<bool>,
}

impl ExplicitTree {
    /// Builds a tree from per-vertex child lists, validating that the result
    /// is a single rooted tree and that open ends are childless.
    pub fn new(root: VertexId, children: Vec<Vec<VertexId>>, open_end: Vec<bool>) -> Result<Self> {
        let n = children.len();
        if n == 0 {
            return Err(Error::Precondition("tree must have at least one vertex".into()));
        }
        if open_end.len() != n {
            return Err(Error::Precondition("children/open_end length mismatch".into()));
        }
        if root >= n {
            return Err(Error::Precondition(format!("root id {root} out of range")));
        }
        let mut parent: Vec<Option<VertexId>> = vec![None; n];
        for (v, ch) in children.iter().enumerate() {
            for &c in ch {
                if c >= n {
                    return Err(Error::Precondition(format!("child id {c} out of range")));
                }
                if c == root {
                    return Err(Error::Precondition("root cannot be a child".into()));
                }
                if parent[c].is_some() {
                    return Err(Error::Precondition(format!("vertex {c} has two parents")));
                }
                parent[c] = Some(v);
            }
        }
        for v in 0..n {
            if v != root && parent[v].is_none() {
                return Err(Error::Precondition(format!("vertex {v} is unreachable (no parent)")));
            }
            if open_end[v] && !children[v].is_empty() {
                return Err(Error::Precondition(format!("open end {v} has children")));
            }
        }
        // A traversal from the root must visit every vertex exactly once.
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        let mut count = 0usize;
        while let Some(v) = queue.pop_front() {
            count += 1;
            for &c in &children[v] {
                if seen[c] {
                    return Err(Error::Precondition("cycle detected".into()));
                }
                seen[c] = true;
                queue.push_back(c);
            }
        }
        if count != n {
            return Err(Error::Precondition("not all vertices reachable from root".into()));
        }
        Ok(ExplicitTree { root, parent, children, open_end })
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn is_open_end(&self, v: VertexId) -> bool {
        self.open_end[v]
    }

    /// δ(x) = |children(x)| + (0 if root else 1).
    pub fn degree(&self, v: VertexId) -> usize {
        self.children[v].len() + usize::from(v != self.root)
    }

    /// Edges identified by their child endpoint.
    pub fn edges(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len()).filter(move |&v| v != self.root)
    }

    /// Depth (edge distance from the root) of every vertex.
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.len()];
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            for &c in &self.children[v] {
                d[c] = d[v] + 1;
                queue.push_back(c);
            }
        }
        d
    }

    /// Minimum depth of any open-end vertex; `None` when no open end exists.
    pub fn min_open_depth(&self) -> Option<usize> {
        let depths = self.depths();
        (0..self.len()).filter(|&v| self.open_end[v]).map(|v| depths[v]).min()
    }

    /// True when every childless vertex is an open end.
    pub fn is_leafless(&self) -> bool {
        (0..self.len()).all(|v| !self.children[v].is_empty() || self.open_end[v])
    }

    /// For each vertex, whether its subtree contains an open end (i.e. the
    /// subtree stands for an infinite piece of the presented tree).
    pub fn subtree_has_open_end(&self) -> Vec<bool> {
        let mut inf = self.open_end.clone();
        // children have larger BFS ids only for canonical trees; propagate
        // bottom-up by repeated passes over a reverse topological order.
        let order = self.bfs_order();
        for &v in order.iter().rev() {
            if !inf[v] && self.children[v].iter().any(|&c| inf[c]) {
                inf[v] = true;
            }
        }
        inf
    }

    fn bfs_order(&self) -> Vec<VertexId> {
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in &self.children[v] {
                queue.push_back(c);
            }
        }
        order
    }

    /// Renumbers vertices in breadth-first order (children kept in order),
    /// giving a canonical representative of the order-preserving isomorphism
    /// class. Two trees are order-isomorphic iff their canonical forms are
    /// equal.
    pub fn bfs_canonical(&self) -> ExplicitTree {
        let order = self.bfs_order();
        let mut new_id = vec![0usize; self.len()];
        for (i, &v) in order.iter().enumerate() {
            new_id[v] = i;
        }
        let mut children = vec![Vec::new(); self.len()];
        let mut open_end = vec![false; self.len()];
        for &v in &order {
            children[new_id[v]] = self.children[v].iter().map(|&c| new_id[c]).collect();
            open_end[new_id[v]] = self.open_end[v];
        }
        ExplicitTree { root: 0, parent: derive_parents(&children), children, open_end }
    }
}

fn derive_parents(children: &[Vec<VertexId>]) -> Vec<Option<VertexId>> {
    let mut parent = vec![None; children.len()];
    for (v, ch) in children.iter().enumerate() {
        for &c in ch {
            parent[c] = Some(v);
        }
    }
    parent
}

/// Finite presentation of an infinite leafless rooted tree: every class names
/// the ordered classes of its children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeGrammar {
    root: String,
    classes: BTreeMap<String, Vec<String>>,
}

impl TreeGrammar {
    pub fn new<S: Into<String>>(root: S, classes: BTreeMap<String, Vec<String>>) -> Result<Self> {
        let g = TreeGrammar { root: root.into(), classes };
        g.validate()?;
        Ok(g)
    }

    /// Parses and validates the JSON grammar format
    /// `{"root": "<class>", "classes": {"<class>": ["<class>", ...], ...}}`.
    /// Unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let g: TreeGrammar =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grammar serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        if !self.classes.contains_key(&self.root) {
            return Err(Error::Schema(format!("root class {:?} not defined", self.root)));
        }
        for (name, children) in &self.classes {
            if children.is_empty() {
                return Err(Error::Schema(format!(
                    "class {name:?} has an empty child list (generated trees must be leafless)"
                )));
            }
            for c in children {
                if !self.classes.contains_key(c) {
                    return Err(Error::Schema(format!(
                        "class {name:?} references undefined class {c:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn root_class(&self) -> &str {
        &self.root
    }

    pub fn children_of(&self, class: &str) -> &[String] {
        &self.classes[class]
    }

    pub fn class_names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    /// Classes reachable from the root, in breadth-first discovery order.
    pub fn reachable_classes(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.root.clone()]);
        seen.insert(self.root.clone());
        while let Some(c) = queue.pop_front() {
            for child in self.children_of(&c) {
                if seen.insert(child.clone()) {
                    queue.push_back(child.clone());
                }
            }
            order.push(c);
        }
        order
    }

    /// Convenience: the d-ary grammar `{A -> [A; d]}`.
    pub fn dary(d: usize) -> TreeGrammar {
        let mut classes = BTreeMap::new();
        classes.insert("A".to_string(), vec!["A".to_string(); d]);
        TreeGrammar::new("A", classes).expect("d-ary grammar is valid")
    }

    /// Convenience: the (d+1)-regular tree rooted anywhere: the root has
    /// `degree` children, every other vertex `degree - 1`.
    pub fn regular(degree: usize) -> TreeGrammar {
        let mut classes = BTreeMap::new();
        classes.insert("R".to_string(), vec!["A".to_string(); degree]);
        classes.insert("A".to_string(), vec!["A".to_string(); degree - 1]);
        TreeGrammar::new("R", classes).expect("regular grammar is valid")
    }
}

/// Result of [`expand_grammar_tracked`]: the truncated tree plus the class of
/// every vertex and which leaves were produced by the stop set rather than by
/// the depth cutoff.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub tree: ExplicitTree,
    pub class_of: Vec<String>,
    pub stopped: Vec<bool>,
}

/// Breadth-first expansion of a grammar to the given depth. Every vertex at
/// exactly the cutoff depth is marked `open_end`. Children follow the
/// grammar's child list order, so the output numbering is deterministic.
pub fn expand_grammar(grammar: &TreeGrammar, depth: usize, budget: usize) -> Result<ExplicitTree> {
    Ok(expand_grammar_tracked(grammar, depth, budget, &BTreeSet::new())?.tree)
}

/// Like [`expand_grammar`], but children whose class is in `stop` become
/// childless `open_end` leaves regardless of depth, and are flagged in
/// `stopped`. The root vertex is always expanded as a real vertex.
pub fn expand_grammar_tracked(
    grammar: &TreeGrammar,
    depth: usize,
    budget: usize,
    stop: &BTreeSet<String>,
) -> Result<Expansion> {
    grammar.validate()?;
    let mut children: Vec<Vec<VertexId>> = vec![Vec::new()];
    let mut open_end = vec![false];
    let mut class_of = vec![grammar.root_class().to_string()];
    let mut stopped = vec![false];
    // queue of (vertex, depth)
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((v, dv)) = queue.pop_front() {
        if dv == depth {
            open_end[v] = true;
            continue;
        }
        let class = class_of[v].clone();
        for child_class in grammar.children_of(&class) {
            let id = children.len();
            if id >= budget {
                return Err(Error::BudgetExceeded { budget });
            }
            children.push(Vec::new());
            class_of.push(child_class.clone());
            let is_stop = stop.contains(child_class);
            open_end.push(is_stop);
            stopped.push(is_stop);
            children[v].push(id);
            if !is_stop {
                queue.push_back((id, dv + 1));
            }
        }
    }
    let tree = ExplicitTree::new(0, children, open_end)?;
    Ok(Expansion { tree, class_of, stopped })
}

/// Correspondence between a tree and its image under a minor construction.
#[derive(Debug, Clone)]
pub struct VertexMap {
    /// Original vertex id -> the replacement vertices in the new tree (the
    /// first entry is the principal image).
    pub forward: Vec<Vec<VertexId>>,
    /// Original edge (identified by its child endpoint) -> new edge
    /// (identified by its child endpoint). `None` for the root slot and for
    /// edges erased by contraction.
    pub edge_map: Vec<Option<VertexId>>,
}

impl VertexMap {
    /// Principal image of an original vertex, when it has one.
    pub fn image(&self, v: VertexId) -> Option<VertexId> {
        self.forward[v].first().copied()
    }
}

/// Replaces every vertex with `s > 2` children by a chain of `s - 1` binary
/// vertices, so that the output is a binary tree admitting the input as a
/// minor. A vertex `y` with children `z_1..z_s` becomes `y_1..y_{s-1}` with
/// `children(y_i) = [z_i, y_{i+1}]` and `children(y_{s-1}) = [z_{s-1}, z_s]`.
///
/// Requires every non-open-end vertex to have at least two children.
pub fn binarize(tree: &ExplicitTree) -> Result<(ExplicitTree, VertexMap)> {
    for v in 0..tree.len() {
        if !tree.is_open_end(v) && tree.children(v).len() < 2 {
            return Err(Error::Precondition(format!(
                "vertex {v} has {} children; binarization requires at least two",
                tree.children(v).len()
            )));
        }
    }
    // Build with temporary ids, then renumber breadth-first.
    let mut tmp_children: Vec<Vec<usize>> = Vec::new();
    let mut tmp_open: Vec<bool> = Vec::new();
    let alloc = |open: bool, tmp_children: &mut Vec<Vec<usize>>, tmp_open: &mut Vec<bool>| {
        tmp_children.push(Vec::new());
        tmp_open.push(open);
        tmp_children.len() - 1
    };
    let mut principal: Vec<usize> = vec![usize::MAX; tree.len()];
    let mut chain: Vec<Vec<usize>> = vec![Vec::new(); tree.len()];
    principal[tree.root()] = alloc(tree.is_open_end(tree.root()), &mut tmp_children, &mut tmp_open);
    chain[tree.root()] = vec![principal[tree.root()]];
    let mut queue = VecDeque::from([tree.root()]);
    while let Some(y) = queue.pop_front() {
        let zs = tree.children(y);
        let s = zs.len();
        if s == 0 {
            continue; // open end carried through unchanged
        }
        for &z in zs {
            principal[z] = alloc(tree.is_open_end(z), &mut tmp_children, &mut tmp_open);
            chain[z] = vec![principal[z]];
            queue.push_back(z);
        }
        if s == 2 {
            tmp_children[principal[y]] = vec![principal[zs[0]], principal[zs[1]]];
        } else {
            // y_1 = principal[y]; allocate y_2..y_{s-1}.
            let mut ys = vec![principal[y]];
            for _ in 1..s - 1 {
                ys.push(alloc(false, &mut tmp_children, &mut tmp_open));
            }
            for i in 0..s - 2 {
                tmp_children[ys[i]] = vec![principal[zs[i]], ys[i + 1]];
            }
            tmp_children[ys[s - 2]] = vec![principal[zs[s - 2]], principal[zs[s - 1]]];
            chain[y] = ys;
        }
    }
    let tmp_tree = ExplicitTree::new(principal[tree.root()], tmp_children, tmp_open)?;
    let canon = tmp_tree.bfs_canonical();
    // Recover the temp -> canonical renumbering to translate the maps.
    let order = tmp_tree.bfs_order();
    let mut new_id = vec![0usize; tmp_tree.len()];
    for (i, &v) in order.iter().enumerate() {
        new_id[v] = i;
    }
    let forward: Vec<Vec<VertexId>> =
        chain.iter().map(|ys| ys.iter().map(|&t| new_id[t]).collect()).collect();
    let mut edge_map = vec![None; tree.len()];
    for v in tree.edges() {
        edge_map[v] = Some(new_id[principal[v]]);
    }
    Ok((canon, VertexMap { forward, edge_map }))
}

/// A minor in which every maximal finite independent path has been replaced
/// by a single edge remembering the original path length.
#[derive(Debug, Clone)]
pub struct ContractedTree {
    pub tree: ExplicitTree,
    /// Indexed by child endpoint in `tree`; the entry for the root is 0.
    pub edge_length: Vec<usize>,
}

impl ContractedTree {
    pub fn max_edge_length(&self) -> usize {
        self.tree.edges().map(|e| self.edge_length[e]).max().unwrap_or(1)
    }
}

/// Contracts every maximal independent path (all inner vertices of degree
/// two) to a single labeled edge. The root is never contracted away, and
/// paths running into an open end contract to an edge into a single open end
/// carrying the accumulated length.
///
/// Requires a leafless tree: a chain ending in a childless non-open-end
/// vertex is a precondition violation.
pub fn contract_independent_paths(tree: &ExplicitTree) -> Result<(ContractedTree, VertexMap)> {
    if !tree.is_leafless() {
        return Err(Error::Precondition(
            "tree has a non-open-end leaf; contraction requires leafless input".into(),
        ));
    }
    let survives = |v: VertexId| {
        v == tree.root() || tree.is_open_end(v) || tree.children(v).len() >= 2
    };
    // New ids are assigned in BFS discovery order over surviving vertices,
    // which is already the BFS order of the contracted tree.
    let mut children: Vec<Vec<VertexId>> = vec![Vec::new()];
    let mut open_end = vec![tree.is_open_end(tree.root())];
    let mut edge_length = vec![0usize];
    let mut forward: Vec<Vec<VertexId>> = vec![Vec::new(); tree.len()];
    let mut edge_map: Vec<Option<VertexId>> = vec![None; tree.len()];
    forward[tree.root()] = vec![0];
    let mut queue = VecDeque::from([tree.root()]);
    while let Some(u) = queue.pop_front() {
        let nu = forward[u][0];
        for &first in tree.children(u) {
            let mut w = first;
            let mut len = 1usize;
            while !survives(w) {
                w = tree.children(w)[0];
                len += 1;
            }
            let nw = children.len();
            children.push(Vec::new());
            open_end.push(tree.is_open_end(w));
            edge_length.push(len);
            children[nu].push(nw);
            forward[w] = vec![nw];
            edge_map[w] = Some(nw);
            queue.push_back(w);
        }
    }
    let out = ExplicitTree::new(0, children, open_end)?;
    Ok((ContractedTree { tree: out, edge_length }, VertexMap { forward, edge_map }))
}

/// Expands each contracted edge back into a path of `edge_length` edges.
/// Inverse of [`contract_independent_paths`] up to order-preserving
/// isomorphism.
pub fn subdivide(ct: &ContractedTree) -> ExplicitTree {
    let t = &ct.tree;
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); t.len()];
    let mut open_end: Vec<bool> = (0..t.len()).map(|v| t.is_open_end(v)).collect();
    let mut next = t.len();
    for v in 0..t.len() {
        for &c in t.children(v) {
            let mut upper = v;
            for _ in 1..ct.edge_length[c] {
                children.push(Vec::new());
                open_end.push(false);
                children[upper].push(next);
                upper = next;
                next += 1;
            }
            children[upper].push(c);
        }
    }
    ExplicitTree::new(t.root(), children, open_end)
        .expect("subdivision of a valid tree is valid")
        .bfs_canonical()
}

/// Inserts `extra` inner vertices in every edge. Used to build test corpora
/// of subdivided trees.
pub fn subdivide_uniform(tree: &ExplicitTree, extra: usize) -> ExplicitTree {
    let edge_length = (0..tree.len()).map(|_| extra + 1).collect();
    subdivide(&ContractedTree { tree: tree.clone(), edge_length })
}
