//! Dual trees of stable n-pointed genus-0 curves.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::marks::Marks;
use crate::strata::partition::{all_splits, Split};

/// Dual graph of a stable genus-0 curve: one vertex per component (with the markings
/// it carries) and one edge per node.
///
/// Vertex indices are whatever the caller supplied; [`StableTree::canonical`] gives the
/// normal form used for deduplication.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StableTree {
    n: usize,
    vertices: Vec<Marks>,
    edges: Vec<(usize, usize)>,
}

impl StableTree {
    /// Validate a tree: markings partition `1..n`, the graph is a tree, and every
    /// vertex has at least three special points.
    pub fn new(n: usize, vertices: Vec<Marks>, edges: Vec<(usize, usize)>) -> Result<StableTree> {
        if n < 3 {
            return Err(Error::TooFewMarks(n));
        }
        let v = vertices.len();
        if v == 0 {
            return Err(Error::InvalidTree("no vertices".into()));
        }
        let mut seen = Marks::EMPTY;
        for m in &vertices {
            if !seen.is_disjoint(*m) {
                return Err(Error::InvalidTree(format!(
                    "marking set {m} overlaps another vertex"
                )));
            }
            seen |= *m;
        }
        if seen != Marks::full(n) {
            return Err(Error::InvalidTree(format!(
                "vertex markings {seen} do not cover 1..{n}"
            )));
        }
        if edges.len() + 1 != v {
            return Err(Error::InvalidTree(format!(
                "{v} vertices need {} edges, got {}",
                v - 1,
                edges.len()
            )));
        }
        let mut edges_norm = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a >= v || b >= v || a == b {
                return Err(Error::InvalidTree(format!("bad edge {a}-{b}")));
            }
            edges_norm.push((a.min(b), a.max(b)));
        }
        let tree = StableTree {
            n,
            vertices,
            edges: edges_norm,
        };
        // connectivity (with |E| = |V| - 1 this also rules out cycles)
        let reached = tree.reach(0, None);
        if reached.len() != v {
            return Err(Error::InvalidTree("graph is not connected".into()));
        }
        for j in 0..v {
            let special = tree.vertices[j].len() + tree.degree(j);
            if special < 3 {
                return Err(Error::InvalidTree(format!(
                    "vertex {j} has only {special} special points"
                )));
            }
        }
        Ok(tree)
    }

    /// The one-vertex tree of a smooth curve.
    pub fn smooth(n: usize) -> StableTree {
        StableTree {
            n,
            vertices: vec![Marks::full(n)],
            edges: Vec::new(),
        }
    }

    /// Rebuild the tree whose edges realize a set of pairwise compatible splits.
    pub fn from_splits(n: usize, splits: &[Split]) -> Result<StableTree> {
        let mut far: Vec<Marks> = splits.iter().map(|s| s.far()).collect();
        far.sort_by_key(|m| std::cmp::Reverse(m.len()));
        for (a, &x) in far.iter().enumerate() {
            for &y in &far[a + 1..] {
                if x == y || !(y.is_subset(x) || x.is_disjoint(y)) {
                    return Err(Error::InvalidTree(format!(
                        "splits {x} and {y} are not compatible"
                    )));
                }
            }
        }
        // vertex 0 is the root (carries marking 1); vertex k+1 belongs to far[k]
        let mut parent = vec![0usize; far.len()];
        for k in 0..far.len() {
            // far is sorted by decreasing size, so the last container seen is the smallest
            for p in 0..k {
                if far[k].is_subset(far[p]) && far[k] != far[p] {
                    parent[k] = p + 1;
                }
            }
        }
        let mut vertices = vec![Marks::full(n)];
        vertices.extend(far.iter().copied());
        for k in 0..far.len() {
            let p = parent[k];
            vertices[p] = vertices[p] - far[k];
        }
        let edges = (0..far.len()).map(|k| (parent[k], k + 1)).collect();
        StableTree::new(n, vertices, edges).map(|t| t.canonical())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Marks] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, j: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == j || b == j)
            .count()
    }

    pub fn neighbors(&self, j: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == j {
                    Some(b)
                } else if b == j {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Index of the edge `{a, b}`.
    pub fn edge_index(&self, a: usize, b: usize) -> Result<usize> {
        let key = (a.min(b), a.max(b));
        self.edges
            .iter()
            .position(|&e| e == key)
            .ok_or(Error::NoSuchEdge(a, b))
    }

    /// Vertex containing marking `i`.
    pub fn vertex_of(&self, i: usize) -> Option<usize> {
        self.vertices.iter().position(|m| m.contains(i))
    }

    /// Vertices reachable from `start` without crossing `blocked` (given as an oriented pair).
    fn reach(&self, start: usize, blocked: Option<(usize, usize)>) -> Vec<usize> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![start];
        let mut out = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            out.push(v);
            for w in self.neighbors(v) {
                let cut = blocked.is_some_and(|(x, y)| (x == v && y == w) || (x == w && y == v));
                if !seen[w] && !cut {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Vertices on `to`'s side of the edge `{from, to}`.
    pub fn branch_vertices(&self, from: usize, to: usize) -> Result<Vec<usize>> {
        self.edge_index(from, to)?;
        Ok(self.reach(to, Some((from, to))))
    }

    /// Markings on `to`'s side of the edge `{from, to}`.
    pub fn branch_marks(&self, from: usize, to: usize) -> Result<Marks> {
        Ok(self
            .branch_vertices(from, to)?
            .into_iter()
            .fold(Marks::EMPTY, |m, v| m | self.vertices[v]))
    }

    /// The split of `1..n` induced by edge number `e`.
    pub fn edge_split(&self, e: usize) -> Split {
        let (a, b) = self.edges[e];
        let side = self.branch_marks(a, b).expect("edge exists");
        Split::new(self.n, side).expect("stable tree edges split into sides of size >= 2")
    }

    /// Edge splits, sorted.
    pub fn splits(&self) -> Vec<Split> {
        let mut s: Vec<_> = (0..self.edges.len()).map(|e| self.edge_split(e)).collect();
        s.sort();
        s
    }

    /// Normal form: vertices ordered by least marking (vertices without markings last,
    /// ordered by their sorted list of branch marking sets), edges sorted.
    pub fn canonical(&self) -> StableTree {
        let keys: Vec<(usize, Vec<Marks>)> = (0..self.vertices.len())
            .map(|j| {
                let mut branches: Vec<Marks> = self
                    .neighbors(j)
                    .into_iter()
                    .map(|w| self.branch_marks(j, w).expect("neighbor"))
                    .collect();
                branches.sort();
                (self.vertices[j].min().unwrap_or(usize::MAX), branches)
            })
            .collect();
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut new_index = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let vertices = order.iter().map(|&old| self.vertices[old]).collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (new_index[a], new_index[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        StableTree {
            n: self.n,
            vertices,
            edges,
        }
    }

    /// Relabel markings: marking `i` becomes `perm[i - 1]`. Vertex indices are kept.
    pub fn permute(&self, perm: &[usize]) -> StableTree {
        StableTree {
            n: self.n,
            vertices: self.vertices.iter().map(|m| m.permute(perm)).collect(),
            edges: self.edges.clone(),
        }
    }
}

impl fmt::Display for StableTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, m) in self.vertices.iter().enumerate() {
            if j > 0 {
                write!(f, ";")?;
            }
            write!(
                f,
                "{}",
                m.to_vec()
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )?;
        }
        for (a, b) in &self.edges {
            write!(f, " {a}-{b}")?;
        }
        Ok(())
    }
}

/// All stable n-marked genus-0 trees with at most `max_edges` edges, the smooth tree
/// included, in canonical form and sorted by edge count then split list.
pub fn enumerate_stable_trees(n: usize, max_edges: usize) -> Vec<StableTree> {
    let splits = all_splits(n);
    let max_edges = max_edges.min(n.saturating_sub(3));
    let mut sets: BTreeSet<(usize, Vec<Split>)> = BTreeSet::new();
    let mut current = Vec::new();
    collect_compatible(&splits, 0, max_edges, &mut current, &mut sets);
    sets.into_iter()
        .map(|(_, s)| {
            if s.is_empty() {
                StableTree::smooth(n)
            } else {
                StableTree::from_splits(n, &s).expect("compatible splits form a tree")
            }
        })
        .collect()
}

fn collect_compatible(
    splits: &[Split],
    start: usize,
    budget: usize,
    current: &mut Vec<Split>,
    out: &mut BTreeSet<(usize, Vec<Split>)>,
) {
    out.insert((current.len(), current.clone()));
    if budget == 0 {
        return;
    }
    for k in start..splits.len() {
        let s = splits[k];
        if current.iter().all(|c| c.compatible(s)) {
            current.push(s);
            collect_compatible(splits, k + 1, budget - 1, current, out);
            current.pop();
        }
    }
}
