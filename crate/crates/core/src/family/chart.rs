//! Local model of the universal curve near a boundary point: one `P^1` per vertex,
//! glued at each edge by `(z_j - b_jk)(z_k - b_kj) = t`.

use std::fmt;

use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::strata::{Signature, StableTree};
use crate::Rational;

/// A point of `P^1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Coord {
    Finite(Rational),
    Infinity,
}

impl Coord {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Coord::Finite(x) => Some(x),
            Coord::Infinity => None,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Finite(x) => write!(f, "{x}"),
            Coord::Infinity => write!(f, "inf"),
        }
    }
}

/// Numerators and denominators of sampled rationals are bounded by this in absolute value.
pub const SAMPLE_BOUND: i64 = 1_000_000;

/// Retries allowed when a sample hits a pole or a vanishing denominator.
pub const MAX_RETRIES: usize = 100;

/// A uniformly drawn rational `p/q` with `|p| <= 10^6`, `1 <= q <= 10^6`.
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let p: i64 = rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND);
    let q: i64 = rng.gen_range(1..=SAMPLE_BOUND);
    Rational::new(p.into(), q.into())
}

/// Parameters of the local family: the central tree, one smoothing parameter per edge,
/// the coordinate of each marking on its own component and of each node on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalChart {
    sig: Signature,
    tree: StableTree,
    t: Vec<Rational>,
    home: Vec<Coord>,
    /// `(b_ab, b_ba)` for edge `(a, b)`: the node's coordinate on `a`'s and on `b`'s line.
    nodes: Vec<(Rational, Rational)>,
}

impl LocalChart {
    /// Validate a chart: coordinates at each vertex pairwise distinct, sizes consistent.
    pub fn new(
        sig: Signature,
        tree: StableTree,
        t: Vec<Rational>,
        home: Vec<Coord>,
        nodes: Vec<(Rational, Rational)>,
    ) -> Result<LocalChart> {
        if tree.n() != sig.n() {
            return Err(Error::InvalidChart(format!(
                "tree has {} markings, signature {}",
                tree.n(),
                sig.n()
            )));
        }
        if t.len() != tree.num_edges() || nodes.len() != tree.num_edges() {
            return Err(Error::InvalidChart(
                "one parameter and one node pair per edge required".into(),
            ));
        }
        if home.len() != sig.n() {
            return Err(Error::InvalidChart(
                "one coordinate per marking required".into(),
            ));
        }
        let chart = LocalChart {
            sig,
            tree,
            t,
            home,
            nodes,
        };
        for j in 0..chart.tree.num_vertices() {
            let pts = chart.vertex_points(j);
            for a in 0..pts.len() {
                if pts[a + 1..].contains(&pts[a]) {
                    return Err(Error::InvalidChart(format!(
                        "vertex {j} has two special points at {}",
                        pts[a]
                    )));
                }
            }
        }
        Ok(chart)
    }

    /// A chart with the given smoothing parameters and random special points.
    pub fn random<R: Rng>(
        sig: Signature,
        tree: StableTree,
        t: Vec<Rational>,
        rng: &mut R,
    ) -> Result<LocalChart> {
        for _ in 0..MAX_RETRIES {
            let home = (0..sig.n())
                .map(|_| Coord::Finite(random_rational(rng)))
                .collect();
            let nodes = (0..tree.num_edges())
                .map(|_| (random_rational(rng), random_rational(rng)))
                .collect();
            match LocalChart::new(sig.clone(), tree.clone(), t.clone(), home, nodes) {
                Ok(c) => return Ok(c),
                Err(Error::InvalidChart(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::SamplingExhausted(MAX_RETRIES))
    }

    fn vertex_points(&self, j: usize) -> Vec<Coord> {
        let mut pts: Vec<Coord> = self.tree.vertices()[j]
            .iter()
            .map(|i| self.home[i - 1].clone())
            .collect();
        for k in self.tree.neighbors(j) {
            pts.push(Coord::Finite(self.node(j, k).expect("neighbor").clone()));
        }
        pts
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn tree(&self) -> &StableTree {
        &self.tree
    }

    pub fn params(&self) -> &[Rational] {
        &self.t
    }

    /// `t` on the edge `{j, k}`.
    pub fn param(&self, j: usize, k: usize) -> Result<&Rational> {
        Ok(&self.t[self.tree.edge_index(j, k)?])
    }

    /// `b_jk`: the coordinate on `j`'s line of the node joining `j` and `k`.
    pub fn node(&self, j: usize, k: usize) -> Result<&Rational> {
        let e = self.tree.edge_index(j, k)?;
        let (a, _) = self.tree.edges()[e];
        let (ba, bb) = &self.nodes[e];
        Ok(if a == j { ba } else { bb })
    }

    /// Coordinate of marking `i` on its own component.
    pub fn home_coord(&self, i: usize) -> &Coord {
        &self.home[i - 1]
    }

    pub fn home_vertex(&self, i: usize) -> usize {
        self.tree.vertex_of(i).expect("markings are covered")
    }

    /// Same chart with new smoothing parameters.
    pub fn with_params(&self, t: Vec<Rational>) -> Result<LocalChart> {
        LocalChart::new(
            self.sig.clone(),
            self.tree.clone(),
            t,
            self.home.clone(),
            self.nodes.clone(),
        )
    }

    /// True when every smoothing parameter is nonzero.
    pub fn is_smooth_fiber(&self) -> bool {
        self.t.iter().all(|x| !x.is_zero())
    }

    /// Vertices along the unique path from `j` to `k`, both included.
    pub fn path(&self, j: usize, k: usize) -> Vec<usize> {
        let v = self.tree.num_vertices();
        let mut prev = vec![usize::MAX; v];
        let mut stack = vec![j];
        prev[j] = j;
        while let Some(x) = stack.pop() {
            for y in self.tree.neighbors(x) {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut out = vec![k];
        let mut x = k;
        while x != j {
            x = prev[x];
            out.push(x);
        }
        out.reverse();
        out
    }

    /// Move a coordinate across the edge from `j` to its neighbor `k`:
    /// `z_k = b_kj + t / (z_j - b_jk)`, with `inf` going to `b_kj`.
    pub fn transfer(&self, j: usize, k: usize, z: &Coord) -> Result<Coord> {
        let b_kj = self.node(k, j)?.clone();
        let b_jk = self.node(j, k)?;
        let t = self.param(j, k)?;
        match z {
            Coord::Infinity => Ok(Coord::Finite(b_kj)),
            Coord::Finite(x) => {
                let den = x - b_jk;
                if den.is_zero() {
                    if t.is_zero() {
                        // the whole far component sits over this node
                        return Err(Error::DenominatorVanishes(format!(
                            "z_{j} equals the node b_{j}{k}"
                        )));
                    }
                    return Ok(Coord::Infinity);
                }
                Ok(Coord::Finite(b_kj + t / den))
            }
        }
    }
}

/// Coordinates `(a_0i, ..., a_ri)` of the section of marking `i` on every line.
pub fn marked_point_coords(chart: &LocalChart, i: usize) -> Result<Vec<Coord>> {
    let n = chart.sig.n();
    if i == 0 || i > n {
        return Err(Error::InvalidMarking { marking: i, n });
    }
    let home = chart.home_vertex(i);
    let v = chart.tree.num_vertices();
    let mut out: Vec<Option<Coord>> = vec![None; v];
    out[home] = Some(chart.home[i - 1].clone());
    let mut stack = vec![home];
    while let Some(j) = stack.pop() {
        let z = out[j].clone().expect("set before push");
        for k in chart.tree.neighbors(j) {
            if out[k].is_none() {
                let zk = chart.transfer(j, k, &z)?;
                if zk == Coord::Infinity {
                    return Err(Error::DenominatorVanishes(format!(
                        "marking {i} lands on a node of line {j}"
                    )));
                }
                out[k] = Some(zk);
                stack.push(k);
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|c| c.expect("tree is connected"))
        .collect())
}

/// The point of the curve whose coordinate on line `base` is `z`, found by transferring
/// across every edge.
pub fn curve_point(chart: &LocalChart, base: usize, z: Rational) -> Result<Vec<Rational>> {
    let v = chart.tree.num_vertices();
    let mut out: Vec<Option<Rational>> = vec![None; v];
    out[base] = Some(z);
    let mut stack = vec![base];
    while let Some(j) = stack.pop() {
        let zj = Coord::Finite(out[j].clone().expect("set before push"));
        for k in chart.tree.neighbors(j) {
            if out[k].is_none() {
                match chart.transfer(j, k, &zj)? {
                    Coord::Finite(x) => out[k] = Some(x),
                    Coord::Infinity => {
                        return Err(Error::DenominatorVanishes(format!(
                            "point sits at infinity on line {k}"
                        )))
                    }
                }
                stack.push(k);
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|c| c.expect("tree is connected"))
        .collect())
}

/// True when `z` satisfies every node equation exactly.
pub fn on_curve(chart: &LocalChart, z: &[Rational]) -> bool {
    chart.tree.edges().iter().enumerate().all(|(e, &(a, b))| {
        let (ba, bb) = &chart.nodes[e];
        (&z[a] - ba) * (&z[b] - bb) == chart.t[e]
    })
}
