//! Node and edge weights on a dual tree, principal subcurves and the monomial
//! generators of the ideal sheaf near a boundary point.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::strata::partition::TwoBlockPartition;
use crate::strata::signature::Signature;
use crate::strata::tree::StableTree;
use crate::Rational;

/// `(mu(y_jj'), mu(y_j'j))`: the weight of the far side of the edge as seen from `j`,
/// then as seen from `j'`. The two values sum to 2.
pub fn node_weights(
    tree: &StableTree,
    j: usize,
    jp: usize,
    sig: &Signature,
) -> Result<(Rational, Rational)> {
    let far_from_j = sig.mu(tree.branch_marks(j, jp)?);
    let far_from_jp = sig.mu(tree.branch_marks(jp, j)?);
    Ok((far_from_j, far_from_jp))
}

/// `mu(e_jj') = mu(y_j'j) - mu(y_jj')` for the edge oriented from `j` to `j'`.
pub fn edge_weight(tree: &StableTree, j: usize, jp: usize, sig: &Signature) -> Result<Rational> {
    let (y_j, y_jp) = node_weights(tree, j, jp, sig)?;
    Ok(y_jp - y_j)
}

/// Principal subcurves and the vertices outside them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalAnalysis {
    /// Vertex sets of the principal subcurves, each sorted, ordered by least vertex.
    pub principal: Vec<Vec<usize>>,
    /// Vertices in no principal subcurve, sorted.
    pub other: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.0[x] = root;
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Contract the zero-weight edges, then keep the contracted vertices all of whose
/// outgoing edges have positive weight.
pub fn principal_subcurves(tree: &StableTree, sig: &Signature) -> PrincipalAnalysis {
    let v = tree.num_vertices();
    let one = Rational::one();
    let mut uf = UnionFind((0..v).collect());
    let mut far_weight = Vec::with_capacity(tree.num_edges());
    for &(a, b) in tree.edges() {
        let w = sig.mu(tree.branch_marks(a, b).expect("edge"));
        if w == one {
            uf.union(a, b);
        }
        far_weight.push(w);
    }
    let mut blocked = vec![false; v];
    for (e, &(a, b)) in tree.edges().iter().enumerate() {
        let w = &far_weight[e];
        if *w == one {
            continue;
        }
        // outgoing from a has positive weight iff the far side (b's) weighs < 1
        if *w > one {
            blocked[uf.find(a)] = true;
        } else {
            blocked[uf.find(b)] = true;
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); v];
    for j in 0..v {
        let r = uf.find(j);
        groups[r].push(j);
    }
    let mut principal = Vec::new();
    let mut other = Vec::new();
    for (r, g) in groups.into_iter().enumerate() {
        if g.is_empty() {
            continue;
        }
        if blocked[r] {
            other.extend(g);
        } else {
            principal.push(g);
        }
    }
    principal.sort();
    other.sort_unstable();
    PrincipalAnalysis { principal, other }
}

/// Exponents `beta_{j, alpha}` of the monomial `t^{beta_j}`, one entry per edge in the
/// tree's edge order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `beta_{j, alpha} = d * mu_S(alpha)` when `v_j` lies on the light side `I_0` of
/// edge `alpha`, 0 otherwise.
pub fn exponent_vector(tree: &StableTree, j: usize, sig: &Signature) -> ExponentVector {
    let entries = tree
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let part = TwoBlockPartition::from_split(tree.edge_split(e), sig);
            let a_side = tree.branch_vertices(b, a).expect("edge");
            let a_marks = tree.branch_marks(b, a).expect("edge");
            let j_on_a_side = a_side.binary_search(&j).is_ok();
            let j_marks_light = if j_on_a_side {
                a_marks == part.i0
            } else {
                a_marks != part.i0
            };
            if j_marks_light {
                sig.d() + sig.k_sum(part.i0)
            } else {
                0
            }
        })
        .collect();
    ExponentVector(entries)
}

/// One monomial exponent per principal subcurve, deduplicated and sorted.
pub fn ideal_generators(tree: &StableTree, sig: &Signature) -> Vec<ExponentVector> {
    let analysis = principal_subcurves(tree, sig);
    let set: BTreeSet<ExponentVector> = analysis
        .principal
        .iter()
        .map(|g| exponent_vector(tree, g[0], sig))
        .collect();
    set.into_iter().collect()
}

/// True iff the tree's stratum lies in the support of the ideal sheaf, i.e. there are at
/// least two principal subcurves.
pub fn in_ideal_support(tree: &StableTree, sig: &Signature) -> bool {
    principal_subcurves(tree, sig).principal.len() >= 2
}

/// Dimension `r0 - 1` of the projective space over the point in the blow-up.
pub fn fiber_projective_dim(tree: &StableTree, sig: &Signature) -> usize {
    principal_subcurves(tree, sig).principal.len() - 1
}

/// Total absolute residual of the node-weight identities (pairs sum to 2, each vertex
/// balances to 2); zero for every valid tree.
#[doc(hidden)]
pub fn weight_balance_defect(tree: &StableTree, sig: &Signature) -> Rational {
    let two = Rational::from_integer(2.into());
    let mut defect = Rational::zero();
    for j in 0..tree.num_vertices() {
        let mut total = sig.mu(tree.vertices()[j]);
        for jp in tree.neighbors(j) {
            let (y, y_rev) = node_weights(tree, j, jp, sig).expect("edge");
            defect += (&y + &y_rev - &two).abs();
            total += y;
        }
        defect += (total - &two).abs();
    }
    defect
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marks::Marks;
    use crate::strata::signature::validate_signature;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn m(v: &[usize]) -> Marks {
        Marks::from_iter(v.iter().copied())
    }

    fn star(n: usize, center: &[usize], leaves: &[&[usize]]) -> StableTree {
        let mut vertices = vec![m(center)];
        vertices.extend(leaves.iter().map(|l| m(l)));
        let edges = (1..=leaves.len()).map(|k| (0, k)).collect();
        StableTree::new(n, vertices, edges).unwrap()
    }

    #[test]
    fn one_edge_weights() {
        let sig = validate_signature(2, &[-1, -1, -1, -1, -1, 1]).unwrap();
        let t = StableTree::new(6, vec![m(&[1, 2, 3]), m(&[4, 5, 6])], vec![(0, 1)]).unwrap();
        assert_eq!(node_weights(&t, 0, 1, &sig).unwrap(), (q(1, 2), q(3, 2)));
        assert_eq!(edge_weight(&t, 1, 0, &sig).unwrap(), q(-1, 1));
        assert_eq!(edge_weight(&t, 0, 1, &sig).unwrap(), q(1, 1));
        let a = principal_subcurves(&t, &sig);
        assert_eq!(a.principal, vec![vec![0]]);
        assert_eq!(a.other, vec![1]);
        assert!(!in_ideal_support(&t, &sig));

        let sig3 = validate_signature(3, &[-1; 6]).unwrap();
        let t3 = StableTree::new(6, vec![m(&[1, 2]), m(&[3, 4, 5, 6])], vec![(0, 1)]).unwrap();
        assert_eq!(node_weights(&t3, 0, 1, &sig3).unwrap(), (q(4, 3), q(2, 3)));
    }

    #[test]
    fn balanced_split_contracts() {
        let sig = validate_signature(2, &[-1; 4]).unwrap();
        let t = StableTree::new(4, vec![m(&[1, 2]), m(&[3, 4])], vec![(0, 1)]).unwrap();
        assert_eq!(node_weights(&t, 0, 1, &sig).unwrap(), (q(1, 1), q(1, 1)));
        assert_eq!(edge_weight(&t, 0, 1, &sig).unwrap(), q(0, 1));
        assert_eq!(principal_subcurves(&t, &sig).principal, vec![vec![0, 1]]);
        assert_eq!(ideal_generators(&t, &sig), vec![ExponentVector(vec![0])]);
        assert_eq!(fiber_projective_dim(&t, &sig), 0);
    }

    #[test]
    fn star_with_two_principal_leaves() {
        let sig = validate_signature(2, &[2, -1, -1, -1, -1, -1, -1]).unwrap();
        let t = star(7, &[1], &[&[2, 3, 4], &[5, 6, 7]]);
        let a = principal_subcurves(&t, &sig);
        assert_eq!(a.principal, vec![vec![1], vec![2]]);
        assert_eq!(a.other, vec![0]);
        assert_eq!(exponent_vector(&t, 1, &sig), ExponentVector(vec![0, 1]));
        assert_eq!(exponent_vector(&t, 2, &sig), ExponentVector(vec![1, 0]));
        assert_eq!(
            ideal_generators(&t, &sig),
            vec![ExponentVector(vec![0, 1]), ExponentVector(vec![1, 0])]
        );
        assert!(in_ideal_support(&t, &sig));
        assert_eq!(fiber_projective_dim(&t, &sig), 1);
    }

    #[test]
    fn two_zeros_star() {
        let sig = validate_signature(2, &[1, 1, -1, -1, -1, -1, -1, -1]).unwrap();
        let t = star(8, &[1, 2], &[&[3, 4, 5], &[6, 7, 8]]);
        assert_eq!(fiber_projective_dim(&t, &sig), 1);
    }

    #[test]
    fn smooth_curve_is_outside_support() {
        let sig = validate_signature(2, &[2, -1, -1, -1, -1, -1, -1]).unwrap();
        let t = StableTree::smooth(7);
        assert!(!in_ideal_support(&t, &sig));
        assert_eq!(ideal_generators(&t, &sig), vec![ExponentVector(vec![])]);
    }

    /// Chain I1 - I0 - I2 with alpha_1 = {0,1}, alpha_2 = {0,2}.
    fn chain(sig: &Signature, i0: &[usize], i1: &[usize], i2: &[usize]) -> [ExponentVector; 3] {
        let t = StableTree::new(sig.n(), vec![m(i0), m(i1), m(i2)], vec![(0, 1), (0, 2)]).unwrap();
        [0, 1, 2].map(|j| exponent_vector(&t, j, sig))
    }

    #[test]
    fn codim_two_chain_tables() {
        // case (b): nu_1 = 1, nu_2 = -1 -> beta_0 = (nu_1, 0), beta_1 = 0, beta_2 = (nu_1, -nu_2)
        let sig = validate_signature(2, &[0, 0, -1, -1, -1, 0, -1]).unwrap();
        let [b0, b1, b2] = chain(&sig, &[1, 2], &[3, 4, 5], &[6, 7]);
        assert_eq!((b0.0, b1.0, b2.0), (vec![1, 0], vec![0, 0], vec![1, 1]));

        // case (c): nu_1 = nu_2 = 1 -> beta_0 = (1, 1), beta_1 = (0, 1), beta_2 = (1, 0)
        let sig = validate_signature(2, &[2, -1, -1, -1, -1, -1, -1]).unwrap();
        let [b0, b1, b2] = chain(&sig, &[1], &[2, 3, 4], &[5, 6, 7]);
        assert_eq!((b0.0, b1.0, b2.0), (vec![1, 1], vec![0, 1], vec![1, 0]));

        // case (a): nu_1 = nu_2 = -1 -> beta_0 = 0, beta_1 = (1, 0), beta_2 = (0, 1)
        let sig = validate_signature(2, &[-1, -1, -1, 0, -1, 0]).unwrap();
        let [b0, b1, b2] = chain(&sig, &[1, 2], &[3, 4], &[5, 6]);
        assert_eq!((b0.0, b1.0, b2.0), (vec![0, 0], vec![1, 0], vec![0, 1]));
    }

    #[test]
    fn balance_identities_hold() {
        let sig = validate_signature(3, &[-2, -2, -1, -1, 0, 0]).unwrap();
        for t in crate::strata::tree::enumerate_stable_trees(6, 3) {
            assert!(weight_balance_defect(&t, &sig).is_zero(), "{t}");
        }
    }
}
