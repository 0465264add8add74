//! Boundary partitions: the two-block set `P` and the extended set `P-hat(mu)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::marks::Marks;
use crate::strata::signature::Signature;
use crate::Rational;

/// An unordered split `{A, A^c}` of `{1..n}`, independent of any weights.
///
/// Stored as the side that does not contain marking 1, so two compatible
/// splits are always nested or disjoint.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Split {
    n: u8,
    far: Marks,
}

impl Split {
    pub fn new(n: usize, side: Marks) -> Result<Split> {
        let full = Marks::full(n);
        if !side.is_subset(full) {
            return Err(Error::InvalidPartition(format!(
                "{side} is not a subset of 1..{n}"
            )));
        }
        let far = if side.contains(1) {
            side.complement(n)
        } else {
            side
        };
        let near = far.complement(n);
        if far.len() < 2 || near.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "split {near}|{far} has a side with fewer than 2 markings"
            )));
        }
        Ok(Split { n: n as u8, far })
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    /// The side not containing marking 1.
    pub fn far(self) -> Marks {
        self.far
    }

    /// The side containing marking 1.
    pub fn near(self) -> Marks {
        self.far.complement(self.n())
    }

    /// Neither side of one split contains a side of the other.
    pub fn crosses(self, other: Split) -> bool {
        let (a, b) = (self.far, other.far);
        // both sides avoid marking 1, so the fourth intersection (the near sides) is nonempty
        !(a & b).is_empty() && !(a - b).is_empty() && !(b - a).is_empty()
    }

    pub fn compatible(self, other: Split) -> bool {
        self != other && !self.crosses(other)
    }

    pub fn permute(self, perm: &[usize]) -> Split {
        Split::new(self.n(), self.far.permute(perm)).expect("relabeling preserves sizes")
    }
}

impl fmt::Debug for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.near(), self.far)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// All splits of `{1..n}` with both sides of size at least 2, in increasing order of `far`.
pub fn all_splits(n: usize) -> Vec<Split> {
    if n < 4 {
        return Vec::new();
    }
    // far sides range over subsets of {2..n}
    let rest = Marks::full(n) - Marks::singleton(1);
    let mut out = Vec::new();
    let mut sub = rest.0;
    loop {
        let m = Marks(sub);
        if m.len() >= 2 && n - m.len() >= 2 {
            out.push(Split { n: n as u8, far: m });
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest.0;
    }
    out.sort();
    out
}

/// A boundary divisor `{I0, I1}` numbered so that `mu(I0) <= 1 <= mu(I1)`.
///
/// When both blocks have weight exactly 1 the block containing marking 1 is `I0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TwoBlockPartition {
    pub i0: Marks,
    pub i1: Marks,
}

impl TwoBlockPartition {
    /// Number the two sides of `split` according to the weights of `sig`.
    pub fn from_split(split: Split, sig: &Signature) -> TwoBlockPartition {
        let (near, far) = (split.near(), split.far());
        let mu_near = sig.mu(near);
        match mu_near.cmp(&Rational::one()) {
            Ordering::Less | Ordering::Equal => TwoBlockPartition { i0: near, i1: far },
            Ordering::Greater => TwoBlockPartition { i0: far, i1: near },
        }
    }

    /// Build from an explicit ordered pair, checking sizes and the numbering convention.
    pub fn new(i0: Marks, i1: Marks, sig: &Signature) -> Result<TwoBlockPartition> {
        let n = sig.n();
        if !i0.is_disjoint(i1) || (i0 | i1) != Marks::full(n) {
            return Err(Error::InvalidPartition(format!(
                "{i0}|{i1} does not partition 1..{n}"
            )));
        }
        if i0.len() < 2 || i1.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "{i0}|{i1} has a block of size < 2"
            )));
        }
        let mu0 = sig.mu(i0);
        if mu0 > Rational::one() {
            return Err(Error::NumberingViolation(format!("{i0} has weight {mu0}")));
        }
        Ok(TwoBlockPartition { i0, i1 })
    }

    pub fn split(&self) -> Split {
        let n = (self.i0 | self.i1).len();
        Split::new(n, self.i0).expect("valid two-block partition")
    }
}

/// `mu_S = 1 - mu(I0)`; fails when the numbering convention is violated.
pub fn boundary_weight(part: &TwoBlockPartition, sig: &Signature) -> Result<Rational> {
    let mu0 = sig.mu(part.i0);
    if mu0 > Rational::one() {
        return Err(Error::NumberingViolation(format!(
            "{} has weight {mu0}",
            part.i0
        )));
    }
    Ok(Rational::one() - mu0)
}

/// `d * mu_S` as an integer: `d + sum_{i in I0} k_i`.
pub fn boundary_weight_scaled(part: &TwoBlockPartition, sig: &Signature) -> i64 {
    sig.d() + sig.k_sum(part.i0)
}

/// Every boundary divisor of `M_0,n`, canonically numbered, sorted by `(I0, I1)` marking lists.
/// There are `2^(n-1) - n - 1` of them.
pub fn enumerate_two_block(sig: &Signature) -> Vec<TwoBlockPartition> {
    let mut out: Vec<_> = all_splits(sig.n())
        .into_iter()
        .map(|s| TwoBlockPartition::from_split(s, sig))
        .collect();
    out.sort_by_key(|p| (p.i0.to_vec(), p.i1.to_vec()));
    out
}

/// An ordered partition `{I0, I1, ..., I_r}` indexing a boundary divisor of the blow-up.
///
/// Canonical order: `I0` first, then the remaining blocks by least element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiBlockPartition {
    blocks: Vec<Marks>,
}

impl MultiBlockPartition {
    /// Build from blocks with `I0` first; the tail is sorted into canonical order.
    pub fn new(n: usize, blocks: Vec<Marks>) -> Result<MultiBlockPartition> {
        if blocks.len() < 2 {
            return Err(Error::InvalidPartition("need at least two blocks".into()));
        }
        let mut seen = Marks::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if !seen.is_disjoint(*b) {
                return Err(Error::InvalidPartition(format!(
                    "block {b} overlaps another block"
                )));
            }
            seen |= *b;
        }
        if seen != Marks::full(n) {
            return Err(Error::InvalidPartition(format!(
                "blocks do not cover 1..{n}"
            )));
        }
        let mut blocks = blocks;
        blocks[1..].sort_by_key(|b| Marks::min(*b));
        Ok(MultiBlockPartition { blocks })
    }

    pub fn from_two_block(p: &TwoBlockPartition) -> MultiBlockPartition {
        MultiBlockPartition {
            blocks: vec![p.i0, p.i1],
        }
    }

    pub fn blocks(&self) -> &[Marks] {
        &self.blocks
    }

    pub fn i0(&self) -> Marks {
        self.blocks[0]
    }

    /// `r`, the number of blocks after `I0`.
    pub fn r(&self) -> usize {
        self.blocks.len() - 1
    }

    /// `|S|`, the number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_two_block(&self) -> Option<TwoBlockPartition> {
        (self.r() == 1).then(|| TwoBlockPartition {
            i0: self.blocks[0],
            i1: self.blocks[1],
        })
    }

    /// Membership test for `P-hat(mu)` with the blocks in their stored roles.
    pub fn is_in_p_hat(&self, sig: &Signature) -> bool {
        let one = Rational::one();
        if self.r() == 1 {
            return self.blocks[0].len() >= 2
                && self.blocks[1].len() >= 2
                && sig.mu(self.blocks[0]) <= one;
        }
        sig.mu(self.blocks[0]) < one && self.blocks[1..].iter().all(|b| sig.mu(*b) > one)
    }

    pub fn permute(&self, perm: &[usize]) -> MultiBlockPartition {
        let n = perm.len();
        let blocks = self.blocks.iter().map(|b| b.permute(perm)).collect();
        MultiBlockPartition::new(n, blocks).expect("relabeling preserves partitions")
    }

    /// Ordering key used for listings: `r`, then block contents.
    pub fn sort_key(&self) -> (usize, Vec<Vec<usize>>) {
        (self.r(), self.blocks.iter().map(|b| b.to_vec()).collect())
    }
}

impl PartialOrd for MultiBlockPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiBlockPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for MultiBlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, "|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// `P-hat(mu)`: every two-block partition, plus every partition `{I0, ..., I_r}` with
/// `r >= 2`, `mu(I0) < 1` and `mu(I_j) > 1` for `j >= 1`. Blocks are nonempty.
pub fn enumerate_p_hat(sig: &Signature) -> Vec<MultiBlockPartition> {
    let mut out: Vec<_> = enumerate_two_block(sig)
        .iter()
        .map(MultiBlockPartition::from_two_block)
        .collect();
    let n = sig.n();
    let full = Marks::full(n);
    let one = Rational::one();
    // Heavy blocks weigh > 1 each and the total is 2, so r >= 2 forces mu(I0) < 0.
    let mut sub = full.0;
    while sub != 0 {
        let i0 = Marks(sub);
        sub = (sub - 1) & full.0;
        if i0 == full || sig.mu(i0) >= Rational::zero() {
            continue;
        }
        let rest = full - i0;
        let mut heavy = Vec::new();
        heavy_partitions(sig, rest, &one, &mut Vec::new(), &mut heavy);
        for blocks in heavy {
            if blocks.len() < 2 {
                continue;
            }
            let mut all = vec![i0];
            all.extend(blocks);
            out.push(MultiBlockPartition::new(n, all).expect("constructed partition"));
        }
    }
    out.sort();
    out
}

/// All partitions of `rest` into blocks of weight > 1. Blocks come out ordered by least element.
fn heavy_partitions(
    sig: &Signature,
    rest: Marks,
    one: &Rational,
    current: &mut Vec<Marks>,
    out: &mut Vec<Vec<Marks>>,
) {
    let Some(first) = rest.min() else {
        out.push(current.clone());
        return;
    };
    let lead = Marks::singleton(first);
    let others = rest - lead;
    let mut sub = others.0;
    loop {
        let block = lead | Marks(sub);
        if sig.mu(block) > *one {
            current.push(block);
            heavy_partitions(sig, rest - block, one, current, out);
            current.pop();
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & others.0;
    }
}

/// `m(S) = prod_{j>=1} d (mu(I_j) - 1)`. For two-block partitions this is `d * mu_S`.
pub fn m_value(part: &MultiBlockPartition, sig: &Signature) -> Result<BigInt> {
    if let Some(two) = part.as_two_block() {
        if !part.is_in_p_hat(sig) {
            return Err(Error::NotInPHat(part.to_string()));
        }
        return Ok(BigInt::from(boundary_weight_scaled(&two, sig)));
    }
    let factors = m_factors(part, sig)?;
    Ok(factors.iter().product())
}

/// The factors `m_j = d (mu(I_j) - 1) = -d - sum_{i in I_j} k_i`, `j = 1..r`, for `r >= 2`.
pub fn m_factors(part: &MultiBlockPartition, sig: &Signature) -> Result<Vec<BigInt>> {
    if part.r() < 2 {
        return Err(Error::TwoBlockHasNoOrders);
    }
    if !part.is_in_p_hat(sig) {
        return Err(Error::NotInPHat(part.to_string()));
    }
    Ok(part.blocks()[1..]
        .iter()
        .map(|b| BigInt::from(-sig.d() - sig.k_sum(*b)))
        .collect())
}

/// Vanishing order of each node coordinate `t_j` along the divisor: `(prod_i m_i) / m_j`.
pub fn vanishing_orders(part: &MultiBlockPartition, sig: &Signature) -> Result<Vec<BigInt>> {
    Ok(vanishing_orders_from_factors(&m_factors(part, sig)?))
}

/// `(prod_i m_i) / m_j` for each `j`; all factors must be positive.
pub fn vanishing_orders_from_factors(m: &[BigInt]) -> Vec<BigInt> {
    debug_assert!(m.iter().all(|x| x.is_positive()));
    let total: BigInt = m.iter().product();
    m.iter().map(|mj| &total / mj).collect()
}
