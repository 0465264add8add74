//! Products of divisors on `M_0,n` in the basis of psi-decorated boundary strata.
//!
//! A stratum is a set of pairwise compatible splits (the edges of its dual tree); every
//! flag of the tree carries a psi exponent. Boundary divisors act by refining the tree,
//! or by the excess class `-psi' - psi''` on an existing edge; `psi_i` raises the leg
//! exponent of marking `i`.

use std::ops::{AddAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::intersection::symbols::{DivisorExpression, DivisorSymbol};
use crate::marks::Marks;
use crate::strata::partition::Split;
use crate::strata::tree::StableTree;
use crate::Rational;

/// An edge of a decorated stratum: the split's far side (not containing marking 1) and
/// the psi exponents on its two half-edges.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DecoratedEdge {
    pub far: Marks,
    /// Exponent at the vertex on the marking-1 side.
    pub near_psi: u8,
    /// Exponent at the vertex on the far side.
    pub far_psi: u8,
}

/// A boundary stratum with psi exponents on all flags. The edge list is sorted by
/// far side, which makes the representation canonical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DecoratedStratum {
    edges: Vec<DecoratedEdge>,
    legs: Vec<u8>,
}

/// Vertex bookkeeping of a decorated stratum. Vertex 0 carries marking 1; vertex `e + 1`
/// sits just below edge `e`.
struct Layout {
    /// Vertex of each marking, 0-based by marking.
    leg_vertex: Vec<usize>,
    /// Markings on each vertex.
    own: Vec<Marks>,
    /// Vertex at the near end of each edge.
    parent: Vec<usize>,
    /// `flags - 3 - psi` per vertex; negative means the class vanishes.
    slack: Vec<i32>,
}

impl DecoratedStratum {
    fn bare(n: usize) -> DecoratedStratum {
        DecoratedStratum {
            edges: Vec::new(),
            legs: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.legs.len()
    }

    pub fn edges(&self) -> &[DecoratedEdge] {
        &self.edges
    }

    /// Psi exponent on the leg of marking `i`.
    pub fn leg_power(&self, i: usize) -> u8 {
        self.legs[i - 1]
    }

    pub fn degree(&self) -> usize {
        self.edges.len()
            + self.legs.iter().map(|&a| a as usize).sum::<usize>()
            + self
                .edges
                .iter()
                .map(|e| (e.near_psi + e.far_psi) as usize)
                .sum::<usize>()
    }

    /// The underlying dual tree, in canonical form.
    pub fn tree(&self) -> StableTree {
        let n = self.n();
        if self.edges.is_empty() {
            return StableTree::smooth(n);
        }
        let splits: Vec<Split> = self
            .edges
            .iter()
            .map(|e| Split::new(n, e.far).expect("stored splits are valid"))
            .collect();
        StableTree::from_splits(n, &splits).expect("stored splits are compatible")
    }

    /// Parent of each edge: the index of the smallest edge strictly containing it.
    fn parents(&self) -> Vec<Option<usize>> {
        self.edges
            .iter()
            .map(|e| {
                let mut best: Option<usize> = None;
                for (k, c) in self.edges.iter().enumerate() {
                    if c.far != e.far
                        && e.far.is_subset(c.far)
                        && best.is_none_or(|b| c.far.len() < self.edges[b].far.len())
                    {
                        best = Some(k);
                    }
                }
                best
            })
            .collect()
    }

    fn layout(&self) -> Layout {
        let parents = self.parents();
        let v = self.edges.len() + 1;
        let mut own = vec![Marks::full(self.n())];
        own.extend(self.edges.iter().map(|e| e.far));
        let mut flags = vec![0i32; v];
        let mut psi = vec![0i32; v];
        let mut parent = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let p = parents[k].map_or(0, |p| p + 1);
            parent.push(p);
            own[p] = own[p] - e.far;
            flags[p] += 1;
            psi[p] += e.near_psi as i32;
            flags[k + 1] += 1;
            psi[k + 1] += e.far_psi as i32;
        }
        let mut leg_vertex = vec![0; self.n()];
        for (x, m) in own.iter().enumerate() {
            flags[x] += m.len() as i32;
            for i in m.iter() {
                leg_vertex[i - 1] = x;
                psi[x] += self.legs[i - 1] as i32;
            }
        }
        let slack = (0..v).map(|x| flags[x] - 3 - psi[x]).collect();
        Layout {
            leg_vertex,
            own,
            parent,
            slack,
        }
    }

    /// `int psi^a` over the stratum: the product over vertices of multinomials
    /// `(m_v - 3)! / prod a!`, or 0 when some vertex is not of top degree.
    fn integral(&self) -> BigInt {
        let parents = self.parents();
        let mut own = vec![Marks::full(self.n())];
        own.extend(self.edges.iter().map(|e| e.far));
        let mut exps: Vec<Vec<u8>> = vec![Vec::new(); self.edges.len() + 1];
        for (k, e) in self.edges.iter().enumerate() {
            let p = parents[k].map_or(0, |p| p + 1);
            own[p] = own[p] - e.far;
            exps[p].push(e.near_psi);
            exps[k + 1].push(e.far_psi);
        }
        for (v, m) in own.iter().enumerate() {
            exps[v].extend(m.iter().map(|i| self.legs[i - 1]));
        }
        let mut total = BigInt::one();
        for a in exps {
            let dim = a.len() - 3;
            let sum: usize = a.iter().map(|&x| x as usize).sum();
            if sum != dim {
                return BigInt::zero();
            }
            let mut num = factorial(dim);
            for &x in &a {
                num /= factorial(x as usize);
            }
            total *= num;
        }
        total
    }

    /// Multiply by one symbol, keeping only strata on which no vertex carries more psi
    /// exponents than its dimension; returns the results with signs.
    fn times(&self, lay: &Layout, sym: DivisorSymbol, out: &mut Vec<(DecoratedStratum, i8)>) {
        match sym {
            DivisorSymbol::Psi(i) => {
                if lay.slack[lay.leg_vertex[i - 1]] >= 1 {
                    let mut s = self.clone();
                    s.legs[i - 1] += 1;
                    out.push((s, 1));
                }
            }
            DivisorSymbol::Boundary(split) => {
                let f = split.far();
                let mut equal = None;
                // far sides never contain marking 1, so compatible means nested or disjoint
                let mut host: Option<usize> = None;
                for (k, e) in self.edges.iter().enumerate() {
                    if e.far == f {
                        equal = Some(k);
                    } else if !(e.far & f).is_empty()
                        && !(e.far - f).is_empty()
                        && !(f - e.far).is_empty()
                    {
                        return;
                    } else if f.is_subset(e.far)
                        && host.is_none_or(|h| e.far.len() < self.edges[h].far.len())
                    {
                        host = Some(k);
                    }
                }
                if let Some(k) = equal {
                    // excess class -psi' - psi'' on the existing edge
                    if lay.slack[lay.parent[k]] >= 1 {
                        let mut a = self.clone();
                        a.edges[k].near_psi += 1;
                        out.push((a, -1));
                    }
                    if lay.slack[k + 1] >= 1 {
                        let mut b = self.clone();
                        b.edges[k].far_psi += 1;
                        out.push((b, -1));
                    }
                    return;
                }
                // the new edge splits vertex v; side A is the part below it
                let v = host.map_or(0, |h| h + 1);
                let mine = lay.own[v] & f;
                let mut flags_a = mine.len() as i32 + 1;
                let mut psi_a: i32 = mine.iter().map(|i| self.legs[i - 1] as i32).sum();
                for (c, e) in self.edges.iter().enumerate() {
                    if lay.parent[c] == v && e.far.is_subset(f) {
                        flags_a += 1;
                        psi_a += e.near_psi as i32;
                    }
                }
                let slack_a = flags_a - 3 - psi_a;
                if slack_a >= 0 && lay.slack[v] - slack_a > 0 {
                    let mut s = self.clone();
                    let pos = s.edges.partition_point(|e| e.far < f);
                    s.edges.insert(
                        pos,
                        DecoratedEdge {
                            far: f,
                            near_psi: 0,
                            far_psi: 0,
                        },
                    );
                    out.push((s, 1));
                }
            }
        }
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, x| acc * x)
}

/// A rational combination of decorated strata, all of the same degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChowElement {
    n: usize,
    degree: usize,
    terms: Terms<Rational>,
}

/// Term count above which multiplication is split across threads.
const PARALLEL_THRESHOLD: usize = 2048;

impl ChowElement {
    /// The fundamental class of `M_0,n`.
    pub fn unit(n: usize) -> ChowElement {
        let mut terms = Terms::default();
        terms.insert(DecoratedStratum::bare(n), Rational::one());
        ChowElement {
            n,
            degree: 0,
            terms,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DecoratedStratum, &Rational)> {
        self.terms.iter()
    }

    /// Terms sorted by stratum, for deterministic output.
    pub fn sorted_terms(&self) -> Vec<(&DecoratedStratum, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn multiply(&self, sym: DivisorSymbol) -> Result<ChowElement> {
        self.multiply_expr(&DivisorExpression::symbol(sym))
    }

    /// Multiply by a divisor expression, expanding linearly and merging equal strata.
    pub fn multiply_expr(&self, expr: &DivisorExpression) -> Result<ChowElement> {
        let n = self.n;
        let dim = n - 3;
        if self.degree >= dim {
            return Err(Error::DegreeOverflow {
                degree: self.degree,
                n,
                dim,
            });
        }
        expr.check(n)?;
        let syms: Vec<(DivisorSymbol, Rational)> =
            expr.iter().map(|(s, c)| (*s, c.clone())).collect();
        Ok(ChowElement {
            n,
            degree: self.degree + 1,
            terms: multiply_terms(&self.terms, &syms),
        })
    }

    /// `int self * expr` for a class of degree `n - 4`, without materializing the product.
    pub fn pair_with(&self, expr: &DivisorExpression) -> Result<Rational> {
        let dim = self.n - 3;
        if self.degree + 1 != dim {
            return Err(Error::WrongDegree {
                expected: dim - 1,
                found: self.degree,
            });
        }
        expr.check(self.n)?;
        let syms: Vec<(DivisorSymbol, Rational)> =
            expr.iter().map(|(s, c)| (*s, c.clone())).collect();
        Ok(pair_terms(self.n, &self.terms, &syms))
    }

    /// Degree of a top-degree class.
    pub fn integrate(&self) -> Result<Rational> {
        let dim = self.n - 3;
        if self.degree != dim {
            return Err(Error::WrongDegree {
                expected: dim,
                found: self.degree,
            });
        }
        let mut total = Rational::zero();
        for (s, c) in &self.terms {
            let v = s.integral();
            if !v.is_zero() {
                total += c * Rational::from_integer(v);
            }
        }
        Ok(total)
    }
}

type Terms<C> = FxHashMap<DecoratedStratum, C>;

/// Coefficient rings the engine can run over: exact rationals, or integers once the
/// denominators of every factor have been cleared.
trait Coeff: Clone + Zero + Send + Sync + Neg<Output = Self> + AddAssign + SubAssign {
    fn mul_ref(&self, other: &Self) -> Self;
    fn from_int(v: BigInt) -> Self;
}

impl Coeff for Rational {
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn from_int(v: BigInt) -> Self {
        Rational::from_integer(v)
    }
}

impl Coeff for BigInt {
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn from_int(v: BigInt) -> Self {
        v
    }
}

fn accumulate<C: Coeff>(acc: &mut Terms<C>, s: DecoratedStratum, x: C) {
    use std::collections::hash_map::Entry;
    match acc.entry(s) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += x;
            if o.get().is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(x);
        }
    }
}

fn merge<C: Coeff>(mut a: Terms<C>, mut b: Terms<C>) -> Terms<C> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    for (s, x) in b {
        accumulate(&mut a, s, x);
    }
    a
}

fn multiply_terms<C: Coeff>(terms: &Terms<C>, syms: &[(DivisorSymbol, C)]) -> Terms<C> {
    let step = |acc: &mut Terms<C>, (stratum, coeff): (&DecoratedStratum, &C)| {
        let mut buf = Vec::new();
        let lay = stratum.layout();
        for (sym, c) in syms {
            buf.clear();
            stratum.times(&lay, *sym, &mut buf);
            if buf.is_empty() {
                continue;
            }
            let base = coeff.mul_ref(c);
            for (s, sign) in buf.drain(..) {
                let x = if sign < 0 {
                    -base.clone()
                } else {
                    base.clone()
                };
                accumulate(acc, s, x);
            }
        }
    };
    if terms.len() >= PARALLEL_THRESHOLD && rayon::current_num_threads() > 1 {
        let parts: Vec<(&DecoratedStratum, &C)> = terms.iter().collect();
        parts
            .par_chunks(256)
            .fold(Terms::default, |mut acc, chunk| {
                for &t in chunk {
                    step(&mut acc, t);
                }
                acc
            })
            .reduce(Terms::default, merge)
    } else {
        let mut acc = Terms::default();
        for t in terms {
            step(&mut acc, t);
        }
        acc
    }
}

/// Coefficients of an expression arranged for lookup: by marking for `psi`, by far side
/// for boundary divisors.
struct SymbolTable<C> {
    psi: Vec<Option<C>>,
    boundary: FxHashMap<Marks, C>,
}

impl<C: Coeff> SymbolTable<C> {
    fn new(n: usize, syms: &[(DivisorSymbol, C)]) -> SymbolTable<C> {
        let mut psi = vec![None; n];
        let mut boundary = FxHashMap::default();
        for (s, c) in syms {
            match s {
                DivisorSymbol::Psi(i) => psi[i - 1] = Some(c.clone()),
                DivisorSymbol::Boundary(split) => {
                    boundary.insert(split.far(), c.clone());
                }
            }
        }
        SymbolTable { psi, boundary }
    }
}

fn multinomial(exps: &[u8]) -> BigInt {
    let mut out = factorial(exps.len() - 3);
    for &a in exps {
        out /= factorial(a as usize);
    }
    out
}

#[derive(Clone, Copy)]
enum Flag {
    Leg(usize),
    /// Near half of a child edge.
    Child(usize),
    /// Far half of the edge above the vertex.
    Up(usize),
}

impl DecoratedStratum {
    /// `int self * D` for a stratum of degree `n - 4`. Exactly one vertex has room for one
    /// more psi exponent, and only symbols acting there contribute: its legs, its half-edges
    /// (through the excess class) and the splittings of that vertex.
    fn top_pairing<C: Coeff>(&self, table: &SymbolTable<C>) -> C {
        let lay = self.layout();
        let Some(hot) = lay.slack.iter().position(|&x| x == 1) else {
            return C::zero();
        };
        let mut flags: Vec<(Flag, Marks, u8)> = Vec::new();
        if hot > 0 {
            let e = &self.edges[hot - 1];
            flags.push((Flag::Up(hot - 1), e.far, e.far_psi));
        }
        for i in lay.own[hot].iter() {
            flags.push((Flag::Leg(i), Marks::singleton(i), self.legs[i - 1]));
        }
        for (c, e) in self.edges.iter().enumerate() {
            if lay.parent[c] == hot {
                flags.push((Flag::Child(c), e.far, e.near_psi));
            }
        }
        // every other vertex is already of top degree
        let mut base = BigInt::one();
        for (v, own) in lay.own.iter().enumerate() {
            if v == hot {
                continue;
            }
            let mut exps: Vec<u8> = own.iter().map(|i| self.legs[i - 1]).collect();
            if v > 0 {
                exps.push(self.edges[v - 1].far_psi);
            }
            for (c, e) in self.edges.iter().enumerate() {
                if lay.parent[c] == v {
                    exps.push(e.near_psi);
                }
            }
            base *= multinomial(&exps);
        }
        let exps: Vec<u8> = flags.iter().map(|f| f.2).collect();
        let mut total = C::zero();
        for (k, (flag, _, _)) in flags.iter().enumerate() {
            let coeff = match flag {
                Flag::Leg(i) => table.psi[i - 1].as_ref(),
                Flag::Child(c) | Flag::Up(c) => table.boundary.get(&self.edges[*c].far),
            };
            let Some(coeff) = coeff else { continue };
            let mut bumped = exps.clone();
            bumped[k] += 1;
            let x = coeff.mul_ref(&C::from_int(multinomial(&bumped)));
            match flag {
                Flag::Leg(_) => total += x,
                _ => total -= x,
            }
        }
        // splittings: the flag holding marking 1's side stays on the near vertex
        let outer = 0;
        let inner: Vec<usize> = (0..flags.len()).filter(|&k| k != outer).collect();
        let m = flags.len();
        for mask in 1u64..(1u64 << inner.len()) {
            let size = mask.count_ones() as usize;
            if size < 2 || m - size < 2 {
                continue;
            }
            let mut far = Marks::EMPTY;
            let mut a_exps = vec![0u8];
            let mut b_exps = vec![0u8];
            for (bit, &k) in inner.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    far |= flags[k].1;
                    a_exps.push(flags[k].2);
                } else {
                    b_exps.push(flags[k].2);
                }
            }
            b_exps.push(flags[outer].2);
            let a_sum: usize = a_exps.iter().map(|&x| x as usize).sum();
            if a_sum + 3 != a_exps.len() {
                continue;
            }
            if let Some(coeff) = table.boundary.get(&far) {
                total += coeff.mul_ref(&C::from_int(multinomial(&a_exps) * multinomial(&b_exps)));
            }
        }
        total.mul_ref(&C::from_int(base))
    }
}

fn pair_terms<C: Coeff>(n: usize, terms: &Terms<C>, syms: &[(DivisorSymbol, C)]) -> C {
    let table = SymbolTable::new(n, syms);
    let term_value =
        |(stratum, coeff): (&DecoratedStratum, &C)| stratum.top_pairing(&table).mul_ref(coeff);
    let add = |mut a: C, b: C| {
        a += b;
        a
    };
    if terms.len() >= PARALLEL_THRESHOLD && rayon::current_num_threads() > 1 {
        let parts: Vec<(&DecoratedStratum, &C)> = terms.iter().collect();
        parts
            .par_chunks(256)
            .map(|chunk| chunk.iter().map(|&t| term_value(t)).fold(C::zero(), add))
            .reduce(C::zero, add)
    } else {
        terms.iter().map(term_value).fold(C::zero(), add)
    }
}

/// Clear the denominators of an expression: integer coefficients and the common denominator.
fn integral_coefficients(expr: &DivisorExpression) -> (Vec<(DivisorSymbol, BigInt)>, BigInt) {
    let den = expr
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let syms = expr
        .iter()
        .map(|(s, c)| (*s, c.numer() * (&den / c.denom())))
        .collect();
    (syms, den)
}

/// The fundamental class of `M_0,n`.
pub fn unit(n: usize) -> ChowElement {
    ChowElement::unit(n)
}

pub fn multiply(elem: &ChowElement, sym: DivisorSymbol) -> Result<ChowElement> {
    elem.multiply(sym)
}

pub fn integrate(elem: &ChowElement) -> Result<Rational> {
    elem.integrate()
}

/// `int_{M_0,n} D_1 ... D_{n-3}` for divisor expressions `D_k`.
///
/// Factors with fewer psi terms are multiplied first; the result does not depend on order.
pub fn product_number(n: usize, factors: &[DivisorExpression]) -> Result<Rational> {
    if n < 3 {
        return Err(Error::TooFewMarks(n));
    }
    if factors.len() != n - 3 {
        return Err(Error::FactorCount {
            expected: n - 3,
            found: factors.len(),
        });
    }
    for f in factors {
        f.check(n)?;
    }
    let mut order: Vec<&DivisorExpression> = factors.iter().collect();
    order.sort_by_key(|f| (f.psi_count(), f.len()));
    let Some(last) = order.pop() else {
        return ChowElement::unit(n).integrate();
    };
    let mut denominator = BigInt::one();
    let mut terms: Terms<BigInt> = Terms::default();
    terms.insert(DecoratedStratum::bare(n), BigInt::one());
    for f in order {
        let (syms, den) = integral_coefficients(f);
        denominator *= den;
        terms = multiply_terms(&terms, &syms);
        if terms.is_empty() {
            return Ok(Rational::zero());
        }
    }
    let (syms, den) = integral_coefficients(last);
    denominator *= den;
    Ok(Rational::new(pair_terms(n, &terms, &syms), denominator))
}

/// `int psi_1^{a_1} ... psi_n^{a_n}` through the engine.
pub fn psi_monomial(n: usize, exponents: &[usize]) -> Result<Rational> {
    let mut factors = Vec::new();
    for (i, &a) in exponents.iter().enumerate() {
        factors.extend(std::iter::repeat_n(DivisorExpression::psi(i + 1), a));
    }
    product_number(n, &factors)
}
