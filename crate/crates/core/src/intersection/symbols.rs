//! Divisor classes on `M_0,n` as formal combinations of `psi_i` and `D_S`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::strata::partition::{Split, TwoBlockPartition};
use crate::Rational;

/// A generator of the divisor group: a cotangent class or a boundary divisor.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum DivisorSymbol {
    Psi(usize),
    Boundary(Split),
}

impl DivisorSymbol {
    /// Check that the symbol lives on `M_0,n`.
    pub fn check(self, n: usize) -> Result<()> {
        match self {
            DivisorSymbol::Psi(i) if i == 0 || i > n => {
                Err(Error::InvalidMarking { marking: i, n })
            }
            DivisorSymbol::Boundary(s) if s.n() != n => Err(Error::InvalidPartition(format!(
                "split {s} belongs to n = {}, not {n}",
                s.n()
            ))),
            _ => Ok(()),
        }
    }

    pub fn is_psi(self) -> bool {
        matches!(self, DivisorSymbol::Psi(_))
    }

    pub fn permute(self, perm: &[usize]) -> DivisorSymbol {
        match self {
            DivisorSymbol::Psi(i) => DivisorSymbol::Psi(perm[i - 1]),
            DivisorSymbol::Boundary(s) => DivisorSymbol::Boundary(s.permute(perm)),
        }
    }
}

impl From<Split> for DivisorSymbol {
    fn from(s: Split) -> Self {
        DivisorSymbol::Boundary(s)
    }
}

impl From<TwoBlockPartition> for DivisorSymbol {
    fn from(p: TwoBlockPartition) -> Self {
        DivisorSymbol::Boundary(p.split())
    }
}

impl fmt::Display for DivisorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisorSymbol::Psi(i) => write!(f, "psi{i}"),
            DivisorSymbol::Boundary(s) => write!(f, "D[{s}]"),
        }
    }
}

/// A finite rational combination of divisor symbols. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DivisorExpression {
    terms: BTreeMap<DivisorSymbol, Rational>,
}

impl DivisorExpression {
    pub fn new() -> DivisorExpression {
        DivisorExpression::default()
    }

    pub fn symbol(sym: DivisorSymbol) -> DivisorExpression {
        let mut e = DivisorExpression::new();
        e.add_term(sym, Rational::from_integer(1.into()));
        e
    }

    pub fn psi(i: usize) -> DivisorExpression {
        DivisorExpression::symbol(DivisorSymbol::Psi(i))
    }

    pub fn boundary(s: Split) -> DivisorExpression {
        DivisorExpression::symbol(DivisorSymbol::Boundary(s))
    }

    pub fn add_term(&mut self, sym: DivisorSymbol, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(sym).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&sym);
        }
    }

    pub fn add(&self, other: &DivisorExpression) -> DivisorExpression {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> DivisorExpression {
        let mut out = DivisorExpression::new();
        for (s, x) in &self.terms {
            out.add_term(*s, x * c);
        }
        out
    }

    pub fn sub(&self, other: &DivisorExpression) -> DivisorExpression {
        self.add(&other.scale(&Rational::from_integer((-1).into())))
    }

    pub fn coefficient(&self, sym: DivisorSymbol) -> Rational {
        self.terms.get(&sym).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DivisorSymbol, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of `psi` terms.
    pub fn psi_count(&self) -> usize {
        self.terms.keys().filter(|s| s.is_psi()).count()
    }

    pub fn check(&self, n: usize) -> Result<()> {
        self.terms.keys().try_for_each(|s| s.check(n))
    }

    pub fn permute(&self, perm: &[usize]) -> DivisorExpression {
        let mut out = DivisorExpression::new();
        for (s, c) in &self.terms {
            out.add_term(s.permute(perm), c.clone());
        }
        out
    }
}

impl fmt::Display for DivisorExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{s}")?;
        }
        Ok(())
    }
}
