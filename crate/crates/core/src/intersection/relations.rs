//! Standard linear relations among divisors on `M_0,n`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::intersection::symbols::DivisorExpression;
use crate::marks::Marks;
use crate::strata::partition::all_splits;
use crate::Rational;

fn check_distinct(n: usize, idx: &[usize]) -> Result<()> {
    for (a, &i) in idx.iter().enumerate() {
        if i == 0 || i > n {
            return Err(Error::InvalidMarking { marking: i, n });
        }
        if idx[..a].contains(&i) {
            return Err(Error::InvalidPartition(format!("marking {i} repeated")));
        }
    }
    Ok(())
}

/// Sum of `D_S` over splits with `together` on one side and `apart` on the other.
fn separating_sum(n: usize, together: Marks, apart: Marks) -> DivisorExpression {
    let mut e = DivisorExpression::new();
    for s in all_splits(n) {
        let (a, b) = (s.near(), s.far());
        if (together.is_subset(a) && apart.is_subset(b))
            || (together.is_subset(b) && apart.is_subset(a))
        {
            e.add_term(s.into(), Rational::one());
        }
    }
    e
}

/// `sum_{ij|kl} D_S - sum_{ik|jl} D_S`, which is zero in the Chow ring.
pub fn keel_relation(
    n: usize,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<DivisorExpression> {
    check_distinct(n, &[i, j, k, l])?;
    let m = |a: usize, b: usize| Marks::from_iter([a, b]);
    Ok(separating_sum(n, m(i, j), m(k, l)).sub(&separating_sum(n, m(i, k), m(j, l))))
}

/// `sum D_S` over splits with `i` on one side and `j, k` on the other; equals `psi_i`.
pub fn psi_boundary_expression(
    n: usize,
    i: usize,
    j: usize,
    k: usize,
) -> Result<DivisorExpression> {
    check_distinct(n, &[i, j, k])?;
    // i alone on its side is excluded automatically: sides have size >= 2
    let mut e = DivisorExpression::new();
    for s in all_splits(n) {
        for (a, b) in [(s.near(), s.far()), (s.far(), s.near())] {
            if a.contains(i) && b.contains(j) && b.contains(k) {
                e.add_term(s.into(), Rational::one());
            }
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersection::engine::product_number;
    use crate::strata::partition::Split;

    #[test]
    fn keel_on_four_points() {
        let e = keel_relation(4, 1, 2, 3, 4).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(
            product_number(4, &[e]).unwrap(),
            Rational::from_integer(0.into())
        );
    }

    #[test]
    fn psi_on_four_points() {
        let e = psi_boundary_expression(4, 1, 2, 3).unwrap();
        let s = Split::new(4, Marks::from_iter([1, 4])).unwrap();
        assert_eq!(e, DivisorExpression::boundary(s));
        assert_eq!(product_number(4, &[e]).unwrap(), Rational::one());
    }

    #[test]
    fn keel_pairs_to_zero_on_five_points() {
        let e = keel_relation(5, 1, 2, 3, 4).unwrap();
        let d45 = DivisorExpression::boundary(Split::new(5, Marks::from_iter([4, 5])).unwrap());
        assert_eq!(
            product_number(5, &[e.clone(), d45]).unwrap(),
            Rational::from_integer(0.into())
        );
        assert_eq!(
            product_number(5, &[e, DivisorExpression::psi(1)]).unwrap(),
            Rational::from_integer(0.into())
        );
    }

    #[test]
    fn rejects_repeats() {
        assert!(keel_relation(5, 1, 1, 2, 3).is_err());
        assert!(psi_boundary_expression(5, 1, 2, 9).is_err());
    }
}
