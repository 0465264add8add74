//! The exceptional divisor of the blow-up as a Weil divisor.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::strata::partition::{enumerate_p_hat, m_value, MultiBlockPartition};
use crate::strata::signature::Signature;
use crate::Rational;

/// A formal rational combination of boundary divisors of the blow-up.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeilDivisorData {
    pub terms: BTreeMap<MultiBlockPartition, Rational>,
}

impl WeilDivisorData {
    pub fn coefficient(&self, part: &MultiBlockPartition) -> Rational {
        self.terms.get(part).cloned().unwrap_or_else(Rational::zero)
    }

    /// True when every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    /// The terms with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = (&MultiBlockPartition, &Rational)> {
        self.terms.iter().filter(|(_, c)| !c.is_zero())
    }
}

/// `(|S| - 2) * m(S)` for every `S` in `P-hat(mu)`. Two-block terms are present with
/// coefficient 0.
pub fn exceptional_divisor(sig: &Signature) -> WeilDivisorData {
    let terms = enumerate_p_hat(sig)
        .into_iter()
        .map(|p| {
            let c = if p.r() < 2 {
                BigInt::zero()
            } else {
                BigInt::from(p.len() - 2) * m_value(&p, sig).expect("element of P-hat")
            };
            (p, Rational::from_integer(c))
        })
        .collect();
    WeilDivisorData { terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marks::Marks;
    use crate::strata::signature::validate_signature;

    #[test]
    fn trivial_for_five_poles_one_zero() {
        let sig = validate_signature(2, &[-1, -1, -1, -1, -1, 1]).unwrap();
        let e = exceptional_divisor(&sig);
        assert_eq!(e.terms.len(), 25);
        assert!(e.is_zero());
    }

    #[test]
    fn star_coefficient() {
        let sig = validate_signature(2, &[2, -1, -1, -1, -1, -1, -1]).unwrap();
        let e = exceptional_divisor(&sig);
        let s = MultiBlockPartition::new(
            7,
            vec![
                Marks::from_iter([1]),
                Marks::from_iter([2, 3, 4]),
                Marks::from_iter([5, 6, 7]),
            ],
        )
        .unwrap();
        assert_eq!(e.coefficient(&s), Rational::from_integer(1.into()));
        assert!(!e.is_zero());
        for (p, c) in &e.terms {
            assert_eq!(p.r() < 2, c.is_zero());
        }
    }
}
