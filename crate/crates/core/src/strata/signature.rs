use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::marks::{Marks, MAX_MARKS};
use crate::Rational;

/// Exact weights `mu_i = -k_i / d` of the marked points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    mu: Vec<Rational>,
}

impl WeightVector {
    /// Weight of marking `i` (1-based).
    pub fn get(&self, i: usize) -> &Rational {
        &self.mu[i - 1]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `mu(I)`, the total weight of a set of markings.
    pub fn of(&self, set: Marks) -> Rational {
        set.iter()
            .fold(Rational::zero(), |acc, i| acc + &self.mu[i - 1])
    }
}

/// A validated pair `(d, kappa)`: `d >= 2`, `n >= 3`, every `k_i >= 1 - d`
/// and `sum k_i = -2d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    d: i64,
    kappa: Vec<i64>,
    weights: WeightVector,
}

impl Signature {
    pub fn new(d: i64, kappa: Vec<i64>) -> Result<Signature> {
        if d < 2 {
            return Err(Error::BadD(d));
        }
        let n = kappa.len();
        if n < 3 {
            return Err(Error::TooFewMarks(n));
        }
        if n > MAX_MARKS {
            return Err(Error::TooManyMarks { n, max: MAX_MARKS });
        }
        if let Some((idx, &k)) = kappa.iter().enumerate().find(|(_, &k)| k < 1 - d) {
            return Err(Error::EntryTooSmall {
                index: idx + 1,
                value: k,
                min: 1 - d,
            });
        }
        let sum: i64 = kappa.iter().sum();
        if sum != -2 * d {
            return Err(Error::SumMismatch {
                sum,
                expected: -2 * d,
            });
        }
        let mu = kappa
            .iter()
            .map(|&k| Rational::new(BigInt::from(-k), BigInt::from(d)))
            .collect();
        Ok(Signature {
            d,
            kappa,
            weights: WeightVector { mu },
        })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.kappa.len()
    }

    pub fn kappa(&self) -> &[i64] {
        &self.kappa
    }

    /// `k_i` for marking `i` (1-based).
    pub fn k(&self, i: usize) -> i64 {
        self.kappa[i - 1]
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn mu(&self, set: Marks) -> Rational {
        self.weights.of(set)
    }

    /// `sum_{i in set} k_i`.
    pub fn k_sum(&self, set: Marks) -> i64 {
        set.iter().map(|i| self.kappa[i - 1]).sum()
    }

    pub fn all_marks(&self) -> Marks {
        Marks::full(self.n())
    }

    /// Rank `(d-1)(n-2)-1` of the bundle of finite-area d-differentials.
    pub fn bundle_rank(&self) -> i64 {
        rank_formula(self.d, self.n())
    }

    /// True when `d` divides some `k_i`.
    pub fn d_divides_some_k(&self) -> bool {
        self.kappa.iter().any(|k| k % self.d == 0)
    }

    /// Relabel markings: marking `i` becomes `perm[i - 1]`.
    pub fn permuted(&self, perm: &[usize]) -> Signature {
        let mut kappa = vec![0; self.n()];
        for (i, &k) in self.kappa.iter().enumerate() {
            kappa[perm[i] - 1] = k;
        }
        Signature::new(self.d, kappa).expect("relabeling preserves validity")
    }
}

/// Free-function form of [`Signature::new`].
pub fn validate_signature(d: i64, kappa: &[i64]) -> Result<Signature> {
    Signature::new(d, kappa.to_vec())
}

/// `(d-1)(n-2)-1` for arbitrary `(d, n)`, including pairs that admit no valid signature.
pub fn rank_formula(d: i64, n: usize) -> i64 {
    (d - 1) * (n as i64 - 2) - 1
}

/// Free-function form of [`Signature::bundle_rank`].
pub fn bundle_rank(sig: &Signature) -> i64 {
    sig.bundle_rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn four_simple_poles() {
        let s = validate_signature(2, &[-1, -1, -1, -1]).unwrap();
        assert!(s.weights().as_slice().iter().all(|m| *m == q(1, 2)));
    }

    #[test]
    fn five_poles_one_zero() {
        let s = validate_signature(2, &[-1, -1, -1, -1, -1, 1]).unwrap();
        let mu = s.weights().as_slice();
        assert!(mu[..5].iter().all(|m| *m == q(1, 2)));
        assert_eq!(mu[5], q(-1, 2));
    }

    #[test]
    fn errors() {
        assert_eq!(
            validate_signature(2, &[-1, -1, -1]),
            Err(Error::SumMismatch {
                sum: -3,
                expected: -4
            })
        );
        assert!(matches!(
            validate_signature(2, &[-2, -1, -1]),
            Err(Error::EntryTooSmall { index: 1, .. })
        ));
        assert_eq!(validate_signature(1, &[-1, -1, 0]), Err(Error::BadD(1)));
        assert_eq!(validate_signature(2, &[-2, -2]), Err(Error::TooFewMarks(2)));
    }

    #[test]
    fn weights_sum_to_two_and_below_one() {
        let s = validate_signature(3, &[-2, -2, -1, -1, 0, 0]).unwrap();
        assert_eq!(s.mu(s.all_marks()), q(2, 1));
        assert!(s.weights().as_slice().iter().all(|m| *m < q(1, 1)));
    }

    #[test]
    fn ranks() {
        let r = |d, kappa: &[i64]| validate_signature(d, kappa).unwrap().bundle_rank();
        assert_eq!(r(2, &[-1, -1, -1, -1]), 1);
        assert_eq!(r(3, &[-1; 6]), 7);
        assert_eq!(rank_formula(2, 3), 0);
        assert_eq!(r(3, &[-2, -2, -2]), 1);
    }
}
