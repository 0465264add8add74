//! Sets of marked points as 64-bit masks. Marking `i` (1-based) lives in bit `i - 1`.

use std::fmt;

/// Largest number of marked points a [`Marks`] can index.
pub const MAX_MARKS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Marks(pub u64);

impl Marks {
    pub const EMPTY: Marks = Marks(0);

    /// All markings `1..=n`.
    pub fn full(n: usize) -> Marks {
        if n >= 64 {
            Marks(u64::MAX)
        } else {
            Marks((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Marks {
        debug_assert!((1..=MAX_MARKS).contains(&i));
        Marks(1u64 << (i - 1))
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_MARKS).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Least marking, if any.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn complement(self, n: usize) -> Marks {
        Marks(!self.0 & Marks::full(n).0)
    }

    pub fn is_subset(self, other: Marks) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Marks) -> bool {
        self.0 & other.0 == 0
    }

    pub fn iter(self) -> MarksIter {
        MarksIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Apply a relabeling: `perm[i - 1]` is the new label of marking `i`.
    pub fn permute(self, perm: &[usize]) -> Marks {
        Marks::from_iter(self.iter().map(|i| perm[i - 1]))
    }
}

impl std::ops::BitOr for Marks {
    type Output = Marks;
    fn bitor(self, rhs: Marks) -> Marks {
        Marks(self.0 | rhs.0)
    }
}

impl std::ops::BitOrAssign for Marks {
    fn bitor_assign(&mut self, rhs: Marks) {
        self.0 |= rhs.0;
    }
}

impl std::ops::BitAnd for Marks {
    type Output = Marks;
    fn bitand(self, rhs: Marks) -> Marks {
        Marks(self.0 & rhs.0)
    }
}

impl std::ops::Sub for Marks {
    type Output = Marks;
    fn sub(self, rhs: Marks) -> Marks {
        Marks(self.0 & !rhs.0)
    }
}

pub struct MarksIter(u64);

impl Iterator for MarksIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i + 1)
    }
}

impl fmt::Debug for Marks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Marks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromIterator<usize> for Marks {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Marks {
        it.into_iter()
            .fold(Marks::EMPTY, |m, i| m | Marks::singleton(i))
    }
}
