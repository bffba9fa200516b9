//! Subsets of the ground set `[0, n)`.
//!
//! Sets over at most [`BITSET_LIMIT`] items are stored as a single `u128`
//! mask; larger ground sets (the lower-bound families need `n >= 4096`) use a
//! sorted vector of indices. The representation is a function of `n` alone, so
//! two sets over the same ground set always share a representation and the
//! derived equality is membership equality.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set stored as a bitmask.
pub const BITSET_LIMIT: usize = 128;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Bits(u128),
    Sparse(Vec<u32>),
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ItemSetJson", into = "ItemSetJson")]
pub struct ItemSet {
    n: usize,
    repr: Repr,
}

#[derive(Serialize, Deserialize)]
struct ItemSetJson {
    n: usize,
    items: Vec<usize>,
}

impl TryFrom<ItemSetJson> for ItemSet {
    type Error = Error;

    fn try_from(raw: ItemSetJson) -> Result<Self> {
        ItemSet::from_indices(raw.n, raw.items)
    }
}

impl From<ItemSet> for ItemSetJson {
    fn from(set: ItemSet) -> Self {
        ItemSetJson {
            n: set.n,
            items: set.to_vec(),
        }
    }
}

impl ItemSet {
    pub fn empty(n: usize) -> Self {
        let repr = if n <= BITSET_LIMIT {
            Repr::Bits(0)
        } else {
            Repr::Sparse(Vec::new())
        };
        ItemSet { n, repr }
    }

    pub fn full(n: usize) -> Self {
        if n <= BITSET_LIMIT {
            ItemSet {
                n,
                repr: Repr::Bits(low_bits(n)),
            }
        } else {
            ItemSet {
                n,
                repr: Repr::Sparse((0..n as u32).collect()),
            }
        }
    }

    /// Builds a set from arbitrary indices; duplicates collapse.
    pub fn from_indices<I>(n: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        if n <= BITSET_LIMIT {
            let mut mask = 0u128;
            for i in indices {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                mask |= 1u128 << i;
            }
            Ok(ItemSet {
                n,
                repr: Repr::Bits(mask),
            })
        } else {
            let mut items = Vec::new();
            for i in indices {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                items.push(i as u32);
            }
            items.sort_unstable();
            items.dedup();
            Ok(ItemSet {
                n,
                repr: Repr::Sparse(items),
            })
        }
    }

    /// Set whose members are the one-bits of `mask`. Only valid for
    /// `n <= BITSET_LIMIT`; bits at positions `>= n` are dropped.
    pub fn from_mask(n: usize, mask: u128) -> Self {
        assert!(n <= BITSET_LIMIT, "from_mask requires n <= {BITSET_LIMIT}");
        ItemSet {
            n,
            repr: Repr::Bits(mask & low_bits(n)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The bitmask, when the set uses the bit representation.
    pub fn mask(&self) -> Option<u128> {
        match self.repr {
            Repr::Bits(m) => Some(m),
            Repr::Sparse(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Bits(m) => m.count_ones() as usize,
            Repr::Sparse(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        if i >= self.n {
            return false;
        }
        match &self.repr {
            Repr::Bits(m) => m >> i & 1 == 1,
            Repr::Sparse(v) => v.binary_search(&(i as u32)).is_ok(),
        }
    }

    pub fn iter(&self) -> Iter<'_> {
        match &self.repr {
            Repr::Bits(m) => Iter::Bits(*m),
            Repr::Sparse(v) => Iter::Sparse(v.iter()),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Copy of `self` with `i` added.
    pub fn with(&self, i: usize) -> Self {
        assert!(i < self.n, "item {i} outside ground set of size {}", self.n);
        match &self.repr {
            Repr::Bits(m) => ItemSet {
                n: self.n,
                repr: Repr::Bits(m | 1u128 << i),
            },
            Repr::Sparse(v) => {
                let mut v = v.clone();
                if let Err(pos) = v.binary_search(&(i as u32)) {
                    v.insert(pos, i as u32);
                }
                ItemSet {
                    n: self.n,
                    repr: Repr::Sparse(v),
                }
            }
        }
    }

    fn check_same_ground(&self, other: &ItemSet) {
        assert_eq!(self.n, other.n, "item sets over different ground sets");
    }

    pub fn union(&self, other: &ItemSet) -> Self {
        self.check_same_ground(other);
        match (&self.repr, &other.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => ItemSet {
                n: self.n,
                repr: Repr::Bits(a | b),
            },
            (Repr::Sparse(a), Repr::Sparse(b)) => {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => {
                            out.push(a[i]);
                            i += 1;
                        }
                        std::cmp::Ordering::Greater => {
                            out.push(b[j]);
                            j += 1;
                        }
                        std::cmp::Ordering::Equal => {
                            out.push(a[i]);
                            i += 1;
                            j += 1;
                        }
                    }
                }
                out.extend_from_slice(&a[i..]);
                out.extend_from_slice(&b[j..]);
                ItemSet {
                    n: self.n,
                    repr: Repr::Sparse(out),
                }
            }
            _ => unreachable!("representation is determined by n"),
        }
    }

    pub fn intersection_len(&self, other: &ItemSet) -> usize {
        self.check_same_ground(other);
        match (&self.repr, &other.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => (a & b).count_ones() as usize,
            (Repr::Sparse(a), Repr::Sparse(b)) => {
                let (mut i, mut j, mut count) = (0, 0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            count += 1;
                            i += 1;
                            j += 1;
                        }
                    }
                }
                count
            }
            _ => unreachable!("representation is determined by n"),
        }
    }

    pub fn is_subset(&self, other: &ItemSet) -> bool {
        self.check_same_ground(other);
        match (&self.repr, &other.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => a & !b == 0,
            _ => self.intersection_len(other) == self.len(),
        }
    }

    pub fn complement(&self) -> Self {
        match &self.repr {
            Repr::Bits(m) => ItemSet {
                n: self.n,
                repr: Repr::Bits(!m & low_bits(self.n)),
            },
            Repr::Sparse(_) => {
                ItemSet::from_indices(self.n, (0..self.n).filter(|&i| !self.contains(i)))
                    .expect("indices in range")
            }
        }
    }

    /// Indicator vector `chi(S)` as reals.
    pub fn indicator(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for i in self.iter() {
            x[i] = 1.0;
        }
        x
    }
}

/// Enumerates all `2^n` subsets of `[0, n)` in mask order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = ItemSet> {
    assert!(n < 64, "exhaustive enumeration needs n < 64");
    (0..1u64 << n).map(move |m| ItemSet::from_mask(n, m as u128))
}

fn low_bits(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

pub enum Iter<'a> {
    Bits(u128),
    Sparse(std::slice::Iter<'a, u32>),
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            Iter::Bits(m) => {
                if *m == 0 {
                    None
                } else {
                    let i = m.trailing_zeros() as usize;
                    *m &= *m - 1;
                    Some(i)
                }
            }
            Iter::Sparse(it) => it.next().map(|&i| i as usize),
        }
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}/{}", self.n)
    }
}
