//! Dense indexing of all subsets of `[0, n)` with size in `min_size..=max_size`.
//!
//! Used both for degree-`L` subset features and for the meta-items that turn an
//! OXS function with `R` trees into a unit-demand function. Sets of one size
//! occupy a contiguous block; inside a block they are ranked in colexicographic
//! order of their sorted members.

use crate::error::{Error, Result};
use crate::itemset::ItemSet;

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetIndex {
    n: usize,
    min_size: usize,
    max_size: usize,
    binom: Vec<Vec<u64>>,
    offsets: Vec<usize>,
    len: usize,
}

impl SubsetIndex {
    /// Fails when the index would have more than `limit` entries.
    pub fn new(n: usize, min_size: usize, max_size: usize, limit: usize) -> Result<Self> {
        let max_size = max_size.min(n);
        let binom = binomial_table(n);
        let mut offsets = Vec::with_capacity(max_size + 2);
        let mut total: u128 = 0;
        offsets.push(0);
        for (k, &count) in binom[n].iter().enumerate().take(max_size + 1) {
            if k >= min_size {
                total += count as u128;
            }
            offsets.push(total.min(usize::MAX as u128) as usize);
        }
        if total > limit as u128 {
            return Err(Error::guard("subset index size", limit as u128, total));
        }
        Ok(SubsetIndex {
            n,
            min_size,
            max_size,
            binom,
            offsets,
            len: total as usize,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Position of the subset with the given strictly increasing members.
    pub fn index_of(&self, sorted: &[usize]) -> Option<usize> {
        let k = sorted.len();
        if k < self.min_size || k > self.max_size {
            return None;
        }
        let rank: u64 = sorted
            .iter()
            .enumerate()
            .map(|(pos, &c)| self.binom[c][pos + 1])
            .sum();
        Some(self.offsets[k] + rank as usize)
    }

    /// Indices of every indexed subset contained in `s`.
    pub fn subsets_of(&self, s: &ItemSet) -> Vec<usize> {
        let members = s.to_vec();
        let mut out = Vec::new();
        let mut combo = Vec::with_capacity(self.max_size);
        for k in self.min_size..=self.max_size.min(members.len()) {
            for_each_combination(&members, k, &mut combo, &mut |c| {
                out.push(self.index_of(c).expect("size in range"));
            });
        }
        out
    }

    /// Calls `f(index, members)` for every indexed subset, in index order.
    pub fn for_each(&self, mut f: impl FnMut(usize, &[usize])) {
        let all: Vec<usize> = (0..self.n).collect();
        let mut combo = Vec::with_capacity(self.max_size);
        for k in self.min_size..=self.max_size {
            let mut block = Vec::new();
            for_each_combination(&all, k, &mut combo, &mut |c| {
                block.push((self.index_of(c).expect("size in range"), c.to_vec()));
            });
            block.sort_by_key(|(i, _)| *i);
            for (i, c) in block {
                f(i, &c);
            }
        }
    }
}

fn binomial_table(n: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; n + 2]; n + 1];
    for i in 0..=n {
        t[i][0] = 1;
        for k in 1..=i {
            t[i][k] = t[i - 1][k - 1].saturating_add(if k < i { t[i - 1][k] } else { 0 });
        }
    }
    t
}

fn for_each_combination(
    items: &[usize],
    k: usize,
    combo: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    fn rec(
        items: &[usize],
        start: usize,
        k: usize,
        combo: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if combo.len() == k {
            f(combo);
            return;
        }
        let need = k - combo.len();
        for i in start..=items.len().saturating_sub(need) {
            if i >= items.len() {
                break;
            }
            combo.push(items[i]);
            rec(items, i + 1, k, combo, f);
            combo.pop();
        }
    }
    combo.clear();
    rec(items, 0, k, combo, f);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_a_bijection() {
        let idx = SubsetIndex::new(7, 0, 3, 1000).unwrap();
        assert_eq!(idx.len(), 1 + 7 + 21 + 35);
        let mut seen = vec![false; idx.len()];
        idx.for_each(|i, members| {
            assert!(!seen[i]);
            seen[i] = true;
            assert_eq!(idx.index_of(members), Some(i));
        });
        assert!(seen.into_iter().all(|b| b));
    }

    #[test]
    fn subsets_of_counts() {
        let idx = SubsetIndex::new(6, 1, 2, 1000).unwrap();
        let s = ItemSet::from_indices(6, [0, 2, 5]).unwrap();
        let subs = idx.subsets_of(&s);
        assert_eq!(subs.len(), 3 + 3);
        assert!(idx.subsets_of(&ItemSet::empty(6)).is_empty());
    }

    #[test]
    fn guard_trips() {
        assert!(SubsetIndex::new(50, 1, 5, 1_000_000).is_err());
    }
}
