//! Fixed-width element bitsets.

use std::cmp::Ordering;

/// A set of element indices of a parent group, stored as 64-bit blocks.
///
/// All sets belonging to one group share the same block count, so equality
/// and hashing work on the raw blocks.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ElementSet {
    blocks: Box<[u64]>,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet {
            blocks: vec![0; universe.div_ceil(64).max(1)].into_boxed_slice(),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(universe: usize, items: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for i in items {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.blocks[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Returns `true` if `i` was not already present.
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let (b, m) = (i >> 6, 1u64 << (i & 63));
        let fresh = self.blocks[b] & m == 0;
        self.blocks[b] |= m;
        fresh
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.blocks
            .iter()
            .zip(other.blocks.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet {
            blocks: self
                .blocks
                .iter()
                .zip(other.blocks.iter())
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut rest = block;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(bi * 64 + tz)
            })
        })
    }

    /// Lexicographic comparison of the ascending member lists, valid for sets
    /// of equal size: the set holding the smallest element of the symmetric
    /// difference comes first.
    pub fn cmp_members(&self, other: &ElementSet) -> Ordering {
        for (a, b) in self.blocks.iter().zip(other.blocks.iter()) {
            let diff = a ^ b;
            if diff != 0 {
                let low = diff & diff.wrapping_neg();
                return if a & low != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}
