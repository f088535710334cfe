//! Isomorphism testing by generator-image backtracking.
//!
//! The source group's greedy generating tuple is mapped to candidate tuples
//! in the target. Each time a generator image is fixed, the partial map is
//! extended breadth-first over the subgroup generated so far and rejected at
//! the first inconsistent or non-injective edge.

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Homomorphism};

pub const DEFAULT_ISO_CAP: usize = 128;

const UNSET: usize = usize::MAX;

pub fn is_isomorphic(g: &FiniteGroup, h: &FiniteGroup, cap: usize) -> Result<bool> {
    Ok(find_isomorphism(g, h, cap)?.is_some())
}

/// Returns an isomorphism `g → h` if one exists.
pub fn find_isomorphism(
    g: &FiniteGroup,
    h: &FiniteGroup,
    cap: usize,
) -> Result<Option<Homomorphism>> {
    for order in [g.order(), h.order()] {
        if order > cap {
            return Err(Error::IsoCapExceeded { order, cap });
        }
    }
    if g.order() != h.order() {
        return Ok(None);
    }
    if g.fingerprint() != h.fingerprint() {
        return Ok(None);
    }
    let gens = g.generators().to_vec();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&x| {
            (0..h.order())
                .filter(|&y| h.element_order(y) == g.element_order(x))
                .collect()
        })
        .collect();
    let mut search = Search {
        g,
        h,
        gens: &gens,
        images: Vec::with_capacity(gens.len()),
        map: vec![UNSET; g.order()],
        used: ElementSet::empty(h.order()),
        mapped: Vec::new(),
    };
    search.map[0] = 0;
    search.used.insert(0);
    search.mapped.push(0);
    if search.descend(&candidates) {
        let iso = Homomorphism { map: search.map };
        debug_assert!(iso.is_homomorphism(g, h));
        Ok(Some(iso))
    } else {
        Ok(None)
    }
}

struct Search<'a> {
    g: &'a FiniteGroup,
    h: &'a FiniteGroup,
    gens: &'a [usize],
    images: Vec<usize>,
    map: Vec<usize>,
    used: ElementSet,
    /// Source elements with an assigned image, in assignment order.
    mapped: Vec<usize>,
}

impl Search<'_> {
    fn descend(&mut self, candidates: &[Vec<usize>]) -> bool {
        let depth = self.images.len();
        if depth == self.gens.len() {
            return self.mapped.len() == self.g.order();
        }
        for &y in &candidates[depth] {
            let mark = self.mapped.len();
            self.images.push(y);
            let mut used = self.used.clone();
            if self.extend(&mut used) {
                let saved = std::mem::replace(&mut self.used, used);
                if self.descend(candidates) {
                    return true;
                }
                self.used = saved;
            }
            for &x in &self.mapped[mark..] {
                self.map[x] = UNSET;
            }
            self.mapped.truncate(mark);
            self.images.pop();
        }
        false
    }

    /// Propagates the map along every generator edge of the current
    /// subgroup; `false` on a conflict.
    fn extend(&mut self, used: &mut ElementSet) -> bool {
        let k = self.images.len();
        let mut i = 0;
        while i < self.mapped.len() {
            let a = self.mapped[i];
            i += 1;
            for j in 0..k {
                let b = self.g.mul(a, self.gens[j]);
                let want = self.h.mul(self.map[a], self.images[j]);
                if self.map[b] == UNSET {
                    if !used.insert(want) {
                        return false;
                    }
                    self.map[b] = want;
                    self.mapped.push(b);
                } else if self.map[b] != want {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::direct_product;
    use crate::perm::Perm;

    fn cyclic(n: usize) -> FiniteGroup {
        let p = Perm::new((0..n).map(|i| (i + 1) % n).collect()).unwrap();
        FiniteGroup::closure_from_generators(&[p], 512).unwrap()
    }

    #[test]
    fn reflexive_with_witness() {
        let g = direct_product(&cyclic(2), &cyclic(4), 512).unwrap();
        let iso = find_isomorphism(&g, &g, 128).unwrap().unwrap();
        assert!(iso.is_homomorphism(&g, &g) && iso.is_bijective(&g));
    }

    #[test]
    fn c4_is_not_klein() {
        let v = direct_product(&cyclic(2), &cyclic(2), 512).unwrap();
        assert!(!is_isomorphic(&cyclic(4), &v, 128).unwrap());
    }

    #[test]
    fn coprime_product_is_cyclic() {
        let g = direct_product(&cyclic(2), &cyclic(3), 512).unwrap();
        assert!(is_isomorphic(&g, &cyclic(6), 128).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let err = is_isomorphic(&cyclic(200), &cyclic(200), 128).unwrap_err();
        assert!(matches!(err, Error::IsoCapExceeded { .. }));
    }
}
