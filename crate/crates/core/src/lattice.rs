//! Complete subgroup lattices.
//!
//! Enumeration is a cyclic-extension fixpoint: starting from the trivial
//! subgroup, every known subgroup `H` is extended to `⟨H, g⟩`. Only elements
//! `g` of prime-power order with `g^p ∈ H` are tried, one per right coset
//! `Hg`. Every subgroup `K ⊋ H` contains such an element, so the fixpoint
//! still reaches every subgroup, and the recorded extensions of `H` contain
//! all of its upper covers.

use std::collections::HashMap;

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::group::{check_cap, FiniteGroup, Subgroup};
use crate::Limits;

pub const DEFAULT_LATTICE_BUDGET: usize = 100_000;

#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    group_order: usize,
    subgroups: Vec<Subgroup>,
    index: HashMap<ElementSet, usize>,
    /// Distinct `⟨H, g⟩` found while extending each subgroup.
    extensions: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

/// Enumerates every subgroup of `g`, sorted by order and then by member list.
#[allow(clippy::needless_range_loop)]
pub fn all_subgroups(g: &FiniteGroup, limits: &Limits) -> Result<SubgroupLattice> {
    check_cap(g.order(), limits.max_order)?;
    let n = g.order();

    // For prime-power-order elements, x ↦ x^p; other elements are skipped.
    let mut root_power = vec![usize::MAX; n];
    for x in 1..n {
        if let Some((p, _)) = crate::arith::prime_power(g.element_order(x) as u64) {
            root_power[x] = g.pow(x, p as usize);
        }
    }

    let mut found: Vec<Subgroup> = vec![g.trivial_subgroup()];
    let mut index: HashMap<ElementSet, usize> = HashMap::new();
    index.insert(found[0].members().clone(), 0);
    let mut extensions: Vec<Vec<usize>> = Vec::new();

    let mut next = 0;
    while next < found.len() {
        let h = found[next].clone();
        next += 1;
        let list: Vec<usize> = h.members().iter().collect();
        let mut covered = h.members().clone();
        let mut ext: Vec<usize> = Vec::new();
        for x in 1..n {
            if covered.contains(x) || root_power[x] == usize::MAX || !h.contains(root_power[x]) {
                continue;
            }
            for &m in &list {
                covered.insert(g.mul(m, x));
            }
            let mut set = h.members().clone();
            let mut members = list.clone();
            let mut gens = h.generators().to_vec();
            gens.push(x);
            g.grow(&mut set, &mut members, &gens);
            let k = match index.get(&set) {
                Some(&k) => k,
                None => {
                    if found.len() >= limits.lattice_budget {
                        return Err(Error::LatticeBudgetExceeded {
                            budget: limits.lattice_budget,
                        });
                    }
                    let k = found.len();
                    index.insert(set.clone(), k);
                    found.push(Subgroup::from_parts(set, members.len(), gens));
                    k
                }
            };
            if !ext.contains(&k) {
                ext.push(k);
            }
        }
        extensions.push(ext);
    }

    // Canonical order: by subgroup order, then lexicographic member list.
    let mut perm: Vec<usize> = (0..found.len()).collect();
    perm.sort_by(|&a, &b| {
        found[a]
            .order()
            .cmp(&found[b].order())
            .then_with(|| found[a].members().cmp_members(found[b].members()))
    });
    let mut new_pos = vec![0; found.len()];
    for (new, &old) in perm.iter().enumerate() {
        new_pos[old] = new;
    }
    let subgroups: Vec<Subgroup> = perm.iter().map(|&old| found[old].clone()).collect();
    let extensions: Vec<Vec<usize>> = perm
        .iter()
        .map(|&old| {
            let mut e: Vec<usize> = extensions[old].iter().map(|&k| new_pos[k]).collect();
            e.sort_unstable();
            e
        })
        .collect();
    let index = subgroups
        .iter()
        .enumerate()
        .map(|(i, s)| (s.members().clone(), i))
        .collect();

    let mut lattice = SubgroupLattice {
        group_order: n,
        subgroups,
        index,
        extensions,
        class_of: Vec::new(),
        classes: Vec::new(),
    };
    lattice.compute_classes(g);
    Ok(lattice)
}

impl SubgroupLattice {
    fn compute_classes(&mut self, g: &FiniteGroup) {
        let count = self.subgroups.len();
        if g.is_abelian() {
            self.class_of = (0..count).collect();
            self.classes = (0..count).map(|i| vec![i]).collect();
            return;
        }
        let conj_maps: Vec<Vec<usize>> = g
            .generators()
            .iter()
            .map(|&x| (0..g.order()).map(|y| g.conjugate(x, y)).collect())
            .collect();
        let mut class_of = vec![usize::MAX; count];
        let mut classes = Vec::new();
        for start in 0..count {
            if class_of[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            class_of[start] = id;
            let mut orbit = vec![start];
            let mut i = 0;
            while i < orbit.len() {
                let cur = orbit[i];
                i += 1;
                for map in &conj_maps {
                    let image = ElementSet::from_indices(
                        g.order(),
                        self.subgroups[cur].members().iter().map(|y| map[y]),
                    );
                    let j = self.index[&image];
                    if class_of[j] == usize::MAX {
                        class_of[j] = id;
                        orbit.push(j);
                    }
                }
            }
            orbit.sort_unstable();
            classes.push(orbit);
        }
        self.class_of = class_of;
        self.classes = classes;
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    /// `|L(G)|`.
    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn subgroup(&self, i: usize) -> &Subgroup {
        &self.subgroups[i]
    }

    pub fn index_of(&self, members: &ElementSet) -> Option<usize> {
        self.index.get(members).copied()
    }

    pub fn top(&self) -> usize {
        self.subgroups.len() - 1
    }

    pub fn bottom(&self) -> usize {
        0
    }

    /// Conjugacy classes of subgroups; each class is sorted and its first
    /// entry serves as the representative.
    pub fn conjugacy_classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// `k′(G)`.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn is_normal(&self, i: usize) -> bool {
        self.classes[self.class_of[i]].len() == 1
    }

    /// `|N(G)|`.
    pub fn normal_subgroup_count(&self) -> usize {
        self.classes.iter().filter(|c| c.len() == 1).count()
    }

    /// `ν(G)`: classes of non-normal subgroups.
    pub fn nu(&self) -> usize {
        self.classes.iter().filter(|c| c.len() > 1).count()
    }

    pub fn normal_subgroups(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.is_normal(i))
    }

    pub fn contains(&self, small: usize, big: usize) -> bool {
        self.subgroups[small].is_subgroup_of(&self.subgroups[big])
    }

    /// All pairs `(i, j)` with subgroup `i` contained in subgroup `j`.
    pub fn containment_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.len() {
            for i in 0..=j {
                if self.contains(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Maximal subgroups: proper subgroups all of whose one-step extensions
    /// are the whole group.
    pub fn maximal_subgroups(&self) -> Vec<usize> {
        let top = self.top();
        (0..top)
            .filter(|&i| self.extensions[i].iter().all(|&k| k == top))
            .collect()
    }

    /// Subgroups contained in subgroup `i`.
    pub fn subgroups_of(&self, i: usize) -> Vec<usize> {
        (0..=i).filter(|&j| self.contains(j, i)).collect()
    }

    /// Covering pairs `(i, j)`: `i ⊂ j` with nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (i, ext) in self.extensions.iter().enumerate() {
            for &k in ext {
                let minimal = ext
                    .iter()
                    .all(|&other| other == k || !self.contains(other, k));
                if minimal {
                    edges.push((i, k));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Index of `meet(H_i, H_j)`.
    pub fn meet_index(&self, i: usize, j: usize) -> usize {
        let m = self.subgroups[i]
            .members()
            .intersection(self.subgroups[j].members());
        self.index[&m]
    }

    /// Index of `join(H_i, H_j)`.
    pub fn join_index(&self, g: &FiniteGroup, i: usize, j: usize) -> usize {
        let joined = join(g, &self.subgroups[i], &self.subgroups[j]);
        self.index[joined.members()]
    }
}

/// `gHg⁻¹`.
pub fn conjugate_subgroup(g: &FiniteGroup, h: &Subgroup, x: usize) -> Subgroup {
    let members =
        ElementSet::from_indices(g.order(), h.members().iter().map(|y| g.conjugate(x, y)));
    let gens = h.generators().iter().map(|&y| g.conjugate(x, y)).collect();
    Subgroup::from_parts(members, h.order(), gens)
}

pub fn meet(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Subgroup {
    let members = h.members().intersection(k.members());
    g.subgroup_generated(&members.iter().collect::<Vec<_>>())
}

pub fn join(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Subgroup {
    let mut set = h.members().clone();
    let mut list: Vec<usize> = set.iter().collect();
    let mut gens = h.generators().to_vec();
    for &x in k.generators() {
        if !set.contains(x) {
            gens.push(x);
            g.grow(&mut set, &mut list, &gens);
        }
    }
    let order = list.len();
    Subgroup::from_parts(set, order, gens)
}

/// `Φ(G)`: the intersection of all maximal subgroups (`G` itself when
/// trivial).
pub fn frattini_subgroup(g: &FiniteGroup, lattice: &SubgroupLattice) -> Subgroup {
    let mut set = ElementSet::full(g.order());
    for m in lattice.maximal_subgroups() {
        set = set.intersection(lattice.subgroup(m).members());
    }
    lattice
        .subgroup(lattice.index_of(&set).expect("intersection of subgroups"))
        .clone()
}

/// A triple `(X, Y, Z)` with `X ⊆ Z` and `X ∨ (Y ∧ Z) ≠ (X ∨ Y) ∧ Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModularViolation {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

/// Modular-law test. Lattices in which every subgroup is normal are modular
/// and are accepted without the scan.
pub fn is_lattice_modular(
    g: &FiniteGroup,
    lattice: &SubgroupLattice,
) -> Result<(), ModularViolation> {
    if lattice.nu() == 0 {
        return Ok(());
    }
    match find_modular_violation(g, lattice) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

/// Full triple scan in canonical order (`Z`, then `X ⊆ Z`, then `Y`).
pub fn find_modular_violation(
    g: &FiniteGroup,
    lattice: &SubgroupLattice,
) -> Option<ModularViolation> {
    let count = lattice.len();
    let mut joins: HashMap<(usize, usize), usize> = HashMap::new();
    let mut join_of = |a: usize, b: usize| -> usize {
        let key = (a.min(b), a.max(b));
        *joins
            .entry(key)
            .or_insert_with(|| lattice.join_index(g, key.0, key.1))
    };
    for z in 0..count {
        let below_z = lattice.subgroups_of(z);
        for &x in &below_z {
            if x == z {
                continue;
            }
            for y in 0..count {
                if lattice.contains(y, z) || lattice.contains(x, y) {
                    continue;
                }
                let lhs = join_of(x, lattice.meet_index(y, z));
                let xy = join_of(x, y);
                let rhs = lattice.meet_index(xy, z);
                if lhs != rhs {
                    return Some(ModularViolation { x, y, z });
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;

    fn lattice(g: &FiniteGroup) -> SubgroupLattice {
        all_subgroups(g, &Limits::default()).unwrap()
    }

    #[test]
    fn prime_cyclic_has_two_subgroups() {
        let g = cyclic(7).unwrap();
        let l = lattice(&g);
        assert_eq!(l.len(), 2);
        assert_eq!(l.hasse_edges(), vec![(0, 1)]);
    }

    #[test]
    fn cyclic_p_squared_is_a_chain() {
        let g = cyclic(9).unwrap();
        let l = lattice(&g);
        assert_eq!(l.len(), 3);
        assert_eq!(l.hasse_edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn dihedral_8_lattice() {
        let g = dihedral(8).unwrap();
        let l = lattice(&g);
        assert_eq!(l.len(), 10);
        assert_eq!(l.class_count(), 8);
        assert_eq!(l.hasse_edges().len(), 15);
        assert_eq!(l.maximal_subgroups().len(), 3);
    }

    #[test]
    fn subgroups_are_sorted_and_valid() {
        let g = modular_group(2, 4).unwrap();
        let l = lattice(&g);
        assert_eq!(l.len(), 11);
        for w in l.subgroups().windows(2) {
            assert!(w[0].order() <= w[1].order());
        }
        assert!(l.subgroups().iter().all(|s| s.is_valid_in(&g)));
        assert_eq!(l.subgroup(0).order(), 1);
        assert_eq!(l.subgroup(l.top()).order(), 16);
    }

    #[test]
    fn budget_is_enforced() {
        let g = elementary_abelian(2, 4).unwrap();
        let limits = Limits {
            lattice_budget: 20,
            ..Limits::default()
        };
        assert_eq!(
            all_subgroups(&g, &limits).unwrap_err(),
            Error::LatticeBudgetExceeded { budget: 20 }
        );
    }

    #[test]
    fn reflection_orbit_in_d10() {
        let g = dihedral(10).unwrap();
        let l = lattice(&g);
        let refl = (0..10).find(|&a| g.element_order(a) == 2).unwrap();
        let h = g.subgroup_generated(&[refl]);
        let class = &l.conjugacy_classes()[l.class_of(l.index_of(h.members()).unwrap())];
        assert_eq!(class.len(), 5);
        assert_eq!(conjugate_subgroup(&g, &h, 0), h);
    }

    #[test]
    fn join_and_meet_bounds() {
        let g = dihedral(8).unwrap();
        let (x, y) = (1, 4); // x = x^1 y^0, y = x^0 y^1
        let hx = g.subgroup_generated(&[x]);
        let hy = g.subgroup_generated(&[y]);
        assert_eq!(join(&g, &hx, &hy).order(), 8);
        assert_eq!(join(&g, &hx, &g.trivial_subgroup()), hx);
        assert_eq!(meet(&g, &hx, &g.whole()), hx);
        assert_eq!(meet(&g, &hx, &hy).order(), 1);
    }

    #[test]
    fn modularity_witnesses() {
        for g in [dihedral(8).unwrap(), heisenberg(3).unwrap()] {
            let l = lattice(&g);
            let v = is_lattice_modular(&g, &l).unwrap_err();
            assert!(l.contains(v.x, v.z));
        }
        for g in [modular_group(2, 4).unwrap(), modular_group(3, 3).unwrap()] {
            assert!(is_lattice_modular(&g, &lattice(&g)).is_ok());
        }
        let g = elementary_abelian(2, 3).unwrap();
        assert!(find_modular_violation(&g, &lattice(&g)).is_none());
    }
}
