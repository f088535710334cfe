//! Finite groups as full multiplication tables.
//!
//! Element `0` is always the identity. Tables hold `u16` indices, which
//! bounds the hard order ceiling at [`HARD_MAX_ORDER`].

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::perm::Perm;

pub const DEFAULT_MAX_ORDER: usize = 512;
pub const HARD_MAX_ORDER: usize = 2048;

pub(crate) fn check_cap(order: usize, cap: usize) -> Result<()> {
    if order > cap.min(HARD_MAX_ORDER) {
        Err(Error::OrderCapExceeded {
            order,
            cap: cap.min(HARD_MAX_ORDER),
        })
    } else {
        Ok(())
    }
}

#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u16>,
    inverses: Vec<u16>,
    element_orders: Vec<u32>,
    generators: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("generators", &self.generators)
            .finish()
    }
}

impl FiniteGroup {
    /// Builds a group from a flat row-major table. The identity may sit at
    /// any index; it is moved to index 0. Checks the Latin-square, identity
    /// and inverse axioms but not associativity.
    pub fn from_table(order: usize, table: &[usize], labels: Option<Vec<String>>) -> Result<Self> {
        if order == 0 || table.len() != order * order {
            return Err(Error::invalid("table size does not match order"));
        }
        check_cap(order, HARD_MAX_ORDER)?;
        let at = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| at(e, a) == a && at(a, e) == a))
            .ok_or_else(|| Error::invalid("table has no two-sided identity"))?;
        // Swap `identity` and 0 so the identity is element 0.
        let relabel = |x: usize| {
            if x == identity {
                0
            } else if x == 0 {
                identity
            } else {
                x
            }
        };
        let mut flat = vec![0u16; order * order];
        for a in 0..order {
            for b in 0..order {
                flat[relabel(a) * order + relabel(b)] = relabel(at(a, b)) as u16;
            }
        }
        let labels = labels.map(|mut l| {
            l.swap(0, identity);
            l
        });
        Self::from_normalized(order, flat, labels)
    }

    /// Builds the group of `elements` under `mul`. Any element that acts as
    /// a two-sided identity is moved to index 0; other elements keep their
    /// relative order.
    pub fn from_elements<T, F>(
        elements: Vec<T>,
        mul: F,
        label: impl Fn(&T) -> String,
    ) -> Result<Self>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let order = elements.len();
        if order == 0 {
            return Err(Error::invalid("empty element list"));
        }
        check_cap(order, HARD_MAX_ORDER)?;
        let id_pos = elements
            .iter()
            .position(|e| {
                let probe = &elements[(order > 1) as usize];
                mul(e, probe) == *probe && mul(probe, e) == *probe
            })
            .ok_or_else(|| Error::invalid("no identity among elements"))?;
        let mut ordered = Vec::with_capacity(order);
        ordered.push(elements[id_pos].clone());
        ordered.extend(
            elements
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != id_pos)
                .map(|(_, e)| e.clone()),
        );
        let index: HashMap<T, usize> = ordered
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        if index.len() != order {
            return Err(Error::invalid("duplicate elements"));
        }
        let mut flat = vec![0u16; order * order];
        for (a, ea) in ordered.iter().enumerate() {
            for (b, eb) in ordered.iter().enumerate() {
                let c = index
                    .get(&mul(ea, eb))
                    .ok_or_else(|| Error::invalid("element set not closed under multiplication"))?;
                flat[a * order + b] = *c as u16;
            }
        }
        let labels = ordered.iter().map(label).collect();
        Self::from_normalized(order, flat, Some(labels))
    }

    fn from_normalized(order: usize, table: Vec<u16>, labels: Option<Vec<String>>) -> Result<Self> {
        let mut row_seen = vec![0u32; order];
        let mut stamp = 0u32;
        for a in 0..order {
            stamp += 1;
            for b in 0..order {
                let c = table[a * order + b] as usize;
                if c >= order || row_seen[c] == stamp {
                    return Err(Error::invalid("table is not a Latin square (rows)"));
                }
                row_seen[c] = stamp;
            }
        }
        let mut col_seen = vec![0u32; order];
        for b in 0..order {
            stamp += 1;
            for a in 0..order {
                let c = table[a * order + b] as usize;
                if col_seen[c] == stamp {
                    return Err(Error::invalid("table is not a Latin square (columns)"));
                }
                col_seen[c] = stamp;
            }
        }
        for a in 0..order {
            if table[a] as usize != a || table[a * order] as usize != a {
                return Err(Error::invalid("element 0 is not the identity"));
            }
        }
        let mut inverses = vec![0u16; order];
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| table[a * order + b] == 0)
                .expect("Latin square row contains the identity");
            if table[inv * order + a] != 0 {
                return Err(Error::invalid("left and right inverses differ"));
            }
            inverses[a] = inv as u16;
        }
        let mut group = FiniteGroup {
            order,
            table,
            inverses,
            element_orders: Vec::new(),
            generators: Vec::new(),
            labels,
        };
        group.element_orders = (0..order).map(|a| group.compute_element_order(a)).collect();
        group.generators = group.greedy_generators();
        Ok(group)
    }

    /// Closure of a list of permutations, as a multiplication table. Element
    /// 0 is the identity permutation; the rest appear in breadth-first order.
    pub fn closure_from_generators(gens: &[Perm], max_order: usize) -> Result<Self> {
        let degree = gens
            .first()
            .ok_or_else(|| Error::invalid("no generators"))?
            .degree();
        if gens.iter().any(|g| g.degree() != degree) {
            return Err(Error::invalid("generators have different degrees"));
        }
        let cap = max_order.min(HARD_MAX_ORDER);
        let mut elements = vec![Perm::identity(degree)];
        let mut index: HashMap<Perm, usize> = HashMap::from([(Perm::identity(degree), 0)]);
        let mut next = 0;
        while next < elements.len() {
            let current = elements[next].clone();
            next += 1;
            for g in gens {
                let p = current.compose(g);
                if !index.contains_key(&p) {
                    if elements.len() + 1 > cap {
                        return Err(Error::OrderCapExceeded {
                            order: elements.len() + 1,
                            cap,
                        });
                    }
                    index.insert(p.clone(), elements.len());
                    elements.push(p);
                }
            }
        }
        let order = elements.len();
        let mut flat = vec![0u16; order * order];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                flat[a * order + b] = index[&pa.compose(pb)] as u16;
            }
        }
        let labels = elements.iter().map(|p| format!("{p:?}")).collect();
        Self::from_normalized(order, flat, Some(labels))
    }

    pub fn trivial() -> Self {
        Self::from_normalized(1, vec![0], None).expect("trivial table is valid")
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        let k = k % self.element_orders[a] as usize;
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    /// `g x g⁻¹`.
    #[inline]
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    fn compute_element_order(&self, a: usize) -> u32 {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.element_orders[a] as usize
    }

    /// A generating set of at most `log2(order)` elements, chosen greedily
    /// starting from elements of largest order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => format!("g{a}"),
        }
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        g.iter()
            .all(|&a| g.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn exponent(&self) -> usize {
        self.element_orders
            .iter()
            .fold(1usize, |acc, &o| num_integer::lcm(acc, o as usize))
    }

    /// Row-major copy of the table with plain indices.
    pub fn table(&self) -> Vec<usize> {
        self.table.iter().map(|&c| c as usize).collect()
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = (1..self.order).collect();
        by_order.sort_by_key(|&a| std::cmp::Reverse(self.element_orders[a]));
        let mut set = ElementSet::from_indices(self.order, [0]);
        let mut list = vec![0];
        let mut gens = Vec::new();
        for a in by_order {
            if set.len() == self.order {
                break;
            }
            if !set.contains(a) {
                gens.push(a);
                self.grow(&mut set, &mut list, &gens);
            }
        }
        gens
    }

    /// Extends the subgroup `set` (with member list `list`, generated by all
    /// of `gens` except the last) to the subgroup generated by all of `gens`.
    /// Works coset by coset, so the cost is linear in the result size.
    pub(crate) fn grow(&self, set: &mut ElementSet, list: &mut Vec<usize>, gens: &[usize]) {
        let base = list.len();
        let mut reps = vec![0usize];
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            i += 1;
            for &s in gens {
                let x = self.mul(r, s);
                if !set.contains(x) {
                    for k in 0..base {
                        let y = self.mul(list[k], x);
                        set.insert(y);
                        list.push(y);
                    }
                    reps.push(x);
                }
            }
        }
    }

    /// The subgroup generated by `gens`.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Subgroup {
        let mut set = ElementSet::from_indices(self.order, [0]);
        let mut list = vec![0];
        let mut used = Vec::new();
        for &g in gens {
            if !set.contains(g) {
                used.push(g);
                self.grow(&mut set, &mut list, &used);
            }
        }
        Subgroup::from_parts(set, list.len(), used)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_parts(
            ElementSet::full(self.order),
            self.order,
            self.generators.clone(),
        )
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_parts(ElementSet::from_indices(self.order, [0]), 1, Vec::new())
    }

    /// Wraps an arbitrary element set as a subgroup after checking closure.
    pub fn subgroup_from_set(&self, members: ElementSet) -> Result<Subgroup> {
        let list: Vec<usize> = members.iter().collect();
        if !members.contains(0) {
            return Err(Error::invalid("set does not contain the identity"));
        }
        for &a in &list {
            if !members.contains(self.inv(a)) {
                return Err(Error::invalid("set not closed under inverses"));
            }
            for &b in &list {
                if !members.contains(self.mul(a, b)) {
                    return Err(Error::invalid("set not closed under multiplication"));
                }
            }
        }
        let gens = self.subgroup_generated(&list).generators;
        Ok(Subgroup::from_parts(members, list.len(), gens))
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.generators.iter().all(|&g| {
            h.members
                .iter()
                .all(|x| h.members.contains(self.conjugate(g, x)))
        })
    }

    /// `true` if `k` is normalized by every element of `h` (both in this group).
    pub fn is_normal_in(&self, k: &Subgroup, h: &Subgroup) -> bool {
        h.generators.iter().all(|&g| {
            k.members
                .iter()
                .all(|x| k.members.contains(self.conjugate(g, x)))
        })
    }

    pub fn center(&self) -> Subgroup {
        let members = (0..self.order).filter(|&z| {
            self.generators
                .iter()
                .all(|&g| self.mul(g, z) == self.mul(z, g))
        });
        let set = ElementSet::from_indices(self.order, members);
        let gens = self
            .subgroup_generated(&set.iter().collect::<Vec<_>>())
            .generators;
        let n = set.len();
        Subgroup::from_parts(set, n, gens)
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let mut comms = ElementSet::empty(self.order);
        for a in 0..self.order {
            for b in 0..self.order {
                comms.insert(self.commutator(a, b));
            }
        }
        self.subgroup_generated(&comms.iter().collect::<Vec<_>>())
    }

    /// Normalizer of `h` in this group.
    pub fn normalizer(&self, h: &Subgroup) -> Subgroup {
        let members = (0..self.order).filter(|&g| {
            h.generators
                .iter()
                .all(|&x| h.members.contains(self.conjugate(g, x)))
        });
        let set = ElementSet::from_indices(self.order, members);
        let n = set.len();
        let gens = self
            .subgroup_generated(&set.iter().collect::<Vec<_>>())
            .generators;
        Subgroup::from_parts(set, n, gens)
    }

    /// Re-indexes the members of `h` as a standalone group. The returned
    /// embedding maps new indices to indices of `self`; index 0 stays the
    /// identity.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> (FiniteGroup, Vec<usize>) {
        let members: Vec<usize> = h.members.iter().collect();
        let mut pos = vec![usize::MAX; self.order];
        for (i, &m) in members.iter().enumerate() {
            pos[m] = i;
        }
        let n = members.len();
        let mut flat = vec![0u16; n * n];
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                flat[i * n + j] = pos[self.mul(a, b)] as u16;
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| members.iter().map(|&m| l[m].clone()).collect());
        let group = Self::from_normalized(n, flat, labels).expect("subgroup table is a group");
        (group, members)
    }

    /// `G/N` together with the projection. Coset `k` is numbered by the
    /// order in which its smallest member appears, so the identity coset is 0.
    pub fn quotient(&self, n: &Subgroup) -> Result<(FiniteGroup, Homomorphism)> {
        if !self.is_normal(n) {
            return Err(Error::NotNormal);
        }
        let kernel: Vec<usize> = n.members.iter().collect();
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for g in 0..self.order {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &k in &kernel {
                coset_of[self.mul(g, k)] = id;
            }
        }
        let m = reps.len();
        let mut flat = vec![0u16; m * m];
        for (i, &a) in reps.iter().enumerate() {
            for (j, &b) in reps.iter().enumerate() {
                flat[i * m + j] = coset_of[self.mul(a, b)] as u16;
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| reps.iter().map(|&r| format!("{}N", l[r])).collect());
        let q = Self::from_normalized(m, flat, labels)?;
        Ok((q, Homomorphism { map: coset_of }))
    }

    /// Checks the group axioms. With `associativity`, also runs the cubic
    /// associativity scan.
    pub fn check_axioms(&self, associativity: bool) -> std::result::Result<(), String> {
        let n = self.order;
        for a in 0..n {
            let mut row = ElementSet::empty(n);
            let mut col = ElementSet::empty(n);
            for b in 0..n {
                if !row.insert(self.mul(a, b)) || !col.insert(self.mul(b, a)) {
                    return Err(format!("row/column {a} is not a permutation"));
                }
            }
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(format!("identity fails on {a}"));
            }
            if self.mul(a, self.inv(a)) != 0 {
                return Err(format!("inverse fails on {a}"));
            }
        }
        if associativity {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(format!("({a}*{b})*{c} != {a}*({b}*{c})"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> GroupFingerprint {
        let mut hist: HashMap<usize, usize> = HashMap::new();
        for &o in &self.element_orders {
            *hist.entry(o as usize).or_default() += 1;
        }
        let mut order_histogram: Vec<(usize, usize)> = hist.into_iter().collect();
        order_histogram.sort_unstable();
        GroupFingerprint {
            order: self.order,
            order_histogram,
            abelian: self.is_abelian(),
            center_order: self.center().order(),
            derived_order: self.derived_subgroup().order(),
        }
    }
}

/// `G × H`; element `(g, h)` has index `g + |G|·h`.
pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup, max_order: usize) -> Result<FiniteGroup> {
    let (a, b) = (g.order(), h.order());
    check_cap(a * b, max_order)?;
    let n = a * b;
    let mut flat = vec![0u16; n * n];
    for x in 0..n {
        let (x1, x2) = (x % a, x / a);
        for y in 0..n {
            let (y1, y2) = (y % a, y / a);
            flat[x * n + y] = (g.mul(x1, y1) + a * h.mul(x2, y2)) as u16;
        }
    }
    let labels = (0..n)
        .map(|x| format!("({},{})", g.label(x % a), h.label(x / a)))
        .collect();
    FiniteGroup::from_normalized(n, flat, Some(labels))
}

/// `N ⋊ H` where `action[h]` lists the image of each element of `N` under
/// the automorphism attached to `h`. Element `(n, h)` has index `n + |N|·h`
/// and `(n₁,h₁)(n₂,h₂) = (n₁·action[h₁](n₂), h₁h₂)`.
pub fn semidirect_product(
    n: &FiniteGroup,
    h: &FiniteGroup,
    action: &[Vec<usize>],
    max_order: usize,
) -> Result<FiniteGroup> {
    let (a, b) = (n.order(), h.order());
    if action.len() != b {
        return Err(Error::invalid("action needs one map per element of H"));
    }
    for (hi, map) in action.iter().enumerate() {
        if map.len() != a || Perm::new(map.clone()).is_err() {
            return Err(Error::NotAnAutomorphism(hi));
        }
        for x in 0..a {
            for y in 0..a {
                if map[n.mul(x, y)] != n.mul(map[x], map[y]) {
                    return Err(Error::NotAnAutomorphism(hi));
                }
            }
        }
    }
    for h1 in 0..b {
        for h2 in 0..b {
            let composed = &action[h.mul(h1, h2)];
            if (0..a).any(|x| composed[x] != action[h1][action[h2][x]]) {
                return Err(Error::NotAnAction);
            }
        }
    }
    check_cap(a * b, max_order)?;
    let total = a * b;
    let mut flat = vec![0u16; total * total];
    for x in 0..total {
        let (n1, h1) = (x % a, x / a);
        for y in 0..total {
            let (n2, h2) = (y % a, y / a);
            let nn = n.mul(n1, action[h1][n2]);
            flat[x * total + y] = (nn + a * h.mul(h1, h2)) as u16;
        }
    }
    let labels = (0..total)
        .map(|x| format!("({},{})", n.label(x % a), h.label(x / a)))
        .collect();
    FiniteGroup::from_normalized(total, flat, Some(labels))
}

/// A subgroup of some parent group, as an element bitset plus a small
/// generating list.
#[derive(Clone, Debug)]
pub struct Subgroup {
    members: ElementSet,
    order: usize,
    generators: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub(crate) fn from_parts(members: ElementSet, order: usize, generators: Vec<usize>) -> Self {
        debug_assert_eq!(members.len(), order);
        Subgroup {
            members,
            order,
            generators,
        }
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.contains(g)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn elements(&self) -> Vec<usize> {
        self.members.iter().collect()
    }

    /// Identity, inverse and product closure inside `parent`.
    pub fn is_valid_in(&self, parent: &FiniteGroup) -> bool {
        let list = self.elements();
        self.members.contains(0)
            && list.len() == self.order
            && parent.order().is_multiple_of(self.order)
            && list.iter().all(|&a| {
                self.members.contains(parent.inv(a))
                    && list
                        .iter()
                        .all(|&b| self.members.contains(parent.mul(a, b)))
            })
    }
}

/// An element map between two groups; `map[s]` is the image of `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn is_homomorphism(&self, source: &FiniteGroup, target: &FiniteGroup) -> bool {
        self.map.len() == source.order()
            && self.map.iter().all(|&t| t < target.order())
            && (0..source.order()).all(|s| {
                (0..source.order())
                    .all(|t| self.map[source.mul(s, t)] == target.mul(self.map[s], self.map[t]))
            })
    }

    pub fn is_bijective(&self, target: &FiniteGroup) -> bool {
        self.map.len() == target.order()
            && ElementSet::from_indices(target.order(), self.map.iter().copied()).len()
                == target.order()
    }

    pub fn is_surjective(&self, target: &FiniteGroup) -> bool {
        ElementSet::from_indices(target.order(), self.map.iter().copied()).len() == target.order()
    }
}

/// Isomorphism invariants used to prune searches and bin sections.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupFingerprint {
    pub order: usize,
    pub order_histogram: Vec<(usize, usize)>,
    pub abelian: bool,
    pub center_order: usize,
    pub derived_order: usize,
}
