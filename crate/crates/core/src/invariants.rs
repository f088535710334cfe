//! Lattice ratios and structural predicates.
//!
//! `d′(G) = k′(G)/|L(G)|` is read directly off the subgroup lattice. `d*(G)`
//! is the minimum of `d′` over all sections `H/K` (`K` normal in `H`).

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{multiplicative_order, prime_divisors};
use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::group::{check_cap, FiniteGroup, GroupFingerprint, Subgroup};
use crate::iso::is_isomorphic;
use crate::lattice::{all_subgroups, frattini_subgroup, is_lattice_modular, SubgroupLattice};
use crate::rational::Rational;
use crate::Limits;

/// Above this order `d*` needs [`Limits::allow_slow`].
pub const DSTAR_SLOW_ORDER: usize = 256;

/// `k′/|L|` of an enumerated lattice.
pub fn d_prime_of(lattice: &SubgroupLattice) -> Rational {
    Rational::new(lattice.class_count() as u64, lattice.len() as u64)
}

pub fn d_prime(g: &FiniteGroup, limits: &Limits) -> Result<Rational> {
    Ok(d_prime_of(&all_subgroups(g, limits)?))
}

/// Every subgroup is normal.
pub fn is_dedekind(lattice: &SubgroupLattice) -> bool {
    lattice.nu() == 0
}

/// A quotient `H/K` with `K` normal in `H`.
#[derive(Clone, Debug)]
pub struct Section {
    pub h: Subgroup,
    pub k: Subgroup,
    pub quotient: FiniteGroup,
    pub fingerprint: GroupFingerprint,
}

/// Subgroups of `G` contained in subgroup `h` and normal in it.
fn normal_in(g: &FiniteGroup, lattice: &SubgroupLattice, h: usize) -> (Vec<usize>, usize) {
    let below = lattice.subgroups_of(h);
    let total = below.len();
    let hs = lattice.subgroup(h);
    let normal = below
        .into_iter()
        .filter(|&k| g.is_normal_in(lattice.subgroup(k), hs))
        .collect();
    (normal, total)
}

/// `H/K` as a standalone group.
pub fn section_quotient(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Result<FiniteGroup> {
    let (hg, embedding) = g.subgroup_as_group(h);
    let mut pos = vec![usize::MAX; g.order()];
    for (i, &m) in embedding.iter().enumerate() {
        pos[m] = i;
    }
    let inner = ElementSet::from_indices(hg.order(), k.members().iter().map(|x| pos[x]));
    let inner = hg.subgroup_from_set(inner)?;
    Ok(hg.quotient(&inner)?.0)
}

/// Every section `H/K` of `G`, subgroup by subgroup in lattice order.
pub fn sections<'a>(
    g: &'a FiniteGroup,
    lattice: &'a SubgroupLattice,
) -> impl Iterator<Item = Result<Section>> + 'a {
    (0..lattice.len()).flat_map(move |h| {
        let (normal, _) = normal_in(g, lattice, h);
        normal.into_iter().map(move |k| {
            let (hs, ks) = (lattice.subgroup(h), lattice.subgroup(k));
            let quotient = section_quotient(g, hs, ks)?;
            Ok(Section {
                h: hs.clone(),
                k: ks.clone(),
                fingerprint: quotient.fingerprint(),
                quotient,
            })
        })
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SectionMode {
    /// One subgroup per conjugacy class, abelian quotients skipped, quotients
    /// deduplicated up to isomorphism.
    #[default]
    Pruned,
    /// `d′` of every section.
    Exhaustive,
}

pub fn d_star(g: &FiniteGroup, limits: &Limits) -> Result<Rational> {
    let lattice = all_subgroups(g, limits)?;
    d_star_with(g, &lattice, limits, SectionMode::Pruned)
}

pub fn d_star_with(
    g: &FiniteGroup,
    lattice: &SubgroupLattice,
    limits: &Limits,
    mode: SectionMode,
) -> Result<Rational> {
    if g.order() > DSTAR_SLOW_ORDER && !limits.allow_slow {
        return Err(Error::SlowOptInRequired {
            order: g.order(),
            limit: DSTAR_SLOW_ORDER,
        });
    }
    match mode {
        SectionMode::Pruned => d_star_pruned(g, lattice, limits),
        SectionMode::Exhaustive => {
            let all: Vec<Section> = sections(g, lattice).collect::<Result<_>>()?;
            let values: Vec<Rational> = all
                .par_iter()
                .map(|s| d_prime(&s.quotient, limits))
                .collect::<Result<_>>()?;
            Ok(values.into_iter().min().expect("G/1 is a section"))
        }
    }
}

fn d_star_pruned(g: &FiniteGroup, lattice: &SubgroupLattice, limits: &Limits) -> Result<Rational> {
    if is_dedekind(lattice) {
        return Ok(Rational::one());
    }
    let mut bins: HashMap<GroupFingerprint, Vec<usize>> = HashMap::new();
    let mut candidates: Vec<FiniteGroup> = Vec::new();
    for class in lattice.conjugacy_classes() {
        let h = class[0];
        let (normal, total) = normal_in(g, lattice, h);
        if normal.len() == total {
            // Dedekind subgroup: all of its sections are Dedekind.
            continue;
        }
        for k in normal {
            let q = section_quotient(g, lattice.subgroup(h), lattice.subgroup(k))?;
            if q.is_abelian() {
                continue;
            }
            let bin = bins.entry(q.fingerprint()).or_default();
            let mut seen = false;
            if q.order() <= limits.iso_cap {
                for &c in bin.iter() {
                    if is_isomorphic(&q, &candidates[c], limits.iso_cap)? {
                        seen = true;
                        break;
                    }
                }
            }
            if !seen {
                bin.push(candidates.len());
                candidates.push(q);
            }
        }
    }
    let values: Vec<Rational> = candidates
        .par_iter()
        .map(|q| d_prime(q, limits))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(Rational::one(), |a, b| a.min(b)))
}

/// One Sylow subgroup (lattice index) per prime divisor of `|G|`.
pub fn sylow_subgroups(g: &FiniteGroup, lattice: &SubgroupLattice) -> BTreeMap<u64, usize> {
    let n = g.order() as u64;
    prime_divisors(n)
        .into_iter()
        .map(|p| {
            let mut part = 1;
            while n.is_multiple_of(part * p) {
                part *= p;
            }
            let i = (0..lattice.len())
                .find(|&i| lattice.subgroup(i).order() as u64 == part)
                .expect("Sylow subgroups exist");
            (p, i)
        })
        .collect()
}

/// Every Sylow subgroup is normal.
pub fn is_nilpotent(g: &FiniteGroup, lattice: &SubgroupLattice) -> bool {
    sylow_subgroups(g, lattice)
        .values()
        .all(|&i| lattice.is_normal(i))
}

/// Nilpotency of subgroup `h`, using Sylow subgroups of `h` taken from the
/// lattice of `G`.
fn subgroup_is_nilpotent(g: &FiniteGroup, lattice: &SubgroupLattice, h: usize) -> bool {
    let hs = lattice.subgroup(h);
    let n = hs.order() as u64;
    let below = lattice.subgroups_of(h);
    prime_divisors(n).into_iter().all(|p| {
        let mut part = 1;
        while n.is_multiple_of(part * p) {
            part *= p;
        }
        let s = below
            .iter()
            .copied()
            .find(|&i| lattice.subgroup(i).order() as u64 == part)
            .expect("Sylow subgroups exist");
        g.is_normal_in(lattice.subgroup(s), hs)
    })
}

/// Nilpotent with a modular subgroup lattice.
pub fn is_iwasawa(g: &FiniteGroup, lattice: &SubgroupLattice) -> bool {
    is_nilpotent(g, lattice) && is_lattice_modular(g, lattice).is_ok()
}

/// Minimal non-nilpotent.
pub fn is_schmidt(g: &FiniteGroup, lattice: &SubgroupLattice) -> bool {
    !is_nilpotent(g, lattice)
        && lattice
            .maximal_subgroups()
            .into_iter()
            .all(|m| subgroup_is_nilpotent(g, lattice, m))
}

/// Intersection of the maximal subgroups of subgroup `h`.
fn frattini_of(lattice: &SubgroupLattice, h: usize) -> ElementSet {
    let below = lattice.subgroups_of(h);
    let proper: Vec<usize> = below.iter().copied().filter(|&k| k != h).collect();
    let mut set = lattice.subgroup(h).members().clone();
    for &k in &proper {
        let maximal = proper.iter().all(|&o| o == k || !lattice.contains(k, o));
        if maximal {
            set = set.intersection(lattice.subgroup(k).members());
        }
    }
    set
}

/// Structure of a minimal non-nilpotent group `P⋊Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchmidtStructure {
    /// Prime of the normal Sylow subgroup.
    pub p: u64,
    /// Prime of the cyclic Sylow subgroup.
    pub q: u64,
    /// Rank of `P/Φ(P)`, equal to the order of `p` modulo `q`.
    pub r: u64,
    pub p_order: usize,
    pub q_order: usize,
    pub center_order: usize,
}

/// Checks the standard structure of a minimal non-nilpotent group and
/// reports the first clause that fails.
pub fn schmidt_structure_check(
    g: &FiniteGroup,
    lattice: &SubgroupLattice,
) -> Result<SchmidtStructure> {
    let fail = |clause: &str| Err(Error::StructureViolation(clause.to_string()));
    if !is_schmidt(g, lattice) {
        return fail("not minimal non-nilpotent");
    }
    let sylow = sylow_subgroups(g, lattice);
    if sylow.len() != 2 {
        return fail("order is not divisible by exactly two primes");
    }
    let (normal, other): (Vec<_>, Vec<_>) = sylow.iter().partition(|(_, &i)| lattice.is_normal(i));
    if normal.len() != 1 {
        return fail("exactly one Sylow subgroup is normal");
    }
    let (&p, &pi) = normal[0];
    let (&q, &qi) = other[0];
    let (ps, qs) = (lattice.subgroup(pi), lattice.subgroup(qi));
    if !qs
        .members()
        .iter()
        .any(|x| g.element_order(x) == qs.order())
    {
        return fail("Q is cyclic");
    }

    let center = g.center();
    let phi_g = frattini_subgroup(g, lattice);
    if center.members() != phi_g.members() {
        return fail("Z(G) = Phi(G)");
    }
    let phi_p = frattini_of(lattice, pi);
    let phi_q = frattini_of(lattice, qi);
    let product = ElementSet::from_indices(
        g.order(),
        phi_p
            .iter()
            .flat_map(|a| phi_q.iter().map(move |b| g.mul(a, b))),
    );
    if &product != center.members() {
        return fail("Z(G) = Phi(P) x Phi(Q)");
    }

    let r = multiplicative_order(p, q).expect("distinct primes");
    let top = ps.order() / phi_p.len();
    let elementary = ps.members().iter().all(|x| {
        phi_p.contains(g.pow(x, p as usize))
            && ps
                .members()
                .iter()
                .all(|y| phi_p.contains(g.commutator(x, y)))
    });
    if !elementary || (top as u64) != p.pow(r as u32) {
        return fail("P/Phi(P) is elementary abelian of rank ord_q(p)");
    }

    for n in lattice.normal_subgroups() {
        if n == lattice.top() {
            continue;
        }
        let ns = lattice.subgroup(n);
        if qs.is_subgroup_of(ns) {
            return fail("no proper normal subgroup contains Q");
        }
        if !ps.is_subgroup_of(ns) && !ns.is_subgroup_of(&center) {
            return fail("every proper normal subgroup contains P or lies in Z(G)");
        }
    }

    Ok(SchmidtStructure {
        p,
        q,
        r,
        p_order: ps.order(),
        q_order: qs.order(),
        center_order: center.order(),
    })
}

/// Every quotient of `G` is isomorphic to a subgroup of `G`.
pub fn is_q_self_dual(g: &FiniteGroup, lattice: &SubgroupLattice, iso_cap: usize) -> Result<bool> {
    if g.order() > iso_cap {
        return Err(Error::IsoCapExceeded {
            order: g.order(),
            cap: iso_cap,
        });
    }
    for n in lattice.normal_subgroups() {
        let (q, _) = g.quotient(lattice.subgroup(n))?;
        let mut found = false;
        for class in lattice.conjugacy_classes() {
            let s = lattice.subgroup(class[0]);
            if s.order() != q.order() {
                continue;
            }
            let (sg, _) = g.subgroup_as_group(s);
            if is_isomorphic(&sg, &q, iso_cap)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub abelian: bool,
    pub dedekind: bool,
    pub nilpotent: bool,
    pub iwasawa: bool,
    pub modular_lattice: bool,
    pub schmidt: bool,
}

pub fn flags(g: &FiniteGroup, lattice: &SubgroupLattice) -> Flags {
    let nilpotent = is_nilpotent(g, lattice);
    let modular = is_lattice_modular(g, lattice).is_ok();
    Flags {
        abelian: g.is_abelian(),
        dedekind: is_dedekind(lattice),
        nilpotent,
        iwasawa: nilpotent && modular,
        modular_lattice: modular,
        schmidt: !nilpotent && is_schmidt(g, lattice),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub spec: String,
    pub order: usize,
    pub lattice_size: usize,
    pub k_prime: usize,
    pub normal_count: usize,
    pub nu: usize,
    pub d_prime: Rational,
    pub d_star: Option<Rational>,
    pub flags: Flags,
    /// Wall-clock milliseconds spent computing the report.
    pub ms: u64,
}

/// Computes the full report for `g`, optionally including `d*`.
pub fn invariant_report(
    spec: &str,
    g: &FiniteGroup,
    limits: &Limits,
    with_d_star: bool,
) -> Result<InvariantReport> {
    let start = Instant::now();
    check_cap(g.order(), limits.max_order)?;
    let lattice = all_subgroups(g, limits)?;
    let d_star = if with_d_star {
        Some(d_star_with(g, &lattice, limits, SectionMode::Pruned)?)
    } else {
        None
    };
    Ok(InvariantReport {
        spec: spec.to_string(),
        order: g.order(),
        lattice_size: lattice.len(),
        k_prime: lattice.class_count(),
        normal_count: lattice.normal_subgroup_count(),
        nu: lattice.nu(),
        d_prime: d_prime_of(&lattice),
        d_star,
        flags: flags(g, &lattice),
        ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;

    fn lat(g: &FiniteGroup) -> SubgroupLattice {
        all_subgroups(g, &Limits::default()).unwrap()
    }

    #[test]
    fn section_counts_of_small_groups() {
        let g = FiniteGroup::trivial();
        assert_eq!(sections(&g, &lat(&g)).count(), 1);
        let g = cyclic(5).unwrap();
        let orders: Vec<usize> = sections(&g, &lat(&g))
            .map(|s| s.unwrap().quotient.order())
            .collect();
        assert_eq!(orders, vec![1, 5, 1]);
    }

    #[test]
    fn dihedral_8_values() {
        let g = dihedral(8).unwrap();
        let l = lat(&g);
        assert_eq!(d_prime_of(&l), Rational::new(4, 5));
        let limits = Limits::default();
        assert_eq!(
            d_star_with(&g, &l, &limits, SectionMode::Pruned).unwrap(),
            Rational::new(4, 5)
        );
        assert_eq!(
            d_star_with(&g, &l, &limits, SectionMode::Exhaustive).unwrap(),
            Rational::new(4, 5)
        );
        assert!(is_nilpotent(&g, &l));
        assert!(!is_iwasawa(&g, &l));
    }

    #[test]
    fn quaternion_is_dedekind() {
        let g = generalized_quaternion(8).unwrap();
        assert!(is_dedekind(&lat(&g)));
    }

    #[test]
    fn symmetric_3_is_schmidt() {
        let g = dihedral(6).unwrap();
        let l = lat(&g);
        assert!(is_schmidt(&g, &l));
        let s = schmidt_structure_check(&g, &l).unwrap();
        assert_eq!((s.p, s.q, s.r), (3, 2, 1));
    }

    #[test]
    fn alternating_4_is_schmidt_of_rank_2() {
        let g = elementary_rtimes_cq(2, 3).unwrap();
        let l = lat(&g);
        let s = schmidt_structure_check(&g, &l).unwrap();
        assert_eq!((s.p, s.q, s.r), (2, 3, 2));
    }

    #[test]
    fn nilpotent_group_fails_structure_check() {
        let g = dihedral(8).unwrap();
        let err = schmidt_structure_check(&g, &lat(&g)).unwrap_err();
        assert!(matches!(err, Error::StructureViolation(_)));
    }

    #[test]
    fn q_self_duality() {
        for g in [cyclic(12).unwrap(), modular_group(2, 4).unwrap()] {
            assert!(is_q_self_dual(&g, &lat(&g), 128).unwrap());
        }
        // Q_8/Z ≅ C_2² is not a subgroup of Q_8.
        let g = generalized_quaternion(8).unwrap();
        assert!(!is_q_self_dual(&g, &lat(&g), 128).unwrap());
    }

    #[test]
    fn slow_orders_need_opt_in() {
        let g = cyclic(300).unwrap();
        let limits = Limits::default();
        let l = lat(&g);
        let err = d_star_with(&g, &l, &limits, SectionMode::Pruned).unwrap_err();
        assert!(matches!(err, Error::SlowOptInRequired { .. }));
        let slow = Limits {
            allow_slow: true,
            ..limits
        };
        assert!(d_star_with(&g, &l, &slow, SectionMode::Pruned)
            .unwrap()
            .is_one());
    }
}
