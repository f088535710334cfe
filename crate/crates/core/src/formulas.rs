//! Closed-form values of d′ for the named families, subgroup counts of
//! elementary abelian groups, and the direct-product density sequence.
//!
//! Everything here is exact. The enumeration code in [`crate::lattice`] and
//! [`crate::invariants`] is tested against these functions and vice versa.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{is_prime, multiplicative_order, odd_primes};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::spec::{Atom, GroupSpec};

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn check_modular_params(p: u64, n: u64) -> Result<()> {
    if !is_prime(p) || n < if p == 2 { 4 } else { 3 } {
        return Err(Error::invalid(format!("no modular p-group M({p},{n})")));
    }
    Ok(())
}

/// `((n-2)(p+1)+4) / ((n-1)(p+1)+2)`.
pub fn d_prime_modular_formula(p: u64, n: u64) -> Result<Rational> {
    check_modular_params(p, n)?;
    let p1 = big(p) + 1;
    Ok(Rational::new(
        (big(n) - 2) * &p1 + 4,
        (big(n) - 1) * &p1 + 2,
    ))
}

/// `2n / (2n+p-1)`, independent of `q`.
pub fn d_prime_schmidt_formula(p: u64, n: u64) -> Result<Rational> {
    if !is_prime(p) || p == 2 || n < 2 {
        return Err(Error::invalid(format!("no Schmidt group G({p},q,{n})")));
    }
    Ok(Rational::new(2 * big(n), 2 * big(n) + big(p) - 1))
}

/// `(3n-1) / (2^n+n-1)` for `D_{2^n}`.
pub fn d_prime_dihedral_formula(n: u64) -> Result<Rational> {
    if n < 3 {
        return Err(Error::invalid(format!("D(2^{n}) needs n >= 3")));
    }
    let two_n = BigInt::one() << n;
    Ok(Rational::new(3 * big(n) - 1, two_n + big(n) - 1))
}

/// `(2p+5) / (p²+2p+4)`.
pub fn d_prime_heisenberg_formula(p: u64) -> Result<Rational> {
    if !is_prime(p) || p == 2 {
        return Err(Error::invalid(format!("He({p}) needs an odd prime")));
    }
    let p = big(p);
    Ok(Rational::new(2 * &p + 5, &p * &p + 2 * &p + 4))
}

/// Number of `i`-dimensional subspaces of `F_p^r`, by the product formula
/// with exact division.
pub fn gaussian_binomial(r: u64, i: u64, p: u64) -> Result<BigInt> {
    if i > r {
        return Err(Error::invalid(format!(
            "gaussian binomial needs i <= r, got i={i}, r={r}"
        )));
    }
    if p < 2 {
        return Err(Error::invalid("gaussian binomial needs p >= 2"));
    }
    let pp = |k: u64| -> BigInt { num_traits::pow(big(p), k as usize) - 1 };
    let num: BigInt = (0..i).map(|k| pp(r - k)).product();
    let den: BigInt = (1..=i).map(pp).product();
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// `a_{p,r} = |L(C_p^r)|`.
pub fn num_subgroups_elem_abelian(p: u64, r: u64) -> Result<BigInt> {
    (0..=r).map(|i| gaussian_binomial(r, i, p)).sum()
}

fn check_section_params(p: u64, q: u64, r: u64) -> Result<()> {
    if !is_prime(p) || !is_prime(q) || p == q {
        return Err(Error::invalid(format!(
            "need distinct primes, got {p}, {q}"
        )));
    }
    let ord = multiplicative_order(p, q).expect("distinct primes");
    if ord != r {
        return Err(Error::invalid(format!(
            "r = {r} is not the multiplicative order {ord} of {p} mod {q}"
        )));
    }
    Ok(())
}

/// `k′(C_p^r ⋊ C_q) = (a_{p,r} + 4q − 2) / q`.
pub fn schmidt_section_class_count(p: u64, q: u64, r: u64) -> Result<BigInt> {
    check_section_params(p, q, r)?;
    let a = num_subgroups_elem_abelian(p, r)?;
    let num: BigInt = a + 4 * big(q) - 2;
    let rem: BigInt = &num % big(q);
    if !rem.is_zero() {
        return Err(Error::StructureViolation(format!(
            "a_{{{p},{r}}} + 4q - 2 is not divisible by q = {q}"
        )));
    }
    Ok(num / big(q))
}

/// `|L(C_p^r ⋊ C_q)| = a_{p,r} + p^r + 1`.
pub fn schmidt_section_lattice_size(p: u64, q: u64, r: u64) -> Result<BigInt> {
    check_section_params(p, q, r)?;
    Ok(num_subgroups_elem_abelian(p, r)? + num_traits::pow(big(p), r as usize) + 1)
}

/// `(a_{p,r} + 4q − 2) / (q (a_{p,r} + p^r + 1))`.
pub fn d_prime_schmidt_section_formula(p: u64, q: u64, r: u64) -> Result<Rational> {
    check_section_params(p, q, r)?;
    let a = num_subgroups_elem_abelian(p, r)?;
    let num = &a + 4 * big(q) - 2;
    let den = big(q) * (a + num_traits::pow(big(p), r as usize) + 1);
    Ok(Rational::new(num, den))
}

/// Families whose closed forms are indexed by a single parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `M_{p^n}` for fixed `p`, indexed by `n`.
    Modular { p: u64 },
    /// `G_{p,q,n}` for fixed `p, q`, indexed by `n`.
    Schmidt { p: u64, q: u64 },
    /// `D_{2^n}`, indexed by `n`.
    Dihedral,
    /// `He_p`, indexed by the odd prime `p`.
    Heisenberg,
}

impl Family {
    pub fn value(&self, param: u64) -> Result<Rational> {
        match *self {
            Family::Modular { p } => d_prime_modular_formula(p, param),
            Family::Schmidt { p, q } => {
                if q < 2 || (p - 1) % q != 0 {
                    return Err(Error::invalid(format!(
                        "q = {q} does not divide p - 1 = {}",
                        p - 1
                    )));
                }
                d_prime_schmidt_formula(p, param)
            }
            Family::Dihedral => d_prime_dihedral_formula(param),
            Family::Heisenberg => d_prime_heisenberg_formula(param),
        }
    }

    /// The limit of the sequence as its parameter grows.
    pub fn limit(&self) -> Rational {
        match self {
            Family::Modular { .. } | Family::Schmidt { .. } => Rational::one(),
            Family::Dihedral | Family::Heisenberg => Rational::zero(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    StrictlyIncreasing,
    StrictlyDecreasing,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityVerdict {
    pub direction: Direction,
    /// Parameter pair `(a, b)` where the first direction change was seen.
    pub first_violation: Option<(u64, u64)>,
    pub values: Vec<(u64, Rational)>,
}

/// Evaluates the closed form over `params` (in the given order) and reports
/// whether the values are strictly monotone.
pub fn sequence_monotonicity(family: Family, params: &[u64]) -> Result<MonotonicityVerdict> {
    let values: Vec<(u64, Rational)> = params
        .iter()
        .map(|&n| Ok((n, family.value(n)?)))
        .collect::<Result<_>>()?;
    let mut direction = None;
    let mut first_violation = None;
    for w in values.windows(2) {
        let step = w[1].1.cmp(&w[0].1);
        let here = match step {
            std::cmp::Ordering::Greater => Direction::StrictlyIncreasing,
            std::cmp::Ordering::Less => Direction::StrictlyDecreasing,
            std::cmp::Ordering::Equal => Direction::Neither,
        };
        match direction {
            None if here != Direction::Neither => direction = Some(here),
            Some(d) if d == here => {}
            _ => {
                first_violation = Some((w[0].0, w[1].0));
                break;
            }
        }
    }
    let direction = match (direction, first_violation) {
        (Some(d), None) => d,
        _ => Direction::Neither,
    };
    Ok(MonotonicityVerdict {
        direction,
        first_violation,
        values,
    })
}

/// Outcome of a sampled limit check. This is a numerical trend check, not a
/// proof of convergence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendVerdict {
    pub kind: &'static str,
    pub limit: Rational,
    pub samples: Vec<(u64, Rational)>,
    /// `|value - limit|` strictly decreases over the samples.
    pub gaps_decreasing: bool,
    pub last_gap: Rational,
    pub within_epsilon: bool,
}

pub fn limit_trend(family: Family, samples: &[u64], epsilon: &Rational) -> Result<TrendVerdict> {
    let limit = family.limit();
    let values: Vec<(u64, Rational)> = samples
        .iter()
        .map(|&n| Ok((n, family.value(n)?)))
        .collect::<Result<_>>()?;
    let gaps: Vec<Rational> = values.iter().map(|(_, v)| (v - &limit).abs()).collect();
    let gaps_decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let last_gap = gaps.last().cloned().unwrap_or_else(Rational::one);
    Ok(TrendVerdict {
        kind: "numerical trend check",
        limit,
        within_epsilon: last_gap < *epsilon,
        samples: values,
        gaps_decreasing,
        last_gap,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityStep {
    pub index: usize,
    /// One odd prime per factor `M_{p^{a+i+1}}`, `i = 1..b-a`.
    pub primes: Vec<u64>,
    pub value: Rational,
    pub gap: Rational,
}

/// Products of modular-group ratios approaching `a/b`.
///
/// Step `n` (from 0) uses, for factor `i` (from 1), the `(n(b−a)+i)`-th odd
/// prime, so the `b−a` prime subsequences are disjoint and increasing. Steps
/// are returned up to and including the first with gap below `epsilon`.
pub fn density_sequence(
    a: u64,
    b: u64,
    epsilon: &Rational,
    prime_budget: usize,
) -> Result<Vec<DensityStep>> {
    if a < 1 || a >= b {
        return Err(Error::invalid(format!("need 1 <= a < b, got a={a}, b={b}")));
    }
    if *epsilon <= Rational::zero() {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let factors = usize::try_from(b - a).map_err(|_| Error::invalid("b - a too large"))?;
    let primes = odd_primes(prime_budget);
    let target = Rational::new(a, b);
    let mut steps = Vec::new();
    for n in 0.. {
        let end = (n + 1) * factors;
        if end > primes.len() {
            return Err(Error::BudgetExhausted {
                budget: prime_budget,
            });
        }
        let chosen = primes[n * factors..end].to_vec();
        let value: Rational = chosen
            .iter()
            .enumerate()
            .map(|(i, &p)| d_prime_modular_formula(p, a + i as u64 + 2))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .product();
        let gap = (&value - &target).abs();
        let done = gap < *epsilon;
        steps.push(DensityStep {
            index: n,
            primes: chosen,
            value,
            gap,
        });
        if done {
            break;
        }
    }
    Ok(steps)
}

/// A group with d′ = a/(a+1): `G_{5,2,2} ≅ D_10` for `a = 1`, else `G_{3,2,a}`.
pub fn ratio_witness(a: u64) -> Result<(GroupSpec, Rational)> {
    match a {
        0 => Err(Error::invalid("need a >= 1")),
        1 => Ok((GroupSpec::atom(Atom::Schmidt(5, 2, 2)), Rational::new(1, 2))),
        _ => Ok((
            GroupSpec::atom(Atom::Schmidt(3, 2, a)),
            Rational::new(a, a + 1),
        )),
    }
}
