//! Concrete constructions of the named group families.
//!
//! Every family is built from an explicit multiplication rule on tuples of
//! residues, never from a presentation. Each constructor then evaluates the
//! defining relations on its designated generators and fails with
//! [`Error::StructureViolation`] if any relation does not hold.

use std::hash::Hash;

use crate::arith::{is_prime, multiplicative_order};
use crate::error::{Error, Result};
use crate::group::{check_cap, semidirect_product, FiniteGroup, HARD_MAX_ORDER};
use crate::rational::Rational;
use crate::spec::Atom;

/// A family member together with the closed-form d′ when one is known.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub atom: Atom,
    pub group: FiniteGroup,
    pub expected_d_prime: Option<Rational>,
}

/// The data `(p, q, r)` of a Schmidt section `C_p^r ⋊ C_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchmidtSectionParams {
    pub p: u64,
    pub q: u64,
    pub r: u64,
}

impl SchmidtSectionParams {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if !is_prime(p) || !is_prime(q) || p == q {
            return Err(Error::invalid(format!(
                "need distinct primes, got {p}, {q}"
            )));
        }
        let r = multiplicative_order(p, q).expect("distinct primes are coprime");
        Ok(SchmidtSectionParams { p, q, r })
    }
}

fn ensure(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::StructureViolation(what.to_string()))
    }
}

fn pow_u(base: u64, exp: u64) -> Result<u64> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(|| Error::invalid(format!("{base}^{exp} overflows")))
}

fn mod_pow(base: u64, exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    let mut b = base % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Builds the group on `elements` (identity first) and returns it with the
/// index lookup; positions in `elements` are the element indices.
fn build<T: Clone + Eq + Hash>(
    elements: Vec<T>,
    mul: impl Fn(&T, &T) -> T,
    label: impl Fn(&T) -> String,
) -> Result<(FiniteGroup, impl Fn(&T) -> usize)> {
    check_cap(elements.len(), HARD_MAX_ORDER)?;
    let last = &elements[elements.len() - 1];
    ensure(
        mul(&elements[0], last) == *last,
        "identity must be listed first",
    )?;
    let index: std::collections::HashMap<T, usize> = elements
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let group = FiniteGroup::from_elements(elements, mul, label)?;
    Ok((group, move |t: &T| index[t]))
}

fn power(g: &FiniteGroup, a: usize, k: u64) -> usize {
    (0..k).fold(0, |acc, _| g.mul(acc, a))
}

fn order_is(g: &FiniteGroup, a: usize, n: u64) -> bool {
    g.element_order(a) as u64 == n
}

pub fn cyclic(n: u64) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::invalid("C(n) needs n >= 1"));
    }
    check_cap(n as usize, HARD_MAX_ORDER)?;
    let (g, _) = build((0..n).collect(), |a, b| (a + b) % n, |a| format!("x^{a}"))?;
    Ok(g)
}

/// `C_p^r`; element `v` encodes the vector of base-`p` digits of `v`.
pub fn elementary_abelian(p: u64, r: u64) -> Result<FiniteGroup> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("EA(p, r) needs p prime, got {p}")));
    }
    let n = pow_u(p, r)?;
    check_cap(n as usize, HARD_MAX_ORDER)?;
    let add = move |a: &u64, b: &u64| {
        let (mut a, mut b) = (*a, *b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..r {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    };
    let (g, _) = build((0..n).collect(), add, |v| format!("v{v}"))?;
    Ok(g)
}

/// `D_{2n} = ⟨x, y | x^n = y^2 = 1, yx = x^{n-1}y⟩`, elements `x^i y^j`.
pub fn dihedral(two_n: u64) -> Result<FiniteGroup> {
    if two_n < 6 || !two_n.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "D(2n) needs an even order >= 6, got {two_n}"
        )));
    }
    let n = two_n / 2;
    check_cap(two_n as usize, HARD_MAX_ORDER)?;
    let elements: Vec<(u64, u64)> = (0..2).flat_map(|j| (0..n).map(move |i| (i, j))).collect();
    let (g, idx) = build(
        elements,
        |&(i1, j1), &(i2, j2)| {
            let i2 = if j1 == 1 { (n - i2) % n } else { i2 };
            ((i1 + i2) % n, (j1 + j2) % 2)
        },
        |&(i, j)| format!("x^{i}y^{j}"),
    )?;
    let (x, y) = (idx(&(1, 0)), idx(&(0, 1)));
    ensure(order_is(&g, x, n) && order_is(&g, y, 2), "D: x^n = y^2 = 1")?;
    ensure(
        g.mul(y, x) == g.mul(power(&g, x, n - 1), y),
        "D: yx = x^(n-1) y",
    )?;
    Ok(g)
}

/// `Q_{2^n}` for orders 8, 16, 32: `x` of order `2^{n-1}`, `y² = x^{2^{n-2}}`,
/// `y x y⁻¹ = x⁻¹`.
pub fn generalized_quaternion(order: u64) -> Result<FiniteGroup> {
    if ![8, 16, 32].contains(&order) {
        return Err(Error::invalid(format!(
            "Q(m) needs m in {{8, 16, 32}}, got {order}"
        )));
    }
    let m = order / 2;
    let elements: Vec<(u64, u64)> = (0..2).flat_map(|j| (0..m).map(move |i| (i, j))).collect();
    let (g, idx) = build(
        elements,
        |&(i1, j1), &(i2, j2)| {
            let i2 = if j1 == 1 { (m - i2) % m } else { i2 };
            let carry = if j1 == 1 && j2 == 1 { m / 2 } else { 0 };
            ((i1 + i2 + carry) % m, (j1 + j2) % 2)
        },
        |&(i, j)| format!("x^{i}y^{j}"),
    )?;
    let (x, y) = (idx(&(1, 0)), idx(&(0, 1)));
    ensure(order_is(&g, x, m), "Q: x^(m) = 1")?;
    ensure(g.mul(y, y) == power(&g, x, m / 2), "Q: y^2 = x^(m/2)")?;
    ensure(g.conjugate(y, x) == g.inv(x), "Q: y x y^-1 = x^-1")?;
    Ok(g)
}

/// `M_{p^n} = ⟨x, y | x^{p^{n-1}} = y^p = 1, yx = x^{p^{n-2}+1}y⟩`.
pub fn modular_group(p: u64, n: u64) -> Result<FiniteGroup> {
    if !is_prime(p) || n < if p == 2 { 4 } else { 3 } {
        return Err(Error::invalid(format!(
            "M(p, n) needs p prime and n >= 4 (p = 2) or n >= 3 (p odd), got ({p}, {n})"
        )));
    }
    let modulus = pow_u(p, n - 1)?;
    check_cap(pow_u(p, n)? as usize, HARD_MAX_ORDER)?;
    let twist = pow_u(p, n - 2)? + 1;
    let elements: Vec<(u64, u64)> = (0..p)
        .flat_map(|j| (0..modulus).map(move |i| (i, j)))
        .collect();
    let (g, idx) = build(
        elements,
        |&(i1, j1), &(i2, j2)| {
            (
                (i1 + i2 * mod_pow(twist, j1, modulus)) % modulus,
                (j1 + j2) % p,
            )
        },
        |&(i, j)| format!("x^{i}y^{j}"),
    )?;
    let (x, y) = (idx(&(1, 0)), idx(&(0, 1)));
    ensure(
        order_is(&g, x, modulus) && order_is(&g, y, p),
        "M: orders of x, y",
    )?;
    ensure(
        g.mul(y, x) == g.mul(power(&g, x, twist), y),
        "M: yx = x^(p^(n-2)+1) y",
    )?;
    Ok(g)
}

/// Upper unitriangular 3×3 matrices over `Z/p`, `(a, b, c)` standing for
/// the matrix with `a`, `b` on the superdiagonal and `c` in the corner.
pub fn heisenberg(p: u64) -> Result<FiniteGroup> {
    if !is_prime(p) || p == 2 {
        return Err(Error::invalid(format!("He(p) needs an odd prime, got {p}")));
    }
    check_cap(pow_u(p, 3)? as usize, HARD_MAX_ORDER)?;
    let elements: Vec<(u64, u64, u64)> = (0..p)
        .flat_map(|c| (0..p).flat_map(move |b| (0..p).map(move |a| (a, b, c))))
        .collect();
    let (g, idx) = build(
        elements,
        |&(a1, b1, c1), &(a2, b2, c2)| ((a1 + a2) % p, (b1 + b2) % p, (c1 + c2 + a1 * b2) % p),
        |&(a, b, c)| format!("[{a},{b},{c}]"),
    )?;
    let (x, y, z) = (idx(&(1, 0, 0)), idx(&(0, 1, 0)), idx(&(0, 0, 1)));
    ensure(
        [x, y, z].iter().all(|&e| order_is(&g, e, p)),
        "He: x^p = y^p = z^p = 1",
    )?;
    ensure(
        g.commutator(x, z) == 0 && g.commutator(y, z) == 0,
        "He: [x,z] = [y,z] = 1",
    )?;
    ensure(g.commutator(x, y) == z, "He: [x,y] = z")?;
    Ok(g)
}

/// Smallest `m > 1` whose multiplicative order mod `p` is exactly `q`.
pub fn schmidt_scalar(p: u64, q: u64) -> Option<u64> {
    (2..p).find(|&m| multiplicative_order(m, p) == Some(q))
}

/// `G_{p,q,n} = C_p ⋊ C_{q^{n-1}}` where the generator `y` of the cyclic
/// part conjugates `x` to `x^m`, `m` of order `q` modulo `p`.
pub fn schmidt_gpqn(p: u64, q: u64, n: u64) -> Result<FiniteGroup> {
    if !is_prime(p) || !is_prime(q) || n < 2 {
        return Err(Error::invalid(format!(
            "G(p, q, n) needs primes p, q and n >= 2, got ({p}, {q}, {n})"
        )));
    }
    if !(p - 1).is_multiple_of(q) {
        let hint = if (q - 1).is_multiple_of(p) {
            format!(" (the swapped reading G({q}, {p}, {n}) is valid)")
        } else {
            String::new()
        };
        return Err(Error::invalid(format!(
            "G(p, q, n) needs q | p - 1, got ({p}, {q}, {n}){hint}"
        )));
    }
    let top = pow_u(q, n - 1)?;
    check_cap((p * top) as usize, HARD_MAX_ORDER)?;
    let m = schmidt_scalar(p, q).expect("q | p-1 gives an element of order q");
    let elements: Vec<(u64, u64)> = (0..top).flat_map(|j| (0..p).map(move |i| (i, j))).collect();
    let (g, idx) = build(
        elements,
        |&(i1, j1), &(i2, j2)| ((i1 + mod_pow(m, j1, p) * i2) % p, (j1 + j2) % top),
        |&(i, j)| format!("x^{i}y^{j}"),
    )?;
    let (x, y) = (idx(&(1, 0)), idx(&(0, 1)));
    ensure(
        order_is(&g, x, p) && order_is(&g, y, top),
        "G: orders of x, y",
    )?;
    ensure(g.conjugate(y, x) == power(&g, x, m), "G: y x y^-1 = x^m")?;
    let frattini_gen = power(&g, y, q);
    ensure(g.conjugate(frattini_gen, x) == x, "G: [N, Phi(P)] = 1")?;
    ensure(!g.is_abelian(), "G: non-abelian")?;
    Ok(g)
}

/// `H_{p,s,t} = ⟨x, y, z | x^{p^s} = y^{p^t} = z^p = 1, [x,z] = [y,z] = 1, [x,y] = z⟩`
/// on normal forms `x^a y^b z^c`.
pub fn h_pst(p: u64, s: u64, t: u64) -> Result<FiniteGroup> {
    if !is_prime(p) || t < 1 || s < t || (p == 2 && s + t < 3) {
        return Err(Error::invalid(format!(
            "H(p, s, t) needs s >= t >= 1 and s + t >= 3 when p = 2, got ({p}, {s}, {t})"
        )));
    }
    let (ps, pt) = (pow_u(p, s)?, pow_u(p, t)?);
    check_cap(pow_u(p, s + t + 1)? as usize, HARD_MAX_ORDER)?;
    let elements: Vec<(u64, u64, u64)> = (0..p)
        .flat_map(|c| (0..pt).flat_map(move |b| (0..ps).map(move |a| (a, b, c))))
        .collect();
    // y^b x^a = x^a y^b z^{-ab}
    let (g, idx) = build(
        elements,
        |&(a1, b1, c1), &(a2, b2, c2)| {
            let twist = (b1 % p) * (a2 % p) % p;
            ((a1 + a2) % ps, (b1 + b2) % pt, (c1 + c2 + p - twist) % p)
        },
        |&(a, b, c)| format!("x^{a}y^{b}z^{c}"),
    )?;
    let (x, y, z) = (idx(&(1, 0, 0)), idx(&(0, 1, 0)), idx(&(0, 0, 1)));
    ensure(
        order_is(&g, x, ps) && order_is(&g, y, pt) && order_is(&g, z, p),
        "H: orders of x, y, z",
    )?;
    ensure(
        g.commutator(x, z) == 0 && g.commutator(y, z) == 0,
        "H: [x,z] = [y,z] = 1",
    )?;
    ensure(g.commutator(x, y) == z, "H: [x,y] = z")?;
    let expected = g.subgroup_generated(&[power(&g, x, p), power(&g, y, p), z]);
    let center = g.center();
    ensure(
        center == expected && center.order() as u64 == ps / p * (pt / p) * p,
        "H: Z = <x^p> x <y^p> x <z>",
    )?;
    Ok(g)
}

/// `K_{p,s,t} = ⟨x, y | x^{p^s} = y^{p^t} = 1, yx = x^{p^{s-1}+1}y⟩`.
pub fn k_pst(p: u64, s: u64, t: u64) -> Result<FiniteGroup> {
    if !is_prime(p) || s < 2 || t < 1 || (p == 2 && s + t < 4) {
        return Err(Error::invalid(format!(
            "K(p, s, t) needs s >= 2, t >= 1 and s + t >= 4 when p = 2, got ({p}, {s}, {t})"
        )));
    }
    let (ps, pt) = (pow_u(p, s)?, pow_u(p, t)?);
    check_cap((ps * pt) as usize, HARD_MAX_ORDER)?;
    let twist = pow_u(p, s - 1)? + 1;
    let elements: Vec<(u64, u64)> = (0..pt).flat_map(|j| (0..ps).map(move |i| (i, j))).collect();
    let (g, idx) = build(
        elements,
        |&(i1, j1), &(i2, j2)| ((i1 + i2 * mod_pow(twist, j1, ps)) % ps, (j1 + j2) % pt),
        |&(i, j)| format!("x^{i}y^{j}"),
    )?;
    let (x, y) = (idx(&(1, 0)), idx(&(0, 1)));
    ensure(
        order_is(&g, x, ps) && order_is(&g, y, pt),
        "K: orders of x, y",
    )?;
    ensure(
        g.mul(y, x) == g.mul(power(&g, x, twist), y),
        "K: yx = x^(p^(s-1)+1) y",
    )?;
    let expected = g.subgroup_generated(&[power(&g, x, p), power(&g, y, p)]);
    let center = g.center();
    ensure(
        center == expected && center.order() as u64 == ps / p * (pt / p),
        "K: Z = <x^p> x <y^p>",
    )?;
    Ok(g)
}

/// Coefficients `c_0..c_{r-1}` of the first monic degree-`r` divisor of
/// `1 + x + ... + x^{q-1}` over `F_p`, enumerating candidates by the integer
/// whose base-`p` digits are the coefficients.
fn cyclotomic_factor(p: u64, q: u64, r: u64) -> Option<Vec<u64>> {
    let count = p.checked_pow(r as u32)?;
    (0..count).find_map(|code| {
        let coeffs: Vec<u64> = (0..r).map(|i| code / p.pow(i as u32) % p).collect();
        // Remainder of Φ_q modulo f = x^r + Σ c_i x^i, by reducing x^k.
        let mut rem = vec![0u64; r as usize];
        let mut xk = vec![0u64; r as usize];
        xk[0] = 1 % p;
        if r == 0 {
            return None;
        }
        for _ in 0..q {
            for (acc, v) in rem.iter_mut().zip(&xk) {
                *acc = (*acc + v) % p;
            }
            xk = times_x(&xk, &coeffs, p);
        }
        rem.iter().all(|&c| c == 0).then_some(coeffs)
    })
}

/// `x · v` modulo the monic polynomial with low coefficients `coeffs`.
fn times_x(v: &[u64], coeffs: &[u64], p: u64) -> Vec<u64> {
    let r = v.len();
    let top = v[r - 1];
    let mut out = vec![0u64; r];
    for i in (1..r).rev() {
        out[i] = v[i - 1];
    }
    for i in 0..r {
        out[i] = (out[i] + (p - top) * coeffs[i]) % p;
    }
    out
}

/// `C_p^r ⋊ C_q` with `r` the multiplicative order of `p` mod `q` and the
/// generator of `C_q` acting as the companion matrix of an irreducible
/// factor of the `q`-th cyclotomic polynomial over `F_p`.
pub fn elementary_rtimes_cq(p: u64, q: u64) -> Result<FiniteGroup> {
    let params = SchmidtSectionParams::new(p, q)?;
    let r = params.r;
    let base = pow_u(p, r)?;
    check_cap((base * q) as usize, HARD_MAX_ORDER)?;
    let coeffs = cyclotomic_factor(p, q, r)
        .ok_or_else(|| Error::StructureViolation("no cyclotomic factor found".into()))?;
    let encode = |v: &[u64]| v.iter().rev().fold(0, |acc, &d| acc * p + d) as usize;
    let decode = |mut code: u64| -> Vec<u64> {
        (0..r)
            .map(|_| {
                let d = code % p;
                code /= p;
                d
            })
            .collect()
    };
    let n = elementary_abelian(p, r)?;
    let h = cyclic(q)?;
    let mut action = Vec::with_capacity(q as usize);
    for j in 0..q {
        let map: Vec<usize> = (0..base)
            .map(|code| {
                let mut v = decode(code);
                for _ in 0..j {
                    v = times_x(&v, &coeffs, p);
                }
                encode(&v)
            })
            .collect();
        action.push(map);
    }
    ensure(
        action[1].iter().enumerate().any(|(i, &img)| i != img),
        "SD: action is faithful",
    )?;
    semidirect_product(&n, &h, &action, HARD_MAX_ORDER)
}

/// `C_27 ⋊ Q_8`: the cyclic subgroup `⟨x⟩` of `Q_8` acts trivially, the
/// other elements act by inversion.
pub fn c27_rtimes_q8() -> Result<FiniteGroup> {
    let n = cyclic(27)?;
    let q8 = generalized_quaternion(8)?;
    // Elements x^i y^j of Q_8 are stored at index i + 4j.
    let inversion: Vec<usize> = (0..27).map(|a| n.inv(a)).collect();
    let identity: Vec<usize> = (0..27).collect();
    let action: Vec<Vec<usize>> = (0..8)
        .map(|h| {
            if h < 4 {
                identity.clone()
            } else {
                inversion.clone()
            }
        })
        .collect();
    semidirect_product(&n, &q8, &action, HARD_MAX_ORDER)
}

/// `C_2² ⋊ C_4` where the generator of `C_4` swaps the two basis vectors.
pub fn c2sq_rtimes_c4() -> Result<FiniteGroup> {
    let n = elementary_abelian(2, 2)?;
    let h = cyclic(4)?;
    // Vector v = a + 2b; swapping gives b + 2a.
    let swap: Vec<usize> = (0..4).map(|v| (v >> 1) | ((v & 1) << 1)).collect();
    let identity: Vec<usize> = (0..4).collect();
    let action: Vec<Vec<usize>> = (0..4)
        .map(|j| {
            if j % 2 == 0 {
                identity.clone()
            } else {
                swap.clone()
            }
        })
        .collect();
    semidirect_product(&n, &h, &action, HARD_MAX_ORDER)
}

/// `C_3 ⋊ C_8` with the generator of `C_8` inverting `C_3`.
pub fn c3_rtimes_c8() -> Result<FiniteGroup> {
    schmidt_gpqn(3, 2, 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_match_parameters() {
        assert_eq!(cyclic(1).unwrap().order(), 1);
        assert_eq!(elementary_abelian(3, 2).unwrap().order(), 9);
        assert_eq!(dihedral(8).unwrap().order(), 8);
        assert_eq!(generalized_quaternion(16).unwrap().order(), 16);
        assert_eq!(modular_group(2, 5).unwrap().order(), 32);
        assert_eq!(heisenberg(5).unwrap().order(), 125);
        assert_eq!(schmidt_gpqn(7, 3, 3).unwrap().order(), 63);
        assert_eq!(h_pst(2, 2, 1).unwrap().order(), 16);
        assert_eq!(k_pst(3, 2, 2).unwrap().order(), 81);
        assert_eq!(elementary_rtimes_cq(2, 7).unwrap().order(), 56);
        assert_eq!(c27_rtimes_q8().unwrap().order(), 216);
        assert_eq!(c2sq_rtimes_c4().unwrap().order(), 16);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(dihedral(4).is_err());
        assert!(dihedral(9).is_err());
        assert!(generalized_quaternion(12).is_err());
        assert!(modular_group(2, 3).is_err());
        assert!(modular_group(4, 4).is_err());
        assert!(heisenberg(2).is_err());
        assert!(h_pst(2, 1, 1).is_err());
        assert!(h_pst(3, 1, 2).is_err());
        assert!(k_pst(2, 2, 1).is_err());
        assert!(k_pst(3, 1, 1).is_err());
        assert!(elementary_rtimes_cq(3, 3).is_err());
        let err = schmidt_gpqn(2, 5, 2).unwrap_err().to_string();
        assert!(err.contains("G(5, 2, 2)"), "{err}");
    }

    #[test]
    fn heisenberg_has_exponent_p() {
        for p in [3, 5] {
            let g = heisenberg(p).unwrap();
            assert_eq!(g.exponent() as u64, p);
            assert_eq!(g.center().order() as u64, p);
        }
    }

    #[test]
    fn schmidt_scalar_is_smallest() {
        assert_eq!(schmidt_scalar(3, 2), Some(2));
        assert_eq!(schmidt_scalar(7, 3), Some(2));
        assert_eq!(schmidt_scalar(13, 3), Some(3));
    }

    #[test]
    fn section_params_record_order() {
        let sp = SchmidtSectionParams::new(2, 7).unwrap();
        assert_eq!(sp.r, 3);
        assert!(SchmidtSectionParams::new(4, 7).is_err());
    }

    #[test]
    fn small_tables_are_associative() {
        for g in [
            dihedral(10).unwrap(),
            generalized_quaternion(8).unwrap(),
            modular_group(2, 4).unwrap(),
            heisenberg(3).unwrap(),
            h_pst(2, 2, 1).unwrap(),
            k_pst(2, 2, 2).unwrap(),
            elementary_rtimes_cq(2, 3).unwrap(),
            c2sq_rtimes_c4().unwrap(),
        ] {
            g.check_axioms(true).unwrap();
        }
    }
}
