//! Small integer helpers: primality, multiplicative orders, prime lists.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `(p, k)` when `n = p^k` for a prime `p` and `k ≥ 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    match prime_divisors(n).as_slice() {
        [p] => {
            let mut k = 0;
            let mut m = n;
            while m > 1 {
                m /= p;
                k += 1;
            }
            Some((*p, k))
        }
        _ => None,
    }
}

/// Least `k ≥ 1` with `a^k ≡ 1 (mod m)`, or `None` if `gcd(a, m) ≠ 1`.
pub fn multiplicative_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if num_integer::gcd(a % m, m) != 1 {
        return None;
    }
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = x * (a % m) % m;
        k += 1;
    }
    Some(k)
}

pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// The first `count` odd primes: 3, 5, 7, 11, ...
pub fn odd_primes(count: usize) -> Vec<u64> {
    (3u64..)
        .step_by(2)
        .filter(|&n| is_prime(n))
        .take(count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_orders() {
        assert_eq!(odd_primes(5), vec![3, 5, 7, 11, 13]);
        assert_eq!(multiplicative_order(2, 3), Some(2));
        assert_eq!(multiplicative_order(2, 7), Some(3));
        assert_eq!(multiplicative_order(3, 13), Some(3));
        assert_eq!(multiplicative_order(2, 4), None);
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_divisors(216), vec![2, 3]);
    }
}
