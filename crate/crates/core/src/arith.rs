//! Small integer helpers: primality, factorisation, modular inverses.

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
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

/// Exponent of `p` in `n`; `n` must be nonzero.
pub fn valuation(p: u64, mut n: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_power_of(p: u64, n: u64) -> bool {
    n >= 1 && prime_factors(n).iter().all(|&q| q == p)
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Inverse modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Reduces a signed integer into `0..m`.
pub fn modp(x: i64, m: u64) -> u64 {
    x.rem_euclid(m as i64) as u64
}

/// The first `count` primes outside `excluded`.
pub fn primes_avoiding(excluded: &[u64], count: usize) -> Vec<u64> {
    (2..)
        .filter(|&q| is_prime(q) && !excluded.contains(&q))
        .take(count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors() {
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(valuation(2, 24), 3);
        assert!(is_power_of(3, 27) && !is_power_of(3, 12) && is_power_of(5, 1));
        assert_eq!(inv_mod(3, 7), 5);
        assert_eq!(primes_avoiding(&[2, 3], 3), vec![5, 7, 11]);
    }
}
