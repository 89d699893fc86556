//! Integer number theory on `u64`: gcd, modular arithmetic with 128-bit
//! intermediates, factorization (Miller–Rabin + Pollard–Brent), Euler's totient,
//! Carmichael's function and multiplicative orders.

use alloc::vec::Vec;

use crate::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Canonical residue of a signed integer modulo `n > 0`.
#[inline]
pub fn reduce(x: i64, n: u64) -> u64 {
    (x as i128).rem_euclid(n as i128) as u64
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Finds a nontrivial factor of an odd composite `n` (Brent's variant of rho).
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut q = 1u64;
        let mut g = 1u64;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
/// `factorize(1)` is empty.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut rest = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
    }
    let mut stack = Vec::new();
    if rest > 1 {
        stack.push(rest);
    }
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let f = pollard_brent(m);
        stack.push(f);
        stack.push(m / f);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = alloc::vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn euler_totient(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Carmichael's function: the exponent of the unit group of `Z/nZ`.
pub fn carmichael(n: u64) -> u64 {
    factorize(n).into_iter().fold(1, |acc, (p, e)| {
        let pe1 = p.pow(e - 1);
        let part = if p == 2 && e >= 3 {
            pe1 / 2
        } else {
            pe1 * (p - 1)
        };
        lcm(acc, part)
    })
}

/// Smallest `d >= 1` with `omega^d == 1 (mod n)`.
///
/// `omega` is reduced mod `n` first. Starts from Carmichael's `lambda(n)`, which
/// every order divides, and strips prime factors while the power stays 1.
pub fn multiplicative_order(omega: i64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::NotPositive { what: "n" });
    }
    let w = reduce(omega, n);
    if gcd(w, n) != 1 {
        return Err(Error::NotCoprime { omega, n });
    }
    Ok(order_of_unit(w, n))
}

/// Order of a unit already reduced modulo `n`.
pub(crate) fn order_of_unit(w: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let lambda = carmichael(n);
    let mut d = lambda;
    for (p, _) in factorize(lambda) {
        while d % p == 0 && pow_mod(w, d / p, n) == 1 {
            d /= p;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_order(w: u64, n: u64) -> u64 {
        if n == 1 {
            return 1;
        }
        let mut x = w % n;
        let mut d = 1;
        while x != 1 {
            x = x * w % n;
            d += 1;
        }
        d
    }

    fn brute_totient(n: u64) -> u64 {
        (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(1188, 29070), 18);
        assert_eq!(gcd(0, 7), 7);
        assert_eq!(gcd(21791, 70091), 7);
        assert_eq!(gcd(0, 0), 0);
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(5, 12), Ok(2));
        assert_eq!(multiplicative_order(5, 4), Ok(1));
        assert_eq!(multiplicative_order(2, 27), Ok(18));
        assert_eq!(brute_order(2, 27), 18);
        assert_eq!(multiplicative_order(123, 1), Ok(1));
        assert_eq!(multiplicative_order(-7, 12), Ok(2));
        assert_eq!(
            multiplicative_order(4, 12),
            Err(Error::NotCoprime { omega: 4, n: 12 })
        );
    }

    #[test]
    fn totient_examples() {
        assert_eq!(euler_totient(1), 1);
        assert_eq!(euler_totient(3), 2);
        assert_eq!(euler_totient(27), 18);
    }

    #[test]
    fn order_and_totient_match_brute_force() {
        for n in 1..=300u64 {
            assert_eq!(euler_totient(n), brute_totient(n), "phi({n})");
            for w in 0..n {
                if gcd(w, n) == 1 {
                    assert_eq!(order_of_unit(w, n), brute_order(w, n), "ord_{n}({w})");
                }
            }
        }
    }

    #[test]
    fn lagrange_exhaustive() {
        for n in 1..=500u64 {
            let phi = euler_totient(n);
            for w in 0..n {
                if gcd(w, n) == 1 {
                    assert_eq!(phi % order_of_unit(w, n), 0, "n={n} w={w}");
                }
            }
        }
    }

    #[test]
    fn factorization_large() {
        assert_eq!(factorize(9_114_361), alloc::vec![(3019, 2)]);
        assert_eq!(
            factorize(255_255),
            alloc::vec![(3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1)]
        );
        let n = 4_294_967_291u64 * 4_294_967_279;
        assert_eq!(factorize(n), alloc::vec![(4_294_967_279, 1), (4_294_967_291, 1)]);
        assert!(is_prime(3019));
        assert!(is_prime(13063));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn divisors_of_twelve() {
        assert_eq!(divisors(12), alloc::vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), alloc::vec![1]);
    }
}
