//! Exact rational/cyclotomic arithmetic and the capped-precision p-adic layer.
//!
//! Everything here is deterministic and immutable after construction. The
//! compatible system of valuations is realized on the subrings we actually
//! compute in: Q, Q(zeta_n) via a fixed prime above p, and the two-step
//! extension ring W[y]/(y^e - p) with W the unramified layer.

pub mod cyclotomic;
pub mod dirichlet;
pub mod fq;
pub mod prime;
pub mod teichmuller;
pub mod tower;
pub mod valuation;

pub use cyclotomic::CycElem;
pub use dirichlet::DirichletCharacter;
pub use prime::PadicPrime;
pub use teichmuller::teichmuller;
pub use tower::{TowerElem, TowerRing};
pub use valuation::{vp_bigint, vp_rational, Val};

/// Default working precision: base-p digits carried by the unramified layer.
pub const DEFAULT_PRECISION: u32 = 64;

/// Deterministic primality test by trial division; levels and primes here are
/// desk scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Prime factorization as (prime, exponent) pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for d in &divs {
            let mut pe = 1u64;
            for _ in 0..=e {
                next.push(d * pe);
                pe *= p;
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_small_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(2), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(30), 8);
    }

    #[test]
    fn divisors_of_12() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(97));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
    }
}
