//! Tiny eta-product q-expansions used as eigenvalue oracles: the level-1
//! discriminant form (24th power) and the level-11 weight-2 form (squares at
//! 1 and 11). Exact integer power series, truncated.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// q-expansion of prod_d ( q^(d/24) prod_n (1 - q^(d n)) ^ e_d ) up to and
/// including q^terms. The total weight sum d*e_d must be divisible by 24 so
/// the prefactor is an integer power of q.
pub fn eta_product(factors: &[(u64, u32)], terms: usize) -> Vec<BigInt> {
    let pref: u64 = factors.iter().map(|(d, e)| d * *e as u64).sum();
    assert!(pref % 24 == 0, "non-integral leading exponent");
    let shift = (pref / 24) as usize;
    let n = terms + 1;
    let mut series = vec![BigInt::zero(); n];
    series[0] = BigInt::one();
    for &(d, e) in factors {
        for _ in 0..e {
            // multiply by (1 - q^(d m)) for all m with d m <= terms
            let mut m = 1usize;
            while d as usize * m < n {
                let step = d as usize * m;
                // series *= (1 - q^step)
                for i in (step..n).rev() {
                    let t = series[i - step].clone();
                    series[i] -= t;
                }
                m += 1;
            }
        }
    }
    // shift by q^shift
    let mut out = vec![BigInt::zero(); n];
    for i in 0..n {
        if i + shift < n {
            out[i + shift] = series[i].clone();
        }
    }
    out
}

/// Ramanujan tau values from the 24th power of the level-1 eta series.
pub fn tau(n: usize) -> BigInt {
    let series = eta_product(&[(1, 24)], n);
    series[n].clone()
}

/// Coefficients a_n of the level-11 weight-2 form, from the eta square
/// product at 1 and 11.
pub fn level11_coefficient(n: usize) -> BigInt {
    let series = eta_product(&[(1, 2), (11, 2)], n);
    series[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_values() {
        assert_eq!(tau(1), BigInt::from(1));
        assert_eq!(tau(2), BigInt::from(-24));
        assert_eq!(tau(3), BigInt::from(252));
        assert_eq!(tau(4), BigInt::from(-1472));
        assert_eq!(tau(5), BigInt::from(4830));
    }

    #[test]
    fn level11_coefficients() {
        let known: [(usize, i64); 7] =
            [(1, 1), (2, -2), (3, -1), (4, 2), (5, 1), (7, -2), (19, 0)];
        for (n, a) in known {
            assert_eq!(level11_coefficient(n), BigInt::from(a), "a_{n}");
        }
    }
}
