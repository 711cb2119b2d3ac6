//! Teichmuller lifts: the unique (p-1)-st root of unity congruent to a given
//! unit mod p, computed by iterating the p-power map to its fixed point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{CoreError, Result};
use crate::padic::is_prime;

/// omega(x) mod p^prec: the fixed point of y -> y^p starting from x.
pub fn teichmuller(x: &BigInt, p: u64, prec: u32) -> Result<BigInt> {
    if !is_prime(p) {
        return Err(CoreError::NotPrime(p));
    }
    let pb = BigInt::from(p);
    let modulus = pb.pow(prec);
    let mut y = x.mod_floor(&modulus);
    if (&y % &pb).is_zero() {
        return Err(CoreError::NotAUnit);
    }
    // each iteration at least doubles the p-adic accuracy of the fixed point
    for _ in 0..=prec {
        let next = y.modpow(&pb, &modulus);
        if next == y {
            break;
        }
        y = next;
    }
    debug_assert_eq!(y.modpow(&pb, &modulus), y);
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn one_is_fixed() {
        assert_eq!(teichmuller(&BigInt::one(), 7, 20).unwrap(), BigInt::one());
    }

    #[test]
    fn omega_of_2_mod_25() {
        assert_eq!(teichmuller(&BigInt::from(2), 5, 2).unwrap(), BigInt::from(7));
    }

    #[test]
    fn congruent_to_argument_mod_p() {
        for p in [3u64, 5, 7, 11] {
            for x in 1..p {
                let w = teichmuller(&BigInt::from(x), p, 12).unwrap();
                assert_eq!(
                    w.mod_floor(&BigInt::from(p)),
                    BigInt::from(x),
                    "omega({x}) = {x} mod {p}"
                );
            }
        }
    }

    #[test]
    fn power_p_minus_1_is_one() {
        let modulus = BigInt::from(7).pow(16);
        for x in 1..7u64 {
            let w = teichmuller(&BigInt::from(x), 7, 16).unwrap();
            assert_eq!(w.modpow(&BigInt::from(6), &modulus), BigInt::one());
        }
    }

    #[test]
    fn rejects_multiples_of_p() {
        assert!(teichmuller(&BigInt::from(10), 5, 4).is_err());
    }
}
