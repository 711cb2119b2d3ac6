//! p-adic valuations with values in (1/e)Z, plus the two non-finite states:
//! exactly infinite (the element is zero) and "at least" (precision ran out
//! before a digit was seen). The two are kept distinct so a congruence check
//! can refuse instead of silently passing.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, Zero};

use crate::error::{CoreError, Result};

/// A p-adic valuation: finite rational, infinite (exact zero), or a lower
/// bound coming from capped precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Val {
    Finite(Rational64),
    /// Exact zero.
    Infinite,
    /// All digits below the bound vanish; the true valuation is >= bound.
    AtLeast(Rational64),
}

impl Val {
    pub fn finite(num: i64, den: i64) -> Self {
        Val::Finite(Rational64::new(num, den))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Val::Finite(_))
    }

    /// Valuation of a product: only meaningful when both are trustworthy.
    pub fn add(self, other: Val) -> Val {
        match (self, other) {
            (Val::Infinite, _) | (_, Val::Infinite) => Val::Infinite,
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            (Val::AtLeast(a), Val::Finite(b)) | (Val::Finite(b), Val::AtLeast(a)) => {
                Val::AtLeast(a + b)
            }
            (Val::AtLeast(a), Val::AtLeast(b)) => Val::AtLeast(a + b),
        }
    }

    /// Lower bound for a sum: min of the operands' bounds.
    pub fn min_with(self, other: Val) -> Val {
        match (self, other) {
            (Val::Infinite, v) | (v, Val::Infinite) => v,
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a.min(b)),
            (Val::AtLeast(a), Val::Finite(b)) | (Val::Finite(b), Val::AtLeast(a)) => {
                if b < a {
                    Val::Finite(b)
                } else {
                    Val::AtLeast(a.min(b))
                }
            }
            (Val::AtLeast(a), Val::AtLeast(b)) => Val::AtLeast(a.min(b)),
        }
    }

    /// Decide `self >= c`, refusing when the capped bound cannot tell.
    pub fn at_least(&self, c: Rational64) -> Result<bool> {
        match self {
            Val::Infinite => Ok(true),
            Val::Finite(v) => Ok(*v >= c),
            Val::AtLeast(b) => {
                if *b >= c {
                    Ok(true)
                } else {
                    Err(CoreError::PrecisionExhausted {
                        needed: c.ceil().to_integer().max(0) as u32,
                        have: b.floor().to_integer().max(0) as u32,
                    })
                }
            }
        }
    }

    /// The finite value, if trustworthy.
    pub fn as_finite(&self) -> Option<Rational64> {
        match self {
            Val::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

impl std::fmt::Display for Val {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{v}"),
            Val::Infinite => write!(f, "inf"),
            Val::AtLeast(b) => write!(f, ">={b}"),
        }
    }
}

/// Exact p-adic valuation of an integer; `None` for zero.
pub fn vp_bigint(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0u64;
    let mut m = n.abs();
    // doubling ladder keeps this fast for very divisible inputs
    loop {
        let (q, r) = num_integer::Integer::div_rem(&m, &p);
        if !r.is_zero() {
            break;
        }
        v += 1;
        m = q;
    }
    Some(v)
}

/// v_p on Q, normalized by v_p(p) = 1; v_p(0) is infinite.
pub fn vp_rational(x: &BigRational, p: u64) -> Result<Val> {
    if !super::is_prime(p) {
        return Err(CoreError::NotPrime(p));
    }
    if x.is_zero() {
        return Ok(Val::Infinite);
    }
    let vn = vp_bigint(x.numer(), p).expect("nonzero numerator") as i64;
    let vd = vp_bigint(x.denom(), p).expect("nonzero denominator") as i64;
    Ok(Val::finite(vn - vd, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn vp_of_252_at_3_is_2() {
        // 252 = 2^2 * 3^2 * 7
        assert_eq!(vp_rational(&rat(252, 1), 3).unwrap(), Val::finite(2, 1));
    }

    #[test]
    fn vp_of_ninth_at_3_is_minus_2() {
        assert_eq!(vp_rational(&rat(1, 9), 3).unwrap(), Val::finite(-2, 1));
    }

    #[test]
    fn vp_of_zero_is_infinite() {
        assert_eq!(vp_rational(&BigRational::zero(), 5).unwrap(), Val::Infinite);
    }

    #[test]
    fn vp_rejects_composite_modulus() {
        assert!(vp_rational(&BigRational::one(), 6).is_err());
    }

    #[test]
    fn at_least_refuses_when_undecidable() {
        let v = Val::AtLeast(Rational64::new(3, 1));
        assert!(v.at_least(Rational64::new(2, 1)).unwrap());
        assert!(v.at_least(Rational64::new(5, 1)).is_err());
    }

    #[test]
    fn min_with_prefers_trusted_smaller_value() {
        let a = Val::finite(1, 1);
        let b = Val::AtLeast(Rational64::new(4, 1));
        assert_eq!(a.min_with(b), Val::finite(1, 1));
    }
}
