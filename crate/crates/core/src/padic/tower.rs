//! The two-step extension ring at capped precision: an unramified layer
//! W = Z[x]/(p^P, g) from a fixed prime above p, extended by an Eisenstein
//! layer y with y^e = p. Elements carry a denominator power of y and a
//! trustworthy-digit count so valuations can refuse instead of lying.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::padic::cyclotomic::CycElem;
use crate::padic::fq::FqElem;
use crate::padic::prime::PadicPrime;
use crate::padic::valuation::{vp_bigint, Val};

/// W-layer element: coefficients of x^i, i < f, each in [0, p^prec).
pub type Unram = Vec<BigInt>;

/// Ring context for tower elements. Immutable and shareable.
#[derive(Debug)]
pub struct TowerRing {
    pub prime: PadicPrime,
    /// ramification degree of the Eisenstein layer, y^e = p
    pub e: u32,
    /// x^i mod (g, p^prec) for i = 0 .. phi(n)-1, for embedding cyclotomics
    xpow: Vec<Unram>,
}

impl PartialEq for TowerRing {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime && self.e == other.e
    }
}

impl TowerRing {
    pub fn new(prime: PadicPrime, e: u32) -> Arc<TowerRing> {
        assert!(e >= 1);
        let f = prime.f();
        let phi = crate::padic::euler_phi(prime.n.max(1)) as usize;
        // x^i mod g, computed incrementally
        let mut xpow: Vec<Unram> = Vec::with_capacity(phi.max(1));
        let mut cur = vec![BigInt::zero(); f];
        cur[0] = BigInt::one();
        xpow.push(cur.clone());
        for _ in 1..phi.max(1) {
            cur = wshift_reduce(&cur, &prime);
            xpow.push(cur.clone());
        }
        Arc::new(TowerRing { prime, e, xpow })
    }

    pub fn unramified(prime: PadicPrime) -> Arc<TowerRing> {
        Self::new(prime, 1)
    }

    pub fn p(&self) -> u64 {
        self.prime.p
    }

    pub fn f(&self) -> usize {
        self.prime.f()
    }

    pub fn prec(&self) -> u32 {
        self.prime.prec
    }

    fn wzero(&self) -> Unram {
        vec![BigInt::zero(); self.f()]
    }

    pub fn zero(self: &Arc<Self>) -> TowerElem {
        TowerElem {
            ring: self.clone(),
            num: vec![self.wzero(); self.e as usize],
            dshift: 0,
            nprec: self.prec(),
            exact_zero: true,
        }
    }

    pub fn one(self: &Arc<Self>) -> TowerElem {
        self.from_bigint(&BigInt::one())
    }

    pub fn from_bigint(self: &Arc<Self>, v: &BigInt) -> TowerElem {
        let mut num = vec![self.wzero(); self.e as usize];
        num[0][0] = v.mod_floor(&self.prime.modulus);
        TowerElem {
            ring: self.clone(),
            num,
            dshift: 0,
            nprec: self.prec(),
            exact_zero: v.is_zero(),
        }
    }

    pub fn from_i64(self: &Arc<Self>, v: i64) -> TowerElem {
        self.from_bigint(&BigInt::from(v))
    }

    /// The uniformizer y itself (valuation 1/e).
    pub fn uniformizer(self: &Arc<Self>) -> TowerElem {
        if self.e == 1 {
            return self.from_bigint(&BigInt::from(self.p()));
        }
        let mut num = vec![self.wzero(); self.e as usize];
        num[1][0] = BigInt::one();
        TowerElem { ring: self.clone(), num, dshift: 0, nprec: self.prec(), exact_zero: false }
    }

    /// Embed a rational number (p-part of the denominator becomes a y-shift).
    pub fn from_rational(self: &Arc<Self>, r: &num_rational::BigRational) -> Result<TowerElem> {
        if r.is_zero() {
            return Ok(self.zero());
        }
        let p = self.p();
        let t = vp_bigint(r.denom(), p).expect("nonzero denominator");
        let mut d = r.denom().clone();
        for _ in 0..t {
            d /= BigInt::from(p);
        }
        let d_inv = mod_inverse_bigint(&d, &self.prime.modulus)?;
        let c = (r.numer() * &d_inv).mod_floor(&self.prime.modulus);
        let mut z = self.from_bigint(&c);
        z.dshift = t as u32 * self.e;
        z.exact_zero = false;
        Ok(z)
    }

    /// Embed an exact cyclotomic number whose order divides the prime's n.
    pub fn from_cyc(self: &Arc<Self>, a: &CycElem) -> Result<TowerElem> {
        let a = if a.order == self.prime.n { a.clone() } else { a.promote(self.prime.n)? };
        if a.is_zero() {
            return Ok(self.zero());
        }
        let (ints, den) = a.to_integral();
        let p = self.p();
        let t = vp_bigint(&den, p).expect("nonzero denominator");
        let mut d = den;
        for _ in 0..t {
            d /= BigInt::from(p);
        }
        let d_inv = mod_inverse_bigint(&d, &self.prime.modulus)?;
        let mut w = self.wzero();
        for (i, c) in ints.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let scaled = (c * &d_inv).mod_floor(&self.prime.modulus);
            for (k, base) in self.xpow[i].iter().enumerate() {
                w[k] = (&w[k] + &scaled * base).mod_floor(&self.prime.modulus);
            }
        }
        let mut num = vec![self.wzero(); self.e as usize];
        num[0] = w;
        Ok(TowerElem {
            ring: self.clone(),
            num,
            dshift: t as u32 * self.e,
            nprec: self.prec(),
            exact_zero: false,
        })
    }
}

/// multiply a W element by x and reduce mod (g, p^prec)
fn wshift_reduce(a: &Unram, prime: &PadicPrime) -> Unram {
    let f = prime.f();
    let m = &prime.modulus;
    let mut out = vec![BigInt::zero(); f];
    for i in (1..f).rev() {
        out[i] = a[i - 1].clone();
    }
    let top = &a[f - 1];
    if !top.is_zero() {
        for i in 0..f {
            out[i] = (&out[i] - top * &prime.g[i]).mod_floor(m);
        }
    }
    out
}

fn wmul(a: &Unram, b: &Unram, prime: &PadicPrime) -> Unram {
    let f = prime.f();
    let m = &prime.modulus;
    let mut raw = vec![BigInt::zero(); 2 * f];
    for i in 0..f {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..f {
            if !b[j].is_zero() {
                raw[i + j] += &a[i] * &b[j];
            }
        }
    }
    for i in (f..2 * f).rev() {
        let c = raw[i].mod_floor(m);
        raw[i] = BigInt::zero();
        if c.is_zero() {
            continue;
        }
        for j in 0..f {
            raw[i - f + j] -= &c * &prime.g[j];
        }
    }
    raw.truncate(f);
    raw.iter().map(|c| c.mod_floor(m)).collect()
}

fn mod_inverse_bigint(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return Err(CoreError::NotAUnit);
    }
    Ok(e.x.mod_floor(m))
}

/// An element of W[y]/(y^e - p), stored as (sum_j num[j] y^j) / y^dshift.
///
/// `nprec` bounds the base-p digits of the numerator coefficients that are
/// still trustworthy; valuation queries cap at it.
#[derive(Debug, Clone)]
pub struct TowerElem {
    pub ring: Arc<TowerRing>,
    num: Vec<Unram>,
    dshift: u32,
    nprec: u32,
    exact_zero: bool,
}

impl PartialEq for TowerElem {
    /// Equality of representations (same dshift); use `congruent` for the
    /// metric notion.
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.dshift == other.dshift
            && self.num == other.num
    }
}

impl TowerElem {
    fn check_ring(&self, other: &TowerElem) {
        assert!(self.ring == other.ring, "tower ring mismatch");
    }

    pub fn nprec(&self) -> u32 {
        self.nprec
    }

    pub fn dshift(&self) -> u32 {
        self.dshift
    }

    /// Multiply by y^k (exact; wraps y^e into a factor p).
    pub fn mul_y_pow(&self, k: u32) -> TowerElem {
        let e = self.ring.e as usize;
        let m = &self.ring.prime.modulus;
        let mut out = self.clone();
        for _ in 0..k {
            let mut next = vec![out.ring.wzero(); e];
            // y * sum c_j y^j: c_{e-1} wraps to p * c_{e-1} at y^0
            for j in 0..e - 1 {
                next[j + 1] = out.num[j].clone();
            }
            let p = BigInt::from(out.ring.p());
            for (i, c) in out.num[e - 1].iter().enumerate() {
                next[0][i] = (c * &p).mod_floor(m);
            }
            out.num = next;
        }
        out
    }

    /// Divide the numerator by y once; requires the y-valuation of the
    /// numerator to be >= 1. Costs one digit of numerator precision when a
    /// genuinely nonzero wrap-around coefficient is divided by p.
    fn div_y_once(&mut self) -> Result<()> {
        let e = self.ring.e as usize;
        let p = BigInt::from(self.ring.p());
        let c0 = &self.num[0];
        let c0_exact_zero = c0.iter().all(|c| c.is_zero());
        if !c0_exact_zero {
            for c in c0 {
                if !(c % &p).is_zero() {
                    return Err(CoreError::Precondition("numerator not divisible by y".into()));
                }
            }
        }
        let mut next = vec![self.ring.wzero(); e];
        for j in 1..e {
            next[j - 1] = self.num[j].clone();
        }
        for (i, c) in self.num[0].iter().enumerate() {
            next[e - 1][i] = c / &p;
        }
        self.num = next;
        if !c0_exact_zero {
            self.nprec = self.nprec.saturating_sub(1);
        }
        Ok(())
    }

    /// Cancel y powers between numerator and denominator. Absolute precision
    /// is unchanged (each canceled p costs one numerator digit), but the
    /// representation stays small under iterated arithmetic.
    fn normalized(mut self) -> Self {
        if self.exact_zero {
            self.dshift = 0;
            for w in self.num.iter_mut() {
                for c in w.iter_mut() {
                    *c = BigInt::zero();
                }
            }
            return self;
        }
        let p = BigInt::from(self.ring.p());
        while self.dshift > 0 && self.nprec > 0 {
            let divisible = self.num[0].iter().all(|c| (c % &p).is_zero());
            if !divisible {
                break;
            }
            if self.div_y_once().is_err() {
                break;
            }
            self.dshift -= 1;
        }
        self
    }

    /// y-adic valuation of the numerator, capped at e * nprec.
    fn num_yval(&self) -> Option<u32> {
        let cap = self.nprec;
        let mut best: Option<u32> = None;
        for (j, w) in self.num.iter().enumerate() {
            for c in w {
                if let Some(v) = vp_bigint(c, self.ring.p()) {
                    if (v as u32) < cap {
                        let yv = self.ring.e * (v as u32) + j as u32;
                        best = Some(best.map_or(yv, |b| b.min(yv)));
                    }
                } // a zero coefficient carries no digit below the cap
            }
        }
        best.filter(|&b| b < self.ring.e * cap)
    }

    /// p-normalized valuation, with precision-aware non-finite states.
    pub fn val(&self) -> Val {
        if self.exact_zero {
            return Val::Infinite;
        }
        let e = self.ring.e as i64;
        match self.num_yval() {
            Some(m) => Val::Finite(Rational64::new(m as i64 - self.dshift as i64, e)),
            None => Val::AtLeast(Rational64::new(
                (self.ring.e * self.nprec) as i64 - self.dshift as i64,
                e,
            )),
        }
    }

    pub fn is_zero_within_precision(&self) -> bool {
        self.exact_zero || self.num_yval().is_none()
    }

    pub fn add(&self, other: &TowerElem) -> TowerElem {
        self.check_ring(other);
        let d = self.dshift.max(other.dshift);
        let a = self.mul_y_pow(d - self.dshift);
        let b = other.mul_y_pow(d - other.dshift);
        let m = &self.ring.prime.modulus;
        let mut num = Vec::with_capacity(a.num.len());
        for j in 0..a.num.len() {
            let w: Unram = a.num[j]
                .iter()
                .zip(&b.num[j])
                .map(|(x, y)| (x + y).mod_floor(m))
                .collect();
            num.push(w);
        }
        TowerElem {
            ring: self.ring.clone(),
            num,
            dshift: d,
            nprec: a.nprec.min(b.nprec),
            exact_zero: self.exact_zero && other.exact_zero,
        }
        .normalized()
    }

    pub fn neg(&self) -> TowerElem {
        let m = &self.ring.prime.modulus;
        let num = self
            .num
            .iter()
            .map(|w| w.iter().map(|c| (-c).mod_floor(m)).collect())
            .collect();
        TowerElem { ring: self.ring.clone(), num, ..self.clone() }
    }

    pub fn sub(&self, other: &TowerElem) -> TowerElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TowerElem) -> TowerElem {
        self.check_ring(other);
        let e = self.ring.e as usize;
        let prime = &self.ring.prime;
        let m = &prime.modulus;
        let mut acc: Vec<Unram> = vec![self.ring.wzero(); e];
        let p = BigInt::from(self.ring.p());
        for j1 in 0..e {
            if self.num[j1].iter().all(|c| c.is_zero()) {
                continue;
            }
            for j2 in 0..e {
                if other.num[j2].iter().all(|c| c.is_zero()) {
                    continue;
                }
                let prod = wmul(&self.num[j1], &other.num[j2], prime);
                let (carry, j) = ((j1 + j2) / e, (j1 + j2) % e);
                for (i, c) in prod.iter().enumerate() {
                    let term = if carry > 0 { c * p.pow(carry as u32) } else { c.clone() };
                    acc[j][i] = (&acc[j][i] + term).mod_floor(m);
                }
            }
        }
        TowerElem {
            ring: self.ring.clone(),
            num: acc,
            dshift: self.dshift + other.dshift,
            nprec: self.nprec.min(other.nprec),
            exact_zero: self.exact_zero || other.exact_zero,
        }
        .normalized()
    }

    pub fn pow(&self, mut k: u64) -> TowerElem {
        let mut r = self.ring.one();
        let mut b = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        r
    }

    /// Multiplicative inverse of an element with finite valuation.
    pub fn inverse(&self) -> Result<TowerElem> {
        let m = self.num_yval().ok_or(CoreError::NotAUnit)?;
        // strip y^m from the numerator to reach a unit
        let mut u = self.clone();
        u.dshift = 0;
        for _ in 0..m {
            u.div_y_once()?;
        }
        // Newton iteration from the W-layer inverse of the constant term
        let c0_inv = winv(&u.num[0], &self.ring.prime)?;
        let mut x = {
            let mut num = vec![self.ring.wzero(); self.ring.e as usize];
            num[0] = c0_inv;
            TowerElem { ring: self.ring.clone(), num, dshift: 0, nprec: u.nprec, exact_zero: false }
        };
        let iters = 64 - u64::from(self.ring.e * self.ring.prec()).leading_zeros() + 2;
        let two = self.ring.from_i64(2);
        for _ in 0..iters {
            let t = two.sub(&u.mul(&x));
            x = x.mul(&t);
        }
        // self = y^(m - dshift) * u, so inverse = x * y^(dshift - m)
        if self.dshift >= m {
            Ok(x.mul_y_pow(self.dshift - m).normalized())
        } else {
            let mut out = x;
            out.dshift += m - self.dshift;
            Ok(out.normalized())
        }
    }

    pub fn div(&self, other: &TowerElem) -> Result<TowerElem> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Decide v(self - other) >= c, refusing when precision cannot tell.
    pub fn congruent(&self, other: &TowerElem, c: Rational64) -> Result<bool> {
        self.sub(other).val().at_least(c)
    }

    /// Image in the residue field (requires valuation >= 0).
    pub fn residue(&self) -> Result<FqElem> {
        let mut a = self.clone();
        for _ in 0..self.dshift {
            a.div_y_once()
                .map_err(|_| CoreError::Precondition("negative valuation has no residue".into()))?;
        }
        a.dshift = 0;
        let p = BigInt::from(self.ring.p());
        Ok(a.num[0].iter().map(|c| u64::try_from(c.mod_floor(&p)).unwrap()).collect())
    }

    /// Lift a residue-field element into the tower (teichmuller-free lift).
    pub fn from_residue(ring: &Arc<TowerRing>, r: &FqElem) -> TowerElem {
        let mut num = vec![ring.wzero(); ring.e as usize];
        for (i, &c) in r.iter().enumerate() {
            num[0][i] = BigInt::from(c);
        }
        TowerElem {
            ring: ring.clone(),
            num,
            dshift: 0,
            nprec: ring.prec(),
            exact_zero: r.iter().all(|&c| c == 0),
        }
    }
}

fn winv(a: &Unram, prime: &PadicPrime) -> Result<Unram> {
    // invert mod p in the residue field, then Newton-lift to mod p^prec
    let ctx = prime.residue_field();
    let pbig = BigInt::from(prime.p);
    let abar: FqElem = a.iter().map(|c| u64::try_from(c.mod_floor(&pbig)).unwrap()).collect();
    let ibar = ctx.inv(&abar).ok_or(CoreError::NotAUnit)?;
    let mut x: Unram = ibar.iter().map(|&c| BigInt::from(c)).collect();
    let m = &prime.modulus;
    let iters = 64 - u64::from(prime.prec).leading_zeros() + 1;
    for _ in 0..iters {
        // x <- x (2 - a x)
        let ax = wmul(a, &x, prime);
        let mut t: Unram = ax.iter().map(|c| (-c).mod_floor(m)).collect();
        t[0] = (&t[0] + BigInt::from(2)).mod_floor(m);
        x = wmul(&x, &t, prime);
    }
    Ok(x)
}

/// Valuation of a cyclotomic number through the fixed prime above p.
///
/// The order of `a` must divide the prime's n. A p-power denominator shifts
/// the valuation down; a numerator vanishing to working precision reports a
/// lower bound, never infinity (unless `a` is exactly zero).
pub fn vp_cyclotomic(a: &CycElem, prime: &PadicPrime) -> Result<Val> {
    if a.is_zero() {
        return Ok(Val::Infinite);
    }
    let ring = TowerRing::unramified(prime.clone());
    Ok(ring.from_cyc(a)?.val())
}

impl std::fmt::Display for TowerElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (j, w) in self.num.iter().enumerate() {
            if j > 0 {
                write!(f, " + y^{j}*")?;
            }
            write!(f, "[")?;
            for (i, c) in w.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")?;
        }
        write!(f, ")/y^{}", self.dshift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::prime::choose_prime_above_p;
    use num_rational::BigRational;

    fn ring(n: u64, p: u64, prec: u32, e: u32) -> Arc<TowerRing> {
        TowerRing::new(choose_prime_above_p(n, p, prec).unwrap(), e)
    }

    #[test]
    fn integer_valuations() {
        let r = ring(1, 3, 20, 1);
        assert_eq!(r.from_i64(18).val(), Val::finite(2, 1));
        assert_eq!(r.from_i64(5).val(), Val::finite(0, 1));
        assert_eq!(r.zero().val(), Val::Infinite);
    }

    #[test]
    fn rational_with_p_denominator() {
        let r = ring(1, 3, 20, 1);
        let x = r
            .from_rational(&BigRational::new(BigInt::from(2), BigInt::from(27)))
            .unwrap();
        assert_eq!(x.val(), Val::finite(-3, 1));
    }

    #[test]
    fn uniformizer_has_valuation_one_over_e() {
        let r = ring(1, 3, 20, 4);
        assert_eq!(r.uniformizer().val(), Val::finite(1, 4));
        assert_eq!(r.uniformizer().pow(4).val(), Val::finite(1, 1));
    }

    #[test]
    fn product_valuations_add() {
        let r = ring(4, 5, 24, 2);
        let a = r.uniformizer().mul(&r.from_i64(10));
        let b = r.from_i64(15);
        let va = a.val().as_finite().unwrap();
        let vb = b.val().as_finite().unwrap();
        assert_eq!(a.mul(&b).val().as_finite().unwrap(), va + vb);
    }

    #[test]
    fn inverse_of_mixed_element() {
        let r = ring(1, 5, 30, 3);
        // a = 5 + y (valuation 1/3)
        let a = r.from_i64(5).add(&r.uniformizer());
        let inv = a.inverse().unwrap();
        let prod = a.mul(&inv);
        let diff = prod.sub(&r.one());
        assert!(diff.val().at_least(Rational64::new(20, 1)).unwrap());
        assert_eq!(inv.val().as_finite().unwrap(), Rational64::new(-1, 3));
    }

    #[test]
    fn precision_exhaustion_reports_at_least() {
        let r = ring(1, 3, 8, 1);
        let x = r.from_bigint(&BigInt::from(3).pow(9)); // beyond precision
        match x.val() {
            Val::AtLeast(b) => assert_eq!(b, Rational64::new(8, 1)),
            v => panic!("expected AtLeast, got {v:?}"),
        }
    }

    #[test]
    fn cyclotomic_valuations_match_rational_ones() {
        // compatibility: vp on Q(zeta_4) restricted to Q equals vp_rational
        let pr = choose_prime_above_p(4, 5, 16).unwrap();
        for v in [-2i64, 0, 1, 3] {
            let x = BigRational::new(
                BigInt::from(7) * BigInt::from(5).pow(v.unsigned_abs() as u32),
                if v < 0 { BigInt::from(5).pow((2 * v.unsigned_abs()) as u32) } else { BigInt::one() },
            );
            let c = CycElem::from_rational(4, x.clone());
            let through_tower = vp_cyclotomic(&c, &pr).unwrap();
            let direct = crate::padic::vp_rational(&x, 5).unwrap();
            assert_eq!(through_tower, direct);
        }
    }

    #[test]
    fn zeta4_minus_one_is_unit_at_5() {
        let pr = choose_prime_above_p(4, 5, 10).unwrap();
        let a = CycElem::zeta_pow(4, 1).sub(&CycElem::one(4));
        assert_eq!(vp_cyclotomic(&a, &pr).unwrap(), Val::finite(0, 1));
    }

    #[test]
    fn five_zeta4_has_valuation_one() {
        let pr = choose_prime_above_p(4, 5, 10).unwrap();
        let a = CycElem::zeta_pow(4, 1).scale(&BigRational::from_integer(BigInt::from(5)));
        assert_eq!(vp_cyclotomic(&a, &pr).unwrap(), Val::finite(1, 1));
        assert_eq!(vp_cyclotomic(&CycElem::zero(4), &pr).unwrap(), Val::Infinite);
    }
}
