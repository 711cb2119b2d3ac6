//! Deterministic choice of a prime above p in Q(zeta_n) at working precision:
//! factor the n-th cyclotomic polynomial mod p, take the lexicographically
//! least irreducible factor, and Hensel-lift it to mod p^P.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::padic::cyclotomic::cyclotomic_polynomial;
use crate::padic::fq::{self, FqCtx};
use crate::padic::{euler_phi, is_prime};

/// A fixed prime above p in Q(zeta_n), n prime to p, carried at precision P.
///
/// `g` is a monic lift of an irreducible factor of Phi_n mod p; the
/// unramified layer is W = Z[x]/(p^P, g) with residue field of size
/// q = p^f, f = deg g = ord_n(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicPrime {
    pub p: u64,
    pub n: u64,
    pub prec: u32,
    /// monic, ascending coefficients in [0, p^prec), degree f
    pub g: Vec<BigInt>,
    /// p^prec
    pub modulus: BigInt,
}

impl PadicPrime {
    pub fn f(&self) -> usize {
        self.g.len() - 1
    }

    /// Residue field size q = p^f (errors if it does not fit in u64).
    pub fn q(&self) -> Result<u64> {
        let mut q: u64 = 1;
        for _ in 0..self.f() {
            q = q
                .checked_mul(self.p)
                .ok_or_else(|| CoreError::Budget("residue field size exceeds u64".into()))?;
        }
        Ok(q)
    }

    /// Residue field context F_q = F_p[x]/(g mod p).
    pub fn residue_field(&self) -> FqCtx {
        let p = BigInt::from(self.p);
        let g: Vec<u64> = self
            .g
            .iter()
            .map(|c| u64::try_from(c.mod_floor(&p)).unwrap())
            .collect();
        FqCtx { p: self.p, g }
    }

    /// For a linear factor x - r, the root r mod p.
    pub fn canonical_root_mod_p(&self) -> Option<u64> {
        if self.f() != 1 {
            return None;
        }
        let p = BigInt::from(self.p);
        let c0 = self.g[0].mod_floor(&p);
        Some(u64::try_from((&p - c0).mod_floor(&p)).unwrap())
    }

    /// Same prime carried at a different precision.
    pub fn with_precision(&self, prec: u32) -> Result<PadicPrime> {
        if prec == self.prec {
            return Ok(self.clone());
        }
        choose_prime_above_p(self.n, self.p, prec)
    }
}

/// Deterministic prime above p: lexicographically least irreducible factor of
/// Phi_n mod p (by ascending coefficient tuple), Hensel-lifted to mod p^P.
///
/// For n = 1 the layer is trivial and `g = x` is used as a degree-1
/// placeholder (cyclotomic data of order 1 is rational and never touches x).
pub fn choose_prime_above_p(n: u64, p: u64, prec: u32) -> Result<PadicPrime> {
    if !is_prime(p) {
        return Err(CoreError::NotPrime(p));
    }
    if n == 0 || (n > 1 && n % p == 0) {
        return Err(CoreError::RamifiedCyclotomic { p, n });
    }
    assert!(prec >= 1);
    let modulus = BigInt::from(p).pow(prec);
    if n == 1 {
        return Ok(PadicPrime { p, n, prec, g: vec![BigInt::zero(), BigInt::one()], modulus });
    }

    let phi_n: Vec<BigInt> = cyclotomic_polynomial(n);
    let ctx = FqCtx::prime_field(p);
    let f_bar: Vec<Vec<u64>> = phi_n
        .iter()
        .map(|c| vec![u64::try_from(c.mod_floor(&BigInt::from(p))).unwrap()])
        .collect();
    let factors = fq::fqp_factor(&ctx, &f_bar);
    debug_assert!(factors.iter().all(|(_, m)| *m == 1), "Phi_n squarefree mod p for p not dividing n");
    // factors are sorted by ascending coefficient tuple; take the least
    let gbar: Vec<u64> = factors[0].0.iter().map(|c| c[0]).collect();
    debug_assert_eq!(
        (euler_phi(n) as usize) % (gbar.len() - 1),
        0,
        "all factors share degree ord_n(p)"
    );
    let g = hensel_lift_factor(&phi_n, &gbar, p, prec);
    Ok(PadicPrime { p, n, prec, g, modulus })
}

/// Quadratic Hensel lifting of a monic factor gbar of the monic integer
/// polynomial F from mod p to mod p^prec.
fn hensel_lift_factor(big_f: &[BigInt], gbar: &[u64], p: u64, prec: u32) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    let ctx = FqCtx::prime_field(p);
    let f_bar: Vec<Vec<u64>> = big_f
        .iter()
        .map(|c| vec![u64::try_from(c.mod_floor(&pb)).unwrap()])
        .collect();
    let g0: Vec<Vec<u64>> = gbar.iter().map(|&c| vec![c]).collect();
    let h0 = fq::fqp_divmod(&ctx, &f_bar, &g0).0;
    // Bezout: s*g + t*h = 1 mod p
    let (s0, t0) = fp_bezout(&ctx, &g0, &h0);

    let to_big = |v: &[Vec<u64>]| -> Vec<BigInt> { v.iter().map(|c| BigInt::from(c[0])).collect() };
    let mut g = to_big(&g0);
    let mut h = to_big(&h0);
    let mut s = to_big(&s0);
    let mut t = to_big(&t0);

    let mut k = 1u32;
    while k < prec {
        let k2 = (2 * k).min(prec);
        let m2 = BigInt::from(p).pow(k2);
        // e = F - g h  (mod m2)
        let e = zp_sub(big_f, &zp_mul(&g, &h, &m2), &m2);
        // delta_g = (t e) rem g;  delta_h = (e - h delta_g) / g  (g monic)
        let te = zp_mul(&t, &e, &m2);
        let (_, dg) = zp_divmod_monic(&te, &g, &m2);
        let num = zp_sub(&e, &zp_mul(&h, &dg, &m2), &m2);
        let (dh, rem) = zp_divmod_monic(&num, &g, &m2);
        debug_assert!(rem.iter().all(|c| c.is_zero()), "exact Hensel division");
        g = zp_add(&g, &dg, &m2);
        h = zp_add(&h, &dh, &m2);

        if k2 < prec {
            // lift the Bezout pair: err = s g + t h - 1
            let mut err = zp_add(&zp_mul(&s, &g, &m2), &zp_mul(&t, &h, &m2), &m2);
            if err.is_empty() {
                err = vec![BigInt::zero()];
            }
            err[0] -= BigInt::one();
            let err = zp_normalize(&err, &m2);
            let serr = zp_mul(&s, &err, &m2);
            let (q, ds) = zp_divmod_monic(&serr, &h, &m2);
            // s' = s - ds ; t' = t - (t err + q g)
            s = zp_sub(&s, &ds, &m2);
            let tq = zp_add(&zp_mul(&t, &err, &m2), &zp_mul(&q, &g, &m2), &m2);
            t = zp_sub(&t, &tq, &m2);
        }
        k = k2;
    }
    let m = BigInt::from(p).pow(prec);
    zp_normalize(&g, &m)
}

fn fp_bezout(ctx: &FqCtx, g: &[Vec<u64>], h: &[Vec<u64>]) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    // extended gcd over F_p, polynomials with length-1 coefficient vectors
    let mut r0 = g.to_vec();
    let mut r1 = h.to_vec();
    let mut s0 = vec![ctx.one()];
    let mut s1: Vec<Vec<u64>> = vec![];
    let mut t0: Vec<Vec<u64>> = vec![];
    let mut t1 = vec![ctx.one()];
    loop {
        let mut r1t = r1.clone();
        fq::fqp_trim(ctx, &mut r1t);
        if r1t.is_empty() {
            break;
        }
        let (q, rem) = fq::fqp_divmod(ctx, &r0, &r1);
        let s2 = fq::fqp_sub(ctx, &s0, &fq::fqp_mul(ctx, &q, &s1));
        let t2 = fq::fqp_sub(ctx, &t0, &fq::fqp_mul(ctx, &q, &t1));
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    // r0 is a nonzero constant c: divide both through
    let c_inv = ctx.inv(&r0[0]).expect("coprime factors");
    let scale = |v: Vec<Vec<u64>>| -> Vec<Vec<u64>> {
        v.into_iter().map(|c| ctx.mul(&c, &c_inv)).collect()
    };
    (scale(s0), scale(t0))
}

// ---- dense BigInt polynomials modulo m ----

pub(crate) fn zp_normalize(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = a.iter().map(|c| num_integer::Integer::mod_floor(c, m)).collect();
    while out.last().map(|c| c.is_zero()).unwrap_or(false) {
        out.pop();
    }
    out
}

pub(crate) fn zp_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out = a.to_vec();
    out.resize(out.len().max(b.len()), BigInt::zero());
    for (i, v) in b.iter().enumerate() {
        out[i] += v;
    }
    zp_normalize(&out, m)
}

pub(crate) fn zp_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out = a.to_vec();
    out.resize(out.len().max(b.len()), BigInt::zero());
    for (i, v) in b.iter().enumerate() {
        out[i] -= v;
    }
    zp_normalize(&out, m)
}

pub(crate) fn zp_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for i in 0..a.len() {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..b.len() {
            if !b[j].is_zero() {
                out[i + j] += &a[i] * &b[j];
            }
        }
    }
    zp_normalize(&out, m)
}

/// Division with remainder by a monic polynomial, coefficients mod m.
pub(crate) fn zp_divmod_monic(num: &[BigInt], den: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let den = zp_normalize(den, m);
    debug_assert!(den.last().map(|c| c.is_one()).unwrap_or(false), "monic divisor");
    let mut rem = zp_normalize(num, m);
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        if rem.len() < i + dd + 1 {
            continue;
        }
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        quot[i] = c.clone();
        for j in 0..=dd {
            let t = &c * &den[j];
            rem[i + j] = num_integer::Integer::mod_floor(&(&rem[i + j] - t), m);
        }
        rem = zp_normalize(&rem, m);
    }
    (zp_normalize(&quot, m), rem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_placeholder() {
        let pr = choose_prime_above_p(1, 3, 10).unwrap();
        assert_eq!(pr.f(), 1);
        assert_eq!(pr.q().unwrap(), 3);
        assert_eq!(pr.g, vec![BigInt::zero(), BigInt::one()]);
    }

    #[test]
    fn split_prime_n4_p5() {
        // x^2+1 mod 5 = (x-2)(x-3); lex-least by constant coefficient is x+2 = x-3
        let pr = choose_prime_above_p(4, 5, 2).unwrap();
        assert_eq!(pr.f(), 1);
        assert_eq!(pr.q().unwrap(), 5);
        let r = pr.canonical_root_mod_p().unwrap();
        assert!(r == 2 || r == 3);
        // r^2 = -1 mod 5
        assert_eq!(r * r % 5, 4);
        // and the lift satisfies g | x^2+1 mod 25: root r25 with r25^2 = -1 mod 25
        let c0 = &pr.g[0];
        let r25 = (BigInt::from(25) - c0) % BigInt::from(25);
        assert_eq!((&r25 * &r25) % BigInt::from(25), BigInt::from(24));
    }

    #[test]
    fn inert_prime_n4_p3() {
        let pr = choose_prime_above_p(4, 3, 2).unwrap();
        assert_eq!(pr.f(), 2);
        assert_eq!(pr.q().unwrap(), 9);
    }

    #[test]
    fn ramified_rejected() {
        assert!(choose_prime_above_p(6, 3, 2).is_err());
    }

    #[test]
    fn hensel_lift_divides_to_high_precision() {
        // n = 8, p = 7: ord_8(7) = 2, so Phi_8 = x^4+1 factors into two quadratics
        let pr = choose_prime_above_p(8, 7, 8).unwrap();
        assert_eq!(pr.f(), 2);
        let phi: Vec<BigInt> = cyclotomic_polynomial(8);
        let m = BigInt::from(7).pow(8);
        let (_, rem) = zp_divmod_monic(&phi, &pr.g, &m);
        assert!(rem.iter().all(|c| c.is_zero()), "lifted factor divides Phi_8 mod 7^8");
    }

    #[test]
    fn deterministic_choice() {
        let a = choose_prime_above_p(12, 5, 6).unwrap();
        let b = choose_prime_above_p(12, 5, 6).unwrap();
        assert_eq!(a, b);
    }
}
