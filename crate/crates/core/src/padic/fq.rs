//! The residue field F_q = F_p[x]/(g) and univariate polynomial
//! factorization over it (distinct-degree plus Cantor-Zassenhaus splitting,
//! p odd). Deterministically seeded so factorizations are reproducible.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Field context: q = p^f with f = deg g, g monic irreducible mod p.
/// Elements are coefficient vectors of length f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqCtx {
    pub p: u64,
    /// monic irreducible over F_p, ascending coefficients, degree f >= 1
    pub g: Vec<u64>,
}

pub type FqElem = Vec<u64>;

impl FqCtx {
    pub fn prime_field(p: u64) -> Self {
        FqCtx { p, g: vec![0, 1] }
    }

    pub fn f(&self) -> usize {
        self.g.len() - 1
    }

    pub fn q(&self) -> BigUint {
        BigUint::from(self.p).pow(self.f() as u32)
    }

    pub fn zero(&self) -> FqElem {
        vec![0; self.f()]
    }

    pub fn one(&self) -> FqElem {
        let mut z = self.zero();
        z[0] = 1 % self.p;
        z
    }

    pub fn from_u64(&self, v: u64) -> FqElem {
        let mut z = self.zero();
        z[0] = v % self.p;
        z
    }

    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter().zip(b).map(|(&x, &y)| (x + self.p - y % self.p) % self.p).collect()
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        a.iter().map(|&x| (self.p - x % self.p) % self.p).collect()
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let f = self.f();
        let mut raw = vec![0u64; 2 * f];
        for i in 0..f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                if b[j] != 0 {
                    raw[i + j] = ((raw[i + j] as u128 + a[i] as u128 * b[j] as u128)
                        % self.p as u128) as u64;
                }
            }
        }
        // reduce modulo g (monic)
        for i in (f..2 * f).rev() {
            let c = raw[i];
            if c == 0 {
                continue;
            }
            raw[i] = 0;
            for j in 0..f {
                let t = (c as u128 * self.g[j] as u128) % self.p as u128;
                raw[i - f + j] =
                    ((raw[i - f + j] as u128 + self.p as u128 - t) % self.p as u128) as u64;
            }
        }
        raw.truncate(f);
        raw
    }

    pub fn pow(&self, a: &FqElem, e: &BigUint) -> FqElem {
        let mut r = self.one();
        let mut base = a.clone();
        for bit in 0..e.bits() {
            if e.bit(bit) {
                r = self.mul(&r, &base);
            }
            base = self.mul(&base, &base);
        }
        r
    }

    pub fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            return None;
        }
        // extended gcd of a (as F_p-poly) with g
        let p = self.p;
        let mut r0: Vec<u64> = self.g.clone();
        let mut r1: Vec<u64> = a.clone();
        fp_trim(&mut r1);
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, rem) = fp_divmod(&r0, &r1, p);
            let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        debug_assert_eq!(r0.len(), 1);
        let c = crate::padic::dirichlet::inv_mod(r0[0], p);
        let mut out = self.zero();
        for (i, &v) in s0.iter().enumerate() {
            if i < out.len() {
                out[i] = (v as u128 * c as u128 % p as u128) as u64;
            }
        }
        Some(out)
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> FqElem {
        (0..self.f()).map(|_| rng.gen_range(0..self.p)).collect()
    }
}

// ---- F_p polynomial helpers (coefficients as u64) ----

pub fn fp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for i in 0..a.len() {
        if a[i] == 0 {
            continue;
        }
        for j in 0..b.len() {
            out[i + j] = ((out[i + j] as u128 + a[i] as u128 * b[j] as u128) % p as u128) as u64;
        }
    }
    out
}

pub fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = a.to_vec();
    out.resize(out.len().max(b.len()), 0);
    for (i, &v) in b.iter().enumerate() {
        out[i] = (out[i] + p - v % p) % p;
    }
    fp_trim(&mut out);
    out
}

pub fn fp_divmod(num: &[u64], den: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rem = num.to_vec();
    fp_trim(&mut rem);
    let mut den = den.to_vec();
    fp_trim(&mut den);
    assert!(!den.is_empty());
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let lead_inv = crate::padic::dirichlet::inv_mod(den[dd], p);
    let mut quot = vec![0u64; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        if rem.len() < i + dd + 1 || rem[i + dd] == 0 {
            continue;
        }
        let c = (rem[i + dd] as u128 * lead_inv as u128 % p as u128) as u64;
        quot[i] = c;
        for j in 0..=dd {
            let t = (c as u128 * den[j] as u128 % p as u128) as u64;
            rem[i + j] = (rem[i + j] + p - t) % p;
        }
        fp_trim(&mut rem);
    }
    fp_trim(&mut rem);
    (quot, rem)
}

// ---- polynomials over F_q ----

pub type FqPoly = Vec<FqElem>;

pub fn fqp_trim(ctx: &FqCtx, a: &mut FqPoly) {
    while a.last().map(|c| ctx.is_zero(c)).unwrap_or(false) {
        a.pop();
    }
}

pub fn fqp_deg(ctx: &FqCtx, a: &FqPoly) -> Option<usize> {
    let mut b = a.clone();
    fqp_trim(ctx, &mut b);
    if b.is_empty() {
        None
    } else {
        Some(b.len() - 1)
    }
}

pub fn fqp_mul(ctx: &FqCtx, a: &FqPoly, b: &FqPoly) -> FqPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
    for i in 0..a.len() {
        if ctx.is_zero(&a[i]) {
            continue;
        }
        for j in 0..b.len() {
            if !ctx.is_zero(&b[j]) {
                let t = ctx.mul(&a[i], &b[j]);
                out[i + j] = ctx.add(&out[i + j], &t);
            }
        }
    }
    out
}

pub fn fqp_sub(ctx: &FqCtx, a: &FqPoly, b: &FqPoly) -> FqPoly {
    let mut out = a.clone();
    out.resize(out.len().max(b.len()), ctx.zero());
    for (i, v) in b.iter().enumerate() {
        out[i] = ctx.sub(&out[i], v);
    }
    fqp_trim(ctx, &mut out);
    out
}

pub fn fqp_divmod(ctx: &FqCtx, num: &FqPoly, den: &FqPoly) -> (FqPoly, FqPoly) {
    let mut rem = num.clone();
    fqp_trim(ctx, &mut rem);
    let mut den = den.clone();
    fqp_trim(ctx, &mut den);
    assert!(!den.is_empty());
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let lead_inv = ctx.inv(&den[dd]).expect("nonzero leading coefficient");
    let mut quot = vec![ctx.zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        if rem.len() < i + dd + 1 || ctx.is_zero(&rem[i + dd]) {
            continue;
        }
        let c = ctx.mul(&rem[i + dd], &lead_inv);
        quot[i] = c.clone();
        for j in 0..=dd {
            let t = ctx.mul(&c, &den[j]);
            rem[i + j] = ctx.sub(&rem[i + j], &t);
        }
        fqp_trim(ctx, &mut rem);
    }
    fqp_trim(ctx, &mut rem);
    (quot, rem)
}

pub fn fqp_gcd(ctx: &FqCtx, a: &FqPoly, b: &FqPoly) -> FqPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    fqp_trim(ctx, &mut a);
    fqp_trim(ctx, &mut b);
    while !b.is_empty() {
        let (_, r) = fqp_divmod(ctx, &a, &b);
        a = b;
        b = r;
    }
    fqp_monic(ctx, &a)
}

pub fn fqp_monic(ctx: &FqCtx, a: &FqPoly) -> FqPoly {
    let mut a = a.clone();
    fqp_trim(ctx, &mut a);
    if a.is_empty() {
        return a;
    }
    let inv = ctx.inv(a.last().unwrap()).unwrap();
    for c in a.iter_mut() {
        *c = ctx.mul(c, &inv);
    }
    a
}

pub fn fqp_derivative(ctx: &FqCtx, a: &FqPoly) -> FqPoly {
    let mut out = Vec::new();
    for i in 1..a.len() {
        let k = ctx.from_u64(i as u64);
        out.push(ctx.mul(&a[i], &k));
    }
    fqp_trim(ctx, &mut out);
    out
}

/// x^e mod f by square-and-multiply on the polynomial level.
pub fn fqp_powmod(ctx: &FqCtx, base: &FqPoly, e: &BigUint, f: &FqPoly) -> FqPoly {
    let mut r = vec![ctx.one()];
    let (_, mut b) = fqp_divmod(ctx, base, f);
    for bit in 0..e.bits() {
        if e.bit(bit) {
            let t = fqp_mul(ctx, &r, &b);
            r = fqp_divmod(ctx, &t, f).1;
        }
        let t = fqp_mul(ctx, &b, &b);
        b = fqp_divmod(ctx, &t, f).1;
    }
    r
}

pub fn fqp_eval(ctx: &FqCtx, a: &FqPoly, x: &FqElem) -> FqElem {
    let mut acc = ctx.zero();
    for c in a.iter().rev() {
        acc = ctx.mul(&acc, x);
        acc = ctx.add(&acc, c);
    }
    acc
}

/// Full factorization over F_q into monic irreducibles with multiplicities.
/// Requires p odd (Cantor-Zassenhaus splitting).
pub fn fqp_factor(ctx: &FqCtx, f: &FqPoly) -> Vec<(FqPoly, u32)> {
    assert!(ctx.p > 2, "splitting requires odd characteristic");
    let mut f = fqp_monic(ctx, f);
    let mut out: Vec<(FqPoly, u32)> = Vec::new();
    if f.len() <= 1 {
        return out;
    }
    // peel multiplicities by repeated squarefree splitting; over F_q with
    // q a power of p, f' = 0 means f is a p-th power -- not hit by our
    // inputs (characteristic polynomials of separable data), guarded anyway
    let mut mult = 1u32;
    loop {
        let deriv = fqp_derivative(ctx, &f);
        if deriv.is_empty() {
            // f = h(x^p); take p-th root by exponent division
            let mut h = Vec::new();
            let p = ctx.p as usize;
            let mut i = 0;
            while i < f.len() {
                // Frobenius inverse on coefficients: c -> c^(q/p)
                let e = ctx.q() / BigUint::from(ctx.p);
                let e = if e.is_zero() { BigUint::one() } else { e };
                h.push(ctx.pow(&f[i], &e));
                i += p;
            }
            f = h;
            mult *= ctx.p as u32;
            continue;
        }
        break;
    }
    let sqfree_part = {
        let d = fqp_gcd(ctx, &f, &fqp_derivative(ctx, &f));
        fqp_divmod(ctx, &f, &d).0
    };
    for irr in factor_squarefree(ctx, &sqfree_part) {
        // multiplicity by repeated exact division
        let mut m = 0u32;
        let mut g = f.clone();
        loop {
            let (q, r) = fqp_divmod(ctx, &g, &irr);
            if !r.is_empty() {
                break;
            }
            m += 1;
            g = q;
        }
        out.push((irr, m * mult));
    }
    out.sort_by(|a, b| lex_key(&a.0).cmp(&lex_key(&b.0)));
    out
}

fn lex_key(p: &FqPoly) -> Vec<u64> {
    let mut k = vec![p.len() as u64];
    for c in p {
        k.extend_from_slice(c);
    }
    k
}

fn factor_squarefree(ctx: &FqCtx, f: &FqPoly) -> Vec<FqPoly> {
    let mut out = Vec::new();
    let mut f = fqp_monic(ctx, f);
    if f.len() <= 1 {
        return out;
    }
    // distinct-degree
    let q = ctx.q();
    let x: FqPoly = vec![ctx.zero(), ctx.one()];
    let mut xq = x.clone();
    let mut d = 1usize;
    while f.len() > 1 {
        if 2 * d > f.len() - 1 {
            out.push(fqp_monic(ctx, &f));
            break;
        }
        xq = fqp_powmod(ctx, &xq, &q, &f);
        let diff = fqp_sub(ctx, &xq, &x);
        let g = fqp_gcd(ctx, &diff, &f);
        if g.len() > 1 {
            // g = product of all irreducible factors of degree d
            split_equal_degree(ctx, &g, d, &mut out);
            f = fqp_divmod(ctx, &f, &g).0;
            xq = fqp_divmod(ctx, &xq, &f).1;
        }
        d += 1;
    }
    out
}

fn split_equal_degree(ctx: &FqCtx, f: &FqPoly, d: usize, out: &mut Vec<FqPoly>) {
    let deg = f.len() - 1;
    if deg == d {
        out.push(fqp_monic(ctx, f));
        return;
    }
    // Cantor-Zassenhaus: r^((q^d-1)/2) - 1 splits with probability ~1/2
    let e = (ctx.q().pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    let mut seed = [0u8; 32];
    for (i, c) in f.iter().flat_map(|c| c.iter()).enumerate() {
        seed[i % 32] ^= (*c as u8).wrapping_add(i as u8);
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    loop {
        let r: FqPoly = (0..deg).map(|_| ctx.random(&mut rng)).collect();
        let mut r = r;
        fqp_trim(ctx, &mut r);
        if r.is_empty() {
            continue;
        }
        let pw = fqp_powmod(ctx, &r, &e, f);
        let minus1 = fqp_sub(ctx, &pw, &vec![ctx.one()]);
        let g = fqp_gcd(ctx, &minus1, f);
        if g.len() > 1 && g.len() - 1 < deg {
            split_equal_degree(ctx, &g, d, out);
            let h = fqp_divmod(ctx, f, &g).0;
            split_equal_degree(ctx, &h, d, out);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> FqCtx {
        FqCtx::prime_field(p)
    }

    fn poly(ctx: &FqCtx, coeffs: &[u64]) -> FqPoly {
        coeffs.iter().map(|&c| ctx.from_u64(c)).collect()
    }

    #[test]
    fn factor_x2_plus_1_mod_5_splits() {
        let ctx = fp(5);
        let f = poly(&ctx, &[1, 0, 1]);
        let factors = fqp_factor(&ctx, &f);
        assert_eq!(factors.len(), 2);
        for (g, m) in &factors {
            assert_eq!(g.len(), 2);
            assert_eq!(*m, 1);
        }
        // roots are 2 and 3
        let roots: Vec<u64> = factors.iter().map(|(g, _)| (5 - g[0][0]) % 5).collect();
        let mut sorted = roots.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![2, 3]);
    }

    #[test]
    fn factor_x2_plus_1_mod_3_is_irreducible() {
        let ctx = fp(3);
        let f = poly(&ctx, &[1, 0, 1]);
        let factors = fqp_factor(&ctx, &f);
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].0.len(), 3);
        assert_eq!(factors[0].1, 1);
    }

    #[test]
    fn factor_with_multiplicity() {
        let ctx = fp(7);
        // (x-1)^2 (x-2)
        let f = fqp_mul(
            &ctx,
            &fqp_mul(&ctx, &poly(&ctx, &[6, 1]), &poly(&ctx, &[6, 1])),
            &poly(&ctx, &[5, 1]),
        );
        let factors = fqp_factor(&ctx, &f);
        let mut mults: Vec<u32> = factors.iter().map(|(_, m)| *m).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![1, 2]);
    }

    #[test]
    fn factorization_over_f9() {
        // F_9 = F_3[t]/(t^2+1); factor x^2 - t: a square root of t exists in F_9
        let ctx = FqCtx { p: 3, g: vec![1, 0, 1] };
        let t = vec![0u64, 1u64];
        let f: FqPoly = vec![ctx.neg(&t), ctx.zero(), ctx.one()];
        let factors = fqp_factor(&ctx, &f);
        let product_deg: usize = factors.iter().map(|(g, m)| (g.len() - 1) * *m as usize).sum();
        assert_eq!(product_deg, 2);
        // verify each factor actually divides
        for (g, _) in &factors {
            let (_, r) = fqp_divmod(&ctx, &f, g);
            assert!(r.is_empty());
        }
    }
}
