//! Dirichlet characters given by exponents on canonical generators of the
//! unit group, with values as exact cyclotomic numbers.

use num_integer::Integer;

use crate::error::{CoreError, Result};
use crate::padic::cyclotomic::CycElem;
use crate::padic::{euler_phi, factorize, is_prime};

/// Canonical generators of (Z/m)* via CRT over the prime-power factors.
///
/// Odd prime powers contribute one cyclic factor with the smallest primitive
/// root; 4 contributes <3>; 2^a (a >= 3) contributes <-1, 5>.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroup {
    pub modulus: u64,
    pub gens: Vec<u64>,
    pub orders: Vec<u64>,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn primitive_root_mod_prime(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = factorize(p - 1);
    'g: for g in 2..p {
        for &(q, _) in &factors {
            if pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'g;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

fn primitive_root_mod_prime_power(p: u64, a: u32) -> u64 {
    let g = primitive_root_mod_prime(p);
    if a == 1 {
        return g;
    }
    let pa = p.pow(a);
    // g lifts unless g^(p-1) = 1 mod p^2, in which case g + p works
    if pow_mod(g, p - 1, p * p) != 1 {
        g % pa
    } else {
        (g + p) % pa
    }
}

impl UnitGroup {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus >= 1);
        if modulus == 1 {
            return UnitGroup { modulus, gens: vec![], orders: vec![] };
        }
        let mut local: Vec<(u64, Vec<(u64, u64)>)> = Vec::new(); // (q, [(gen mod q, order)])
        for (p, a) in factorize(modulus) {
            let q = p.pow(a);
            if p == 2 {
                if a == 1 {
                    local.push((q, vec![]));
                } else if a == 2 {
                    local.push((q, vec![(3, 2)]));
                } else {
                    local.push((q, vec![(q - 1, 2), (5, 1 << (a - 2))]));
                }
            } else {
                local.push((q, vec![(primitive_root_mod_prime_power(p, a), euler_phi(q))]));
            }
        }
        // CRT each local generator to a global unit congruent to 1 elsewhere
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for (qi, gs) in &local {
            for &(g, ord) in gs {
                let mut x = 0u64;
                for r in 0..*qi {
                    let cand = r;
                    if cand % qi == g % qi {
                        // check congruent to 1 mod modulus/qi pieces via CRT solve
                        x = crt_pair(cand, *qi, 1, modulus / qi);
                        break;
                    }
                }
                gens.push(x % modulus);
                orders.push(ord);
            }
        }
        UnitGroup { modulus, gens, orders }
    }

    /// Discrete log of a unit with respect to the canonical generators
    /// (brute force per cyclic factor; moduli here are tiny).
    pub fn dlog(&self, a: u64) -> Option<Vec<u64>> {
        let a = a % self.modulus;
        if self.modulus == 1 {
            return Some(vec![]);
        }
        if a.gcd(&self.modulus) != 1 {
            return None;
        }
        // enumerate the full group once: product over generator powers
        let mut exps = vec![0u64; self.gens.len()];
        loop {
            let mut val = 1u64 % self.modulus;
            for (i, &e) in exps.iter().enumerate() {
                val = (val as u128 * pow_mod(self.gens[i], e, self.modulus) as u128
                    % self.modulus as u128) as u64;
            }
            if val == a {
                return Some(exps);
            }
            // increment mixed-radix counter
            let mut i = 0;
            loop {
                if i == exps.len() {
                    return None;
                }
                exps[i] += 1;
                if exps[i] < self.orders[i] {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }
}

fn crt_pair(a1: u64, m1: u64, a2: u64, m2: u64) -> u64 {
    if m2 == 1 {
        return a1 % m1;
    }
    if m1 == 1 {
        return a2 % m2;
    }
    // m1, m2 coprime
    let m2_inv = inv_mod(m2 % m1, m1);
    let diff = ((a1 as i128 - a2 as i128).rem_euclid(m1 as i128)) as u64;
    let t = (diff as u128 * m2_inv as u128 % m1 as u128) as u64;
    a2 + m2 * t
}

pub(crate) fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert_eq!(old_r.abs(), 1, "not invertible");
    ((old_s * old_r.signum()).rem_euclid(m as i128)) as u64
}

/// A Dirichlet character chi : (Z/modulus)* -> mu_order, zero off the units.
///
/// `exps[i]` is the exponent of zeta_order at the i-th canonical generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub order: u64,
    pub exps: Vec<u64>,
    group: UnitGroup,
}

impl DirichletCharacter {
    pub fn new(modulus: u64, order: u64, exps: Vec<u64>) -> Result<Self> {
        let group = UnitGroup::new(modulus);
        if exps.len() != group.gens.len() {
            return Err(CoreError::Precondition(format!(
                "expected {} generator exponents, got {}",
                group.gens.len(),
                exps.len()
            )));
        }
        for (i, &e) in exps.iter().enumerate() {
            // zeta_order^(e * ord(g_i)) must be 1
            if (e as u128 * group.orders[i] as u128) % order as u128 != 0 {
                return Err(CoreError::Precondition(format!(
                    "exponent {} incompatible with generator order {}",
                    e, group.orders[i]
                )));
            }
        }
        let exps: Vec<u64> = exps.into_iter().map(|e| e % order).collect();
        Ok(DirichletCharacter { modulus, order, exps, group })
    }

    pub fn trivial(modulus: u64) -> Self {
        let group = UnitGroup::new(modulus);
        let exps = vec![0u64; group.gens.len()];
        DirichletCharacter { modulus, order: 1, exps, group }
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// The exponent t with chi(a) = zeta_order^t, or None off the units.
    pub fn exponent_at(&self, a: i64) -> Option<u64> {
        let a = a.rem_euclid(self.modulus as i64) as u64;
        if self.modulus == 1 {
            return Some(0);
        }
        let dl = self.group.dlog(a)?;
        let mut t: u128 = 0;
        for (i, &e) in dl.iter().enumerate() {
            t += self.exps[i] as u128 * e as u128;
        }
        Some((t % self.order as u128) as u64)
    }

    /// chi(a) as an exact cyclotomic number (zero when gcd(a, modulus) > 1).
    pub fn eval(&self, a: i64) -> CycElem {
        match self.exponent_at(a) {
            Some(t) => CycElem::zeta_pow(self.order, t),
            None => CycElem::zero(self.order),
        }
    }

    /// The complex-conjugate value chi(a)^-1 on units, zero otherwise.
    pub fn eval_conj(&self, a: i64) -> CycElem {
        match self.exponent_at(a) {
            Some(t) => CycElem::zeta_pow(self.order, (self.order - t) % self.order),
            None => CycElem::zero(self.order),
        }
    }

    /// chi(-1) as +-1.
    pub fn parity(&self) -> i32 {
        let t = self.exponent_at(-1).expect("-1 is a unit");
        if t == 0 {
            1
        } else {
            // chi(-1)^2 = 1, so t is 0 or order/2
            -1
        }
    }

    /// Multiply two characters; modulus is the lcm and order a common lcm.
    pub fn mul(&self, other: &DirichletCharacter) -> DirichletCharacter {
        let m = self.modulus.lcm(&other.modulus);
        let n = self.order.lcm(&other.order);
        let group = UnitGroup::new(m);
        let mut exps = Vec::with_capacity(group.gens.len());
        for &g in &group.gens {
            let t1 = self.exponent_at(g as i64).expect("unit stays unit") * (n / self.order);
            let t2 = other.exponent_at(g as i64).expect("unit stays unit") * (n / other.order);
            exps.push((t1 + t2) % n);
        }
        // exponents on generators determine the character on all of (Z/m)*
        DirichletCharacter { modulus: m, order: n, exps, group }
            .reduce_order()
    }

    pub fn pow(&self, k: i64) -> DirichletCharacter {
        let n = self.order as i64;
        let k = k.rem_euclid(n) as u64;
        let exps = self.exps.iter().map(|&e| (e as u128 * k as u128 % self.order as u128) as u64).collect();
        DirichletCharacter {
            modulus: self.modulus,
            order: self.order,
            exps,
            group: self.group.clone(),
        }
        .reduce_order()
    }

    pub fn inverse(&self) -> DirichletCharacter {
        self.pow(-1)
    }

    /// Shrink `order` to the exact order of the character.
    fn reduce_order(self) -> DirichletCharacter {
        let mut g = self.order;
        for &e in &self.exps {
            g = g.gcd(&e);
        }
        if g <= 1 {
            return self;
        }
        let order = self.order / g;
        let exps = self.exps.iter().map(|&e| e / g).collect();
        DirichletCharacter { modulus: self.modulus, order, exps, group: self.group }
    }

    /// Smallest f | modulus through which the character factors.
    pub fn conductor(&self) -> u64 {
        'f: for f in crate::padic::divisors(self.modulus) {
            // chi factors through f iff chi(a) = 1 whenever a = 1 mod f, a unit mod modulus
            for a in 1..=self.modulus {
                if a % f == 1 % f.max(1)
                    && a.gcd(&self.modulus) == 1
                    && self.exponent_at(a as i64) != Some(0)
                {
                    continue 'f;
                }
            }
            return f;
        }
        self.modulus
    }

    /// View a character of conductor dividing m as a character mod m.
    pub fn extend_to(&self, m: u64) -> Result<DirichletCharacter> {
        if m % self.conductor() != 0 {
            return Err(CoreError::Precondition(format!(
                "conductor {} does not divide target modulus {m}",
                self.conductor()
            )));
        }
        let group = UnitGroup::new(m);
        let mut exps = Vec::with_capacity(group.gens.len());
        for &g in &group.gens {
            // g is a unit mod m; move it to a unit mod modulus congruent mod conductor
            let t = self
                .exponent_at_extended(g, m)
                .expect("generator reachable through conductor");
            exps.push(t);
        }
        Ok(DirichletCharacter { modulus: m, order: self.order, exps, group })
    }

    fn exponent_at_extended(&self, a: u64, m: u64) -> Option<u64> {
        let f = self.conductor();
        if f == 1 {
            return Some(0);
        }
        // find a unit mod self.modulus congruent to a mod f
        let mut b = a % f;
        while b.gcd(&self.modulus) != 1 {
            b += f;
            if b > self.modulus * 2 + f {
                return None;
            }
        }
        let _ = m;
        self.exponent_at(b as i64)
    }

    /// All characters mod m, deterministic order (mixed-radix over generator
    /// exponents); `order` on each result is its exact order.
    pub fn all_mod(m: u64) -> Vec<DirichletCharacter> {
        let group = UnitGroup::new(m);
        let n: u64 = euler_phi(m);
        if group.gens.is_empty() {
            return vec![DirichletCharacter::trivial(m)];
        }
        let mut out = Vec::new();
        let mut idx = vec![0u64; group.gens.len()];
        loop {
            // character with chi(g_i) = zeta_{ord(g_i)}^{idx_i}, expressed at order n
            let exps: Vec<u64> = idx
                .iter()
                .zip(&group.orders)
                .map(|(&e, &o)| e * (n / o))
                .collect();
            out.push(
                DirichletCharacter { modulus: m, order: n, exps, group: group.clone() }
                    .reduce_order(),
            );
            let mut i = 0;
            loop {
                if i == idx.len() {
                    return out;
                }
                idx[i] += 1;
                if idx[i] < group.orders[i] {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    /// Generator-exponent tuple used as a deterministic cache key.
    pub fn key(&self) -> String {
        let exps: Vec<String> = self.exps.iter().map(|e| e.to_string()).collect();
        format!("m{}o{}e{}", self.modulus, self.order, exps.join("_"))
    }
}

/// The Teichmuller character mod p, aligned with the canonical prime above p
/// in Q(zeta_{p-1}) so that omega(x) = x mod that prime for all units x.
pub fn omega(p: u64) -> Result<DirichletCharacter> {
    if !is_prime(p) || p == 2 {
        return Err(CoreError::NotPrime(p));
    }
    if p == 3 {
        // order 2: omega = the nontrivial character mod 3
        return DirichletCharacter::new(3, 2, vec![1]);
    }
    let prime = crate::padic::prime::choose_prime_above_p(p - 1, p, 2)?;
    // the canonical factor is linear: x - r with r a primitive (p-1)-st root
    let r = prime.canonical_root_mod_p().expect("linear factor mod p");
    let g0 = UnitGroup::new(p).gens[0];
    // omega(g0) = zeta^e where zeta maps to r, so we need r^e = g0 mod p
    let mut e = 0u64;
    let mut acc = 1u64;
    loop {
        if acc == g0 {
            break;
        }
        acc = (acc as u128 * r as u128 % p as u128) as u64;
        e += 1;
        assert!(e < p, "r generates the units mod p");
    }
    DirichletCharacter::new(p, p - 1, vec![e])
}

/// chi * omega^(-k): the twisted nebentype. Depends on k only mod p-1.
pub fn char_twist(chi: &DirichletCharacter, k: i64, p: u64) -> Result<DirichletCharacter> {
    let om = omega(p)?;
    Ok(chi.mul(&om.pow(-k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_group_orders_multiply_to_phi() {
        for m in [1u64, 2, 3, 4, 5, 8, 12, 15, 16, 24, 30] {
            let g = UnitGroup::new(m);
            let prod: u64 = g.orders.iter().product();
            assert_eq!(prod, euler_phi(m), "m = {m}");
        }
    }

    #[test]
    fn characters_are_multiplicative() {
        for chi in DirichletCharacter::all_mod(15) {
            for a in 1..15i64 {
                for b in 1..15i64 {
                    let lhs = chi.eval(a * b);
                    let rhs = chi.eval(a).mul(&chi.eval(b));
                    assert_eq!(lhs, rhs, "chi({a}*{b})");
                }
            }
            assert_eq!(chi.eval(1), CycElem::one(chi.order));
        }
    }

    #[test]
    fn character_count_is_phi() {
        for m in [3u64, 4, 8, 12, 15, 21] {
            assert_eq!(DirichletCharacter::all_mod(m).len() as u64, euler_phi(m));
        }
    }

    #[test]
    fn conductor_of_trivial_is_one() {
        assert_eq!(DirichletCharacter::trivial(12).conductor(), 1);
    }

    #[test]
    fn quadratic_character_mod_5() {
        // the order-2 character mod 5 is the Legendre symbol
        let chi = DirichletCharacter::all_mod(5)
            .into_iter()
            .find(|c| c.order == 2)
            .unwrap();
        assert_eq!(chi.eval(4), CycElem::one(2));
        assert_eq!(chi.eval(2), CycElem::from_int(2, -1).promote(2).unwrap());
    }

    #[test]
    fn twist_by_multiple_of_p_minus_1_is_identity() {
        let chi = DirichletCharacter::all_mod(4).into_iter().find(|c| c.order == 2).unwrap();
        let t = char_twist(&chi, 4, 5).unwrap();
        // modulus is lifted to lcm(4,5)=20 but values agree on units
        for a in 1..20i64 {
            if num_integer::gcd(a.unsigned_abs(), 20) == 1 {
                assert_eq!(t.eval(a), chi.eval(a).promote(t.order.lcm(&chi.order)).unwrap());
            }
        }
    }

    #[test]
    fn twist_k_then_minus_k_returns_chi() {
        let chi = DirichletCharacter::all_mod(8)[3].clone();
        let once = char_twist(&chi, 3, 5).unwrap();
        let back = char_twist(&once, -3, 5).unwrap();
        for a in 1..40i64 {
            if num_integer::gcd(a.unsigned_abs(), back.modulus) == 1 {
                let n = back.order.lcm(&chi.order);
                assert_eq!(back.eval(a).promote(n).unwrap(), chi.eval(a).promote(n).unwrap());
            }
        }
    }
}
