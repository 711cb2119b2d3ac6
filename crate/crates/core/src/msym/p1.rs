//! The projective line over Z/M with unit-orbit normalization, plus lifts
//! of bottom rows to integral matrices of determinant one.

use std::collections::HashMap;

use num_integer::Integer;

use crate::error::{CoreError, Result};
use crate::weight::GL2;

/// Canonical representatives of P^1(Z/M) together with, for every primitive
/// pair, the unit scaling back to its representative.
#[derive(Debug, Clone)]
pub struct P1Table {
    pub modulus: u64,
    pub reps: Vec<(u64, u64)>,
    /// (c, d) -> (rep index, unit u) with (c, d) = u * rep
    lookup: HashMap<(u64, u64), (usize, u64)>,
    /// fixed integral lift g = (a, b; c, d) in SL2(Z) per representative
    pub lifts: Vec<GL2>,
}

impl P1Table {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus >= 1);
        let m = modulus;
        if m == 1 {
            let mut lookup = HashMap::new();
            lookup.insert((0, 0), (0, 1));
            return P1Table {
                modulus,
                reps: vec![(0, 0)],
                lookup,
                lifts: vec![[1, 0, 0, 1]],
            };
        }
        let units: Vec<u64> = (1..m).filter(|u| u.gcd(&m) == 1).collect();
        let mut reps = Vec::new();
        let mut lookup: HashMap<(u64, u64), (usize, u64)> = HashMap::new();
        for c in 0..m {
            for d in 0..m {
                if c.gcd(&d).gcd(&m) != 1 {
                    continue;
                }
                if lookup.contains_key(&(c, d)) {
                    continue;
                }
                // orbit under unit scaling; canonical = lexicographic least
                let mut orbit: Vec<(u64, u64, u64)> = units
                    .iter()
                    .map(|&u| ((u * c) % m, (u * d) % m, u))
                    .collect();
                orbit.sort_unstable();
                let (rc, rd, _) = orbit[0];
                let idx = reps.len();
                reps.push((rc, rd));
                // record every orbit member with its unit relative to the rep
                // (orbits are free: gcd(gcd(c,M), gcd(d,M)) = 1)
                for &u in &units {
                    let pc = (u * rc) % m;
                    let pd = (u * rd) % m;
                    lookup.entry((pc, pd)).or_insert((idx, u));
                }
            }
        }
        let lifts = reps.iter().map(|&(c, d)| lift_from_bottom_row(c, d, m)).collect();
        P1Table { modulus, reps, lookup, lifts }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Normalize a primitive pair: (index, unit) with (c, d) = unit * rep.
    /// Returns None when the pair is imprimitive mod M (degenerate Heilbronn
    /// terms are dropped by the caller).
    pub fn normalize(&self, c: i64, d: i64) -> Option<(usize, u64)> {
        if self.modulus == 1 {
            return Some((0, 1));
        }
        let m = self.modulus as i64;
        let c = c.rem_euclid(m) as u64;
        let d = d.rem_euclid(m) as u64;
        self.lookup.get(&(c, d)).copied()
    }
}

/// Lift (c, d) mod M, primitive, to an integral matrix (a, b; c', d') of
/// determinant 1 with (c', d') = (c, d) mod M.
pub fn lift_from_bottom_row(c: u64, d: u64, m: u64) -> GL2 {
    if m == 1 {
        return [1, 0, 0, 1];
    }
    let (mut c0, mut d0) = (c as i64, d as i64);
    let mi = m as i64;
    // adjust to a coprime integer pair congruent mod m
    if c0 == 0 && d0 == 0 {
        unreachable!("pair must be primitive mod m > 1");
    }
    if c0 == 0 {
        c0 = mi;
    }
    let mut t = 0i64;
    loop {
        let cand = d0 + t * mi;
        if num_integer::gcd(c0, cand) == 1 {
            d0 = cand;
            break;
        }
        t += 1;
        assert!(t < 4 * mi + 4, "coprime lift search exhausted");
    }
    // x d0 - y c0 = 1
    let (x, y) = bezout(d0, -c0);
    debug_assert_eq!(x * d0 - y * c0, 1);
    [x, y, c0, d0]
}

fn bezout(a: i64, b: i64) -> (i64, i64) {
    // returns (x, y) with x a + y b = 1 for coprime a, b
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0);
    let (mut old_t, mut t) = (0i64, 1);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    assert!(old_r == 1 || old_r == -1);
    (old_s * old_r.signum(), old_t * old_r.signum())
}

/// Lift a matrix given mod M (entries reduced, det = 1 mod M) to SL2(Z).
pub fn lift_sl2(abar: u64, bbar: u64, cbar: u64, dbar: u64, m: u64) -> Result<GL2> {
    if m == 1 {
        return Ok([1, 0, 0, 1]);
    }
    let mi = m as i64;
    let base = lift_from_bottom_row(cbar, dbar, m);
    // adjust top row by j * (c, d) to match (abar, bbar) mod m
    for j in 0..m as i64 {
        let a = base[0] + j * base[2];
        let b = base[1] + j * base[3];
        if a.rem_euclid(mi) == (abar as i64).rem_euclid(mi)
            && b.rem_euclid(mi) == (bbar as i64).rem_euclid(mi)
        {
            return Ok([a, b, base[2], base[3]]);
        }
    }
    Err(CoreError::Precondition(format!(
        "({abar},{bbar};{cbar},{dbar}) is not in SL2(Z/{m})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::det;

    #[test]
    fn p1_sizes_are_psi() {
        // |P^1(Z/m)| = m prod (1 + 1/p)
        let psi = |m: u64| -> usize {
            let mut v = m;
            for (p, _) in crate::padic::factorize(m) {
                v = v / p * (p + 1);
            }
            v as usize
        };
        for m in [1u64, 2, 3, 6, 11, 12, 30] {
            let t = P1Table::new(m);
            let expect = if m == 1 { 1 } else { psi(m) };
            assert_eq!(t.len(), expect, "m = {m}");
        }
    }

    #[test]
    fn normalization_consistency() {
        let t = P1Table::new(12);
        for &(c, d) in &t.reps {
            for u in (1..12u64).filter(|u| num_integer::gcd(*u, 12) == 1) {
                let (idx, unit) = t.normalize((u * c) as i64, (u * d) as i64).unwrap();
                assert_eq!(t.reps[idx], (c, d));
                // unit scales the rep back to the pair
                assert_eq!(((unit * c) % 12, (unit * d) % 12), ((u * c) % 12, (u * d) % 12));
            }
        }
    }

    #[test]
    fn imprimitive_pairs_rejected() {
        let t = P1Table::new(12);
        assert!(t.normalize(2, 6).is_none());
        assert!(t.normalize(0, 3).is_none());
    }

    #[test]
    fn lifts_have_det_one_and_right_bottom_row() {
        let m = 15u64;
        let t = P1Table::new(m);
        for (i, &(c, d)) in t.reps.iter().enumerate() {
            let g = t.lifts[i];
            assert_eq!(det(&g), 1);
            assert_eq!(g[2].rem_euclid(m as i64) as u64, c);
            assert_eq!(g[3].rem_euclid(m as i64) as u64, d);
        }
    }

    #[test]
    fn lift_sl2_matches_all_entries() {
        let m = 10u64;
        // sigma_3-type matrix: (3, x; 0, 7) with det = 21 = 1 mod 10
        let g = lift_sl2(3, 0, 0, 7, m).unwrap();
        assert_eq!(det(&g), 1);
        assert_eq!(g[0].rem_euclid(10), 3);
        assert_eq!(g[1].rem_euclid(10), 0);
        assert_eq!(g[2].rem_euclid(10), 0);
        assert_eq!(g[3].rem_euclid(10), 7);
    }
}
