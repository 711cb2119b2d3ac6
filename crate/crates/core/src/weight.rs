//! The weight-k module of homogeneous two-variable polynomials with its
//! twisted GL_2 action, the high-Y-degree submodule stable mod p^r, the
//! mod-p^r comparison between nearby weights, Weyl traces by integer
//! recurrence, and the nilpotence of the p-coset operator on torsion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::padic::valuation::{vp_bigint, Val};

/// 2x2 integer matrix, row-major (a, b, c, d).
pub type GL2 = [i64; 4];

pub fn det(g: &GL2) -> i64 {
    g[0] * g[3] - g[1] * g[2]
}

pub fn tr(g: &GL2) -> i64 {
    g[0] + g[3]
}

/// The involution g -> det(g) g^{-1} = (d, -b; -c, a), integral for all g.
pub fn iota(g: &GL2) -> GL2 {
    [g[3], -g[1], -g[2], g[0]]
}

pub fn mat_mul(a: &GL2, b: &GL2) -> GL2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Homogeneous polynomial of degree `weight`: coeffs[i] multiplies
/// X^(weight-i) Y^i. Exact integers; reduce mod p^r where a statement is a
/// congruence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightPoly {
    pub weight: u32,
    pub coeffs: Vec<BigInt>,
}

impl WeightPoly {
    pub fn zero(weight: u32) -> Self {
        WeightPoly { weight, coeffs: vec![BigInt::zero(); weight as usize + 1] }
    }

    /// The basis monomial X^(weight-i) Y^i.
    pub fn monomial(weight: u32, i: u32) -> Self {
        assert!(i <= weight);
        let mut p = Self::zero(weight);
        p.coeffs[i as usize] = BigInt::one();
        p
    }

    pub fn reduce_mod(&self, m: &BigInt) -> WeightPoly {
        WeightPoly {
            weight: self.weight,
            coeffs: self.coeffs.iter().map(|c| c.mod_floor(m)).collect(),
        }
    }
}

fn binomial_row(n: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for j in 0..n {
        let next = &row[j as usize] * BigInt::from(n - j) / BigInt::from(j + 1);
        row.push(next);
    }
    row
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// The module action: gamma P(X, Y) = P(d X - b Y, -c X + a Y), a left
/// action of GL_2 through the involution.
pub fn act(g: &GL2, v: &WeightPoly) -> WeightPoly {
    let k = v.weight as usize;
    let (a, b, c, d) = (g[0], g[1], g[2], g[3]);
    let mut out = WeightPoly::zero(v.weight);
    for i in 0..=k {
        if v.coeffs[i].is_zero() {
            continue;
        }
        let p1 = binom_expand(d, -b, (k - i) as u32);
        let p2 = binom_expand(-c, a, i as u32);
        for (j1, c1) in p1.iter().enumerate() {
            if c1.is_zero() {
                continue;
            }
            for (j2, c2) in p2.iter().enumerate() {
                if c2.is_zero() {
                    continue;
                }
                out.coeffs[j1 + j2] += &v.coeffs[i] * c1 * c2;
            }
        }
    }
    out
}

/// Coefficients of (u X + w Y)^n in the (X^(n-j) Y^j) basis.
fn binom_expand(u: i64, w: i64, n: u32) -> Vec<BigInt> {
    let row = binomial_row(n);
    let ub = BigInt::from(u);
    let wb = BigInt::from(w);
    let mut upow = vec![BigInt::one()];
    let mut wpow = vec![BigInt::one()];
    for j in 0..n as usize {
        upow.push(&upow[j] * &ub);
        wpow.push(&wpow[j] * &wb);
    }
    (0..=n as usize).map(|j| &row[j] * &upow[n as usize - j] * &wpow[j]).collect()
}

/// Matrix of act(g, .) on the monomial basis X^(k-i) Y^i, column i = image
/// of the i-th monomial.
pub fn action_matrix(g: &GL2, k: u32) -> Vec<Vec<BigInt>> {
    let n = k as usize + 1;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        let img = act(g, &WeightPoly::monomial(k, i as u32));
        for (r, c) in img.coeffs.into_iter().enumerate() {
            m[r][i] = c;
        }
    }
    m
}

/// Trace of act(xi^iota, .) on the weight-k module, by the complete
/// homogeneous recurrence h_m = c1 h_{m-1} - c2 h_{m-2} with c1 = tr(xi),
/// c2 = det(xi); no field extension is ever materialized.
pub fn weyl_trace(xi: &GL2, k: u32) -> BigInt {
    let c1 = BigInt::from(tr(xi));
    let c2 = BigInt::from(det(xi));
    let mut h_prev = BigInt::one(); // h_0
    if k == 0 {
        return h_prev;
    }
    let mut h = c1.clone(); // h_1
    for _ in 2..=k {
        let next = &c1 * &h - &c2 * &h_prev;
        h_prev = h;
        h = next;
    }
    h
}

/// Trace of the action matrix of act(xi^iota, .): the independent oracle for
/// `weyl_trace`.
pub fn action_matrix_trace(xi: &GL2, k: u32) -> BigInt {
    let m = action_matrix(&iota(xi), k);
    let mut t = BigInt::zero();
    for (i, row) in m.iter().enumerate() {
        t += &row[i];
    }
    t
}

/// Is gamma in Gamma_1(n): c = 0 and a = d = 1 mod n, determinant 1?
pub fn in_gamma1(g: &GL2, n: u64) -> bool {
    let n = n as i64;
    det(g) == 1 && g[2].rem_euclid(n) == 0 && g[0].rem_euclid(n) == 1 && g[3].rem_euclid(n) == 1
}

/// Check that gamma in Gamma_1(p^r) maps the high-Y-degree submodule
/// U = <X^(k-r-1) Y^(r+1), ..., Y^k> into itself modulo p^r.
pub fn u_stability_check(g: &GL2, k: u32, r: u32, p: u64) -> Result<bool> {
    let pr = p.pow(r);
    if !in_gamma1(g, pr) {
        return Err(CoreError::Precondition(format!("matrix not in Gamma_1({pr})")));
    }
    if k <= r {
        return Err(CoreError::Precondition("need k > r".into()));
    }
    let modulus = BigInt::from(p).pow(r);
    for i in r + 1..=k {
        let img = act(g, &WeightPoly::monomial(k, i)).reduce_mod(&modulus);
        // coefficients with Y-exponent <= r must vanish mod p^r
        for j in 0..=r as usize {
            if !img.coeffs[j].is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The weight-comparison map on the (r+1)-dimensional quotient L_k / U mod
/// p^r: monomial X^(k-i) Y^i maps to X^(k'-i) Y^i for i = 0..r.
#[derive(Debug, Clone)]
pub struct ReduceWeightMap {
    pub k: u32,
    pub k_prime: u32,
    pub r: u32,
    pub p: u64,
}

pub fn reduce_weight_map(k: u32, k_prime: u32, r: u32, p: u64) -> Result<ReduceWeightMap> {
    if k < r || k_prime < r {
        return Err(CoreError::Precondition("need k, k' >= r".into()));
    }
    let p2r = BigInt::from(p).pow(2 * r);
    let diff = BigInt::from(k_prime as i64 - k as i64);
    if !diff.mod_floor(&p2r).is_zero() {
        return Err(CoreError::Precondition(format!(
            "need k = k' mod p^(2r) = {p2r}, got k = {k}, k' = {k_prime}"
        )));
    }
    Ok(ReduceWeightMap { k, k_prime, r, p })
}

impl ReduceWeightMap {
    /// Image of v in the weight-k quotient: its first r+1 coefficients
    /// mod p^r.
    pub fn project(&self, v: &WeightPoly) -> Vec<BigInt> {
        let m = BigInt::from(self.p).pow(self.r);
        (0..=self.r as usize).map(|j| v.coeffs[j].mod_floor(&m)).collect()
    }

    /// The comparison map is the identity on quotient coordinates.
    pub fn apply(&self, coords: &[BigInt]) -> Vec<BigInt> {
        coords.to_vec()
    }

    /// Equivariance of the comparison map at gamma: both routes through the
    /// quotients agree.
    pub fn check_equivariance(&self, g: &GL2) -> Result<bool> {
        let pr = self.p.pow(self.r);
        if !in_gamma1(g, pr) {
            return Err(CoreError::Precondition(format!("matrix not in Gamma_1({pr})")));
        }
        for i in 0..=self.r {
            let v = WeightPoly::monomial(self.k, i);
            let lhs = self.apply(&self.project(&act(g, &v)));
            let v_high = WeightPoly::monomial(self.k_prime, i);
            let rhs = self.project(&act(g, &v_high));
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Measured valuation of C(k'-i, j) - C(k-i, j) and the verdict against the
/// claimed floor r.
pub fn binom_congruence(
    k: u64,
    k_prime: u64,
    i: u64,
    j: u64,
    p: u64,
    r: u32,
) -> Result<(Val, bool)> {
    if i + j > r as u64 {
        return Err(CoreError::Precondition(format!("need j <= r - i, got i={i}, j={j}, r={r}")));
    }
    let p2r = BigInt::from(p).pow(2 * r);
    if !(BigInt::from(k_prime) - BigInt::from(k)).mod_floor(&p2r).is_zero() {
        return Err(CoreError::Precondition("need k = k' mod p^(2r)".into()));
    }
    let diff = binomial(k_prime - i, j) - binomial(k - i, j);
    let val = match vp_bigint(&diff, p) {
        None => Val::Infinite,
        Some(v) => Val::finite(v as i64, 1),
    };
    let ok = match val {
        Val::Infinite => true,
        Val::Finite(v) => v >= num_rational::Rational64::new(r as i64, 1),
        Val::AtLeast(_) => unreachable!("exact arithmetic"),
    };
    Ok((val, ok))
}

/// Least N with T^N = 0 on L_k tensor Z/p^a, where T is the sum of the
/// p-coset substitutions X -> X + uY, Y -> pY, u = 0..p-1.
pub fn tp_nilpotence_demo(k: u32, a: u32, p: u64) -> u32 {
    assert!(a >= 1);
    let n = k as usize + 1;
    let modulus = BigInt::from(p).pow(a);
    let mut t = vec![vec![BigInt::zero(); n]; n];
    for u in 0..p as i64 {
        // act(gamma, .) substitutes X -> X + uY, Y -> pY for gamma = (p, u; 0, 1)
        let m = action_matrix(&[p as i64, u, 0, 1], k);
        for i in 0..n {
            for j in 0..n {
                t[i][j] = (&t[i][j] + &m[i][j]).mod_floor(&modulus);
            }
        }
    }
    let mut power = t.clone();
    let mut idx = 1u32;
    loop {
        if power.iter().all(|row| row.iter().all(|c| c.is_zero())) {
            break;
        }
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if power[i][l].is_zero() {
                    continue;
                }
                for j in 0..n {
                    next[i][j] = (&next[i][j] + &power[i][l] * &t[l][j]).mod_floor(&modulus);
                }
            }
        }
        power = next;
        idx += 1;
        assert!(idx <= a * (k + 1) + 1, "nilpotence bound exceeded");
    }
    idx
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    /// Random word in the standard generators of Gamma_1(n).
    pub fn random_gamma1(rng: &mut ChaCha8Rng, n: i64, len: usize) -> GL2 {
        let t: GL2 = [1, 1, 0, 1];
        let ti: GL2 = [1, -1, 0, 1];
        let l: GL2 = [1, 0, n, 1];
        let li: GL2 = [1, 0, -n, 1];
        let mut g: GL2 = [1, 0, 0, 1];
        for _ in 0..len {
            let pick = match rng.gen_range(0..4) {
                0 => t,
                1 => ti,
                2 => l,
                _ => li,
            };
            g = mat_mul(&g, &pick);
        }
        g
    }
}
