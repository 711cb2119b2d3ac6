//! Exact characteristic polynomials with a consistent power-trace ledger.
//!
//! Coefficients are kept in the sign convention
//!   charpoly(X) = sum_{j=0}^d (-1)^j a_j X^(d-j),  a_0 = 1,
//! so a_j is the j-th elementary symmetric function of the eigenvalues, and
//! the Newton identity  j a_j = sum_{h=1}^j (-1)^(h+1) tau_h a_{j-h}  holds
//! exactly with tau_h the trace of the h-th power.
//!
//! Rational matrices go through a CRT/Hessenberg fast path (exact, word-size
//! primes); genuinely cyclotomic matrices use the power-trace method.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::linalg::matrix::Mat;
use crate::padic::cyclotomic::CycElem;

#[derive(Debug, Clone, PartialEq)]
pub struct CharPolyLedger {
    pub dim: usize,
    /// a_0 = 1, a_1, ..., a_d
    pub coeffs: Vec<CycElem>,
    /// tau_1, ..., tau_d
    pub power_traces: Vec<CycElem>,
    /// common cyclotomic order of all entries
    pub order: u64,
}

impl CharPolyLedger {
    /// Ascending coefficients of charpoly(X): index i multiplies X^i.
    pub fn poly_ascending(&self) -> Vec<CycElem> {
        let d = self.dim;
        let mut out = vec![CycElem::zero(self.order); d + 1];
        for j in 0..=d {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            out[d - j] = self.coeffs[j].scale(&BigRational::from_integer(BigInt::from(sign)));
        }
        out
    }

    /// Recompute the Newton identities from scratch; true iff they hold.
    pub fn check_newton(&self) -> bool {
        for j in 1..=self.dim {
            let mut rhs = CycElem::zero(self.order);
            for h in 1..=j {
                let sign = if h % 2 == 1 { 1i64 } else { -1 };
                let term = self.power_traces[h - 1]
                    .mul(&self.coeffs[j - h])
                    .scale(&BigRational::from_integer(BigInt::from(sign)));
                rhs = rhs.add(&term);
            }
            let lhs = self.coeffs[j].scale(&BigRational::from_integer(BigInt::from(j as i64)));
            if lhs != rhs {
                return false;
            }
        }
        true
    }

    /// Construct from ascending polynomial coefficients (monic), deriving the
    /// power traces through the Newton identities.
    pub fn from_poly_ascending(poly: &[CycElem], order: u64) -> Result<CharPolyLedger> {
        let d = poly.len() - 1;
        if !poly[d].sub(&CycElem::one(order)).is_zero() {
            return Err(CoreError::Precondition("characteristic polynomial must be monic".into()));
        }
        let mut coeffs = vec![CycElem::one(order)];
        for j in 1..=d {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            coeffs.push(poly[d - j].scale(&BigRational::from_integer(BigInt::from(sign))));
        }
        let power_traces = traces_from_elementary(&coeffs, order);
        Ok(CharPolyLedger { dim: d, coeffs, power_traces, order })
    }
}

/// tau_j from a_0..a_d via the inverted Newton identities.
pub(crate) fn traces_from_elementary(a: &[CycElem], _order: u64) -> Vec<CycElem> {
    let d = a.len() - 1;
    let mut tau: Vec<CycElem> = Vec::with_capacity(d);
    for j in 1..=d {
        // tau_j = (-1)^(j+1) (j a_j - sum_{h=1}^{j-1} (-1)^(h+1) tau_h a_{j-h})
        let mut acc = a[j].scale(&BigRational::from_integer(BigInt::from(j as i64)));
        for h in 1..j {
            let sign = if h % 2 == 1 { 1i64 } else { -1 };
            let term = tau[h - 1]
                .mul(&a[j - h])
                .scale(&BigRational::from_integer(BigInt::from(sign)));
            acc = acc.sub(&term);
        }
        let outer = if j % 2 == 1 { 1i64 } else { -1 };
        tau.push(acc.scale(&BigRational::from_integer(BigInt::from(outer))));
    }
    tau
}

/// a_1..a_d from tau_1..tau_d (a_0 = 1 implied), exact in characteristic 0.
pub(crate) fn elementary_from_traces(tau: &[CycElem], order: u64) -> Vec<CycElem> {
    let d = tau.len();
    let mut a = vec![CycElem::one(order)];
    for j in 1..=d {
        let mut acc = CycElem::zero(order);
        for h in 1..=j {
            let sign = if h % 2 == 1 { 1i64 } else { -1 };
            let term = tau[h - 1]
                .mul(&a[j - h])
                .scale(&BigRational::from_integer(BigInt::from(sign)));
            acc = acc.add(&term);
        }
        a.push(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(j as i64))));
    }
    a
}

/// Characteristic polynomial of a square cyclotomic matrix.
pub fn char_poly(m: &Mat<CycElem>) -> Result<CharPolyLedger> {
    if !m.is_square() {
        return Err(CoreError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let order = m.zero_exemplar().order;
    if m.rows == 0 {
        return Ok(CharPolyLedger {
            dim: 0,
            coeffs: vec![CycElem::one(order)],
            power_traces: vec![],
            order,
        });
    }
    // rational entries: exact CRT fast path
    let mut rational_entries = Vec::with_capacity(m.rows * m.cols);
    let mut all_rational = true;
    'outer: for i in 0..m.rows {
        for j in 0..m.cols {
            match m.at(i, j).as_rational() {
                Some(r) => rational_entries.push(r),
                None => {
                    all_rational = false;
                    break 'outer;
                }
            }
        }
    }
    if all_rational {
        let rm = Mat::from_rows(
            rational_entries.chunks(m.cols).map(|c| c.to_vec()).collect(),
            BigRational::zero(),
        );
        let poly = charpoly_rational_crt(&rm);
        let cyc_poly: Vec<CycElem> =
            poly.into_iter().map(|c| CycElem::from_rational(order, c)).collect();
        return CharPolyLedger::from_poly_ascending(&cyc_poly, order);
    }
    // power-trace method for genuinely cyclotomic entries
    let d = m.rows;
    let mut tau = Vec::with_capacity(d);
    let mut power = m.clone();
    for h in 1..=d {
        tau.push(power.trace());
        if h < d {
            power = power.mul(m);
        }
    }
    let coeffs = elementary_from_traces(&tau, order);
    Ok(CharPolyLedger { dim: d, coeffs, power_traces: tau, order })
}

/// Exact characteristic polynomial of a rational matrix (ascending, monic)
/// by clearing denominators and CRT over word-size primes.
pub fn charpoly_rational_crt(m: &Mat<BigRational>) -> Vec<BigRational> {
    assert!(m.is_square());
    let n = m.rows;
    if n == 0 {
        return vec![BigRational::one()];
    }
    // common denominator
    let mut den = BigInt::one();
    for i in 0..n {
        for j in 0..n {
            den = den.lcm(m.at(i, j).denom());
        }
    }
    let b: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = m.at(i, j);
                    v.numer() * (&den / v.denom())
                })
                .collect()
        })
        .collect();
    let ipoly = charpoly_bigint_crt(&b);
    // rescale: det(XI - B/D) coefficient of X^i is c_i / D^(n-i)
    (0..=n)
        .map(|i| BigRational::new(ipoly[i].clone(), den.pow((n - i) as u32)))
        .collect()
}

/// Exact characteristic polynomial (ascending, monic) of an integer matrix.
pub fn charpoly_bigint_crt(b: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = b.len();
    // coefficient bound: |c_j| <= C(n,j) (sqrt(n) * maxabs)^j <= 2^n (ceil(sqrt n) maxabs)^n
    let maxabs = b
        .iter()
        .flat_map(|r| r.iter())
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(BigInt::one)
        .max(BigInt::one());
    let s = BigInt::from((n as f64).sqrt().ceil() as u64 + 1);
    let bound: BigInt = (BigInt::from(2u32).pow(n as u32)) * (s * maxabs).pow(n as u32);
    let need = &bound * BigInt::from(2u32) + BigInt::one();

    let mut primes = Vec::new();
    let mut modulus = BigInt::one();
    let mut candidate: u64 = (1u64 << 62) + 1;
    while modulus < need {
        while !is_prime_u64(candidate) {
            candidate += 2;
        }
        primes.push(candidate);
        modulus *= BigInt::from(candidate);
        candidate += 2;
    }

    // per-prime Hessenberg characteristic polynomials
    let mut residues: Vec<Vec<u64>> = Vec::with_capacity(primes.len());
    for &p in &primes {
        let pm = BigInt::from(p);
        let reduced: Vec<Vec<u64>> = b
            .iter()
            .map(|row| row.iter().map(|v| u64::try_from(v.mod_floor(&pm)).unwrap()).collect())
            .collect();
        residues.push(charpoly_hessenberg_mod_p(reduced, p));
    }

    // CRT combine, symmetric lift
    let half = &modulus / BigInt::from(2u32);
    (0..=n)
        .map(|i| {
            let mut x = BigInt::zero();
            let mut m_acc = BigInt::one();
            for (k, &p) in primes.iter().enumerate() {
                let pk = BigInt::from(p);
                let r = BigInt::from(residues[k][i]);
                // x := x + m_acc * t, t = (r - x)/m_acc mod p
                let cur = x.mod_floor(&pk);
                let diff = (r - cur).mod_floor(&pk);
                let minv = mod_inv_u64(
                    u64::try_from(m_acc.mod_floor(&pk)).unwrap(),
                    p,
                );
                let t = (u64::try_from(diff).unwrap() as u128 * minv as u128 % p as u128) as u64;
                x += &m_acc * BigInt::from(t);
                m_acc *= pk;
            }
            if x > half {
                x -= &modulus;
            }
            x
        })
        .collect()
}

fn mod_inv_u64(a: u64, p: u64) -> u64 {
    crate::padic::dirichlet::inv_mod(a % p, p)
}

/// Deterministic Miller-Rabin for u64.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
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

/// Characteristic polynomial mod p via Hessenberg reduction (ascending,
/// monic). Classical O(n^3) method.
fn charpoly_hessenberg_mod_p(mut h: Vec<Vec<u64>>, p: u64) -> Vec<u64> {
    let n = h.len();
    let sub = |a: u64, b: u64| (a + p - b % p) % p;
    let mul = |a: u64, b: u64| (a as u128 * b as u128 % p as u128) as u64;

    // similarity reduction to upper Hessenberg form
    for m in 0..n.saturating_sub(2) {
        // pivot search in column m, rows m+1..
        let mut piv = None;
        for i in m + 1..n {
            if h[i][m] != 0 {
                piv = Some(i);
                break;
            }
        }
        let Some(piv) = piv else { continue };
        if piv != m + 1 {
            h.swap(piv, m + 1);
            for row in h.iter_mut() {
                row.swap(piv, m + 1);
            }
        }
        let inv = mod_inv_u64(h[m + 1][m], p);
        for i in m + 2..n {
            if h[i][m] == 0 {
                continue;
            }
            let factor = mul(h[i][m], inv);
            for j in 0..n {
                let t = mul(factor, h[m + 1][j]);
                h[i][j] = sub(h[i][j], t);
            }
            // column operation restoring similarity
            for r in 0..n {
                let t = mul(factor, h[r][i]);
                h[r][m + 1] = (h[r][m + 1] + t) % p;
            }
        }
    }

    // p_m(x) = (x - H[m][m]) p_{m-1}(x) - sum_i H[i][m] (prod subdiag) p_{i-1}(x)
    let mut polys: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
    polys.push(vec![1]);
    for m in 0..n {
        let prev = polys[m].clone();
        // (x - h[m][m]) * prev
        let mut cur = vec![0u64; prev.len() + 1];
        for (i, &c) in prev.iter().enumerate() {
            cur[i + 1] = (cur[i + 1] + c) % p;
            cur[i] = sub(cur[i], mul(h[m][m], c));
        }
        let mut prod = 1u64;
        for i in (0..m).rev() {
            prod = mul(prod, h[i + 1][i]);
            if prod == 0 {
                break;
            }
            let coeff = mul(h[i][m], prod);
            if coeff == 0 {
                continue;
            }
            for (k, &c) in polys[i].iter().enumerate() {
                cur[k] = sub(cur[k], mul(coeff, c));
            }
        }
        polys.push(cur);
    }
    polys.pop().unwrap()
}

/// Independent oracle: det(XI - M) for a k x k rational matrix by Leibniz
/// expansion over the polynomial ring. Exponential; test-scale only.
pub fn charpoly_leibniz_oracle(m: &Mat<BigRational>) -> Vec<BigRational> {
    let n = m.rows;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut acc = vec![BigRational::zero(); n + 1];
    permute(&mut idx, 0, &mut |perm, sign| {
        // product over i of (X*delta - m[i][perm(i)])
        let mut poly = vec![BigRational::from_integer(BigInt::from(sign as i64))];
        for i in 0..n {
            let c = m.at(i, perm[i]).clone();
            let mut next = vec![BigRational::zero(); poly.len() + 1];
            for (k, v) in poly.iter().enumerate() {
                if perm[i] == i {
                    next[k + 1] += v;
                }
                next[k] -= v * &c;
            }
            poly = next;
        }
        for (k, v) in poly.into_iter().enumerate() {
            acc[k] += v;
        }
    });
    acc
}

fn permute(idx: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize], i32)) {
    let n = idx.len();
    if k == n {
        // parity of the permutation
        let mut seen = vec![false; n];
        let mut sign = 1i32;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut c = s;
            while !seen[c] {
                seen[c] = true;
                c = idx[c];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        f(idx, sign);
        return;
    }
    for i in k..n {
        idx.swap(k, i);
        permute(idx, k + 1, f);
        idx.swap(k, i);
    }
}

/// Trait bridge so tests can feed i64 matrices conveniently.
pub fn mat_rational(rows: Vec<Vec<i64>>) -> Mat<BigRational> {
    Mat::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(|v| BigRational::from_integer(BigInt::from(v))).collect())
            .collect(),
        BigRational::zero(),
    )
}

pub fn mat_cyclotomic(order: u64, rows: Vec<Vec<i64>>) -> Mat<CycElem> {
    Mat::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(|v| CycElem::from_int(order, v)).collect())
            .collect(),
        CycElem::zero(order),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn identity_2x2() {
        let m = mat_cyclotomic(1, vec![vec![1, 0], vec![0, 1]]);
        let cp = char_poly(&m).unwrap();
        // (X-1)^2 = X^2 - 2X + 1
        let asc: Vec<BigRational> =
            cp.poly_ascending().iter().map(|c| c.as_rational().unwrap()).collect();
        assert_eq!(asc, vec![q(1), q(-2), q(1)]);
        assert!(cp.check_newton());
    }

    #[test]
    fn companion_of_x2_minus_5x_plus_6() {
        let m = mat_cyclotomic(1, vec![vec![0, -6], vec![1, 5]]);
        let cp = char_poly(&m).unwrap();
        let asc: Vec<BigRational> =
            cp.poly_ascending().iter().map(|c| c.as_rational().unwrap()).collect();
        assert_eq!(asc, vec![q(6), q(-5), q(1)]);
        // eigenvalues 2, 3: tau = (5, 13)
        assert_eq!(cp.power_traces[0].as_rational().unwrap(), q(5));
        assert_eq!(cp.power_traces[1].as_rational().unwrap(), q(13));
        assert!(cp.check_newton());
    }

    #[test]
    fn random_3x3_matches_leibniz_oracle() {
        let m = mat_rational(vec![vec![3, -1, 4], vec![1, 5, -9], vec![2, 6, -5]]);
        let fast = charpoly_rational_crt(&m);
        let slow = charpoly_leibniz_oracle(&m);
        assert_eq!(fast, slow);
    }

    #[test]
    fn crt_handles_larger_entries() {
        let m = mat_rational(vec![
            vec![177147, -1, 0],
            vec![12, -531441, 7],
            vec![0, 99, 243],
        ]);
        assert_eq!(charpoly_rational_crt(&m), charpoly_leibniz_oracle(&m));
    }

    #[test]
    fn cyclotomic_powertrace_path() {
        let z = CycElem::zeta_pow(4, 1);
        let m = Mat::from_rows(
            vec![
                vec![z.clone(), CycElem::zero(4)],
                vec![CycElem::one(4), z.neg()],
            ],
            CycElem::zero(4),
        );
        let cp = char_poly(&m).unwrap();
        // eigenvalues i, -i: charpoly = X^2 + 1
        let asc = cp.poly_ascending();
        assert_eq!(asc[0], CycElem::one(4));
        assert!(asc[1].is_zero());
        assert_eq!(asc[2], CycElem::one(4));
        assert!(cp.check_newton());
    }

    #[test]
    fn newton_identities_hold_on_random_rational_matrix() {
        let m = mat_cyclotomic(
            1,
            vec![
                vec![2, 7, 1, -3],
                vec![0, -1, 4, 4],
                vec![5, 5, -2, 1],
                vec![-6, 0, 3, 9],
            ],
        );
        let cp = char_poly(&m).unwrap();
        assert!(cp.check_newton());
        // round trip traces -> elementary -> traces
        let a = elementary_from_traces(&cp.power_traces, 1);
        assert_eq!(a, cp.coeffs);
        let t = traces_from_elementary(&cp.coeffs, 1);
        assert_eq!(t, cp.power_traces);
    }
}
