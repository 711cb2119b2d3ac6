//! Exact arithmetic in Q(zeta_n), represented as residues modulo the n-th
//! cyclotomic polynomial with rational coefficients.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::error::{CoreError, Result};
use crate::padic::{divisors, euler_phi};

/// Coefficients of the n-th cyclotomic polynomial, ascending degree, exact.
///
/// Phi_n(x) = (x^n - 1) / prod_{d | n, d < n} Phi_d(x), by exact polynomial
/// division over Z.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    if n == 1 {
        return vec![BigInt::from(-1), BigInt::one()];
    }
    // x^n - 1
    let mut num = vec![BigInt::zero(); (n + 1) as usize];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_polynomial(d);
        num = poly_div_exact(&num, &phi_d);
    }
    num
}

/// Exact division of integer polynomials (remainder must vanish).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(den[dd].is_one() || den[dd] == BigInt::from(-1));
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for i in (0..=dn - dd).rev() {
        let c = rem[i + dd].clone() / den[dd].clone();
        quot[i] = c.clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=dd {
            rem[i + j] -= &c * &den[j];
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

struct CycCtx {
    n: u64,
    phi: usize,
    /// rows expressing x^(phi + j) mod Phi_n, j = 0..phi-1
    red_rows: Vec<Vec<BigRational>>,
}

impl CycCtx {
    fn new(n: u64) -> Self {
        let phi = euler_phi(n) as usize;
        let modulus: Vec<BigRational> = cyclotomic_polynomial(n)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        // x^phi = -(c_0 + ... + c_{phi-1} x^{phi-1}); higher powers by shifting
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(phi);
        let first: Vec<BigRational> = (0..phi).map(|i| -modulus[i].clone()).collect();
        rows.push(first);
        for j in 1..phi {
            let prev = rows[j - 1].clone();
            let mut next = vec![BigRational::zero(); phi];
            // multiply by x: shift, then reduce the overflow coefficient
            let top = prev[phi - 1].clone();
            for i in (1..phi).rev() {
                next[i] = prev[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..phi {
                    next[i] += &top * &rows[0][i];
                }
            }
            rows.push(next);
        }
        CycCtx { n, phi, red_rows: rows }
    }
}

static CTX_CACHE: Lazy<Mutex<HashMap<u64, Arc<CycCtx>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn ctx(n: u64) -> Arc<CycCtx> {
    let mut cache = CTX_CACHE.lock().unwrap();
    cache.entry(n).or_insert_with(|| Arc::new(CycCtx::new(n))).clone()
}

/// An element of Q(zeta_n): `coeffs[i]` multiplies zeta_n^i, length phi(n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycElem {
    pub order: u64,
    pub coeffs: Vec<BigRational>,
}

impl CycElem {
    pub fn zero(order: u64) -> Self {
        let phi = euler_phi(order) as usize;
        CycElem { order, coeffs: vec![BigRational::zero(); phi] }
    }

    pub fn one(order: u64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = BigRational::one();
        z
    }

    pub fn from_rational(order: u64, r: BigRational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(order: u64, k: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(k)))
    }

    /// zeta_n^j as an element.
    pub fn zeta_pow(order: u64, j: u64) -> Self {
        let c = ctx(order);
        let j = (j % order) as usize;
        let mut raw = vec![BigRational::zero(); order as usize];
        raw[j] = BigRational::one();
        Self::reduce_raw(&c, raw)
    }

    fn reduce_raw(c: &CycCtx, raw: Vec<BigRational>) -> Self {
        let phi = c.phi;
        let mut out = vec![BigRational::zero(); phi];
        for (deg, v) in raw.into_iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if deg < phi {
                out[deg] += v;
            } else {
                let row = &c.red_rows[deg - phi];
                for i in 0..phi {
                    if !row[i].is_zero() {
                        out[i] += &v * &row[i];
                    }
                }
            }
        }
        CycElem { order: c.n, coeffs: out }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_zero())
    }

    /// Is this a rational number (only the constant coefficient set)?
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|v| v.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-express in Q(zeta_m) for n | m, sending zeta_n to zeta_m^(m/n).
    pub fn promote(&self, m: u64) -> Result<CycElem> {
        if m == self.order {
            return Ok(self.clone());
        }
        if m % self.order != 0 {
            return Err(CoreError::OrderMismatch(self.order, m));
        }
        let step = m / self.order;
        let c = ctx(m);
        let mut raw = vec![BigRational::zero(); m as usize];
        for (i, v) in self.coeffs.iter().enumerate() {
            if !v.is_zero() {
                let deg = ((i as u64 * step) % m) as usize;
                raw[deg] += v;
            }
        }
        Ok(Self::reduce_raw(&c, raw))
    }

    fn same_order(a: &CycElem, b: &CycElem) -> (CycElem, CycElem) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let m = num_integer::lcm(a.order, b.order);
        (a.promote(m).expect("lcm promote"), b.promote(m).expect("lcm promote"))
    }

    pub fn add(&self, other: &CycElem) -> CycElem {
        let (mut a, b) = Self::same_order(self, other);
        for i in 0..a.coeffs.len() {
            a.coeffs[i] += &b.coeffs[i];
        }
        a
    }

    pub fn sub(&self, other: &CycElem) -> CycElem {
        let (mut a, b) = Self::same_order(self, other);
        for i in 0..a.coeffs.len() {
            a.coeffs[i] -= &b.coeffs[i];
        }
        a
    }

    pub fn neg(&self) -> CycElem {
        let mut a = self.clone();
        for v in a.coeffs.iter_mut() {
            *v = -v.clone();
        }
        a
    }

    pub fn mul(&self, other: &CycElem) -> CycElem {
        let (a, b) = Self::same_order(self, other);
        let c = ctx(a.order);
        let phi = c.phi;
        let mut raw = vec![BigRational::zero(); 2 * phi];
        for i in 0..phi {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..phi {
                if !b.coeffs[j].is_zero() {
                    raw[i + j] += &a.coeffs[i] * &b.coeffs[j];
                }
            }
        }
        Self::reduce_raw(&c, raw)
    }

    pub fn scale(&self, r: &BigRational) -> CycElem {
        let mut a = self.clone();
        for v in a.coeffs.iter_mut() {
            *v = &*v * r;
        }
        a
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the cyclotomic modulus over Q.
    pub fn inverse(&self) -> Result<CycElem> {
        if self.is_zero() {
            return Err(CoreError::NotAUnit);
        }
        let c = ctx(self.order);
        let phi = c.phi;
        let modulus: Vec<BigRational> = cyclotomic_polynomial(self.order)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        // extended gcd of self (as polynomial) and Phi_n over Q
        let mut r0 = modulus;
        let mut r1: Vec<BigRational> = self.coeffs.clone();
        trim(&mut r1);
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, rem) = poly_divmod_q(&r0, &r1);
            let s2 = poly_sub_q(&s0, &poly_mul_q(&q, &s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 = gcd = nonzero constant (Phi_n is irreducible over Q)
        if r0.len() != 1 {
            return Err(CoreError::NotAUnit);
        }
        let inv_lead = BigRational::one() / r0[0].clone();
        let mut coeffs = vec![BigRational::zero(); phi];
        for (i, v) in s0.iter().enumerate() {
            if i < phi {
                coeffs[i] = v * &inv_lead;
            } else {
                // reduce the rare overflow term
                let row = &c.red_rows[i - phi];
                for j in 0..phi {
                    let w = v * &inv_lead * &row[j];
                    coeffs[j] += w;
                }
            }
        }
        Ok(CycElem { order: self.order, coeffs })
    }

    /// Clear denominators: returns (integer coefficient vector, denominator).
    pub fn to_integral(&self) -> (Vec<BigInt>, BigInt) {
        let mut den = BigInt::one();
        for v in &self.coeffs {
            den = num_integer::lcm(den, v.denom().clone());
        }
        let ints = self
            .coeffs
            .iter()
            .map(|v| v.numer() * (&den / v.denom()))
            .collect();
        (ints, den)
    }

    /// Decimal text form for the cache: `order:num/den,num/den,...`
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|v| format!("{}/{}", v.numer(), v.denom()))
            .collect();
        format!("{}:{}", self.order, parts.join(","))
    }

    pub fn from_text(s: &str) -> Result<CycElem> {
        let (ord_s, rest) = s
            .split_once(':')
            .ok_or_else(|| CoreError::Parse { pos: 0, msg: "missing ':'".into() })?;
        let order: u64 = ord_s
            .parse()
            .map_err(|_| CoreError::Parse { pos: 0, msg: "bad order".into() })?;
        let mut coeffs = Vec::new();
        for (i, part) in rest.split(',').enumerate() {
            let (n, d) = part
                .split_once('/')
                .ok_or_else(|| CoreError::Parse { pos: i, msg: "missing '/'".into() })?;
            let n: BigInt = n
                .parse()
                .map_err(|_| CoreError::Parse { pos: i, msg: "bad numerator".into() })?;
            let d: BigInt = d
                .parse()
                .map_err(|_| CoreError::Parse { pos: i, msg: "bad denominator".into() })?;
            coeffs.push(BigRational::new(n, d));
        }
        if coeffs.len() != euler_phi(order) as usize {
            return Err(CoreError::Parse { pos: 0, msg: "coefficient count != phi(order)".into() });
        }
        Ok(CycElem { order, coeffs })
    }
}

impl std::fmt::Display for CycElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, v) in self.coeffs.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{v}")?;
            } else if v.is_one() {
                write!(f, "z{}^{}", self.order, i)?;
            } else {
                write!(f, "{v}*z{}^{}", self.order, i)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().map(|v| v.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_divmod_q(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let mut den = den.to_vec();
    trim(&mut den);
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    let lead = den[dd].clone();
    for i in (0..quot.len()).rev() {
        if rem.len() < i + dd + 1 {
            continue;
        }
        let c = &rem[i + dd] / &lead;
        if c.is_zero() {
            continue;
        }
        quot[i] = c.clone();
        for j in 0..=dd {
            let t = &c * &den[j];
            rem[i + j] -= t;
        }
    }
    trim(&mut rem);
    (quot, rem)
}

fn poly_mul_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for i in 0..a.len() {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..b.len() {
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

fn poly_sub_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = a.to_vec();
    out.resize(out.len().max(b.len()), BigRational::zero());
    for (i, v) in b.iter().enumerate() {
        out[i] -= v;
    }
    trim(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        // Phi_1 = x - 1, Phi_4 = x^2 + 1, Phi_6 = x^2 - x + 1, Phi_12 = x^4 - x^2 + 1
        let to_i64 = |v: Vec<BigInt>| -> Vec<i64> {
            v.iter().map(|c| i64::try_from(c).unwrap()).collect()
        };
        assert_eq!(to_i64(cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(to_i64(cyclotomic_polynomial(4)), vec![1, 0, 1]);
        assert_eq!(to_i64(cyclotomic_polynomial(6)), vec![1, -1, 1]);
        assert_eq!(to_i64(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta4_squares_to_minus_one() {
        let i = CycElem::zeta_pow(4, 1);
        let m1 = i.mul(&i);
        assert_eq!(m1, CycElem::from_int(4, -1));
    }

    #[test]
    fn zeta_orders_multiply_out() {
        // zeta_6 satisfies z^2 = z - 1
        let z = CycElem::zeta_pow(6, 1);
        let z2 = z.mul(&z);
        assert_eq!(z2, z.sub(&CycElem::one(6)));
    }

    #[test]
    fn inverse_roundtrip() {
        let z = CycElem::zeta_pow(12, 1);
        let a = z.add(&CycElem::from_int(12, 3));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), CycElem::one(12));
    }

    #[test]
    fn promote_is_compatible_with_multiplication() {
        let z3 = CycElem::zeta_pow(3, 1);
        let z3_in_12 = z3.promote(12).unwrap();
        assert_eq!(z3_in_12, CycElem::zeta_pow(12, 4));
        let prod = z3.mul(&CycElem::zeta_pow(4, 1));
        assert_eq!(prod, CycElem::zeta_pow(12, 4).mul(&CycElem::zeta_pow(12, 3)));
        assert_eq!(prod, CycElem::zeta_pow(12, 7));
    }

    #[test]
    fn text_roundtrip() {
        let z = CycElem::zeta_pow(8, 3).scale(&BigRational::new(BigInt::from(-7), BigInt::from(5)));
        let s = z.to_text();
        assert_eq!(CycElem::from_text(&s).unwrap(), z);
    }
}
