//! Independent dimension oracle for spaces of cusp forms with character:
//! the classical closed formula (trace-of-identity shape) with the local
//! lambda factors, evaluated in exact rational arithmetic. This code path
//! shares nothing with the Manin-symbol construction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::padic::cyclotomic::CycElem;
use crate::padic::dirichlet::DirichletCharacter;
use crate::padic::factorize;

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// dim S_k(Gamma_0(N), chi), k >= 2, by the closed formula.
pub fn dim_cusp_forms(chi: &DirichletCharacter, k: u32) -> Result<usize> {
    if k < 2 {
        return Err(CoreError::Precondition("weight must be >= 2".into()));
    }
    let n = chi.modulus;
    let parity = if k % 2 == 0 { 1 } else { -1 };
    if chi.parity() != parity {
        return Ok(0);
    }
    let f = chi.conductor();

    // mu = N prod (1 + 1/p)
    let mut mu = BigRational::from_integer(BigInt::from(n));
    for (p, _) in factorize(n) {
        mu *= frac(p as i64 + 1, p as i64);
    }
    let base = frac(k as i64 - 1, 12) * &mu;

    // product of local lambda(r_p, s_p, p)
    let mut lambda_prod = BigRational::one();
    for (p, r) in factorize(n) {
        let s = factorize(f).iter().find(|(q, _)| *q == p).map(|(_, e)| *e).unwrap_or(0);
        let lam: u64 = if 2 * s <= r {
            if r % 2 == 0 {
                p.pow(r / 2) + p.pow(r / 2 - 1)
            } else {
                2 * p.pow((r - 1) / 2)
            }
        } else {
            2 * p.pow(r - s)
        };
        lambda_prod *= BigRational::from_integer(BigInt::from(lam));
    }

    let gamma_k = match k % 4 {
        2 => frac(-1, 4),
        0 => frac(1, 4),
        _ => BigRational::zero(),
    };
    let mu_k = match k % 3 {
        2 => frac(-1, 3),
        0 => frac(1, 3),
        _ => BigRational::zero(),
    };

    // character sums over the elliptic points
    let chi_sum = |f: &dyn Fn(u64) -> u64| -> BigRational {
        let mut acc = CycElem::zero(chi.order);
        for x in 0..n.max(1) {
            if f(x) % n.max(1) == 0 {
                acc = acc.add(&chi.eval(x as i64));
            }
        }
        acc.as_rational().expect("elliptic character sums are rational")
    };
    let s4 = if n == 1 {
        BigRational::one()
    } else {
        chi_sum(&|x| (x * x + 1) % n)
    };
    let s3 = if n == 1 {
        BigRational::one()
    } else {
        chi_sum(&|x| (x * x + x + 1) % n)
    };

    let mut dim = base - frac(1, 2) * lambda_prod + gamma_k * s4 + mu_k * s3;
    if k == 2 && chi.is_trivial() {
        dim += BigRational::one();
    }
    if dim.denom() != &BigInt::one() {
        return Err(CoreError::Msg(format!(
            "dimension formula returned non-integer {dim} for N={n}, k={k}"
        )));
    }
    let v = dim.numer().clone();
    if v < BigInt::zero() {
        // small weights can drive the formula below zero; the dimension is 0
        return Ok(0);
    }
    Ok(usize::try_from(v).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triv(n: u64) -> DirichletCharacter {
        DirichletCharacter::trivial(n)
    }

    #[test]
    fn classical_dimensions_trivial_character() {
        // (N, k, dim S_k(Gamma_0(N)))
        let table = [
            (1u64, 12u32, 1usize),
            (1, 2, 0),
            (1, 16, 1),
            (1, 24, 2),
            (1, 26, 1),
            (11, 2, 1),
            (14, 2, 1),
            (15, 2, 1),
            (6, 4, 1),
            (3, 12, 3),
            (3, 6, 1),
            (2, 8, 1),
            (11, 4, 2),
            (30, 2, 3),
        ];
        for (n, k, d) in table {
            assert_eq!(dim_cusp_forms(&triv(n), k).unwrap(), d, "N={n}, k={k}");
        }
    }

    #[test]
    fn parity_mismatch_is_zero() {
        assert_eq!(dim_cusp_forms(&triv(5), 3).unwrap(), 0);
    }

    #[test]
    fn known_character_dimensions() {
        // S_3(chi) for the quartic character mod 5 has dimension 1? The full
        // space M_3 has dim 2 with one cusp form (LMFDB 5.3.b? here: the
        // theta-like form); checked value: dim S_3(Gamma_1(5)) = 0 + per
        // character... we pin the quadratic mod 4 instead:
        // dim S_k(Gamma_0(4), chi_4): chi_4 odd quadratic; k=3: dim 0, k=5: 1
        let chi4 = DirichletCharacter::all_mod(4).into_iter().find(|c| c.order == 2).unwrap();
        assert_eq!(dim_cusp_forms(&chi4, 3).unwrap(), 0);
        assert_eq!(dim_cusp_forms(&chi4, 5).unwrap(), 1);
        // odd quadratic mod 3: S_7(chi_3) has dimension 1
        let chi3 = DirichletCharacter::all_mod(3).into_iter().find(|c| c.order == 2).unwrap();
        assert_eq!(dim_cusp_forms(&chi3, 3).unwrap(), 0);
        assert_eq!(dim_cusp_forms(&chi3, 7).unwrap(), 1);
    }
}
