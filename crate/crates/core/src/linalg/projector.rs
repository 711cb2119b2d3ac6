//! Slope projectors: the idempotent h(T) cutting out the slope-alpha
//! generalized eigenspace, built from the Hensel slope factorization of the
//! exact characteristic polynomial.

use std::sync::Arc;

use num_rational::Rational64;

use crate::error::{CoreError, Result};
use crate::linalg::charpoly::{char_poly, CharPolyLedger};
use crate::linalg::matrix::Mat;
use crate::linalg::newton::newton_polygon;
use crate::linalg::tpoly::{self, TPoly};
use crate::padic::cyclotomic::CycElem;
use crate::padic::prime::PadicPrime;
#[cfg(test)]
use crate::padic::prime::choose_prime_above_p;
use crate::padic::tower::{TowerElem, TowerRing};
use crate::padic::valuation::Val;

#[derive(Debug, Clone)]
pub struct SlopeProjector {
    pub alpha: Rational64,
    pub matrix: Mat<TowerElem>,
    pub ring: Arc<TowerRing>,
    /// rank of the projector within working precision
    pub rank: usize,
    /// the idempotence defect valuation actually measured
    pub defect: Val,
}

/// Build the slope-alpha projector of an exact square matrix.
///
/// The characteristic polynomial and its Newton polygon are exact; the
/// Hensel factorization happens over a tower whose ramification is the lcm
/// of the occurring slope denominators. If alpha is not a slope the zero
/// matrix is returned (rank 0). Insufficient precision is an error carrying
/// the precision that would be needed.
pub fn slope_projector(
    t: &Mat<CycElem>,
    alpha: Rational64,
    prime: &PadicPrime,
    prec: u32,
) -> Result<SlopeProjector> {
    if !t.is_square() {
        return Err(CoreError::NotSquare { rows: t.rows, cols: t.cols });
    }
    let ledger = char_poly(t)?;
    slope_projector_from_ledger(t, &ledger, alpha, prime, prec)
}

pub fn slope_projector_from_ledger(
    t: &Mat<CycElem>,
    ledger: &CharPolyLedger,
    alpha: Rational64,
    prime: &PadicPrime,
    prec: u32,
) -> Result<SlopeProjector> {
    let (_, profile) = newton_polygon(&ledger.poly_ascending(), prime)?;
    let mut e: i64 = 1;
    for (s, _) in &profile.slopes {
        e = num_integer::lcm(e, *s.denom());
    }
    let e = e as u32;

    // precision guard: separating slope factors costs about d * max-slope
    // plus twice the valuation spread; refuse rather than emit junk
    let d = ledger.dim;
    let max_s = profile.slopes.last().map(|(s, _)| *s).unwrap_or_default();
    let min_s = profile.slopes.first().map(|(s, _)| *s).unwrap_or_default();
    let spread = max_s - min_s;
    let required = ((Rational64::from_integer(d as i64) * max_s
        + Rational64::from_integer(2) * spread)
        .ceil()
        .to_integer()
        .max(0) as u32)
        + 8;
    if prec < required {
        return Err(CoreError::SlopeSeparation(format!("{alpha}"), required));
    }

    let prime_at = prime.with_precision(prec)?;
    let ring = TowerRing::new(prime_at, e);

    let dim_alpha = profile.dim_at(alpha);
    if dim_alpha == 0 {
        let z = Mat::zeros(t.rows, t.cols, ring.zero());
        return Ok(SlopeProjector {
            alpha,
            matrix: z,
            ring,
            rank: 0,
            defect: Val::Infinite,
        });
    }

    let f = tpoly::tp_from_cyc(&ring, &ledger.poly_ascending())?;
    let (zero_mult, factors) = tpoly::slope_split(&f, &ring)?;
    let falpha = factors
        .iter()
        .find(|sf| sf.slope == alpha)
        .ok_or_else(|| CoreError::SlopeSeparation(format!("{alpha}"), 2 * prec))?
        .factor
        .clone();
    // cofactor: X^zero_mult * product of the other slope factors
    let mut g: TPoly = vec![ring.one()];
    for _ in 0..zero_mult {
        g.insert(0, ring.zero());
    }
    for sf in &factors {
        if sf.slope != alpha {
            g = tpoly::tp_mul(&g, &sf.factor, &ring);
        }
    }

    // w = g^{-1} mod falpha via the multiplication matrix, then h = g w
    let m = tpoly::tp_deg(&falpha);
    let (_, gmod) = tpoly::tp_divmod_monic(&g, &falpha, &ring);
    let mut mul_mat = Mat::zeros(m, m, ring.zero());
    let mut col: TPoly = gmod.clone();
    col.resize(m, ring.zero());
    for j in 0..m {
        for i in 0..m {
            *mul_mat.at_mut(i, j) = col.get(i).cloned().unwrap_or_else(|| ring.zero());
        }
        // multiply by X mod falpha
        col.insert(0, ring.zero());
        let (_, reduced) = tpoly::tp_divmod_monic(&col, &falpha, &ring);
        col = reduced;
        col.resize(m, ring.zero());
    }
    let mut rhs = vec![ring.zero(); m];
    rhs[0] = ring.one();
    let w = solve_tower(&mul_mat, &rhs)?;
    let h = tpoly::tp_mul(&g, &w, &ring);

    let t_tower = t.try_map(ring.zero(), |c| ring.from_cyc(c))?;
    let proj = tpoly::tp_eval_mat(&h, &t_tower, &ring);

    // measured idempotence defect: min valuation of P^2 - P entries
    let p2 = proj.mul(&proj);
    let mut defect = Val::Infinite;
    for i in 0..proj.rows {
        for j in 0..proj.cols {
            defect = defect.min_with(p2.at(i, j).sub(proj.at(i, j)).val());
        }
    }
    if let Val::Finite(v) = defect {
        if v < Rational64::from_integer(2) {
            return Err(CoreError::SlopeSeparation(format!("{alpha}"), 2 * prec));
        }
    }
    let rank = rank_tower(&proj);
    Ok(SlopeProjector { alpha, matrix: proj, ring, rank, defect })
}

/// Gaussian elimination over the tower with least-valuation pivoting.
pub fn solve_tower(a: &Mat<TowerElem>, b: &[TowerElem]) -> Result<Vec<TowerElem>> {
    let n = a.rows;
    assert!(a.is_square() && b.len() == n);
    let zero = a.zero_exemplar().clone();
    let mut m = Mat::zeros(n, n + 1, zero);
    for i in 0..n {
        for j in 0..n {
            *m.at_mut(i, j) = a.at(i, j).clone();
        }
        *m.at_mut(i, n) = b[i].clone();
    }
    for c in 0..n {
        // least-valuation pivot in column c at or below row c
        let mut best: Option<(Rational64, usize)> = None;
        for i in c..n {
            if let Val::Finite(v) = m.at(i, c).val() {
                if best.map(|(bv, _)| v < bv).unwrap_or(true) {
                    best = Some((v, i));
                }
            }
        }
        let Some((_, pi)) = best else {
            return Err(CoreError::AmbiguousPivot {
                prec: a.zero_exemplar().ring.prec(),
            });
        };
        m.swap_rows(c, pi);
        let inv = m.at(c, c).inverse()?;
        for j in c..=n {
            let v = m.at(c, j).mul(&inv);
            *m.at_mut(c, j) = v;
        }
        for i in 0..n {
            if i == c || m.at(i, c).is_zero_within_precision() {
                continue;
            }
            let factor = m.at(i, c).clone();
            for j in c..=n {
                let t = factor.mul(m.at(c, j));
                let v = m.at(i, j).sub(&t);
                *m.at_mut(i, j) = v;
            }
        }
    }
    Ok((0..n).map(|i| m.at(i, n).clone()).collect())
}

/// Rank within working precision (trusted pivots only).
pub fn rank_tower(a: &Mat<TowerElem>) -> usize {
    let mut m = a.clone();
    let mut rank = 0usize;
    let mut row = 0usize;
    for c in 0..m.cols {
        let mut best: Option<(Rational64, usize)> = None;
        for i in row..m.rows {
            if let Val::Finite(v) = m.at(i, c).val() {
                if best.map(|(bv, _)| v < bv).unwrap_or(true) {
                    best = Some((v, i));
                }
            }
        }
        let Some((_, pi)) = best else { continue };
        m.swap_rows(row, pi);
        let inv = m.at(row, c).inverse().expect("finite valuation inverts");
        for i in row + 1..m.rows {
            if m.at(i, c).is_zero_within_precision() {
                continue;
            }
            let factor = m.at(i, c).mul(&inv);
            for j in c..m.cols {
                let t = factor.mul(m.at(row, j));
                let v = m.at(i, j).sub(&t);
                *m.at_mut(i, j) = v;
            }
        }
        rank += 1;
        row += 1;
        if row == m.rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::charpoly::mat_cyclotomic;

    fn prime3() -> PadicPrime {
        choose_prime_above_p(1, 3, 48).unwrap()
    }

    #[test]
    fn ordinary_projector_of_diag_3_1() {
        let t = mat_cyclotomic(1, vec![vec![3, 0], vec![0, 1]]);
        let pr = slope_projector(&t, Rational64::new(0, 1), &prime3(), 48).unwrap();
        assert_eq!(pr.rank, 1);
        // projector is diag(0, 1) within precision
        assert!(pr.matrix.at(0, 0).is_zero_within_precision());
        assert!(pr
            .matrix
            .at(1, 1)
            .sub(&pr.ring.one())
            .val()
            .at_least(Rational64::new(30, 1))
            .unwrap());
        assert!(pr.matrix.at(0, 1).is_zero_within_precision());
        assert!(pr.matrix.at(1, 0).is_zero_within_precision());
    }

    #[test]
    fn absent_slope_gives_zero_projector() {
        let t = mat_cyclotomic(1, vec![vec![3, 0], vec![0, 1]]);
        let pr = slope_projector(&t, Rational64::new(5, 1), &prime3(), 48).unwrap();
        assert_eq!(pr.rank, 0);
        assert!(pr.matrix.is_zero());
    }

    #[test]
    fn projector_commutes_and_is_idempotent() {
        // triangular with prescribed diagonal valuations 0, 1, 1, 2
        let t = mat_cyclotomic(
            1,
            vec![
                vec![2, 1, 0, 5],
                vec![0, 3, 1, 1],
                vec![0, 0, 6, 2],
                vec![0, 0, 0, 9],
            ],
        );
        let prime = prime3();
        for (alpha, want_rank) in [(0i64, 1usize), (1, 2), (2, 1)] {
            let pr = slope_projector(&t, Rational64::new(alpha, 1), &prime, 48).unwrap();
            assert_eq!(pr.rank, want_rank, "slope {alpha}");
            // commutes with T within precision
            let tt = t.try_map(pr.ring.zero(), |c| pr.ring.from_cyc(c)).unwrap();
            let lhs = pr.matrix.mul(&tt);
            let rhs = tt.mul(&pr.matrix);
            for i in 0..4 {
                for j in 0..4 {
                    let d = lhs.at(i, j).sub(rhs.at(i, j));
                    assert!(d.val().at_least(Rational64::new(20, 1)).unwrap());
                }
            }
            match pr.defect {
                Val::Infinite | Val::AtLeast(_) => {}
                Val::Finite(v) => assert!(v >= Rational64::new(20, 1), "defect {v}"),
            }
        }
    }

    #[test]
    fn projector_rank_matches_newton_multiplicity_fractional() {
        // companion of X^2 - 3: both roots slope 1/2
        let t = mat_cyclotomic(1, vec![vec![0, 3], vec![1, 0]]);
        let pr = slope_projector(&t, Rational64::new(1, 2), &prime3(), 48).unwrap();
        assert_eq!(pr.rank, 2);
        assert_eq!(pr.ring.e, 2);
    }

    #[test]
    fn insufficient_precision_is_reported() {
        let t = mat_cyclotomic(
            1,
            vec![
                vec![3, 0, 0],
                vec![0, 2187, 0],
                vec![0, 0, 1],
            ],
        );
        let prime = choose_prime_above_p(1, 3, 8).unwrap();
        match slope_projector(&t, Rational64::new(0, 1), &prime, 8) {
            Err(CoreError::SlopeSeparation(_, needed)) => assert!(needed > 8),
            Ok(_) => panic!("expected precision refusal"),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
