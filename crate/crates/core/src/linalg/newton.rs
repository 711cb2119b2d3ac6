//! Newton polygons of monic polynomials and the slope profiles read off
//! them. Slopes here are root valuations: the lower convex hull of
//! (i, v(coeff of X^i)) has segment slopes equal to minus the root
//! valuations, with horizontal lengths the multiplicities.

use num_rational::{BigRational, Rational64};

use crate::error::{CoreError, Result};
use crate::padic::cyclotomic::CycElem;
use crate::padic::prime::{choose_prime_above_p, PadicPrime};
use crate::padic::tower::vp_cyclotomic;
use crate::padic::valuation::{vp_rational, Val};

/// Vertex list of the lower convex hull: (index, valuation).
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, Rational64)>,
    /// multiplicity of the exact root zero (X^t divides the polynomial)
    pub zero_roots: usize,
    pub degree: usize,
}

/// Multiset of root valuations: ascending (slope, dimension) plus the mass
/// at slope infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeProfile {
    pub slopes: Vec<(Rational64, usize)>,
    pub infinite: usize,
}

impl SlopeProfile {
    pub fn dim_at(&self, alpha: Rational64) -> usize {
        self.slopes.iter().find(|(s, _)| *s == alpha).map(|(_, d)| *d).unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.slopes.iter().map(|(_, d)| *d).sum::<usize>() + self.infinite
    }

    /// Slopes bounded by a cap, ascending.
    pub fn slopes_up_to(&self, cap: Rational64) -> Vec<(Rational64, usize)> {
        self.slopes.iter().copied().filter(|(s, _)| *s <= cap).collect()
    }
}

impl std::fmt::Display for SlopeProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, (s, d)) in self.slopes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}: {d}")?;
        }
        if self.infinite > 0 {
            if !self.slopes.is_empty() {
                write!(f, ", ")?;
            }
            write!(f, "inf: {}", self.infinite)?;
        }
        write!(f, "}}")
    }
}

/// Valuation of an exact cyclotomic coefficient, escalating the working
/// precision of the prime until the answer is trusted.
fn coeff_val(c: &CycElem, prime: &PadicPrime) -> Result<Val> {
    if c.is_zero() {
        return Ok(Val::Infinite);
    }
    if let Some(r) = c.as_rational() {
        return vp_rational(&r, prime.p);
    }
    let mut prec = prime.prec;
    loop {
        let pr = if prec == prime.prec {
            prime.clone()
        } else {
            choose_prime_above_p(prime.n, prime.p, prec)?
        };
        match vp_cyclotomic(c, &pr)? {
            Val::AtLeast(_) => {
                if prec > 1 << 16 {
                    return Err(CoreError::PrecisionExhausted { needed: prec, have: prime.prec });
                }
                prec *= 2;
            }
            v => return Ok(v),
        }
    }
}

/// Build the Newton polygon and slope profile of a monic polynomial with
/// exact cyclotomic coefficients (ascending order, leading coefficient 1).
pub fn newton_polygon(poly: &[CycElem], prime: &PadicPrime) -> Result<(NewtonPolygon, SlopeProfile)> {
    let d = poly.len() - 1;
    // exact zero roots: trailing zero coefficients
    let mut t = 0usize;
    while t <= d && poly[t].is_zero() {
        t += 1;
    }
    if t > d {
        return Err(CoreError::Precondition("zero polynomial has no Newton polygon".into()));
    }
    let mut pts: Vec<(usize, Rational64)> = Vec::new();
    for i in t..=d {
        match coeff_val(&poly[i], prime)? {
            Val::Finite(v) => pts.push((i, v)),
            Val::Infinite => continue,
            Val::AtLeast(_) => unreachable!("coeff_val escalates precision"),
        }
    }
    // lower convex hull, left to right
    let mut hull: Vec<(usize, Rational64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // keep the hull lower-convex: pop if (x2,y2) is above the
            // segment (x1,y1)-(x,y)
            let lhs = (y2 - y1) * Rational64::from_integer((x - x1) as i64);
            let rhs = (y - y1) * Rational64::from_integer((x2 - x1) as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    let mut slopes: Vec<(Rational64, usize)> = Vec::new();
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let len = x2 - x1;
        let slope = -(y2 - y1) / Rational64::from_integer(len as i64);
        slopes.push((slope, len));
    }
    // root valuations ascend right-to-left on the hull
    slopes.reverse();
    Ok((
        NewtonPolygon { vertices: hull, zero_roots: t, degree: d },
        SlopeProfile { slopes, infinite: t },
    ))
}

/// Convenience wrapper for rational coefficient vectors.
pub fn newton_polygon_rational(
    poly: &[BigRational],
    p: u64,
) -> Result<(NewtonPolygon, SlopeProfile)> {
    let prime = choose_prime_above_p(1, p, 2)?;
    let cyc: Vec<CycElem> = poly.iter().map(|c| CycElem::from_rational(1, c.clone())).collect();
    newton_polygon(&cyc, &prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn quadratic_with_slopes_2_and_9() {
        // X^2 - 252 X + 3^11 at p = 3: v(252) = 2, v(3^11) = 11
        let poly = vec![q(177147), q(-252), q(1)];
        let (np, profile) = newton_polygon_rational(&poly, 3).unwrap();
        assert_eq!(np.vertices, vec![
            (0, Rational64::new(11, 1)),
            (1, Rational64::new(2, 1)),
            (2, Rational64::new(0, 1)),
        ]);
        assert_eq!(profile.slopes, vec![
            (Rational64::new(2, 1), 1),
            (Rational64::new(9, 1), 1),
        ]);
        assert_eq!(profile.infinite, 0);
    }

    #[test]
    fn pure_power_is_all_infinite() {
        // X^4
        let poly = vec![q(0), q(0), q(0), q(0), q(1)];
        let (_, profile) = newton_polygon_rational(&poly, 5).unwrap();
        assert!(profile.slopes.is_empty());
        assert_eq!(profile.infinite, 4);
    }

    #[test]
    fn linear_x_minus_p() {
        let poly = vec![q(-3), q(1)];
        let (_, profile) = newton_polygon_rational(&poly, 3).unwrap();
        assert_eq!(profile.slopes, vec![(Rational64::new(1, 1), 1)]);
    }

    #[test]
    fn fractional_slope() {
        // X^2 - p: both roots have valuation 1/2
        let poly = vec![q(-5), q(0), q(1)];
        let (_, profile) = newton_polygon_rational(&poly, 5).unwrap();
        assert_eq!(profile.slopes, vec![(Rational64::new(1, 2), 2)]);
    }

    #[test]
    fn mixed_with_zero_roots_and_total_dim() {
        // X^2 (X - 3)(X - 1) = X^4 - 4X^3 + 3X^2
        let poly = vec![q(0), q(0), q(3), q(-4), q(1)];
        let (_, profile) = newton_polygon_rational(&poly, 3).unwrap();
        assert_eq!(profile.infinite, 2);
        assert_eq!(profile.dim_at(Rational64::zero()), 1);
        assert_eq!(profile.dim_at(Rational64::one()), 1);
        assert_eq!(profile.total_dim(), 4);
    }

    #[test]
    fn cyclotomic_coefficient_valuations() {
        // (X - 5 zeta_4)(X - 1) over Q(zeta_4), p = 5
        let z = CycElem::zeta_pow(4, 1);
        let five_z = z.scale(&q(5));
        let poly = vec![
            five_z.clone(),                         // constant: 5 zeta
            five_z.add(&CycElem::one(4)).neg(),     // -(1 + 5 zeta)
            CycElem::one(4),
        ];
        let prime = choose_prime_above_p(4, 5, 12).unwrap();
        let (_, profile) = newton_polygon(&poly, &prime).unwrap();
        assert_eq!(profile.slopes, vec![
            (Rational64::new(0, 1), 1),
            (Rational64::new(1, 1), 1),
        ]);
    }
}
