//! Conversion between modular symbols and Manin generators: the continued
//! fraction trick. This is the general evaluator that makes arbitrary
//! integral matrices (single cosets, coset sums, double cosets) act on the
//! presentation, not just the Heilbronn families.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::padic::cyclotomic::CycElem;
use crate::weight::{iota, GL2};

use super::ManinSpace;

/// A point of P^1(Q) as a primitive integer column (num, den), den >= 0,
/// with infinity = (1, 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoint {
    pub num: BigInt,
    pub den: BigInt,
}

impl QPoint {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        if den.is_zero() {
            return QPoint { num: BigInt::one(), den: BigInt::zero() };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / &g, den / &g);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        QPoint { num: n, den: d }
    }

    pub fn infinity() -> Self {
        QPoint { num: BigInt::one(), den: BigInt::zero() }
    }

    pub fn is_infinity(&self) -> bool {
        self.den.is_zero()
    }
}

/// Apply an integer matrix to a point (column action).
pub fn apply_point(m: &[BigInt; 4], p: &QPoint) -> QPoint {
    QPoint::new(&m[0] * &p.num + &m[1] * &p.den, &m[2] * &p.num + &m[3] * &p.den)
}

/// Decompose the path {from, to} into determinant-one pieces h with
/// {h 0, h infinity} consecutive convergents; the path through infinity is
/// used: {a, b} = {inf, b} - {inf, a}.
pub fn unimodular_pieces(from: &QPoint, to: &QPoint) -> Vec<(GL2, i32)> {
    let mut out = Vec::new();
    for (pt, sign) in [(to, 1i32), (from, -1i32)] {
        for h in pieces_from_infinity(pt) {
            out.push((h, sign));
        }
    }
    out
}

/// Pieces of {infinity, p/q} as determinant-one matrices.
fn pieces_from_infinity(p: &QPoint) -> Vec<GL2> {
    if p.is_infinity() {
        return vec![];
    }
    // continued fraction expansion of num/den with floor quotients
    let mut a = p.num.clone();
    let mut b = p.den.clone();
    let mut quotients: Vec<BigInt> = Vec::new();
    while !b.is_zero() {
        let q = a.div_floor(&b);
        let r = &a - &q * &b;
        quotients.push(q);
        a = b;
        b = r;
    }
    // convergents, starting from p_(-1)/q_(-1) = 1/0
    let mut pk_prev = BigInt::one();
    let mut qk_prev = BigInt::zero();
    let mut pk = quotients[0].clone();
    let mut qk = BigInt::one();
    let mut out = Vec::new();
    let to_i64 = |v: &BigInt| -> i64 { i64::try_from(v).expect("desk-scale path entries") };
    let mut push_piece = |p1: &BigInt, q1: &BigInt, p2: &BigInt, q2: &BigInt| {
        // h with h*0 = p1/q1, h*inf = p2/q2, det 1
        let det = p2 * q1 - p1 * q2;
        let (c1, c2) = if det.is_one() {
            ((p2.clone(), q2.clone()), (p1.clone(), q1.clone()))
        } else {
            ((-p2.clone(), -q2.clone()), (p1.clone(), q1.clone()))
        };
        out.push([to_i64(&c1.0), to_i64(&c2.0), to_i64(&c1.1), to_i64(&c2.1)]);
    };
    push_piece(&pk_prev, &qk_prev, &pk, &qk);
    for q in &quotients[1..] {
        let pn = q * &pk + &pk_prev;
        let qn = q * &qk + &qk_prev;
        push_piece(&pk, &qk, &pn, &qn);
        pk_prev = pk;
        qk_prev = qk;
        pk = pn;
        qk = qn;
    }
    out
}

impl ManinSpace {
    /// Coordinates of the modular symbol (Q | g^-1){alpha, beta} given by a
    /// degree-(k-2) polynomial Q (ascending Y-degree) and two endpoints.
    pub fn symbol_coords(&self, q_poly: &[BigInt], alpha: &QPoint, beta: &QPoint) -> Vec<CycElem> {
        let mut dense = vec![CycElem::zero(self.order); self.dim];
        for (h, sign) in unimodular_pieces(alpha, beta) {
            // piece symbol Q{h0, h inf} = generator (Q|h, bottom row of h)
            let coeffs = poly_right_action(q_poly, &h);
            let Some((idx, u)) = self.p1.normalize(h[2], h[3]) else {
                continue;
            };
            let chi_u = self
                .chi
                .eval_conj(u as i64)
                .promote(self.order)
                .expect("character order divides space order");
            if chi_u.is_zero() {
                continue;
            }
            for (mm, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let gen = idx * self.monomials + mm;
                let scale = chi_u.scale(&num_rational::BigRational::from_integer(
                    c * BigInt::from(sign),
                ));
                for (b, pc) in self.project_gen(gen) {
                    dense[*b] = dense[*b].add(&scale.mul(pc));
                }
            }
        }
        dense
    }

    /// The action of one integral matrix with positive determinant on a
    /// basis element, evaluated through the underlying modular symbol; valid
    /// for arbitrary matrices.
    pub fn apply_matrix_symbol(&self, x: &GL2, basis_idx: usize) -> Vec<CycElem> {
        let gen = self.basis_gens[basis_idx];
        let (m, i) = (gen % self.monomials, gen / self.monomials);
        let g = self.p1.lifts[i];
        // Q' = P_m | (g^-1 x); endpoints x^-1 g 0 and x^-1 g inf
        let w = crate::weight::mat_mul(&iota(&g), x);
        let mono = monomial_poly(self.k2() as usize, m);
        let qp = poly_right_action(&mono, &w);
        let xi = iota(x);
        let xib: [BigInt; 4] = std::array::from_fn(|t| BigInt::from(xi[t]));
        let alpha = apply_point(&xib, &QPoint::new(BigInt::from(g[1]), BigInt::from(g[3])));
        let beta = apply_point(&xib, &QPoint::new(BigInt::from(g[0]), BigInt::from(g[2])));
        self.symbol_coords(&qp, &alpha, &beta)
    }

    /// Sum of symbol-route actions over a family of matrices.
    pub fn operator_symbol_route(&self, mats: &[GL2]) -> crate::linalg::matrix::Mat<CycElem> {
        use crate::linalg::matrix::Mat;
        let mut out = Mat::zeros(self.dim, self.dim, CycElem::zero(self.order));
        for j in 0..self.dim {
            for x in mats {
                let col = self.apply_matrix_symbol(x, j);
                for (i, v) in col.into_iter().enumerate() {
                    if !v.is_zero() {
                        let cur = out.at(i, j).add(&v);
                        *out.at_mut(i, j) = cur;
                    }
                }
            }
        }
        out
    }
}

/// X^(n-m) Y^m as ascending-Y coefficients of degree n.
pub fn monomial_poly(n: usize, m: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n + 1];
    v[m] = BigInt::one();
    v
}

/// Right polynomial action: Q | g (X, Y) = Q(a X + b Y, c X + d Y),
/// ascending Y-degree coefficients.
pub fn poly_right_action(q_poly: &[BigInt], g: &GL2) -> Vec<BigInt> {
    let n = q_poly.len() - 1;
    let (a, b, c, d) = (g[0], g[1], g[2], g[3]);
    let mut out = vec![BigInt::zero(); n + 1];
    for (m, coeff) in q_poly.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let p1 = binom_pows_big(a, b, n - m);
        let p2 = binom_pows_big(c, d, m);
        for (j1, c1) in p1.iter().enumerate() {
            if c1.is_zero() {
                continue;
            }
            for (j2, c2) in p2.iter().enumerate() {
                if !c2.is_zero() {
                    out[j1 + j2] += coeff * c1 * c2;
                }
            }
        }
    }
    out
}

fn binom_pows_big(u: i64, w: i64, n: usize) -> Vec<BigInt> {
    let ub = BigInt::from(u);
    let wb = BigInt::from(w);
    let mut out = Vec::with_capacity(n + 1);
    let mut binom = BigInt::one();
    let mut upow = vec![BigInt::one()];
    let mut wpow = vec![BigInt::one()];
    for j in 0..n {
        upow.push(&upow[j] * &ub);
        wpow.push(&wpow[j] * &wb);
    }
    for j in 0..=n {
        if j > 0 {
            binom = binom * BigInt::from((n - j + 1) as u64) / BigInt::from(j as u64);
        }
        out.push(&binom * &upow[n - j] * &wpow[j]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pieces_compose_to_the_path() {
        // every piece h must have det 1 and consecutive endpoints
        let p = QPoint::new(BigInt::from(17), BigInt::from(13));
        let pieces = pieces_from_infinity(&p);
        assert!(!pieces.is_empty());
        let mut prev = QPoint::infinity();
        for h in &pieces {
            assert_eq!(crate::weight::det(h), 1);
            let hb: [BigInt; 4] = std::array::from_fn(|t| BigInt::from(h[t]));
            let h0 = apply_point(&hb, &QPoint::new(BigInt::zero(), BigInt::one()));
            let hinf = apply_point(&hb, &QPoint::infinity());
            assert_eq!(h0, prev, "pieces chain");
            prev = hinf;
        }
        assert_eq!(prev, p);
    }

    #[test]
    fn negative_rationals_chain_too() {
        let p = QPoint::new(BigInt::from(-31), BigInt::from(12));
        let pieces = pieces_from_infinity(&p);
        let mut prev = QPoint::infinity();
        for h in &pieces {
            assert_eq!(crate::weight::det(h), 1);
            let hb: [BigInt; 4] = std::array::from_fn(|t| BigInt::from(h[t]));
            assert_eq!(apply_point(&hb, &QPoint::new(BigInt::zero(), BigInt::one())), prev);
            prev = apply_point(&hb, &QPoint::infinity());
        }
        assert_eq!(prev, p);
    }

    #[test]
    fn identity_matrix_acts_trivially_via_symbols() {
        use crate::msym::build_space;
        use crate::padic::dirichlet::DirichletCharacter;
        let s = build_space(11, 2, &DirichletCharacter::trivial(11)).unwrap();
        let id = s.operator_symbol_route(&[[1, 0, 0, 1]]);
        assert_eq!(id, s.identity_matrix());
    }

    #[test]
    fn symbol_route_matches_heilbronn_for_t2() {
        use crate::msym::build_space;
        use crate::padic::dirichlet::DirichletCharacter;
        let s = build_space(11, 2, &DirichletCharacter::trivial(11)).unwrap();
        let t2 = s.hecke_tn(2).unwrap();
        // right-coset representatives (the symbol side acts on the right)
        let reps: Vec<GL2> = vec![[2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 0, 2]];
        let via_symbols = s.operator_symbol_route(&reps);
        assert_eq!(t2, via_symbols);
    }

    #[test]
    fn symbol_route_matches_heilbronn_weight_gt_2() {
        use crate::msym::build_space;
        use crate::padic::dirichlet::DirichletCharacter;
        let s = build_space(3, 6, &DirichletCharacter::trivial(3)).unwrap();
        let t2 = s.hecke_tn(2).unwrap();
        let reps: Vec<GL2> = vec![[2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 0, 2]];
        assert_eq!(t2, s.operator_symbol_route(&reps));
    }
}
