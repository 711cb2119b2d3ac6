//! Boundary map and cuspidal subspace. The boundary of a generator lives in
//! the free module on raw cusp vectors; cusp identifications are found by
//! explicit search for group elements mapping one vector to another (with
//! the sign and character multipliers), and classes whose stabilizer acts
//! through a nontrivial multiplier die. The boundary images of the relation
//! rows are added to the identification span as a mechanical safety net.

use std::collections::HashMap;

use num_rational::BigRational;

use crate::linalg::matrix::Mat;
use crate::padic::cyclotomic::CycElem;
use crate::weight::{det, mat_mul, GL2};

use super::{ManinSpace, SparseVec};

#[derive(Debug, Clone)]
pub struct BoundaryData {
    /// dimension of the boundary image (the Eisenstein rank of the space)
    pub boundary_rank: usize,
    /// basis of the cuspidal subspace in space coordinates
    pub cuspidal_basis: Vec<Vec<CycElem>>,
}

/// Complete a primitive integer column to a determinant-one matrix.
fn complete_column(v: (i64, i64)) -> GL2 {
    let (x, y) = v;
    // x d - y b = 1
    let (mut old_r, mut r) = (x, y);
    let (mut old_s, mut s) = (1i64, 0);
    let (mut old_t, mut t) = (0i64, 1);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    let sign = old_r.signum();
    let (d, bneg) = (old_s * sign, old_t * sign);
    // x*d + y*(bneg) = 1; matrix (x, -bneg; y, d) has det x d + bneg y = 1
    [x, -bneg, y, d]
}

impl ManinSpace {
    /// Search for gamma in the level group and lambda = +-1 with
    /// gamma v = lambda w; returns the character-and-sign multiplier.
    fn cusp_identification(&self, v: (i64, i64), w: (i64, i64)) -> Option<CycElem> {
        let m = self.level as i64;
        let gv = complete_column(v);
        let gw = complete_column(w);
        let gvi = crate::weight::iota(&gv);
        for lambda in [1i64, -1] {
            for j in 0..m.max(1) {
                let mid: GL2 = [lambda, j, 0, lambda];
                let gamma = mat_mul(&mat_mul(&gw, &mid), &gvi);
                debug_assert_eq!(det(&gamma), 1);
                if gamma[2].rem_euclid(m.max(1)) == 0 {
                    if (lambda, j) == (1, 0) && gamma == [1, 0, 0, 1] {
                        return Some(CycElem::one(self.order));
                    }
                    let chi_d = self
                        .chi
                        .eval(gamma[3])
                        .promote(self.order)
                        .expect("order divides");
                    if chi_d.is_zero() {
                        continue;
                    }
                    let sgn = if lambda == 1 || self.k2() % 2 == 0 { 1 } else { -1 };
                    return Some(chi_d.scale(&BigRational::from_integer(sgn.into())));
                }
            }
        }
        None
    }

    /// All stabilizer multipliers of a cusp vector (nontrivial ones kill
    /// the class).
    fn cusp_self_multipliers(&self, v: (i64, i64)) -> Vec<CycElem> {
        let m = self.level as i64;
        let gv = complete_column(v);
        let gvi = crate::weight::iota(&gv);
        let mut out = Vec::new();
        for lambda in [1i64, -1] {
            for j in 0..m.max(1) {
                if (lambda, j) == (1, 0) {
                    continue;
                }
                let mid: GL2 = [lambda, j, 0, lambda];
                let gamma = mat_mul(&mat_mul(&gv, &mid), &gvi);
                if gamma[2].rem_euclid(m.max(1)) == 0 {
                    let chi_d = self
                        .chi
                        .eval(gamma[3])
                        .promote(self.order)
                        .expect("order divides");
                    if chi_d.is_zero() {
                        continue;
                    }
                    let sgn = if lambda == 1 || self.k2() % 2 == 0 { 1 } else { -1 };
                    out.push(chi_d.scale(&BigRational::from_integer(sgn.into())));
                }
            }
        }
        out
    }

    /// Raw boundary of a single generator in cusp-vector coordinates. Only
    /// the extreme monomials evaluate to nonzero at the columns of the lift.
    fn boundary_gen(
        &self,
        gen: usize,
        index: &mut HashMap<(i64, i64), usize>,
        vectors: &mut Vec<(i64, i64)>,
    ) -> Vec<(usize, i64)> {
        let (m, i) = (gen % self.monomials, gen / self.monomials);
        let g = self.p1.lifts[i];
        let k2 = self.k2() as usize;
        let mut get = |v: (i64, i64)| -> usize {
            *index.entry(v).or_insert_with(|| {
                vectors.push(v);
                vectors.len() - 1
            })
        };
        let mut out = Vec::new();
        if m == 0 {
            out.push((get((g[0], g[2])), 1i64));
        }
        if m == k2 {
            out.push((get((g[1], g[3])), -1i64));
        }
        out
    }

    fn compute_boundary(&self) -> BoundaryData {
        if self.dim == 0 {
            return BoundaryData { boundary_rank: 0, cuspidal_basis: vec![] };
        }
        let zero = CycElem::zero(self.order);
        let mut index: HashMap<(i64, i64), usize> = HashMap::new();
        let mut vectors: Vec<(i64, i64)> = Vec::new();
        let gens = self.proj.len();
        let mut bnd: Vec<Vec<(usize, i64)>> = Vec::with_capacity(gens);
        for g in 0..gens {
            bnd.push(self.boundary_gen(g, &mut index, &mut vectors));
        }
        let ncusps = vectors.len();

        // identification rows: each vector against its class representative,
        // plus stabilizer kills
        let mut w_rows: Vec<Vec<CycElem>> = Vec::new();
        let mut class_reps: Vec<usize> = Vec::new();
        for vi in 0..ncusps {
            let mut matched = false;
            for &rep in &class_reps {
                if let Some(mult) = self.cusp_identification(vectors[vi], vectors[rep]) {
                    // [vi] = mult [rep]
                    let mut row = vec![zero.clone(); ncusps];
                    row[vi] = CycElem::one(self.order);
                    row[rep] = mult.neg();
                    w_rows.push(row);
                    matched = true;
                    break;
                }
            }
            if !matched {
                class_reps.push(vi);
                for mult in self.cusp_self_multipliers(vectors[vi]) {
                    let defect = CycElem::one(self.order).sub(&mult);
                    if !defect.is_zero() {
                        let mut row = vec![zero.clone(); ncusps];
                        row[vi] = defect;
                        w_rows.push(row);
                    }
                }
            }
        }
        // safety net: boundary images of the relation rows are genuine
        // identifications and must already lie in the span above
        let combine = |row: &SparseVec| -> Vec<CycElem> {
            let mut dense = vec![zero.clone(); ncusps];
            for (gen, coeff) in row {
                for &(cidx, sign) in &bnd[*gen] {
                    let t = coeff.scale(&BigRational::from_integer(sign.into()));
                    dense[cidx] = dense[cidx].add(&t);
                }
            }
            dense
        };
        for row in self.relation_rows() {
            let v = combine(row);
            if v.iter().any(|c| !c.is_zero()) {
                w_rows.push(v);
            }
        }

        let mut w = Mat::from_rows(
            if w_rows.is_empty() { vec![vec![zero.clone(); ncusps]] } else { w_rows },
            zero.clone(),
        );
        let (_, w_pivots) = w.rref().expect("field arithmetic");

        let reduce_mod_w = |mut v: Vec<CycElem>| -> Vec<CycElem> {
            for (r, &pc) in w_pivots.iter().enumerate() {
                if v[pc].is_zero() {
                    continue;
                }
                let factor = v[pc].clone();
                for j in 0..ncusps {
                    let t = factor.mul(w.at(r, j));
                    v[j] = v[j].sub(&t);
                }
            }
            v
        };

        let mut bmat = Mat::zeros(ncusps, self.dim, zero.clone());
        for (j, &gen) in self.basis_gens.iter().enumerate() {
            let col = reduce_mod_w(combine(&vec![(gen, CycElem::one(self.order))]));
            for (i, c) in col.into_iter().enumerate() {
                *bmat.at_mut(i, j) = c;
            }
        }
        let boundary_rank = bmat.rank().expect("field arithmetic");
        let cuspidal_basis = bmat.kernel_basis().expect("field arithmetic");
        BoundaryData { boundary_rank, cuspidal_basis }
    }

    pub fn boundary_data(&self) -> &BoundaryData {
        self.boundary_cell().get_or_init(|| self.compute_boundary())
    }

    /// Dimension of the cuspidal subspace of the full quotient (both star
    /// eigenspaces together).
    pub fn cuspidal_dim(&self) -> usize {
        self.boundary_data().cuspidal_basis.len()
    }

    /// Dimension of the boundary (Eisenstein) part.
    pub fn eisenstein_dim(&self) -> usize {
        self.boundary_data().boundary_rank
    }
}

#[cfg(test)]
mod tests {
    use crate::msym::build_space;
    use crate::padic::dirichlet::DirichletCharacter;

    #[test]
    fn level11_weight2_cuspidal_is_two_dimensional() {
        let chi = DirichletCharacter::trivial(11);
        let s = build_space(11, 2, &chi).unwrap();
        assert_eq!(s.cuspidal_dim(), 2);
        assert_eq!(s.eisenstein_dim(), 1);
        assert_eq!(s.dim, 3);
    }

    #[test]
    fn level1_weight12_cuspidal_dimension() {
        let chi = DirichletCharacter::trivial(1);
        let s = build_space(1, 12, &chi).unwrap();
        assert_eq!(s.cuspidal_dim(), 2);
    }

    #[test]
    fn level3_weight12_cuspidal_dimension() {
        // dim S_12(Gamma_0(3)) = 3, counted twice in the full quotient
        let chi = DirichletCharacter::trivial(3);
        let s = build_space(3, 12, &chi).unwrap();
        assert_eq!(s.cuspidal_dim(), 6);
    }

    #[test]
    fn eichler_shimura_bookkeeping_level6() {
        let chi = DirichletCharacter::trivial(6);
        let s = build_space(6, 4, &chi).unwrap();
        // dim V = 2 dim S_4 + Eisenstein rank
        let ds = crate::msym::dimensions::dim_cusp_forms(&chi, 4).unwrap();
        assert_eq!(s.dim, 2 * ds + s.eisenstein_dim());
    }
}
