//! Dense matrices over exact scalars (rationals, cyclotomics) and over the
//! capped-precision tower. Contexts travel with a zero exemplar so scalar
//! types that need one (cyclotomic order, tower ring) stay self-contained.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::padic::cyclotomic::CycElem;
use crate::padic::tower::TowerElem;

pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_s(&self, o: &Self) -> Self;
    fn sub_s(&self, o: &Self) -> Self;
    fn mul_s(&self, o: &Self) -> Self;
    fn neg_s(&self) -> Self;
    fn is_zero_s(&self) -> bool;
    fn from_i64_like(&self, v: i64) -> Self;
}

pub trait FieldScalar: Scalar {
    fn inv_s(&self) -> Result<Self>;
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn add_s(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_s(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_s(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_s(&self) -> Self {
        -self
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn from_i64_like(&self, v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl FieldScalar for BigRational {
    fn inv_s(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(CoreError::NotAUnit);
        }
        Ok(BigRational::one() / self)
    }
}

impl Scalar for CycElem {
    fn zero_like(&self) -> Self {
        CycElem::zero(self.order)
    }
    fn one_like(&self) -> Self {
        CycElem::one(self.order)
    }
    fn add_s(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_s(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_s(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_s(&self) -> Self {
        self.neg()
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn from_i64_like(&self, v: i64) -> Self {
        CycElem::from_int(self.order, v)
    }
}

impl FieldScalar for CycElem {
    fn inv_s(&self) -> Result<Self> {
        self.inverse()
    }
}

impl Scalar for TowerElem {
    fn zero_like(&self) -> Self {
        self.ring.zero()
    }
    fn one_like(&self) -> Self {
        self.ring.one()
    }
    fn add_s(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_s(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_s(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_s(&self) -> Self {
        self.neg()
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero_within_precision()
    }
    fn from_i64_like(&self, v: i64) -> Self {
        self.ring.from_i64(v)
    }
}

impl FieldScalar for TowerElem {
    fn inv_s(&self) -> Result<Self> {
        self.inverse()
    }
}

impl Scalar for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn add_s(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_s(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_s(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_s(&self) -> Self {
        -self
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn from_i64_like(&self, v: i64) -> Self {
        BigInt::from(v)
    }
}

/// Dense row-major matrix; `zero` is the context exemplar for the scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T: Scalar> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<T>,
    zero: T,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize, zero: T) -> Self {
        Mat { rows, cols, data: vec![zero.clone(); rows * cols], zero }
    }

    pub fn identity(n: usize, zero: T) -> Self {
        let mut m = Self::zeros(n, n, zero);
        for i in 0..n {
            *m.at_mut(i, i) = m.zero.one_like();
        }
        m
    }

    pub fn from_rows(rows_data: Vec<Vec<T>>, zero: T) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows * cols);
        for r in rows_data {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Mat { rows, cols, data, zero }
    }

    pub fn from_fn(rows: usize, cols: usize, zero: T, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols, zero);
        for i in 0..rows {
            for j in 0..cols {
                *m.at_mut(i, j) = f(i, j);
            }
        }
        m
    }

    pub fn zero_exemplar(&self) -> &T {
        &self.zero
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.zero.clone(), |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, self.zero.clone(), |i, j| {
            self.at(i, j).add_s(o.at(i, j))
        })
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, self.zero.clone(), |i, j| {
            self.at(i, j).sub_s(o.at(i, j))
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_fn(self.rows, self.cols, self.zero.clone(), |i, j| self.at(i, j).mul_s(c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "inner dimensions");
        let mut out = Self::zeros(self.rows, o.cols, self.zero.clone());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero_s() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.at(k, j);
                    if !b.is_zero_s() {
                        let t = a.mul_s(b);
                        let cur = out.at(i, j).add_s(&t);
                        *out.at_mut(i, j) = cur;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, mut k: u64) -> Self {
        assert!(self.is_square());
        let mut r = Self::identity(self.rows, self.zero.clone());
        let mut b = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        r
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut t = self.zero.clone();
        for i in 0..self.rows {
            t = t.add_s(self.at(i, i));
        }
        t
    }

    pub fn map<U: Scalar>(&self, zero: U, mut f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat::from_fn(self.rows, self.cols, zero, |i, j| f(self.at(i, j)))
    }

    pub fn try_map<U: Scalar>(
        &self,
        zero: U,
        mut f: impl FnMut(&T) -> Result<U>,
    ) -> Result<Mat<U>> {
        let mut out = Mat::zeros(self.rows, self.cols, zero);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(i, j) = f(self.at(i, j))?;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero_s())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: FieldScalar> Mat<T> {
    /// Row-reduce in place; returns the rank and pivot columns.
    pub fn rref(&mut self) -> Result<(usize, Vec<usize>)> {
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..self.cols {
            // first nonzero entry in column c at or below row r
            let mut pr = None;
            for i in r..self.rows {
                if !self.at(i, c).is_zero_s() {
                    pr = Some(i);
                    break;
                }
            }
            let Some(pr) = pr else { continue };
            self.swap_rows(r, pr);
            let inv = self.at(r, c).inv_s()?;
            for j in 0..self.cols {
                let v = self.at(r, j).mul_s(&inv);
                *self.at_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i == r || self.at(i, c).is_zero_s() {
                    continue;
                }
                let factor = self.at(i, c).clone();
                for j in 0..self.cols {
                    let t = factor.mul_s(self.at(r, j));
                    let v = self.at(i, j).sub_s(&t);
                    *self.at_mut(i, j) = v;
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        Ok((r, pivots))
    }

    pub fn rank(&self) -> Result<usize> {
        let mut m = self.clone();
        Ok(m.rref()?.0)
    }

    /// Basis of the right kernel.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<T>>> {
        let mut m = self.clone();
        let (_, pivots) = m.rref()?;
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![self.zero.clone(); self.cols];
            v[free] = self.zero.one_like();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = m.at(r, free).neg_s();
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Solve self * x = b for square invertible self.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        assert!(self.is_square());
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zeros(self.rows, self.cols + 1, self.zero.clone());
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = b[i].clone();
        }
        let (rank, pivots) = aug.rref()?;
        if rank < self.rows || pivots.iter().any(|&c| c == self.cols) {
            return Err(CoreError::DimensionMismatch("singular system".into()));
        }
        Ok((0..self.rows).map(|i| aug.at(i, self.cols).clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn m2(a: i64, b: i64, c: i64, d: i64) -> Mat<BigRational> {
        Mat::from_rows(vec![vec![q(a), q(b)], vec![q(c), q(d)]], BigRational::zero())
    }

    #[test]
    fn multiply_and_trace() {
        let a = m2(1, 2, 3, 4);
        let b = m2(0, 1, 1, 0);
        let ab = a.mul(&b);
        assert_eq!(ab, m2(2, 1, 4, 3));
        assert_eq!(a.trace(), q(5));
    }

    #[test]
    fn power() {
        let a = m2(1, 1, 0, 1);
        assert_eq!(a.pow(5), m2(1, 5, 0, 1));
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m2(1, 2, 2, 4);
        let k = a.kernel_basis().unwrap();
        assert_eq!(k.len(), 1);
        // (x, y) with x + 2y = 0
        let v = &k[0];
        assert_eq!(v[0].add_s(&q(2).mul_s(&v[1])), q(0));
    }

    #[test]
    fn solve_small_system() {
        let a = m2(2, 1, 1, 3);
        let x = a.solve(&[q(5), q(10)]).unwrap();
        assert_eq!(x, vec![q(1), q(3)]);
    }

    #[test]
    fn cyclotomic_matrix_rank() {
        let z = CycElem::zeta_pow(4, 1);
        let one = CycElem::one(4);
        let m = Mat::from_rows(
            vec![vec![one.clone(), z.clone()], vec![z.clone(), one.neg()]],
            CycElem::zero(4),
        );
        // det = -1 - zeta^2 = -1 + 1 = 0, so rank 1
        assert_eq!(m.rank().unwrap(), 1);
    }
}
