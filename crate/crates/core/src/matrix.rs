//! Dense matrices over exact rings and their determinants.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::Rational;

/// Commutative ring with exact division where the quotient exists.
pub trait ExactRing: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div_exact(&self, other: &Self) -> Result<Self>;
}

impl ExactRing for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Result<Self> {
        if Zero::is_zero(other) {
            return Err(Error::DivisionFails("division by zero".into()));
        }
        Ok(self / other)
    }
}

impl ExactRing for Polynomial {
    fn zero_like(&self) -> Self {
        Polynomial::zero(self.variables().clone())
    }
    fn one_like(&self) -> Self {
        Polynomial::one(self.variables().clone())
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Result<Self> {
        Polynomial::divide_exact(self, other)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// The square submatrix on all rows and the given columns.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix<T> {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn with_column(&self, col: usize, values: &[T]) -> Matrix<T> {
        let mut m = self.clone();
        for (i, v) in values.iter().enumerate() {
            m.set(i, col, v.clone());
        }
        m
    }
}

/// Sizes up to this use Laplace expansion; larger ones use Bareiss.
pub const COFACTOR_LIMIT: usize = 5;

impl<T: ExactRing> Matrix<T> {
    fn check_square(&self) -> Result<()> {
        if self.rows != self.cols || self.rows == 0 {
            return Err(Error::InvalidInput(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    pub fn determinant(&self) -> Result<T> {
        self.check_square()?;
        if self.rows <= COFACTOR_LIMIT {
            self.det_cofactor()
        } else {
            self.det_bareiss()
        }
    }

    /// Laplace expansion along rows, memoising minors by their column set.
    pub fn det_cofactor(&self) -> Result<T> {
        self.check_square()?;
        let n = self.rows;
        // minors[mask] = det of rows (n - popcount(mask))..n on columns `mask`.
        let mut minors: HashMap<u64, T> = HashMap::new();
        let one = self.get(0, 0).one_like();
        minors.insert(0, one);
        for depth in 1..=n {
            let row = n - depth;
            let mut next = HashMap::new();
            for mask in column_sets(n, depth) {
                let mut acc = self.get(0, 0).zero_like();
                let mut sign_positive = true;
                for col in 0..n {
                    if mask & (1 << col) == 0 {
                        continue;
                    }
                    let entry = self.get(row, col);
                    if !entry.is_zero() {
                        let minor = &minors[&(mask & !(1 << col))];
                        if !minor.is_zero() {
                            let prod = entry.mul(minor);
                            acc = if sign_positive { acc.add(&prod) } else { acc.sub(&prod) };
                        }
                    }
                    sign_positive = !sign_positive;
                }
                next.insert(mask, acc);
            }
            minors = next;
        }
        Ok(minors.remove(&((1u64 << n) - 1)).unwrap())
    }

    /// Fraction-free Gaussian elimination; every intermediate division is exact.
    pub fn det_bareiss(&self) -> Result<T> {
        self.check_square()?;
        let n = self.rows;
        let mut m = self.to_rows();
        let mut prev = m[0][0].one_like();
        let mut negate = false;
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        negate = !negate;
                    }
                    None => return Ok(m[0][0].zero_like()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = num.div_exact(&prev)?;
                }
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if negate { det.neg() } else { det })
    }
}

impl Matrix<Rational> {
    /// Rank by ordinary Gaussian elimination over the rationals.
    pub fn rank(&self) -> usize {
        let mut m = self.to_rows();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&i| !Zero::is_zero(&m[i][col])) else {
                continue;
            };
            m.swap(rank, pivot);
            let inv = m[rank][col].recip();
            for i in rank + 1..self.rows {
                if Zero::is_zero(&m[i][col]) {
                    continue;
                }
                let factor = &m[i][col] * &inv;
                for j in col..self.cols {
                    let delta = &factor * &m[rank][j];
                    m[i][j] -= delta;
                }
            }
            rank += 1;
        }
        rank
    }
}

/// All bitmasks over `n` columns with exactly `size` bits set.
fn column_sets(n: usize, size: usize) -> impl Iterator<Item = u64> {
    (0u64..(1u64 << n)).filter(move |m| m.count_ones() as usize == size)
}

/// All increasing `size`-tuples from `0..n`, in lexicographic order.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < size - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, size, current, out);
            current.pop();
        }
    }
    rec(0, n, size, &mut current, &mut out);
    out
}
