//! Exact Gaussian elimination over GF(q^n) and over the prime field.

use crate::field::{inv_mod, Felt, FieldCtx};

/// The operations elimination needs from a field.
pub trait Scalars {
    type Elem: Copy + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// Inverse of a nonzero element.
    fn inv(&self, a: Self::Elem) -> Self::Elem;

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }
}

impl Scalars for FieldCtx {
    type Elem = Felt;

    fn zero(&self) -> Felt {
        Felt::ZERO
    }
    fn one(&self) -> Felt {
        Felt::ONE
    }
    fn add(&self, a: Felt, b: Felt) -> Felt {
        FieldCtx::add(self, a, b)
    }
    fn sub(&self, a: Felt, b: Felt) -> Felt {
        FieldCtx::sub(self, a, b)
    }
    fn mul(&self, a: Felt, b: Felt) -> Felt {
        FieldCtx::mul(self, a, b)
    }
    fn inv(&self, a: Felt) -> Felt {
        FieldCtx::inv(self, a).expect("pivot is nonzero")
    }
}

/// GF(p) with elements `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField(pub u64);

impl Scalars for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.0 - b) % self.0
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }
    fn inv(&self, a: u64) -> u64 {
        inv_mod(a, self.0)
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Matrix {
            rows: nrows,
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<E>], rows: usize, zero: E) -> Self {
        let mut m = Matrix::filled(rows, columns.len(), zero);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn as_mut_slice(&mut self) -> &mut [E] {
        &mut self.data
    }
}

impl<E> std::ops::Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> std::ops::IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

/// Bring a row-major `rows × cols` block to reduced row echelon form in
/// place; returns the pivot columns.
pub fn rref_in_place<S: Scalars>(s: &S, data: &mut [S::Elem], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !s.is_zero(data[i * cols + c])) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = s.inv(data[r * cols + c]);
        for j in c..cols {
            data[r * cols + j] = s.mul(data[r * cols + j], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = data[i * cols + c];
            if s.is_zero(factor) {
                continue;
            }
            for j in c..cols {
                let v = s.mul(factor, data[r * cols + j]);
                data[i * cols + j] = s.sub(data[i * cols + j], v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank by forward elimination only; destroys `data`.
pub fn rank_in_place<S: Scalars>(s: &S, data: &mut [S::Elem], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !s.is_zero(data[i * cols + c])) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = s.inv(data[r * cols + c]);
        for i in r + 1..rows {
            let lead = data[i * cols + c];
            if s.is_zero(lead) {
                continue;
            }
            let factor = s.mul(lead, inv);
            for j in c..cols {
                let v = s.mul(factor, data[r * cols + j]);
                data[i * cols + j] = s.sub(data[i * cols + j], v);
            }
        }
        r += 1;
    }
    r
}

pub fn rank<S: Scalars>(s: &S, m: &Matrix<S::Elem>) -> usize {
    let mut data = m.data.clone();
    rank_in_place(s, &mut data, m.rows, m.cols)
}

/// Canonical reduced row echelon form with zero rows dropped.
pub fn rref<S: Scalars>(s: &S, m: &Matrix<S::Elem>) -> (Matrix<S::Elem>, Vec<usize>) {
    let mut data = m.data.clone();
    let pivots = rref_in_place(s, &mut data, m.rows, m.cols);
    data.truncate(pivots.len() * m.cols);
    (
        Matrix {
            rows: pivots.len(),
            cols: m.cols,
            data,
        },
        pivots,
    )
}

/// Basis of {v : M v = 0}, one vector per free column (that entry set to 1).
pub fn nullspace<S: Scalars>(s: &S, m: &Matrix<S::Elem>) -> Vec<Vec<S::Elem>> {
    let (red, pivots) = rref(s, m);
    let cols = m.cols;
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![s.zero(); cols];
        v[free] = s.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = s.sub(s.zero(), red[(r, free)]);
        }
        basis.push(v);
    }
    basis
}

/// Whether `v` lies in the row space of the vectors in `rows`.
pub fn in_row_space<S: Scalars>(s: &S, rows: &[Vec<S::Elem>], v: &[S::Elem]) -> bool {
    let cols = v.len();
    let base = Matrix::from_rows(rows.to_vec(), cols);
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    let ext = Matrix::from_rows(ext, cols);
    rank(s, &base) == rank(s, &ext)
}
