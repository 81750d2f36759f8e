//! Dense square matrix storage and the diagonal sign matrix `J`.
//!
//! Storage is row-major and deliberately minimal: the iteration only ever
//! gathers and scatters row pairs and column pairs, so no general linear
//! algebra is provided here.

use crate::scalar::Scalar;

/// Dense square matrix over a [`Scalar`] field, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Matrix<S> {
        Matrix {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Matrix<S> {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    /// Builds from `n * n` entries in row-major order.
    pub fn from_row_major(n: usize, data: Vec<S>) -> Matrix<S> {
        assert_eq!(data.len(), n * n, "row-major data has wrong length");
        Matrix { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Matrix<S> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[S]) {
        assert_eq!(v.len(), self.n);
        for (i, &x) in v.iter().enumerate() {
            self.set(i, j, x);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|e| e.is_finite())
    }

    pub fn conj_transpose(&self) -> Matrix<S> {
        Matrix::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    #[inline]
    pub fn data(&self) -> &[S] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    /// Mutable views of two distinct rows at once; requires `p < q`.
    pub fn rows_pair_mut(&mut self, p: usize, q: usize) -> (&mut [S], &mut [S]) {
        assert!(p < q && q < self.n, "row pair out of order or range");
        let (head, tail) = self.data.split_at_mut(q * self.n);
        (&mut head[p * self.n..(p + 1) * self.n], &mut tail[..self.n])
    }
}

/// The diagonal sign matrix `J = diag(±1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignDiagonal {
    signs: Vec<i8>,
}

impl SignDiagonal {
    /// Builds from signs that must each be `+1` or `-1`.
    pub fn new(signs: Vec<i8>) -> SignDiagonal {
        assert!(
            signs.iter().all(|&s| s == 1 || s == -1),
            "sign diagonal entries must be +1 or -1"
        );
        SignDiagonal { signs }
    }

    pub fn identity(n: usize) -> SignDiagonal {
        SignDiagonal { signs: vec![1; n] }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.signs.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> i8 {
        self.signs[i]
    }

    #[inline]
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// True when positions `p` and `q` carry the same sign (a trigonometric
    /// pair); false for a hyperbolic pair.
    #[inline]
    pub fn same_sign(&self, p: usize, q: usize) -> bool {
        self.signs[p] == self.signs[q]
    }
}
