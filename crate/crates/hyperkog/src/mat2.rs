//! A 2×2 matrix of scalars and the pivot prescaling that precedes every
//! 2×2 factorization.
//!
//! Each pivot pair extracted from the iteration matrix is first multiplied
//! by a power of two chosen so that no column norm — and hence no singular
//! value — of the scaled pivot can overflow, while preserving every bit of
//! the significands.  The scale exponent is the minimum of [`fp::chi`] over
//! all real and imaginary components; it is undone at the very end by the
//! safe backscaling of the computed singular values.

use crate::fp;
use crate::scalar::Scalar;

/// A 2×2 matrix stored as `[[a11, a12], [a21, a22]]`.
///
/// This is the working type of the 2×2 kernels: small enough to live in
/// registers, generic over real and complex scalars.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<S>(pub [[S; 2]; 2]);

impl<S: Scalar> Mat2<S> {
    /// The 2×2 identity.
    #[inline]
    pub fn identity() -> Self {
        Mat2([[S::one(), S::zero()], [S::zero(), S::one()]])
    }

    /// Element at row `i`, column `j` (zero-based).
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> S {
        self.0[i][j]
    }

    /// Overwrites the element at row `i`, column `j`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.0[i][j] = v;
    }

    /// Exchanges the two rows.
    #[inline]
    pub fn swap_rows(&mut self) {
        self.0.swap(0, 1);
    }

    /// Exchanges the two columns.
    #[inline]
    pub fn swap_cols(&mut self) {
        for row in &mut self.0 {
            row.swap(0, 1);
        }
    }

    /// Applies `f` to every element.
    #[inline]
    pub fn map(&self, mut f: impl FnMut(S) -> S) -> Self {
        Mat2([
            [f(self.0[0][0]), f(self.0[0][1])],
            [f(self.0[1][0]), f(self.0[1][1])],
        ])
    }

    /// True when every component of every element is finite.
    #[inline]
    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|e| e.re().is_finite() && e.im().is_finite())
    }
}

/// The scale exponent `s` of a pivot matrix: the minimum of [`fp::chi`]
/// over all real and imaginary components of `g`.
///
/// Multiplying every component by `2^s` guarantees that no column norm of
/// the scaled matrix can overflow, with enough headroom for the
/// factorization's intermediate quantities.  Returns `None` when some
/// component is not finite, which marks the pivot as unusable.
pub fn scale_param<S: Scalar>(g: &Mat2<S>) -> Option<i32> {
    let mut s = i32::MAX;
    for row in &g.0 {
        for e in row {
            if !e.re().is_finite() || !e.im().is_finite() {
                return None;
            }
            s = s.min(fp::chi(e.re()));
            if S::IS_COMPLEX {
                s = s.min(fp::chi(e.im()));
            }
        }
    }
    Some(s)
}

/// Multiplies every component of `g` by `2^s` via exponent manipulation.
///
/// Exact except when a result is subnormal (low bits are lost, possibly all
/// of them: a component may flush to zero when scaled far below the
/// subnormal range).
pub fn scale_mat2<S: Scalar>(g: &Mat2<S>, s: i32) -> Mat2<S> {
    g.map(|e| e.scale_pow2(s))
}
