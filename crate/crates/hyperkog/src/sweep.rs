//! Iteration mechanics at the n×n level: candidate detection, the fixed
//! pair partition, application of 2×2 transformations to row and column
//! pairs of the big matrices, and the step weights that drive pivot
//! selection.
//!
//! A step's *weight* is the drop in squared off-diagonal Frobenius norm it
//! would cause.  For a trigonometric pivot the right transformation is
//! unitary, so the drop is exactly the two off-diagonal pivot squares.  A
//! hyperbolic right transformation also changes the off-diagonal mass of
//! the two pivot columns outside the pivot rows; that correction is
//! evaluated *virtually* — the transformed values are computed and
//! discarded without writing to `G` — and accumulated in double-double
//! arithmetic in a fixed order so the result does not depend on the task
//! count.

use rayon::prelude::*;

use crate::dd::Dd;
use crate::dps::AugWeight;
use crate::kernel2x2::{apply_ops, hsvd2, Hsvd2Result, PlaneOp, SignPair};
use crate::mat2::Mat2;
use crate::matrix::{Matrix, SignDiagonal};
use crate::scalar::Scalar;

/// `|z|²` as a double-double, exact in the components (`re² + im²` with
/// error-free products).
#[inline]
pub fn norm_sq_dd<S: Scalar>(z: S) -> Dd {
    let re_sq = Dd::from_prod(z.re(), z.re());
    if S::IS_COMPLEX {
        re_sq.add(Dd::from_prod(z.im(), z.im()))
    } else {
        re_sq
    }
}

/// Squared Frobenius norm, accumulated in double-double in row-major order.
pub fn fro_sq<S: Scalar>(g: &Matrix<S>) -> Dd {
    g.data()
        .iter()
        .fold(Dd::ZERO, |acc, &z| acc.add(norm_sq_dd(z)))
}

/// Squared off-diagonal Frobenius norm, accumulated in double-double in
/// row-major order.
pub fn off_fro_sq<S: Scalar>(g: &Matrix<S>) -> Dd {
    let n = g.order();
    let mut acc = Dd::ZERO;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = acc.add(norm_sq_dd(g.get(i, j)));
            }
        }
    }
    acc
}

/// Gathers the 2×2 pivot submatrix at `(p, q)`.
#[inline]
pub fn pivot_block<S: Scalar>(g: &Matrix<S>, p: usize, q: usize) -> Mat2<S> {
    Mat2([
        [g.get(p, p), g.get(p, q)],
        [g.get(q, p), g.get(q, q)],
    ])
}

/// All index pairs `(p, q)`, `p < q`, split into a trigonometric prefix
/// (equal `J` signs) and a hyperbolic suffix (opposite signs).
///
/// Both parts preserve the column-cyclic enumeration order — the suffix in
/// reverse, because the two-pointer fill appends mixed-sign pairs from the
/// back.  Keeping the two classes contiguous lets the weight pass run one
/// uniform-cost parallel loop per class.
#[derive(Clone, Debug, PartialEq)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
    split: usize,
}

impl PairPartition {
    /// Every pair: trigonometric block first, then the hyperbolic block.
    #[inline]
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of leading trigonometric pairs.
    #[inline]
    pub fn split(&self) -> usize {
        self.split
    }

    #[inline]
    pub fn trigonometric(&self) -> &[(usize, usize)] {
        &self.pairs[..self.split]
    }

    #[inline]
    pub fn hyperbolic(&self) -> &[(usize, usize)] {
        &self.pairs[self.split..]
    }
}

/// Builds the pair partition for `J` with a two-pointer fill over the
/// column-cyclic enumeration (`q` ascending, `p` ascending below it):
/// same-sign pairs advance from the front, mixed-sign pairs retreat from
/// the back.
pub fn build_pair_partition(j: &SignDiagonal) -> PairPartition {
    let n = j.order();
    let total = n * (n - 1) / 2;
    let mut pairs = vec![(0usize, 0usize); total];
    let mut front = 0;
    let mut back = total;
    for q in 1..n {
        for p in 0..q {
            if j.same_sign(p, q) {
                pairs[front] = (p, q);
                front += 1;
            } else {
                back -= 1;
                pairs[back] = (p, q);
            }
        }
    }
    PairPartition {
        pairs,
        split: front,
    }
}

/// Whether the pivot `(p, q)` still calls for a transformation: any
/// off-diagonal entry nonzero (a `NaN` counts as nonzero), a diagonal entry
/// that is not real and non-negative, or — only for a trigonometric pair
/// whose pivot is already diagonal, real and non-negative — the two
/// diagonal values out of order (descending is required on the `+1` block,
/// ascending on the `-1` block).  Hyperbolic pairs carry no ordering
/// constraint.
pub fn is_candidate<S: Scalar>(g: &Matrix<S>, j: &SignDiagonal, p: usize, q: usize) -> bool {
    if g.get(q, p) != S::zero() || g.get(p, q) != S::zero() {
        return true;
    }
    let g_pp = g.get(p, p);
    let g_qq = g.get(q, q);
    if !g_pp.is_real_nonneg() || !g_qq.is_real_nonneg() {
        return true;
    }
    if j.same_sign(p, q) {
        if j.get(p) > 0 {
            g_pp.re() < g_qq.re()
        } else {
            g_pp.re() > g_qq.re()
        }
    } else {
        false
    }
}

/// The state advanced by the iteration: the current iterate `G`, the
/// signature `J`, and the optionally accumulated factors.
///
/// `u_star` holds the product of all left 2×2 transformations applied so
/// far and `v` the product of all right ones, so `u_star · G₀ · v = G`
/// up to accumulation rounding.
#[derive(Clone, Debug)]
pub struct IterationState<S> {
    pub g: Matrix<S>,
    pub u_star: Option<Matrix<S>>,
    pub v: Option<Matrix<S>>,
    pub j: SignDiagonal,
}

impl<S: Scalar> IterationState<S> {
    /// Starts at `G₀`, with the factors at identity when accumulation is
    /// requested.
    pub fn new(g: Matrix<S>, j: SignDiagonal, accumulate: bool) -> IterationState<S> {
        assert_eq!(g.order(), j.order(), "matrix and sign orders must agree");
        let n = g.order();
        IterationState {
            g,
            u_star: accumulate.then(|| Matrix::identity(n)),
            v: accumulate.then(|| Matrix::identity(n)),
            j,
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.g.order()
    }

    /// The 2×2 pivot submatrix at `(p, q)`.
    #[inline]
    pub fn pivot(&self, p: usize, q: usize) -> Mat2<S> {
        pivot_block(&self.g, p, q)
    }

    /// The pivot's sign pair from `J`.
    #[inline]
    pub fn sign_pair(&self, p: usize, q: usize) -> SignPair {
        SignPair::new(self.j.get(p), self.j.get(q))
    }

    /// Computes the 2×2 HSVD of the pivot at `(p, q)`.
    pub fn pivot_hsvd2(&self, p: usize, q: usize, upsilon: f64) -> Hsvd2Result<S> {
        hsvd2(&self.pivot(p, q), self.sign_pair(p, q), upsilon)
    }

    /// Applies a step's left transformation to rows `p`, `q` of `G` (and of
    /// the accumulated `U*`).
    pub fn apply_left2(&mut self, p: usize, q: usize, step: &Hsvd2Result<S>) {
        let (row_p, row_q) = self.g.rows_pair_mut(p, q);
        transform_rows(&step.left_ops, row_p, row_q);
        if let Some(u_star) = &mut self.u_star {
            let (row_p, row_q) = u_star.rows_pair_mut(p, q);
            transform_rows(&step.left_ops, row_p, row_q);
        }
    }

    /// Applies a step's right transformation to columns `p`, `q` of `G`
    /// (and of the accumulated `V`), then stores the step's singular values
    /// on the pivot diagonal and exact zeros on its off-diagonal.  Must run
    /// after [`IterationState::apply_left2`] for the same step.
    pub fn apply_right2(&mut self, p: usize, q: usize, step: &Hsvd2Result<S>) {
        transform_cols(&mut self.g, p, q, &step.right_ops);
        if let Some(v) = &mut self.v {
            transform_cols(v, p, q, &step.right_ops);
        }
        self.store_pivot_sigmas(p, q, step);
    }

    /// Left transformations of a whole multi-step, in parallel.  The pivot
    /// pairs must be index-disjoint; each task owns one pair of rows, so
    /// the result is bitwise that of [`IterationState::apply_left2`] run
    /// per pivot in any order.
    pub fn apply_left_batch(&mut self, pivots: &[(usize, usize)], steps: &[Hsvd2Result<S>]) {
        debug_assert_eq!(pivots.len(), steps.len());
        let n = self.g.order();
        left_batch_rows(self.g.data_mut(), n, pivots, steps);
        if let Some(u_star) = &mut self.u_star {
            left_batch_rows(u_star.data_mut(), n, pivots, steps);
        }
    }

    /// Right transformations of a whole multi-step, in parallel over matrix
    /// rows (every row updates its `(p, q)` entries for each pivot, which
    /// are disjoint across pivots), followed by the sequential singular
    /// value stores.  Must run after [`IterationState::apply_left_batch`]
    /// for the same multi-step.
    pub fn apply_right_batch(&mut self, pivots: &[(usize, usize)], steps: &[Hsvd2Result<S>]) {
        debug_assert_eq!(pivots.len(), steps.len());
        let n = self.g.order();
        right_batch_rows(self.g.data_mut(), n, pivots, steps);
        if let Some(v) = &mut self.v {
            right_batch_rows(v.data_mut(), n, pivots, steps);
        }
        for (&(p, q), step) in pivots.iter().zip(steps) {
            self.store_pivot_sigmas(p, q, step);
        }
    }

    fn store_pivot_sigmas(&mut self, p: usize, q: usize, step: &Hsvd2Result<S>) {
        self.g.set(p, p, S::from_re(step.sigma_pp));
        self.g.set(q, q, S::from_re(step.sigma_qq));
        self.g.set(p, q, S::zero());
        self.g.set(q, p, S::zero());
    }
}

/// Folds an operation sequence over an aligned row pair, elementwise.
fn transform_rows<S: Scalar>(ops: &[PlaneOp<S>], row_p: &mut [S], row_q: &mut [S]) {
    if ops.is_empty() {
        return;
    }
    for (slot_p, slot_q) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (a, b) = apply_ops(ops, *slot_p, *slot_q);
        *slot_p = a;
        *slot_q = b;
    }
}

/// Folds an operation sequence over the column pair `(p, q)`, row by row.
fn transform_cols<S: Scalar>(m: &mut Matrix<S>, p: usize, q: usize, ops: &[PlaneOp<S>]) {
    if ops.is_empty() {
        return;
    }
    let n = m.order();
    for i in 0..n {
        let (a, b) = apply_ops(ops, m.get(i, p), m.get(i, q));
        m.set(i, p, a);
        m.set(i, q, b);
    }
}

/// Hands each task exclusive ownership of its pivot's two rows, then runs
/// the row transformations concurrently.
fn left_batch_rows<S: Scalar>(
    data: &mut [S],
    n: usize,
    pivots: &[(usize, usize)],
    steps: &[Hsvd2Result<S>],
) {
    let mut rows: Vec<Option<&mut [S]>> = data.chunks_mut(n).map(Some).collect();
    let mut tasks = Vec::with_capacity(pivots.len());
    for (&(p, q), step) in pivots.iter().zip(steps) {
        let row_p = rows[p].take().expect("pivot rows must be disjoint");
        let row_q = rows[q].take().expect("pivot rows must be disjoint");
        tasks.push((row_p, row_q, step));
    }
    tasks.into_par_iter().for_each(|(row_p, row_q, step)| {
        transform_rows(&step.left_ops, row_p, row_q);
    });
}

/// Updates every matrix row's `(p, q)` entries for each pivot; rows are
/// independent because the pivots' column pairs are disjoint.
fn right_batch_rows<S: Scalar>(
    data: &mut [S],
    n: usize,
    pivots: &[(usize, usize)],
    steps: &[Hsvd2Result<S>],
) {
    data.par_chunks_mut(n).for_each(|row| {
        for (&(p, q), step) in pivots.iter().zip(steps) {
            if step.right_ops.is_empty() {
                continue;
            }
            let (a, b) = apply_ops(&step.right_ops, row[p], row[q]);
            row[p] = a;
            row[q] = b;
        }
    });
}

/// The weight of a step at the candidate `(p, q)`: the drop in squared
/// off-diagonal Frobenius norm the step would cause.
///
/// Trigonometric pairs — and hyperbolic pairs whose computed right
/// transformation is the identity — drop exactly `|G(q,p)|² + |G(p,q)|²`.
/// Otherwise the hyperbolic correction is accumulated over rows
/// `i ∉ {p, q}` in ascending order, the `p`-column term before the
/// `q`-column term, as the exact double-double difference of squared
/// magnitudes before and after the virtually applied right transformation
/// (equal to the error-free product `(a − ã)(a + ã)` of the magnitudes).
/// The transformed values themselves are the binary64 results of the very
/// operations a real application would perform, and are then discarded.
///
/// Returns `-∞` when the hyperbolic kernel is undefined at this `υ`, and
/// `NaN` when a scanned element is non-finite.
pub fn virtual_weight<S: Scalar>(
    g: &Matrix<S>,
    j: &SignDiagonal,
    p: usize,
    q: usize,
    upsilon: f64,
) -> f64 {
    debug_assert!(is_candidate(g, j, p, q));
    let pivot = pivot_block(g, p, q);
    if !pivot.is_finite() {
        return f64::NAN;
    }
    let mut rho = norm_sq_dd(g.get(q, p)).add(norm_sq_dd(g.get(p, q)));
    let sign = SignPair::new(j.get(p), j.get(q));
    if sign.hyperbolic() {
        let step = hsvd2(&pivot, sign, upsilon);
        if !step.defined {
            return f64::NEG_INFINITY;
        }
        if !step.v_is_identity {
            for i in 0..g.order() {
                if i == p || i == q {
                    continue;
                }
                let a_p = g.get(i, p);
                let a_q = g.get(i, q);
                if !a_p.is_finite() || !a_q.is_finite() {
                    return f64::NAN;
                }
                let (t_p, t_q) = apply_ops(&step.right_ops, a_p, a_q);
                rho = rho.add(norm_sq_dd(a_p).sub(norm_sq_dd(t_p)));
                rho = rho.add(norm_sq_dd(a_q).sub(norm_sq_dd(t_q)));
            }
        }
    }
    rho.to_f64()
}

/// Weights for every pair of the partition, in partition order.
/// Non-candidates get `NaN`; candidates get [`virtual_weight`].  Runs as
/// two separate parallel loops — all trigonometric pairs, then all
/// hyperbolic pairs — so each loop has uniform per-pair cost.
pub fn compute_all_weights<S: Scalar>(
    state: &IterationState<S>,
    partition: &PairPartition,
    upsilon: f64,
) -> Vec<AugWeight> {
    let weigh = |&(p, q): &(usize, usize)| -> AugWeight {
        let w = if is_candidate(&state.g, &state.j, p, q) {
            virtual_weight(&state.g, &state.j, p, q, upsilon)
        } else {
            f64::NAN
        };
        AugWeight { w, p, q }
    };
    let mut weights: Vec<AugWeight> = partition.trigonometric().par_iter().map(weigh).collect();
    let hyperbolic: Vec<AugWeight> = partition.hyperbolic().par_iter().map(weigh).collect();
    weights.extend(hyperbolic);
    weights
}
