//! The complete 2×2 hyperbolic SVD kernel.
//!
//! Given a 2×2 pivot `Ĝ` and the matching sign pair `Ĵ = diag(±1, ±1)`, the
//! kernel produces a unitary `Û*`, a `Ĵ`-unitary `V̂`, and non-negative
//! `σ_pp, σ_qq` with `Û* Ĝ V̂ = diag(σ_pp, σ_qq)`.  It proceeds in four
//! phases:
//!
//! 1. prescale `Ĝ₀ = 2^s Ĝ` so nothing can overflow ([`scale_param`]);
//! 2. reduce `Ĝ₀` to a real non-negative triangular `T` with a column/row
//!    pivoted, phased QR-like factorization ([`jutv2`]);
//! 3. diagonalize `T` with one trigonometric or hyperbolic plane rotation
//!    pair ([`svd2_trig`], [`hsvd2_upper`], [`hsvd2_lower`]) and undo the
//!    prescaling of the singular values safely ([`backscale`]);
//! 4. assemble the two-sided factors.
//!
//! Both factors are kept in *factored form* as sequences of [`PlaneOp`]s
//! (swaps, phase diagonals, one rotation).  The full iteration applies
//! those operations to the rows and columns of the large matrices, which is
//! both cheaper and — more importantly — makes the update of the iteration
//! matrix bitwise independent of how pivot pairs are grouped into parallel
//! steps.  Dense 2×2 factors are recovered by applying the operations to
//! the identity.
//!
//! Everything here uses only correctly rounded arithmetic (`+`, `*`, `/`,
//! `sqrt`, fma) plus the in-repo [`fp::hypot2`], so results are bitwise
//! reproducible across conforming platforms.

use crate::fp;
use crate::mat2::{scale_mat2, scale_param, Mat2};
use crate::scalar::Scalar;

/// The signs `(j_pp, j_qq)` of the sign matrix restricted to a pivot pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignPair {
    pub j_pp: i8,
    pub j_qq: i8,
}

impl SignPair {
    /// Builds a sign pair, insisting on `±1` entries.
    #[inline]
    pub fn new(j_pp: i8, j_qq: i8) -> Self {
        assert!(j_pp == 1 || j_pp == -1);
        assert!(j_qq == 1 || j_qq == -1);
        SignPair { j_pp, j_qq }
    }

    /// True when the signs differ, which calls for a hyperbolic rotation.
    #[inline]
    pub fn hyperbolic(self) -> bool {
        self.j_pp != self.j_qq
    }
}

/// One elementary transformation of a row pair (from the left) or a column
/// pair (from the right).
///
/// A 2×2 factor of the decomposition is a short sequence of these.  The
/// driver applies them directly to the large matrices; [`dense_left`] and
/// [`dense_right`] turn a sequence back into an explicit 2×2 matrix.
///
/// Construction sites skip operations that would be bitwise no-ops (unit
/// phases, zero tangents), so an empty sequence — equivalently, an identity
/// dense factor — guarantees the data it would have touched is unchanged.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlaneOp<S> {
    /// Exchange the two rows (columns).
    Swap,
    /// Multiply the first row (column) by `f_p` and the second by `f_q`;
    /// both factors are unit scalars.
    Phase { f_p: S, f_q: S },
    /// A plane rotation: `(a, b) ↦ ((a + tan·b)/sec, (b − tan·a)/sec)`.
    ///
    /// The same formula realizes the left rotation on row pairs and the
    /// right (transposed) rotation on column pairs.
    Rot { tan: f64, sec: f64 },
    /// A hyperbolic rotation applied from the right:
    /// `(a, b) ↦ ((a + tanh·b)/sech, (b + tanh·a)/sech)`.
    HypRot { tanh: f64, sech: f64 },
}

/// Applies `op` to the pair `(a, b)` — two elements sharing a column (for
/// left operations) or a row (for right operations).
#[inline]
pub fn apply_op<S: Scalar>(op: &PlaneOp<S>, a: S, b: S) -> (S, S) {
    match *op {
        PlaneOp::Swap => (b, a),
        PlaneOp::Phase { f_p, f_q } => (S::mul(f_p, a), S::mul(f_q, b)),
        PlaneOp::Rot { tan, sec } => (
            S::mul_add(S::from_re(tan), b, a).div_re(sec),
            S::mul_add(S::from_re(-tan), a, b).div_re(sec),
        ),
        PlaneOp::HypRot { tanh, sech } => (
            S::mul_add(S::from_re(tanh), b, a).div_re(sech),
            S::mul_add(S::from_re(tanh), a, b).div_re(sech),
        ),
    }
}

/// Folds a whole operation sequence over one element pair.
#[inline]
pub fn apply_ops<S: Scalar>(ops: &[PlaneOp<S>], mut a: S, mut b: S) -> (S, S) {
    for op in ops {
        (a, b) = apply_op(op, a, b);
    }
    (a, b)
}

/// Applies a left operation to both columns of a 2×2 matrix.
#[inline]
pub fn apply_left2<S: Scalar>(op: &PlaneOp<S>, m: &mut Mat2<S>) {
    for j in 0..2 {
        let (a, b) = apply_op(op, m.at(0, j), m.at(1, j));
        m.set(0, j, a);
        m.set(1, j, b);
    }
}

/// Applies a right operation to both rows of a 2×2 matrix.
#[inline]
pub fn apply_right2<S: Scalar>(op: &PlaneOp<S>, m: &mut Mat2<S>) {
    for i in 0..2 {
        let (a, b) = apply_op(op, m.at(i, 0), m.at(i, 1));
        m.set(i, 0, a);
        m.set(i, 1, b);
    }
}

/// The dense 2×2 matrix of a left operation sequence (the product of the
/// operations applied to the identity's rows).
pub fn dense_left<S: Scalar>(ops: &[PlaneOp<S>]) -> Mat2<S> {
    let mut m = Mat2::identity();
    for op in ops {
        apply_left2(op, &mut m);
    }
    m
}

/// The dense 2×2 matrix of a right operation sequence.
pub fn dense_right<S: Scalar>(ops: &[PlaneOp<S>]) -> Mat2<S> {
    let mut m = Mat2::identity();
    for op in ops {
        apply_right2(op, &mut m);
    }
    m
}

/// The triangular factorization `Ǔ* Ĝ₀ V̌ = T` of the prescaled pivot.
///
/// `T` is real with non-negative entries and triangular: upper with
/// `t₁₁² ≥ t₁₂² + t₂₂²` after the short pipeline, or — only in the
/// hyperbolic case that needed a column swap — lower with
/// `t₂₂² ≥ t₂₁² + t₁₁²`.  `Ǔ*` is unitary; `V̌` is both unitary and
/// `Ĵ`-unitary, so it is safe to apply to the wide factor regardless of the
/// signs.
#[derive(Clone, Debug)]
pub struct Utv2<S> {
    /// The real non-negative triangular factor.
    pub t: [[f64; 2]; 2],
    /// The prescale exponent: `T` factors `2^s Ĝ`, not `Ĝ` itself.
    pub s: i32,
    /// The prescaled pivot was already diagonal (including the zero matrix).
    pub diagonal: bool,
    /// The sign pair is mixed, i.e. a hyperbolic rotation will follow.
    pub hyperbolic: bool,
    /// The columns were swapped to put the one of larger norm first.
    pub col_swapped: bool,
    /// The rows were swapped to keep the Givens tangent in `[0, 1]`.
    pub row_swapped: bool,
    /// Left factor `Ǔ*`, innermost first.
    pub left_ops: Vec<PlaneOp<S>>,
    /// Right factor `V̌`, innermost first.
    pub right_ops: Vec<PlaneOp<S>>,
}

impl<S: Scalar> Utv2<S> {
    /// The dense left factor `Ǔ*`.
    pub fn u_star_dense(&self) -> Mat2<S> {
        dense_left(&self.left_ops)
    }

    /// The dense right factor `V̌`.
    pub fn v_dense(&self) -> Mat2<S> {
        dense_right(&self.right_ops)
    }
}

/// Reduces the prescaled pivot to a real non-negative triangular `T`.
///
/// The shared stages: a column pivot putting the column of larger norm
/// first, row phases making the first column real non-negative, a row pivot
/// putting the larger first-column entry on top, and one real Givens
/// rotation annihilating the (2,1) entry.  When the sign pair is mixed *and*
/// the columns were swapped, the swap would spoil `Ĵ`-unitarity of the
/// right factor, so a longer tail undoes it: both columns and rows are
/// swapped (making `T` lower triangular) and the remaining entries are
/// phased real from the right and the left.  Otherwise two phases finish
/// the upper triangular form.
///
/// Requires all components of `g_hat` finite; NaNs otherwise propagate into
/// `T` (callers screen pivots beforehand).
pub fn jutv2<S: Scalar>(g_hat: &Mat2<S>, j_hat: SignPair) -> Utv2<S> {
    let s = scale_param(g_hat).unwrap_or(0);
    let mut w = scale_mat2(g_hat, s);
    let diagonal = w.at(0, 1) == S::zero() && w.at(1, 0) == S::zero();
    let hyperbolic = j_hat.hyperbolic();
    let mut left_ops: Vec<PlaneOp<S>> = Vec::with_capacity(4);
    let mut right_ops: Vec<PlaneOp<S>> = Vec::with_capacity(2);

    // Column pivot.
    let norm1 = fp::hypot2(w.at(0, 0).abs(), w.at(1, 0).abs());
    let norm2 = fp::hypot2(w.at(0, 1).abs(), w.at(1, 1).abs());
    let col_swapped = norm1 < norm2;
    if col_swapped {
        w.swap_cols();
        right_ops.push(PlaneOp::Swap);
    }

    // Row phases: the first column becomes its magnitudes exactly; the
    // second column picks the phases up by multiplication.
    let a11 = w.at(0, 0).abs();
    let a21 = w.at(1, 0).abs();
    let f1 = S::phase_conj(w.at(0, 0).polar());
    let f2 = S::phase_conj(w.at(1, 0).polar());
    if f1 != S::one() || f2 != S::one() {
        w.set(0, 1, S::mul(f1, w.at(0, 1)));
        w.set(1, 1, S::mul(f2, w.at(1, 1)));
        left_ops.push(PlaneOp::Phase { f_p: f1, f_q: f2 });
    }
    w.set(0, 0, S::from_re(a11));
    w.set(1, 0, S::from_re(a21));

    // Row pivot, comparing the now-real first column.
    let row_swapped = w.at(0, 0).re() < w.at(1, 0).re();
    if row_swapped {
        w.swap_rows();
        left_ops.push(PlaneOp::Swap);
    }

    // One real Givens rotation annihilates the (2,1) entry; the pivots put
    // its tangent in [0, 1].  A diagonal pivot needs no rotation at all.
    if !diagonal {
        let g11 = w.at(0, 0).re();
        let g21 = w.at(1, 0).re();
        let tan = g21 / g11;
        if tan != 0.0 {
            let sec = fp::fma(tan, tan, 1.0).sqrt();
            let t11 = fp::fma(tan, g21, g11) / sec;
            let op = PlaneOp::Rot { tan, sec };
            let (b1, b2) = apply_op(&op, w.at(0, 1), w.at(1, 1));
            w.set(0, 0, S::from_re(t11));
            w.set(0, 1, b1);
            w.set(1, 1, b2);
            left_ops.push(op);
        }
        w.set(1, 0, S::zero());
    }

    if hyperbolic && col_swapped {
        // Swap the columns back — cancelling the pivot swap, the only right
        // transform so far — and swap the rows; the working matrix turns
        // lower triangular and the accumulated right factor is again
        // compatible with the mixed signs.
        w.swap_cols();
        let cancelled = right_ops.pop();
        debug_assert!(matches!(cancelled, Some(PlaneOp::Swap)));
        w.swap_rows();
        left_ops.push(PlaneOp::Swap);

        // Phase the (2,1) entry real non-negative from the right; a
        // diagonal phase commutes with any sign matrix, so J-unitarity is
        // kept.  Then phase the (1,1) entry from the left.
        let z = w.at(1, 0);
        let a = z.abs();
        let f = S::phase_conj(z.polar());
        if f != S::one() {
            w.set(0, 0, S::mul(f, w.at(0, 0)));
            right_ops.push(PlaneOp::Phase { f_p: f, f_q: S::one() });
        }
        w.set(1, 0, S::from_re(a));

        let z = w.at(0, 0);
        let a = z.abs();
        let f = S::phase_conj(z.polar());
        if f != S::one() {
            left_ops.push(PlaneOp::Phase { f_p: f, f_q: S::one() });
        }
        w.set(0, 0, S::from_re(a));
    } else {
        // Phase the (1,2) entry real non-negative from the right, then the
        // (2,2) entry from the left.
        let z = w.at(0, 1);
        let a = z.abs();
        let f = S::phase_conj(z.polar());
        if f != S::one() {
            w.set(1, 1, S::mul(f, w.at(1, 1)));
            right_ops.push(PlaneOp::Phase { f_p: S::one(), f_q: f });
        }
        w.set(0, 1, S::from_re(a));

        let z = w.at(1, 1);
        let a = z.abs();
        let f = S::phase_conj(z.polar());
        if f != S::one() {
            left_ops.push(PlaneOp::Phase { f_p: S::one(), f_q: f });
        }
        w.set(1, 1, S::from_re(a));
    }

    let t = [
        [w.at(0, 0).re(), w.at(0, 1).re()],
        [w.at(1, 0).re(), w.at(1, 1).re()],
    ];
    Utv2 {
        t,
        s,
        diagonal,
        hyperbolic,
        col_swapped,
        row_swapped,
        left_ops,
        right_ops,
    }
}

/// Safely multiplies the diagonalized values by `2^{-s}` and the rotation
/// quotient `f ∈ [1, Ω/4]`: returns `(2^{-s}·d1·f, 2^{-s}·d2/f)` without
/// intermediate overflow.
///
/// When the upscaling `2^{-s}` is too large to fold into `f` directly, the
/// excess `ξ` is peeled off onto `d1`, which may round (or even flush) in
/// the subnormal range — unavoidable if scaling is to be transparent.
pub fn backscale(s: i32, d1: f64, d2: f64, f: f64) -> (f64, f64) {
    let delta = fp::exponent(f) - fp::MU;
    let (f_prime, xi) = if s > delta {
        (fp::scale(f, -delta), s - delta)
    } else {
        (fp::scale(f, -s), 0)
    };
    (fp::scale(d1, -xi) * f_prime, fp::scale(d2 / f, -s))
}

/// The rotation parameters produced by the triangular kernels.
///
/// The left rotation is always trigonometric with `0 ≤ |tan φ| < 1` and
/// `sec φ = √(1 + tan²φ)`.  The right rotation is trigonometric
/// (`tan ψ ∈ [0, √2]`, `sec ψ ∈ [1, √3]`) when the signs agree and
/// hyperbolic (`|tanh ψ| < υ`, `sech ψ = √(1 − tanh²ψ) ∈ (0, 1]`) when they
/// differ.  `x` and `y` are the off-diagonal and trailing-diagonal entries
/// of `T` divided by the leading entry, kept for diagnostics and tests.
#[derive(Clone, Copy, Debug)]
pub struct Rot2 {
    pub tan_phi: f64,
    pub sec_phi: f64,
    pub tanh_or_tan_psi: f64,
    pub sec_or_sech_psi: f64,
    pub x: f64,
    pub y: f64,
}

/// Diagonalizes an upper triangular `T` when the signs agree: ordinary SVD.
///
/// Returns the rotation pair and the backscaled singular values, which come
/// out ordered `σ'₁₁ ≥ σ'₂₂ ≥ 0`.  Total: `T = 0` yields zero values with
/// identity rotations.
pub fn svd2_trig<S: Scalar>(utv: &Utv2<S>) -> (Rot2, f64, f64) {
    let t11 = utv.t[0][0];
    // MAX absorbs the 0/0 of a zero T.
    let x = fp::max_nan(utv.t[0][1] / t11, 0.0);
    let y = fp::max_nan(utv.t[1][1] / t11, 0.0);
    let num = (2.0 * x.min(y)) * x.max(y);
    let den = fp::fma(x - y, x + y, 1.0);
    let tan2 = fp::min_nan(fp::max_nan(num / den, 0.0), fp::ALPHA);
    let tan_phi = tan2 / (1.0 + fp::fma(tan2, tan2, 1.0).sqrt());
    let sec_phi = fp::fma(tan_phi, tan_phi, 1.0).sqrt();
    let tan_psi = fp::fma(y, tan_phi, x);
    let sec_psi = fp::fma(tan_psi, tan_psi, 1.0).sqrt();
    let (s11, s22) = backscale(utv.s, t11, utv.t[1][1], sec_psi / sec_phi);
    let rot = Rot2 {
        tan_phi,
        sec_phi,
        tanh_or_tan_psi: tan_psi,
        sec_or_sech_psi: sec_psi,
        x,
        y,
    };
    (rot, s11, s22)
}

/// Diagonalizes an upper triangular `T` when the signs differ.
///
/// The left rotation tangent is non-positive here; the right factor is
/// hyperbolic.  Returns `None` — the decomposition does not exist or is
/// unsafe — when `|tanh ψ| ≥ upsilon`, which for `upsilon = 1` happens
/// exactly when the columns of the pivot are parallel with equal norms.
pub fn hsvd2_upper<S: Scalar>(utv: &Utv2<S>, upsilon: f64) -> Option<(Rot2, f64, f64)> {
    let t11 = utv.t[0][0];
    let x = fp::max_nan(utv.t[0][1] / t11, 0.0);
    let y = fp::max_nan(utv.t[1][1] / t11, 0.0);
    let num = (2.0 * x.min(y)) * x.max(y);
    let den = fp::fma(y - x, y + x, 1.0);
    let tan2 = -fp::min_nan(fp::max_nan(num / den, 0.0), fp::ALPHA);
    let tan_phi = tan2 / (1.0 + fp::fma(tan2, tan2, 1.0).sqrt());
    let tanh_psi = -fp::fma(y, tan_phi, x);
    if tanh_psi.abs() >= upsilon {
        return None;
    }
    let sec_phi = fp::fma(tan_phi, tan_phi, 1.0).sqrt();
    let sech_psi = fp::fma(-tanh_psi, tanh_psi, 1.0).sqrt();
    // The backscale argument order is deliberately swapped: the leading
    // value shrinks by f = sec φ/sech ψ ≥ 1 while the trailing one grows.
    let (s22, s11) = backscale(utv.s, utv.t[1][1], t11, sec_phi / sech_psi);
    let rot = Rot2 {
        tan_phi,
        sec_phi,
        tanh_or_tan_psi: tanh_psi,
        sec_or_sech_psi: sech_psi,
        x,
        y,
    };
    Some((rot, s11, s22))
}

/// Diagonalizes a lower triangular `T` (mixed signs after a column swap).
///
/// Mirror image of [`hsvd2_upper`]: the left tangent is non-negative, the
/// ratios are taken against the trailing entry, and the grown/shrunk roles
/// of the two values are exchanged.
pub fn hsvd2_lower<S: Scalar>(utv: &Utv2<S>, upsilon: f64) -> Option<(Rot2, f64, f64)> {
    let t22 = utv.t[1][1];
    let x = fp::max_nan(utv.t[1][0] / t22, 0.0);
    let y = fp::max_nan(utv.t[0][0] / t22, 0.0);
    let num = (2.0 * x.min(y)) * x.max(y);
    let den = fp::fma(y - x, y + x, 1.0);
    let tan2 = fp::min_nan(fp::max_nan(num / den, 0.0), fp::ALPHA);
    let tan_phi = tan2 / (1.0 + fp::fma(tan2, tan2, 1.0).sqrt());
    let tanh_psi = fp::fma(y, tan_phi, -x);
    if tanh_psi.abs() >= upsilon {
        return None;
    }
    let sec_phi = fp::fma(tan_phi, tan_phi, 1.0).sqrt();
    let sech_psi = fp::fma(-tanh_psi, tanh_psi, 1.0).sqrt();
    let (s11, s22) = backscale(utv.s, utv.t[0][0], t22, sec_phi / sech_psi);
    let rot = Rot2 {
        tan_phi,
        sec_phi,
        tanh_or_tan_psi: tanh_psi,
        sec_or_sech_psi: sech_psi,
        x,
        y,
    };
    Some((rot, s11, s22))
}

/// The assembled 2×2 hyperbolic SVD.
#[derive(Clone, Debug)]
pub struct Hsvd2Result<S> {
    /// Dense left factor `Û*` (unitary).
    pub u_star: Mat2<S>,
    /// Dense right factor `V̂` (`Ĵ`-unitary).
    pub v: Mat2<S>,
    /// Leading hyperbolic singular value (position `p`).
    pub sigma_pp: f64,
    /// Trailing hyperbolic singular value (position `q`).
    pub sigma_qq: f64,
    /// False when the hyperbolic transformation does not exist or exceeds
    /// the safety bound; the factors are identities and the values NaN.
    pub defined: bool,
    /// The prescaled pivot was diagonal (step classification input).
    pub was_diagonal: bool,
    /// `Û* = I` exactly; applying `left_ops` is then a bitwise no-op.
    pub u_is_identity: bool,
    /// `V̂ = I` exactly; applying `right_ops` is then a bitwise no-op.
    pub v_is_identity: bool,
    /// Left factor in factored form, innermost first.
    pub left_ops: Vec<PlaneOp<S>>,
    /// Right factor in factored form, innermost first.
    pub right_ops: Vec<PlaneOp<S>>,
    /// Rotation parameters of the diagonalizing step, when one was taken.
    pub rot: Option<Rot2>,
}

/// Computes the full 2×2 hyperbolic SVD `Û* Ĝ V̂ = diag(σ_pp, σ_qq)`.
///
/// Dispatch over the triangular factor, in order: an already diagonal `T`
/// needs at most a swap to respect the ordering; agreeing signs take the
/// trigonometric kernel (with both values and factors swapped when the
/// signs are both negative, so the ordering flips to non-decreasing);
/// differing signs take the upper or lower hyperbolic kernel according to
/// the pipeline taken.  The ordering contract: `σ_pp ≥ σ_qq` when both
/// signs are `+`, `σ_pp ≤ σ_qq` when both are `−`, and no constraint on a
/// mixed pair.
pub fn hsvd2<S: Scalar>(g_hat: &Mat2<S>, j_hat: SignPair, upsilon: f64) -> Hsvd2Result<S> {
    let mut utv = jutv2(g_hat, j_hat);
    let mut left_ops = std::mem::take(&mut utv.left_ops);
    let mut right_ops = std::mem::take(&mut utv.right_ops);
    let t = utv.t;
    let t_diagonal = t[0][1] == 0.0 && t[1][0] == 0.0;

    let mut rot = None;
    let mut defined = true;
    let (sigma_pp, sigma_qq);
    if t_diagonal {
        // Only a same-sign pair constrains the order of the two values.
        let misordered = !utv.hyperbolic
            && ((j_hat.j_pp > 0 && t[0][0] < t[1][1]) || (j_hat.j_pp < 0 && t[0][0] > t[1][1]));
        if misordered {
            left_ops.push(PlaneOp::Swap);
            right_ops.push(PlaneOp::Swap);
            let (a, b) = backscale(utv.s, t[1][1], t[0][0], 1.0);
            sigma_pp = a;
            sigma_qq = b;
        } else {
            let (a, b) = backscale(utv.s, t[0][0], t[1][1], 1.0);
            sigma_pp = a;
            sigma_qq = b;
        }
    } else if !utv.hyperbolic {
        let (r, s11, s22) = svd2_trig(&utv);
        if r.tan_phi != 0.0 {
            left_ops.push(PlaneOp::Rot {
                tan: r.tan_phi,
                sec: r.sec_phi,
            });
        }
        if r.tanh_or_tan_psi != 0.0 {
            right_ops.push(PlaneOp::Rot {
                tan: r.tanh_or_tan_psi,
                sec: r.sec_or_sech_psi,
            });
        }
        if j_hat.j_pp > 0 {
            sigma_pp = s11;
            sigma_qq = s22;
        } else {
            // Both signs negative: swap so the values come out ascending.
            left_ops.push(PlaneOp::Swap);
            right_ops.push(PlaneOp::Swap);
            sigma_pp = s22;
            sigma_qq = s11;
        }
        rot = Some(r);
    } else {
        let kernel = if utv.col_swapped {
            hsvd2_lower(&utv, upsilon)
        } else {
            hsvd2_upper(&utv, upsilon)
        };
        match kernel {
            Some((r, s11, s22)) => {
                if r.tan_phi != 0.0 {
                    left_ops.push(PlaneOp::Rot {
                        tan: r.tan_phi,
                        sec: r.sec_phi,
                    });
                }
                if r.tanh_or_tan_psi != 0.0 {
                    right_ops.push(PlaneOp::HypRot {
                        tanh: r.tanh_or_tan_psi,
                        sech: r.sec_or_sech_psi,
                    });
                }
                sigma_pp = s11;
                sigma_qq = s22;
                rot = Some(r);
            }
            None => {
                defined = false;
                sigma_pp = f64::NAN;
                sigma_qq = f64::NAN;
                left_ops.clear();
                right_ops.clear();
            }
        }
    }

    let u_star = dense_left(&left_ops);
    let v = dense_right(&right_ops);
    let identity = Mat2::<S>::identity();
    Hsvd2Result {
        u_is_identity: u_star == identity,
        v_is_identity: v == identity,
        u_star,
        v,
        sigma_pp,
        sigma_qq,
        defined,
        was_diagonal: utv.diagonal,
        left_ops,
        right_ops,
        rot,
    }
}
