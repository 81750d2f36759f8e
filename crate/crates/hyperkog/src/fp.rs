//! Binary64 floating-point groundwork shared by every other module.
//!
//! Everything here is written against one fixed exponent convention:
//! `exponent(a)` is the integer `e` with `|a| in [2^(e-1), 2^e)`, and
//! `exponent(0) = 0`.  Subnormal magnitudes are normalized first, so the
//! convention extends all the way down to the smallest positive value.
//!
//! The rest of the crate relies on three reproducibility guarantees
//! established here:
//!
//! * every operation is a correctly rounded IEEE-754 operation (add, sub,
//!   mul, div, sqrt, fused multiply-add) or exact exponent manipulation,
//!   so results are identical on every conforming platform;
//! * `hypot2` is this crate's only Euclidean norm of a pair — the platform
//!   `hypot` is never called, because its rounding differs between libms;
//! * divisions are kept as divisions; no `a * (1.0 / b)` rewriting.

/// Fixed binary64 parameters under the exponent convention above.
#[derive(Clone, Copy, Debug)]
pub struct FpConstants {
    /// Largest finite value `Ω`.
    pub omega: f64,
    /// Smallest positive (subnormal) value `ω`.
    pub omega_sub: f64,
    /// Smallest positive normal value.
    pub omega_norm: f64,
    /// `2^-53`, half the distance between 1 and its successor.
    pub eps: f64,
    /// `exponent(Ω)`.
    pub nu: i32,
    /// `exponent` of the smallest positive normal value.
    pub mu: i32,
    /// `sqrt(Ω)`, the clamp applied to double-angle tangents.
    pub alpha: f64,
}

/// Largest finite binary64 value.
pub const OMEGA: f64 = f64::MAX;
/// Smallest positive binary64 value (subnormal), `2^-1074`.
pub const OMEGA_SUB: f64 = 4.9406564584124654e-324;
/// Smallest positive normal binary64 value, `2^-1022`.
pub const OMEGA_NORM: f64 = 2.2250738585072014e-308;
/// `2^-53`.
pub const EPS: f64 = 1.1102230246251565e-16;
/// `exponent(OMEGA)`.
pub const NU: i32 = 1024;
/// `exponent(OMEGA_NORM)`.
pub const MU: i32 = -1021;
/// `sqrt(OMEGA)` rounded to binary64.
pub const ALPHA: f64 = 1.3407807929942596e154;

impl FpConstants {
    pub const fn binary64() -> FpConstants {
        FpConstants {
            omega: OMEGA,
            omega_sub: OMEGA_SUB,
            omega_norm: OMEGA_NORM,
            eps: EPS,
            nu: NU,
            mu: MU,
            alpha: ALPHA,
        }
    }
}

/// The exponent `e` with `|a| in [2^(e-1), 2^e)`; `exponent(0) = 0`.
///
/// Subnormal values are normalized, e.g. `exponent(OMEGA_SUB) = -1073`.
#[inline]
pub fn exponent(a: f64) -> i32 {
    libm::frexp(a).1
}

/// Multiplies by `2^s` with a single rounding, for any `i32` exponent.
///
/// Exact whenever the result is normal; a subnormal result is rounded once
/// (ties to even) and may flush to zero.
#[inline]
pub fn scale(a: f64, s: i32) -> f64 {
    libm::scalbn(a, s)
}

/// How far `a` can be scaled up without its magnitude passing `Ω/4`:
/// `chi(a) = nu - exponent(max(|a|, OMEGA_SUB)) - 2`.
#[inline]
pub fn chi(a: f64) -> i32 {
    NU - exponent(a.abs().max(OMEGA_SUB)) - 2
}

/// `min` that ignores NaN: if exactly one argument is NaN the other is
/// returned.  (This is what lets `0/0` ratios fall through to a harmless
/// branch in the polar factors and the tangent formulas.)
#[inline]
pub fn min_nan(a: f64, b: f64) -> f64 {
    a.min(b)
}

/// `max` counterpart of [`min_nan`].
#[inline]
pub fn max_nan(a: f64, b: f64) -> f64 {
    a.max(b)
}

/// Correctly rounded fused multiply-add on binary64.
#[inline]
pub fn fma(a: f64, b: f64, c: f64) -> f64 {
    a.mul_add(b, c)
}

/// `sqrt(x^2 + y^2)` computed in-repo, within 2 ulp.
///
/// The larger magnitude is scaled into `[1/2, 1)` by an exact power of two,
/// the smaller by the same power, and the result is one fused
/// multiply-add, one square root and the inverse scaling.  Guarantees:
///
/// * never overflows when the exact result is finite;
/// * `hypot2(x, y) == 0` if and only if `x == 0 && y == 0`;
/// * symmetric in its arguments and in their signs;
/// * identical bit patterns for identical inputs on all platforms.
pub fn hypot2(x: f64, y: f64) -> f64 {
    let ax = x.abs();
    let ay = y.abs();
    let (big, small) = if ax >= ay { (ax, ay) } else { (ay, ax) };
    if big == 0.0 {
        return 0.0;
    }
    if big == f64::INFINITY {
        return f64::INFINITY;
    }
    let e = exponent(big);
    let b = scale(big, -e);
    let s = scale(small, -e);
    // b in [1/2, 1), 0 <= s <= b: the sum of squares stays in [1/4, 2).
    scale(fma(b, b, s * s).sqrt(), e)
}

/// Unit-modulus polar factors of a (prescaled) value: `z = |z| (cos + i sin)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarForm {
    pub cos_arg: f64,
    pub sin_arg: f64,
}

/// Polar factors from real and imaginary parts, safe for zero input.
///
/// `cos_arg = min(|re| / |z|, 1) * sign(re)` — the NaN-ignoring `min` turns
/// the `0/0` of a zero input into `1` — and `sin_arg = im / max(|z|, ω)`
/// never divides by zero.  A zero input therefore yields `(1, 0)` (with the
/// sign of `cos_arg` following the sign bit of `re`).
pub fn polar_factors_parts(re: f64, im: f64, abs: f64) -> PolarForm {
    let cos_arg = min_nan(re.abs() / abs, 1.0).copysign(re);
    let sin_arg = im / max_nan(abs, OMEGA_SUB);
    PolarForm { cos_arg, sin_arg }
}
