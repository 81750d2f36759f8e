//! The element types the decomposition works over: `f64` and [`C64`].
//!
//! All arithmetic used in numeric paths goes through the [`Scalar`] trait so
//! that the complex operations are exactly the fused multiply-add forms the
//! kernels are specified with.  The complex type is deliberately not a
//! re-export of a general-purpose complex library: its `*` and `+` operators
//! would bypass the fused forms and silently change rounding.

use crate::fp::{self, PolarForm};

/// Complex binary64 value.  Arithmetic is provided through [`Scalar`] only.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    #[inline]
    pub const fn new(re: f64, im: f64) -> C64 {
        C64 { re, im }
    }
}

/// A real or complex binary64 element.
///
/// `mul_add(a, b, c) = a * b + c` is the complex fused multiply-add: each
/// component of the result is one or two hardware fused multiply-adds, with
/// specializations when `a` is real (`im == 0`) or purely imaginary
/// (`re == 0`), so real data flowing through the complex path rounds exactly
/// like the real path.
pub trait Scalar: Copy + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_re(re: f64) -> Self;
    fn from_parts(re: f64, im: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;
    fn neg(self) -> Self;
    fn is_finite(self) -> bool;

    /// Magnitude; for complex values this is [`fp::hypot2`] of the parts.
    fn abs(self) -> f64;

    /// Fused `a * b + c`.
    fn mul_add(a: Self, b: Self, c: Self) -> Self;

    /// Product `a * b` (the `c = 0` simplification of [`Scalar::mul_add`]).
    fn mul(a: Self, b: Self) -> Self;

    /// Componentwise division by a positive real.
    fn div_re(self, d: f64) -> Self;

    /// Componentwise multiplication by `2^s` (see [`fp::scale`]).
    fn scale_pow2(self, s: i32) -> Self;

    /// Unit polar factors of `self` (see [`fp::polar_factors_parts`]).
    fn polar(self) -> PolarForm;

    /// The unit scalar `cos - i sin`, used to rotate a value onto the
    /// non-negative real axis.
    fn phase_conj(p: PolarForm) -> Self;

    /// True when the value is real and non-negative (`-0.0` counts as zero).
    #[inline]
    fn is_real_nonneg(self) -> bool {
        self.im() == 0.0 && self.re() >= 0.0
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn zero() -> f64 {
        0.0
    }
    #[inline]
    fn one() -> f64 {
        1.0
    }
    #[inline]
    fn from_re(re: f64) -> f64 {
        re
    }
    #[inline]
    fn from_parts(re: f64, _im: f64) -> f64 {
        re
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conj(self) -> f64 {
        self
    }
    #[inline]
    fn neg(self) -> f64 {
        -self
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn mul_add(a: f64, b: f64, c: f64) -> f64 {
        fp::fma(a, b, c)
    }
    #[inline]
    fn mul(a: f64, b: f64) -> f64 {
        a * b
    }
    #[inline]
    fn div_re(self, d: f64) -> f64 {
        self / d
    }
    #[inline]
    fn scale_pow2(self, s: i32) -> f64 {
        fp::scale(self, s)
    }
    #[inline]
    fn polar(self) -> PolarForm {
        fp::polar_factors_parts(self, 0.0, f64::abs(self))
    }
    #[inline]
    fn phase_conj(p: PolarForm) -> f64 {
        p.cos_arg
    }
}

impl Scalar for C64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn zero() -> C64 {
        C64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }
    #[inline]
    fn from_re(re: f64) -> C64 {
        C64::new(re, 0.0)
    }
    #[inline]
    fn from_parts(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn conj(self) -> C64 {
        C64::new(self.re, -self.im)
    }
    #[inline]
    fn neg(self) -> C64 {
        C64::new(-self.re, -self.im)
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    #[inline]
    fn abs(self) -> f64 {
        fp::hypot2(self.re, self.im)
    }

    fn mul_add(a: C64, b: C64, c: C64) -> C64 {
        if a.im == 0.0 {
            // a real.
            C64::new(fp::fma(a.re, b.re, c.re), fp::fma(a.re, b.im, c.im))
        } else if a.re == 0.0 {
            // a purely imaginary.
            C64::new(fp::fma(-a.im, b.im, c.re), fp::fma(a.im, b.re, c.im))
        } else {
            C64::new(
                fp::fma(a.re, b.re, fp::fma(-a.im, b.im, c.re)),
                fp::fma(a.re, b.im, fp::fma(a.im, b.re, c.im)),
            )
        }
    }

    fn mul(a: C64, b: C64) -> C64 {
        if a.im == 0.0 {
            C64::new(a.re * b.re, a.re * b.im)
        } else if a.re == 0.0 {
            C64::new(-(a.im * b.im), a.im * b.re)
        } else {
            C64::new(
                fp::fma(a.re, b.re, -(a.im * b.im)),
                fp::fma(a.re, b.im, a.im * b.re),
            )
        }
    }

    #[inline]
    fn div_re(self, d: f64) -> C64 {
        C64::new(self.re / d, self.im / d)
    }

    #[inline]
    fn scale_pow2(self, s: i32) -> C64 {
        C64::new(fp::scale(self.re, s), fp::scale(self.im, s))
    }

    #[inline]
    fn polar(self) -> PolarForm {
        fp::polar_factors_parts(self.re, self.im, self.abs())
    }

    #[inline]
    fn phase_conj(p: PolarForm) -> C64 {
        C64::new(p.cos_arg, -p.sin_arg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::{Dd, DdC};
    use crate::fp::EPS;

    #[test]
    fn real_mul_add_is_single_rounding() {
        // fma(a, b, c) with a*b+c requiring the fused form.
        let a = 1.0 + 2f64.powi(-30);
        let c = -(a * a);
        let fused = <f64 as Scalar>::mul_add(a, a, c);
        assert_eq!(fused, 2f64.powi(-60));
    }

    #[test]
    fn complex_mul_add_specializations() {
        // i * i + 1 = 0 through the purely imaginary branch.
        let i = C64::new(0.0, 1.0);
        let r = <C64 as Scalar>::mul_add(i, i, C64::new(1.0, 0.0));
        assert_eq!(r, C64::new(0.0, 0.0));

        // Real `a` must reduce to two real fused multiply-adds exactly.
        let a = C64::new(3.0, 0.0);
        let b = C64::new(0.5, -2.0);
        let c = C64::new(0.25, 0.125);
        let r = <C64 as Scalar>::mul_add(a, b, c);
        assert_eq!(r, C64::new(fp::fma(3.0, 0.5, 0.25), fp::fma(3.0, -2.0, 0.125)));
    }

    #[test]
    fn complex_mul_add_against_compensated_oracle() {
        let mut state = 7u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..20_000 {
            let a = C64::new(next(), next());
            let b = C64::new(next(), next());
            let c = C64::new(next(), next());
            let got = <C64 as Scalar>::mul_add(a, b, c);
            let exact = DdC::new(a.re, a.im)
                .mul(DdC::new(b.re, b.im))
                .add(DdC::new(c.re, c.im));
            let dre = Dd::from_f64(got.re).sub(exact.re).to_f64().abs();
            let dim = Dd::from_f64(got.im).sub(exact.im).to_f64().abs();
            // Two roundings per component, each bounded by the magnitudes
            // of the summed terms (the result itself may cancel to zero).
            let scale_re = (a.re * b.re).abs() + (a.im * b.im).abs() + c.re.abs();
            let scale_im = (a.re * b.im).abs() + (a.im * b.re).abs() + c.im.abs();
            assert!(dre <= 2.0 * EPS * scale_re);
            assert!(dim <= 2.0 * EPS * scale_im);
        }
    }

    #[test]
    fn phase_conj_rotates_onto_real_axis() {
        let z = C64::new(3.0, 4.0);
        let f = C64::phase_conj(z.polar());
        let r = <C64 as Scalar>::mul(z, f);
        assert!((r.re - 5.0).abs() <= 8.0 * EPS * 5.0);
        assert!(r.im.abs() <= 8.0 * EPS * 5.0);
    }

    #[test]
    fn real_phase_is_a_sign() {
        assert_eq!(<f64 as Scalar>::phase_conj((-7.0f64).polar()), -1.0);
        assert_eq!(<f64 as Scalar>::phase_conj(7.0f64.polar()), 1.0);
        assert_eq!(<f64 as Scalar>::phase_conj(0.0f64.polar()), 1.0);
    }

    #[test]
    fn real_nonneg_predicate() {
        assert!(5.0f64.is_real_nonneg());
        assert!(0.0f64.is_real_nonneg());
        assert!((-0.0f64).is_real_nonneg());
        assert!(!(-1.0f64).is_real_nonneg());
        assert!(C64::new(2.0, 0.0).is_real_nonneg());
        assert!(!C64::new(2.0, 1e-300).is_real_nonneg());
        assert!(!C64::new(-2.0, 0.0).is_real_nonneg());
    }
}
