//! Double-double ("compensated") arithmetic.
//!
//! A [`Dd`] value represents a real number as an unevaluated sum `hi + lo`
//! of two binary64 numbers with `|lo| <= ulp(hi)/2`, giving roughly 32
//! significant decimal digits.  The weight bookkeeping of the iteration and
//! all residual/eigenvalue checks of the test harness accumulate in this
//! format so that the comparisons they feed are not polluted by the very
//! rounding errors they are trying to measure.
//!
//! The error-free transformations (`two_sum`, `two_prod`) and the derived
//! operations are the classical Dekker/Knuth formulas; products lean on the
//! hardware fused multiply-add.

/// An unevaluated, normalized sum of two binary64 values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Error-free sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e`
/// exactly (Knuth's branch-free variant).
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|` (Dekker's fast variant).
#[inline]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product: returns `(p, e)` with `p = fl(a * b)` and
/// `a * b = p + e` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(a: f64) -> Dd {
        Dd { hi: a, lo: 0.0 }
    }

    /// Exact product of two binary64 values.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    /// Exact sum of two binary64 values.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    /// Rounds back to binary64.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, rhs: Dd) -> Dd {
        let (s1, e1) = two_sum(self.hi, rhs.hi);
        let (s2, e2) = two_sum(self.lo, rhs.lo);
        let (s1, t) = quick_two_sum(s1, e1 + s2);
        let (hi, lo) = quick_two_sum(s1, t + e2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, rhs: f64) -> Dd {
        self.add(Dd::from_f64(rhs))
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, rhs: f64) -> Dd {
        let (p, e) = two_prod(self.hi, rhs);
        let e = e + self.lo * rhs;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q2));
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }

    /// Square root by one Newton correction of the binary64 value.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        // x1 = x + (a - x^2) / (2x)
        let d = self.sub(Dd::from_prod(x, x));
        let corr = d.hi / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, corr);
        Dd { hi, lo }
    }

    /// Comparison on the represented real value.
    pub fn cmp_val(self, rhs: Dd) -> std::cmp::Ordering {
        let d = self.sub(rhs);
        let v = d.hi + d.lo;
        if v < 0.0 {
            std::cmp::Ordering::Less
        } else if v > 0.0 {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }
}

/// Complex number with double-double components, used by the generator and
/// the residual checks of the test harness.
#[derive(Clone, Copy, Debug)]
pub struct DdC {
    pub re: Dd,
    pub im: Dd,
}

impl DdC {
    pub const ZERO: DdC = DdC {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    #[inline]
    pub fn new(re: f64, im: f64) -> DdC {
        DdC {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    #[inline]
    pub fn conj(self) -> DdC {
        DdC {
            re: self.re,
            im: self.im.neg(),
        }
    }

    #[inline]
    pub fn add(self, rhs: DdC) -> DdC {
        DdC {
            re: self.re.add(rhs.re),
            im: self.im.add(rhs.im),
        }
    }

    #[inline]
    pub fn sub(self, rhs: DdC) -> DdC {
        DdC {
            re: self.re.sub(rhs.re),
            im: self.im.sub(rhs.im),
        }
    }

    pub fn mul(self, rhs: DdC) -> DdC {
        DdC {
            re: self.re.mul(rhs.re).sub(self.im.mul(rhs.im)),
            im: self.re.mul(rhs.im).add(self.im.mul(rhs.re)),
        }
    }

    #[inline]
    pub fn scale(self, s: Dd) -> DdC {
        DdC {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    /// Squared modulus.
    #[inline]
    pub fn norm_sq(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_recovers_exact_error() {
        let a = 1.0;
        let b = 2f64.powi(-60);
        let (s, e) = two_sum(a, b);
        assert_eq!(s, 1.0);
        assert_eq!(e, b);
    }

    #[test]
    fn two_prod_recovers_exact_error() {
        let a = 1.0 + 2f64.powi(-30);
        let (p, e) = two_prod(a, a);
        // a^2 = 1 + 2^-29 + 2^-60 exactly; the tail cannot fit in one double.
        assert_eq!(p + e, a * a);
        assert_ne!(e, 0.0);
        assert_eq!(e, 2f64.powi(-60));
    }

    #[test]
    fn dd_sum_tracks_tiny_terms() {
        let mut acc = Dd::ZERO;
        for _ in 0..1_000_000 {
            acc = acc.add_f64(0.1);
        }
        // 0.1 is not exact in binary64, but the accumulated value must agree
        // with 10^5 times the binary64 value of 0.1 to double-double accuracy.
        let expect = Dd::from_f64(0.1).mul_f64(1_000_000.0);
        let diff = acc.sub(expect).to_f64().abs();
        assert!(diff < 1e-22, "diff = {diff:e}");
    }

    #[test]
    fn dd_div_and_sqrt_roundtrip() {
        let a = Dd::from_f64(2.0);
        let r = a.sqrt();
        let back = r.mul(r).sub(a).to_f64().abs();
        assert!(back < 1e-30, "sqrt residual {back:e}");
        let q = Dd::ONE.div(Dd::from_f64(3.0));
        let back = q.mul_f64(3.0).sub(Dd::ONE).to_f64().abs();
        assert!(back < 1e-30, "div residual {back:e}");
    }

    #[test]
    fn ddc_mul_matches_hand_expansion() {
        let a = DdC::new(3.0, 4.0);
        let b = DdC::new(-2.0, 5.0);
        let p = a.mul(b);
        assert_eq!(p.re.to_f64(), -26.0);
        assert_eq!(p.im.to_f64(), 7.0);
    }
}
