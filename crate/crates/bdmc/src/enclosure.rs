//! Directed-rounding interval arithmetic.
//!
//! An [`Enclosure`] is a closed interval `[lo, hi]` of doubles that is
//! guaranteed to contain the exact real value of the computation that
//! produced it. IEEE-754 hardware rounds to nearest, and switching the
//! rounding mode is neither portable nor compiler-safe, so directed
//! rounding is recovered after the fact:
//!
//! * for `+`, `-` and `*` the rounding error of the primitive operation is
//!   itself a representable double (Knuth's two-sum, and the FMA residual
//!   `fma(a, b, -p)`); its sign tells exactly whether the rounded result
//!   sits above or below the real one, and a single [`f64::next_up`] /
//!   [`f64::next_down`] step lands on the true directed rounding;
//! * for `/` the FMA residual of the candidate quotient gives the same
//!   information;
//! * where the residual itself could be swallowed by underflow the code
//!   steps outward unconditionally, which is always sound and costs one ulp
//!   of slack.
//!
//! The result is the tightest representable interval each operation can
//! produce, typically a fraction of an ulp wider than the real range. The
//! certificates in [`crate::certify`] record this strategy as the rounding
//! mode string `"ulp-outward"`.

/// Magnitudes below this are treated as potentially subnormal: the
/// error-free transformations are no longer exact there, so the code falls
/// back to an unconditional one-ulp outward step.
const EFT_SAFE: f64 = 1e-290;

/// Rounding-mode tag recorded in certificates.
pub const ROUNDING_MODE: &str = "ulp-outward";

/// `a + b` rounded toward minus infinity.
#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    // Two-sum: the exact sum is s + err.
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err < 0.0 {
        s.next_down()
    } else {
        s
    }
}

/// `a + b` rounded toward plus infinity.
#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// `a - b` rounded toward minus infinity.
#[inline]
pub(crate) fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

/// `a - b` rounded toward plus infinity.
#[inline]
pub(crate) fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// `a * b` rounded toward minus infinity.
#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    if p.abs() < EFT_SAFE && p != 0.0 {
        return p.next_down();
    }
    if p == 0.0 && (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    // FMA residual: the exact product is p + err.
    let err = a.mul_add(b, -p);
    if err < 0.0 {
        p.next_down()
    } else {
        p
    }
}

/// `a * b` rounded toward plus infinity.
#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    if p.abs() < EFT_SAFE && p != 0.0 {
        return p.next_up();
    }
    if p == 0.0 && (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    let err = a.mul_add(b, -p);
    if err > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// `a / b` rounded toward minus infinity.
#[inline]
pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return q;
    }
    if a == 0.0 {
        return 0.0;
    }
    if q.abs() < EFT_SAFE || a.abs() < EFT_SAFE {
        return q.next_down();
    }
    // residual = q*b - a exactly; a/b = q - residual/b.
    let residual = q.mul_add(b, -a);
    if residual == 0.0 {
        q
    } else if (residual > 0.0) == (b > 0.0) {
        // residual/b > 0, so the true quotient lies below q.
        q.next_down()
    } else {
        q
    }
}

/// `a / b` rounded toward plus infinity.
#[inline]
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return q;
    }
    if a == 0.0 {
        return 0.0;
    }
    if q.abs() < EFT_SAFE || a.abs() < EFT_SAFE {
        return q.next_up();
    }
    let residual = q.mul_add(b, -a);
    if residual != 0.0 && (residual > 0.0) != (b > 0.0) {
        // residual/b < 0, so the true quotient lies above q.
        q.next_up()
    } else {
        q
    }
}

/// A closed interval of doubles containing an exact real value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure {
    lo: f64,
    hi: f64,
}

impl Enclosure {
    /// The degenerate enclosure of an exactly representable value.
    #[inline]
    pub fn exact(x: f64) -> Self {
        debug_assert!(x.is_finite());
        Enclosure { lo: x, hi: x }
    }

    /// An enclosure from explicit bounds. Panics if `lo > hi` or either
    /// bound is not finite; this is an internal construction error, not an
    /// input error.
    #[inline]
    pub fn from_bounds(lo: f64, hi: f64) -> Self {
        assert!(lo.is_finite() && hi.is_finite() && lo <= hi, "bad enclosure [{lo}, {hi}]");
        Enclosure { lo, hi }
    }

    /// The one-ulp-each-way enclosure of a value known to within half an
    /// ulp (for example a correctly rounded constant of unknown direction).
    #[inline]
    pub fn around(x: f64) -> Self {
        Enclosure {
            lo: x.next_down(),
            hi: x.next_up(),
        }
    }

    /// Lower bound.
    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    /// Upper bound.
    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    /// `hi - lo`, rounded up.
    #[inline]
    pub fn width(self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Whether `x` lies inside the interval.
    #[inline]
    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

}

impl std::fmt::Display for Enclosure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

/// Interval sum.
impl std::ops::Add for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn add(self, rhs: Enclosure) -> Enclosure {
        Enclosure {
            lo: add_down(self.lo, rhs.lo),
            hi: add_up(self.hi, rhs.hi),
        }
    }
}

/// Interval difference.
impl std::ops::Sub for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn sub(self, rhs: Enclosure) -> Enclosure {
        Enclosure {
            lo: sub_down(self.lo, rhs.hi),
            hi: sub_up(self.hi, rhs.lo),
        }
    }
}

/// Interval product (sign-general: extremes over the four corner
/// products).
impl std::ops::Mul for Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: Enclosure) -> Enclosure {
        let lo = mul_down(self.lo, rhs.lo)
            .min(mul_down(self.lo, rhs.hi))
            .min(mul_down(self.hi, rhs.lo))
            .min(mul_down(self.hi, rhs.hi));
        let hi = mul_up(self.lo, rhs.lo)
            .max(mul_up(self.lo, rhs.hi))
            .max(mul_up(self.hi, rhs.lo))
            .max(mul_up(self.hi, rhs.hi));
        Enclosure { lo, hi }
    }
}

/// Interval quotient. The divisor must not straddle zero.
impl std::ops::Div for Enclosure {
    type Output = Enclosure;
    fn div(self, rhs: Enclosure) -> Enclosure {
        assert!(
            rhs.lo > 0.0 || rhs.hi < 0.0,
            "division by an interval containing zero: [{}, {}]",
            rhs.lo,
            rhs.hi
        );
        let lo = div_down(self.lo, rhs.lo)
            .min(div_down(self.lo, rhs.hi))
            .min(div_down(self.hi, rhs.lo))
            .min(div_down(self.hi, rhs.hi));
        let hi = div_up(self.lo, rhs.lo)
            .max(div_up(self.lo, rhs.hi))
            .max(div_up(self.hi, rhs.lo))
            .max(div_up(self.hi, rhs.hi));
        Enclosure { lo, hi }
    }
}
