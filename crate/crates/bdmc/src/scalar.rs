//! Scalar functions on the unit interval.
//!
//! Everything here is elementary but tuned for accuracy at the edges of the
//! domain, where the naive formulas cancel catastrophically:
//!
//! * `v = sqrt(1 - u^2)` is always computed as `sqrt((1 - u)(1 + u))`,
//!   which keeps full precision near `u = 1`.
//! * `phi(u) = ent((1 - v) / 2)` is evaluated through the algebraically
//!   equal form `ent(u^2 / (2 (1 + v)))`, so that feeding `u = bh(q)` back
//!   in reproduces `ent(q)` to a few ulps instead of losing half the digits
//!   near `q = 1/2`.
//! * `atanh_nat` and the `phi` derivatives switch to truncated power series
//!   below [`V_SERIES_THRESHOLD`], where the closed forms subtract nearly
//!   equal quantities.
//!
//! Logarithms are binary throughout (`ent(1/2) = 1`), except for
//! [`atanh_nat`] which is the natural inverse hyperbolic tangent.

use crate::{Error, Result};

/// Closed-form/series switch point for `atanh_nat`, `phi_d1` and `phi_d2`,
/// expressed in terms of `v = sqrt(1 - u^2)`.
pub const V_SERIES_THRESHOLD: f64 = 0.25;

/// Power series terms are dropped once they fall below this value.
const SERIES_EPS: f64 = 1e-18;

/// `1 / (3 ln 2)`, the value of `phi''(1)`; nearest double, which sits just
/// below the true value.
pub(crate) const INV_3LN2: f64 = 0.480_898_346_962_987_8;

/// A floating-point number guaranteed to lie in `[0, 1]`.
///
/// The constructor is the only gate; every function taking a `UnitScalar`
/// may rely on the invariant without re-checking.
///
/// ```
/// use bdmc::UnitScalar;
/// let q = UnitScalar::new(0.3)?;
/// assert_eq!(q.get(), 0.3);
/// assert!(UnitScalar::new(1.2).is_err());
/// # Ok::<(), bdmc::Error>(())
/// ```
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UnitScalar(f64);

impl UnitScalar {
    /// Zero.
    pub const ZERO: UnitScalar = UnitScalar(0.0);
    /// One half.
    pub const HALF: UnitScalar = UnitScalar(0.5);
    /// One.
    pub const ONE: UnitScalar = UnitScalar(1.0);

    /// Validates `x` into the unit interval.
    pub fn new(x: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&x) {
            Ok(UnitScalar(x))
        } else {
            Err(Error::OutOfRange {
                name: "unit scalar",
                value: x,
                min: 0.0,
                max: 1.0,
            })
        }
    }

    /// Returns the underlying value.
    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for UnitScalar {
    type Error = Error;

    fn try_from(x: f64) -> Result<Self> {
        UnitScalar::new(x)
    }
}

impl From<UnitScalar> for f64 {
    fn from(x: UnitScalar) -> f64 {
        x.get()
    }
}

impl std::fmt::Display for UnitScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Binary entropy `ent(q) = -q log2 q - (1 - q) log2 (1 - q)`.
///
/// Endpoints return exactly 0 under the convention `0 log 0 = 0`, and the
/// result is clamped into `[0, 1]` (the raw sum can exceed 1 by an ulp near
/// `q = 1/2`).
///
/// ```
/// use bdmc::{scalar::ent, UnitScalar};
/// assert_eq!(ent(UnitScalar::HALF), 1.0);
/// assert!((ent(UnitScalar::new(0.11)?) - 0.499915958164528).abs() < 1e-15);
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn ent(q: UnitScalar) -> f64 {
    let q = q.get();
    if q == 0.0 || q == 1.0 {
        return 0.0;
    }
    // Reduce to m = min(q, 1 - q) <= 1/2. For q > 1/2 the subtraction is
    // exact (Sterbenz), and ln_1p keeps the large-side logarithm accurate
    // when m is tiny.
    let m = if q <= 0.5 { q } else { 1.0 - q };
    let h = -(m * m.ln() + (1.0 - m) * (-m).ln_1p()) / std::f64::consts::LN_2;
    h.min(1.0)
}

/// Bhattacharyya function `bh(q) = 2 sqrt(q (1 - q))`.
///
/// ```
/// use bdmc::{scalar::bh, UnitScalar};
/// assert_eq!(bh(UnitScalar::HALF), 1.0);
/// assert_eq!(bh(UnitScalar::ZERO), 0.0);
/// ```
pub fn bh(q: UnitScalar) -> f64 {
    let q = q.get();
    let m = if q <= 0.5 { q } else { 1.0 - q };
    2.0 * (m * (1.0 - m)).sqrt()
}

/// Inverse of [`bh`] on `[0, 1/2]`: the unique `q <= 1/2` with `bh(q) = z`.
///
/// The textbook form `(1 - sqrt(1 - z^2)) / 2` cancels for small `z`; the
/// algebraically equal `z^2 / (2 (1 + sqrt(1 - z^2)))` used here does not,
/// so `bh(bh_inv(z))` returns `z` to high relative accuracy on the whole
/// interval.
///
/// ```
/// use bdmc::{scalar::{bh, bh_inv}, UnitScalar};
/// let q = bh_inv(UnitScalar::new(0.6)?);
/// assert!((q.get() - 0.1).abs() < 1e-15);
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn bh_inv(z: UnitScalar) -> UnitScalar {
    let z = z.get();
    let v = ((1.0 - z) * (1.0 + z)).sqrt();
    let q = z * z / (2.0 * (1.0 + v));
    // q = (1 - v) / 2 <= 1/2 up to rounding; the bound is strict in exact
    // arithmetic and rounding cannot push the quotient past 1/2 here.
    UnitScalar(q)
}

/// Natural inverse hyperbolic tangent on `[0, 1)`.
///
/// For `v` below [`V_SERIES_THRESHOLD`] the odd power series
/// `v + v^3/3 + v^5/5 + ...` is summed directly (the closed form would
/// subtract nearly equal logarithms); above it, the closed form
/// `(ln(1 + v) - ln(1 - v)) / 2` is evaluated through `ln_1p` on both
/// sides.
///
/// ```
/// use bdmc::scalar::atanh_nat;
/// assert_eq!(atanh_nat(0.0)?, 0.0);
/// // Below the series threshold the cubic correction is beneath one ulp:
/// assert_eq!(atanh_nat(1e-8)?, 1e-8);
/// assert!(atanh_nat(1.0).is_err());
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn atanh_nat(v: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&v) {
        return Err(Error::AtanhDomain { value: v });
    }
    if v < V_SERIES_THRESHOLD {
        let v2 = v * v;
        let mut power = v;
        let mut acc = v;
        let mut n = 1u32;
        loop {
            power *= v2;
            let term = power / f64::from(2 * n + 1);
            if term < SERIES_EPS {
                break;
            }
            acc += term;
            n += 1;
        }
        Ok(acc)
    } else {
        Ok(0.5 * (v.ln_1p() - (-v).ln_1p()))
    }
}

/// The complementary coordinate `v = sqrt((1 - u)(1 + u))`.
#[inline]
fn v_of(u: f64) -> f64 {
    ((1.0 - u) * (1.0 + u)).sqrt()
}

/// The bridge function `phi(u) = ent((1 - sqrt(1 - u^2)) / 2)`.
///
/// A strictly increasing bijection of `[0, 1]` satisfying
/// `phi(bh(q)) = ent(q)`. Internally the argument of `ent` is computed as
/// `u^2 / (2 (1 + v))`, which is exact algebra and avoids the `1 - v`
/// cancellation for small `u`.
///
/// ```
/// use bdmc::{scalar::{phi, bh, ent}, UnitScalar};
/// let q = UnitScalar::new(0.11)?;
/// let u = UnitScalar::new(bh(q))?;
/// assert!((phi(u) - ent(q)).abs() < 1e-15);
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn phi(u: UnitScalar) -> f64 {
    let u = u.get();
    if u == 0.0 {
        return 0.0;
    }
    if u == 1.0 {
        return 1.0;
    }
    let v = v_of(u);
    let q = u * u / (2.0 * (1.0 + v));
    ent(UnitScalar(q))
}

/// First derivative `phi'(u) = u atanh(v) / (v ln 2)`, `v = sqrt(1 - u^2)`.
///
/// Endpoints are filled in by continuity: `phi'(0) = 0` and
/// `phi'(1) = 1 / ln 2`. Near `u = 1` (small `v`) the quotient
/// `atanh(v) / v` is evaluated by its even power series
/// `1 + v^2/3 + v^4/5 + ...`; elsewhere `atanh(v)` uses the cancellation-free
/// form `ln(1 + v) - ln u`.
///
/// ```
/// use bdmc::{scalar::phi_d1, UnitScalar};
/// assert_eq!(phi_d1(UnitScalar::ZERO), 0.0);
/// assert!((phi_d1(UnitScalar::ONE) - 1.4426950408889634).abs() < 1e-15);
/// ```
pub fn phi_d1(u: UnitScalar) -> f64 {
    let u = u.get();
    if u == 0.0 {
        return 0.0;
    }
    let v = v_of(u);
    if v < V_SERIES_THRESHOLD {
        // atanh(v)/v = 1 + v^2/3 + v^4/5 + ...
        let v2 = v * v;
        let mut power = 1.0;
        let mut acc = 1.0;
        let mut n = 1u32;
        loop {
            power *= v2;
            let term = power / f64::from(2 * n + 1);
            if term < SERIES_EPS {
                break;
            }
            acc += term;
            n += 1;
        }
        u * acc / std::f64::consts::LN_2
    } else {
        // atanh(v) = ln(1 + v) - ln(u) because 1 - v = u^2 / (1 + v).
        let alpha = v.ln_1p() - u.ln();
        u * alpha / (v * std::f64::consts::LN_2)
    }
}

/// Second derivative `phi''(u) = (atanh(v) - v) / (v^3 ln 2)`.
///
/// Diverges as `u -> 0` (returned as an error rather than an arbitrary
/// sentinel); `phi''(1) = 1 / (3 ln 2)` by the series at `v = 0`. Below the
/// series threshold the even series `(1/3 + v^2/5 + v^4/7 + ...) / ln 2`
/// sidesteps the catastrophic cancellation in `atanh(v) - v`.
///
/// ```
/// use bdmc::{scalar::phi_d2, UnitScalar};
/// assert!((phi_d2(UnitScalar::ONE).unwrap() - 0.4808983469629878).abs() < 1e-15);
/// assert!(phi_d2(UnitScalar::ZERO).is_err());
/// ```
pub fn phi_d2(u: UnitScalar) -> Result<f64> {
    let u = u.get();
    if u == 0.0 {
        return Err(Error::SecondDerivativeDiverges);
    }
    let v = v_of(u);
    if v < V_SERIES_THRESHOLD {
        // (atanh(v) - v)/v^3 = 1/3 + v^2/5 + v^4/7 + ...
        let v2 = v * v;
        let mut power = 1.0;
        let mut acc = 1.0 / 3.0;
        let mut n = 1u32;
        loop {
            power *= v2;
            let term = power / f64::from(2 * n + 3);
            if term < SERIES_EPS {
                break;
            }
            acc += term;
            n += 1;
        }
        Ok(acc / std::f64::consts::LN_2)
    } else {
        let alpha = v.ln_1p() - u.ln();
        Ok((alpha - v) / (v * v * v * std::f64::consts::LN_2))
    }
}

/// Inverse of [`phi`]: the `u` with `phi(u) = y`, to within `1e-12` in
/// function value.
///
/// `phi` is a strictly increasing bijection of `[0, 1]`, so bisection is
/// safe; the bracket is narrowed to `1e-13` and finished with one secant
/// step inside it.
///
/// ```
/// use bdmc::{scalar::{phi, phi_inv}, UnitScalar};
/// let u = UnitScalar::new(0.37)?;
/// let back = phi_inv(phi(u))?;
/// assert!((back.get() - 0.37).abs() < 1e-10);
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn phi_inv(y: f64) -> Result<UnitScalar> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::OutOfRange {
            name: "y",
            value: y,
            min: 0.0,
            max: 1.0,
        });
    }
    if y == 0.0 {
        return Ok(UnitScalar::ZERO);
    }
    if y == 1.0 {
        return Ok(UnitScalar::ONE);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if phi(UnitScalar(mid)) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (phi(UnitScalar(lo)), phi(UnitScalar(hi)));
    let u = if fhi > flo {
        (lo + (y - flo) * (hi - lo) / (fhi - flo)).clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    };
    Ok(UnitScalar(u))
}

/// `psi(w) = phi(sqrt(w))`, a concave function of `w` with `psi(w) >= w`.
///
/// ```
/// use bdmc::{scalar::psi, UnitScalar};
/// let w = UnitScalar::new(0.36)?;
/// assert!(psi(w) >= 0.36);
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn psi(w: UnitScalar) -> f64 {
    // sqrt maps [0, 1] into itself (monotone, correctly rounded).
    phi(UnitScalar(w.get().sqrt()))
}
