//! Rigorous grid certificates for the derivative comparison and the linear
//! bounds on `phi`.
//!
//! The quantities `phi'(u)/u` and `phi''(u)` have even power series in
//! `v = sqrt(1 - u^2)`:
//!
//! ```text
//! phi'(u)/u = (1/ln 2) (1 + v^2/3 + v^4/5 + ...)
//! phi''(u)  = (1/ln 2) (1/3 + v^2/5 + v^4/7 + ...)
//! ```
//!
//! Both have positive terms dominated by the geometric series, so a
//! truncation after `N` terms undershoots by at most
//! `v^{2(N+1)} / ((2N + 1 + off)(1 - v^2))` with `off = 2` resp. `4`.
//! [`enclose_series_d1`] and [`enclose_series_d2`] turn that into hard
//! interval bounds: the partial sum is accumulated in directed-rounding
//! interval arithmetic (smallest terms first, so rounding happens at the
//! scale of the running tail), and the geometric bound is added to the
//! upper end. Every coefficient `1 / ((2n + off) ln 2)` is itself enclosed,
//! starting from one-ulp brackets of the irrational constants.
//!
//! The term-by-term domination `1/(2n+1) > 1/(2n+3)` makes
//! `phi''(u) < phi'(u)/u` strict for every `u` in `(0, 1)`;
//! [`certify_lemma1`] verifies the resulting gap between the *intervals*
//! on a grid, which is a machine-checked proof of the comparison at those
//! points. [`certify_lemma3`] handles the three elementary bounds
//! `phi(u) <= u`, `phi(u) >= u^2` and `phi(u) >= 1 + (u - 1)/ln 2` with an
//! explicit evaluation-error pad instead of intervals.

use crate::enclosure::{add_up, div_up, mul_down, sub_down, Enclosure, ROUNDING_MODE};
use crate::scalar::{self, UnitScalar};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest `v` accepted by the series enclosures. Beyond this the geometric
/// tail converges too slowly for the term cap to give useful widths.
pub const V_MAX: f64 = 0.999;

/// Cap on the number of series terms.
pub const MAX_TERMS: usize = 10_000;

/// Target for the geometric tail bound when choosing a term count.
const TAIL_TARGET: f64 = 1e-16;

/// Evaluation-error pad used by [`certify_lemma3`]: `phi` is accurate to a
/// few ulps, so a slack clearing this pad certifies the strict inequality.
pub const LEMMA3_PAD: f64 = 1e-12;

/// One-ulp bracket of `ln 2`. The nearest double sits below the true
/// value (checked against a 60-digit evaluation), so the bracket is
/// `[LN_2, next_up(LN_2)]`.
fn ln2_enc() -> Enclosure {
    Enclosure::from_bounds(std::f64::consts::LN_2, std::f64::consts::LN_2.next_up())
}

/// One-ulp bracket of `1 / ln 2`; the nearest double again rounds down.
fn log2e_enc() -> Enclosure {
    Enclosure::from_bounds(std::f64::consts::LOG2_E, std::f64::consts::LOG2_E.next_up())
}

/// One-ulp bracket of `1 / (3 ln 2)`; the nearest double again rounds down.
fn inv_3ln2_enc() -> Enclosure {
    Enclosure::from_bounds(scalar::INV_3LN2, scalar::INV_3LN2.next_up())
}

/// Outcome of one grid certification run.
///
/// Serializes with exactly the fields shown; `v_max` is `null` for the
/// linear-bound certificates, which have no series cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// Which statement was certified ("1", "3a", "3b" or "3c").
    pub lemma: String,
    /// Number of grid points requested.
    pub grid: usize,
    /// Series domain cutoff, when one applies.
    pub v_max: Option<f64>,
    /// Rounding strategy used for the interval arithmetic.
    pub mode: String,
    /// Smallest slack seen over the grid.
    pub min_slack: f64,
    /// Grid location of the smallest slack.
    pub argmin: f64,
    /// Whether every grid point cleared its assertion.
    pub pass: bool,
}

/// Smallest term count whose geometric tail bound drops below `1e-16`,
/// capped at [`MAX_TERMS`]. `off` is 2 for the `phi'(u)/u` series and 4 for
/// the `phi''` series.
fn tail_terms(v: f64, off: u32) -> usize {
    if v == 0.0 {
        return 1;
    }
    let v2 = v * v;
    let scale = 1.0 / ((1.0 - v2) * std::f64::consts::LN_2);
    let mut power = v2 * v2; // v^{2(n+1)} at n = 1
    for n in 1..MAX_TERMS {
        let tail = power * scale / f64::from(2 * (n as u32) + 1 + off);
        if tail < TAIL_TARGET {
            return n;
        }
        power *= v2;
    }
    MAX_TERMS
}

/// Suggested `terms` argument for [`enclose_series_d1`] at this `v`.
pub fn terms_for_d1(v: f64) -> usize {
    tail_terms(v, 2)
}

/// Suggested `terms` argument for [`enclose_series_d2`] at this `v`.
pub fn terms_for_d2(v: f64) -> usize {
    tail_terms(v, 4)
}

/// Shared series kernel. `off` selects the coefficient family
/// `1/(2n + off - 1)`: `off = 2` gives `1/3, 1/5, ...` starting against
/// leading constant `1/ln 2`; `off = 4` gives `1/5, 1/7, ...` against
/// `1/(3 ln 2)`.
fn enclose_series(v: f64, terms: usize, off: u32, c0: Enclosure) -> Result<Enclosure> {
    if !(0.0..=V_MAX).contains(&v) {
        return Err(Error::OutOfRange {
            name: "v",
            value: v,
            min: 0.0,
            max: V_MAX,
        });
    }
    if terms < 1 {
        return Err(Error::GridTooSmall {
            name: "terms",
            value: terms,
            min: 1,
        });
    }
    let ln2 = ln2_enc();
    let v2 = Enclosure::from_bounds(mul_down(v, v), crate::enclosure::mul_up(v, v));

    // powers[k - 1] encloses v^{2k}; one extra power feeds the tail bound.
    let mut powers = Vec::with_capacity(terms + 1);
    let mut p = v2;
    powers.push(p);
    for _ in 1..=terms {
        p = p * v2;
        powers.push(p);
    }

    // Backward accumulation: summing the tiny high-order terms first keeps
    // every rounding at the scale of the running partial sum, so the final
    // width stays within a few ulps of the leading constant.
    let mut acc = Enclosure::exact(0.0);
    for k in (1..=terms).rev() {
        let coeff = f64::from(2 * (k as u32) - 1 + off);
        let denom = Enclosure::exact(coeff) * ln2;
        acc = acc + powers[k - 1] / denom;
    }
    let partial = c0 + acc;

    if v == 0.0 {
        return Ok(partial);
    }
    // Geometric tail bound v^{2(N+1)} / ((2N + 1 + off)(1 - v^2) ln 2),
    // rounded up and added to the upper end only.
    let coeff = f64::from(2 * (terms as u32) + 1 + off);
    let den = mul_down(mul_down(coeff, sub_down(1.0, v2.hi())), ln2.lo());
    let tail_hi = div_up(powers[terms].hi(), den);
    Ok(Enclosure::from_bounds(
        partial.lo(),
        add_up(partial.hi(), tail_hi),
    ))
}

/// Hard interval bounds on `phi'(u)/u = (1/ln 2) sum v^{2n}/(2n+1)`,
/// `v = sqrt(1 - u^2)`, from `terms` series terms plus the geometric tail
/// bound.
///
/// ```
/// use bdmc::certify::enclose_series_d1;
/// // At v = 0 the series collapses to 1/ln 2.
/// let e = enclose_series_d1(0.0, 5)?;
/// assert!(e.contains(std::f64::consts::LOG2_E));
/// assert!(e.width() <= 2.0 * f64::EPSILON);
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn enclose_series_d1(v: f64, terms: usize) -> Result<Enclosure> {
    enclose_series(v, terms, 2, log2e_enc())
}

/// Hard interval bounds on `phi''(u) = (1/ln 2) sum v^{2n}/(2n+3)` (the
/// `n = 0` term being `1/3`), constructed like [`enclose_series_d1`] with
/// tail bound `v^{2(N+1)} / ((2N+5)(1 - v^2))`.
pub fn enclose_series_d2(v: f64, terms: usize) -> Result<Enclosure> {
    enclose_series(v, terms, 4, inv_3ln2_enc())
}

/// Certifies `0 < phi''(u) < phi'(u)/u` on a grid of `v` values.
///
/// The grid is `grid_points` equally spaced values on `[0, v_max]`; the
/// point `v = 0` is skipped (both series collapse to their leading
/// constants there and the comparison is the trivial `1/3 < 1`). At every
/// remaining point the two enclosures must be disjoint in the right order:
/// `d2.hi < d1.lo` with `d2.lo > 0`. The reported slack is `d1.lo - d2.hi`,
/// the width of the certified gap.
///
/// ```
/// use bdmc::certify::certify_lemma1;
/// let report = certify_lemma1(99, 0.999)?;
/// assert!(report.pass && report.min_slack > 0.9);
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn certify_lemma1(grid_points: usize, v_max: f64) -> Result<CertificateReport> {
    if grid_points < 2 {
        return Err(Error::GridTooSmall {
            name: "grid_points",
            value: grid_points,
            min: 2,
        });
    }
    if !(v_max > 0.0 && v_max <= V_MAX) {
        return Err(Error::OutOfRange {
            name: "v_max",
            value: v_max,
            min: 0.0,
            max: V_MAX,
        });
    }
    let denom = (grid_points - 1) as f64;
    let mut min_slack = f64::INFINITY;
    let mut argmin = f64::NAN;
    let mut pass = true;
    for j in 1..grid_points {
        let v = v_max * (j as f64) / denom;
        let d1 = enclose_series_d1(v, terms_for_d1(v))?;
        let d2 = enclose_series_d2(v, terms_for_d2(v))?;
        let ok = d2.lo() > 0.0 && d2.hi() < d1.lo();
        let slack = d1.lo() - d2.hi();
        if slack < min_slack {
            min_slack = slack;
            argmin = v;
        }
        pass &= ok;
    }
    Ok(CertificateReport {
        lemma: "1".to_owned(),
        grid: grid_points,
        v_max: Some(v_max),
        mode: ROUNDING_MODE.to_owned(),
        min_slack,
        argmin,
        pass,
    })
}

/// Certifies the three elementary bounds on `phi` over a `grid_points`
/// grid of `u` values on `[0, 1]`:
///
/// * `3a`: `u - phi(u) >= 0`, equality at both endpoints;
/// * `3b`: `phi(u) - u^2 >= 0`, equality at both endpoints;
/// * `3c`: `phi(u) - (1 + (u - 1)/ln 2) >= 0`, equality at `u = 1`.
///
/// Every grid point must clear `-pad` with [`LEMMA3_PAD`] as pad, and
/// interior points must clear `+pad` (strictness); the endpoints are
/// exempt from strictness because equality is expected there. Reports are
/// returned in the order `3a`, `3b`, `3c`, each carrying the smallest
/// slack over the whole grid and its location.
pub fn certify_lemma3(grid_points: usize) -> Result<[CertificateReport; 3]> {
    if grid_points < 3 {
        return Err(Error::GridTooSmall {
            name: "grid_points",
            value: grid_points,
            min: 3,
        });
    }
    let denom = (grid_points - 1) as f64;
    let mut reports: Vec<CertificateReport> = ["3a", "3b", "3c"]
        .iter()
        .map(|name| CertificateReport {
            lemma: (*name).to_owned(),
            grid: grid_points,
            v_max: None,
            mode: ROUNDING_MODE.to_owned(),
            min_slack: f64::INFINITY,
            argmin: f64::NAN,
            pass: true,
        })
        .collect();
    for i in 0..grid_points {
        let u = (i as f64) / denom;
        let p = scalar::phi(UnitScalar::new(u).expect("grid point in [0, 1]"));
        let slacks = [
            u - p,
            p - u * u,
            p - (1.0 + (u - 1.0) / std::f64::consts::LN_2),
        ];
        let interior = i != 0 && i != grid_points - 1;
        for (report, slack) in reports.iter_mut().zip(slacks) {
            if slack < report.min_slack {
                report.min_slack = slack;
                report.argmin = u;
            }
            let ok = if interior {
                slack > LEMMA3_PAD
            } else {
                slack >= -LEMMA3_PAD
            };
            report.pass &= ok;
        }
    }
    let mut it = reports.into_iter();
    Ok([
        it.next().expect("three reports"),
        it.next().expect("three reports"),
        it.next().expect("three reports"),
    ])
}
