//! Inequality reports for channels and divergence comparisons for
//! distributions.
//!
//! [`bound_report`] evaluates six inequalities relating the capacity `I`
//! and the Bhattacharyya parameter `Z` of one channel:
//!
//! | name           | statement               | tight exactly for            |
//! |----------------|-------------------------|------------------------------|
//! | `theorem.left`  | `Z >= 1 - I`            | erasure channels             |
//! | `theorem.right` | `1 - I >= phi(Z)`       | symmetric channels           |
//! | `corollary.1`   | `I + Z >= 1`            | erasure channels             |
//! | `corollary.2`   | `I + phi(Z) <= 1`       | symmetric channels           |
//! | `corollary.3`   | `I + Z^2 <= 1`          | noiseless and useless        |
//! | `corollary.4`   | `I ln 2 + Z <= 1`       | useless                      |
//!
//! Every slack is oriented so that nonnegative means satisfied.
//!
//! [`hellinger_sq`] and [`jensen_shannon`] compare two distributions, and
//! [`check_proposition`] verifies the sandwich
//! `H^2 <= JS <= H^2 * min(log2 e, 2 - H^2)` between them. The connection
//! to channels runs through [`jensen_shannon`] being exactly the capacity
//! of the channel whose conditional rows are the two distributions.

use crate::channel::{
    self, bhattacharyya, capacity, classify, make_channel, neumaier_sum, Channel, ChannelClass,
};
use crate::scalar::{self, UnitScalar};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, LOG2_E};

/// Default tolerance below which a slack counts as tight.
pub const TIGHT_TOL: f64 = 1e-9;

/// Guard band used by [`region_sample`] when re-checking its own points.
pub const SANDWICH_GUARD: f64 = 1e-9;

/// One evaluated inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    /// Which inequality this is.
    pub name: String,
    /// Left-hand side as evaluated.
    pub lhs: f64,
    /// Right-hand side as evaluated.
    pub rhs: f64,
    /// Oriented slack; nonnegative when the inequality holds.
    pub slack: f64,
    /// Whether `slack >= -tol`.
    pub satisfied: bool,
    /// Whether `|slack|` is within the tightness tolerance.
    pub tight: bool,
}

/// The full report for one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Symmetric capacity `I`.
    pub capacity: f64,
    /// Bhattacharyya parameter `Z`.
    pub bhattacharyya: f64,
    /// Recognized channel family.
    pub class: ChannelClass,
    /// Slack tolerance the entries were judged against.
    pub tol: f64,
    /// The six inequalities, in the order of the table above.
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    /// Whether every inequality is satisfied.
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.satisfied)
    }

    /// Looks up one entry by name.
    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

fn require_nonneg(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max: f64::INFINITY,
        })
    }
}

/// Evaluates the six inequalities with the default tightness tolerance.
///
/// ```
/// use bdmc::bounds::bound_report;
/// use bdmc::channel::bec;
/// let report = bound_report(&bec(0.3)?, 1e-9)?;
/// assert!(report.all_satisfied());
/// assert!(report.entry("theorem.left").unwrap().tight); // erasure channels sit on Z = 1 - I
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn bound_report(ch: &Channel, tol: f64) -> Result<BoundReport> {
    bound_report_with(ch, tol, TIGHT_TOL)
}

/// [`bound_report`] with an explicit tightness tolerance.
pub fn bound_report_with(ch: &Channel, tol: f64, tight_tol: f64) -> Result<BoundReport> {
    require_nonneg("tol", tol)?;
    require_nonneg("tight_tol", tight_tol)?;
    let i = capacity(ch);
    let z = bhattacharyya(ch);
    let phi_z = scalar::phi(UnitScalar::new(z).expect("Z lies in [0, 1]"));
    let one_minus_i = 1.0 - i;
    let entry = |name: &str, lhs: f64, rhs: f64, slack: f64| BoundEntry {
        name: name.to_owned(),
        lhs,
        rhs,
        slack,
        satisfied: slack >= -tol,
        tight: slack.abs() <= tight_tol,
    };
    let entries = vec![
        entry("theorem.left", z, one_minus_i, z - one_minus_i),
        entry("theorem.right", one_minus_i, phi_z, one_minus_i - phi_z),
        entry("corollary.1", i + z, 1.0, i + z - 1.0),
        entry("corollary.2", i + phi_z, 1.0, 1.0 - (i + phi_z)),
        entry("corollary.3", i + z * z, 1.0, 1.0 - (i + z * z)),
        entry("corollary.4", i * LN_2 + z, 1.0, 1.0 - (i * LN_2 + z)),
    ];
    Ok(BoundReport {
        capacity: i,
        bhattacharyya: z,
        class: classify(ch, tol.max(TIGHT_TOL))?,
        tol,
        entries,
    })
}

/// A finite probability distribution over labeled atoms.
///
/// Masses must be nonnegative and sum to 1 within `1e-9`; duplicate labels
/// are merged by adding their masses. No renormalization is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    atoms: Vec<(String, f64)>,
}

impl Distribution {
    /// Validates and builds a distribution.
    pub fn new<L: Into<String>>(masses: impl IntoIterator<Item = (L, f64)>) -> Result<Distribution> {
        let mut atoms: Vec<(String, f64)> = Vec::new();
        for (label, mass) in masses {
            let label = label.into();
            if !mass.is_finite() {
                return Err(Error::NonFinite {
                    name: "probability mass",
                    value: mass,
                });
            }
            if mass < 0.0 {
                return Err(Error::NegativeMass { label, value: mass });
            }
            match atoms.iter_mut().find(|(l, _)| *l == label) {
                Some((_, m)) => *m += mass,
                None => atoms.push((label, mass)),
            }
        }
        if atoms.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let sum = neumaier_sum(atoms.iter().map(|a| a.1));
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::MassSumMismatch { sum });
        }
        Ok(Distribution { atoms })
    }

    /// The labeled masses, first-seen order, duplicates merged.
    pub fn atoms(&self) -> &[(String, f64)] {
        &self.atoms
    }

    /// The mass of one label (0 when absent).
    pub fn mass_of(&self, label: &str) -> f64 {
        self.atoms
            .iter()
            .find(|(l, _)| l == label)
            .map_or(0.0, |(_, m)| *m)
    }
}

/// Aligns two distributions on the union of their labels, zero-filling.
fn aligned(p: &Distribution, q: &Distribution) -> Vec<(String, f64, f64)> {
    let mut rows: Vec<(String, f64, f64)> = p
        .atoms()
        .iter()
        .map(|(l, m)| (l.clone(), *m, q.mass_of(l)))
        .collect();
    for (l, m) in q.atoms() {
        if p.mass_of(l) == 0.0 && !p.atoms().iter().any(|(pl, _)| pl == l) {
            rows.push((l.clone(), 0.0, *m));
        }
    }
    rows
}

/// Squared Hellinger distance `H^2(P, Q) = 1 - sum_i sqrt(p_i q_i)`,
/// ranging from 0 (equal) to 1 (disjoint supports).
pub fn hellinger_sq(p: &Distribution, q: &Distribution) -> f64 {
    let affinity = channel::clamp_near_unit(neumaier_sum(
        aligned(p, q).into_iter().map(|(_, a, b)| (a * b).sqrt()),
    ));
    1.0 - affinity
}

/// Jensen-Shannon divergence in bits: the mutual information between a
/// fair coin choosing `P` or `Q` and the drawn atom. Equivalently, the
/// capacity of the channel whose conditional rows are `P` and `Q`, which
/// is how it is computed here.
pub fn jensen_shannon(p: &Distribution, q: &Distribution) -> f64 {
    let ch = make_channel(aligned(p, q), false)
        .expect("two valid distributions form valid conditional rows");
    capacity(&ch)
}

/// The two slacks of the divergence sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropositionSlacks {
    /// `JS - H^2`, nonnegative when the lower bound holds.
    pub lower: f64,
    /// `H^2 min(log2 e, 2 - H^2) - JS`, nonnegative when the upper bound
    /// holds.
    pub upper: f64,
}

/// Verifies `H^2 <= JS <= H^2 min(log2 e, 2 - H^2)` for one pair,
/// tolerating slack down to `-tol`. A violation is an internal bug
/// surfaced as an error, never silently clipped.
pub fn check_proposition(p: &Distribution, q: &Distribution, tol: f64) -> Result<PropositionSlacks> {
    require_nonneg("tol", tol)?;
    let h = hellinger_sq(p, q);
    let js = jensen_shannon(p, q);
    let slacks = PropositionSlacks {
        lower: js - h,
        upper: h * LOG2_E.min(2.0 - h) - js,
    };
    if slacks.lower < -tol {
        return Err(Error::PropositionViolation {
            which: "lower",
            slack: slacks.lower,
        });
    }
    if slacks.upper < -tol {
        return Err(Error::PropositionViolation {
            which: "upper",
            slack: slacks.upper,
        });
    }
    Ok(slacks)
}

/// Samples `(Z, 1 - I)` pairs from seeded random channels, re-checking
/// every point against the sandwich `phi(Z) <= 1 - I <= Z` (with a
/// [`SANDWICH_GUARD`] band) before returning it.
pub fn region_sample(
    num_samples: usize,
    num_outputs: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if num_samples < 1 {
        return Err(Error::GridTooSmall {
            name: "num_samples",
            value: num_samples,
            min: 1,
        });
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(num_samples);
    for index in 0..num_samples {
        let ch = channel::random_channel(num_outputs, seeder.random())?;
        let z = bhattacharyya(&ch);
        let one_minus_i = 1.0 - capacity(&ch);
        let floor = scalar::phi(UnitScalar::new(z).expect("Z lies in [0, 1]"));
        if one_minus_i < floor - SANDWICH_GUARD || one_minus_i > z + SANDWICH_GUARD {
            return Err(Error::RegionViolation {
                index,
                z,
                one_minus_i,
            });
        }
        points.push((z, one_minus_i));
    }
    Ok(points)
}
