//! Information measures of binary-input discrete memoryless channels.
//!
//! A binary-input channel carries an input bit to one of finitely many
//! output symbols according to two conditional probability rows `W(y|0)`
//! and `W(y|1)`. For any such channel the crate computes
//!
//! * the symmetric capacity `I` (mutual information under a uniform input,
//!   in bits),
//! * the Bhattacharyya parameter `Z` (the affinity between the two rows),
//! * the Blackwell measure (the output-weighted distribution of the
//!   posterior probability of input 0),
//!
//! together with the bridge function `phi(u) = ent((1 - sqrt(1 - u^2)) / 2)`
//! that ties them together: for every channel
//!
//! ```text
//! phi(Z)  <=  1 - I  <=  Z
//! ```
//!
//! with equality on the right exactly for erasure channels and on the left
//! exactly for symmetric two-output channels. [`bounds::bound_report`]
//! evaluates that sandwich and four corollary inequalities on a concrete
//! channel; [`certify`] goes further and proves the underlying derivative
//! comparison on a grid using directed-rounding interval arithmetic, so the
//! verdict does not depend on trusting ordinary floating point.
//!
//! # Quick start
//!
//! ```
//! use bdmc::channel::{bsc, capacity, bhattacharyya};
//!
//! let ch = bsc(0.1)?;
//! let i = capacity(&ch);
//! let z = bhattacharyya(&ch);
//! assert!((i - 0.5310044064107188).abs() < 1e-12);
//! assert!(z >= 1.0 - i); // right side of the sandwich
//! # Ok::<(), bdmc::Error>(())
//! ```
//!
//! Modules:
//!
//! * [`scalar`]: the scalar toolbox (`ent`, `bh`, `phi` and its derivatives,
//!   inverses) on the validated [`UnitScalar`] domain.
//! * [`enclosure`]: directed-rounding interval arithmetic primitives.
//! * [`certify`]: rigorous series enclosures and grid certificates.
//! * [`channel`]: channel construction, `I`, `Z`, Blackwell measure,
//!   classification.
//! * [`bounds`]: inequality reports, Hellinger/Jensen-Shannon divergences,
//!   and region sampling.

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod bounds;
pub mod certify;
pub mod channel;
pub mod enclosure;
pub mod scalar;

pub use bounds::{BoundEntry, BoundReport, Distribution, PropositionSlacks};
pub use certify::CertificateReport;
pub use channel::{BlackwellAtom, BlackwellMeasure, Channel, ChannelClass, Output};
pub use enclosure::Enclosure;
pub use scalar::UnitScalar;

/// Errors reported by this crate.
#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A scalar argument fell outside its admissible closed interval.
    #[error("{name} must lie in [{min}, {max}], got {value}")]
    OutOfRange {
        /// Name of the offending argument.
        name: &'static str,
        /// The rejected value.
        value: f64,
        /// Lower end of the admissible interval.
        min: f64,
        /// Upper end of the admissible interval.
        max: f64,
    },

    /// An argument was NaN or infinite where a finite value is required.
    #[error("{name} must be finite, got {value}")]
    NonFinite {
        /// Name of the offending argument.
        name: &'static str,
        /// The rejected value.
        value: f64,
    },

    /// The inverse hyperbolic tangent is only evaluated on `[0, 1)`.
    #[error("atanh argument must lie in [0, 1), got {value}")]
    AtanhDomain {
        /// The rejected value.
        value: f64,
    },

    /// The second derivative of `phi` grows without bound as `u -> 0`.
    #[error("phi'' diverges at u = 0")]
    SecondDerivativeDiverges,

    /// A grid argument was too small for the requested certificate.
    #[error("{name} must be at least {min}, got {value}")]
    GridTooSmall {
        /// Name of the offending argument.
        name: &'static str,
        /// The rejected value.
        value: usize,
        /// Smallest admissible value.
        min: usize,
    },

    /// A channel was constructed with no outputs carrying probability mass.
    #[error("channel has no outputs with positive mass")]
    EmptyChannel,

    /// A conditional probability was negative.
    #[error("output '{label}': W(y|{input}) = {value} is negative")]
    NegativeTransition {
        /// Output label of the offending entry.
        label: String,
        /// Which conditional row (0 or 1).
        input: u8,
        /// The rejected value.
        value: f64,
    },

    /// A conditional row did not sum to 1 within tolerance.
    #[error("input-{input} row sums to {sum}")]
    RowSumMismatch {
        /// Which conditional row (0 or 1).
        input: u8,
        /// The offending sum.
        sum: f64,
    },

    /// An output carried no mass under either input (strict mode only).
    #[error("output '{label}' carries no probability mass under either input")]
    DegenerateOutput {
        /// Output label of the offending entry.
        label: String,
    },

    /// A distribution mass was negative.
    #[error("mass of '{label}' is negative: {value}")]
    NegativeMass {
        /// Label of the offending mass.
        label: String,
        /// The rejected value.
        value: f64,
    },

    /// Distribution masses did not sum to 1 within tolerance.
    #[error("distribution masses sum to {sum}, expected 1")]
    MassSumMismatch {
        /// The offending sum.
        sum: f64,
    },

    /// A distribution was constructed with no masses.
    #[error("distribution has no masses")]
    EmptyDistribution,

    /// A sampled channel landed outside the certified region. This cannot
    /// happen unless the sampler or the measures are buggy, so it is
    /// reported loudly instead of being filtered.
    #[error("region violation at sample {index}: z = {z}, 1 - i = {one_minus_i}")]
    RegionViolation {
        /// Index of the offending sample.
        index: usize,
        /// Bhattacharyya coordinate of the offending point.
        z: f64,
        /// `1 - capacity` coordinate of the offending point.
        one_minus_i: f64,
    },

    /// A divergence comparison failed, which signals an internal bug.
    #[error("divergence bound '{which}' violated with slack {slack}")]
    PropositionViolation {
        /// Which side failed ("lower" or "upper").
        which: &'static str,
        /// The negative slack observed.
        slack: f64,
    },

    /// Channel JSON could not be parsed.
    #[error("invalid channel JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
