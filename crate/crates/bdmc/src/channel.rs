//! Binary-input channels, their information measures, and classification.
//!
//! A [`Channel`] is a finite list of outputs, each carrying the two
//! conditional probabilities `w0 = W(y|0)` and `w1 = W(y|1)`. Rows must be
//! probability vectors; construction validates and renormalizes them.
//!
//! Two scalar summaries matter here, both in `[0, 1]`:
//!
//! * [`capacity`]: the mutual information between a uniform input bit and
//!   the output, `I = sum_y sum_x (1/2) W(y|x) log2(W(y|x) / m(y))` with
//!   `m(y) = (W(y|0) + W(y|1)) / 2`;
//! * [`bhattacharyya`]: `Z = sum_y sqrt(W(y|0) W(y|1))`.
//!
//! The [`blackwell`] measure ties them together: writing `q(y)` for the
//! posterior probability of input 0 given output `y` (under a uniform
//! input) and `p(y)` for the output probability, the pairs `(q, p)` form a
//! discrete measure with
//!
//! ```text
//! Z = E[bh(q)]        1 - I = E[ent(q)] = E[phi(bh(q))]
//! ```
//!
//! which is the form in which the sandwich inequalities are proved and
//! tested. [`classify`] recognizes the two extremal families: erasure
//! channels (every `bh(q)` is 0 or 1) and binary symmetric channels
//! (`bh(q)` constant).

use crate::scalar::{self, UnitScalar};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Row sums may deviate from 1 by this much before construction fails;
/// anything smaller is silently renormalized.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Row sums this close to 1 count as already normalized and are stored
/// untouched, which makes construction idempotent: reading a serialized
/// channel back reproduces it bitwise.
const ALREADY_NORMALIZED: f64 = 1e-12;

/// Default tolerance for merging Blackwell atoms with equal posteriors.
pub const MERGE_TOL: f64 = 1e-12;

/// One output symbol with its two conditional probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output {
    /// Output label, unique within a channel.
    #[serde(rename = "y")]
    pub label: String,
    /// `W(y|0)`.
    pub w0: f64,
    /// `W(y|1)`.
    pub w1: f64,
}

/// A validated binary-input channel.
///
/// Serializes as `{"outputs": [{"y": ..., "w0": ..., "w1": ...}, ...]}`;
/// deserialization re-runs the full validation, so a JSON file is exactly
/// as trustworthy as a [`make_channel`] call.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawChannel")]
pub struct Channel {
    outputs: Vec<Output>,
    #[serde(skip)]
    pruned: Vec<String>,
}

#[derive(Deserialize)]
struct RawChannel {
    outputs: Vec<Output>,
}

impl TryFrom<RawChannel> for Channel {
    type Error = Error;

    fn try_from(raw: RawChannel) -> Result<Channel> {
        make_channel(raw.outputs.into_iter().map(|o| (o.label, o.w0, o.w1)), false)
    }
}

/// Equality disregards the pruning diagnostic, which is a construction
/// artifact rather than part of the channel.
impl PartialEq for Channel {
    fn eq(&self, other: &Self) -> bool {
        self.outputs == other.outputs
    }
}

impl Channel {
    /// The outputs, in construction order.
    pub fn outputs(&self) -> &[Output] {
        &self.outputs
    }

    /// Number of outputs.
    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Labels of outputs dropped during lenient construction because they
    /// carried no mass under either input.
    pub fn pruned_labels(&self) -> &[String] {
        &self.pruned
    }

    /// Parses and validates a channel from its JSON form.
    pub fn from_json(s: &str) -> Result<Channel> {
        Ok(serde_json::from_str(s)?)
    }

    /// The JSON form (pretty-printed).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel serialization cannot fail")
    }
}

/// Compensated (Neumaier) summation: error stays at a couple of ulps of
/// the result no matter how many terms go in.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Clamps values that float dust pushed just past the unit interval; real
/// violations (beyond `1e-12`) are left alone for the caller to see.
pub(crate) fn clamp_near_unit(x: f64) -> f64 {
    if (-1e-12..0.0).contains(&x) {
        0.0
    } else if x > 1.0 && x <= 1.0 + 1e-12 {
        1.0
    } else {
        x
    }
}

/// Builds a channel from `(label, w0, w1)` rows.
///
/// Validation: entries must be finite and nonnegative; each conditional
/// row must sum to 1 within [`ROW_SUM_TOL`] (and is then renormalized,
/// except that rows already normalized up to float dust are stored
/// bitwise, so rebuilding a channel from its own rows reproduces it
/// exactly). Outputs with `w0 + w1 = 0` cannot
/// ever occur and are rejected in strict mode; in lenient mode they are
/// dropped and recorded in [`Channel::pruned_labels`]. Duplicate labels
/// are made unique by suffixing `#2`, `#3`, ....
///
/// ```
/// use bdmc::channel::make_channel;
/// let ch = make_channel([("heads", 0.9, 0.2), ("tails", 0.1, 0.8)], true)?;
/// assert_eq!(ch.num_outputs(), 2);
/// assert!(make_channel([("y", 0.9, 1.0)], true).is_err()); // row 0 sums to 0.9
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn make_channel<L: Into<String>>(
    rows: impl IntoIterator<Item = (L, f64, f64)>,
    strict: bool,
) -> Result<Channel> {
    let rows: Vec<(String, f64, f64)> = rows
        .into_iter()
        .map(|(label, w0, w1)| (label.into(), w0, w1))
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyChannel);
    }
    for (label, w0, w1) in &rows {
        for (input, w) in [(0u8, *w0), (1u8, *w1)] {
            if !w.is_finite() {
                return Err(Error::NonFinite {
                    name: "transition probability",
                    value: w,
                });
            }
            if w < 0.0 {
                return Err(Error::NegativeTransition {
                    label: label.clone(),
                    input,
                    value: w,
                });
            }
        }
    }
    let mut sum0 = neumaier_sum(rows.iter().map(|r| r.1));
    let mut sum1 = neumaier_sum(rows.iter().map(|r| r.2));
    for (input, sum) in [(0u8, &mut sum0), (1u8, &mut sum1)] {
        if (*sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::RowSumMismatch { input, sum: *sum });
        }
        if (*sum - 1.0).abs() <= ALREADY_NORMALIZED {
            *sum = 1.0;
        }
    }
    let mut outputs = Vec::with_capacity(rows.len());
    let mut pruned = Vec::new();
    for (label, w0, w1) in rows {
        if w0 + w1 == 0.0 {
            if strict {
                return Err(Error::DegenerateOutput { label });
            }
            pruned.push(label);
        } else {
            outputs.push(Output {
                label,
                w0: w0 / sum0,
                w1: w1 / sum1,
            });
        }
    }
    if outputs.is_empty() {
        return Err(Error::EmptyChannel);
    }
    dedupe_labels(&mut outputs);
    Ok(Channel { outputs, pruned })
}

fn dedupe_labels(outputs: &mut [Output]) {
    let mut remaining: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for o in outputs.iter() {
        *remaining.entry(o.label.clone()).or_insert(0) += 1;
    }
    let mut taken = std::collections::HashSet::new();
    for o in outputs.iter_mut() {
        *remaining.get_mut(&o.label).expect("counted above") -= 1;
        if taken.contains(&o.label) {
            // Skip names already used and names a later row still owns.
            let mut k = 2usize;
            loop {
                let candidate = format!("{}#{k}", o.label);
                if !taken.contains(&candidate)
                    && remaining.get(&candidate).is_none_or(|&n| n == 0)
                {
                    o.label = candidate;
                    break;
                }
                k += 1;
            }
        }
        taken.insert(o.label.clone());
    }
}

/// The binary erasure channel: the input survives with probability
/// `1 - eps` and is erased (output `e`) with probability `eps`. Satisfies
/// `Z = eps` and `I = 1 - eps`.
///
/// The degenerate corners prune their massless outputs: `bec(0.0)` has no
/// erasure symbol and `bec(1.0)` only the erasure symbol.
pub fn bec(eps: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            min: 0.0,
            max: 1.0,
        });
    }
    make_channel(
        [
            ("0", 1.0 - eps, 0.0),
            ("e", eps, eps),
            ("1", 0.0, 1.0 - eps),
        ],
        false,
    )
}

/// The binary symmetric channel: the input bit is flipped with probability
/// `eps <= 1/2`. Satisfies `Z = bh(eps)` and `I = 1 - ent(eps)`.
pub fn bsc(eps: f64) -> Result<Channel> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            min: 0.0,
            max: 0.5,
        });
    }
    make_channel([("0", 1.0 - eps, eps), ("1", eps, 1.0 - eps)], false)
}

/// A channel whose two conditional rows are drawn independently and
/// uniformly from the probability simplex over `num_outputs` outputs
/// (normalized exponential variates), deterministically from `seed`.
pub fn random_channel(num_outputs: usize, seed: u64) -> Result<Channel> {
    if num_outputs < 2 {
        return Err(Error::GridTooSmall {
            name: "num_outputs",
            value: num_outputs,
            min: 2,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample_row = || {
        let raw: Vec<f64> = (0..num_outputs)
            .map(|_| {
                let x: f64 = rng.random();
                -(-x).ln_1p() // -ln(1 - x), a standard exponential variate
            })
            .collect();
        let total = neumaier_sum(raw.iter().copied());
        raw.into_iter().map(|e| e / total).collect::<Vec<f64>>()
    };
    let row0 = sample_row();
    let row1 = sample_row();
    make_channel(
        row0.into_iter()
            .zip(row1)
            .enumerate()
            .map(|(k, (w0, w1))| (k.to_string(), w0, w1)),
        false,
    )
}

/// Symmetric capacity `I` in bits: mutual information between a uniform
/// input bit and the output. Zero-probability transitions contribute zero;
/// results within `1e-12` of 0 or 1 are clamped onto the boundary.
///
/// ```
/// use bdmc::channel::{capacity, make_channel};
/// let noiseless = make_channel([("a", 1.0, 0.0), ("b", 0.0, 1.0)], true)?;
/// assert_eq!(capacity(&noiseless), 1.0);
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn capacity(ch: &Channel) -> f64 {
    let nats = neumaier_sum(ch.outputs.iter().flat_map(|o| {
        let m = 0.5 * (o.w0 + o.w1);
        [o.w0, o.w1].into_iter().map(move |w| {
            if w > 0.0 {
                0.5 * w * (w.ln() - m.ln())
            } else {
                0.0
            }
        })
    }));
    clamp_near_unit(nats / std::f64::consts::LN_2)
}

/// Bhattacharyya parameter `Z = sum_y sqrt(W(y|0) W(y|1))`, the affinity
/// between the two conditional rows. 1 for a useless channel, 0 when the
/// rows have disjoint support.
pub fn bhattacharyya(ch: &Channel) -> f64 {
    clamp_near_unit(neumaier_sum(
        ch.outputs.iter().map(|o| (o.w0 * o.w1).sqrt()),
    ))
}

/// One atom of the Blackwell measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlackwellAtom {
    /// Posterior probability of input 0 given this output.
    pub q: f64,
    /// Output probability under a uniform input.
    pub p: f64,
    /// `bh(q)`, the per-output Bhattacharyya coordinate.
    pub u: f64,
}

/// The Blackwell measure of a channel: the distribution of the posterior
/// `q` under the output distribution, with atoms sorted by `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlackwellMeasure {
    atoms: Vec<BlackwellAtom>,
}

impl BlackwellMeasure {
    /// The atoms, sorted by posterior.
    pub fn atoms(&self) -> &[BlackwellAtom] {
        &self.atoms
    }

    /// `E[U] = sum p bh(q)`; equals the channel's Bhattacharyya parameter.
    pub fn mean_u(&self) -> f64 {
        clamp_near_unit(neumaier_sum(self.atoms.iter().map(|a| a.p * a.u)))
    }

    /// `E[ent(Q)] = sum p ent(q)`; equals 1 minus the channel's capacity.
    pub fn mean_ent(&self) -> f64 {
        clamp_near_unit(neumaier_sum(self.atoms.iter().map(|a| {
            a.p * scalar::ent(UnitScalar::new(a.q).expect("posterior in [0, 1]"))
        })))
    }

    /// Total mass (1 up to rounding).
    pub fn total_mass(&self) -> f64 {
        neumaier_sum(self.atoms.iter().map(|a| a.p))
    }
}

/// Computes the Blackwell measure, merging atoms whose posteriors differ
/// by at most `merge_tol` (masses added, posterior re-averaged by mass).
///
/// Merging chains: a run of atoms with consecutive gaps within the
/// tolerance collapses into one atom, so distinct surviving atoms are
/// always more than `merge_tol` apart.
///
/// ```
/// use bdmc::channel::{bec, blackwell};
/// let m = blackwell(&bec(0.3)?, 1e-12)?;
/// let qs: Vec<f64> = m.atoms().iter().map(|a| a.q).collect();
/// let ps: Vec<f64> = m.atoms().iter().map(|a| a.p).collect();
/// assert_eq!(qs, [0.0, 0.5, 1.0]);
/// assert_eq!(ps, [0.35, 0.3, 0.35]);
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn blackwell(ch: &Channel, merge_tol: f64) -> Result<BlackwellMeasure> {
    if merge_tol.is_nan() || merge_tol < 0.0 {
        return Err(Error::OutOfRange {
            name: "merge_tol",
            value: merge_tol,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let mut raw: Vec<(f64, f64)> = ch
        .outputs
        .iter()
        .map(|o| {
            // w0 + w1 > 0 because degenerate outputs never survive
            // construction; the quotient cannot exceed 1 (monotone rounding
            // of the denominator).
            let mass = o.w0 + o.w1;
            (o.w0 / mass, 0.5 * mass)
        })
        .collect();
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut atoms = Vec::new();
    let mut start = 0;
    while start < raw.len() {
        let mut end = start + 1;
        while end < raw.len() && raw[end].0 - raw[end - 1].0 <= merge_tol {
            end += 1;
        }
        let cluster = &raw[start..end];
        let mass = neumaier_sum(cluster.iter().map(|a| a.1));
        let q = if cluster.len() == 1 {
            cluster[0].0
        } else {
            // Mass-weighted average; clamp the compensated quotient's dust.
            (neumaier_sum(cluster.iter().map(|a| a.0 * a.1)) / mass).clamp(0.0, 1.0)
        };
        let u = scalar::bh(UnitScalar::new(q).expect("posterior in [0, 1]"));
        atoms.push(BlackwellAtom { q, p: mass, u });
        start = end;
    }
    Ok(BlackwellMeasure { atoms })
}

/// The families a channel can be recognized as.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameter")]
pub enum ChannelClass {
    /// Erasure channel with the given erasure probability.
    #[serde(rename = "BEC")]
    Bec(f64),
    /// Symmetric channel with the given crossover probability.
    #[serde(rename = "BSC")]
    Bsc(f64),
    /// Neither of the two recognized families.
    General,
}

impl ChannelClass {
    /// The recovered parameter, when the class has one.
    pub fn parameter(self) -> Option<f64> {
        match self {
            ChannelClass::Bec(p) | ChannelClass::Bsc(p) => Some(p),
            ChannelClass::General => None,
        }
    }
}

impl std::fmt::Display for ChannelClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelClass::Bec(p) => write!(f, "BEC(erasure = {p})"),
            ChannelClass::Bsc(p) => write!(f, "BSC(crossover = {p})"),
            ChannelClass::General => write!(f, "general"),
        }
    }
}

/// Recognizes erasure and symmetric channels from the Blackwell measure.
///
/// * erasure: every atom has `u <= tol` or `|u - 1| <= tol`; the parameter
///   is the total mass at `u = 1`;
/// * symmetric: all atoms share one `u` value within `tol`; the parameter
///   is `bh_inv` of the common value.
///
/// When both patterns hold (noiseless and useless channels fit both
/// families) the erasure reading wins.
///
/// ```
/// use bdmc::channel::{bsc, classify, ChannelClass};
/// match classify(&bsc(0.1)?, 1e-9)? {
///     ChannelClass::Bsc(eps) => assert!((eps - 0.1).abs() < 1e-12),
///     other => panic!("misclassified as {other}"),
/// }
/// # Ok::<(), bdmc::Error>(())
/// ```
pub fn classify(ch: &Channel, tol: f64) -> Result<ChannelClass> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let measure = blackwell(ch, MERGE_TOL)?;
    let atoms = measure.atoms();
    let is_erasure = atoms
        .iter()
        .all(|a| a.u <= tol || (a.u - 1.0).abs() <= tol);
    if is_erasure {
        let erased = neumaier_sum(
            atoms
                .iter()
                .filter(|a| (a.u - 1.0).abs() <= tol)
                .map(|a| a.p),
        );
        return Ok(ChannelClass::Bec(erased.clamp(0.0, 1.0)));
    }
    let max_u = atoms.iter().map(|a| a.u).fold(f64::NEG_INFINITY, f64::max);
    let min_u = atoms.iter().map(|a| a.u).fold(f64::INFINITY, f64::min);
    if max_u - min_u <= tol {
        let common = clamp_near_unit(measure.mean_u()).clamp(0.0, 1.0);
        let eps = scalar::bh_inv(UnitScalar::new(common).expect("mean of unit values"));
        return Ok(ChannelClass::Bsc(eps.get()));
    }
    Ok(ChannelClass::General)
}
