//! Channel data model, per-sub-channel rate quantities and interference
//! classification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// One real scalar two-user Gaussian interference channel.
///
/// `hkl` is the gain from transmitter `k` to receiver `l`; `pk` is the
/// average power constraint of transmitter `k`. Noise has unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSubchannel")]
pub struct Subchannel {
    h11: f64,
    h12: f64,
    h21: f64,
    h22: f64,
    p1: f64,
    p2: f64,
}

#[derive(Deserialize)]
struct RawSubchannel {
    h11: f64,
    h12: f64,
    h21: f64,
    h22: f64,
    p1: f64,
    p2: f64,
}

impl TryFrom<RawSubchannel> for Subchannel {
    type Error = Error;

    fn try_from(raw: RawSubchannel) -> Result<Self> {
        Subchannel::new(raw.h11, raw.h12, raw.h21, raw.h22, raw.p1, raw.p2)
    }
}

fn check_gain(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value != 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidCoefficient { field, value })
    }
}

fn check_power(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPower { field, value })
    }
}

impl Subchannel {
    pub fn new(h11: f64, h12: f64, h21: f64, h22: f64, p1: f64, p2: f64) -> Result<Self> {
        check_gain("h11", h11)?;
        check_gain("h12", h12)?;
        check_gain("h21", h21)?;
        check_gain("h22", h22)?;
        check_power("p1", p1)?;
        check_power("p2", p2)?;
        Ok(Subchannel {
            h11,
            h12,
            h21,
            h22,
            p1,
            p2,
        })
    }

    pub fn h11(&self) -> f64 {
        self.h11
    }

    pub fn h12(&self) -> f64 {
        self.h12
    }

    pub fn h21(&self) -> f64 {
        self.h21
    }

    pub fn h22(&self) -> f64 {
        self.h22
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// Same coefficients with different powers.
    pub fn with_powers(&self, p1: f64, p2: f64) -> Result<Self> {
        Subchannel::new(self.h11, self.h12, self.h21, self.h22, p1, p2)
    }

    /// Relabels the users: transmitter/receiver 1 becomes 2 and vice versa.
    pub fn swapped(&self) -> Self {
        Subchannel {
            h11: self.h22,
            h12: self.h21,
            h21: self.h12,
            h22: self.h11,
            p1: self.p2,
            p2: self.p1,
        }
    }

    /// `|h12| / |h11|`, the strength of user 1's interference at receiver 2.
    pub fn cross_ratio_1(&self) -> f64 {
        self.h12.abs() / self.h11.abs()
    }

    /// `|h21| / |h22|`, the strength of user 2's interference at receiver 1.
    pub fn cross_ratio_2(&self) -> f64 {
        self.h21.abs() / self.h22.abs()
    }

    pub fn flags(&self) -> SubchannelFlags {
        let (a11, a12, a21, a22) = (
            self.h11.abs(),
            self.h12.abs(),
            self.h21.abs(),
            self.h22.abs(),
        );
        let cross1_strong = tol::ge(a12, a11);
        let cross1_weak = tol::le(a12, a11);
        let cross2_strong = tol::ge(a21, a22);
        let cross2_weak = tol::le(a21, a22);
        SubchannelFlags {
            strong: cross1_strong && cross2_strong,
            mixed_a: cross1_strong && cross2_weak,
            mixed_b: cross1_weak && cross2_strong,
            weak: cross1_weak && cross2_weak,
            noisy: tol::le(self.cross_ratio_2() + self.cross_ratio_1(), 1.0),
        }
    }

    pub fn rates(&self) -> SubchannelRates {
        SubchannelRates::of(self)
    }
}

/// A parallel channel of `M >= 1` sub-channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel")]
pub struct ChannelInstance {
    subchannels: Vec<Subchannel>,
}

#[derive(Deserialize)]
struct RawChannel {
    subchannels: Vec<Subchannel>,
}

impl TryFrom<RawChannel> for ChannelInstance {
    type Error = Error;

    fn try_from(raw: RawChannel) -> Result<Self> {
        ChannelInstance::new(raw.subchannels)
    }
}

impl ChannelInstance {
    pub fn new(subchannels: Vec<Subchannel>) -> Result<Self> {
        if subchannels.is_empty() {
            return Err(Error::EmptyChannel);
        }
        Ok(ChannelInstance { subchannels })
    }

    pub fn single(sub: Subchannel) -> Self {
        ChannelInstance {
            subchannels: vec![sub],
        }
    }

    pub fn len(&self) -> usize {
        self.subchannels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn subchannels(&self) -> &[Subchannel] {
        &self.subchannels
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Subchannel> {
        self.subchannels.iter()
    }

    /// The same channel with users 1 and 2 relabelled on every sub-channel.
    pub fn swapped(&self) -> Self {
        ChannelInstance {
            subchannels: self.subchannels.iter().map(Subchannel::swapped).collect(),
        }
    }

    /// Multiplies every power constraint by `factor`.
    pub fn scale_powers(&self, factor: f64) -> Result<Self> {
        if !factor.is_finite() || factor < 0.0 {
            return Err(Error::param(
                "factor",
                format!("must be finite and non-negative, got {factor}"),
            ));
        }
        let subchannels = self
            .subchannels
            .iter()
            .map(|s| s.with_powers(s.p1 * factor, s.p2 * factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelInstance { subchannels })
    }

    /// True when both channels have identical coefficients on every
    /// sub-channel (powers may differ).
    pub fn same_coefficients(&self, other: &ChannelInstance) -> bool {
        self.len() == other.len()
            && self
                .iter()
                .zip(other.iter())
                .all(|(a, b)| a.h11 == b.h11 && a.h12 == b.h12 && a.h21 == b.h21 && a.h22 == b.h22)
    }
}

impl<'a> IntoIterator for &'a ChannelInstance {
    type Item = &'a Subchannel;
    type IntoIter = std::slice::Iter<'a, Subchannel>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// `0.5 * log2(1 + x)`, accurate for small `x`.
pub(crate) fn half_log2_1p(x: f64) -> f64 {
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

/// The ten per-sub-channel rates `A_m ... J_m`, in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubchannelRates {
    /// Single-user rate of user 1 at receiver 1.
    pub a: f64,
    /// Single-user rate of user 1 at receiver 2.
    pub b: f64,
    /// Single-user rate of user 2 at receiver 1.
    pub c: f64,
    /// Single-user rate of user 2 at receiver 2.
    pub d: f64,
    /// Sum rate of the multiple-access channel seen at receiver 1.
    pub e: f64,
    /// Sum rate of the multiple-access channel seen at receiver 2.
    pub f: f64,
    /// User 1 at receiver 1 with user 2 treated as noise.
    pub g: f64,
    /// User 2 at receiver 2 with user 1 treated as noise.
    pub h: f64,
    pub i: f64,
    pub j: f64,
}

impl SubchannelRates {
    pub fn of(sub: &Subchannel) -> Self {
        let s11 = sub.h11 * sub.h11 * sub.p1;
        let s12 = sub.h12 * sub.h12 * sub.p1;
        let s21 = sub.h21 * sub.h21 * sub.p2;
        let s22 = sub.h22 * sub.h22 * sub.p2;
        SubchannelRates {
            a: half_log2_1p(s11),
            b: half_log2_1p(s12),
            c: half_log2_1p(s21),
            d: half_log2_1p(s22),
            e: half_log2_1p(s11 + s21),
            f: half_log2_1p(s12 + s22),
            g: half_log2_1p(s11 / (1.0 + s21)),
            h: half_log2_1p(s22 / (1.0 + s12)),
            i: half_log2_1p(s21 + s11 / (1.0 + s12)),
            j: half_log2_1p(s12 + s22 / (1.0 + s21)),
        }
    }
}

/// Rate quantities for every sub-channel of a channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateQuantities {
    pub per_subchannel: Vec<SubchannelRates>,
}

impl RateQuantities {
    /// Sums `term` over the sub-channels.
    pub fn sum(&self, term: impl Fn(&SubchannelRates) -> f64) -> f64 {
        self.per_subchannel.iter().map(term).sum()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SubchannelRates> {
        self.per_subchannel.iter()
    }
}

pub fn rate_quantities(ch: &ChannelInstance) -> RateQuantities {
    RateQuantities {
        per_subchannel: ch.iter().map(SubchannelRates::of).collect(),
    }
}

/// Interference regime flags of one sub-channel. Boundary cases (equal
/// magnitudes) carry more than one flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SubchannelFlags {
    pub strong: bool,
    pub mixed_a: bool,
    pub mixed_b: bool,
    pub weak: bool,
    /// `|h21|/|h22| + |h12|/|h11| <= 1`.
    pub noisy: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AggregateClass {
    Strong,
    MixedA,
    MixedB,
    Noisy,
    Weak,
    Unclassified,
}

impl AggregateClass {
    pub fn name(&self) -> &'static str {
        match self {
            AggregateClass::Strong => "Strong",
            AggregateClass::MixedA => "MixedA",
            AggregateClass::MixedB => "MixedB",
            AggregateClass::Noisy => "Noisy",
            AggregateClass::Weak => "Weak",
            AggregateClass::Unclassified => "Unclassified",
        }
    }
}

impl fmt::Display for AggregateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelClass {
    pub per_subchannel: Vec<SubchannelFlags>,
    /// The preferred class among `valid`.
    pub aggregate: AggregateClass,
    /// Every class that all sub-channels share, in order of preference.
    pub valid: Vec<AggregateClass>,
}

impl ChannelClass {
    pub fn admits(&self, class: AggregateClass) -> bool {
        self.valid.contains(&class)
    }
}

pub fn classify(ch: &ChannelInstance) -> ChannelClass {
    let per_subchannel: Vec<SubchannelFlags> = ch.iter().map(Subchannel::flags).collect();
    let all = |f: fn(&SubchannelFlags) -> bool| per_subchannel.iter().all(f);

    let mut valid = Vec::new();
    if all(|f| f.strong) {
        valid.push(AggregateClass::Strong);
    }
    if all(|f| f.mixed_a) {
        valid.push(AggregateClass::MixedA);
    }
    if all(|f| f.mixed_b) {
        valid.push(AggregateClass::MixedB);
    }
    if all(|f| f.noisy) {
        valid.push(AggregateClass::Noisy);
    }
    if all(|f| f.weak) {
        valid.push(AggregateClass::Weak);
    }
    let aggregate = valid
        .first()
        .copied()
        .unwrap_or(AggregateClass::Unclassified);
    ChannelClass {
        per_subchannel,
        aggregate,
        valid,
    }
}
