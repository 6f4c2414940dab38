//! Separability of strong, mixed and noisy-interference channels.
//!
//! A channel is separable when coding each sub-channel on its own reaches
//! the joint-coding sum capacity. For strong and mixed channels this is
//! decided by per-sub-channel set membership: the channel is separable iff
//! one set contains every sub-channel. The same verdict follows from the
//! rate quantities directly, because a minimum of sums equals the sum of
//! minima iff one term is the minimizer on every sub-channel;
//! [`cross_check_forms`] evaluates both routes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::capacity::{
    mixed_independent_of, mixed_joint_of, mixed_orientation, strong_independent_of, strong_joint_of,
};
use crate::channel::{
    classify, rate_quantities, AggregateClass, ChannelInstance, Subchannel, SubchannelRates,
};
use crate::error::{Error, Result};
use crate::tol::{self, CAPACITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Separable,
    Inseparable,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Separable => "Separable",
            Verdict::Inseparable => "Inseparable",
            Verdict::Unknown => "Unknown",
        })
    }
}

/// The condition family that certifies a separable channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    S1,
    S2,
    S3,
    M1,
    M2,
    Noisy,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::S1 => "S1",
            Family::S2 => "S2",
            Family::S3 => "S3",
            Family::M1 => "M1",
            Family::M2 => "M2",
            Family::Noisy => "Noisy",
        })
    }
}

/// Set memberships of one sub-channel. `None` marks a family that does not
/// apply to the sub-channel's class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SubchannelMembership {
    pub in_s1: Option<bool>,
    pub in_s2: Option<bool>,
    pub in_s3: Option<bool>,
    pub in_m1: Option<bool>,
    pub in_m2: Option<bool>,
    pub in_n: bool,
    pub in_remark2_unknown: bool,
    /// A defining inequality holds with equality (within the tie
    /// tolerance), or a zero power makes the set and rate forms disagree.
    pub on_boundary: bool,
}

impl SubchannelMembership {
    fn general(sub: &Subchannel) -> Self {
        SubchannelMembership {
            in_n: noisy_membership(sub),
            in_remark2_unknown: remark2_unknown(sub),
            ..Default::default()
        }
    }

    fn is_in(&self, family: Family) -> bool {
        let flag = match family {
            Family::S1 => self.in_s1,
            Family::S2 => self.in_s2,
            Family::S3 => self.in_s3,
            Family::M1 => self.in_m1,
            Family::M2 => self.in_m2,
            Family::Noisy => Some(self.in_n),
        };
        flag == Some(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityVerdict {
    pub verdict: Verdict,
    pub family: Option<Family>,
    pub memberships: Vec<SubchannelMembership>,
    /// Joint minus independent sum capacity, when both are known.
    pub gap: Option<f64>,
    /// Some sub-channel sits on a set boundary; the verdict was settled by
    /// the rate inequalities.
    pub on_boundary: bool,
    /// Separability additionally depends on a power condition that is not
    /// checked here (noisy-interference channels).
    pub conditional: bool,
}

/// Strong-interference set memberships, evaluated on the channel
/// parameters.
///
/// With `r21 = h21^2/h22^2`, `r12 = h12^2/h11^2`, `snr1 = h11^2 P1`,
/// `snr2 = h22^2 P2`:
///
/// * `S1`: `1 + snr1 <= r21` and `1 + snr2 <= r12`
/// * `S2`: `1 + snr1 > r21 >= 1` and `r12 >= (snr2/snr1)(r21 - 1) + 1`
/// * `S3`: `1 + snr2 > r12 >= 1` and `r12 < (snr2/snr1)(r21 - 1) + 1`
pub fn strong_membership(sub: &Subchannel) -> Result<SubchannelMembership> {
    if !sub.flags().strong {
        return Err(Error::SubchannelClassMismatch {
            index: 0,
            expected: "strong",
        });
    }
    let r21 = sub.cross_ratio_2().powi(2);
    let r12 = sub.cross_ratio_1().powi(2);
    let snr1 = sub.h11() * sub.h11() * sub.p1();
    let snr2 = sub.h22() * sub.h22() * sub.p2();

    let s1_first = tol::le(1.0 + snr1, r21);
    let s1_second = tol::le(1.0 + snr2, r12);
    // r12 >= (snr2/snr1)(r21 - 1) + 1; multiplied through by snr1 when the
    // ratio is undefined
    let (lhs, rhs) = if snr1 > 0.0 {
        (r12, snr2 / snr1 * (r21 - 1.0) + 1.0)
    } else {
        (0.0, snr2 * (r21 - 1.0))
    };
    let e_le_f = tol::ge(lhs, rhs);

    let in_s1 = s1_first && s1_second;
    let in_s2 = !s1_first && tol::ge(r21, 1.0) && e_le_f;
    let in_s3 = !s1_second && tol::ge(r12, 1.0) && !e_le_f;

    // an E/F tie only matters when A+D is not the strict minimum
    let on_boundary = tol::near(1.0 + snr1, r21)
        || tol::near(1.0 + snr2, r12)
        || (!in_s1 && tol::near(lhs, rhs))
        || sub.p1() == 0.0
        || sub.p2() == 0.0;

    Ok(SubchannelMembership {
        in_s1: Some(in_s1),
        in_s2: Some(in_s2),
        in_s3: Some(in_s3),
        on_boundary,
        ..SubchannelMembership::general(sub)
    })
}

/// Mixed-interference memberships for a sub-channel with `|h12| >= |h11|`
/// and `|h21| <= |h22|`:
/// `M1`: `r12 <= (1 + h22^2 P2) / (1 + h21^2 P2)`, `M2` its complement.
fn mixed_a_membership(sub: &Subchannel) -> SubchannelMembership {
    let r12 = sub.cross_ratio_1().powi(2);
    let bound = (1.0 + sub.h22() * sub.h22() * sub.p2()) / (1.0 + sub.h21() * sub.h21() * sub.p2());
    let in_m1 = tol::le(r12, bound);
    SubchannelMembership {
        in_m1: Some(in_m1),
        in_m2: Some(!in_m1),
        on_boundary: tol::near(r12, bound) || sub.p1() == 0.0,
        ..SubchannelMembership::general(sub)
    }
}

/// `|h21|/|h22| + |h12|/|h11| <= 1`.
pub fn noisy_membership(sub: &Subchannel) -> bool {
    tol::le(sub.cross_ratio_2() + sub.cross_ratio_1(), 1.0)
}

/// Weak interference outside the noisy-interference set, where the sum
/// capacity is not known: `|h21|/|h22| + |h12|/|h11| > 1` with both ratios
/// at most 1.
pub fn remark2_unknown(sub: &Subchannel) -> bool {
    !noisy_membership(sub) && tol::le(sub.cross_ratio_2(), 1.0) && tol::le(sub.cross_ratio_1(), 1.0)
}

fn common_family(memberships: &[SubchannelMembership], families: &[Family]) -> Option<Family> {
    families
        .iter()
        .copied()
        .find(|&f| memberships.iter().all(|m| m.is_in(f)))
}

/// The strong rate-form partition: the first of `A+D`, `E`, `F` that is a
/// minimizer.
fn strong_rate_family(r: &SubchannelRates) -> Family {
    let ad = r.a + r.d;
    if tol::le(ad, r.e.min(r.f)) {
        Family::S1
    } else if tol::le(r.e, r.f) {
        Family::S2
    } else {
        Family::S3
    }
}

fn mixed_rate_family(r: &SubchannelRates) -> Family {
    if tol::le(r.f, r.d + r.g) {
        Family::M1
    } else {
        Family::M2
    }
}

type Term = fn(&SubchannelRates) -> f64;

/// Separable iff some term is a minimizer on every sub-channel, ties
/// counting for every tied term.
fn strong_rate_verdict(rates: &[SubchannelRates]) -> Option<Family> {
    let terms: [(Family, Term); 3] = [
        (Family::S1, |r| r.a + r.d),
        (Family::S2, |r| r.e),
        (Family::S3, |r| r.f),
    ];
    terms.iter().find_map(|&(family, term)| {
        rates
            .iter()
            .all(|r| tol::le(term(r), (r.a + r.d).min(r.e).min(r.f)))
            .then_some(family)
    })
}

fn mixed_rate_verdict(rates: &[SubchannelRates]) -> Option<Family> {
    if rates.iter().all(|r| tol::le(r.f, r.d + r.g)) {
        Some(Family::M1)
    } else if rates.iter().all(|r| tol::le(r.d + r.g, r.f)) {
        Some(Family::M2)
    } else {
        None
    }
}

fn settle(
    memberships: Vec<SubchannelMembership>,
    set_family: Option<Family>,
    rate_family: Option<Family>,
    gap: f64,
) -> SeparabilityVerdict {
    let on_boundary = memberships.iter().any(|m| m.on_boundary);
    // Off the boundaries the set form is authoritative. On a boundary the
    // printed sets can split a tie between two families that both attain the
    // minimum, so the rate inequalities decide.
    let family = if on_boundary { rate_family } else { set_family };
    SeparabilityVerdict {
        verdict: if family.is_some() {
            Verdict::Separable
        } else {
            Verdict::Inseparable
        },
        family,
        memberships,
        gap: Some(gap),
        on_boundary,
        conditional: false,
    }
}

pub fn separable_strong(ch: &ChannelInstance) -> Result<SeparabilityVerdict> {
    let class = classify(ch);
    if !class.admits(AggregateClass::Strong) {
        return Err(Error::ClassMismatch {
            expected: "strong",
            found: class.aggregate,
        });
    }
    let memberships = ch
        .iter()
        .map(strong_membership)
        .collect::<Result<Vec<_>>>()?;
    let rq = rate_quantities(ch);
    let gap = strong_joint_of(&rq) - strong_independent_of(&rq);
    let set_family = common_family(&memberships, &[Family::S1, Family::S2, Family::S3]);
    Ok(settle(
        memberships,
        set_family,
        strong_rate_verdict(&rq.per_subchannel),
        gap,
    ))
}

/// Separability of a mixed channel. Mirrored channels (`|h12| <= |h11|`,
/// `|h21| >= |h22|`) are evaluated with the user labels swapped, so their
/// memberships refer to the relabelled sub-channels.
pub fn separable_mixed(ch: &ChannelInstance) -> Result<SeparabilityVerdict> {
    let oriented = mixed_orientation(ch)?;
    let memberships: Vec<_> = oriented.iter().map(mixed_a_membership).collect();
    let rq = rate_quantities(&oriented);
    let gap = mixed_joint_of(&rq) - mixed_independent_of(&rq);
    let set_family = common_family(&memberships, &[Family::M1, Family::M2]);
    Ok(settle(
        memberships,
        set_family,
        mixed_rate_verdict(&rq.per_subchannel),
        gap,
    ))
}

/// Separability verdict for any channel.
///
/// Strong and mixed channels are decided exactly. A channel with every
/// sub-channel in the noisy-interference set is reported separable, subject
/// to a power condition that is not evaluated here. Every other class is
/// `Unknown`.
pub fn analyze(ch: &ChannelInstance) -> SeparabilityVerdict {
    let class = classify(ch);
    if class.admits(AggregateClass::Strong) {
        return separable_strong(ch).expect("class checked");
    }
    if class.admits(AggregateClass::MixedA) || class.admits(AggregateClass::MixedB) {
        return separable_mixed(ch).expect("class checked");
    }
    let memberships: Vec<_> = ch.iter().map(SubchannelMembership::general).collect();
    let on_boundary = ch
        .iter()
        .any(|s| tol::near(s.cross_ratio_2() + s.cross_ratio_1(), 1.0));
    if class.admits(AggregateClass::Noisy) {
        SeparabilityVerdict {
            verdict: Verdict::Separable,
            family: Some(Family::Noisy),
            memberships,
            gap: None,
            on_boundary,
            conditional: true,
        }
    } else {
        SeparabilityVerdict {
            verdict: Verdict::Unknown,
            family: None,
            memberships,
            gap: None,
            on_boundary,
            conditional: false,
        }
    }
}

/// True when the set-membership verdict agrees with the verdict read off
/// the rate inequalities: per-sub-channel family by family, and for the
/// channel as a whole.
pub fn cross_check_forms(ch: &ChannelInstance) -> Result<bool> {
    let class = classify(ch);
    if class.admits(AggregateClass::Strong) {
        let memberships = ch
            .iter()
            .map(strong_membership)
            .collect::<Result<Vec<_>>>()?;
        let rq = rate_quantities(ch);
        let per_sub = memberships
            .iter()
            .zip(rq.iter())
            .all(|(m, r)| m.on_boundary || m.is_in(strong_rate_family(r)));
        let set_sep = common_family(&memberships, &[Family::S1, Family::S2, Family::S3]).is_some();
        let rate_sep = strong_rate_verdict(&rq.per_subchannel).is_some();
        let boundary = memberships.iter().any(|m| m.on_boundary);
        Ok(per_sub && (boundary || set_sep == rate_sep))
    } else {
        let oriented = mixed_orientation(ch)?;
        let memberships: Vec<_> = oriented.iter().map(mixed_a_membership).collect();
        let rq = rate_quantities(&oriented);
        let per_sub = memberships
            .iter()
            .zip(rq.iter())
            .all(|(m, r)| m.on_boundary || m.is_in(mixed_rate_family(r)));
        let set_sep = common_family(&memberships, &[Family::M1, Family::M2]).is_some();
        let rate_sep = mixed_rate_verdict(&rq.per_subchannel).is_some();
        let boundary = memberships.iter().any(|m| m.on_boundary);
        Ok(per_sub && (boundary || set_sep == rate_sep))
    }
}

/// True when the verdict agrees with the direct capacity comparison
/// `|joint - independent| <= 1e-9`.
pub fn verdict_matches_gap(v: &SeparabilityVerdict) -> bool {
    match (v.verdict, v.gap) {
        (Verdict::Separable, Some(gap)) => gap.abs() <= CAPACITY_TOL,
        (Verdict::Inseparable, Some(gap)) => gap > CAPACITY_TOL,
        _ => true,
    }
}
