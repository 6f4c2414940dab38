//! Numerical analysis of two-sided parallel Gaussian interference channels.
//!
//! A channel is a set of `M` independent real scalar two-user Gaussian
//! interference sub-channels. This crate evaluates the closed-form sum
//! capacities under joint coding (one code over all sub-channels) and
//! independent coding (one code per sub-channel) for the strong and mixed
//! interference classes, decides separability (whether the two coincide),
//! and evaluates the independent-coding outer bound and the
//! superposition-coding inner bound used to exhibit inseparable weak
//! channels.
//!
//! All rates are in bits per channel use.

pub mod bounds;
pub mod capacity;
pub mod channel;
pub mod error;
pub mod explore;
pub mod linalg;
pub mod optimize;
pub mod separability;
pub mod tol;

pub use bounds::{
    inner_bound_value, inseparability_certificate, optimize_inner_bound, outer_bound_independent,
    BoundsReport, Certificate, InnerBoundComponents, InnerBoundOptions, SplitParams,
};
pub use capacity::{
    check_condition_21, independent_sum_capacity, joint_sum_capacity, midpoint_concavity_check,
    region_bound_values, strong_region_polygon, sum_capacity_mixed_independent,
    sum_capacity_mixed_joint, sum_capacity_strong_independent, sum_capacity_strong_joint,
    tin_sum_rate, Concavity, Condition21, RegionBounds, RegionPolygon,
};
pub use channel::{
    classify, rate_quantities, AggregateClass, ChannelClass, ChannelInstance, RateQuantities,
    Subchannel, SubchannelFlags, SubchannelRates,
};
pub use error::{Error, Result};
pub use explore::{
    asymptotic_ratio, draw_weak_channel, search_inseparable, sweep_plane, AxisRange, Candidate,
    RatioPoint, RatioSeries, Replication, SearchOptions, SearchOutcome, SweepRow, SweepSpec,
    SweepTemplate,
};
pub use linalg::CovarianceMatrix;
pub use separability::{
    analyze, cross_check_forms, noisy_membership, remark2_unknown, separable_mixed,
    separable_strong, strong_membership, verdict_matches_gap, Family, SeparabilityVerdict,
    SubchannelMembership, Verdict,
};

/// Crate version, embedded in reports and certificates.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
