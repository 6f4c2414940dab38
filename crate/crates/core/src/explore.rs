//! Parameter-space exploration: classification sweeps over the plane of
//! cross-gain ratios, randomized search for inseparable weak channels, and
//! the low-SNR behaviour of the joint/independent capacity ratio.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{optimize_inner_bound, Certificate, InnerBoundOptions, SplitParams};
use crate::capacity::{independent_sum_capacity, joint_sum_capacity};
use crate::channel::{classify, AggregateClass, ChannelInstance, Subchannel};
use crate::error::{Error, Result};
use crate::separability::{analyze, Family, SubchannelMembership, Verdict};
use crate::VERSION;

/// Direct gains and powers shared by every grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepTemplate {
    pub h11: f64,
    pub h22: f64,
    pub p1: f64,
    pub p2: f64,
}

/// Upper bound on grid points times sub-channels in one sweep.
pub const MAX_SWEEP_CELLS: f64 = 1e7;

/// Inclusive range `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AxisRange {
    fn validate(&self, name: &'static str) -> Result<()> {
        let finite = self.start.is_finite() && self.stop.is_finite() && self.step.is_finite();
        if !finite || self.start <= 0.0 || self.stop < self.start || self.step <= 0.0 {
            return Err(Error::param(
                name,
                format!(
                    "need 0 < start <= stop and step > 0, got start {} stop {} step {}",
                    self.start, self.stop, self.step
                ),
            ));
        }
        Ok(())
    }

    fn len(&self) -> f64 {
        ((self.stop - self.start) / self.step + 1e-9).floor() + 1.0
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.len() as usize;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// How the grid point is laid out over the `M` sub-channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Replication {
    /// Every sub-channel has cross ratios `(x, y)`.
    #[default]
    Identical,
    /// Even sub-channels have `(x, y)`, odd ones the transposed `(y, x)`.
    Mirrored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub template: SweepTemplate,
    /// `|h12| / |h11|`
    pub x: AxisRange,
    /// `|h21| / |h22|`
    pub y: AxisRange,
    #[serde(default = "one")]
    pub subchannels: usize,
    #[serde(default)]
    pub replication: Replication,
}

fn one() -> usize {
    1
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        self.x.validate("x")?;
        self.y.validate("y")?;
        if self.subchannels == 0 {
            return Err(Error::EmptyChannel);
        }
        let cells = self.x.len() * self.y.len() * self.subchannels as f64;
        if cells > MAX_SWEEP_CELLS {
            return Err(Error::param(
                "step",
                format!("grid of {cells} sub-channel evaluations exceeds the limit of {MAX_SWEEP_CELLS}"),
            ));
        }
        Subchannel::new(
            self.template.h11,
            self.template.h11,
            self.template.h22,
            self.template.h22,
            self.template.p1,
            self.template.p2,
        )?;
        Ok(())
    }

    /// The channel at grid point `(x, y)`.
    pub fn channel_at(&self, x: f64, y: f64) -> Result<ChannelInstance> {
        let t = &self.template;
        let subs = (0..self.subchannels)
            .map(|k| {
                let (rx, ry) = match self.replication {
                    Replication::Mirrored if k % 2 == 1 => (y, x),
                    _ => (x, y),
                };
                Subchannel::new(t.h11, rx * t.h11, ry * t.h22, t.h22, t.p1, t.p2)
            })
            .collect::<Result<Vec<_>>>()?;
        ChannelInstance::new(subs)
    }
}

/// One grid point of a sweep. Membership flags are true when every
/// sub-channel is in the set, `None` when the set does not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x_ratio: f64,
    pub y_ratio: f64,
    pub aggregate: AggregateClass,
    pub verdict: Verdict,
    /// Certifying family of a separable point; `None` on ties.
    pub family: Option<Family>,
    /// The point lies on a class or set boundary.
    pub tie: bool,
    pub in_s1: Option<bool>,
    pub in_s2: Option<bool>,
    pub in_s3: Option<bool>,
    pub in_m1: Option<bool>,
    pub in_m2: Option<bool>,
    pub in_n: bool,
    pub remark2_unknown: bool,
}

fn all_in(
    ms: &[SubchannelMembership],
    get: fn(&SubchannelMembership) -> Option<bool>,
) -> Option<bool> {
    ms.iter()
        .map(get)
        .try_fold(true, |acc, v| v.map(|b| acc && b))
}

fn sweep_row(spec: &SweepSpec, x: f64, y: f64) -> Result<SweepRow> {
    let ch = spec.channel_at(x, y)?;
    let class = classify(&ch);
    let v = analyze(&ch);
    let class_tie = class.per_subchannel.iter().any(|f| {
        [f.strong, f.mixed_a, f.mixed_b, f.weak]
            .iter()
            .filter(|&&b| b)
            .count()
            > 1
    });
    let tie = class_tie || v.on_boundary;
    let ms = &v.memberships;
    Ok(SweepRow {
        x_ratio: x,
        y_ratio: y,
        aggregate: class.aggregate,
        verdict: v.verdict,
        family: if tie { None } else { v.family },
        tie,
        in_s1: all_in(ms, |m| m.in_s1),
        in_s2: all_in(ms, |m| m.in_s2),
        in_s3: all_in(ms, |m| m.in_s3),
        in_m1: all_in(ms, |m| m.in_m1),
        in_m2: all_in(ms, |m| m.in_m2),
        in_n: ms.iter().all(|m| m.in_n),
        remark2_unknown: ms.iter().all(|m| m.in_remark2_unknown),
    })
}

/// Classifies every point of the `(|h12|/|h11|, |h21|/|h22|)` grid; rows are
/// ordered by x, then y.
pub fn sweep_plane(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let xs = spec.x.points();
    let ys = spec.y.points();
    let points: Vec<(f64, f64)> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect();
    points
        .par_iter()
        .map(|&(x, y)| sweep_row(spec, x, y))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub inner: InnerBoundOptions,
    /// Log-uniform range of `|h12|/|h11|` and `|h21|/|h22|`.
    pub cross_range: (f64, f64),
    /// Log-uniform range of the powers.
    pub power_range: (f64, f64),
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            // a single split per user never beats the outer bound on this
            // distribution; one split per sub-channel does
            inner: InnerBoundOptions {
                grid: 0.05,
                per_subchannel: true,
                ..InnerBoundOptions::default()
            },
            cross_range: (0.05, 1.0),
            power_range: (0.1, 100.0),
        }
    }
}

impl SearchOptions {
    pub fn describe(&self) -> String {
        format!(
            "h11=h22=1; h12,h21 log-uniform in [{}, {}]; p1,p2 log-uniform in [{}, {}]; chacha8 stream = draw index",
            self.cross_range.0, self.cross_range.1, self.power_range.0, self.power_range.1
        )
    }
}

/// One evaluated draw of the inseparability search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub draw_index: u64,
    pub channel: ChannelInstance,
    pub split: SplitParams,
    pub inner: f64,
    pub outer: f64,
    /// `inner - outer`
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub seed: u64,
    pub budget: u64,
    pub subchannels: usize,
    pub evaluated: u64,
    pub distribution: String,
    pub best: Candidate,
    pub certificate: Option<Certificate>,
}

fn log_uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        return lo;
    }
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// The weak channel drawn for `(seed, index)`; independent of the order in
/// which draws are evaluated.
pub fn draw_weak_channel(
    seed: u64,
    index: u64,
    m: usize,
    opts: &SearchOptions,
) -> Result<ChannelInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let subs = (0..m)
        .map(|_| {
            let h12 = log_uniform(&mut rng, opts.cross_range);
            let h21 = log_uniform(&mut rng, opts.cross_range);
            let p1 = log_uniform(&mut rng, opts.power_range);
            let p2 = log_uniform(&mut rng, opts.power_range);
            Subchannel::new(1.0, h12, h21, 1.0, p1, p2)
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelInstance::new(subs)
}

fn evaluate_draw(seed: u64, index: u64, m: usize, opts: &SearchOptions) -> Result<Candidate> {
    let channel = draw_weak_channel(seed, index, m, opts)?;
    let report = optimize_inner_bound(&channel, &opts.inner)?;
    Ok(Candidate {
        draw_index: index,
        channel,
        split: report.best_split,
        inner: report.inner_joint,
        outer: report.outer_independent,
        gap: report.gap,
    })
}

/// Draws `budget` random weak channels and keeps the one where the
/// superposition inner bound exceeds the independent-coding outer bound the
/// most. Emits a certificate when that gap reaches the margin.
pub fn search_inseparable(
    seed: u64,
    budget: u64,
    m: usize,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    if budget == 0 {
        return Err(Error::param("budget", "must be at least 1"));
    }
    if m < 2 {
        return Err(Error::param(
            "subchannels",
            format!("need at least 2, got {m}"),
        ));
    }
    let (lo, hi) = opts.cross_range;
    if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
        return Err(Error::param(
            "cross_range",
            format!("need 0 < lo <= hi <= 1, got ({lo}, {hi})"),
        ));
    }
    let (lo, hi) = opts.power_range;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::param(
            "power_range",
            format!("need 0 < lo <= hi, got ({lo}, {hi})"),
        ));
    }

    let best = (0..budget)
        .into_par_iter()
        .map(|i| evaluate_draw(seed, i, m, opts))
        .try_reduce_with(|a, b| {
            // larger gap wins, then the earlier draw, independent of
            // how the work was split
            Ok(
                if b.gap > a.gap || (b.gap == a.gap && b.draw_index < a.draw_index) {
                    b
                } else {
                    a
                },
            )
        })
        .expect("budget is positive")?;

    let distribution = opts.describe();
    let certificate = (best.gap >= opts.inner.margin).then(|| Certificate {
        schema: 1,
        version: VERSION.to_string(),
        channel: best.channel.clone(),
        split: best.split.clone(),
        inner: best.inner,
        outer: best.outer,
        margin: opts.inner.margin,
        seed: Some(seed),
        draw_index: Some(best.draw_index),
        distribution: Some(distribution.clone()),
    });
    Ok(SearchOutcome {
        seed,
        budget,
        subchannels: m,
        evaluated: budget,
        distribution,
        best,
        certificate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub scale: f64,
    pub joint: f64,
    pub independent: f64,
    /// `joint / independent`, 1 when both vanish.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSeries {
    /// Ordered by strictly decreasing scale.
    pub points: Vec<RatioPoint>,
}

/// Joint over independent sum capacity with every power multiplied by each
/// of `scales`. Scales are sorted in decreasing order and deduplicated.
pub fn asymptotic_ratio(ch: &ChannelInstance, scales: &[f64]) -> Result<RatioSeries> {
    if scales.is_empty() {
        return Err(Error::param("scales", "need at least one scale"));
    }
    if let Some(s) = scales.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::param(
            "scales",
            format!("must be positive and finite, got {s}"),
        ));
    }
    // class check up front so that an empty-power corner cannot hide it
    joint_sum_capacity(ch)?;
    let mut sorted = scales.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();
    let points = sorted
        .into_iter()
        .map(|scale| {
            let scaled = ch.scale_powers(scale)?;
            let joint = joint_sum_capacity(&scaled)?;
            let independent = independent_sum_capacity(&scaled)?;
            let ratio = if joint == 0.0 && independent == 0.0 {
                1.0
            } else {
                joint / independent
            };
            Ok(RatioPoint {
                scale,
                joint,
                independent,
                ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioSeries { points })
}
