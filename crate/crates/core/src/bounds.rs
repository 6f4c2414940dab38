//! Independent-coding outer bound and superposition-coding inner bound on
//! the sum capacity, and certification of inseparable weak channels.
//!
//! The inner bound splits each user's power into a common part, decoded at
//! both receivers, and a private part, decoded only at the intended one.
//! Covariances are diagonal, so every log-determinant factorizes into a sum
//! of per-sub-channel scalar terms. Common rates are limited by the weaker
//! receiver *after* summing over sub-channels, which is where joint coding
//! can gain over per-sub-channel coding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{classify, half_log2_1p, rate_quantities, AggregateClass, ChannelInstance};
use crate::error::{Error, Result};
use crate::optimize::{circle_directions, compass_max, golden_max, pair_directions, unit_grid};
use crate::tol::CAPACITY_TOL;
use crate::VERSION;

/// Upper bound on the independent-coding sum capacity:
/// `sum(min(A + H, D + G, I + J))`.
pub fn outer_bound_independent(ch: &ChannelInstance) -> f64 {
    rate_quantities(ch).sum(|r| (r.a + r.h).min(r.d + r.g).min(r.i + r.j))
}

/// Fraction of each user's power carried by its common message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SplitParams {
    /// One fraction per user, shared by all sub-channels.
    Scalar { beta1: f64, beta2: f64 },
    /// One fraction per user and sub-channel.
    PerSubchannel { beta1: Vec<f64>, beta2: Vec<f64> },
}

impl SplitParams {
    pub fn scalar(beta1: f64, beta2: f64) -> Self {
        SplitParams::Scalar { beta1, beta2 }
    }

    fn validate(&self, m: usize) -> Result<()> {
        let ok = |b: f64| (0.0..=1.0).contains(&b);
        match self {
            SplitParams::Scalar { beta1, beta2 } => {
                if !ok(*beta1) || !ok(*beta2) {
                    return Err(Error::param(
                        "split",
                        format!("fractions must lie in [0, 1], got ({beta1}, {beta2})"),
                    ));
                }
            }
            SplitParams::PerSubchannel { beta1, beta2 } => {
                for v in [beta1, beta2] {
                    if v.len() != m {
                        return Err(Error::DimensionMismatch {
                            expected: m,
                            found: v.len(),
                        });
                    }
                    if let Some(b) = v.iter().find(|&&b| !ok(b)) {
                        return Err(Error::param(
                            "split",
                            format!("fractions must lie in [0, 1], got {b}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn at(&self, m: usize) -> (f64, f64) {
        match self {
            SplitParams::Scalar { beta1, beta2 } => (*beta1, *beta2),
            SplitParams::PerSubchannel { beta1, beta2 } => (beta1[m], beta2[m]),
        }
    }
}

/// Component rates of the superposition scheme for one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerBoundComponents {
    /// User 1 common rate, decodable at both receivers.
    pub r1c: f64,
    pub r2c: f64,
    /// Sum of the common rates, decodable at both receivers.
    pub r12c: f64,
    /// User 1 private rate with user 2's private signal as noise.
    pub r1p: f64,
    pub r2p: f64,
    /// Per-sub-channel noise plus private interference at receiver 1.
    pub z1_diag: Vec<f64>,
    pub z2_diag: Vec<f64>,
    /// `min(r1c + r2c, r12c) + r1p + r2p`
    pub total: f64,
}

#[derive(Default)]
struct Accum {
    c1_rx1: f64,
    c1_rx2: f64,
    c2_rx1: f64,
    c2_rx2: f64,
    c12_rx1: f64,
    c12_rx2: f64,
    p1: f64,
    p2: f64,
}

/// Evaluates the scheme with `beta(m)` giving the split on sub-channel `m`.
/// `z` receives the `(Z1, Z2)` diagonals when present.
fn evaluate(
    ch: &ChannelInstance,
    beta: impl Fn(usize) -> (f64, f64),
    mut z: Option<(&mut Vec<f64>, &mut Vec<f64>)>,
) -> Accum {
    let mut acc = Accum::default();
    for (m, s) in ch.iter().enumerate() {
        let (b1, b2) = beta(m);
        let (g11, g12) = (s.h11() * s.h11(), s.h12() * s.h12());
        let (g21, g22) = (s.h21() * s.h21(), s.h22() * s.h22());
        let (c1, p1) = (b1 * s.p1(), (1.0 - b1) * s.p1());
        let (c2, p2) = (b2 * s.p2(), (1.0 - b2) * s.p2());
        let z1 = 1.0 + g11 * p1 + g21 * p2;
        let z2 = 1.0 + g12 * p1 + g22 * p2;
        acc.c1_rx1 += half_log2_1p(g11 * c1 / z1);
        acc.c1_rx2 += half_log2_1p(g12 * c1 / z2);
        acc.c2_rx1 += half_log2_1p(g21 * c2 / z1);
        acc.c2_rx2 += half_log2_1p(g22 * c2 / z2);
        acc.c12_rx1 += half_log2_1p((g11 * c1 + g21 * c2) / z1);
        acc.c12_rx2 += half_log2_1p((g12 * c1 + g22 * c2) / z2);
        acc.p1 += half_log2_1p(g11 * p1 / (1.0 + g21 * p2));
        acc.p2 += half_log2_1p(g22 * p2 / (1.0 + g12 * p1));
        if let Some((z1d, z2d)) = z.as_mut() {
            z1d.push(z1);
            z2d.push(z2);
        }
    }
    acc
}

impl Accum {
    fn components(&self) -> (f64, f64, f64, f64) {
        let r1c = self.c1_rx1.min(self.c1_rx2);
        let r2c = self.c2_rx1.min(self.c2_rx2);
        let r12c = self.c12_rx1.min(self.c12_rx2);
        let total = (r1c + r2c).min(r12c) + self.p1 + self.p2;
        (r1c, r2c, r12c, total)
    }
}

fn total_at(ch: &ChannelInstance, beta: impl Fn(usize) -> (f64, f64)) -> f64 {
    evaluate(ch, beta, None).components().3
}

/// Superposition-coding achievable sum rate for one common/private split.
pub fn inner_bound_value(
    ch: &ChannelInstance,
    split: &SplitParams,
) -> Result<InnerBoundComponents> {
    split.validate(ch.len())?;
    let mut z1_diag = Vec::with_capacity(ch.len());
    let mut z2_diag = Vec::with_capacity(ch.len());
    let acc = evaluate(ch, |m| split.at(m), Some((&mut z1_diag, &mut z2_diag)));
    let (r1c, r2c, r12c, total) = acc.components();
    Ok(InnerBoundComponents {
        r1c,
        r2c,
        r12c,
        r1p: acc.p1,
        r2p: acc.p2,
        z1_diag,
        z2_diag,
        total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerBoundOptions {
    /// Grid spacing for the split fractions, in `(0, 0.5]`.
    pub grid: f64,
    /// Stop refining once a round improves by less than this many bits.
    pub tol: f64,
    /// Optimize one split per user and sub-channel instead of one per user.
    pub per_subchannel: bool,
    /// Coordinate-descent sweeps in per-sub-channel mode.
    pub sweeps: usize,
    /// Minimum inner-minus-outer gap, in bits, to certify inseparability.
    pub margin: f64,
}

impl Default for InnerBoundOptions {
    fn default() -> Self {
        InnerBoundOptions {
            grid: 0.01,
            tol: 1e-6,
            per_subchannel: false,
            sweeps: 3,
            margin: 1e-3,
        }
    }
}

impl InnerBoundOptions {
    fn validate(&self) -> Result<()> {
        if !(self.grid > 0.0 && self.grid <= 0.5) {
            return Err(Error::param(
                "grid",
                format!("must lie in (0, 0.5], got {}", self.grid),
            ));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::param(
                "tol",
                format!("must be positive, got {}", self.tol),
            ));
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::param(
                "margin",
                format!("must be positive, got {}", self.margin),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// Upper bound on the independent-coding sum capacity.
    pub outer_independent: f64,
    /// Best superposition-coding sum rate found (a joint-coding lower bound).
    pub inner_joint: f64,
    pub best_split: SplitParams,
    pub components: InnerBoundComponents,
    /// `inner_joint - outer_independent`
    pub gap: f64,
    /// Certification threshold in bits.
    pub margin: f64,
    /// The channel is weak and `gap >= margin`: joint coding strictly beats
    /// every independent code, so the channel is inseparable.
    pub inseparable_certified: bool,
}

/// Maximizes the scalar-split objective: a full grid, then alternating
/// golden-section refinement and a compass search from the best few grid
/// local maxima.
fn optimize_scalar(ch: &ChannelInstance, opts: &InnerBoundOptions) -> ((f64, f64), f64) {
    let grid = unit_grid(opts.grid);
    let n = grid.len();
    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| total_at(ch, |_| (grid[k / n], grid[k % n])))
        .collect();

    let at = |i: usize, j: usize| values[i * n + j];
    let mut peaks: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            let v = at(i, j);
            (i.saturating_sub(1)..=(i + 1).min(n - 1))
                .all(|a| (j.saturating_sub(1)..=(j + 1).min(n - 1)).all(|b| at(a, b) <= v))
        })
        .collect();
    // highest first; equal values keep row-major order, i.e. lexicographic
    // on (beta1, beta2)
    peaks.sort_by(|p, q| at(q.0, q.1).total_cmp(&at(p.0, p.1)));
    peaks.truncate(4);

    let objective = |b: &[f64]| total_at(ch, |_| (b[0], b[1]));
    let circles = circle_directions(16);
    let mut best: Option<((f64, f64), f64)> = None;
    for (i, j) in peaks {
        let (mut b1, mut b2, mut v) = (grid[i], grid[j], at(i, j));
        for _ in 0..100 {
            let before = v;
            let (x, fx) = golden_max(
                |x| total_at(ch, |_| (x, b2)),
                (b1 - opts.grid).max(0.0),
                (b1 + opts.grid).min(1.0),
                1e-10,
            );
            if fx > v {
                b1 = x;
                v = fx;
            }
            let (y, fy) = golden_max(
                |y| total_at(ch, |_| (b1, y)),
                (b2 - opts.grid).max(0.0),
                (b2 + opts.grid).min(1.0),
                1e-10,
            );
            if fy > v {
                b2 = y;
                v = fy;
            }
            if v - before < opts.tol {
                break;
            }
        }
        let (b, v) = compass_max(objective, &[b1, b2], v, opts.grid, 1e-10, &circles);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some(((b[0], b[1]), v));
        }
    }
    best.expect("the grid always has a maximum")
}

/// Coordinate descent over the per-sub-channel splits, starting from a
/// scalar split, then a pattern search along axis and pairwise-diagonal
/// moves to get off the kinks where coordinate moves stall.
fn optimize_per_subchannel(
    ch: &ChannelInstance,
    opts: &InnerBoundOptions,
    start: (f64, f64),
) -> (Vec<f64>, Vec<f64>, f64) {
    let m = ch.len();
    let mut betas = vec![start.0; m];
    betas.extend(std::iter::repeat_n(start.1, m));
    let eval = |b: &[f64]| total_at(ch, |k| (b[k], b[m + k]));
    let mut value = eval(&betas);
    let grid = unit_grid(opts.grid);

    for _ in 0..opts.sweeps {
        for coord in 0..2 * m {
            let mut trial = betas.clone();
            let mut line = |x: f64| {
                trial[coord] = x;
                eval(&trial)
            };
            let (mut bx, mut bv) = (betas[coord], value);
            for &x in &grid {
                let v = line(x);
                if v > bv {
                    (bx, bv) = (x, v);
                }
            }
            let (x, v) = golden_max(
                line,
                (bx - opts.grid).max(0.0),
                (bx + opts.grid).min(1.0),
                1e-10,
            );
            if v > bv {
                (bx, bv) = (x, v);
            }
            if bv > value {
                betas[coord] = bx;
                value = bv;
            }
        }
    }
    let (mut betas, value) = compass_max(
        eval,
        &betas,
        value,
        opts.grid,
        1e-10,
        &pair_directions(2 * m),
    );
    let beta2 = betas.split_off(m);
    (betas, beta2, value)
}

/// Maximizes the superposition inner bound over common/private splits and
/// compares it with the independent-coding outer bound.
pub fn optimize_inner_bound(
    ch: &ChannelInstance,
    opts: &InnerBoundOptions,
) -> Result<BoundsReport> {
    opts.validate()?;
    let ((b1, b2), _) = optimize_scalar(ch, opts);
    let best_split = if opts.per_subchannel {
        let (beta1, beta2, _) = optimize_per_subchannel(ch, opts, (b1, b2));
        SplitParams::PerSubchannel { beta1, beta2 }
    } else {
        SplitParams::Scalar {
            beta1: b1,
            beta2: b2,
        }
    };
    let components = inner_bound_value(ch, &best_split)?;
    let outer = outer_bound_independent(ch);
    let gap = components.total - outer;
    let weak = classify(ch).admits(AggregateClass::Weak);
    Ok(BoundsReport {
        outer_independent: outer,
        inner_joint: components.total,
        best_split,
        components,
        gap,
        margin: opts.margin,
        inseparable_certified: weak && gap >= opts.margin,
    })
}

/// Self-contained evidence that a weak channel is inseparable: a split whose
/// joint-coding inner bound exceeds the independent-coding outer bound by at
/// least `margin` bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub version: String,
    pub channel: ChannelInstance,
    pub split: SplitParams,
    pub inner: f64,
    pub outer: f64,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draw_index: Option<u64>,
    /// How the channel was drawn, when it came from a randomized search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<String>,
}

impl Certificate {
    /// Recomputes both bounds from the stored channel and split.
    pub fn verify(&self) -> Result<bool> {
        let inner = inner_bound_value(&self.channel, &self.split)?.total;
        let outer = outer_bound_independent(&self.channel);
        Ok(classify(&self.channel).admits(AggregateClass::Weak)
            && (inner - self.inner).abs() <= CAPACITY_TOL
            && (outer - self.outer).abs() <= CAPACITY_TOL
            && inner - outer >= self.margin)
    }
}

/// Searches for a split certifying that a weak channel is inseparable.
pub fn inseparability_certificate(
    ch: &ChannelInstance,
    opts: &InnerBoundOptions,
) -> Result<Option<Certificate>> {
    let class = classify(ch);
    if !class.admits(AggregateClass::Weak) {
        return Err(Error::ClassMismatch {
            expected: "weak",
            found: class.aggregate,
        });
    }
    let report = optimize_inner_bound(ch, opts)?;
    Ok(report.inseparable_certified.then(|| Certificate {
        schema: 1,
        version: VERSION.to_string(),
        channel: ch.clone(),
        split: report.best_split,
        inner: report.inner_joint,
        outer: report.outer_independent,
        margin: opts.margin,
        seed: None,
        draw_index: None,
        distribution: None,
    }))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::capacity::tin_sum_rate;
    use crate::channel::Subchannel;

    fn one(h11: f64, h12: f64, h21: f64, h22: f64) -> ChannelInstance {
        ChannelInstance::single(Subchannel::new(h11, h12, h21, h22, 1.0, 1.0).unwrap())
    }

    #[test]
    fn outer_bound_examples() {
        assert_abs_diff_eq!(
            outer_bound_independent(&one(1.0, 0.4, 0.4, 1.0)),
            0.948453253517948,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            outer_bound_independent(&one(1.0, 2.0, 2.0, 1.0)),
            0.631517202916897,
            epsilon = 1e-12
        );
        let off = one(1.0, 0.4, 0.4, 1.0).scale_powers(0.0).unwrap();
        assert_eq!(outer_bound_independent(&off), 0.0);
    }

    #[test]
    fn inner_bound_at_full_common_power() {
        let c =
            inner_bound_value(&one(1.0, 2.0, 2.0, 1.0), &SplitParams::scalar(1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(c.r1c, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.r2c, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.r12c, 1.29248125036058, epsilon = 1e-12);
        assert_eq!((c.r1p, c.r2p), (0.0, 0.0));
        assert_eq!(
            (c.z1_diag.clone(), c.z2_diag.clone()),
            (vec![1.0], vec![1.0])
        );
        assert_abs_diff_eq!(c.total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inner_bound_without_common_power_is_tin() {
        let e1 = one(1.0, 2.0, 2.0, 1.0);
        let c = inner_bound_value(&e1, &SplitParams::scalar(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(c.total, 0.263034405833794, epsilon = 1e-12);
        assert_abs_diff_eq!(c.total, tin_sum_rate(&e1), epsilon = 1e-12);
        assert_eq!((c.r1c, c.r2c, c.r12c), (0.0, 0.0, 0.0));
        assert!(c.z1_diag.iter().chain(&c.z2_diag).all(|&z| z >= 1.0));
    }

    #[test]
    fn split_validation() {
        let e1 = one(1.0, 2.0, 2.0, 1.0);
        assert!(inner_bound_value(&e1, &SplitParams::scalar(1.5, 0.0)).is_err());
        assert!(inner_bound_value(&e1, &SplitParams::scalar(-0.1, 0.0)).is_err());
        let wrong_len = SplitParams::PerSubchannel {
            beta1: vec![0.5, 0.5],
            beta2: vec![0.5, 0.5],
        };
        assert!(matches!(
            inner_bound_value(&e1, &wrong_len),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn optimizer_examples() {
        let r =
            optimize_inner_bound(&one(1.0, 2.0, 2.0, 1.0), &InnerBoundOptions::default()).unwrap();
        assert_abs_diff_eq!(r.inner_joint, 1.0, epsilon = 1e-6);
        assert!(!r.inseparable_certified);

        let e4 = one(1.0, 0.4, 0.4, 1.0);
        let r = optimize_inner_bound(&e4, &InnerBoundOptions::default()).unwrap();
        assert!(r.inner_joint >= tin_sum_rate(&e4) - 1e-9);
        assert!(r.inner_joint <= r.outer_independent + 1e-9);

        let off = e4.scale_powers(0.0).unwrap();
        assert_eq!(
            optimize_inner_bound(&off, &InnerBoundOptions::default())
                .unwrap()
                .inner_joint,
            0.0
        );
    }

    #[test]
    fn optimizer_rejects_bad_options() {
        let e1 = one(1.0, 2.0, 2.0, 1.0);
        for opts in [
            InnerBoundOptions {
                grid: 0.0,
                ..Default::default()
            },
            InnerBoundOptions {
                grid: 0.6,
                ..Default::default()
            },
            InnerBoundOptions {
                tol: 0.0,
                ..Default::default()
            },
            InnerBoundOptions {
                margin: -1.0,
                ..Default::default()
            },
        ] {
            assert!(optimize_inner_bound(&e1, &opts).is_err());
        }
    }

    #[test]
    fn per_subchannel_mode_never_loses_to_scalar() {
        let ch = ChannelInstance::new(vec![
            Subchannel::new(1.0, 0.9, 0.2, 1.0, 30.0, 2.0).unwrap(),
            Subchannel::new(1.0, 0.3, 0.8, 1.0, 3.0, 50.0).unwrap(),
        ])
        .unwrap();
        let scalar = optimize_inner_bound(&ch, &InnerBoundOptions::default()).unwrap();
        let per = optimize_inner_bound(
            &ch,
            &InnerBoundOptions {
                per_subchannel: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(per.inner_joint >= scalar.inner_joint - 1e-12);
        assert!(matches!(per.best_split, SplitParams::PerSubchannel { .. }));
    }

    #[test]
    fn certificate_requires_weak_channel() {
        let opts = InnerBoundOptions::default();
        assert!(inseparability_certificate(&one(1.0, 2.0, 2.0, 1.0), &opts).is_err());
        assert_eq!(
            inseparability_certificate(&one(1.0, 0.4, 0.4, 1.0), &opts).unwrap(),
            None
        );
        let off = one(1.0, 0.4, 0.4, 1.0).scale_powers(0.0).unwrap();
        assert_eq!(inseparability_certificate(&off, &opts).unwrap(), None);
    }

    fn mirrored() -> ChannelInstance {
        ChannelInstance::new(vec![
            Subchannel::new(1.0, 0.99, 0.2, 1.0, 100.0, 100.0).unwrap(),
            Subchannel::new(1.0, 0.2, 0.99, 1.0, 100.0, 100.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn mirrored_weak_channel_is_certified_inseparable() {
        let ch = mirrored();
        let b = 0.907634427999518;
        let split = SplitParams::PerSubchannel {
            beta1: vec![1.0, b],
            beta2: vec![b, 1.0],
        };
        assert_abs_diff_eq!(
            inner_bound_value(&ch, &split).unwrap().total,
            8.62649588726314,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            outer_bound_independent(&ch),
            7.66540625922023,
            epsilon = 1e-12
        );

        let opts = InnerBoundOptions {
            per_subchannel: true,
            ..Default::default()
        };
        let cert = inseparability_certificate(&ch, &opts).unwrap().unwrap();
        assert_abs_diff_eq!(cert.inner - cert.outer, 0.961089628042909, epsilon = 1e-8);
        assert!(cert.verify().unwrap());

        // one split per user stays below the outer bound here
        let scalar = optimize_inner_bound(&ch, &InnerBoundOptions::default()).unwrap();
        assert!(scalar.gap < 0.0 && !scalar.inseparable_certified);
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let opts = InnerBoundOptions {
            per_subchannel: true,
            ..Default::default()
        };
        let cert = inseparability_certificate(&mirrored(), &opts)
            .unwrap()
            .unwrap();
        let mut bad = cert.clone();
        bad.inner += 1e-6;
        assert!(!bad.verify().unwrap());
        let mut bad = cert.clone();
        bad.margin = 2.0;
        assert!(!bad.verify().unwrap());
        let mut bad = cert;
        bad.channel = bad.channel.scale_powers(0.5).unwrap();
        assert!(!bad.verify().unwrap());
    }
}
