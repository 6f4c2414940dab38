//! Closed-form sum capacities of strong and mixed channels, the
//! treating-interference-as-noise sum rate, the strong capacity region, and
//! the matrix checks behind the optimality of diagonal covariances.

use std::borrow::Cow;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::{classify, rate_quantities, AggregateClass, ChannelInstance, RateQuantities};
use crate::error::{Error, Result};
use crate::linalg::{congruence, half_log2_det, CovarianceMatrix};
use crate::tol::{self, CAPACITY_TOL, PSD_TOL};

fn require_strong(ch: &ChannelInstance) -> Result<()> {
    let class = classify(ch);
    if class.admits(AggregateClass::Strong) {
        Ok(())
    } else {
        Err(Error::ClassMismatch {
            expected: "strong",
            found: class.aggregate,
        })
    }
}

/// Returns the channel oriented so that it is mixed with `|h12| >= |h11|`
/// and `|h21| <= |h22|`, swapping the user labels of a mirrored channel.
pub(crate) fn mixed_orientation(ch: &ChannelInstance) -> Result<Cow<'_, ChannelInstance>> {
    let class = classify(ch);
    if class.admits(AggregateClass::MixedA) {
        Ok(Cow::Borrowed(ch))
    } else if class.admits(AggregateClass::MixedB) {
        Ok(Cow::Owned(ch.swapped()))
    } else {
        Err(Error::ClassMismatch {
            expected: "mixed",
            found: class.aggregate,
        })
    }
}

pub(crate) fn strong_joint_of(rq: &RateQuantities) -> f64 {
    rq.sum(|r| r.a + r.d)
        .min(rq.sum(|r| r.e))
        .min(rq.sum(|r| r.f))
}

pub(crate) fn strong_independent_of(rq: &RateQuantities) -> f64 {
    rq.sum(|r| (r.a + r.d).min(r.e).min(r.f))
}

pub(crate) fn mixed_joint_of(rq: &RateQuantities) -> f64 {
    rq.sum(|r| r.f).min(rq.sum(|r| r.d + r.g))
}

pub(crate) fn mixed_independent_of(rq: &RateQuantities) -> f64 {
    rq.sum(|r| r.f.min(r.d + r.g))
}

/// Joint-coding sum capacity of a strong channel:
/// `min(sum(A+D), sum(E), sum(F))`.
pub fn sum_capacity_strong_joint(ch: &ChannelInstance) -> Result<f64> {
    require_strong(ch)?;
    Ok(strong_joint_of(&rate_quantities(ch)))
}

/// Independent-coding sum capacity of a strong channel:
/// `sum(min(A+D, E, F))`.
pub fn sum_capacity_strong_independent(ch: &ChannelInstance) -> Result<f64> {
    require_strong(ch)?;
    Ok(strong_independent_of(&rate_quantities(ch)))
}

/// Joint-coding sum capacity of a mixed channel: `min(sum(F), sum(D+G))`
/// in the orientation where user 1 causes strong interference.
pub fn sum_capacity_mixed_joint(ch: &ChannelInstance) -> Result<f64> {
    let ch = mixed_orientation(ch)?;
    Ok(mixed_joint_of(&rate_quantities(&ch)))
}

/// Independent-coding sum capacity of a mixed channel:
/// `sum(min(F, D+G))`.
pub fn sum_capacity_mixed_independent(ch: &ChannelInstance) -> Result<f64> {
    let ch = mixed_orientation(ch)?;
    Ok(mixed_independent_of(&rate_quantities(&ch)))
}

/// Joint-coding sum capacity for any channel whose capacity is known in
/// closed form (strong, else mixed).
pub fn joint_sum_capacity(ch: &ChannelInstance) -> Result<f64> {
    if require_strong(ch).is_ok() {
        sum_capacity_strong_joint(ch)
    } else {
        sum_capacity_mixed_joint(ch).map_err(|_| Error::ClassMismatch {
            expected: "strong or mixed",
            found: classify(ch).aggregate,
        })
    }
}

pub fn independent_sum_capacity(ch: &ChannelInstance) -> Result<f64> {
    if require_strong(ch).is_ok() {
        sum_capacity_strong_independent(ch)
    } else {
        sum_capacity_mixed_independent(ch).map_err(|_| Error::ClassMismatch {
            expected: "strong or mixed",
            found: classify(ch).aggregate,
        })
    }
}

/// Sum rate of single-user decoding on every sub-channel, `sum(G + H)`.
/// Achievable for every channel.
pub fn tin_sum_rate(ch: &ChannelInstance) -> f64 {
    rate_quantities(ch).sum(|r| r.g + r.h)
}

/// A convex polygon in the `(R1, R2)` plane, vertices counterclockwise from
/// the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPolygon {
    pub vertices: Vec<(f64, f64)>,
}

/// Capacity region of a strong channel at full power on every sub-channel:
/// `R1 <= sum(A)`, `R2 <= sum(D)`, `R1 + R2 <= min(sum(E), sum(F))`.
pub fn strong_region_polygon(ch: &ChannelInstance) -> Result<RegionPolygon> {
    require_strong(ch)?;
    let rq = rate_quantities(ch);
    let r1 = rq.sum(|r| r.a);
    let r2 = rq.sum(|r| r.d);
    let sum = rq.sum(|r| r.e).min(rq.sum(|r| r.f));

    let candidates = [
        (0.0, 0.0),
        (r1, 0.0),
        (r1, (sum - r1).clamp(0.0, r2)),
        ((sum - r2).clamp(0.0, r1), r2),
        (0.0, r2),
    ];
    let same =
        |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).abs() <= 1e-12 && (p.1 - q.1).abs() <= 1e-12;
    let mut vertices: Vec<(f64, f64)> = Vec::with_capacity(5);
    for v in candidates {
        if vertices.last().is_none_or(|&last| !same(last, v)) {
            vertices.push(v);
        }
    }
    while vertices.len() > 1 && same(vertices[0], *vertices.last().unwrap()) {
        vertices.pop();
    }
    Ok(RegionPolygon { vertices })
}

/// The four log-determinant bounds of the strong capacity region for given
/// input covariances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionBounds {
    /// `0.5 log2 |I + H11 S1 H11^T|`
    pub rate1: f64,
    /// `0.5 log2 |I + H22 S2 H22^T|`
    pub rate2: f64,
    /// `0.5 log2 |I + H11 S1 H11^T + H21 S2 H21^T|`
    pub sum_rx1: f64,
    /// `0.5 log2 |I + H12 S1 H12^T + H22 S2 H22^T|`
    pub sum_rx2: f64,
}

impl RegionBounds {
    pub fn as_array(&self) -> [f64; 4] {
        [self.rate1, self.rate2, self.sum_rx1, self.sum_rx2]
    }
}

fn check_power_constraint(s: &CovarianceMatrix, p: &[f64], name: &'static str) -> Result<()> {
    if s.dim() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: s.dim(),
        });
    }
    for (m, (&sd, &pm)) in s.diag().iter().zip(p).enumerate() {
        if sd > pm + PSD_TOL * pm.max(1.0) {
            return Err(Error::InvalidCovariance(format!(
                "{name}: diagonal entry {m} is {sd}, above the power constraint {pm}"
            )));
        }
    }
    Ok(())
}

struct Gains {
    h11: Vec<f64>,
    h12: Vec<f64>,
    h21: Vec<f64>,
    h22: Vec<f64>,
    p1: Vec<f64>,
    p2: Vec<f64>,
}

impl Gains {
    fn of(ch: &ChannelInstance) -> Self {
        let col = |f: fn(&crate::channel::Subchannel) -> f64| ch.iter().map(f).collect::<Vec<_>>();
        Gains {
            h11: col(|s| s.h11()),
            h12: col(|s| s.h12()),
            h21: col(|s| s.h21()),
            h22: col(|s| s.h22()),
            p1: col(|s| s.p1()),
            p2: col(|s| s.p2()),
        }
    }
}

pub fn region_bound_values(
    ch: &ChannelInstance,
    s1: &CovarianceMatrix,
    s2: &CovarianceMatrix,
) -> Result<RegionBounds> {
    let g = Gains::of(ch);
    check_power_constraint(s1, &g.p1, "S1")?;
    check_power_constraint(s2, &g.p2, "S2")?;
    let n = ch.len();
    let id = DMatrix::<f64>::identity(n, n);
    let t11 = congruence(&g.h11, s1.matrix());
    let t12 = congruence(&g.h12, s1.matrix());
    let t21 = congruence(&g.h21, s2.matrix());
    let t22 = congruence(&g.h22, s2.matrix());
    Ok(RegionBounds {
        rate1: half_log2_det(&id + &t11),
        rate2: half_log2_det(&id + &t22),
        sum_rx1: half_log2_det(&id + &t11 + &t21),
        sum_rx2: half_log2_det(&id + &t12 + &t22),
    })
}

/// Both sides of the determinant-ratio inequality that makes diagonal
/// covariances optimal for mixed channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition21 {
    pub holds: bool,
    /// `|I + H22^2 S2| / |I + H21^2 S2|`
    pub lhs: f64,
    /// `|I + H22^2 P2| / |I + H21^2 P2|`
    pub rhs: f64,
}

/// Checks `|I + H22^2 S2| / |I + H21^2 S2| <= |I + H22^2 P2| / |I + H21^2 P2|`
/// for a covariance `S2` whose diagonal equals the powers `P2`.
pub fn check_condition_21(ch: &ChannelInstance, s2: &CovarianceMatrix) -> Result<Condition21> {
    for (index, sub) in ch.iter().enumerate() {
        if !tol::le(sub.h21().abs(), sub.h22().abs()) {
            return Err(Error::SubchannelClassMismatch {
                index,
                expected: "such that |h21| <= |h22|",
            });
        }
    }
    let g = Gains::of(ch);
    if s2.dim() != ch.len() {
        return Err(Error::DimensionMismatch {
            expected: ch.len(),
            found: s2.dim(),
        });
    }
    for (m, (&sd, &pm)) in s2.diag().iter().zip(&g.p2).enumerate() {
        if (sd - pm).abs() > PSD_TOL * pm.max(1.0) {
            return Err(Error::InvalidCovariance(format!(
                "S2: diagonal entry {m} is {sd}, expected the power {pm}"
            )));
        }
    }
    let n = ch.len();
    let id = DMatrix::<f64>::identity(n, n);
    let num = (&id + congruence(&g.h22, s2.matrix())).lu().determinant();
    let den = (&id + congruence(&g.h21, s2.matrix())).lu().determinant();
    let lhs = num / den;
    let rhs: f64 = g
        .h22
        .iter()
        .zip(&g.h21)
        .zip(&g.p2)
        .map(|((h22, h21), p)| (1.0 + h22 * h22 * p) / (1.0 + h21 * h21 * p))
        .product();
    let holds = 0.5 * lhs.log2() <= 0.5 * rhs.log2() + CAPACITY_TOL;
    Ok(Condition21 { holds, lhs, rhs })
}

/// Outcome of a midpoint concavity test of the joint sum capacity as a
/// function of the power constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Concavity {
    pub ok: bool,
    /// `C(lambda P' + (1 - lambda) P'') - (lambda C(P') + (1 - lambda) C(P''))`
    pub slack: f64,
}

pub fn midpoint_concavity_check(
    ch_a: &ChannelInstance,
    ch_b: &ChannelInstance,
    lambda: f64,
) -> Result<Concavity> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::param(
            "lambda",
            format!("must lie in [0, 1], got {lambda}"),
        ));
    }
    if !ch_a.same_coefficients(ch_b) {
        return Err(Error::CoefficientMismatch);
    }
    let mid = ChannelInstance::new(
        ch_a.iter()
            .zip(ch_b.iter())
            .map(|(a, b)| {
                a.with_powers(
                    lambda * a.p1() + (1.0 - lambda) * b.p1(),
                    lambda * a.p2() + (1.0 - lambda) * b.p2(),
                )
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let ca = joint_sum_capacity(ch_a)?;
    let cb = joint_sum_capacity(ch_b)?;
    let cm = joint_sum_capacity(&mid)?;
    let slack = cm - (lambda * ca + (1.0 - lambda) * cb);
    Ok(Concavity {
        ok: slack >= -CAPACITY_TOL,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    use super::*;
    use crate::channel::Subchannel;

    fn ch(subs: &[(f64, f64, f64, f64)]) -> ChannelInstance {
        ChannelInstance::new(
            subs.iter()
                .map(|&(a, b, c, d)| Subchannel::new(a, b, c, d, 1.0, 1.0).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn e1() -> ChannelInstance {
        ch(&[(1.0, 2.0, 2.0, 1.0)])
    }
    fn e2() -> ChannelInstance {
        ch(&[(1.0, 3.0, 1.1, 1.0), (1.0, 1.1, 3.0, 1.0)])
    }
    fn e3() -> ChannelInstance {
        ch(&[(1.0, 2.0, 0.5, 1.0)])
    }
    fn e4() -> ChannelInstance {
        ch(&[(1.0, 0.4, 0.4, 1.0)])
    }
    fn e5() -> ChannelInstance {
        ch(&[(1.0, 1.1, 0.5, 1.0), (1.0, 2.0, 0.5, 1.0)])
    }

    #[test]
    fn strong_examples() {
        assert_abs_diff_eq!(
            sum_capacity_strong_joint(&e1()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sum_capacity_strong_independent(&e1()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sum_capacity_strong_joint(&e2()).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sum_capacity_strong_independent(&e2()).unwrap(),
            1.68257329734758,
            epsilon = 1e-12
        );
        let off = e2().scale_powers(0.0).unwrap();
        assert_eq!(sum_capacity_strong_joint(&off).unwrap(), 0.0);
        assert_eq!(sum_capacity_strong_independent(&off).unwrap(), 0.0);
    }

    #[test]
    fn mixed_examples() {
        assert_abs_diff_eq!(
            sum_capacity_mixed_joint(&e3()).unwrap(),
            0.923998453277475,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sum_capacity_mixed_independent(&e3()).unwrap(),
            0.923998453277475,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sum_capacity_mixed_joint(&e5()).unwrap(),
            1.84799690655495,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sum_capacity_mixed_independent(&e5()).unwrap(),
            1.76528510195126,
            epsilon = 1e-12
        );
        let off = e5().scale_powers(0.0).unwrap();
        assert_eq!(sum_capacity_mixed_joint(&off).unwrap(), 0.0);
        assert_eq!(sum_capacity_mixed_independent(&off).unwrap(), 0.0);
    }

    #[test]
    fn mixed_b_is_handled_by_relabelling() {
        let mirrored = e5().swapped();
        assert_eq!(classify(&mirrored).aggregate, AggregateClass::MixedB);
        assert_abs_diff_eq!(
            sum_capacity_mixed_joint(&mirrored).unwrap(),
            sum_capacity_mixed_joint(&e5()).unwrap(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            sum_capacity_mixed_independent(&mirrored).unwrap(),
            sum_capacity_mixed_independent(&e5()).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn class_preconditions() {
        assert!(matches!(
            sum_capacity_strong_joint(&e3()),
            Err(Error::ClassMismatch {
                expected: "strong",
                found: AggregateClass::MixedA
            })
        ));
        assert!(sum_capacity_strong_independent(&e4()).is_err());
        assert!(sum_capacity_mixed_joint(&e1()).is_err());
        assert!(sum_capacity_mixed_independent(&e4()).is_err());
        assert!(joint_sum_capacity(&e4()).is_err());
        assert!(strong_region_polygon(&e3()).is_err());
    }

    #[test]
    fn tin_examples() {
        assert_abs_diff_eq!(tin_sum_rate(&e4()), 0.896906507035896, epsilon = 1e-12);
        assert_abs_diff_eq!(tin_sum_rate(&e1()), 0.263034405833794, epsilon = 1e-12);
        assert_eq!(tin_sum_rate(&e4().scale_powers(0.0).unwrap()), 0.0);
    }

    #[test]
    fn e1_region_is_a_square() {
        let poly = strong_region_polygon(&e1()).unwrap();
        let expected = [(0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (0.0, 0.5)];
        assert_eq!(poly.vertices.len(), 4);
        for (v, w) in poly.vertices.iter().zip(expected) {
            assert_abs_diff_eq!(v.0, w.0, epsilon = 1e-12);
            assert_abs_diff_eq!(v.1, w.1, epsilon = 1e-12);
        }
        let off = strong_region_polygon(&e1().scale_powers(0.0).unwrap()).unwrap();
        assert_eq!(off.vertices, vec![(0.0, 0.0)]);
    }

    #[test]
    fn region_bounds_examples() {
        let one = CovarianceMatrix::diagonal(&[1.0]).unwrap();
        let b = region_bound_values(&e1(), &one, &one).unwrap();
        assert_abs_diff_eq!(b.rate1, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.rate2, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.sum_rx1, 1.29248125036058, epsilon = 1e-12);
        assert_abs_diff_eq!(b.sum_rx2, 1.29248125036058, epsilon = 1e-12);

        let zero = CovarianceMatrix::zeros(2);
        let b = region_bound_values(&e2(), &zero, &zero).unwrap();
        assert_eq!(b.as_array(), [0.0; 4]);

        let p = CovarianceMatrix::diagonal(&[1.0, 1.0]).unwrap();
        let b = region_bound_values(&e2(), &p, &p).unwrap();
        let rq = rate_quantities(&e2());
        assert_abs_diff_eq!(b.rate1, rq.sum(|r| r.a), epsilon = 1e-12);
        assert_abs_diff_eq!(b.rate2, rq.sum(|r| r.d), epsilon = 1e-12);
        assert_abs_diff_eq!(b.sum_rx1, rq.sum(|r| r.e), epsilon = 1e-12);
        assert_abs_diff_eq!(b.sum_rx2, rq.sum(|r| r.f), epsilon = 1e-12);
    }

    #[test]
    fn region_bounds_reject_power_violation() {
        let over = CovarianceMatrix::diagonal(&[1.5]).unwrap();
        let one = CovarianceMatrix::diagonal(&[1.0]).unwrap();
        assert!(region_bound_values(&e1(), &over, &one).is_err());
        assert!(region_bound_values(&e1(), &one, &over).is_err());
        assert!(region_bound_values(&e2(), &one, &one).is_err());
    }

    #[test]
    fn condition_21_examples() {
        let s = CovarianceMatrix::diagonal(&[1.0]).unwrap();
        let c = check_condition_21(&e3(), &s).unwrap();
        assert!(c.holds);
        assert_abs_diff_eq!(c.lhs, c.rhs, epsilon = 1e-14);

        let two = ch(&[(1.0, 2.0, 0.5, 1.0), (1.0, 2.0, 0.5, 1.0)]);
        let s = CovarianceMatrix::new(dmatrix![1.0, 0.5; 0.5, 1.0]).unwrap();
        let c = check_condition_21(&two, &s).unwrap();
        assert!(c.holds);
        // frozen from an exact rational evaluation: 2.4242... = 80/33, 2.56 = (2/1.25)^2
        assert_abs_diff_eq!(c.lhs, 80.0 / 33.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.rhs, 2.56, epsilon = 1e-12);

        assert!(check_condition_21(&e1(), &CovarianceMatrix::diagonal(&[1.0]).unwrap()).is_err());
        assert!(check_condition_21(&e3(), &CovarianceMatrix::diagonal(&[0.5]).unwrap()).is_err());
    }

    #[test]
    fn concavity_examples() {
        let a = e1();
        let b = ChannelInstance::single(a.subchannels()[0].with_powers(4.0, 4.0).unwrap());
        for lambda in [0.0, 1.0] {
            let c = midpoint_concavity_check(&a, &b, lambda).unwrap();
            assert!(c.ok);
            assert_abs_diff_eq!(c.slack, 0.0, epsilon = 1e-12);
        }
        assert!(midpoint_concavity_check(&a, &b, 0.5).unwrap().ok);
        assert_eq!(
            midpoint_concavity_check(&a, &e3(), 0.5),
            Err(Error::CoefficientMismatch)
        );
        assert!(midpoint_concavity_check(&a, &b, 1.5).is_err());
        assert!(midpoint_concavity_check(&e4(), &e4(), 0.5).is_err());
    }
}
