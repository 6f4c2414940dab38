#![allow(dead_code)]

use nalgebra::DMatrix;
use pgic_core::{ChannelInstance, CovarianceMatrix, Subchannel};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn signed(rng: &mut impl Rng, x: f64) -> f64 {
    if rng.random_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Log-uniform ranges of the direct gains and of the powers.
#[derive(Clone, Copy)]
pub struct Spread {
    pub direct: (f64, f64),
    pub power: (f64, f64),
}

/// Received SNRs from about 1e-4 up to about 6e4.
pub const WIDE: Spread = Spread {
    direct: (0.2, 5.0),
    power: (0.01, 100.0),
};

/// Received SNRs of order one at full power: at most 25 on a direct link
/// and at most 1000 on a cross link.
pub const MODERATE: Spread = Spread {
    direct: (0.5, 2.0),
    power: (0.1, 10.0),
};

/// A sub-channel with `|h12|/|h11|` and `|h21|/|h22|` drawn log-uniformly
/// from the given ranges.
pub fn subchannel(rng: &mut impl Rng, cross1: (f64, f64), cross2: (f64, f64)) -> Subchannel {
    subchannel_in(rng, cross1, cross2, WIDE)
}

pub fn subchannel_in(
    rng: &mut impl Rng,
    cross1: (f64, f64),
    cross2: (f64, f64),
    spread: Spread,
) -> Subchannel {
    let h11 = log_uniform(rng, spread.direct.0, spread.direct.1);
    let h22 = log_uniform(rng, spread.direct.0, spread.direct.1);
    let h12 = h11 * log_uniform(rng, cross1.0, cross1.1);
    let h21 = h22 * log_uniform(rng, cross2.0, cross2.1);
    let p1 = log_uniform(rng, spread.power.0, spread.power.1);
    let p2 = log_uniform(rng, spread.power.0, spread.power.1);
    let (h11, h12, h21, h22) = (
        signed(rng, h11),
        signed(rng, h12),
        signed(rng, h21),
        signed(rng, h22),
    );
    Subchannel::new(h11, h12, h21, h22, p1, p2).unwrap()
}

pub const STRONG: ((f64, f64), (f64, f64)) = ((1.0, 5.0), (1.0, 5.0));
pub const MIXED_A: ((f64, f64), (f64, f64)) = ((1.0, 5.0), (0.05, 1.0));
pub const WEAK: ((f64, f64), (f64, f64)) = ((0.05, 1.0), (0.05, 1.0));
pub const ANY: ((f64, f64), (f64, f64)) = ((0.05, 5.0), (0.05, 5.0));

pub fn channel(rng: &mut impl Rng, m: usize, kind: ((f64, f64), (f64, f64))) -> ChannelInstance {
    channel_in(rng, m, kind, WIDE)
}

pub fn channel_in(
    rng: &mut impl Rng,
    m: usize,
    kind: ((f64, f64), (f64, f64)),
    spread: Spread,
) -> ChannelInstance {
    ChannelInstance::new(
        (0..m)
            .map(|_| subchannel_in(rng, kind.0, kind.1, spread))
            .collect(),
    )
    .unwrap()
}

/// A random PSD covariance with diagonal exactly `p`: the Gram matrix of
/// random unit vectors, rescaled.
pub fn covariance_with_diag(rng: &mut impl Rng, p: &[f64]) -> CovarianceMatrix {
    let n = p.len();
    let k = rng.random_range(1..=n + 1);
    let mut v = DMatrix::<f64>::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
    for mut row in v.row_iter_mut() {
        let norm = row.norm();
        row /= norm;
    }
    let corr = &v * v.transpose();
    CovarianceMatrix::from_correlation(&corr, p).unwrap()
}

pub fn powers(ch: &ChannelInstance) -> (Vec<f64>, Vec<f64>) {
    (
        ch.iter().map(|s| s.p1()).collect(),
        ch.iter().map(|s| s.p2()).collect(),
    )
}
