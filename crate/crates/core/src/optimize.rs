//! Derivative-free maximization helpers for the inner-bound optimizer.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Returns the best point seen, endpoints included, so the result is never
/// worse than `max(f(lo), f(hi))` even when `f` is not unimodal.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    let mut best = (lo, f(lo));
    let fh = f(hi);
    if fh > best.1 {
        best = (hi, fh);
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Evenly spaced points covering `[0, 1]` at the given resolution, both
/// endpoints included.
pub fn unit_grid(resolution: f64) -> Vec<f64> {
    let steps = (1.0 / resolution - 1e-9).ceil().max(1.0) as usize;
    (0..=steps)
        .map(|i| (i as f64 * resolution).min(1.0))
        .collect()
}

/// Unit vectors at `n` evenly spaced angles in the plane.
pub fn circle_directions(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// The `±e_i` axis moves and the `(±e_i ± e_j)/√2` pair moves in `dim`
/// dimensions.
pub fn pair_directions(dim: usize) -> Vec<Vec<f64>> {
    let unit = |pairs: &[(usize, f64)]| {
        let mut v = vec![0.0; dim];
        for &(i, x) in pairs {
            v[i] = x;
        }
        v
    };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut dirs = Vec::new();
    for i in 0..dim {
        dirs.push(unit(&[(i, 1.0)]));
        dirs.push(unit(&[(i, -1.0)]));
        for j in i + 1..dim {
            for (si, sj) in [(r, r), (r, -r), (-r, r), (-r, -r)] {
                dirs.push(unit(&[(i, si), (j, sj)]));
            }
        }
    }
    dirs
}

/// Compass search inside the unit box: tries moves of length `step` along
/// each direction, takes the best improving move, and halves the step when
/// none improves.
pub fn compass_max(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    start_value: f64,
    step: f64,
    min_step: f64,
    directions: &[Vec<f64>],
) -> (Vec<f64>, f64) {
    let (mut x, mut fx, mut h) = (start.to_vec(), start_value, step);
    let mut y = x.clone();
    while h >= min_step {
        let mut best: Option<(Vec<f64>, f64)> = None;
        for d in directions {
            for ((yi, xi), di) in y.iter_mut().zip(&x).zip(d) {
                *yi = (xi + h * di).clamp(0.0, 1.0);
            }
            let fy = f(&y);
            if fy > fx && best.as_ref().is_none_or(|(_, fb)| fy > *fb) {
                best = Some((y.clone(), fy));
            }
        }
        match best {
            Some((b, fb)) => {
                x = b;
                fx = fb;
            }
            None => h *= 0.5,
        }
    }
    (x, fx)
}
