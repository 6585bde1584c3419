//! Integer measurement times of a prescribed parity.
//!
//! The periodic walk only reaches the far corner at times with the parity of
//! `n`, so every horizon is snapped to that parity.

use std::f64::consts::PI;

/// The integer closest to `target` with `value ≡ parity (mod 2)`; ties go to
/// the larger candidate. Never returns a negative time.
pub fn parity_matched(target: f64, parity: usize) -> usize {
    let parity = (parity % 2) as i64;
    let mut lower = target.floor() as i64;
    if lower.rem_euclid(2) != parity {
        lower -= 1;
    }
    let upper = lower + 2;
    let pick = if target - lower as f64 >= upper as f64 - target {
        upper
    } else {
        lower
    };
    if pick < 0 {
        parity as usize
    } else {
        pick as usize
    }
}

/// `πn/2` snapped to the parity of `n`.
pub fn default_horizon(n: usize) -> usize {
    parity_matched(PI * n as f64 / 2.0, n)
}

/// `(2m+1)·πn/2` snapped to the parity of `n`; the `m`-th return to the far corner.
pub fn return_horizon(n: usize, m: usize) -> usize {
    parity_matched((2 * m + 1) as f64 * PI * n as f64 / 2.0, n)
}

/// All times in `[center − half_width, center + half_width]` with the given parity.
pub fn parity_window(center: f64, half_width: f64, parity: usize) -> Vec<usize> {
    let lo = (center - half_width).ceil().max(0.0) as usize;
    let hi = (center + half_width).floor().max(0.0) as usize;
    (lo..=hi).filter(|t| t % 2 == parity % 2).collect()
}
