//! Scaling constants measured once and frozen.
//!
//! Each constant records the scan it came from and the observed extreme. All
//! logarithms are natural.

/// Bound on `(1 − |α_T|)·n / ln³n` at `T = πn/2` (parity-matched).
/// Scan over n ∈ {50, 100, 200, 400}: maximum 0.01676 at n = 100.
pub const CORNER_AMPLITUDE_DEFICIT: f64 = 0.025;

/// Bound on `(1 − p)·n / ln³n` for the one-shot probability at `T = πn/2`.
/// Scan over n ∈ {50, 100, 200, 400, 800}: maximum 0.03325 at n = 100.
pub const ONE_SHOT_DEFICIT: f64 = 0.05;

/// Bound on `(1 − p)·ln n / ln ln n` over parity-matched `T` within
/// `πn/2 ± √n / ln n`. Scan at n = 400 (T ∈ {626, 628, 630}): maximum 0.05376.
pub const SQRT_WINDOW: f64 = 0.08;

/// Window exponent for the power-law window scan.
pub const WINDOW_EXPONENT: f64 = 0.3;

/// Bound on `(1 − p)·n^{1−2β} / ln n` over parity-matched `T` within
/// `πn/2 ± n^β`, β = 0.3. Scan over n ∈ {100, 400, 1600}: maximum 0.1822 at n = 400.
pub const POWER_WINDOW: f64 = 0.25;

/// Smallest `c` (step 0.001) with `|α_{T − 2⌊c√n⌋}| ≤ 1/2` simultaneously at
/// n ∈ {100, 400, 1600}. Individually: 0.700, 0.600, 0.625.
pub const HALF_AMPLITUDE_OFFSET: f64 = 0.7;

/// Lower bound on `p_T · n · ln²n` at `T = πn/2`.
/// Scan over n ∈ {8} ∪ 16..=512: minimum 20.97 at n = 8 (60.88 at n = 16).
pub const CONCURRENT_FLOOR: f64 = 20.0;

/// Centre of the factor-2 band `[K/√2, K·√2]` for `p_T·√n`.
/// Scan over n ∈ {6, …, 512}: range 1.715 (n = 8) to 2.389 (n = 510).
pub const CONCURRENT_SQRT_CENTRE: f64 = 2.1;

/// Centre of the factor-2 band for the continuous walk's `p_T·√n`.
/// Scan over n ∈ {16, 64, 256}: range 1.056 to 1.183.
pub const CONTINUOUS_SQRT_CENTRE: f64 = 1.1;

/// Bound on `(1 − |α_t|)·n^{0.2}` for the continuous walk at `t = πn/2 ± n^{0.4}`.
/// At n = 100: 0.4537.
pub const CONTINUOUS_OFFSET_DEFICIT: f64 = 0.5;

/// Bound on `r·T / (n² ln²n)` for the amplified concurrent walk (success 0.9).
/// Scan over n ∈ 4..=512: maximum 0.3903 at n = 4.
pub const AMPLIFIED_COST: f64 = 0.4;

/// Target success probability for amplification.
pub const AMPLIFIED_SUCCESS: f64 = 0.9;

/// Continuous-walk offset `c` with `e^{−c²} = 1/2`. At `t = πn/2 − c√n` the
/// one-shot probability `|α|²` tends to 1/2 (`|α| → 1/√2`).
pub fn continuous_half_offset() -> f64 {
    std::f64::consts::LN_2.sqrt()
}
