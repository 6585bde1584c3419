//! One-shot and concurrent hitting probabilities.
//!
//! A `|x⟩`-measured walk alternates a two-outcome measurement at the target
//! with a walk step. The residual state after a "no" outcome is kept
//! unnormalized, so `|β_t|²` (the squared overlap of that residual with the
//! target) is directly the unconditional probability of stopping at `t`.
//!
//! Two engines compute the same trace:
//!
//! * [`measured_walk_direct`] runs the projective process on dense states.
//! * [`beta_recursion`] uses the identity
//!   `β_t = α_t − Σ_{i≥1} β_{t−i} γ_i`, with `α`, `γ` from the closed forms.
//!
//! For the corner-to-corner Grover walk every amplitude is real. `β_t` is
//! stored as a complex number with zero imaginary part; its sign alternates
//! as `(−1)^{(t−n)/2}` near the hitting time, i.e. `β̃_t = (−1)^{(t−n)/2} β_t`
//! is the slowly varying quantity.

use num_complex::Complex;

use crate::coined::StepOperator;
use crate::error::{Result, WalkError};
use crate::hilbert::{make_initial, position_marginal, LatticeSpec, PositionProjector, Vertex, WalkState};
use crate::scalar::{KahanSum, Real};
use crate::spectral::SpectralSeries;

/// Largest cube dimension accepted by the direct engine.
pub const MAX_DIRECT_N: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Dense state-vector simulation.
    Direct,
    /// Closed-form spectral sums (corner-to-corner only).
    Analytic,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Direct => "direct",
            Engine::Analytic => "analytic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HittingKind {
    OneShot,
    Concurrent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HittingResult<T> {
    pub kind: HittingKind,
    pub horizon: usize,
    pub probability: T,
    pub engine: Engine,
}

/// What a trace measures for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceTarget {
    /// The vertex opposite the start (used when `n` exceeds the vertex encoding).
    FarCorner,
    Vertex(Vertex),
}

/// Stop amplitudes of a measured walk for `t = 0..=horizon`.
#[derive(Clone, Debug)]
pub struct MeasuredTrace<T> {
    pub n: usize,
    pub target: TraceTarget,
    /// `β_t`: overlap of the unnormalized residual with the symmetric target state.
    pub beta: Vec<Complex<T>>,
    /// Unconditional probability of stopping exactly at `t`.
    pub stop_prob: Vec<T>,
    /// `p_t = Σ_{s≤t} stop_prob[s]`.
    pub cumulative: Vec<T>,
}

impl<T: Real> MeasuredTrace<T> {
    /// Builds a trace whose stop probabilities are `|β_t|²`.
    pub fn from_beta(n: usize, target: TraceTarget, beta: Vec<Complex<T>>) -> Self {
        let stop_prob = beta.iter().map(|b| b.norm_sqr()).collect();
        Self::from_parts(n, target, beta, stop_prob)
    }

    fn from_parts(n: usize, target: TraceTarget, beta: Vec<Complex<T>>, stop_prob: Vec<T>) -> Self {
        let mut acc = KahanSum::new();
        let cumulative = stop_prob
            .iter()
            .map(|p| {
                acc.add(*p);
                acc.value()
            })
            .collect();
        Self {
            n,
            target,
            beta,
            stop_prob,
            cumulative,
        }
    }

    pub fn horizon(&self) -> usize {
        self.beta.len() - 1
    }

    /// `p_T` at the final horizon.
    pub fn total(&self) -> T {
        *self.cumulative.last().expect("trace is never empty")
    }

    /// Largest `|β_t − β'_t|` over the common horizon.
    pub fn max_beta_diff(&self, other: &Self) -> T {
        self.beta
            .iter()
            .zip(&other.beta)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}

/// Runs the `proj.target`-measured walk of `op` from `initial` up to `horizon`:
/// measure, stop on a hit, otherwise step. Measurement precedes the first step.
pub fn measured_walk<T: Real>(
    op: &StepOperator<T>,
    initial: &WalkState<T>,
    proj: &PositionProjector,
    horizon: usize,
) -> Result<MeasuredTrace<T>> {
    let mut state = initial.clone();
    let mut beta = Vec::with_capacity(horizon + 1);
    let mut stop_prob = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        beta.push(state.symmetric_overlap(&proj.target));
        stop_prob.push(proj.stop_probability(&state));
        proj.continue_part_in_place(&mut state);
        if t < horizon {
            op.step_in_place(&mut state)?;
        }
    }
    Ok(MeasuredTrace::from_parts(
        initial.spec().n(),
        TraceTarget::Vertex(proj.target),
        beta,
        stop_prob,
    ))
}

fn check_direct(n: usize) -> Result<()> {
    if n > MAX_DIRECT_N {
        return Err(WalkError::DirectEngineTooLarge { n, max: MAX_DIRECT_N });
    }
    Ok(())
}

fn check_pair(n: usize, x: &Vertex, y: &Vertex) -> Result<()> {
    for v in [x, y] {
        if v.dim() != n {
            return Err(WalkError::BitstringLength {
                expected: n,
                got: v.dim(),
            });
        }
    }
    Ok(())
}

/// Dense simulation of the Grover walk started at `x` and measured at `target`
/// with the full position projector.
pub fn measured_walk_direct<T: Real>(
    n: usize,
    x: &Vertex,
    target: &Vertex,
    horizon: usize,
) -> Result<MeasuredTrace<T>> {
    check_direct(n)?;
    check_pair(n, x, target)?;
    let spec = LatticeSpec::periodic(n)?;
    let op = StepOperator::grover(spec);
    let initial = make_initial(spec, x)?;
    measured_walk(&op, &initial, &PositionProjector::new(*target), horizon)
}

/// Stop amplitudes from unmeasured amplitudes through
/// `β_t = α_t − Σ_{i=1}^{t} β_{t−i} γ_i`.
///
/// Use this general form when `α` has no light cone (continuous time).
pub fn convolve_stop_amplitudes<T: Real>(alpha: &[Complex<T>], gamma: &[Complex<T>]) -> Vec<Complex<T>> {
    let horizon = alpha.len().min(gamma.len());
    let mut beta: Vec<Complex<T>> = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        re.add(alpha[t].re);
        im.add(alpha[t].im);
        for i in 1..=t {
            let p = beta[t - i] * gamma[i];
            re.add(-p.re);
            im.add(-p.im);
        }
        beta.push(Complex::new(re.value(), im.value()));
    }
    beta
}

/// The corner-to-corner stop amplitudes of the discrete walk on the n-cube.
///
/// `β_t = α_t` up to `t = n` (nothing reaches the target earlier); afterwards
/// the convolution only visits even lags since `γ` vanishes at odd times.
pub fn beta_recursion<T: Real>(alpha: &[T], gamma: &[T], n: usize, horizon: usize) -> MeasuredTrace<T> {
    assert!(
        alpha.len() > horizon && gamma.len() > horizon,
        "series shorter than horizon"
    );
    let mut beta: Vec<T> = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        if t <= n {
            beta.push(alpha[t]);
            continue;
        }
        let mut acc = KahanSum::new();
        acc.add(alpha[t]);
        for i in (2..=t - n).step_by(2) {
            acc.add(-beta[t - i] * gamma[i]);
        }
        beta.push(acc.value());
    }
    let beta = beta.into_iter().map(|b| Complex::new(b, T::zero())).collect();
    MeasuredTrace::from_beta(n, TraceTarget::FarCorner, beta)
}

/// Analytic corner-to-corner trace for any `n`.
pub fn corner_trace_analytic<T: Real>(series: &SpectralSeries<T>, horizon: usize) -> MeasuredTrace<T> {
    let alpha = series.alpha_series(horizon);
    let gamma = series.gamma_series(horizon);
    beta_recursion(&alpha, &gamma, series.n(), horizon)
}

/// `|α_T|²` for any `n`.
pub fn corner_one_shot_analytic<T: Real>(series: &SpectralSeries<T>, horizon: usize) -> T {
    let a = series.alpha(horizon as u64);
    a * a
}

fn require_corner(x: &Vertex, y: &Vertex) -> Result<()> {
    if x.complement() != *y {
        return Err(WalkError::AnalyticTargetUnsupported);
    }
    Ok(())
}

/// Probability of finding the walk started at `x` at position `y` after
/// exactly `horizon` steps.
pub fn one_shot_probability<T: Real>(
    n: usize,
    x: &Vertex,
    y: &Vertex,
    horizon: usize,
    engine: Engine,
) -> Result<HittingResult<T>> {
    check_pair(n, x, y)?;
    let probability = match engine {
        Engine::Direct => {
            check_direct(n)?;
            let spec = LatticeSpec::periodic(n)?;
            let op = StepOperator::grover(spec);
            let state = crate::coined::evolve(&op, &make_initial(spec, x)?, horizon)?;
            position_marginal(&state)[y.index()]
        }
        Engine::Analytic => {
            require_corner(x, y)?;
            corner_one_shot_analytic(&SpectralSeries::new(n)?, horizon)
        }
    };
    Ok(HittingResult {
        kind: HittingKind::OneShot,
        horizon,
        probability,
        engine,
    })
}

/// The trace of the `target`-measured walk from `x` by either engine.
pub fn measured_trace<T: Real>(
    n: usize,
    x: &Vertex,
    target: &Vertex,
    horizon: usize,
    engine: Engine,
) -> Result<MeasuredTrace<T>> {
    check_pair(n, x, target)?;
    match engine {
        Engine::Direct => measured_walk_direct(n, x, target, horizon),
        Engine::Analytic => {
            require_corner(x, target)?;
            let mut trace = corner_trace_analytic(&SpectralSeries::new(n)?, horizon);
            trace.target = TraceTarget::Vertex(*target);
            Ok(trace)
        }
    }
}

/// Probability that the `target`-measured walk from `x` stops by `horizon`.
pub fn concurrent_hitting<T: Real>(
    n: usize,
    x: &Vertex,
    target: &Vertex,
    horizon: usize,
    engine: Engine,
) -> Result<HittingResult<T>> {
    let trace = measured_trace::<T>(n, x, target, horizon, engine)?;
    Ok(HittingResult {
        kind: HittingKind::Concurrent,
        horizon,
        probability: trace.total(),
        engine,
    })
}

/// Classical restart-and-repeat boosting of a single-run success probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Amplification {
    pub repetitions: u64,
    pub total_steps: u64,
}

/// Smallest `r` with `(1 − p_single)^r ≤ 1 − target_success`, and `r·horizon`.
pub fn amplified_concurrent(horizon: usize, p_single: f64, target_success: f64) -> Result<Amplification> {
    if !(0.0..1.0).contains(&target_success) {
        return Err(WalkError::InvalidProbability(target_success));
    }
    if !(p_single > 0.0 && p_single <= 1.0 + 1e-12) {
        return Err(WalkError::InvalidProbability(p_single));
    }
    let repetitions = if p_single >= 1.0 {
        1
    } else {
        let r = ((1.0 - target_success).ln() / (1.0 - p_single).ln()).ceil();
        (r as u64).max(1)
    };
    Ok(Amplification {
        repetitions,
        total_steps: repetitions * horizon as u64,
    })
}
