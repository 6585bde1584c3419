//! Closed-form amplitudes of the Grover walk on the n-cube.
//!
//! Every Fourier mode `|k̃⟩` of weight `m` contributes the eigenphase
//! `ω_m = arccos(1 − 2m/n)`. The corner-to-corner amplitude and the return
//! amplitude of the symmetric corner state are binomially weighted cosine
//! sums over these phases:
//!
//! ```text
//! α_t = 2^-n Σ_m C(n,m) (−1)^m cos(ω_m t)
//! γ_t = 2^-n Σ_m C(n,m)        cos(ω_m t)
//! ```
//!
//! Weights are held as logarithms so `n` can reach the tens of thousands. The
//! terms for `m` and `n − m` are folded together, which makes the parity
//! zeros (α at `t ≢ n`, γ at odd `t`) exact rather than rounding noise.

use num_complex::Complex;

use crate::error::{Result, WalkError};
use crate::hilbert::{LatticeSpec, Vertex, WalkState};
use crate::scalar::{KahanSum, Real};

/// Per-weight phases and log-binomial weights for an n-cube.
#[derive(Clone, Debug)]
pub struct SpectralSeries<T> {
    n: usize,
    omega: Vec<T>,
    nu: Vec<T>,
    weight: Vec<T>,
    log_weight: Vec<T>,
}

impl<T: Real> SpectralSeries<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(WalkError::ZeroDimension);
        }
        let nf = n as f64;
        let weights = binomial_weights(n);
        let mut omega = Vec::with_capacity(n + 1);
        let mut nu = Vec::with_capacity(n + 1);
        for m in 0..=n {
            // 1 − 2m/n computed as (n − 2m)/n keeps the endpoints exact.
            let c = ((nf - 2.0 * m as f64) / nf).clamp(-1.0, 1.0);
            omega.push(T::lit(c.acos()));
            // ν = π/2 − ω = arcsin(1 − 2m/n), accurate near the middle weight.
            nu.push(T::lit(c.asin()));
        }
        let log_weight = weights.iter().map(|w| T::lit(w.ln())).collect();
        let weight = weights.into_iter().map(T::lit).collect();
        Ok(Self {
            n,
            omega,
            nu,
            weight,
            log_weight,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ω_m` for `m = 0..=n`.
    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    /// `ν_m = π/2 − ω_m`.
    pub fn nu(&self) -> &[T] {
        &self.nu
    }

    /// `ln(C(n,m) / 2^n)`.
    pub fn log_weight(&self) -> &[T] {
        &self.log_weight
    }

    pub fn weight(&self, m: usize) -> T {
        self.weight[m]
    }

    /// Folded cosine sum `2^-n Σ_m C(n,m) s^m cos(ω_m t)` with `s = −1` when
    /// `alternating`, otherwise `s = 1`.
    fn folded_sum(&self, t: u64, alternating: bool) -> T {
        let n = self.n;
        // Term n − m equals term m times (−1)^t (and (−1)^n for the alternating sum).
        let odd = if alternating {
            (n as u64 + t) % 2 == 1
        } else {
            t % 2 == 1
        };
        if odd {
            return T::zero();
        }
        let tf = T::lit(t as f64);
        let mut acc = KahanSum::new();
        let two = T::lit(2.0);
        for m in 0..n.div_ceil(2) {
            let sign = if alternating && m % 2 == 1 { -T::one() } else { T::one() };
            acc.add(two * sign * self.weight(m) * (self.omega[m] * tf).cos());
        }
        if n.is_multiple_of(2) {
            let m = n / 2;
            // cos(π t / 2) exactly.
            let c = match t % 4 {
                0 => T::one(),
                2 => -T::one(),
                _ => T::zero(),
            };
            let sign = if alternating && m % 2 == 1 { -T::one() } else { T::one() };
            acc.add(sign * self.weight(m) * c);
        }
        acc.value()
    }

    /// Amplitude `α_t = ⟨f|U^t|Φ₀⟩` of the far corner after `t` unmeasured steps.
    pub fn alpha(&self, t: u64) -> T {
        self.folded_sum(t, true)
    }

    /// Return amplitude `γ_t = ⟨f|U^t|f⟩` of the symmetric corner state.
    pub fn gamma(&self, t: u64) -> T {
        self.folded_sum(t, false)
    }

    /// `α_0..=α_horizon`.
    pub fn alpha_series(&self, horizon: usize) -> Vec<T> {
        (0..=horizon as u64).map(|t| self.alpha(t)).collect()
    }

    /// `γ_0..=γ_horizon`.
    pub fn gamma_series(&self, horizon: usize) -> Vec<T> {
        (0..=horizon as u64).map(|t| self.gamma(t)).collect()
    }

    /// `γ̃_{2t} = (−1)^t γ_{2t} = 2^-n Σ_m C(n,m) cos(2t ν_m)`.
    pub fn gamma_tilde(&self, t: u64) -> T {
        let g = self.gamma(2 * t);
        if t % 2 == 1 {
            -g
        } else {
            g
        }
    }

    /// `|γ̃_{2t} − γ̃_{2t+2}|`, evaluated through the product form
    /// `2·2^-n |Σ_m C(n,m) sin((2t+1)ν_m) sin ν_m|`, which has no cancellation
    /// between nearly equal terms.
    pub fn gamma_tilde_difference(&self, t: u64) -> T {
        let k = T::lit((2 * t + 1) as f64);
        let s: T = (0..=self.n)
            .map(|m| self.weight(m) * (k * self.nu[m]).sin() * self.nu[m].sin())
            .collect::<KahanSum<T>>()
            .value();
        (T::lit(2.0) * s).abs()
    }
}

/// `C(n,m) / 2^n` for `m = 0..=n`.
///
/// Ratios `C(n,m) / C(n,⌊n/2⌋)` are built by multiplying outward from the
/// middle, then normalized by their sum, so the weights sum to one to working
/// precision. Tail ratios that underflow get weight zero.
fn binomial_weights(n: usize) -> Vec<f64> {
    let mid = n / 2;
    let mut ratio = vec![0.0f64; n + 1];
    ratio[mid] = 1.0;
    for m in (0..mid).rev() {
        ratio[m] = ratio[m + 1] * (m + 1) as f64 / (n - m) as f64;
    }
    for m in mid + 1..=n {
        ratio[m] = ratio[m - 1] * (n - m + 1) as f64 / m as f64;
    }
    let total = crate::scalar::kahan_sum(ratio.iter().copied());
    ratio.into_iter().map(|r| r / total).collect()
}

/// One of the two eigenvectors of `S_k · C` that overlap the symmetric coin state.
#[derive(Clone, Debug)]
pub struct EigenPair<T> {
    pub k: Vertex,
    pub weight: usize,
    pub lambda: Complex<T>,
    /// Coin-space eigenvector, length `n`.
    pub w: Vec<Complex<T>>,
    /// Coefficient of `w ⊗ |k̃⟩` in the symmetric start state at `0ⁿ`;
    /// `w* ⊗ |k̃⟩` carries the conjugate.
    pub a: Complex<T>,
    /// `k ∈ {0ⁿ, 1ⁿ}`: a single uniform eigenvector with `λ = ±1`.
    pub degenerate: bool,
}

pub fn eigenpair<T: Real>(n: usize, k: &Vertex) -> Result<EigenPair<T>> {
    if k.dim() != n {
        return Err(WalkError::BitstringLength {
            expected: n,
            got: k.dim(),
        });
    }
    let m = k.weight();
    let nf = T::from_count(n);
    let mf = T::from_count(m);
    let scale = T::one() / (nf * T::lit(2.0).powi(n as i32 + 1)).sqrt();
    if m == 0 || m == n {
        let sign = if m == 0 { T::one() } else { -T::one() };
        let u = T::one() / nf.sqrt();
        return Ok(EigenPair {
            k: *k,
            weight: m,
            lambda: Complex::new(sign, T::zero()),
            w: vec![Complex::new(u, T::zero()); n],
            a: Complex::new(T::lit(2.0).powi(-(n as i32)).sqrt(), T::zero()),
            degenerate: true,
        });
    }
    let two = T::lit(2.0);
    let rest = nf - mf;
    let lambda = Complex::new(T::one() - two * mf / nf, two / nf * (mf * rest).sqrt());
    let zero_entry = Complex::new(T::zero(), -T::one() / (two.sqrt() * rest.sqrt()));
    let one_entry = Complex::new(T::one() / (two.sqrt() * mf.sqrt()), T::zero());
    let w = (0..n)
        .map(|l| if k.bits() >> l & 1 == 1 { one_entry } else { zero_entry })
        .collect();
    // a = ⟨w|Ψ_in⟩ · ⟨k̃|0ⁿ⟩.
    let a = Complex::new(mf.sqrt(), rest.sqrt()).scale(scale);
    Ok(EigenPair {
        k: *k,
        weight: m,
        lambda,
        w,
        a,
        degenerate: false,
    })
}

/// In-place unnormalized Walsh–Hadamard transform.
pub(crate) fn walsh_hadamard<T: Real>(v: &mut [Complex<T>]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (v[i], v[i + h]);
                v[i] = x + y;
                v[i + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Rebuilds the symmetric start state at `0ⁿ` from its eigen-expansion
/// `Σ_k (a_k w_k + a_k* w_k*) ⊗ |k̃⟩`.
pub fn reconstruct_initial<T: Real>(n: usize) -> Result<WalkState<T>> {
    let spec = LatticeSpec::periodic(n)?;
    let positions = spec.positions();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); spec.len()];
    for k in 0..positions {
        let pair = eigenpair::<T>(n, &Vertex::new(n, k as u64)?)?;
        for (d, w) in pair.w.iter().enumerate() {
            let c = if pair.degenerate {
                pair.a * w
            } else {
                pair.a * w + (pair.a * w).conj()
            };
            amps[d * positions + k] = c;
        }
    }
    let norm = T::lit(2.0).powi(n as i32).sqrt();
    for block in amps.chunks_exact_mut(positions) {
        walsh_hadamard(block);
        for a in block.iter_mut() {
            *a = a.unscale(norm);
        }
    }
    WalkState::from_amplitudes(spec, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coined::{evolve, StepOperator};
    use crate::hilbert::make_initial;
    use crate::horizon::{default_horizon, parity_matched, return_horizon};
    use std::f64::consts::PI;

    fn direct_alpha_gamma(n: usize, horizon: usize) -> (Vec<f64>, Vec<f64>) {
        let spec = LatticeSpec::periodic(n).unwrap();
        let op = StepOperator::<f64>::grover(spec);
        let zero = Vertex::zero(n).unwrap();
        let ones = zero.complement();
        let mut s = make_initial::<f64>(spec, &zero).unwrap();
        let mut alphas = Vec::new();
        let mut gammas = Vec::new();
        let mut back = make_initial::<f64>(spec, &ones).unwrap();
        for _ in 0..=horizon {
            let a = s.symmetric_overlap(&ones);
            let g = back.symmetric_overlap(&ones);
            assert!(a.im.abs() < 1e-12 && g.im.abs() < 1e-12);
            alphas.push(a.re);
            gammas.push(g.re);
            op.step_in_place(&mut s).unwrap();
            op.step_in_place(&mut back).unwrap();
        }
        (alphas, gammas)
    }

    #[test]
    fn series_invariants() {
        for n in [1, 2, 7, 64, 1000, 10_000] {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            assert_eq!(s.omega()[0], 0.0);
            assert!((s.omega()[n] - PI).abs() < 1e-15);
            assert!(s.omega().windows(2).all(|w| w[1] > w[0]));
            let total: f64 = (0..=n).map(|m| s.weight(m)).sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n} total={total}");
            for m in 0..=n {
                assert!((s.nu()[m] - (PI / 2.0 - s.omega()[m])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn alpha_vanishes_before_n() {
        for n in [1, 3, 10, 50, 333] {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            for t in 0..n as u64 {
                assert!(s.alpha(t).abs() < 1e-10, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn alpha_small_cases() {
        let s1 = SpectralSeries::<f64>::new(1).unwrap();
        assert!((s1.alpha(1).abs() - 1.0).abs() < 1e-15);
        let s2 = SpectralSeries::<f64>::new(2).unwrap();
        // Brute force over the three weight classes.
        let brute = 0.25 * (1.0 - 2.0 * (PI / 2.0 * 2.0).cos() + (PI * 2.0).cos());
        assert!((s2.alpha(2) - brute).abs() < 1e-15);
        assert!((s2.alpha(2).abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_small_cases() {
        for n in [1, 5, 40] {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            assert!((s.gamma(0) - 1.0).abs() < 1e-14);
            for t in (1..200).step_by(2) {
                assert_eq!(s.gamma(t), 0.0);
            }
        }
        let s2 = SpectralSeries::<f64>::new(2).unwrap();
        assert!(s2.gamma(2).abs() < 1e-15);
    }

    #[test]
    fn cross_engine_alpha_gamma() {
        for n in 1..=10 {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            let (alphas, gammas) = direct_alpha_gamma(n, 200);
            for t in 0..=200 {
                assert!((s.alpha(t as u64) - alphas[t]).abs() < 1e-9, "alpha n={n} t={t}");
                assert!((s.gamma(t as u64) - gammas[t]).abs() < 1e-9, "gamma n={n} t={t}");
            }
        }
    }

    #[test]
    fn gamma_same_from_both_corners() {
        for n in 2..=8 {
            let spec = LatticeSpec::periodic(n).unwrap();
            let op = StepOperator::<f64>::grover(spec);
            let zero = Vertex::zero(n).unwrap();
            let ones = zero.complement();
            let f0 = make_initial::<f64>(spec, &zero).unwrap();
            let f1 = make_initial::<f64>(spec, &ones).unwrap();
            for t in 0..30 {
                let g0 = evolve(&op, &f0, t).unwrap().symmetric_overlap(&zero);
                let g1 = evolve(&op, &f1, t).unwrap().symmetric_overlap(&ones);
                assert_eq!(g0, g1);
            }
        }
    }

    #[test]
    fn amplitudes_bounded() {
        for n in [3, 17, 100, 401] {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            for t in 0..(4 * n as u64) {
                assert!(s.alpha(t).abs() <= 1.0 + 1e-12);
                assert!(s.gamma(t).abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn accuracy_against_chebyshev_recurrence_at_large_n() {
        // Independent float route: cos(ω_m t) = T_t(1 − 2m/n) by the
        // three-term recurrence, summed in the same binomial weights.
        let n = 1000;
        let s = SpectralSeries::<f64>::new(n).unwrap();
        let horizon = return_horizon(n, 1) + 10;
        let cheb: Vec<f64> = crate::exact::chebyshev_alpha_series::<f64>(n, horizon);
        for t in (0..=horizon).step_by(7) {
            assert!((s.alpha(t as u64) - cheb[t]).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn one_shot_window_at_pi_n_over_2() {
        use crate::calibrated::CORNER_AMPLITUDE_DEFICIT;
        for n in [50usize, 100, 200, 400] {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            let t = default_horizon(n) as u64;
            let deficit = 1.0 - s.alpha(t).abs();
            let ln = (n as f64).ln();
            assert!(
                deficit <= CORNER_AMPLITUDE_DEFICIT * ln.powi(3) / n as f64,
                "n={n} deficit={deficit}"
            );
        }
    }

    #[test]
    fn half_amplitude_before_horizon() {
        use crate::calibrated::HALF_AMPLITUDE_OFFSET;
        for n in [100usize, 400, 1600] {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            let back = 2 * (HALF_AMPLITUDE_OFFSET * (n as f64).sqrt()).floor() as usize;
            let t = (default_horizon(n) - back) as u64;
            assert!(s.alpha(t).abs() <= 0.5, "n={n} alpha={}", s.alpha(t));
        }
        // Calibrating at n = 400 alone gives 0.6, which is too small elsewhere.
        let s = SpectralSeries::<f64>::new(100).unwrap();
        assert!(s.alpha((default_horizon(100) - 12) as u64).abs() > 0.5);
    }

    #[test]
    fn return_to_far_corner() {
        for n in [100, 150, 200] {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            let t = return_horizon(n, 1) as u64;
            assert!(s.alpha(t).abs() > 0.9, "n={n} alpha={}", s.alpha(t));
        }
    }

    #[test]
    fn gamma_tilde_difference_matches_direct_difference() {
        for n in [8, 64, 257] {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            let tmax = ((PI * n as f64 / 2.0) / 2.0) as u64;
            for t in 0..tmax {
                let direct = (s.gamma_tilde(t) - s.gamma_tilde(t + 1)).abs();
                assert!((s.gamma_tilde_difference(t) - direct).abs() < 1e-12);
            }
            assert!((s.gamma_tilde_difference(0) - (1.0 - s.gamma_tilde(1)).abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_tilde_difference_scaling() {
        // Constant 10 on ln(n)/√n; the observed maxima are far below it.
        let max_diff = |n: usize| {
            let s = SpectralSeries::<f64>::new(n).unwrap();
            let tmax = (PI * n as f64 / 4.0) as u64;
            (0..tmax).map(|t| s.gamma_tilde_difference(t)).fold(0.0, f64::max)
        };
        let d64 = max_diff(64);
        assert!(d64 < 10.0 * (64f64).ln() / 8.0);
        let d256 = max_diff(256);
        let d1024 = max_diff(1024);
        assert!(d256 < d64 && d1024 < d256, "{d64} {d256} {d1024}");
    }

    #[test]
    fn eigenpairs_small() {
        let p = eigenpair::<f64>(2, &"10".parse().unwrap()).unwrap();
        assert!((p.lambda - Complex::new(0.0, 1.0)).norm() < 1e-15);
        let z = eigenpair::<f64>(3, &"000".parse().unwrap()).unwrap();
        assert!(z.degenerate);
        assert_eq!(z.lambda, Complex::new(1.0, 0.0));
        let o = eigenpair::<f64>(3, &"111".parse().unwrap()).unwrap();
        assert_eq!(o.lambda, Complex::new(-1.0, 0.0));
        assert!(eigenpair::<f64>(3, &"11".parse().unwrap()).is_err());
    }

    #[test]
    fn eigenvectors_of_fourier_blocks() {
        for n in [2usize, 4, 7, 10] {
            let spec = LatticeSpec::periodic(n).unwrap();
            let op = StepOperator::<f64>::grover(spec);
            let s = SpectralSeries::<f64>::new(n).unwrap();
            for k in 0..1usize << n {
                let pair = eigenpair::<f64>(n, &Vertex::new(n, k as u64).unwrap()).unwrap();
                let m = op.fourier_block(k);
                let norm: f64 = pair.w.iter().map(|x| x.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-12);
                assert!((pair.lambda.norm() - 1.0).abs() < 1e-12);
                let w_phase = s.omega()[pair.weight];
                assert!((pair.lambda - Complex::from_polar(1.0, w_phase)).norm() < 1e-12);
                for i in 0..n {
                    let mut acc = Complex::new(0.0, 0.0);
                    for j in 0..n {
                        acc += m[i * n + j] * pair.w[j];
                    }
                    assert!((acc - pair.lambda * pair.w[i]).norm() < 1e-10, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn reconstruct_n1_exact() {
        let r = reconstruct_initial::<f64>(1).unwrap();
        let target = make_initial::<f64>(LatticeSpec::periodic(1).unwrap(), &Vertex::zero(1).unwrap()).unwrap();
        assert!(r.max_abs_diff(&target) < 1e-15);
    }

    #[test]
    fn reconstruct_n4_against_direct_summation() {
        let n = 4;
        let spec = LatticeSpec::periodic(n).unwrap();
        // Direct sum over k and x, no fast transform.
        let mut direct = WalkState::<f64>::zeros(spec);
        for k in 0..16usize {
            let pair = eigenpair::<f64>(n, &Vertex::new(n, k as u64).unwrap()).unwrap();
            for x in 0..16usize {
                let sign = if (k & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                for d in 0..n {
                    let mut c = pair.a * pair.w[d];
                    if !pair.degenerate {
                        c += c.conj();
                    }
                    let v = direct.amp(d, x) + c.scale(sign / 4.0);
                    direct.set_amp(d, x, v);
                }
            }
        }
        let target = make_initial::<f64>(spec, &Vertex::zero(n).unwrap()).unwrap();
        assert!(direct.max_abs_diff(&target) < 1e-9);
        assert!(reconstruct_initial::<f64>(n).unwrap().max_abs_diff(&target) < 1e-9);
    }

    #[test]
    fn reconstruct_n8_norm() {
        let r = reconstruct_initial::<f64>(8).unwrap();
        assert!((r.norm_sqr() - 1.0).abs() < 1e-9);
        let target = make_initial::<f64>(LatticeSpec::periodic(8).unwrap(), &Vertex::zero(8).unwrap()).unwrap();
        assert!(r.max_abs_diff(&target) < 1e-9);
    }

    #[test]
    fn f32_series_tracks_f64() {
        let n = 200;
        let s32 = SpectralSeries::<f32>::new(n).unwrap();
        let s64 = SpectralSeries::<f64>::new(n).unwrap();
        let t = parity_matched(PI * n as f64 / 2.0, n) as u64;
        assert!((s32.alpha(t) as f64 - s64.alpha(t)).abs() < 1e-3);
    }
}
