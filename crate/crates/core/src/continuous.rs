//! Continuous-time walk `U(t) = exp(i (t/n) Σ_j X_j)` on the n-cube.
//!
//! The generator is a sum of commuting single-bit flips, so the evolution
//! factorizes into `cos(t/n)·1 + i·sin(t/n)·X` on every bit. Dense states use
//! this per-bit form directly; corner-started states are kept as products of
//! per-bit 2-vectors so any `n` is reachable.

use num_complex::Complex;

use crate::error::{Result, WalkError};
use crate::hilbert::{Vertex, MAX_DENSE_DIM};
use crate::measured::{convolve_stop_amplitudes, MeasuredTrace, TraceTarget};
use crate::scalar::{KahanSum, Real};

/// Dense amplitude vector over the `2^n` vertices (no coin).
#[derive(Clone, Debug, PartialEq)]
pub struct PositionState<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> PositionState<T> {
    pub fn basis(x: &Vertex) -> Result<Self> {
        let n = x.dim();
        if n > MAX_DENSE_DIM {
            return Err(WalkError::DimensionTooLarge(n));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[x.index()] = Complex::new(T::one(), T::zero());
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(WalkError::DimensionMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amp(&self, x: &Vertex) -> Complex<T> {
        self.amps[x.index()]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).collect::<KahanSum<T>>().value()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Applies `U(t)` in place.
    pub fn evolve_in_place(&mut self, t: T) {
        let theta = t / T::from_count(self.n);
        let (s, c) = theta.sin_cos();
        let is = Complex::new(T::zero(), s);
        for bit in 0..self.n {
            let mask = 1usize << bit;
            for x in 0..self.amps.len() {
                if x & mask == 0 {
                    let (a0, a1) = (self.amps[x], self.amps[x | mask]);
                    self.amps[x] = a0.scale(c) + is * a1;
                    self.amps[x | mask] = is * a0 + a1.scale(c);
                }
            }
        }
    }
}

/// `U(t)` applied to a dense position state.
pub fn continuous_evolve<T: Real>(state: &PositionState<T>, t: T) -> PositionState<T> {
    let mut out = state.clone();
    out.evolve_in_place(t);
    out
}

/// A product state `⊗_j (u_j |0⟩ + v_j |1⟩)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState<T> {
    factors: Vec<[Complex<T>; 2]>,
}

impl<T: Real> ProductState<T> {
    /// The basis state at `0ⁿ`.
    pub fn corner(n: usize) -> Self {
        Self {
            factors: vec![[Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn evolve_in_place(&mut self, t: T) {
        let theta = t / T::from_count(self.n());
        let (s, c) = theta.sin_cos();
        let is = Complex::new(T::zero(), s);
        for f in &mut self.factors {
            let [a0, a1] = *f;
            *f = [a0.scale(c) + is * a1, is * a0 + a1.scale(c)];
        }
    }

    /// Amplitude of the vertex whose bit `j` is `bit(j)`.
    pub fn amplitude(&self, bit: impl Fn(usize) -> bool) -> Complex<T> {
        self.factors
            .iter()
            .enumerate()
            .fold(Complex::new(T::one(), T::zero()), |acc, (j, f)| {
                acc * f[usize::from(bit(j))]
            })
    }

    pub fn to_dense(&self) -> Result<PositionState<T>> {
        let n = self.n();
        if n > MAX_DENSE_DIM {
            return Err(WalkError::DimensionTooLarge(n));
        }
        let amps = (0..1usize << n).map(|x| self.amplitude(|j| x >> j & 1 == 1)).collect();
        PositionState::from_amplitudes(n, amps)
    }
}

fn i_pow<T: Real>(n: usize) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match n % 4 {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

/// Far-corner amplitude `α_t = iⁿ sinⁿ(t/n)` from the opposite corner.
pub fn continuous_alpha<T: Real>(n: usize, t: T) -> Complex<T> {
    let s = (t / T::from_count(n)).sin();
    i_pow::<T>(n).scale(s.powi(n as i32))
}

/// Return amplitude `γ_t = cosⁿ(t/n)` of a corner.
pub fn continuous_gamma<T: Real>(n: usize, t: T) -> T {
    (t / T::from_count(n)).cos().powi(n as i32)
}

/// Corner-to-corner trace of the walk measured at integer times `0..=horizon`,
/// via the stop-amplitude convolution with the closed forms.
pub fn continuous_measured_trace<T: Real>(n: usize, horizon: usize) -> MeasuredTrace<T> {
    let alpha: Vec<_> = (0..=horizon).map(|t| continuous_alpha(n, T::from_count(t))).collect();
    let gamma: Vec<_> = (0..=horizon)
        .map(|t| Complex::new(continuous_gamma(n, T::from_count(t)), T::zero()))
        .collect();
    MeasuredTrace::from_beta(n, TraceTarget::FarCorner, convolve_stop_amplitudes(&alpha, &gamma))
}

/// Dense projective simulation of the measured continuous walk: measure at
/// `target`, stop on a hit, otherwise apply `U(1)`.
pub fn continuous_measured_direct<T: Real>(x: &Vertex, target: &Vertex, horizon: usize) -> Result<MeasuredTrace<T>> {
    let mut state = PositionState::basis(x)?;
    let mut beta = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        beta.push(state.amps[target.index()]);
        state.amps[target.index()] = Complex::new(T::zero(), T::zero());
        if t < horizon {
            state.evolve_in_place(T::one());
        }
    }
    Ok(MeasuredTrace::from_beta(x.dim(), TraceTarget::Vertex(*target), beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// `exp(i (t/n) A)` for the hypercube adjacency matrix, by nalgebra's
    /// Padé scaling-and-squaring.
    fn expm_evolution(n: usize, t: f64) -> DMatrix<Complex<f64>> {
        let dim = 1 << n;
        let mut gen = DMatrix::<Complex<f64>>::zeros(dim, dim);
        for x in 0..dim {
            for j in 0..n {
                gen[(x, x ^ (1 << j))] = Complex::new(0.0, t / n as f64);
            }
        }
        gen.exp()
    }

    #[test]
    fn zero_time_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let amps: Vec<_> = (0..32).map(|_| Complex::new(rng.random(), rng.random())).collect();
        let s = PositionState::<f64>::from_amplitudes(5, amps).unwrap();
        assert!(continuous_evolve(&s, 0.0).max_abs_diff(&s) < 1e-15);
    }

    #[test]
    fn n2_at_pi_reaches_far_corner() {
        let s = PositionState::<f64>::basis(&"00".parse().unwrap()).unwrap();
        let out = continuous_evolve(&s, PI);
        assert!((out.amp(&"11".parse().unwrap()).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_form_matches_matrix_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 1..=6usize {
            for _ in 0..3 {
                let t = rng.random_range(0.0..2.0 * PI * n as f64);
                let u = expm_evolution(n, t);
                let amps: Vec<_> = (0..1 << n)
                    .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let s = PositionState::from_amplitudes(n, amps.clone()).unwrap();
                let ours = continuous_evolve(&s, t);
                let v = nalgebra::DVector::from_vec(amps);
                let theirs = &u * v;
                for x in 0..1 << n {
                    assert!((ours.amplitudes()[x] - theirs[x]).norm() < 1e-10, "n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn evolution_is_unitary() {
        for n in 1..=8 {
            let s = PositionState::<f64>::basis(&Vertex::new(n, 1).unwrap()).unwrap();
            let out = continuous_evolve(&s, 3.7);
            assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_matches_dense() {
        let n = 7;
        let mut p = ProductState::<f64>::corner(n);
        p.evolve_in_place(5.3);
        let dense = continuous_evolve(&PositionState::basis(&Vertex::zero(n).unwrap()).unwrap(), 5.3);
        assert!(p.to_dense().unwrap().max_abs_diff(&dense) < 1e-14);
    }

    #[test]
    fn closed_form_alpha() {
        for n in [1usize, 2, 5, 64, 1000] {
            let a = continuous_alpha::<f64>(n, PI * n as f64 / 2.0);
            assert!((a.norm() - 1.0).abs() < 1e-12);
            assert_eq!(continuous_alpha::<f64>(n, 0.0).norm(), 0.0);
            let mut p = ProductState::<f64>::corner(n);
            let t = 0.37 * n as f64;
            p.evolve_in_place(t);
            assert!((p.amplitude(|_| true) - continuous_alpha(n, t)).norm() < 1e-12);
        }
    }

    #[test]
    fn alpha_window_beta_point_four() {
        use crate::calibrated::CONTINUOUS_OFFSET_DEFICIT as C;
        let n = 100usize;
        for sign in [-1.0, 1.0] {
            let t = PI * n as f64 / 2.0 + sign * (n as f64).powf(0.4);
            let a = continuous_alpha::<f64>(n, t).norm();
            assert!(a >= 1.0 - C / (n as f64).powf(0.2), "{a}");
        }
    }

    #[test]
    fn half_amplitude_offset() {
        // cosⁿ(c/√n) → e^{−c²/2}: with e^{−c²} = 1/2 the amplitude at
        // t = πn/2 − c√n tends to 1/√2, i.e. probability 1/2.
        let c = crate::calibrated::continuous_half_offset();
        let n = 1_000_000usize;
        let t = PI * n as f64 / 2.0 - c * (n as f64).sqrt();
        let a = continuous_alpha::<f64>(n, t).norm();
        assert!((a - 0.5f64.sqrt()).abs() < 1e-5, "{a}");
        let t = PI * n as f64 / 2.0 - (2.0 * std::f64::consts::LN_2).sqrt() * (n as f64).sqrt();
        assert!((continuous_alpha::<f64>(n, t).norm() - 0.5).abs() < 1e-5);
    }

    #[test]
    fn concurrent_sqrt_band() {
        let k = crate::calibrated::CONTINUOUS_SQRT_CENTRE;
        for n in [16usize, 64, 256] {
            let horizon = (PI * n as f64 / 2.0).round() as usize;
            let p = continuous_measured_trace::<f64>(n, horizon).total();
            let v = p * (n as f64).sqrt();
            assert!(v >= k / 2f64.sqrt() && v <= k * 2f64.sqrt(), "n={n} {v}");
        }
    }

    #[test]
    fn closed_form_gamma() {
        for n in [1usize, 3, 10] {
            assert_eq!(continuous_gamma::<f64>(n, 0.0), 1.0);
            let g = continuous_gamma::<f64>(n, n as f64 * PI / 3.0);
            assert!((g - 0.5f64.powi(n as i32)).abs() < 1e-14);
        }
        for n in 1..=6usize {
            let x = Vertex::zero(n).unwrap();
            for t in [0.5, 1.0, 2.2, 7.9] {
                let out = continuous_evolve(&PositionState::<f64>::basis(&x).unwrap(), t);
                let g = out.amp(&x);
                assert!((g - Complex::new(continuous_gamma(n, t), 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn monotone_on_first_quarter_period() {
        for n in [4usize, 16, 64] {
            let horizon = (PI * n as f64 / 2.0).floor() as usize;
            for t in 0..horizon {
                let (a0, a1) = (
                    continuous_alpha::<f64>(n, t as f64).norm(),
                    continuous_alpha::<f64>(n, (t + 1) as f64).norm(),
                );
                assert!(a1 >= a0);
                assert!(continuous_gamma::<f64>(n, (t + 1) as f64) <= continuous_gamma::<f64>(n, t as f64));
            }
        }
    }

    #[test]
    fn normalization_with_far_corner() {
        let n = 6;
        let t = 4.1;
        let out = continuous_evolve(&PositionState::<f64>::basis(&Vertex::zero(n).unwrap()).unwrap(), t);
        let far = continuous_alpha::<f64>(n, t).norm_sqr();
        let rest: f64 = out.amplitudes()[..(1 << n) - 1].iter().map(|a| a.norm_sqr()).sum();
        assert!((far + rest - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_steps_have_tiny_but_nonzero_stops() {
        let n = 20;
        let trace = continuous_measured_trace::<f64>(n, 3);
        assert!(trace.stop_prob[1] > 0.0);
        assert!((trace.stop_prob[1] - (1.0 / n as f64).sin().powi(2 * n as i32)).abs() < 1e-30);
        assert!(trace.total() < 1e-20);
    }

    #[test]
    fn recursion_matches_dense_measured_walk() {
        for n in [3usize, 6] {
            let horizon = (PI * n as f64).ceil() as usize;
            let x = Vertex::zero(n).unwrap();
            let direct = continuous_measured_direct::<f64>(&x, &x.complement(), horizon).unwrap();
            let closed = continuous_measured_trace::<f64>(n, horizon);
            assert!(direct.max_beta_diff(&closed) < 1e-9);
            assert!((direct.total() - closed.total()).abs() < 1e-9);
        }
    }

    #[test]
    fn stop_amplitude_lower_bound() {
        for n in [8usize, 32, 128] {
            let horizon = (PI * n as f64 / 2.0).round() as usize;
            let trace = continuous_measured_trace::<f64>(n, horizon);
            for t in 0..horizon {
                let a0 = continuous_alpha::<f64>(n, t as f64).norm();
                let a1 = continuous_alpha::<f64>(n, (t + 1) as f64).norm();
                assert!(trace.beta[t + 1].norm() >= a1 - a0 - 1e-12, "n={n} t={t}");
            }
        }
    }
}
