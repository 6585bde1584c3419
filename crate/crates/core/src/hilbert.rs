//! Dense amplitude vectors over the coin ⊗ position space of the n-cube.
//!
//! Layout: the amplitude of basis state `|direction, position⟩` lives at
//! `direction * 2^n + position`. A position is an integer whose bit `i`
//! holds coordinate `e_{i+1}`; in the textual bitstring form, character `i`
//! is bit `i`, so `"10"` is the vertex `e_1` (integer 1).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Result, WalkError};
use crate::scalar::{KahanSum, Real};

/// Largest cube dimension addressable by [`Vertex`].
pub const MAX_VERTEX_BITS: usize = 63;

/// Largest cube dimension for which a dense state may be allocated.
pub const MAX_DENSE_DIM: usize = 24;

/// A vertex of the n-cube, i.e. an n-bit string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    n: usize,
    bits: u64,
}

impl Vertex {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 {
            return Err(WalkError::ZeroDimension);
        }
        if n > MAX_VERTEX_BITS {
            return Err(WalkError::DimensionTooLarge(n));
        }
        if bits >> n != 0 {
            return Err(WalkError::BitstringLength {
                expected: n,
                got: 64 - bits.leading_zeros() as usize,
            });
        }
        Ok(Self { n, bits })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(n, 0).map(|v| v.complement())
    }

    /// Parses a bitstring of exactly `n` characters.
    pub fn parse_with_len(s: &str, n: usize) -> Result<Self> {
        let v: Vertex = s.parse()?;
        if v.n != n {
            return Err(WalkError::BitstringLength { expected: n, got: v.n });
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            bits: !self.bits & self.mask(),
        }
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn hamming(&self, other: &Vertex) -> usize {
        (self.bits ^ other.bits).count_ones() as usize
    }

    pub fn flip(&self, bit: usize) -> Self {
        Self {
            n: self.n,
            bits: self.bits ^ (1 << bit),
        }
    }
}

impl FromStr for Vertex {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        let n = s.chars().count();
        if n == 0 {
            return Err(WalkError::ZeroDimension);
        }
        if n > MAX_VERTEX_BITS {
            return Err(WalkError::DimensionTooLarge(n));
        }
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(WalkError::InvalidBitstring(s.to_string())),
            }
        }
        Ok(Self { n, bits })
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.bits >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Cube dimension and coin dimension of a walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    n: usize,
    coin_dim: usize,
}

impl LatticeSpec {
    pub fn new(n: usize, coin_dim: usize) -> Result<Self> {
        if n == 0 {
            return Err(WalkError::ZeroDimension);
        }
        if n > MAX_DENSE_DIM {
            return Err(WalkError::DimensionTooLarge(n));
        }
        if coin_dim != n && coin_dim != n + 1 {
            return Err(WalkError::InvalidCoinDimension { n, coin_dim });
        }
        Ok(Self { n, coin_dim })
    }

    /// The periodic walk with one coin direction per cube axis.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// The aperiodic walk with an extra resting direction (direction 0).
    pub fn resting(n: usize) -> Result<Self> {
        Self::new(n, n + 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn is_resting(&self) -> bool {
        self.coin_dim == self.n + 1
    }

    /// Number of vertices, `2^n`.
    pub fn positions(&self) -> usize {
        1 << self.n
    }

    /// Length of the amplitude vector.
    pub fn len(&self) -> usize {
        self.coin_dim * self.positions()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position bit flipped by a coin direction; `None` for the resting direction.
    pub fn shift_bit(&self, direction: usize) -> Option<usize> {
        if self.is_resting() {
            direction.checked_sub(1)
        } else {
            Some(direction)
        }
    }

    fn check_vertex(&self, x: &Vertex) -> Result<()> {
        if x.dim() != self.n {
            return Err(WalkError::BitstringLength {
                expected: self.n,
                got: x.dim(),
            });
        }
        Ok(())
    }
}

/// A (possibly unnormalized) state of the coined walk.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState<T> {
    spec: LatticeSpec,
    amps: Vec<Complex<T>>,
}

impl<T: Real> WalkState<T> {
    pub fn zeros(spec: LatticeSpec) -> Self {
        Self {
            spec,
            amps: vec![Complex::new(T::zero(), T::zero()); spec.len()],
        }
    }

    pub fn from_amplitudes(spec: LatticeSpec, amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() != spec.len() {
            return Err(WalkError::DimensionMismatch {
                expected: spec.len(),
                got: amps.len(),
            });
        }
        Ok(Self { spec, amps })
    }

    /// A random normalized state with entries drawn uniformly from the unit square.
    pub fn random<R: Rng + ?Sized>(spec: LatticeSpec, rng: &mut R) -> Self {
        let amps = (0..spec.len())
            .map(|_| Complex::new(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0))))
            .collect();
        let mut s = Self { spec, amps };
        let norm = s.norm_sqr().sqrt();
        s.scale(T::one() / norm);
        s
    }

    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn index(&self, direction: usize, position: usize) -> usize {
        direction * self.spec.positions() + position
    }

    pub fn amp(&self, direction: usize, position: usize) -> Complex<T> {
        self.amps[self.index(direction, position)]
    }

    pub fn set_amp(&mut self, direction: usize, position: usize, value: Complex<T>) {
        let i = self.index(direction, position);
        self.amps[i] = value;
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).collect::<KahanSum<T>>().value()
    }

    pub fn scale(&mut self, factor: T) {
        for a in &mut self.amps {
            *a = a.scale(factor);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for (a, b) in self.amps.iter().zip(&other.amps) {
            let p = a.conj() * b;
            re.add(p.re);
            im.add(p.im);
        }
        Complex::new(re.value(), im.value())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Overlap with the symmetric coin state at `x`, `⟨f_x|self⟩`.
    pub fn symmetric_overlap(&self, x: &Vertex) -> Complex<T> {
        let norm = T::from_count(self.spec.coin_dim()).sqrt();
        let mut acc = Complex::new(T::zero(), T::zero());
        for d in 0..self.spec.coin_dim() {
            acc += self.amp(d, x.index());
        }
        acc.unscale(norm)
    }
}

/// The symmetric start state `(1/√d) Σ_i |i⟩ ⊗ |x⟩`, where `d` is the coin
/// dimension (the resting direction is included when present).
pub fn make_initial<T: Real>(spec: LatticeSpec, x: &Vertex) -> Result<WalkState<T>> {
    spec.check_vertex(x)?;
    let mut s = WalkState::zeros(spec);
    let amp = Complex::new(T::one() / T::from_count(spec.coin_dim()).sqrt(), T::zero());
    for d in 0..spec.coin_dim() {
        s.set_amp(d, x.index(), amp);
    }
    Ok(s)
}

/// Which subspace at the target vertex counts as a hit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProjectorRank {
    /// Every coin state at the target: `Σ_i |i,x⟩⟨i,x|`.
    #[default]
    Position,
    /// Only the symmetric coin state at the target: `|f⟩⟨f|`.
    SymmetricCoin,
}

/// The two-outcome measurement `{Π₀, Π₁ = 1 − Π₀}` at a target vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositionProjector {
    pub target: Vertex,
    pub rank: ProjectorRank,
}

impl PositionProjector {
    pub fn new(target: Vertex) -> Self {
        Self {
            target,
            rank: ProjectorRank::Position,
        }
    }

    pub fn symmetric(target: Vertex) -> Self {
        Self {
            target,
            rank: ProjectorRank::SymmetricCoin,
        }
    }

    /// `Π₀ s`.
    pub fn stop_part<T: Real>(&self, s: &WalkState<T>) -> WalkState<T> {
        let spec = s.spec();
        let x = self.target.index();
        let mut out = WalkState::zeros(spec);
        match self.rank {
            ProjectorRank::Position => {
                for d in 0..spec.coin_dim() {
                    out.set_amp(d, x, s.amp(d, x));
                }
            }
            ProjectorRank::SymmetricCoin => {
                let c = s.symmetric_overlap(&self.target);
                let w = T::one() / T::from_count(spec.coin_dim()).sqrt();
                for d in 0..spec.coin_dim() {
                    out.set_amp(d, x, c.scale(w));
                }
            }
        }
        out
    }

    /// `Π₁ s`, computed in place.
    pub fn continue_part_in_place<T: Real>(&self, s: &mut WalkState<T>) {
        let spec = s.spec();
        let x = self.target.index();
        match self.rank {
            ProjectorRank::Position => {
                for d in 0..spec.coin_dim() {
                    s.set_amp(d, x, Complex::new(T::zero(), T::zero()));
                }
            }
            ProjectorRank::SymmetricCoin => {
                let c = s.symmetric_overlap(&self.target);
                let w = T::one() / T::from_count(spec.coin_dim()).sqrt();
                for d in 0..spec.coin_dim() {
                    let a = s.amp(d, x) - c.scale(w);
                    s.set_amp(d, x, a);
                }
            }
        }
    }

    /// Squared norm of `Π₀ s` without materializing it.
    pub fn stop_probability<T: Real>(&self, s: &WalkState<T>) -> T {
        let x = self.target.index();
        match self.rank {
            ProjectorRank::Position => (0..s.spec().coin_dim())
                .map(|d| s.amp(d, x).norm_sqr())
                .collect::<KahanSum<T>>()
                .value(),
            ProjectorRank::SymmetricCoin => s.symmetric_overlap(&self.target).norm_sqr(),
        }
    }
}

/// Outcome bookkeeping of one measurement.
#[derive(Clone, Debug)]
pub struct Measurement<T> {
    /// `‖Π₀ s‖`.
    pub stop_norm: T,
    /// `Π₁ s`, deliberately left unnormalized.
    pub residual: WalkState<T>,
}

pub fn project_measure<T: Real>(state: &WalkState<T>, proj: &PositionProjector) -> Result<Measurement<T>> {
    state.spec().check_vertex(&proj.target)?;
    let stop_norm = proj.stop_probability(state).sqrt();
    let mut residual = state.clone();
    proj.continue_part_in_place(&mut residual);
    Ok(Measurement { stop_norm, residual })
}

/// Probability of each position, summed over coin directions.
pub fn position_marginal<T: Real>(state: &WalkState<T>) -> Vec<T> {
    let spec = state.spec();
    let mut marginal = vec![T::zero(); spec.positions()];
    for d in 0..spec.coin_dim() {
        let block = &state.amplitudes()[d * spec.positions()..(d + 1) * spec.positions()];
        for (m, a) in marginal.iter_mut().zip(block) {
            *m += a.norm_sqr();
        }
    }
    marginal
}

/// Total marginal probability per Hamming weight `0..=n`.
pub fn weight_marginal<T: Real>(marginal: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n + 1];
    for (x, p) in marginal.iter().enumerate() {
        out[x.count_ones() as usize] += *p;
    }
    out
}

/// Largest spread of marginal values within any Hamming-weight class.
pub fn weight_class_spread<T: Real>(marginal: &[T], n: usize) -> T {
    let mut lo = vec![T::infinity(); n + 1];
    let mut hi = vec![T::neg_infinity(); n + 1];
    for (x, p) in marginal.iter().enumerate() {
        let w = x.count_ones() as usize;
        lo[w] = lo[w].min(*p);
        hi[w] = hi[w].max(*p);
    }
    lo.iter().zip(&hi).map(|(l, h)| *h - *l).fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn vertex_parsing_and_display() {
        let v: Vertex = "1010".parse().unwrap();
        assert_eq!(v.bits(), 0b0101);
        assert_eq!(v.to_string(), "1010");
        assert_eq!(v.complement().to_string(), "0101");
        assert_eq!(v.weight(), 2);
        assert!(matches!("10a".parse::<Vertex>(), Err(WalkError::InvalidBitstring(_))));
        assert!(matches!(
            Vertex::parse_with_len("101", 4),
            Err(WalkError::BitstringLength { expected: 4, got: 3 })
        ));
        assert!(Vertex::new(2, 0b100).is_err());
    }

    #[test]
    fn lattice_spec_invariants() {
        assert!(LatticeSpec::new(0, 0).is_err());
        assert!(LatticeSpec::new(3, 5).is_err());
        let s = LatticeSpec::resting(3).unwrap();
        assert_eq!(s.len(), 4 * 8);
        assert_eq!(s.shift_bit(0), None);
        assert_eq!(s.shift_bit(2), Some(1));
        assert_eq!(LatticeSpec::periodic(3).unwrap().shift_bit(2), Some(2));
    }

    #[test]
    fn initial_state_n1() {
        let spec = LatticeSpec::periodic(1).unwrap();
        let s = make_initial::<f64>(spec, &"0".parse().unwrap()).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0), c(0.0)]);
    }

    #[test]
    fn initial_state_n2() {
        let spec = LatticeSpec::periodic(2).unwrap();
        let s = make_initial::<f64>(spec, &"00".parse().unwrap()).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((s.amp(0, 0).re - h).abs() < 1e-15);
        assert!((s.amp(1, 0).re - h).abs() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn initial_state_n4() {
        let spec = LatticeSpec::periodic(4).unwrap();
        let x: Vertex = "1010".parse().unwrap();
        let s = make_initial::<f64>(spec, &x).unwrap();
        let nonzero: Vec<_> = s
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .collect();
        assert_eq!(nonzero.len(), 4);
        for (i, a) in nonzero {
            assert_eq!(i % 16, x.index());
            assert!((a.re - 0.5).abs() < 1e-15);
        }
        let direct: f64 = s.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((direct - 1.0).abs() < 1e-15);
    }

    #[test]
    fn initial_state_resting_includes_rest_direction() {
        let spec = LatticeSpec::resting(3).unwrap();
        let s = make_initial::<f64>(spec, &"000".parse().unwrap()).unwrap();
        for d in 0..4 {
            assert!((s.amp(d, 0).re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn initial_state_rejects_wrong_length() {
        let spec = LatticeSpec::periodic(3).unwrap();
        assert!(make_initial::<f64>(spec, &"00".parse().unwrap()).is_err());
    }

    #[test]
    fn measure_state_entirely_at_target() {
        let spec = LatticeSpec::periodic(3).unwrap();
        let x: Vertex = "110".parse().unwrap();
        let s = make_initial::<f64>(spec, &x).unwrap();
        let m = project_measure(&s, &PositionProjector::new(x)).unwrap();
        assert!((m.stop_norm - 1.0).abs() < 1e-15);
        assert_eq!(m.residual.norm_sqr(), 0.0);
    }

    #[test]
    fn measure_state_away_from_target() {
        let spec = LatticeSpec::periodic(3).unwrap();
        let s = make_initial::<f64>(spec, &"000".parse().unwrap()).unwrap();
        let m = project_measure(&s, &PositionProjector::new("111".parse().unwrap())).unwrap();
        assert_eq!(m.stop_norm, 0.0);
        assert_eq!(m.residual, s);
    }

    #[test]
    fn projector_algebra_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = LatticeSpec::periodic(5).unwrap();
        for trial in 0..100 {
            let s = WalkState::<f64>::random(spec, &mut rng);
            let target = Vertex::new(5, trial % 32).unwrap();
            for proj in [PositionProjector::new(target), PositionProjector::symmetric(target)] {
                let p0 = proj.stop_part(&s);
                let mut p1 = s.clone();
                proj.continue_part_in_place(&mut p1);
                assert!((p0.norm_sqr() + p1.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
                // Π₀Π₁ = 0 and Π₀² = Π₀.
                assert!(proj.stop_part(&p1).norm_sqr() < 1e-24);
                assert!(proj.stop_part(&p0).max_abs_diff(&p0) < 1e-15);
                // Π₀ + Π₁ = 1.
                let mut sum = p0.clone();
                for (a, b) in sum.amplitudes_mut().iter_mut().zip(p1.amplitudes()) {
                    *a += b;
                }
                assert!(sum.max_abs_diff(&s) < 1e-15);
            }
        }
    }

    #[test]
    fn marginal_of_initial_is_indicator() {
        let spec = LatticeSpec::periodic(3).unwrap();
        let x: Vertex = "011".parse().unwrap();
        let s = make_initial::<f64>(spec, &x).unwrap();
        let m = position_marginal(&s);
        for (i, p) in m.iter().enumerate() {
            let expected = if i == x.index() { 1.0 } else { 0.0 };
            assert!((p - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn marginal_of_uniform_state() {
        let spec = LatticeSpec::periodic(4).unwrap();
        let a = c(1.0 / (spec.len() as f64).sqrt());
        let s = WalkState::from_amplitudes(spec, vec![a; spec.len()]).unwrap();
        for p in position_marginal(&s) {
            assert!((p - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn from_amplitudes_checks_length() {
        let spec = LatticeSpec::periodic(2).unwrap();
        assert!(matches!(
            WalkState::<f64>::from_amplitudes(spec, vec![c(0.0); 3]),
            Err(WalkError::DimensionMismatch { expected: 8, got: 3 })
        ));
    }

    proptest! {
        #[test]
        fn marginal_sums_to_norm(seed in any::<u64>(), n in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = LatticeSpec::periodic(n).unwrap();
            let mut s = WalkState::<f64>::random(spec, &mut rng);
            s.scale(0.7);
            let total: f64 = position_marginal(&s).iter().sum();
            prop_assert!((total - s.norm_sqr()).abs() < 1e-12);
        }

        #[test]
        fn vertex_text_round_trip(n in 1usize..=63, raw in any::<u64>()) {
            let v = Vertex::new(n, raw & ((1u64 << n) - 1)).unwrap();
            prop_assert_eq!(v.to_string().parse::<Vertex>().unwrap(), v);
        }
    }
}
