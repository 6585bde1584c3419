//! The coined discrete-time walk `U = S · (C ⊗ 1)` on the n-cube.
//!
//! The step is applied as two in-place passes over the amplitude vector: the
//! coin acts within each position block, then every direction block is
//! permuted by `x ↦ x ⊕ e_i`. No `(n·2^n)²` matrix is ever formed.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Result, WalkError};
use crate::hilbert::{LatticeSpec, WalkState};
use crate::scalar::Real;

/// A real symmetric coin: `a` on the diagonal, `b` everywhere else.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricCoin<T> {
    pub dim: usize,
    pub a: T,
    pub b: T,
}

/// The Grover coin of dimension `dim`: `a = 2/dim − 1`, `b = 2/dim`.
pub fn grover_coin<T: Real>(dim: usize) -> Result<SymmetricCoin<T>> {
    if dim == 0 {
        return Err(WalkError::ZeroDimension);
    }
    let two_over = T::lit(2.0) / T::from_count(dim);
    Ok(SymmetricCoin {
        dim,
        a: two_over - T::one(),
        b: two_over,
    })
}

/// The `(n+1)`-dimensional Grover coin of the aperiodic walk; direction 0 is
/// the self-loop with amplitude `2/(n+1) − 1`.
pub fn resting_coin<T: Real>(n: usize) -> Result<SymmetricCoin<T>> {
    if n == 0 {
        return Err(WalkError::ZeroDimension);
    }
    grover_coin(n + 1)
}

impl<T: Real> SymmetricCoin<T> {
    pub fn entry(&self, row: usize, col: usize) -> T {
        if row == col {
            self.a
        } else {
            self.b
        }
    }

    /// Row-major dense matrix.
    pub fn matrix(&self) -> Vec<Complex<T>> {
        let mut m = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.push(Complex::new(self.entry(i, j), T::zero()));
            }
        }
        m
    }

    /// `max |(C C†)_{ij} − δ_{ij}|`.
    pub fn unitarity_residual(&self) -> T {
        unitarity_residual(&self.matrix(), self.dim)
    }

    /// Probability of leaving the coin in `outgoing` given `incoming`.
    pub fn transition_probability(&self, incoming: usize, outgoing: usize) -> T {
        let e = self.entry(outgoing, incoming);
        e * e
    }
}

/// `max |(M M†)_{ij} − δ_{ij}|` for a row-major `dim × dim` matrix.
pub fn unitarity_residual<T: Real>(m: &[Complex<T>], dim: usize) -> T {
    let mut worst = T::zero();
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..dim {
                acc += m[i * dim + k] * m[j * dim + k].conj();
            }
            if i == j {
                acc -= T::one();
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// The coin part of a step operator.
#[derive(Clone, Debug, PartialEq)]
pub enum Coin<T> {
    Symmetric(SymmetricCoin<T>),
    /// Arbitrary row-major matrix; used for mutation tests and diagnostics.
    Dense {
        dim: usize,
        matrix: Vec<Complex<T>>,
    },
}

impl<T: Real> Coin<T> {
    pub fn dim(&self) -> usize {
        match self {
            Coin::Symmetric(c) => c.dim,
            Coin::Dense { dim, .. } => *dim,
        }
    }

    pub fn matrix(&self) -> Vec<Complex<T>> {
        match self {
            Coin::Symmetric(c) => c.matrix(),
            Coin::Dense { matrix, .. } => matrix.clone(),
        }
    }

    /// The same coin with one row negated. Still unitary, but equivalent to
    /// the original up to position-dependent phases, so it leaves every
    /// position probability unchanged.
    pub fn with_row_sign_flip(&self, row: usize) -> Self {
        let dim = self.dim();
        let mut matrix = self.matrix();
        for x in &mut matrix[row * dim..(row + 1) * dim] {
            *x = -*x;
        }
        Coin::Dense { dim, matrix }
    }

    /// The same coin with one column negated. Still unitary, and it does
    /// change the walk's position statistics.
    pub fn with_column_sign_flip(&self, col: usize) -> Self {
        let dim = self.dim();
        let mut matrix = self.matrix();
        for r in 0..dim {
            matrix[r * dim + col] = -matrix[r * dim + col];
        }
        Coin::Dense { dim, matrix }
    }
}

/// One step `U = S · (C ⊗ 1)` of the walk, optionally with deleted edges.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOperator<T> {
    spec: LatticeSpec,
    coin: Coin<T>,
    /// Deleted edges as `(bit, lower endpoint)`: the shift acts as the
    /// identity on both half-edges.
    deleted: Vec<(usize, usize)>,
}

impl<T: Real> StepOperator<T> {
    pub fn new(spec: LatticeSpec, coin: Coin<T>) -> Result<Self> {
        if coin.dim() != spec.coin_dim() {
            return Err(WalkError::DimensionMismatch {
                expected: spec.coin_dim(),
                got: coin.dim(),
            });
        }
        Ok(Self {
            spec,
            coin,
            deleted: Vec::new(),
        })
    }

    /// The Grover walk on `spec` (resting coin when `spec` has a rest direction).
    pub fn grover(spec: LatticeSpec) -> Self {
        let coin = grover_coin(spec.coin_dim()).expect("coin_dim >= 1");
        Self {
            spec,
            coin: Coin::Symmetric(coin),
            deleted: Vec::new(),
        }
    }

    /// Removes the edge `{u, u ⊕ e_bit}` from the shift.
    pub fn delete_edge(&mut self, bit: usize, u: usize) -> Result<()> {
        if bit >= self.spec.n() || u >= self.spec.positions() {
            return Err(WalkError::DimensionMismatch {
                expected: self.spec.n(),
                got: bit,
            });
        }
        let lower = u & !(1 << bit);
        if !self.deleted.contains(&(bit, lower)) {
            self.deleted.push((bit, lower));
        }
        Ok(())
    }

    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn coin(&self) -> &Coin<T> {
        &self.coin
    }

    pub fn is_resting(&self) -> bool {
        self.spec.is_resting()
    }

    pub fn step(&self, s: &WalkState<T>) -> Result<WalkState<T>> {
        let mut out = s.clone();
        self.step_in_place(&mut out)?;
        Ok(out)
    }

    pub fn step_in_place(&self, s: &mut WalkState<T>) -> Result<()> {
        if s.spec() != self.spec {
            return Err(WalkError::DimensionMismatch {
                expected: self.spec.len(),
                got: s.spec().len(),
            });
        }
        self.apply_coin(s.amplitudes_mut());
        self.apply_shift(s.amplitudes_mut());
        Ok(())
    }

    fn apply_coin(&self, amps: &mut [Complex<T>]) {
        let positions = self.spec.positions();
        let dim = self.spec.coin_dim();
        match &self.coin {
            Coin::Symmetric(c) => {
                // C v = (a − b) v + b (Σ v) 1
                let mut sums = vec![Complex::new(T::zero(), T::zero()); positions];
                for block in amps.chunks_exact(positions) {
                    for (s, a) in sums.iter_mut().zip(block) {
                        *s += a;
                    }
                }
                let diag = c.a - c.b;
                for block in amps.chunks_exact_mut(positions) {
                    for (a, s) in block.iter_mut().zip(&sums) {
                        *a = a.scale(diag) + s.scale(c.b);
                    }
                }
            }
            Coin::Dense { matrix, .. } => {
                let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
                for x in 0..positions {
                    for (d, vd) in v.iter_mut().enumerate() {
                        *vd = amps[d * positions + x];
                    }
                    for i in 0..dim {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for (j, vj) in v.iter().enumerate() {
                            acc += matrix[i * dim + j] * vj;
                        }
                        amps[i * positions + x] = acc;
                    }
                }
            }
        }
    }

    fn apply_shift(&self, amps: &mut [Complex<T>]) {
        let positions = self.spec.positions();
        for (d, block) in amps.chunks_exact_mut(positions).enumerate() {
            let Some(bit) = self.spec.shift_bit(d) else {
                continue;
            };
            let mask = 1 << bit;
            for x in 0..positions {
                if x & mask == 0 {
                    block.swap(x, x | mask);
                }
            }
            // Swapping is an involution, so swapping back restores deleted edges.
            for &(b, lower) in &self.deleted {
                if b == bit {
                    block.swap(lower, lower | mask);
                }
            }
        }
    }

    /// The `dim × dim` matrix `S_k · C` through which `U` acts on the Fourier
    /// mode `|k̃⟩`, with `(S_k)_{ll} = (−1)^{k_l}`. Row-major.
    pub fn fourier_block(&self, k: usize) -> Vec<Complex<T>> {
        let dim = self.spec.coin_dim();
        let mut m = self.coin.matrix();
        for row in 0..dim {
            let flip = self.spec.shift_bit(row).is_some_and(|bit| k >> bit & 1 == 1);
            if flip {
                for x in &mut m[row * dim..(row + 1) * dim] {
                    *x = -*x;
                }
            }
        }
        m
    }
}

/// `U^t s`.
pub fn evolve<T: Real>(op: &StepOperator<T>, s: &WalkState<T>, t: usize) -> Result<WalkState<T>> {
    let mut out = s.clone();
    for _ in 0..t {
        op.step_in_place(&mut out)?;
    }
    Ok(out)
}

/// A classical walker state of the coin-measured walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DirectedPosition {
    pub direction: usize,
    pub position: usize,
}

/// One step of the walk with the coin measured in the direction basis after
/// every step: draw the new direction `j` with probability `|C_{j,i}|²`, then
/// shift along `j`.
///
/// Only symmetric coins are supported; a dense coin panics.
pub fn coin_measured_classical_step<T: Real, R: Rng + ?Sized>(
    op: &StepOperator<T>,
    rng: &mut R,
    current: DirectedPosition,
) -> DirectedPosition {
    let Coin::Symmetric(coin) = op.coin() else {
        panic!("coin-measured walk requires a symmetric coin");
    };
    let stay = coin.a * coin.a;
    let u = T::lit(rng.random::<f64>());
    let direction = if u < stay {
        current.direction
    } else {
        // Uniform over the remaining dim − 1 directions.
        let others = coin.dim - 1;
        let mut j = rng.random_range(0..others);
        if j >= current.direction {
            j += 1;
        }
        j
    };
    let position = match op.spec().shift_bit(direction) {
        Some(bit) => current.position ^ (1 << bit),
        None => current.position,
    };
    DirectedPosition { direction, position }
}
