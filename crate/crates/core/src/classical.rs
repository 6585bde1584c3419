//! Classical walks on the n-cube for comparison.
//!
//! By symmetry the simple walk collapses to a birth–death chain on the
//! Hamming weight, so corner-to-corner hitting times come from an `O(n)`
//! solve rather than the `2^n`-state chain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coined::{coin_measured_classical_step, DirectedPosition, StepOperator};
use crate::error::{Result, WalkError};
use crate::hilbert::LatticeSpec;
use crate::scalar::{KahanSum, Real};

/// Birth–death chain on the Hamming weight of the simple walk, with an
/// optional holding probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightChain<T> {
    pub n: usize,
    pub laziness: T,
}

impl<T: Real> WeightChain<T> {
    pub fn new(n: usize) -> Result<Self> {
        Self::lazy(n, T::zero())
    }

    pub fn lazy(n: usize, laziness: T) -> Result<Self> {
        if n == 0 {
            return Err(WalkError::ZeroDimension);
        }
        let l = laziness.to_f64().unwrap_or(f64::NAN);
        if !(0.0..1.0).contains(&l) {
            return Err(WalkError::InvalidProbability(l));
        }
        Ok(Self { n, laziness })
    }

    pub fn up(&self, w: usize) -> T {
        (T::one() - self.laziness) * T::from_count(self.n - w) / T::from_count(self.n)
    }

    pub fn down(&self, w: usize) -> T {
        (T::one() - self.laziness) * T::from_count(w) / T::from_count(self.n)
    }

    pub fn stay(&self, _w: usize) -> T {
        self.laziness
    }

    /// Expected steps from weight 0 to weight n.
    ///
    /// Forward elimination of `h(w) = 1 + stay·h(w) + up·h(w+1) + down·h(w−1)`:
    /// the time `E_w` to first climb from `w` to `w+1` satisfies
    /// `E_w = (1 + down(w)·E_{w−1}) / up(w)`, and `h(0) = Σ_w E_w`.
    pub fn corner_hitting_time(&self) -> Result<T> {
        let mut e = T::zero();
        let mut total = KahanSum::new();
        for w in 0..self.n {
            e = (T::one() + self.down(w) * e) / self.up(w);
            total.add(e);
        }
        let h = total.value();
        if !h.is_finite() {
            return Err(WalkError::HittingOverflow {
                n: self.n,
                max: max_exact_dim::<T>(),
            });
        }
        Ok(h)
    }

    /// Stationary law by power iteration from the point mass at weight 0.
    pub fn stationary_by_power_iteration(&self, iterations: usize) -> Vec<T> {
        let mut p = vec![T::zero(); self.n + 1];
        p[0] = T::one();
        for _ in 0..iterations {
            let mut next = vec![T::zero(); self.n + 1];
            for (w, &pw) in p.iter().enumerate() {
                next[w] += pw * self.stay(w);
                if w < self.n {
                    next[w + 1] += pw * self.up(w);
                }
                if w > 0 {
                    next[w - 1] += pw * self.down(w);
                }
            }
            p = next;
        }
        p
    }
}

/// Largest `n` for which the hitting time is representable in `T`.
pub fn max_exact_dim<T: Real>() -> usize {
    // h(0) ≈ 2^n (1 + 1/n); stay a few bits below the exponent range.
    (T::max_value().log2().to_f64().unwrap_or(127.0) as usize).saturating_sub(4)
}

/// Expected steps of the simple walk from a corner to the opposite corner.
pub fn exact_corner_hitting<T: Real>(n: usize) -> Result<T> {
    WeightChain::<T>::new(n)?.corner_hitting_time()
}

/// Mean corner-to-corner hitting time of the continuous-time chain with rates
/// `q_ij = p_ij`, from a tridiagonal solve of `−Q_A h = 1` on the transient
/// weights `A = {0, …, n−1}` (Thomas algorithm).
pub fn continuous_classical_hitting<T: Real>(n: usize) -> Result<T> {
    let chain = WeightChain::<T>::new(n)?;
    // Row w of −Q_A: total rate on the diagonal, −rate to each neighbour.
    let diag: Vec<T> = (0..n).map(|w| chain.up(w) + chain.down(w)).collect();
    let lower: Vec<T> = (0..n).map(|w| -chain.down(w)).collect();
    let upper: Vec<T> = (0..n).map(|w| -chain.up(w)).collect();
    let mut c_prime = vec![T::zero(); n];
    let mut d_prime = vec![T::zero(); n];
    for w in 0..n {
        let (sub, prev_c, prev_d) = if w == 0 {
            (T::zero(), T::zero(), T::zero())
        } else {
            (lower[w], c_prime[w - 1], d_prime[w - 1])
        };
        let denom = diag[w] - sub * prev_c;
        // Column n is absorbing, so the last super-diagonal entry drops out.
        c_prime[w] = if w + 1 < n { upper[w] / denom } else { T::zero() };
        d_prime[w] = (T::one() - sub * prev_d) / denom;
    }
    let mut h = vec![T::zero(); n];
    for w in (0..n).rev() {
        h[w] = d_prime[w] - if w + 1 < n { c_prime[w] * h[w + 1] } else { T::zero() };
    }
    let h0 = h[0];
    if !h0.is_finite() {
        return Err(WalkError::HittingOverflow {
            n,
            max: max_exact_dim::<T>(),
        });
    }
    Ok(h0)
}

/// Sample statistics of simulated first-hit times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HittingEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Walks that reached the cap without hitting; excluded from the mean.
    pub truncated: u64,
    pub completed: u64,
}

const SHARD: u64 = 2048;

/// Runs `trials` independent walks split into fixed-size shards; shard `k`
/// uses stream `k` of a ChaCha generator seeded with `seed`, so results do
/// not depend on the thread count.
fn sharded_hits<F>(trials: u64, seed: u64, walk: F) -> HittingEstimate
where
    F: Fn(&mut ChaCha8Rng) -> Option<u64> + Sync,
{
    let shards = trials.div_ceil(SHARD);
    let parts: Vec<(f64, f64, u64, u64)> = (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let count = SHARD.min(trials - k * SHARD);
            let (mut sum, mut sq, mut done, mut cut) = (0.0, 0.0, 0, 0);
            for _ in 0..count {
                match walk(&mut rng) {
                    Some(t) => {
                        let t = t as f64;
                        sum += t;
                        sq += t * t;
                        done += 1;
                    }
                    None => cut += 1,
                }
            }
            (sum, sq, done, cut)
        })
        .collect();
    let (sum, sq, completed, truncated) = parts
        .into_iter()
        .fold((0.0, 0.0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3));
    let k = completed as f64;
    let mean = if completed > 0 { sum / k } else { f64::NAN };
    let var = if completed > 1 {
        ((sq - k * mean * mean) / (k - 1.0)).max(0.0)
    } else {
        0.0
    };
    HittingEstimate {
        mean,
        stderr: (var / k.max(1.0)).sqrt(),
        truncated,
        completed,
    }
}

/// Monte Carlo estimate of the simple walk's corner-to-corner hitting time.
pub fn monte_carlo_hitting(n: usize, trials: u64, seed: u64, cap: u64) -> Result<HittingEstimate> {
    if n == 0 {
        return Err(WalkError::ZeroDimension);
    }
    if n > 63 {
        return Err(WalkError::DimensionTooLarge(n));
    }
    let target = (1u64 << n) - 1;
    Ok(sharded_hits(trials, seed, |rng| {
        let mut x = 0u64;
        for t in 1..=cap {
            x ^= 1 << rng.random_range(0..n);
            if x == target {
                return Some(t);
            }
        }
        None
    }))
}

/// Monte Carlo hitting time of the walk obtained by measuring the Grover
/// coin after every step (stay in direction with `|a|²`, switch to each other
/// direction with `|b|²`). The first direction is drawn uniformly.
pub fn directional_walk_hitting(n: usize, trials: u64, seed: u64, cap: u64) -> Result<HittingEstimate> {
    let spec = LatticeSpec::periodic(n)?;
    let op = StepOperator::<f64>::grover(spec);
    let target = spec.positions() - 1;
    Ok(sharded_hits(trials, seed, |rng| {
        let mut cur = DirectedPosition {
            direction: rng.random_range(0..n),
            position: 0,
        };
        for t in 1..=cap {
            cur = coin_measured_classical_step(&op, rng, cur);
            if cur.position == target {
                return Some(t);
            }
        }
        None
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::corner_hitting_exact;
    use num_traits::ToPrimitive;

    #[test]
    fn exact_small() {
        assert_eq!(exact_corner_hitting::<f64>(1).unwrap(), 1.0);
        assert_eq!(exact_corner_hitting::<f64>(2).unwrap(), 4.0);
        assert!(exact_corner_hitting::<f64>(20).unwrap() >= (1u64 << 19) as f64);
    }

    #[test]
    fn matches_rational_solve() {
        for n in 1..=40 {
            let exact = corner_hitting_exact(n).to_f64().unwrap();
            let float = exact_corner_hitting::<f64>(n).unwrap();
            assert!((float - exact).abs() <= 1e-12 * exact, "n={n}");
        }
    }

    #[test]
    fn lower_bound_two_to_n_minus_one() {
        for n in 1..=60 {
            let h = exact_corner_hitting::<f64>(n).unwrap();
            assert!(h >= 2f64.powi(n as i32 - 1));
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(exact_corner_hitting::<f64>(1000).is_ok());
        assert!(matches!(
            exact_corner_hitting::<f64>(1100),
            Err(WalkError::HittingOverflow { .. })
        ));
        assert!(exact_corner_hitting::<f32>(200).is_err());
    }

    #[test]
    fn laziness_rescales_hitting_time() {
        let plain = WeightChain::<f64>::new(9).unwrap().corner_hitting_time().unwrap();
        let lazy = WeightChain::<f64>::lazy(9, 0.5).unwrap().corner_hitting_time().unwrap();
        assert!((lazy - 2.0 * plain).abs() < 1e-9 * lazy);
        assert!(WeightChain::<f64>::lazy(3, 1.0).is_err());
    }

    #[test]
    fn rows_sum_to_one() {
        let chain = WeightChain::<f64>::lazy(7, 0.25).unwrap();
        for w in 0..=7 {
            assert!((chain.up(w) + chain.down(w) + chain.stay(w) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn continuous_chain_matches_discrete() {
        assert_eq!(continuous_classical_hitting::<f64>(1).unwrap(), 1.0);
        assert!((continuous_classical_hitting::<f64>(2).unwrap() - 4.0).abs() < 1e-12);
        // The tridiagonal solve loses about one digit per two dimensions.
        for n in 1..=20 {
            let d = exact_corner_hitting::<f64>(n).unwrap();
            let c = continuous_classical_hitting::<f64>(n).unwrap();
            assert!((d - c).abs() <= 1e-10 * d, "n={n}: {d} vs {c}");
        }
    }

    #[test]
    fn stationary_is_binomial() {
        for n in [1usize, 4, 12] {
            let chain = WeightChain::<f64>::lazy(n, 0.5).unwrap();
            let pi = chain.stationary_by_power_iteration(4000);
            let mut binom = 1.0;
            for (w, p) in pi.iter().enumerate() {
                if w > 0 {
                    binom = binom * (n - w + 1) as f64 / w as f64;
                }
                assert!((p - binom / 2f64.powi(n as i32)).abs() < 1e-12, "n={n} w={w}");
            }
        }
    }

    #[test]
    fn monte_carlo_n1_is_deterministic() {
        let est = monte_carlo_hitting(1, 500, 3, 10).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.truncated, 0);
    }

    #[test]
    fn monte_carlo_n6_agrees_with_exact() {
        let est = monte_carlo_hitting(6, 100_000, 17, 1 << 20).unwrap();
        let exact = exact_corner_hitting::<f64>(6).unwrap();
        assert!((est.mean - exact).abs() < 3.0 * est.stderr, "{est:?} vs {exact}");
    }

    #[test]
    fn monte_carlo_n10_truncation_rare() {
        let trials = 2000;
        let est = monte_carlo_hitting(10, trials, 5, 16 << 10).unwrap();
        assert!((est.truncated as f64) < 0.05 * trials as f64);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = monte_carlo_hitting(5, 5000, 9, 1 << 16).unwrap();
        let b = monte_carlo_hitting(5, 5000, 9, 1 << 16).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn directional_n2_alternates() {
        let est = directional_walk_hitting(2, 1000, 1, 100).unwrap();
        assert_eq!(est.mean, 2.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn directional_slower_than_simple_n6() {
        let est = directional_walk_hitting(6, 20_000, 8, 1 << 22).unwrap();
        let simple = exact_corner_hitting::<f64>(6).unwrap();
        assert!(est.mean - 3.0 * est.stderr > simple, "{est:?} vs {simple}");
    }

    #[test]
    fn directional_outgrows_polynomials() {
        // Local exponents d ln(mean) / d ln(n) increase steadily, so no fixed
        // degree fits; a linear fit of ln(mean) against n has a much smaller
        // residual than one against ln n.
        let ns: Vec<usize> = (4..=10).collect();
        let means: Vec<f64> = ns
            .iter()
            .map(|&n| directional_walk_hitting(n, 6000, 21, 1 << 24).unwrap().mean)
            .collect();
        let slopes: Vec<f64> = (1..ns.len())
            .map(|i| (means[i] / means[i - 1]).ln() / (ns[i] as f64 / ns[i - 1] as f64).ln())
            .collect();
        assert!(slopes.windows(2).all(|w| w[1] > w[0]), "{slopes:?}");
        let ys: Vec<f64> = means.iter().map(|m| m.ln()).collect();
        let rss = |xs: &[f64]| {
            let k = xs.len() as f64;
            let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            let slope = sxy / sxx;
            xs.iter()
                .zip(&ys)
                .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
                .sum::<f64>()
        };
        let linear: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        assert!(rss(&linear) * 4.0 < rss(&logs), "{} vs {}", rss(&linear), rss(&logs));
    }

    fn expected_quantum_cost(n: usize) -> f64 {
        let t = crate::horizon::default_horizon(n);
        let series = crate::spectral::SpectralSeries::<f64>::new(n).unwrap();
        t as f64 / crate::measured::corner_trace_analytic(&series, t).total()
    }

    #[test]
    fn exponential_gap_against_expected_quantum_cost() {
        let gap = |n: usize| exact_corner_hitting::<f64>(n).unwrap() / expected_quantum_cost(n);
        for n in 8..14 {
            let r = gap(n + 1) / gap(n);
            assert!(r >= 1.5, "n={n} ratio={r}");
        }
    }

    #[test]
    fn formula_cost_gap_grows_slower_at_small_n() {
        // With the asymptotic cost C·n²ln²n the per-step ratio is C-free and
        // dips below 1.5 up to n = 11.
        let gap = |n: usize| {
            let nf = n as f64;
            exact_corner_hitting::<f64>(n).unwrap() / (nf * nf * nf.ln().powi(2))
        };
        assert!(gap(9) / gap(8) < 1.5);
        assert!(gap(14) / gap(13) > 1.5);
    }

    #[test]
    fn amplified_cost_beats_classical_from_n12() {
        use crate::calibrated::{AMPLIFIED_COST, AMPLIFIED_SUCCESS};
        for n in 12..=40 {
            let nf = n as f64;
            let bound = AMPLIFIED_COST * nf * nf * nf.ln().powi(2);
            assert!(bound < exact_corner_hitting::<f64>(n).unwrap(), "n={n}");
        }
        for n in [12usize, 16, 24, 32] {
            let t = crate::horizon::default_horizon(n);
            let series = crate::spectral::SpectralSeries::<f64>::new(n).unwrap();
            let p = crate::measured::corner_trace_analytic(&series, t).total();
            let amp = crate::measured::amplified_concurrent(t, p, AMPLIFIED_SUCCESS).unwrap();
            let nf = n as f64;
            assert!(amp.total_steps as f64 <= AMPLIFIED_COST * nf * nf * nf.ln().powi(2));
        }
    }
}
