//! Self-check: engines against each other and against independent oracles.
//!
//! With `tamper_coin` set, one column of the Grover coin is negated before the
//! direct engine runs. The coin stays unitary, so the unitarity and norm
//! checks keep passing while the engine comparisons must fail.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::ToPrimitive;
use qwalk::coined::unitarity_residual;
use qwalk::continuous::continuous_evolve;
use qwalk::exact::{alpha_exact, corner_hitting_exact, gamma_exact};
use qwalk::measured::{corner_trace_analytic, measured_walk};
use qwalk::{
    continuous_alpha, default_horizon, exact_corner_hitting, make_initial, LatticeSpec, PositionProjector,
    PositionState64, SpectralSeries64, StepOperator64, Vertex, WalkState64, MAX_DIRECT_N,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::table::{ResultRow, Table};
use crate::RunError;

/// Largest `n` in the small-cube sweeps.
const SWEEP_N: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// The cube dimension, or the largest one for sweeps over `1..=n` or `2..=n`.
    pub n: usize,
    pub tolerance: f64,
    /// Worst deviation found; the check passes when it is within `tolerance`.
    pub observed: f64,
    pub runtime_ms: u64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.observed <= self.tolerance
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn to_table(&self, seed: u64) -> Table {
        let mut t = Table::new("verify", &COLUMNS);
        for c in &self.checks {
            t.push(ResultRow {
                experiment: "verify".into(),
                n: c.n,
                horizon: None,
                engine: String::new(),
                probability: None,
                runtime_ms: c.runtime_ms,
                seed,
                extra: vec![
                    c.name.into(),
                    c.tolerance.into(),
                    c.observed.into(),
                    if c.passed() { "pass" } else { "fail" }.into(),
                ],
            });
        }
        t
    }
}

pub const COLUMNS: [&str; 4] = ["check", "tolerance", "observed", "status"];

fn max_dev(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter()
        .fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

/// The step operator under test.
fn operator(n: usize, tamper: bool) -> Result<StepOperator64, RunError> {
    let spec = LatticeSpec::periodic(n)?;
    let grover = StepOperator64::grover(spec);
    if !tamper {
        return Ok(grover);
    }
    Ok(StepOperator64::new(spec, grover.coin().with_column_sign_flip(0))?)
}

struct Runner {
    checks: Vec<Check>,
}

impl Runner {
    fn check(
        &mut self,
        name: &'static str,
        n: usize,
        tolerance: f64,
        f: impl FnOnce() -> Result<f64, RunError>,
    ) -> Result<(), RunError> {
        let start = Instant::now();
        let observed = f()?;
        self.checks.push(Check {
            name,
            n,
            tolerance,
            observed,
            runtime_ms: start.elapsed().as_millis() as u64,
        });
        Ok(())
    }
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerifyReport, RunError> {
    let tamper = cfg.tamper_coin;
    let mut r = Runner { checks: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    for &n in cfg.n_range.values() {
        let op = operator(n, tamper)?;
        let spec = op.spec();
        r.check("coin-unitarity", n, 1e-12, || {
            Ok(unitarity_residual(&op.coin().matrix(), spec.coin_dim()))
        })?;
        let s = WalkState64::random(spec, &mut rng);
        r.check("norm-preservation", n, 1e-10, || {
            let mut st = s.clone();
            let mut worst: f64 = 0.0;
            for _ in 0..6 * n {
                op.step_in_place(&mut st)?;
                worst = worst.max((st.norm_sqr() - 1.0).abs());
            }
            Ok(worst)
        })?;
        r.check("projector-algebra", n, 1e-13, || {
            let target = Vertex::new(n, rng.random_range(0..1u64 << n))?;
            let mut worst: f64 = 0.0;
            for proj in [PositionProjector::new(target), PositionProjector::symmetric(target)] {
                let stop = proj.stop_part(&s);
                let mut cont = s.clone();
                proj.continue_part_in_place(&mut cont);
                worst = worst.max((stop.norm_sqr() + cont.norm_sqr() - 1.0).abs());
                worst = worst.max(proj.stop_part(&stop).max_abs_diff(&stop));
                worst = worst.max(proj.stop_part(&cont).norm_sqr().sqrt());
                worst = worst.max((proj.stop_probability(&s) - stop.norm_sqr()).abs());
            }
            Ok(worst)
        })?;
        r.check("measured-direct-vs-analytic", n, 1e-10, || {
            let t = default_horizon(n);
            let x = Vertex::zero(n)?;
            let direct = measured_walk(
                &op,
                &make_initial(spec, &x)?,
                &PositionProjector::new(x.complement()),
                t,
            )?;
            let analytic = corner_trace_analytic(&SpectralSeries64::new(n)?, t);
            let per_step = direct.max_beta_diff(&analytic);
            Ok(per_step.max((direct.total() - analytic.total()).abs()))
        })?;
    }

    r.check("corner-amplitudes-direct-vs-analytic", SWEEP_N, 1e-10, || {
        let mut worst: f64 = 0.0;
        for n in 2..=SWEEP_N {
            let op = operator(n, tamper)?;
            let x = Vertex::zero(n)?;
            let far = x.complement();
            let series = SpectralSeries64::new(n)?;
            let mut st: WalkState64 = make_initial(op.spec(), &x)?;
            let mut back: WalkState64 = make_initial(op.spec(), &far)?;
            for t in 0..=6 * n {
                worst = worst.max((st.symmetric_overlap(&far) - Complex::new(series.alpha(t as u64), 0.0)).norm());
                worst = worst.max((back.symmetric_overlap(&far) - Complex::new(series.gamma(t as u64), 0.0)).norm());
                op.step_in_place(&mut st)?;
                op.step_in_place(&mut back)?;
            }
        }
        Ok(worst)
    })?;

    r.check("corner-amplitudes-exact-vs-float", SWEEP_N, 1e-12, || {
        let mut worst: f64 = 0.0;
        for n in 2..=SWEEP_N {
            let series = SpectralSeries64::new(n)?;
            let t = 6 * n;
            for (k, (a, g)) in alpha_exact(n, t).iter().zip(gamma_exact(n, t)).enumerate() {
                let a = a.to_f64().unwrap_or(f64::NAN);
                let g = g.to_f64().unwrap_or(f64::NAN);
                worst = worst.max((a - series.alpha(k as u64)).abs());
                worst = worst.max((g - series.gamma(k as u64)).abs());
            }
        }
        Ok(worst)
    })?;

    r.check("continuous-vs-matrix-exponential", 6, 1e-10, || {
        let mut worst: f64 = 0.0;
        for n in 1..=6usize {
            let dim = 1usize << n;
            let t = rng.random_range(0.0..std::f64::consts::PI * n as f64);
            let mut gen = DMatrix::<Complex<f64>>::zeros(dim, dim);
            for x in 0..dim {
                for j in 0..n {
                    gen[(x, x ^ (1 << j))] = Complex::new(0.0, t / n as f64);
                }
            }
            let u = gen.exp();
            let amps: Vec<Complex<f64>> = (0..dim)
                .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let ours = continuous_evolve(&PositionState64::from_amplitudes(n, amps.clone())?, t);
            let theirs = &u * DVector::from_vec(amps);
            worst = worst.max(max_dev((0..dim).map(|x| (ours.amplitudes()[x] - theirs[x]).norm())));
            worst = worst.max((continuous_alpha::<f64>(n, t) - u[(dim - 1, 0)]).norm());
        }
        Ok(worst)
    })?;

    r.check("classical-hitting-exact-vs-float", 20, 1e-12, || {
        let mut worst: f64 = 0.0;
        for n in 1..=20 {
            let exact = corner_hitting_exact(n).to_f64().unwrap_or(f64::NAN);
            let float = exact_corner_hitting::<f64>(n)?;
            worst = worst.max(((float - exact) / exact).abs());
        }
        Ok(worst)
    })?;

    // Observed is the largest 2^(n-1)/h(n); the bound holds when it is ≤ 1.
    r.check("classical-hitting-lower-bound", 60, 1.0, || {
        let mut worst: f64 = 0.0;
        for n in 1..=60 {
            let h = exact_corner_hitting::<f64>(n)?;
            worst = worst.max(2f64.powi(n as i32 - 1) / h);
        }
        Ok(worst)
    })?;

    Ok(VerifyReport { checks: r.checks })
}

/// Largest `n` accepted by `verify` (the direct engine runs at every `n`).
pub const MAX_VERIFY_N: usize = MAX_DIRECT_N;
