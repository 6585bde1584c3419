//! Experiment runners: each turns a validated config into a [`Table`].
//!
//! Grid points run on the rayon pool; rows are collected in config order so
//! output is deterministic apart from `runtime_ms`.

use std::f64::consts::PI;
use std::time::Instant;

use qwalk::continuous::continuous_measured_direct;
use qwalk::horizon::parity_window;
use qwalk::measured::{corner_one_shot_analytic, corner_trace_analytic};
use qwalk::{
    amplified_concurrent, calibrated, concurrent_hitting, continuous_alpha, continuous_classical_hitting,
    continuous_measured_trace, directional_walk_hitting, exact_corner_hitting, monte_carlo_hitting,
    one_shot_probability, Engine, MeasuredTrace64, SpectralSeries64, Vertex, MAX_DIRECT_N,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::routing::{interceptor_scan, mean_interception, with_random_deletions, RoutingTask};
use crate::table::{Cell, ResultRow, Table};
use crate::RunError;

fn corners(n: usize) -> Result<(Vertex, Vertex), RunError> {
    let x = Vertex::zero(n)?;
    Ok((x, x.complement()))
}

/// Corner-to-corner probabilities by one engine. The analytic side keeps its
/// spectral series so repeated horizons reuse it, and needs no vertex
/// encoding (so `n` may exceed 63).
enum CornerProbe {
    Analytic(SpectralSeries64),
    Direct(usize, Vertex, Vertex),
}

impl CornerProbe {
    fn new(n: usize, engine: Engine) -> Result<Self, RunError> {
        Ok(match engine {
            Engine::Analytic => Self::Analytic(SpectralSeries64::new(n)?),
            Engine::Direct => {
                let (x, y) = corners(n)?;
                Self::Direct(n, x, y)
            }
        })
    }

    fn one_shot(&self, t: usize) -> Result<f64, RunError> {
        Ok(match self {
            Self::Analytic(s) => corner_one_shot_analytic(s, t),
            Self::Direct(n, x, y) => one_shot_probability::<f64>(*n, x, y, t, Engine::Direct)?.probability,
        })
    }

    fn concurrent(&self, t: usize) -> Result<f64, RunError> {
        Ok(match self {
            Self::Analytic(s) => corner_trace_analytic(s, t).total(),
            Self::Direct(n, x, y) => concurrent_hitting::<f64>(*n, x, y, t, Engine::Direct)?.probability,
        })
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn ln(n: usize) -> f64 {
    (n as f64).ln()
}

/// Runs `f` for every `n` in parallel and concatenates the rows in order.
fn per_n<F>(cfg: &ExperimentConfig, f: F) -> Result<Vec<ResultRow>, RunError>
where
    F: Fn(usize) -> Result<Vec<ResultRow>, RunError> + Sync,
{
    let parts: Vec<Vec<ResultRow>> = cfg
        .n_range
        .values()
        .par_iter()
        .map(|&n| f(n))
        .collect::<Result<_, _>>()?;
    Ok(parts.into_iter().flatten().collect())
}

struct RowBuilder<'a> {
    cfg: &'a ExperimentConfig,
    n: usize,
    start: Instant,
}

impl<'a> RowBuilder<'a> {
    fn new(cfg: &'a ExperimentConfig, n: usize) -> Self {
        Self {
            cfg,
            n,
            start: Instant::now(),
        }
    }

    fn row(&mut self, horizon: Option<usize>, engine: &str, p: Option<f64>, extra: Vec<Cell>) -> ResultRow {
        let r = ResultRow {
            experiment: self.cfg.kind.name().to_string(),
            n: self.n,
            horizon,
            engine: engine.to_string(),
            probability: p,
            runtime_ms: elapsed_ms(self.start),
            seed: self.cfg.seed,
            extra,
        };
        self.start = Instant::now();
        r
    }
}

pub const ONESHOT_COLUMNS: [&str; 5] = ["window", "offset", "deficit", "log3n_over_n", "scaled_deficit"];

/// One-shot corner-to-corner probabilities at `T`, plus the `√n/ln n` window
/// (for `oneshot-window`) and the `n^β` window when an exponent is set.
pub fn run_oneshot(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let engine = cfg.engine_or_analytic();
    let with_sqrt = cfg.kind == ExperimentKind::OneshotWindow;
    let rows = per_n(cfg, |n| {
        let probe = CornerProbe::new(n, engine)?;
        let nf = n as f64;
        let centre = PI * nf / 2.0;
        let mut b = RowBuilder::new(cfg, n);
        let mut rows = Vec::new();
        let mut emit = |window: &str, t: usize, scale: Option<f64>| -> Result<(), RunError> {
            let p = probe.one_shot(t)?;
            let deficit = 1.0 - p;
            rows.push(b.row(
                Some(t),
                engine.name(),
                Some(p),
                vec![
                    window.into(),
                    (t as f64 - centre).into(),
                    deficit.into(),
                    (ln(n).powi(3) / nf).into(),
                    scale.map(|s| deficit * s).into(),
                ],
            ));
            Ok(())
        };
        let centre_scale = (n > 1).then(|| nf / ln(n).powi(3));
        emit("centre", cfg.horizon.discrete(n), centre_scale)?;
        if with_sqrt {
            let scale = (n >= 3).then(|| ln(n) / ln(n).ln());
            for t in parity_window(centre, nf.sqrt() / ln(n).max(1.0), n) {
                emit("sqrt", t, scale)?;
            }
        }
        if let Some(beta) = cfg.window_exponent {
            let scale = (n > 1).then(|| nf.powf(1.0 - 2.0 * beta) / ln(n));
            for t in parity_window(centre, nf.powf(beta), n) {
                emit("power", t, scale)?;
            }
        }
        Ok(rows)
    })?;
    let mut table = Table::new(cfg.kind.name(), &ONESHOT_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub const CONCURRENT_COLUMNS: [&str; 5] = [
    "p_n_log2n",
    "p_sqrt_n",
    "repetitions",
    "amplified_steps",
    "expected_cost",
];

/// Concurrent (measured-walk) hitting probabilities. Without an explicit
/// engine both engines run wherever the direct one is allowed.
pub fn run_concurrent(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let rows = per_n(cfg, |n| {
        let t = cfg.horizon.discrete(n);
        let engines: Vec<Engine> = match cfg.engine {
            Some(e) => vec![e.engine()],
            None if n <= MAX_DIRECT_N => vec![Engine::Analytic, Engine::Direct],
            None => vec![Engine::Analytic],
        };
        let mut b = RowBuilder::new(cfg, n);
        let mut rows = Vec::new();
        for engine in engines {
            let p = CornerProbe::new(n, engine)?.concurrent(t)?;
            let nf = n as f64;
            let amp = amplified_concurrent(t, p, calibrated::AMPLIFIED_SUCCESS).ok();
            rows.push(b.row(
                Some(t),
                engine.name(),
                Some(p),
                vec![
                    (p * nf * ln(n).powi(2)).into(),
                    (p * nf.sqrt()).into(),
                    amp.as_ref().map(|a| a.repetitions).into(),
                    amp.as_ref().map(|a| a.total_steps).into(),
                    (p > 0.0).then(|| t as f64 / p).into(),
                ],
            ));
        }
        Ok(rows)
    })?;
    let mut table = Table::new(cfg.kind.name(), &CONCURRENT_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub const CONTINUOUS_COLUMNS: [&str; 2] = ["one_shot", "p_sqrt_n"];

/// Continuous-time walk: one-shot probability at `πn/2` and the concurrent
/// probability with measurements at integer times up to `T`.
pub fn run_continuous(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let engine = cfg.engine_or_analytic();
    let rows = per_n(cfg, |n| {
        let t = cfg.horizon.continuous(n);
        let mut b = RowBuilder::new(cfg, n);
        let one_shot = continuous_alpha::<f64>(n, PI * n as f64 / 2.0).norm_sqr();
        let trace: MeasuredTrace64 = match engine {
            Engine::Analytic => continuous_measured_trace(n, t),
            Engine::Direct => {
                let (x, y) = corners(n)?;
                continuous_measured_direct(&x, &y, t)?
            }
        };
        let p = trace.total();
        Ok(vec![b.row(
            Some(t),
            engine.name(),
            Some(p),
            vec![one_shot.into(), (p * (n as f64).sqrt()).into()],
        )])
    })?;
    let mut table = Table::new(cfg.kind.name(), &CONTINUOUS_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub const CLASSICAL_COLUMNS: [&str; 10] = [
    "exact_hitting",
    "continuous_hitting",
    "mc_mean",
    "mc_stderr",
    "mc_truncated",
    "directional_mean",
    "directional_stderr",
    "quantum_expected_cost",
    "gap",
    "trials",
];

/// Classical baselines. `T` is the Monte Carlo step cap `16·2^n`;
/// `probability` is the fraction of simulated walks that hit within the cap.
pub fn run_classical(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let rows = per_n(cfg, |n| {
        let mut b = RowBuilder::new(cfg, n);
        let cap = 16u64 << n;
        let exact = exact_corner_hitting::<f64>(n)?;
        let cont = continuous_classical_hitting::<f64>(n)?;
        let mc = monte_carlo_hitting(n, cfg.trials, cfg.seed, cap)?;
        let dir = directional_walk_hitting(n, cfg.trials, cfg.seed, cap * 4)?;
        let t = qwalk::default_horizon(n);
        let pq = CornerProbe::new(n, Engine::Analytic)?.concurrent(t)?;
        let cost = (pq > 0.0).then(|| t as f64 / pq);
        Ok(vec![b.row(
            Some(cap as usize),
            "mc",
            Some(mc.completed as f64 / cfg.trials as f64),
            vec![
                exact.into(),
                cont.into(),
                mc.mean.into(),
                mc.stderr.into(),
                mc.truncated.into(),
                dir.mean.into(),
                dir.stderr.into(),
                cost.into(),
                cost.map(|c| exact / c).into(),
                cfg.trials.into(),
            ],
        )])
    })?;
    let mut table = Table::new(cfg.kind.name(), &CLASSICAL_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub const NEIGHBORHOOD_COLUMNS: [&str; 5] = ["mode", "distance", "time", "reference", "ratio"];

/// Starts at distance `d` from `x` and measures `x̄` (one-shot at `T` and
/// `T − d`), and measured walks from `x` to targets at distance `d` from `x̄`.
/// `reference` is the `d = 0` value divided by `n^d`.
pub fn run_neighborhood(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let rows = per_n(cfg, |n| {
        let (x, far) = corners(n)?;
        let t = cfg.horizon.discrete(n);
        let mut b = RowBuilder::new(cfg, n);
        let mut rows = Vec::new();
        let base_one = one_shot_probability::<f64>(n, &x, &far, t, Engine::Direct)?.probability;
        let base_conc = concurrent_hitting::<f64>(n, &x, &far, t, Engine::Direct)?.probability;
        for d in 0..=cfg.depth.min(n) {
            let near_x = Vertex::new(n, (1u64 << d) - 1)?;
            let scale = (n as f64).powi(d as i32);
            let mut times = vec![("T", t)];
            if d > 0 && d <= t {
                times.push(("T-d", t - d));
            }
            for (label, time) in times {
                let p = one_shot_probability::<f64>(n, &near_x, &far, time, Engine::Direct)?.probability;
                let reference = base_one / scale;
                rows.push(b.row(
                    Some(time),
                    Engine::Direct.name(),
                    Some(p),
                    vec![
                        "one-shot".into(),
                        d.into(),
                        label.into(),
                        reference.into(),
                        (p / reference).into(),
                    ],
                ));
            }
            let near_far = near_x.complement();
            let p = concurrent_hitting::<f64>(n, &x, &near_far, t, Engine::Direct)?.probability;
            let reference = base_conc / scale;
            rows.push(b.row(
                Some(t),
                Engine::Direct.name(),
                Some(p),
                vec![
                    "concurrent".into(),
                    d.into(),
                    "T".into(),
                    reference.into(),
                    (p / reference).into(),
                ],
            ));
        }
        Ok(rows)
    })?;
    let mut table = Table::new(cfg.kind.name(), &NEIGHBORHOOD_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub const ROUTING_COLUMNS: [&str; 9] = [
    "d",
    "mode",
    "failure",
    "instance",
    "weight",
    "multiplicity",
    "intercepted",
    "resends",
    "delta",
];

/// Routing runs: the clean walk, the configured failure model, random edge
/// deletions over several instances, and an interceptor scan.
pub fn run_routing(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let rc = &cfg.routing;
    let rows = per_n(cfg, |n| {
        let task = RoutingTask::from_config(n, rc)?;
        let clean = task.clean();
        let mode = task.mode.name();
        let d = task.d();
        let mut b = RowBuilder::new(cfg, n);
        let mut rows = Vec::new();
        let engine_for = |t: &RoutingTask| cfg.engine.map_or(t.default_engine(), |e| e.engine());
        let base_engine = engine_for(&clean);
        let base = clean.run(base_engine)?;
        rows.push(b.row(
            Some(base.horizon),
            base_engine.name(),
            Some(base.delivery),
            vec![
                d.into(),
                mode.into(),
                "none".into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                base.intercepted.into(),
                base.resends.into(),
                0.0.into(),
            ],
        ));
        if !task.is_clean() {
            let e = engine_for(&task);
            let out = task.run(e)?;
            rows.push(b.row(
                Some(out.horizon),
                e.name(),
                Some(out.delivery),
                vec![
                    d.into(),
                    mode.into(),
                    "configured".into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    out.intercepted.into(),
                    out.resends.into(),
                    (out.delivery - base.delivery).into(),
                ],
            ));
        }
        if rc.random_deleted_edges > 0 {
            let outcomes: Vec<_> = (0..rc.instances as u64)
                .into_par_iter()
                .map(|i| {
                    let t = with_random_deletions(&task, rc.random_deleted_edges, cfg.seed, i);
                    t.run(Engine::Direct).map(|o| (i, o))
                })
                .collect::<Result<_, _>>()?;
            let mut sum = 0.0;
            for (i, out) in &outcomes {
                sum += out.delivery;
                rows.push(b.row(
                    Some(out.horizon),
                    Engine::Direct.name(),
                    Some(out.delivery),
                    vec![
                        d.into(),
                        mode.into(),
                        "random-edges".into(),
                        (*i).into(),
                        Cell::Empty,
                        Cell::Empty,
                        out.intercepted.into(),
                        out.resends.into(),
                        (out.delivery - base.delivery).into(),
                    ],
                ));
            }
            let mean = sum / outcomes.len().max(1) as f64;
            rows.push(b.row(
                Some(base.horizon),
                Engine::Direct.name(),
                Some(mean),
                vec![
                    d.into(),
                    mode.into(),
                    "random-edges-mean".into(),
                    Cell::Empty,
                    Cell::Empty,
                    (outcomes.len() as u64).into(),
                    Cell::Empty,
                    Cell::Empty,
                    (mean - base.delivery).into(),
                ],
            ));
        }
        if rc.interceptor_scan {
            let classes = interceptor_scan(&clean)?;
            for c in &classes {
                rows.push(b.row(
                    Some(base.horizon),
                    Engine::Direct.name(),
                    None,
                    vec![
                        d.into(),
                        mode.into(),
                        "intercept-class".into(),
                        Cell::Empty,
                        c.weight.into(),
                        c.multiplicity.into(),
                        c.probability.into(),
                        Cell::Empty,
                        Cell::Empty,
                    ],
                ));
            }
            let total: u64 = classes.iter().map(|c| c.multiplicity).sum();
            rows.push(b.row(
                Some(base.horizon),
                Engine::Direct.name(),
                None,
                vec![
                    d.into(),
                    mode.into(),
                    "intercept-mean".into(),
                    Cell::Empty,
                    Cell::Empty,
                    total.into(),
                    mean_interception(&classes).into(),
                    Cell::Empty,
                    Cell::Empty,
                ],
            ));
        }
        Ok(rows)
    })?;
    let mut table = Table::new(cfg.kind.name(), &ROUTING_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}
