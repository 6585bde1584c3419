//! Packet routing by a quantum walk on the sub-cube spanned by the bits where
//! source and destination differ.
//!
//! The walk runs on a `d`-cube in local coordinates: local vertex `u` is the
//! network node `source ⊕ spread(u)`, where `spread` places bit `j` of `u` at
//! the `j`-th differing bit position. The destination is then the local far
//! corner.

use qwalk::hilbert::position_marginal;
use qwalk::measured::corner_trace_analytic;
use qwalk::{
    amplified_concurrent, calibrated, make_initial, parity_matched, Engine, LatticeSpec, PositionProjector,
    SpectralSeries64, StepOperator64, Vertex, WalkState64, MAX_DIRECT_N,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{parse_vertex, ConfigError, EngineChoice, RoutingConfig, RoutingMode};

#[derive(Clone, Debug, PartialEq)]
pub struct RoutingTask {
    source: Vertex,
    destination: Vertex,
    /// Network bit positions of the sub-cube, in increasing order.
    dims: Vec<usize>,
    /// Deleted edges in local coordinates: (local bit, local vertex).
    deleted: Vec<(usize, usize)>,
    /// Intercepting nodes in local coordinates.
    interceptors: Vec<usize>,
    pub mode: RoutingMode,
}

/// Result of one routing run.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutingOutcome {
    pub horizon: usize,
    /// Probability the packet is found at the destination.
    pub delivery: f64,
    /// Total stop mass collected by interceptors.
    pub intercepted: f64,
    /// Sends needed for 0.9 overall success in concurrent mode; `None` when
    /// the packet can never arrive.
    pub resends: Option<u64>,
}

impl RoutingTask {
    pub fn new(source: Vertex, destination: Vertex, mode: RoutingMode) -> Result<Self, ConfigError> {
        if source.dim() != destination.dim() {
            return Err(ConfigError::Routing("source and destination lengths differ".into()));
        }
        let diff = source.bits() ^ destination.bits();
        if diff == 0 {
            return Err(ConfigError::Routing("source equals destination (d = 0)".into()));
        }
        let dims = (0..source.dim()).filter(|b| diff >> b & 1 == 1).collect();
        Ok(Self {
            source,
            destination,
            dims,
            deleted: Vec::new(),
            interceptors: Vec::new(),
            mode,
        })
    }

    /// Builds the task for an `n`-bit network from a config section.
    pub fn from_config(n: usize, cfg: &RoutingConfig) -> Result<Self, ConfigError> {
        let source = match &cfg.source {
            Some(s) => parse_vertex(n, s)?,
            None => Vertex::zero(n).map_err(|_| ConfigError::ZeroN)?,
        };
        let destination = match &cfg.destination {
            Some(s) => parse_vertex(n, s)?,
            None => source.complement(),
        };
        let mut task = Self::new(source, destination, cfg.mode)?;
        for e in &cfg.deleted_edges {
            task.delete_edge(&parse_vertex(n, &e.vertex)?, e.bit)?;
        }
        for v in &cfg.interceptors {
            task.add_interceptor(&parse_vertex(n, v)?)?;
        }
        Ok(task)
    }

    pub fn d(&self) -> usize {
        self.dims.len()
    }

    /// `dπ/2` matched to the parity of `d`.
    pub fn horizon(&self) -> usize {
        parity_matched(std::f64::consts::PI * self.d() as f64 / 2.0, self.d())
    }

    /// The same endpoints and mode with no failures.
    pub fn clean(&self) -> Self {
        Self {
            deleted: Vec::new(),
            interceptors: Vec::new(),
            ..self.clone()
        }
    }

    pub fn is_clean(&self) -> bool {
        self.deleted.is_empty() && self.interceptors.is_empty()
    }

    fn local(&self, v: &Vertex) -> Option<usize> {
        let rel = v.bits() ^ self.source.bits();
        let mask: u64 = self.dims.iter().map(|b| 1u64 << b).sum();
        if rel & !mask != 0 {
            return None;
        }
        Some(
            self.dims
                .iter()
                .enumerate()
                .map(|(j, b)| ((rel >> b & 1) as usize) << j)
                .sum(),
        )
    }

    pub fn delete_edge(&mut self, v: &Vertex, bit: usize) -> Result<(), ConfigError> {
        let j = self
            .dims
            .iter()
            .position(|&b| b == bit)
            .ok_or_else(|| ConfigError::Routing(format!("edge direction {bit} is outside the sub-cube")))?;
        let u = self
            .local(v)
            .ok_or_else(|| ConfigError::Routing(format!("edge vertex {v} is outside the sub-cube")))?;
        let lower = u & !(1 << j);
        if !self.deleted.contains(&(j, lower)) {
            self.deleted.push((j, lower));
        }
        Ok(())
    }

    pub fn add_interceptor(&mut self, v: &Vertex) -> Result<(), ConfigError> {
        if *v == self.source || *v == self.destination {
            return Err(ConfigError::Routing(format!("interceptor {v} is an endpoint")));
        }
        // Nodes off the sub-cube are never visited and intercept nothing.
        if let Some(u) = self.local(v) {
            if !self.interceptors.contains(&u) {
                self.interceptors.push(u);
            }
        }
        Ok(())
    }

    /// Deletes `count` distinct sub-cube edges chosen uniformly at random.
    pub fn delete_random_edges<R: Rng + ?Sized>(&mut self, count: usize, rng: &mut R) {
        let d = self.d();
        let total = d << (d - 1);
        let target = (self.deleted.len() + count).min(total);
        while self.deleted.len() < target {
            let j = rng.random_range(0..d);
            let u = rng.random_range(0..1usize << d) & !(1 << j);
            if !self.deleted.contains(&(j, u)) {
                self.deleted.push((j, u));
            }
        }
    }

    pub fn check_engine(&self, engine: Option<EngineChoice>) -> Result<(), ConfigError> {
        match engine {
            Some(EngineChoice::Analytic) if !self.is_clean() => Err(ConfigError::AnalyticUnsupported(
                "routing with deleted edges or interceptors",
            )),
            Some(EngineChoice::Direct) if self.d() > MAX_DIRECT_N => Err(ConfigError::DirectTooLarge {
                n: self.d(),
                max: MAX_DIRECT_N,
            }),
            None if !self.is_clean() && self.d() > MAX_DIRECT_N => Err(ConfigError::DirectTooLarge {
                n: self.d(),
                max: MAX_DIRECT_N,
            }),
            _ => Ok(()),
        }
    }

    /// Engine used when none is requested: analytic for clean runs.
    pub fn default_engine(&self) -> Engine {
        if self.is_clean() {
            Engine::Analytic
        } else {
            Engine::Direct
        }
    }

    pub fn run(&self, engine: Engine) -> Result<RoutingOutcome, ConfigError> {
        let horizon = self.horizon();
        let (delivery, intercepted) = match engine {
            Engine::Analytic => {
                self.check_engine(Some(EngineChoice::Analytic))?;
                let series = SpectralSeries64::new(self.d()).map_err(|e| ConfigError::Routing(e.to_string()))?;
                let p = match self.mode {
                    RoutingMode::OneShot => series.alpha(horizon as u64).powi(2),
                    RoutingMode::Concurrent => corner_trace_analytic(&series, horizon).total(),
                };
                (p, 0.0)
            }
            Engine::Direct => {
                self.check_engine(Some(EngineChoice::Direct))?;
                self.simulate(horizon)
            }
        };
        let resends = match self.mode {
            RoutingMode::OneShot => Some(1),
            RoutingMode::Concurrent => amplified_concurrent(horizon, delivery, calibrated::AMPLIFIED_SUCCESS)
                .ok()
                .map(|a| a.repetitions),
        };
        Ok(RoutingOutcome {
            horizon,
            delivery,
            intercepted,
            resends,
        })
    }

    fn simulate(&self, horizon: usize) -> (f64, f64) {
        let d = self.d();
        let spec = LatticeSpec::periodic(d).expect("d checked against the direct cap");
        let mut op = StepOperator64::grover(spec);
        for &(j, u) in &self.deleted {
            op.delete_edge(j, u).expect("local edge in range");
        }
        let start = Vertex::zero(d).expect("d >= 1");
        let target = Vertex::ones(d).expect("d >= 1");
        let dest = PositionProjector::new(target);
        let taps: Vec<PositionProjector> = self
            .interceptors
            .iter()
            .map(|&u| PositionProjector::new(Vertex::new(d, u as u64).expect("local vertex")))
            .collect();
        let mut state: WalkState64 = make_initial(spec, &start).expect("matching length");
        let (mut delivered, mut intercepted) = (0.0, 0.0);
        for t in 0..=horizon {
            for tap in &taps {
                intercepted += tap.stop_probability(&state);
                tap.continue_part_in_place(&mut state);
            }
            if self.mode == RoutingMode::Concurrent {
                delivered += dest.stop_probability(&state);
                dest.continue_part_in_place(&mut state);
            }
            if t < horizon {
                op.step_in_place(&mut state).expect("matching spec");
            }
        }
        if self.mode == RoutingMode::OneShot {
            delivered = position_marginal(&state)[target.index()];
        }
        (delivered, intercepted)
    }
}

/// Interception probability of a single interceptor, per Hamming-weight class
/// of its local position.
#[derive(Clone, Debug, PartialEq)]
pub struct InterceptClass {
    pub weight: usize,
    pub multiplicity: u64,
    pub probability: f64,
}

/// One interceptor placed in each weight class `1..d` of the sub-cube. By the
/// walk's bit-permutation symmetry every node of a class intercepts equally,
/// so the class representatives determine the average over all positions.
pub fn interceptor_scan(task: &RoutingTask) -> Result<Vec<InterceptClass>, ConfigError> {
    let d = task.d();
    let mut multiplicity = 1u64;
    let mut out = Vec::with_capacity(d.saturating_sub(1));
    for w in 1..d {
        multiplicity = multiplicity * (d - w + 1) as u64 / w as u64;
        let mut t = task.clone();
        t.interceptors.clear();
        t.interceptors.push((1usize << w) - 1);
        let probability = t.run(Engine::Direct)?.intercepted;
        out.push(InterceptClass {
            weight: w,
            multiplicity,
            probability,
        });
    }
    Ok(out)
}

/// Mean interception probability over all sub-cube nodes other than the endpoints.
pub fn mean_interception(classes: &[InterceptClass]) -> f64 {
    let total: u64 = classes.iter().map(|c| c.multiplicity).sum();
    classes
        .iter()
        .map(|c| c.multiplicity as f64 * c.probability)
        .sum::<f64>()
        / total as f64
}

/// Random-deletion instance `i`: stream `i` of the generator seeded with `seed`.
pub fn with_random_deletions(task: &RoutingTask, count: usize, seed: u64, instance: u64) -> RoutingTask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance);
    let mut t = task.clone();
    t.delete_random_edges(count, &mut rng);
    t
}
