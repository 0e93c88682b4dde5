//! The artificial world: a rectangular lattice with one stationary agent per
//! cell, a von Neumann neighborhood, and a synchronous iteration protocol.
//!
//! Randomness: every agent owns a ChaCha8 stream seeded with the run seed and
//! selected by `stream = agent id`. Agent `id` sits at row `id / width`,
//! column `id % width`. Because each agent draws only from its own stream and
//! imitation reads a snapshot taken at the start of the iteration, the result
//! of an iteration does not depend on the order agents are processed in.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::agent::{evaluate_and_adopt, imitate, invent, Agent, InventionParams, Position};
use crate::model::{is_optimal_step, ChainedAction};

pub const DEFAULT_WIDTH: usize = 10;
pub const DEFAULT_HEIGHT: usize = 10;
pub const DEFAULT_INVENTION_PROBABILITY: f64 = 0.5;
pub const DEFAULT_ITERATIONS: usize = 100;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid configuration: `{field}` {reason}")]
    Config { field: &'static str, reason: String },
    #[error("position ({x}, {y}) is outside the {width}x{height} grid")]
    OutOfGrid {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
}

impl SimError {
    fn config(field: &'static str, reason: impl Into<String>) -> Self {
        SimError::Config {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub width: usize,
    pub height: usize,
    pub toroidal: bool,
    /// Per-agent, per-iteration probability of inventing rather than imitating.
    pub invention_probability: f64,
    pub invention_params: InventionParams,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            toroidal: true,
            invention_probability: DEFAULT_INVENTION_PROBABILITY,
            invention_params: InventionParams::default(),
            iterations: DEFAULT_ITERATIONS,
            seed: DEFAULT_SEED,
        }
    }
}

fn check_probability(field: &'static str, value: f64) -> Result<(), SimError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SimError::config(field, format!("must be within [0, 1], got {value}")))
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.width == 0 {
            return Err(SimError::config("width", "must be at least 1"));
        }
        if self.height == 0 {
            return Err(SimError::config("height", "must be at least 1"));
        }
        if self.width.checked_mul(self.height).is_none() {
            return Err(SimError::config("width", "width * height overflows"));
        }
        check_probability("invention_probability", self.invention_probability)?;
        let params = &self.invention_params;
        check_probability("rate_of_change", params.rate_of_change)?;
        if params.max_chain_len == 0 {
            return Err(SimError::config("max_chain_len", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&params.p_ext_max) {
            return Err(SimError::config(
                "p_ext_max",
                format!("must be within [0, 1), got {}", params.p_ext_max),
            ));
        }
        Ok(())
    }

    pub fn agent_count(&self) -> usize {
        self.width * self.height
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        WorldConfig {
            seed,
            ..self.clone()
        }
    }
}

/// Society-level measurements at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub iteration: usize,
    pub mean_fitness: f64,
    /// Number of structurally distinct implemented actions.
    pub diversity: usize,
    pub mean_chain_length: f64,
    /// Fraction of agents whose first step is an optimal step.
    pub fraction_optimal_base: f64,
}

impl MetricsRecord {
    pub fn from_actions<'a>(iteration: usize, actions: impl IntoIterator<Item = &'a ChainedAction>) -> Self {
        let mut count = 0usize;
        let mut fitness_sum = 0.0;
        let mut length_sum = 0usize;
        let mut optimal = 0usize;
        let mut distinct = HashSet::new();
        for action in actions {
            count += 1;
            fitness_sum += action.fitness().map(|f| f.value()).unwrap_or(0.0);
            length_sum += action.len();
            optimal += usize::from(!action.is_empty() && is_optimal_step(&action.base()));
            distinct.insert(action);
        }
        let n = count.max(1) as f64;
        MetricsRecord {
            iteration,
            mean_fitness: fitness_sum / n,
            diversity: distinct.len(),
            mean_chain_length: length_sum as f64 / n,
            fraction_optimal_base: optimal as f64 / n,
        }
    }
}

pub struct World {
    config: WorldConfig,
    agents: Vec<Agent>,
    streams: Vec<ChaCha8Rng>,
    neighbor_ids: Vec<Vec<usize>>,
    iteration: usize,
}

/// Stream for agent `id` under run seed `seed`.
pub fn agent_stream(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

fn lattice_neighbors(width: usize, height: usize, toroidal: bool, pos: Position) -> Vec<Position> {
    let Position { x, y } = pos;
    let mut out = Vec::with_capacity(4);
    let candidates = if toroidal {
        [
            Some(Position::new((x + width - 1) % width, y)),
            Some(Position::new((x + 1) % width, y)),
            Some(Position::new(x, (y + height - 1) % height)),
            Some(Position::new(x, (y + 1) % height)),
        ]
    } else {
        [
            x.checked_sub(1).map(|nx| Position::new(nx, y)),
            (x + 1 < width).then(|| Position::new(x + 1, y)),
            y.checked_sub(1).map(|ny| Position::new(x, ny)),
            (y + 1 < height).then(|| Position::new(x, y + 1)),
        ]
    };
    // Grids narrower than 3 cells would otherwise list a cell twice or include itself.
    for p in candidates.into_iter().flatten() {
        if p != pos && !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

impl World {
    pub fn new(config: WorldConfig) -> Result<Self, SimError> {
        config.validate()?;
        let (w, h) = (config.width, config.height);
        let p_ext_max = config.invention_params.p_ext_max;
        let agents: Vec<Agent> = (0..w * h)
            .map(|id| Agent::new(id, Position::new(id % w, id / w), p_ext_max))
            .collect();
        let streams = (0..w * h).map(|id| agent_stream(config.seed, id)).collect();
        let neighbor_ids = agents
            .iter()
            .map(|a| {
                lattice_neighbors(w, h, config.toroidal, a.position)
                    .into_iter()
                    .map(|p| p.y * w + p.x)
                    .collect()
            })
            .collect();
        Ok(World {
            config,
            agents,
            streams,
            neighbor_ids,
            iteration: 0,
        })
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn agent_at(&self, pos: Position) -> Result<&Agent, SimError> {
        self.check_position(pos)?;
        Ok(&self.agents[pos.y * self.config.width + pos.x])
    }

    fn check_position(&self, pos: Position) -> Result<(), SimError> {
        if pos.x < self.config.width && pos.y < self.config.height {
            Ok(())
        } else {
            Err(SimError::OutOfGrid {
                x: pos.x,
                y: pos.y,
                width: self.config.width,
                height: self.config.height,
            })
        }
    }

    /// Von Neumann neighbors of `pos`, wrapped at borders on a torus.
    pub fn neighbors(&self, pos: Position) -> Result<Vec<Position>, SimError> {
        self.check_position(pos)?;
        Ok(lattice_neighbors(
            self.config.width,
            self.config.height,
            self.config.toroidal,
            pos,
        ))
    }

    /// The actions currently implemented, in agent id order.
    pub fn actions(&self) -> Vec<&ChainedAction> {
        self.agents.iter().map(|a| &a.current).collect()
    }

    pub fn metrics(&self) -> MetricsRecord {
        MetricsRecord::from_actions(self.iteration, self.agents.iter().map(|a| &a.current))
    }

    /// One synchronous iteration with agents processed in id order.
    pub fn step(&mut self) {
        let order: Vec<usize> = (0..self.agents.len()).collect();
        self.step_in_order(&order);
    }

    /// One synchronous iteration processing agents in the given order.
    /// Agents missing from `order` sit the iteration out.
    pub fn step_in_order(&mut self, order: &[usize]) {
        let snapshot: Vec<ChainedAction> = self.agents.iter().map(|a| a.current.clone()).collect();
        let params = &self.config.invention_params;
        let p_invent = self.config.invention_probability;
        for &id in order {
            let rng = &mut self.streams[id];
            let agent = &mut self.agents[id];
            let candidate = if rng.gen_bool(p_invent) {
                Some(invent(agent, params, rng))
            } else {
                let seen: Vec<&ChainedAction> =
                    self.neighbor_ids[id].iter().map(|&n| &snapshot[n]).collect();
                imitate(agent, &seen, rng)
            };
            if let Some(candidate) = candidate {
                evaluate_and_adopt(agent, candidate, params.learning_enabled);
            }
        }
        self.iteration += 1;
    }
}

pub fn init_world(config: WorldConfig) -> Result<World, SimError> {
    World::new(config)
}

pub fn step_world(world: &mut World) {
    world.step();
}

pub fn metrics_snapshot(world: &World) -> MetricsRecord {
    world.metrics()
}

/// Runs `config.iterations` iterations, calling `observe` on the initial
/// world and after every iteration.
pub fn run_with<F: FnMut(&World)>(config: &WorldConfig, mut observe: F) -> Result<Vec<MetricsRecord>, SimError> {
    let mut world = World::new(config.clone())?;
    let mut records = Vec::with_capacity(config.iterations + 1);
    observe(&world);
    records.push(world.metrics());
    for _ in 0..config.iterations {
        world.step();
        observe(&world);
        records.push(world.metrics());
    }
    Ok(records)
}

/// Metrics for iterations `0..=config.iterations`.
pub fn run(config: &WorldConfig) -> Result<Vec<MetricsRecord>, SimError> {
    run_with(config, |_| {})
}
