//! Agents and their three cognitive operators: invention, imitation and
//! trend learning.
//!
//! Learned trends are kept as probabilities that bias invention:
//!
//! * `p_im[part]`: when a moving part is selected for change, the chance it
//!   reverses direction instead of stopping.
//! * `p_sym`: when a stationary arm or leg starts moving while its partner
//!   already moves, the chance it moves opposite to the partner.
//! * `p_ext`: the chance of appending one more alternation step to a chain.
//!
//! Each trend moves by a fixed increment whenever an adopted action raises
//! or lowers the matching hidden activation.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::model::{
    fitness_chain, hidden_activations, BodyPart, ChainedAction, Direction, ModelError, Step,
    NUM_PARTS,
};

/// Size of one trend-learning adjustment.
pub const TREND_INCREMENT: f64 = 0.1;

pub const DEFAULT_RATE_OF_CHANGE: f64 = 1.0 / 6.0;
pub const DEFAULT_MAX_CHAIN_LEN: usize = 100;
pub const DEFAULT_P_EXT_MAX: f64 = 0.6;
pub const INITIAL_TREND: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("update_trends requires a strictly fitter new action ({new} <= {old})")]
    NotFitter { old: f64, new: f64 },
}

/// Grid coordinate of an agent: `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub x: usize,
    pub y: usize,
}

impl Position {
    pub fn new(x: usize, y: usize) -> Self {
        Position { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InventionParams {
    /// Per-part probability that invention changes that part.
    pub rate_of_change: f64,
    pub chaining_enabled: bool,
    pub learning_enabled: bool,
    pub max_chain_len: usize,
    /// Upper clamp for the learned chain-extension probability; must be < 1.
    pub p_ext_max: f64,
}

impl Default for InventionParams {
    fn default() -> Self {
        InventionParams {
            rate_of_change: DEFAULT_RATE_OF_CHANGE,
            chaining_enabled: true,
            learning_enabled: true,
            max_chain_len: DEFAULT_MAX_CHAIN_LEN,
            p_ext_max: DEFAULT_P_EXT_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendState {
    pub p_im: [f64; NUM_PARTS],
    pub p_sym: f64,
    pub p_ext: f64,
    pub p_ext_max: f64,
}

impl TrendState {
    pub fn new(p_ext_max: f64) -> Self {
        TrendState {
            p_im: [INITIAL_TREND; NUM_PARTS],
            p_sym: INITIAL_TREND,
            p_ext: INITIAL_TREND.min(p_ext_max),
            p_ext_max,
        }
    }

    pub fn p_im(&self, part: BodyPart) -> f64 {
        self.p_im[part.index()]
    }

    /// Implicit probability that a changed moving part stops.
    pub fn p_dm(&self, part: BodyPart) -> f64 {
        1.0 - self.p_im(part)
    }

    pub fn in_bounds(&self) -> bool {
        self.p_im.iter().all(|p| (0.0..=1.0).contains(p))
            && (0.0..=1.0).contains(&self.p_sym)
            && (0.0..=self.p_ext_max).contains(&self.p_ext)
    }
}

impl Default for TrendState {
    fn default() -> Self {
        TrendState::new(DEFAULT_P_EXT_MAX)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: usize,
    pub position: Position,
    pub current: ChainedAction,
    pub trends: TrendState,
}

impl Agent {
    /// A stationary agent with initial trends.
    pub fn new(id: usize, position: Position, p_ext_max: f64) -> Self {
        Agent {
            id,
            position,
            current: ChainedAction::stationary(),
            trends: TrendState::new(p_ext_max),
        }
    }

    pub fn fitness(&self) -> f64 {
        fitness_chain(&self.current)
            .expect("agent always holds a valid action")
            .value()
    }
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    if rng.gen_bool(0.5) {
        Direction::Up
    } else {
        Direction::Down
    }
}

/// Mutates the first step of `base` part by part.
fn mutate_step<R: Rng + ?Sized>(
    base: &Step,
    trends: &TrendState,
    rate: f64,
    rng: &mut R,
) -> Step {
    let mut out = *base;
    for part in BodyPart::ALL {
        if !rng.gen_bool(rate) {
            continue;
        }
        let next = match base.get(part) {
            Direction::Stationary => {
                let partner = part.partner().map(|p| base.get(p));
                match partner.and_then(Direction::reversed) {
                    Some(opposed) if rng.gen_bool(trends.p_sym) => opposed,
                    _ => random_direction(rng),
                }
            }
            moving => {
                if rng.gen_bool(trends.p_dm(part)) {
                    Direction::Stationary
                } else {
                    moving.reversed().unwrap()
                }
            }
        };
        out.set(part, next);
    }
    out
}

/// Produces a candidate action by mutating the agent's current first step
/// and, when chaining is on, growing an arm-alternation chain on it.
pub fn invent<R: Rng + ?Sized>(agent: &Agent, params: &InventionParams, rng: &mut R) -> ChainedAction {
    let base = mutate_step(&agent.current.base(), &agent.trends, params.rate_of_change, rng);
    if !params.chaining_enabled {
        return ChainedAction::single(base);
    }
    let arms: Vec<BodyPart> = [BodyPart::LeftArm, BodyPart::RightArm]
        .into_iter()
        .filter(|a| base.get(*a).is_moving())
        .collect();
    let Some(&arm) = arms.choose(rng) else {
        return ChainedAction::single(base);
    };
    let max_len = params.max_chain_len.max(1);
    let mut len = 1;
    while len < max_len && rng.gen_bool(agent.trends.p_ext) {
        len += 1;
    }
    ChainedAction::alternating(base, arm, len).expect("chain arm moves in the base step")
}

/// Scans neighbors in random order and returns the first strictly fitter action.
pub fn imitate<R: Rng + ?Sized>(
    agent: &Agent,
    neighbor_actions: &[&ChainedAction],
    rng: &mut R,
) -> Option<ChainedAction> {
    let own = agent.fitness();
    let mut order: Vec<usize> = (0..neighbor_actions.len()).collect();
    order.shuffle(rng);
    order
        .into_iter()
        .map(|i| neighbor_actions[i])
        .find(|a| fitness_chain(a).is_ok_and(|f| f.value() > own))
        .cloned()
}

fn nudge<T: Ord>(p: f64, new: T, old: T, max: f64) -> f64 {
    match new.cmp(&old) {
        std::cmp::Ordering::Greater => (p + TREND_INCREMENT).min(max),
        std::cmp::Ordering::Less => (p - TREND_INCREMENT).max(0.0),
        std::cmp::Ordering::Equal => p,
    }
}

/// Adjusts trends after `new` replaced `old`; `new` must be strictly fitter.
pub fn update_trends(
    trends: &TrendState,
    old: &ChainedAction,
    new: &ChainedAction,
) -> Result<TrendState, AgentError> {
    let (f_old, f_new) = (fitness_chain(old)?.value(), fitness_chain(new)?.value());
    if f_new <= f_old {
        return Err(AgentError::NotFitter { old: f_old, new: f_new });
    }
    let (a_old, a_new) = (hidden_activations(old)?, hidden_activations(new)?);
    let mut out = trends.clone();
    for p in out.p_im.iter_mut() {
        *p = nudge(*p, a_new.movement, a_old.movement, 1.0);
    }
    out.p_sym = nudge(out.p_sym, a_new.symmetry, a_old.symmetry, 1.0);
    out.p_ext = nudge(out.p_ext, a_new.opposite, a_old.opposite, out.p_ext_max);
    Ok(out)
}

/// Adopts `candidate` if strictly fitter, learning from the change when enabled.
pub fn evaluate_and_adopt(agent: &mut Agent, candidate: ChainedAction, learning_enabled: bool) -> bool {
    let Ok(candidate_fitness) = fitness_chain(&candidate) else {
        return false;
    };
    if candidate_fitness.value() <= agent.fitness() {
        return false;
    }
    if learning_enabled {
        agent.trends = update_trends(&agent.trends, &agent.current, &candidate)
            .expect("candidate checked strictly fitter");
    }
    agent.current = candidate;
    true
}
