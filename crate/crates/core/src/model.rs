//! Action representation and evaluation.
//!
//! An action step places each of six body parts in one of three motion
//! states, giving 3^6 = 729 distinct steps. Steps can be chained into
//! multi-step actions as long as one arm keeps reversing direction.

use std::fmt;

use thiserror::Error;

/// Number of body parts an action step controls.
pub const NUM_PARTS: usize = 6;

/// Number of distinct single steps (3^6).
pub const NUM_STEPS: usize = 729;

/// Maximum fitness a single step can reach.
pub const MAX_STEP_FITNESS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid chained action: {0}")]
    InvalidChain(&'static str),
}

/// Motion of one body part during a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Down,
    Stationary,
    Up,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Down, Direction::Stationary, Direction::Up];

    pub fn is_moving(self) -> bool {
        self != Direction::Stationary
    }

    /// The reverse moving direction. `None` for `Stationary`.
    pub fn reversed(self) -> Option<Direction> {
        match self {
            Direction::Down => Some(Direction::Up),
            Direction::Up => Some(Direction::Down),
            Direction::Stationary => None,
        }
    }

    fn digit(self) -> usize {
        match self {
            Direction::Down => 0,
            Direction::Stationary => 1,
            Direction::Up => 2,
        }
    }

    fn symbol(self) -> char {
        match self {
            Direction::Down => 'v',
            Direction::Stationary => '-',
            Direction::Up => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BodyPart {
    LeftArm,
    RightArm,
    LeftLeg,
    RightLeg,
    Head,
    Hips,
}

impl BodyPart {
    pub const ALL: [BodyPart; NUM_PARTS] = [
        BodyPart::LeftArm,
        BodyPart::RightArm,
        BodyPart::LeftLeg,
        BodyPart::RightLeg,
        BodyPart::Head,
        BodyPart::Hips,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_arm(self) -> bool {
        matches!(self, BodyPart::LeftArm | BodyPart::RightArm)
    }

    /// The other member of the arm or leg pair.
    pub fn partner(self) -> Option<BodyPart> {
        match self {
            BodyPart::LeftArm => Some(BodyPart::RightArm),
            BodyPart::RightArm => Some(BodyPart::LeftArm),
            BodyPart::LeftLeg => Some(BodyPart::RightLeg),
            BodyPart::RightLeg => Some(BodyPart::LeftLeg),
            BodyPart::Head | BodyPart::Hips => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BodyPart::LeftArm => "left_arm",
            BodyPart::RightArm => "right_arm",
            BodyPart::LeftLeg => "left_leg",
            BodyPart::RightLeg => "right_leg",
            BodyPart::Head => "head",
            BodyPart::Hips => "hips",
        }
    }
}

/// One single-timestep action: a direction for every body part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step([Direction; NUM_PARTS]);

impl Step {
    pub const STATIONARY: Step = Step([Direction::Stationary; NUM_PARTS]);

    pub fn new(positions: [Direction; NUM_PARTS]) -> Self {
        Step(positions)
    }

    pub fn get(&self, part: BodyPart) -> Direction {
        self.0[part.index()]
    }

    pub fn set(&mut self, part: BodyPart, dir: Direction) {
        self.0[part.index()] = dir;
    }

    #[must_use]
    pub fn with(mut self, part: BodyPart, dir: Direction) -> Self {
        self.set(part, dir);
        self
    }

    pub fn positions(&self) -> &[Direction; NUM_PARTS] {
        &self.0
    }

    pub fn moving_count(&self) -> usize {
        self.0.iter().filter(|d| d.is_moving()).count()
    }

    /// Number of body parts whose direction differs between two steps.
    pub fn distance(&self, other: &Step) -> usize {
        self.0.iter().zip(other.0.iter()).filter(|(a, b)| a != b).count()
    }

    /// Position of this step in the stable base-3 enumeration order.
    pub fn ordinal(&self) -> usize {
        self.0.iter().fold(0, |acc, d| acc * 3 + d.digit())
    }

    /// Inverse of [`Step::ordinal`]; `None` if `ordinal >= 729`.
    pub fn from_ordinal(mut ordinal: usize) -> Option<Step> {
        if ordinal >= NUM_STEPS {
            return None;
        }
        let mut positions = [Direction::Stationary; NUM_PARTS];
        for slot in positions.iter_mut().rev() {
            *slot = Direction::ALL[ordinal % 3];
            ordinal /= 3;
        }
        Some(Step(positions))
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, part) in BodyPart::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}={}", part.name(), self.get(*part).symbol())?;
        }
        Ok(())
    }
}

/// A multi-step action. Steps after the first must reverse `chain_arm`
/// every step. Construction does not validate; see [`is_valid_chain`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainedAction {
    steps: Vec<Step>,
    chain_arm: Option<BodyPart>,
}

impl ChainedAction {
    pub fn new(steps: Vec<Step>, chain_arm: Option<BodyPart>) -> Self {
        ChainedAction { steps, chain_arm }
    }

    pub fn single(step: Step) -> Self {
        ChainedAction {
            steps: vec![step],
            chain_arm: None,
        }
    }

    /// The 1-step all-stationary action every agent starts with.
    pub fn stationary() -> Self {
        Self::single(Step::STATIONARY)
    }

    /// Builds a valid chain of `len` steps on `base`, reversing `arm` each
    /// step and copying every other part from the previous step.
    pub fn alternating(base: Step, arm: BodyPart, len: usize) -> Result<Self, ModelError> {
        if len == 0 {
            return Err(ModelError::InvalidChain("chain length must be at least 1"));
        }
        if len == 1 {
            return Ok(Self::single(base));
        }
        if !arm.is_arm() {
            return Err(ModelError::InvalidChain("chain part must be an arm"));
        }
        if !base.get(arm).is_moving() {
            return Err(ModelError::InvalidChain("chain arm must move in the first step"));
        }
        let mut steps = Vec::with_capacity(len);
        steps.push(base);
        for _ in 1..len {
            let prev = *steps.last().unwrap();
            let flipped = prev.get(arm).reversed().unwrap();
            steps.push(prev.with(arm, flipped));
        }
        Ok(ChainedAction {
            steps,
            chain_arm: Some(arm),
        })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn chain_arm(&self) -> Option<BodyPart> {
        self.chain_arm
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The first step. Panics on an empty (invalid) chain.
    pub fn base(&self) -> Step {
        self.steps[0]
    }

    pub fn is_valid(&self) -> bool {
        is_valid_chain(self)
    }

    /// Fitness of a valid chain; errors on an invalid one.
    pub fn fitness(&self) -> Result<Fitness, ModelError> {
        fitness_chain(self)
    }
}

impl fmt::Display for ChainedAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.steps.first(), self.chain_arm) {
            (None, _) => f.write_str("<empty>"),
            (Some(base), None) => write!(f, "[{base}]"),
            (Some(base), Some(arm)) => {
                write!(f, "[{base}] x{} on {}", self.steps.len(), arm.name())
            }
        }
    }
}

/// Fitness of an action. Always a multiple of 0.5, so comparisons are exact.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Fitness(pub f64);

impl Fitness {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1}", self.0)
    }
}

/// Feature-detector readings for an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HiddenActivations {
    /// Number of moving parts in the first step.
    pub movement: u8,
    /// Opposed arms plus opposed legs, 0..=2.
    pub symmetry: u8,
    /// Number of arm reversals: chain length minus one.
    pub opposite: usize,
    pub head_moving: u8,
}

/// True iff both parts move and in opposite vertical directions.
fn opposed(step: &Step, a: BodyPart, b: BodyPart) -> bool {
    let (da, db) = (step.get(a), step.get(b));
    da.is_moving() && db.is_moving() && da != db
}

fn step_activations(step: &Step) -> (u8, u8, u8) {
    let movement = step.moving_count() as u8;
    let arms = opposed(step, BodyPart::LeftArm, BodyPart::RightArm) as u8;
    let legs = opposed(step, BodyPart::LeftLeg, BodyPart::RightLeg) as u8;
    let head = step.get(BodyPart::Head).is_moving() as u8;
    (movement, arms + legs, head)
}

pub fn hidden_activations(chain: &ChainedAction) -> Result<HiddenActivations, ModelError> {
    check_valid(chain)?;
    let (movement, symmetry, head_moving) = step_activations(&chain.base());
    Ok(HiddenActivations {
        movement,
        symmetry,
        opposite: chain.len() - 1,
        head_moving,
    })
}

/// `m + 1.5 (s_a + s_l) + 2 (1 - m_h)`, where `m_h` is 1 when the head moves.
pub fn fitness_step(step: &Step) -> Fitness {
    let (movement, symmetry, head_moving) = step_activations(step);
    Fitness(f64::from(movement) + 1.5 * f64::from(symmetry) + 2.0 * f64::from(1 - head_moving))
}

/// Fitness of the first step plus one per extra step.
pub fn fitness_chain(chain: &ChainedAction) -> Result<Fitness, ModelError> {
    check_valid(chain)?;
    Ok(Fitness(fitness_step(&chain.base()).0 + (chain.len() - 1) as f64))
}

fn check_valid(chain: &ChainedAction) -> Result<(), ModelError> {
    validate(chain).map_err(ModelError::InvalidChain)
}

fn validate(chain: &ChainedAction) -> Result<(), &'static str> {
    let steps = chain.steps();
    match (steps.len(), chain.chain_arm()) {
        (0, _) => Err("chain has no steps"),
        (1, None) => Ok(()),
        (1, Some(_)) => Err("single-step action must not name a chain arm"),
        (_, None) => Err("multi-step action needs a chain arm"),
        (_, Some(arm)) => {
            if !arm.is_arm() {
                return Err("chain part must be an arm");
            }
            if !steps[0].get(arm).is_moving() {
                return Err("chain arm must move in the first step");
            }
            let alternates = steps
                .windows(2)
                .all(|w| w[0].get(arm).reversed() == Some(w[1].get(arm)));
            if alternates {
                Ok(())
            } else {
                Err("chain arm must reverse direction every step")
            }
        }
    }
}

pub fn is_valid_chain(chain: &ChainedAction) -> bool {
    validate(chain).is_ok()
}

/// All 729 steps in base-3 order (left arm most significant, down < stationary < up).
pub fn enumerate_steps() -> Vec<Step> {
    (0..NUM_STEPS).filter_map(Step::from_ordinal).collect()
}

/// The steps attaining the maximum single-step fitness, in enumeration order.
pub fn optimal_steps() -> Vec<Step> {
    let all = enumerate_steps();
    let best = all
        .iter()
        .map(|s| fitness_step(s).0)
        .fold(f64::NEG_INFINITY, f64::max);
    all.into_iter().filter(|s| fitness_step(s).0 == best).collect()
}

pub fn is_optimal_step(step: &Step) -> bool {
    fitness_step(step).0 == MAX_STEP_FITNESS
}
