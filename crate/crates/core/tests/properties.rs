use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use evoc_core::agent::{evaluate_and_adopt, imitate, invent, update_trends};
use evoc_core::model::{enumerate_steps, fitness_chain, is_valid_chain, BodyPart, NUM_STEPS};
use evoc_core::simulation::MetricsRecord;
use evoc_core::{Agent, ChainedAction, InventionParams, Position, Step, TrendState, World, WorldConfig};

fn step_strategy() -> impl Strategy<Value = Step> {
    (0..NUM_STEPS).prop_map(|i| Step::from_ordinal(i).unwrap())
}

/// A valid chain: any base, plus an alternation tail when an arm moves.
fn chain_strategy() -> impl Strategy<Value = ChainedAction> {
    (step_strategy(), any::<bool>(), 1usize..8).prop_map(|(base, prefer_left, len)| {
        let arms = [BodyPart::LeftArm, BodyPart::RightArm];
        let pick = if prefer_left { arms } else { [arms[1], arms[0]] };
        match pick.into_iter().find(|a| base.get(*a).is_moving()) {
            Some(arm) => ChainedAction::alternating(base, arm, len).unwrap(),
            None => ChainedAction::single(base),
        }
    })
}

fn trends_strategy() -> impl Strategy<Value = TrendState> {
    (prop::array::uniform6(0.0..=1.0f64), 0.0..=1.0f64, 0.0..0.95f64, 0.0..=1.0f64).prop_map(
        |(p_im, p_sym, p_ext_max, ext_frac)| TrendState {
            p_im,
            p_sym,
            p_ext: p_ext_max * ext_frac,
            p_ext_max,
        },
    )
}

fn params_strategy() -> impl Strategy<Value = InventionParams> {
    (0.0..=1.0f64, any::<bool>(), any::<bool>(), 1usize..30).prop_map(
        |(rate_of_change, chaining_enabled, learning_enabled, max_chain_len)| InventionParams {
            rate_of_change,
            chaining_enabled,
            learning_enabled,
            max_chain_len,
            p_ext_max: 0.9,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn invention_is_closed_over_valid_chains(
        current in chain_strategy(),
        trends in trends_strategy(),
        params in params_strategy(),
        seed in any::<u64>(),
    ) {
        let agent = Agent { id: 0, position: Position::new(0, 0), current, trends };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let c = invent(&agent, &params, &mut rng);
            prop_assert!(is_valid_chain(&c));
            prop_assert!(c.len() <= params.max_chain_len.max(1));
            if !params.chaining_enabled {
                prop_assert_eq!(c.len(), 1);
            }
        }
    }

    #[test]
    fn trend_updates_stay_in_bounds(
        trends in trends_strategy(),
        pairs in prop::collection::vec((chain_strategy(), chain_strategy()), 1..40),
    ) {
        let mut t = trends;
        for (a, b) in pairs {
            let (fa, fb) = (fitness_chain(&a).unwrap(), fitness_chain(&b).unwrap());
            let result = update_trends(&t, &a, &b);
            if fb > fa {
                t = result.unwrap();
                prop_assert!(t.in_bounds());
            } else {
                prop_assert!(result.is_err());
            }
        }
    }

    #[test]
    fn adoption_is_a_ratchet(
        start in chain_strategy(),
        candidates in prop::collection::vec(chain_strategy(), 1..40),
        learning in any::<bool>(),
    ) {
        let mut agent = Agent { id: 0, position: Position::new(0, 0), current: start, trends: TrendState::default() };
        let frozen = agent.trends.clone();
        for c in candidates {
            let before = agent.fitness();
            let candidate_fitness = fitness_chain(&c).unwrap().value();
            let adopted = evaluate_and_adopt(&mut agent, c, learning);
            prop_assert_eq!(adopted, candidate_fitness > before);
            prop_assert!(agent.fitness() >= before);
            prop_assert_eq!(agent.fitness() > before, adopted);
        }
        if !learning {
            prop_assert_eq!(agent.trends, frozen);
        }
    }

    #[test]
    fn imitation_only_returns_strictly_fitter(
        own in chain_strategy(),
        neighbors in prop::collection::vec(chain_strategy(), 0..6),
        seed in any::<u64>(),
    ) {
        let agent = Agent { id: 0, position: Position::new(0, 0), current: own, trends: TrendState::default() };
        let refs: Vec<&ChainedAction> = neighbors.iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let got = imitate(&agent, &refs, &mut rng);
        let any_fitter = neighbors.iter().any(|n| fitness_chain(n).unwrap().value() > agent.fitness());
        prop_assert_eq!(got.is_some(), any_fitter);
        if let Some(a) = got {
            prop_assert!(fitness_chain(&a).unwrap().value() > agent.fitness());
            prop_assert!(neighbors.contains(&a));
        }
    }

    #[test]
    fn diversity_is_bounded_by_population(actions in prop::collection::vec(chain_strategy(), 1..60)) {
        let m = MetricsRecord::from_actions(0, &actions);
        prop_assert!(m.diversity >= 1 && m.diversity <= actions.len());
        prop_assert!((0.0..=1.0).contains(&m.fraction_optimal_base));
        prop_assert!(m.mean_chain_length >= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn worlds_ratchet_and_are_deterministic(
        seed in any::<u64>(),
        width in 1usize..7,
        height in 1usize..7,
        toroidal in any::<bool>(),
        invention_probability in 0.0..=1.0f64,
        chaining in any::<bool>(),
        learning in any::<bool>(),
    ) {
        let mut cfg = WorldConfig { width, height, toroidal, invention_probability, iterations: 25, seed, ..WorldConfig::default() };
        cfg.invention_params.chaining_enabled = chaining;
        cfg.invention_params.learning_enabled = learning;
        let mut world = World::new(cfg.clone()).unwrap();
        let initial_trends: Vec<TrendState> = world.agents().iter().map(|a| a.trends.clone()).collect();
        let mut last_mean = world.metrics().mean_fitness;
        for _ in 0..25 {
            let before: Vec<f64> = world.agents().iter().map(Agent::fitness).collect();
            world.step();
            for (a, f) in world.agents().iter().zip(&before) {
                prop_assert!(a.fitness() >= *f);
                prop_assert!(a.current.is_valid());
                prop_assert!(a.trends.in_bounds());
            }
            let m = world.metrics();
            prop_assert!(m.mean_fitness >= last_mean);
            if !chaining {
                prop_assert!(m.mean_fitness <= 10.0);
            }
            if m.mean_fitness > 10.0 {
                prop_assert!(world.agents().iter().any(|a| a.current.len() >= 2));
            }
            last_mean = m.mean_fitness;
        }
        if !learning {
            let now: Vec<TrendState> = world.agents().iter().map(|a| a.trends.clone()).collect();
            prop_assert_eq!(now, initial_trends);
        }
        prop_assert_eq!(evoc_core::run(&cfg).unwrap(), evoc_core::run(&cfg).unwrap());
    }
}

#[test]
fn every_step_is_a_valid_single_action() {
    for s in enumerate_steps() {
        assert!(is_valid_chain(&ChainedAction::single(s)));
    }
}
