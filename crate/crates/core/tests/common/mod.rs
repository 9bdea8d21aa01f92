//! Random game families shared by the integration tests, with a reference
//! evaluator written directly from the payoff definitions.

#![allow(dead_code)]

use contestability::ambiguity::BeliefSystem;
use contestability::game::Grid;
use contestability::hedonic::{BenefitSpec, GameTag, HedonicGame, IncomeSpec};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

/// Participation floor used for Cobb-Douglas games, which are only strictly
/// increasing away from the axes.
pub const FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    CobbDouglas { alpha: f64, beta: f64 },
    Linear { w1: f64, w2: f64 },
}

impl Family {
    pub fn eval(&self, s1: f64, s2: f64) -> f64 {
        match *self {
            Family::CobbDouglas { alpha, beta } => s1.powf(alpha) * s2.powf(beta),
            Family::Linear { w1, w2 } => w1 * s1 + w2 * s2,
        }
    }

    pub fn spec(&self) -> BenefitSpec {
        match *self {
            Family::CobbDouglas { alpha, beta } => BenefitSpec::cobb_douglas(alpha, beta).unwrap(),
            Family::Linear { w1, w2 } => BenefitSpec::linear(w1, w2).unwrap(),
        }
    }

    pub fn random(rng: &mut StdRng) -> Self {
        if rng.random_bool(0.5) {
            Family::CobbDouglas {
                alpha: rng.random_range(0.5..=2.0),
                beta: rng.random_range(0.5..=2.0),
            }
        } else {
            // weights in (0, 1]
            Family::Linear {
                w1: 1.0 - rng.random::<f64>(),
                w2: 1.0 - rng.random::<f64>(),
            }
        }
    }
}

pub fn family_strategy() -> impl Strategy<Value = Family> {
    prop_oneof![
        (0.5f64..=2.0, 0.5f64..=2.0).prop_map(|(alpha, beta)| Family::CobbDouglas { alpha, beta }),
        (0.001f64..=1.0, 0.001f64..=1.0).prop_map(|(w1, w2)| Family::Linear { w1, w2 }),
    ]
}

/// Two benefit functions and an activity measure for multiplicative income.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub f1: Family,
    pub f2: Family,
    pub g: Family,
}

impl Draw {
    pub fn random(rng: &mut StdRng) -> Self {
        Draw {
            f1: Family::random(rng),
            f2: Family::random(rng),
            g: Family::random(rng),
        }
    }

    pub fn game(&self) -> HedonicGame {
        HedonicGame::new(
            self.f1.spec(),
            self.f2.spec(),
            IncomeSpec::Multiplicative(self.g.spec()),
            GameTag::Benchmark,
        )
    }

    pub fn has_cobb_douglas(&self) -> bool {
        [self.f1, self.f2, self.g]
            .iter()
            .any(|f| matches!(f, Family::CobbDouglas { .. }))
    }

    /// Grid over `[FLOOR, 1]^2` whenever a Cobb-Douglas factor is present.
    pub fn grid(&self, steps: usize) -> Grid {
        let floor = if self.has_cobb_douglas() { FLOOR } else { 0.0 };
        self.game()
            .grid(steps)
            .unwrap()
            .with_participation_floor(floor)
            .unwrap()
    }

    pub fn full_fees(&self) -> (f64, f64) {
        (self.f1.eval(1.0, 1.0), self.f2.eval(1.0, 1.0))
    }

    /// Middleman's regular payoff.
    pub fn income(&self, r1: f64, r2: f64, s1: f64, s2: f64) -> f64 {
        if r1 <= self.f1.eval(s1, s2) && r2 <= self.f2.eval(s1, s2) {
            (r1 + r2) * self.g.eval(s1, s2)
        } else {
            0.0
        }
    }

    /// Ambiguity-weighted payoff of the middleman.
    pub fn modified(&self, b: &BeliefSystem, r1: f64, r2: f64, s1: f64, s2: f64) -> f64 {
        let [a, c] = b.loyalty;
        b.optimism * self.income(r1, r2, 1.0, 1.0)
            + b.pessimism * self.income(r1, r2, a, c)
            + (1.0 - b.optimism - b.pessimism) * self.income(r1, r2, s1, s2)
    }
}

pub fn draw_strategy() -> impl Strategy<Value = Draw> {
    (family_strategy(), family_strategy(), family_strategy()).prop_map(|(f1, f2, g)| Draw { f1, f2, g })
}

/// Proper beliefs with pessimism below `max_gamma` and loyalty below 1.
pub fn random_beliefs(rng: &mut StdRng, max_gamma: f64) -> BeliefSystem {
    let gamma = rng.random_range(0.0..max_gamma);
    let lambda = rng.random_range(0.0..=1.0 - gamma);
    BeliefSystem::new(lambda, gamma, rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)).unwrap()
}

pub fn beliefs_strategy() -> impl Strategy<Value = BeliefSystem> {
    (0.0f64..0.99, 0.0f64..=1.0, 0.0f64..1.0, 0.0f64..1.0)
        .prop_map(|(gamma, share, a, b)| BeliefSystem::new(share * (1.0 - gamma), gamma, a, b).unwrap())
}
