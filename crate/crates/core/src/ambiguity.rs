//! Positional ambiguity for the middleman under neo-additive beliefs.
//!
//! The middleman mixes three evaluations of a fee pair: an optimistic one
//! (both users participate fully), a pessimistic one (users fall back to
//! their loyalty levels) and the regular payoff, with weights `optimism`,
//! `pessimism` and the remainder. Users carry no ambiguity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{epsilon_nash_check, FeePair, GamePayoffs, Grid, Payoffs, Player, StrategyProfile};
use crate::hedonic::{gated_income, HedonicGame};

/// Degrees of optimism and pessimism plus the participation the middleman
/// expects to keep when contested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeliefSystem {
    pub optimism: f64,
    pub pessimism: f64,
    pub loyalty: [f64; 2],
}

impl BeliefSystem {
    pub fn new(optimism: f64, pessimism: f64, loyalty1: f64, loyalty2: f64) -> Result<Self> {
        let beliefs = Self {
            optimism,
            pessimism,
            loyalty: [loyalty1, loyalty2],
        };
        beliefs.validate()?;
        Ok(beliefs)
    }

    /// No ambiguity: the modified payoff is the regular payoff.
    pub fn unambiguous() -> Self {
        Self {
            optimism: 0.0,
            pessimism: 0.0,
            loyalty: [0.0, 0.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("optimism", self.optimism),
            ("pessimism", self.pessimism),
            ("loyalty1", self.loyalty[0]),
            ("loyalty2", self.loyalty[1]),
        ];
        for (name, value) in named {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidBeliefs(format!("{name} = {value} is outside [0, 1]")));
            }
        }
        if self.optimism + self.pessimism > 1.0 {
            return Err(Error::ImproperBeliefs {
                optimism: self.optimism,
                pessimism: self.pessimism,
            });
        }
        Ok(())
    }

    /// Pessimism strictly below 1 and loyalty strictly below full
    /// participation, as the full-exploitation threshold requires.
    pub fn validate_contestable(&self) -> Result<()> {
        self.validate()?;
        if self.pessimism >= 1.0 {
            return Err(Error::Precondition("pessimism must be < 1".into()));
        }
        for (name, level) in [("loyalty1", self.loyalty[0]), ("loyalty2", self.loyalty[1])] {
            if level >= 1.0 {
                return Err(Error::Precondition(format!("{name} must be < 1")));
            }
        }
        Ok(())
    }
}

/// Income at full participation, provided neither fee exceeds the
/// full-participation benefit.
pub fn optimistic_payoff(game: &HedonicGame, fees: FeePair) -> f64 {
    gated_income(game.benefits(1.0, 1.0), fees, game.income.eval(fees, 1.0, 1.0))
}

/// Income at the loyalty levels, provided neither fee exceeds the benefit
/// there.
pub fn pessimistic_payoff(game: &HedonicGame, beliefs: &BeliefSystem, fees: FeePair) -> f64 {
    let [a, b] = beliefs.loyalty;
    gated_income(game.benefits(a, b), fees, game.income.eval(fees, a, b))
}

fn blend(beliefs: &BeliefSystem, optimistic: f64, pessimistic: f64, regular: f64) -> f64 {
    let regular_weight = 1.0 - beliefs.optimism - beliefs.pessimism;
    beliefs.optimism * optimistic + beliefs.pessimism * pessimistic + regular_weight * regular
}

/// The middleman's ambiguity-weighted payoff at `profile`.
pub fn modified_payoff(game: &HedonicGame, beliefs: &BeliefSystem, profile: &StrategyProfile) -> Result<f64> {
    beliefs.validate()?;
    let regular = game.payoff(Player::Middleman, profile);
    Ok(blend(
        beliefs,
        optimistic_payoff(game, profile.fees),
        pessimistic_payoff(game, beliefs, profile.fees),
        regular,
    ))
}

/// The game in which only the middleman's payoff is replaced by its
/// ambiguity-weighted version.
#[derive(Debug, Clone, Copy)]
pub struct AmbiguityGame<'a> {
    game: &'a HedonicGame,
    beliefs: BeliefSystem,
}

impl<'a> AmbiguityGame<'a> {
    pub fn new(game: &'a HedonicGame, beliefs: BeliefSystem) -> Result<Self> {
        beliefs.validate()?;
        Ok(Self { game, beliefs })
    }

    fn transform(&self, mut payoffs: Payoffs, fees: FeePair) -> Payoffs {
        let m = Player::Middleman.index();
        payoffs[m] = blend(
            &self.beliefs,
            optimistic_payoff(self.game, fees),
            pessimistic_payoff(self.game, &self.beliefs, fees),
            payoffs[m],
        );
        payoffs
    }
}

impl GamePayoffs for AmbiguityGame<'_> {
    fn payoffs(&self, profile: &StrategyProfile) -> Payoffs {
        self.transform(self.game.payoffs(profile), profile.fees)
    }

    fn at_participation<'b>(&'b self, s1: f64, s2: f64) -> Box<dyn Fn(FeePair) -> Payoffs + 'b> {
        let section = self.game.at_participation(s1, s2);
        Box::new(move |fees| self.transform(section(fees), fees))
    }
}

/// Nash check in the game with the middleman's payoff made ambiguous.
pub fn ambiguity_equilibrium_check(
    game: &HedonicGame,
    beliefs: &BeliefSystem,
    profile: &StrategyProfile,
    grid: &Grid,
    eps: f64,
) -> Result<bool> {
    let modified = AmbiguityGame::new(game, *beliefs)?;
    epsilon_nash_check(&modified, profile, grid, eps)
}

/// Fees that extract each user's entire benefit at the loyalty levels.
pub fn loyalty_fees(game: &HedonicGame, beliefs: &BeliefSystem) -> FeePair {
    game.benefits(beliefs.loyalty[0], beliefs.loyalty[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContestationVerdict {
    /// Income at full participation under full-extraction fees minus income
    /// under loyalty fees.
    pub delta: f64,
    /// `pessimism / (1 - pessimism)` times the pessimistic income under
    /// loyalty fees.
    pub rhs: f64,
    pub full_exploitation: bool,
    pub full_fees: FeePair,
    pub loyalty_fees: FeePair,
}

impl ContestationVerdict {
    pub fn slack(&self) -> f64 {
        self.delta - self.rhs
    }
}

/// Whether the contested middleman still charges the full-extraction fees
/// rather than the loyalty fees. Ties count as full exploitation.
pub fn contestation_verdict(game: &HedonicGame, beliefs: &BeliefSystem) -> Result<ContestationVerdict> {
    beliefs.validate_contestable()?;
    let full_fees = game.full_extraction_fees();
    let phi = loyalty_fees(game, beliefs);
    let [a, b] = beliefs.loyalty;

    let delta = game.income.eval(full_fees, 1.0, 1.0) - game.income.eval(phi, 1.0, 1.0);
    let odds = beliefs.pessimism / (1.0 - beliefs.pessimism);
    let rhs = odds * game.income.eval(phi, a, b);
    Ok(ContestationVerdict {
        delta,
        rhs,
        full_exploitation: delta >= rhs,
        full_fees,
        loyalty_fees: phi,
    })
}

/// Ambiguity-weighted payoffs at full participation over the whole fee
/// grid, compared with the two candidate fee pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeeScan {
    pub best_fees: FeePair,
    pub best_value: f64,
    pub full_fees_value: f64,
    pub loyalty_fees_value: f64,
    /// Some grid fee beats both candidates by more than the tolerance.
    pub third_fee_wins: bool,
}

pub fn fee_scan(game: &HedonicGame, beliefs: &BeliefSystem, grid: &Grid, eps: f64) -> Result<FeeScan> {
    let modified = AmbiguityGame::new(game, *beliefs)?;
    let section = modified.at_participation(1.0, 1.0);
    let m = Player::Middleman.index();

    let full_fees_value = section(game.full_extraction_fees())[m];
    let loyalty_fees_value = section(loyalty_fees(game, beliefs))[m];
    let (best_fees, best_value) = grid.fee_pairs().into_iter().map(|fees| (fees, section(fees)[m])).fold(
        (FeePair::ZERO, f64::NEG_INFINITY),
        |best, next| if next.1 > best.1 { next } else { best },
    );

    Ok(FeeScan {
        best_fees,
        best_value,
        full_fees_value,
        loyalty_fees_value,
        third_fee_wins: best_value > full_fees_value.max(loyalty_fees_value) + eps,
    })
}
