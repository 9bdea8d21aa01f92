//! Three-player strategic-form games over participation levels and a fee
//! pair, with grid-based brute-force oracles for Nash equilibrium, weak
//! dominance and Pareto efficiency.
//!
//! Users choose a participation level in `[0, 1]`; the middleman chooses one
//! fee per user. Every oracle scans a [`Grid`] and compares payoffs against
//! the profile under test, so verdicts are exact up to the grid and the
//! supplied tolerance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for games built from analytic functions.
pub const ANALYTIC_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    User1,
    User2,
    Middleman,
}

impl Player {
    pub const ALL: [Player; 3] = [Player::User1, Player::User2, Player::Middleman];

    pub fn index(self) -> usize {
        match self {
            Player::User1 => 0,
            Player::User2 => 1,
            Player::Middleman => 2,
        }
    }

    pub fn user(index: usize) -> Result<Player> {
        match index {
            1 => Ok(Player::User1),
            2 => Ok(Player::User2),
            _ => Err(Error::NotAUser),
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::User1 => f.write_str("user1"),
            Player::User2 => f.write_str("user2"),
            Player::Middleman => f.write_str("middleman"),
        }
    }
}

/// Access fees charged to user 1 and user 2.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeePair {
    pub user1: f64,
    pub user2: f64,
}

impl FeePair {
    pub const ZERO: FeePair = FeePair { user1: 0.0, user2: 0.0 };

    pub fn new(user1: f64, user2: f64) -> Self {
        Self { user1, user2 }
    }

    pub fn sum(self) -> f64 {
        self.user1 + self.user2
    }

    pub fn scale(self, factor: f64) -> Self {
        Self::new(self.user1 * factor, self.user2 * factor)
    }
}

/// Payoffs indexed by [`Player::index`].
pub type Payoffs = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub s1: f64,
    pub s2: f64,
    pub fees: FeePair,
}

impl StrategyProfile {
    pub fn new(s1: f64, s2: f64, fee1: f64, fee2: f64) -> Result<Self> {
        let profile = Self {
            s1,
            s2,
            fees: FeePair::new(fee1, fee2),
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn with_fees(s1: f64, s2: f64, fees: FeePair) -> Result<Self> {
        Self::new(s1, s2, fees.user1, fees.user2)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("s1", self.s1), ("s2", self.s2)] {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::ProfileOutOfBounds(format!("{name} = {s} is outside [0, 1]")));
            }
        }
        for (name, fee) in [("fee1", self.fees.user1), ("fee2", self.fees.user2)] {
            if !(fee.is_finite() && fee >= 0.0) {
                return Err(Error::ProfileOutOfBounds(format!("{name} = {fee} must be nonnegative")));
            }
        }
        Ok(())
    }

    /// The same profile with `player`'s own strategy replaced.
    fn with_participation(self, player: Player, level: f64) -> Self {
        match player {
            Player::User1 => Self { s1: level, ..self },
            Player::User2 => Self { s2: level, ..self },
            Player::Middleman => self,
        }
    }
}

/// Payoff functions of the three players.
pub trait GamePayoffs {
    fn payoffs(&self, profile: &StrategyProfile) -> Payoffs;

    fn payoff(&self, player: Player, profile: &StrategyProfile) -> f64 {
        self.payoffs(profile)[player.index()]
    }

    /// Fixes the participation levels and returns payoffs as a function of
    /// the fee pair alone. Implementations override this to hoist work that
    /// depends only on participation out of fee-grid scans.
    fn at_participation<'a>(&'a self, s1: f64, s2: f64) -> Box<dyn Fn(FeePair) -> Payoffs + 'a> {
        Box::new(move |fees| self.payoffs(&StrategyProfile { s1, s2, fees }))
    }
}

impl<G: GamePayoffs + ?Sized> GamePayoffs for &G {
    fn payoffs(&self, profile: &StrategyProfile) -> Payoffs {
        (**self).payoffs(profile)
    }

    fn at_participation<'a>(&'a self, s1: f64, s2: f64) -> Box<dyn Fn(FeePair) -> Payoffs + 'a> {
        (**self).at_participation(s1, s2)
    }
}

/// A game given directly by three payoff closures.
pub struct FnGame<A, B, M> {
    pub user1: A,
    pub user2: B,
    pub middleman: M,
}

impl<A, B, M> GamePayoffs for FnGame<A, B, M>
where
    A: Fn(&StrategyProfile) -> f64,
    B: Fn(&StrategyProfile) -> f64,
    M: Fn(&StrategyProfile) -> f64,
{
    fn payoffs(&self, profile: &StrategyProfile) -> Payoffs {
        [(self.user1)(profile), (self.user2)(profile), (self.middleman)(profile)]
    }
}

/// Discretization of the strategy box used by the oracles.
///
/// Participation levels are `floor + k (1 - floor) / steps` and fee levels
/// are `k * bound / steps` for `k = 0..=steps`. The last point of each axis
/// is exactly the upper end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    steps: usize,
    participation_floor: f64,
    fee_bounds: FeePair,
}

impl Grid {
    pub fn new(steps: usize, fee_bounds: FeePair) -> Result<Self> {
        if steps < 2 {
            return Err(Error::GridTooCoarse(steps));
        }
        for bound in [fee_bounds.user1, fee_bounds.user2] {
            if !(bound.is_finite() && bound >= 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "fee bound {bound} must be finite and nonnegative"
                )));
            }
        }
        Ok(Self {
            steps,
            participation_floor: 0.0,
            fee_bounds,
        })
    }

    /// Restricts participation levels to `[floor, 1]`.
    pub fn with_participation_floor(mut self, floor: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&floor) {
            return Err(Error::InvalidGrid(format!(
                "participation floor {floor} must lie in [0, 1)"
            )));
        }
        self.participation_floor = floor;
        Ok(self)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn participation_floor(&self) -> f64 {
        self.participation_floor
    }

    pub fn fee_bounds(&self) -> FeePair {
        self.fee_bounds
    }

    pub fn participation_step(&self) -> f64 {
        (1.0 - self.participation_floor) / self.steps as f64
    }

    pub fn participation_levels(&self) -> Vec<f64> {
        axis(self.participation_floor, 1.0, self.steps)
    }

    pub fn fee_levels(&self, user: Player) -> Vec<f64> {
        let bound = match user {
            Player::User1 => self.fee_bounds.user1,
            Player::User2 => self.fee_bounds.user2,
            Player::Middleman => 0.0,
        };
        axis(0.0, bound, self.steps)
    }

    /// All fee pairs, user 1's fee varying slowest.
    pub fn fee_pairs(&self) -> Vec<FeePair> {
        let first = self.fee_levels(Player::User1);
        let second = self.fee_levels(Player::User2);
        first
            .iter()
            .flat_map(|&a| second.iter().map(move |&b| FeePair::new(a, b)))
            .collect()
    }
}

fn axis(lower: f64, upper: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|k| {
            if k == steps {
                upper
            } else {
                lower + (upper - lower) * k as f64 / steps as f64
            }
        })
        .collect()
}

fn check_eps(eps: f64) -> Result<()> {
    if eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeTolerance(eps))
    }
}

/// A player's most profitable unilateral grid deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub player: Player,
    /// Payoff at the deviation minus payoff at the profile under test.
    pub gain: f64,
    pub profile: StrategyProfile,
}

/// Best unilateral grid deviation for each player. Users deviate in their
/// own participation level; the middleman deviates in the fee pair jointly.
pub fn best_deviations<G: GamePayoffs + ?Sized>(
    game: &G,
    profile: &StrategyProfile,
    grid: &Grid,
) -> Result<[Deviation; 3]> {
    profile.validate()?;
    let current = game.payoffs(profile);

    let user_best = |player: Player| {
        let mut best = Deviation {
            player,
            gain: f64::NEG_INFINITY,
            profile: *profile,
        };
        for level in grid.participation_levels() {
            let candidate = profile.with_participation(player, level);
            let gain = game.payoff(player, &candidate) - current[player.index()];
            if gain > best.gain {
                best = Deviation {
                    player,
                    gain,
                    profile: candidate,
                };
            }
        }
        best
    };

    let middleman = {
        let section = game.at_participation(profile.s1, profile.s2);
        let mut best = Deviation {
            player: Player::Middleman,
            gain: f64::NEG_INFINITY,
            profile: *profile,
        };
        for fees in grid.fee_pairs() {
            let gain = section(fees)[Player::Middleman.index()] - current[Player::Middleman.index()];
            if gain > best.gain {
                best = Deviation {
                    player: Player::Middleman,
                    gain,
                    profile: StrategyProfile { fees, ..*profile },
                };
            }
        }
        best
    };

    Ok([user_best(Player::User1), user_best(Player::User2), middleman])
}

/// True iff no player gains more than `eps` from a unilateral grid deviation.
/// A gain of exactly `eps` does not count as an improvement.
pub fn epsilon_nash_check<G: GamePayoffs + ?Sized>(
    game: &G,
    profile: &StrategyProfile,
    grid: &Grid,
    eps: f64,
) -> Result<bool> {
    check_eps(eps)?;
    let deviations = best_deviations(game, profile, grid)?;
    Ok(deviations.iter().all(|d| d.gain <= eps))
}

/// True iff participation level `candidate` is weakly dominant for `player`
/// on the grid: against every grid strategy of the other two players it does
/// at least as well as every alternative grid level, up to `eps`.
pub fn weak_dominance_check<G: GamePayoffs + ?Sized>(
    game: &G,
    player: Player,
    candidate: f64,
    grid: &Grid,
    eps: f64,
) -> Result<bool> {
    if player == Player::Middleman {
        return Err(Error::NotAUser);
    }
    check_eps(eps)?;
    if !(0.0..=1.0).contains(&candidate) {
        return Err(Error::ProfileOutOfBounds(format!(
            "candidate {candidate} is outside [0, 1]"
        )));
    }

    let levels = grid.participation_levels();
    let fee_pairs = grid.fee_pairs();
    let me = player.index();
    let place = |own: f64, other: f64| match player {
        Player::User1 => (own, other),
        _ => (other, own),
    };

    for &other in &levels {
        let (s1, s2) = place(candidate, other);
        let section = game.at_participation(s1, s2);
        let baseline: Vec<f64> = fee_pairs.iter().map(|&fees| section(fees)[me]).collect();
        for &alternative in &levels {
            let (s1, s2) = place(alternative, other);
            let section = game.at_participation(s1, s2);
            let beaten = fee_pairs
                .iter()
                .zip(&baseline)
                .any(|(&fees, &base)| section(fees)[me] - base > eps);
            if beaten {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// First grid profile that weakly improves every payoff and improves at
/// least one by more than `eps`, if any. Scan order is `s1`, `s2`, then fee
/// pairs, so the result is deterministic.
pub fn find_pareto_dominator<G: GamePayoffs + ?Sized>(
    game: &G,
    profile: &StrategyProfile,
    grid: &Grid,
    eps: f64,
) -> Result<Option<StrategyProfile>> {
    profile.validate()?;
    check_eps(eps)?;
    let current = game.payoffs(profile);
    let levels = grid.participation_levels();
    let fee_pairs = grid.fee_pairs();

    for &s1 in &levels {
        for &s2 in &levels {
            let section = game.at_participation(s1, s2);
            for &fees in &fee_pairs {
                let other = section(fees);
                let weakly_better = other.iter().zip(&current).all(|(o, c)| o >= c);
                let strictly_better = other.iter().zip(&current).any(|(o, c)| o - c > eps);
                if weakly_better && strictly_better {
                    return Ok(Some(StrategyProfile { s1, s2, fees }));
                }
            }
        }
    }
    Ok(None)
}

/// True iff no grid profile Pareto-dominates `profile`.
pub fn pareto_check<G: GamePayoffs + ?Sized>(
    game: &G,
    profile: &StrategyProfile,
    grid: &Grid,
    eps: f64,
) -> Result<bool> {
    Ok(find_pareto_dominator(game, profile, grid, eps)?.is_none())
}
