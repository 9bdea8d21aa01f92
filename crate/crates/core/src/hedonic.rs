//! The hedonic model of intermediated interaction: two users whose gross
//! benefits depend on both participation levels, and a middleman who charges
//! each user an access fee.
//!
//! A user pays her fee out of her benefit and gets nothing once the fee
//! exceeds it. The middleman earns her net income only while neither user is
//! overcharged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{epsilon_nash_check, FeePair, GamePayoffs, Grid, Payoffs, Player, StrategyProfile, ANALYTIC_EPS};
use crate::table::Lattice;

/// Adjacent values closer than this do not count as a strict increase.
pub const STRICT_GAP: f64 = 1e-12;

/// A benefit (or activity) function on `[0, 1]^2` with nonnegative values.
#[derive(Debug, Clone, PartialEq)]
pub enum BenefitSpec {
    /// `scale * s1^alpha * s2^beta`
    CobbDouglas { scale: f64, alpha: f64, beta: f64 },
    /// `w1 * s1 + w2 * s2`
    Linear { w1: f64, w2: f64 },
    /// Node values on a regular lattice over `[0, 1]^2`, rows indexed by `s1`.
    Tabulated(Lattice<2>),
}

impl BenefitSpec {
    pub fn cobb_douglas(alpha: f64, beta: f64) -> Result<Self> {
        Self::scaled_cobb_douglas(1.0, alpha, beta)
    }

    pub fn scaled_cobb_douglas(scale: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "cobb_douglas exponents must be positive, got alpha={alpha}, beta={beta}"
            )));
        }
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "cobb_douglas scale must be nonnegative, got {scale}"
            )));
        }
        Ok(Self::CobbDouglas { scale, alpha, beta })
    }

    pub fn linear(w1: f64, w2: f64) -> Result<Self> {
        if !(w1.is_finite() && w1 >= 0.0 && w2.is_finite() && w2 >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "linear weights must be nonnegative, got w1={w1}, w2={w2}"
            )));
        }
        Ok(Self::Linear { w1, w2 })
    }

    /// `rows` nodes along `s1`, `cols` along `s2`, row-major values.
    pub fn tabulated(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Ok(Self::Tabulated(Lattice::new([rows, cols], [0.0; 2], [1.0; 2], values)?))
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::tabulated(2, 2, vec![value; 4])
    }

    pub fn eval(&self, s1: f64, s2: f64) -> f64 {
        match self {
            Self::CobbDouglas { scale, alpha, beta } => scale * s1.powf(*alpha) * s2.powf(*beta),
            Self::Linear { w1, w2 } => w1 * s1 + w2 * s2,
            Self::Tabulated(table) => table.eval([s1, s2]),
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match self {
            Self::CobbDouglas { scale, alpha, beta } => Self::scaled_cobb_douglas(scale * factor, *alpha, *beta),
            Self::Linear { w1, w2 } => Self::linear(w1 * factor, w2 * factor),
            Self::Tabulated(table) => Ok(Self::Tabulated(table.scaled(factor)?)),
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self, Self::Tabulated(_))
    }

    /// Checks monotonicity along every grid line in both coordinates, and on
    /// the node lattice for tabulated functions.
    fn is_monotone_on(&self, grid: &Grid, strict: bool) -> bool {
        let levels = grid.participation_levels();
        let increasing = |lo: f64, hi: f64| if strict { hi - lo > STRICT_GAP } else { hi >= lo };
        for &fixed in &levels {
            for pair in levels.windows(2) {
                if !increasing(self.eval(pair[0], fixed), self.eval(pair[1], fixed)) {
                    return false;
                }
                if !increasing(self.eval(fixed, pair[0]), self.eval(fixed, pair[1])) {
                    return false;
                }
            }
        }
        match self {
            Self::Tabulated(table) => table.is_monotone(strict, STRICT_GAP),
            _ => true,
        }
    }

    fn is_nonnegative_on(&self, grid: &Grid) -> bool {
        let levels = grid.participation_levels();
        levels.iter().all(|&a| levels.iter().all(|&b| self.eval(a, b) >= 0.0))
    }
}

/// The middleman's net income as a function of the fee pair and the
/// participation levels, before the overcharging gate.
#[derive(Debug, Clone, PartialEq)]
pub enum IncomeSpec {
    /// `(fee1 + fee2) * g(s1, s2)` for an activity measure `g`.
    Multiplicative(BenefitSpec),
    /// `fee1 + fee2`
    AdditiveFees,
    /// Node values over `(fee1, fee2, s1, s2)`; fee axes run from 0 to the
    /// table's fee maxima and are clamped beyond.
    Tabulated(Lattice<4>),
}

/// Income with participation fixed: either a multiple of the fee sum or a
/// table lookup.
enum IncomeSection<'a> {
    FeeSumTimes(f64),
    Table { table: &'a Lattice<4>, s1: f64, s2: f64 },
}

impl IncomeSection<'_> {
    fn eval(&self, fees: FeePair) -> f64 {
        match self {
            Self::FeeSumTimes(factor) => fees.sum() * factor,
            Self::Table { table, s1, s2 } => table.eval([fees.user1, fees.user2, *s1, *s2]),
        }
    }
}

impl IncomeSpec {
    /// Row-major values over `shape = [fee1 nodes, fee2 nodes, s1 nodes, s2 nodes]`.
    pub fn tabulated(shape: [usize; 4], fee_max: FeePair, values: Vec<f64>) -> Result<Self> {
        Ok(Self::Tabulated(Lattice::new(
            shape,
            [0.0; 4],
            [fee_max.user1, fee_max.user2, 1.0, 1.0],
            values,
        )?))
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::tabulated([2; 4], FeePair::new(1.0, 1.0), vec![value; 16])
    }

    pub fn eval(&self, fees: FeePair, s1: f64, s2: f64) -> f64 {
        self.at_participation(s1, s2).eval(fees)
    }

    fn at_participation(&self, s1: f64, s2: f64) -> IncomeSection<'_> {
        match self {
            Self::Multiplicative(activity) => IncomeSection::FeeSumTimes(activity.eval(s1, s2)),
            Self::AdditiveFees => IncomeSection::FeeSumTimes(1.0),
            Self::Tabulated(table) => IncomeSection::Table { table, s1, s2 },
        }
    }

    pub fn activity(&self) -> Option<&BenefitSpec> {
        match self {
            Self::Multiplicative(g) => Some(g),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameTag {
    /// Benefits satisfy strict monotonicity on the working grid.
    #[default]
    Benchmark,
    /// Benefits may vanish on the boundary (user externalities).
    Externality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HedonicGame {
    pub f1: BenefitSpec,
    pub f2: BenefitSpec,
    pub income: IncomeSpec,
    pub tag: GameTag,
}

impl HedonicGame {
    pub fn new(f1: BenefitSpec, f2: BenefitSpec, income: IncomeSpec, tag: GameTag) -> Self {
        Self { f1, f2, income, tag }
    }

    /// Both users share `f`, and the middleman weighs fees by activity `g`.
    pub fn activity(f: BenefitSpec, g: BenefitSpec, tag: GameTag) -> Self {
        Self::new(f.clone(), f, IncomeSpec::Multiplicative(g), tag)
    }

    pub fn benefit(&self, user: Player, s1: f64, s2: f64) -> f64 {
        match user {
            Player::User1 => self.f1.eval(s1, s2),
            Player::User2 => self.f2.eval(s1, s2),
            Player::Middleman => 0.0,
        }
    }

    pub fn benefits(&self, s1: f64, s2: f64) -> FeePair {
        FeePair::new(self.f1.eval(s1, s2), self.f2.eval(s1, s2))
    }

    /// Fees that extract each user's entire benefit at full participation.
    pub fn full_extraction_fees(&self) -> FeePair {
        self.benefits(1.0, 1.0)
    }

    /// Grid whose fee axes span `[0, f_i(1, 1)]`.
    pub fn grid(&self, steps: usize) -> Result<Grid> {
        Grid::new(steps, self.full_extraction_fees())
    }

    /// Tolerance that absorbs discretization error: [`ANALYTIC_EPS`] for
    /// analytic games, otherwise the largest tabulated slope times the grid
    /// step.
    pub fn suggested_eps(&self, grid: &Grid) -> f64 {
        let bounds = grid.fee_bounds();
        let fee_step = bounds.user1.max(bounds.user2) / grid.steps() as f64;
        let step = grid.participation_step().max(fee_step);
        let mut slope = 0.0f64;
        for f in [&self.f1, &self.f2] {
            if let BenefitSpec::Tabulated(t) = f {
                slope = slope.max(t.max_slope());
            }
        }
        match &self.income {
            IncomeSpec::Multiplicative(BenefitSpec::Tabulated(t)) => {
                slope = slope.max(t.max_slope() * bounds.sum());
            }
            IncomeSpec::Tabulated(t) => slope = slope.max(t.max_slope()),
            _ => {}
        }
        ANALYTIC_EPS.max(slope * step)
    }
}

/// Gate shared by the middleman's regular, optimistic and pessimistic
/// payoffs: income accrues only while neither fee exceeds its cap.
pub(crate) fn gated_income(caps: FeePair, fees: FeePair, income: f64) -> f64 {
    if fees.user1 <= caps.user1 && fees.user2 <= caps.user2 {
        income
    } else {
        0.0
    }
}

fn net_benefit(benefit: f64, fee: f64) -> f64 {
    if fee <= benefit {
        benefit - fee
    } else {
        0.0
    }
}

fn settle(caps: FeePair, fees: FeePair, income: f64) -> Payoffs {
    [
        net_benefit(caps.user1, fees.user1),
        net_benefit(caps.user2, fees.user2),
        gated_income(caps, fees, income),
    ]
}

impl GamePayoffs for HedonicGame {
    fn payoffs(&self, profile: &StrategyProfile) -> Payoffs {
        let caps = self.benefits(profile.s1, profile.s2);
        let income = self.income.eval(profile.fees, profile.s1, profile.s2);
        settle(caps, profile.fees, income)
    }

    fn at_participation<'a>(&'a self, s1: f64, s2: f64) -> Box<dyn Fn(FeePair) -> Payoffs + 'a> {
        let caps = self.benefits(s1, s2);
        let income = self.income.at_participation(s1, s2);
        Box::new(move |fees| settle(caps, fees, income.eval(fees)))
    }
}

/// User `user`'s payoff: benefit minus fee, or nothing once overcharged.
pub fn user_payoff(game: &HedonicGame, user: Player, profile: &StrategyProfile) -> Result<f64> {
    if user == Player::Middleman {
        return Err(Error::NotAUser);
    }
    let benefit = game.benefit(user, profile.s1, profile.s2);
    let fee = match user {
        Player::User1 => profile.fees.user1,
        _ => profile.fees.user2,
    };
    Ok(net_benefit(benefit, fee))
}

/// The middleman's income, gated by both fee caps.
pub fn middleman_payoff(game: &HedonicGame, profile: &StrategyProfile) -> f64 {
    let caps = game.benefits(profile.s1, profile.s2);
    gated_income(
        caps,
        profile.fees,
        game.income.eval(profile.fees, profile.s1, profile.s2),
    )
}

pub fn full_extraction_fees(game: &HedonicGame) -> FeePair {
    game.full_extraction_fees()
}

/// Strict monotonicity of a benefit function in each coordinate.
pub fn benefit_monotonicity_check(f: &BenefitSpec, grid: &Grid) -> bool {
    f.is_monotone_on(grid, true)
}

/// Weak monotonicity of the income function in all four arguments.
///
/// For the multiplicative family this reduces exactly to the activity
/// measure being nonnegative and weakly increasing on the participation
/// grid; fee sums are fee-monotone. Tabulated income is checked on its node
/// lattice, which decides monotonicity of the interpolant.
pub fn income_monotonicity_check(income: &IncomeSpec, grid: &Grid) -> bool {
    match income {
        IncomeSpec::Multiplicative(g) => g.is_nonnegative_on(grid) && g.is_monotone_on(grid, false),
        IncomeSpec::AdditiveFees => true,
        IncomeSpec::Tabulated(table) => table.is_monotone(false, 0.0),
    }
}

/// Weak monotonicity of an activity measure in each coordinate.
pub fn weakly_increasing(g: &BenefitSpec, grid: &Grid) -> bool {
    g.is_monotone_on(grid, false)
}

/// True iff every `(0, 0, fees)` is an equilibrium. Requires benefits that
/// vanish whenever one user stays out.
pub fn trivial_equilibria_check(game: &HedonicGame, fee_samples: &[FeePair], grid: &Grid, eps: f64) -> Result<bool> {
    for (name, f) in [("f1", &game.f1), ("f2", &game.f2)] {
        let (a, b) = (f.eval(0.0, 1.0), f.eval(1.0, 0.0));
        if a != 0.0 || b != 0.0 {
            return Err(Error::Precondition(format!(
                "{name}(0,1) = {a} and {name}(1,0) = {b}; both must be 0"
            )));
        }
    }
    for &fees in fee_samples {
        let profile = StrategyProfile::with_fees(0.0, 0.0, fees)?;
        if !epsilon_nash_check(game, &profile, grid, eps)? {
            return Ok(false);
        }
    }
    Ok(true)
}
