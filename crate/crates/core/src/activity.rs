//! Activity-level specialization: the middleman's income is the fee sum
//! weighted by a perceived activity measure `g(s1, s2)`.
//!
//! In the normalized benchmark (full-participation benefits and activity all
//! equal to 1, a common residual level `sigma` at the loyalty point) the
//! full-exploitation condition depends only on the degree of pessimism and
//! `sigma`, which is what [`region_sample`] maps out.

use serde::Serialize;

use crate::ambiguity::BeliefSystem;
use crate::error::{Error, Result};
use crate::game::Grid;
use crate::hedonic::{weakly_increasing, BenefitSpec, HedonicGame, IncomeSpec};

/// Weak monotonicity of an activity measure in each coordinate.
pub fn activity_monotonicity_check(g: &BenefitSpec, grid: &Grid) -> bool {
    weakly_increasing(g, grid)
}

/// Outcome of the ratio-form full-exploitation condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ActivityVerdict {
    Ratio {
        lhs: f64,
        rhs: f64,
        full_exploitation: bool,
    },
    /// Pessimistic fee sum or residual activity is zero. The pessimistic
    /// income vanishes, so full exploitation holds trivially.
    ZeroPessimisticIncome,
}

impl ActivityVerdict {
    pub fn full_exploitation(&self) -> bool {
        match self {
            Self::Ratio { full_exploitation, .. } => *full_exploitation,
            Self::ZeroPessimisticIncome => true,
        }
    }
}

/// Evaluates
/// `(f_hat / phi_hat - 1) * g(1,1) / g(loyalty) >= pessimism / (1 - pessimism)`
/// where `f_hat` and `phi_hat` are the fee sums at full and loyalty
/// participation.
pub fn activity_verdict(game: &HedonicGame, beliefs: &BeliefSystem) -> Result<ActivityVerdict> {
    let IncomeSpec::Multiplicative(g) = &game.income else {
        return Err(Error::Precondition(
            "income must be of the multiplicative family".into(),
        ));
    };
    beliefs.validate_contestable()?;
    let [a, b] = beliefs.loyalty;

    let full_sum = game.full_extraction_fees().sum();
    let loyal_sum = game.benefits(a, b).sum();
    let residual = g.eval(a, b);
    if loyal_sum == 0.0 || residual == 0.0 {
        return Ok(ActivityVerdict::ZeroPessimisticIncome);
    }

    let lhs = (full_sum / loyal_sum - 1.0) * (g.eval(1.0, 1.0) / residual);
    let rhs = beliefs.pessimism / (1.0 - beliefs.pessimism);
    Ok(ActivityVerdict::Ratio {
        lhs,
        rhs,
        full_exploitation: lhs >= rhs,
    })
}

/// The ratio-form condition as a boolean. Errors on the zero set where the
/// ratio is undefined; use [`activity_verdict`] to get the trivial verdict
/// there instead.
pub fn activity_condition(game: &HedonicGame, beliefs: &BeliefSystem) -> Result<bool> {
    match activity_verdict(game, beliefs)? {
        ActivityVerdict::Ratio { full_exploitation, .. } => Ok(full_exploitation),
        ActivityVerdict::ZeroPessimisticIncome => Err(Error::ZeroPessimisticIncome(format!(
            "loyalty ({}, {})",
            beliefs.loyalty[0], beliefs.loyalty[1]
        ))),
    }
}

/// A point of the normalized benchmark: degree of pessimism and residual
/// activity level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkPoint {
    pub gamma: f64,
    pub sigma: f64,
}

impl BenchmarkPoint {
    pub fn new(gamma: f64, sigma: f64) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("sigma", sigma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Precondition(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(Self { gamma, sigma })
    }
}

/// `(1 - gamma)(1 - sigma) >= gamma * sigma^2`
pub fn benchmark_condition(point: BenchmarkPoint) -> bool {
    let BenchmarkPoint { gamma, sigma } = point;
    (1.0 - gamma) * (1.0 - sigma) >= gamma * sigma * sigma
}

/// Largest degree of pessimism at which full exploitation still holds for
/// residual level `sigma`: `(1 - sigma) / (1 - sigma + sigma^2)`. The
/// denominator is at least 3/4 on `[0, 1]`.
pub fn boundary_curve(sigma: f64) -> f64 {
    (1.0 - sigma) / (1.0 - sigma + sigma * sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSample {
    pub point: BenchmarkPoint,
    pub full_exploitation: bool,
    /// `gamma = 1` or `sigma = 1`: the inequality is still evaluated, but the
    /// equilibrium characterization assumes pessimism below 1 and strictly
    /// increasing benefits, so the verdict carries no equilibrium meaning.
    pub outside_hypotheses: bool,
}

/// Evaluates the benchmark condition on the `(resolution + 1)^2` lattice
/// over the unit square, `gamma` in the outer loop and `sigma` inner.
pub fn region_sample(resolution: usize) -> Result<Vec<RegionSample>> {
    if resolution < 2 {
        return Err(Error::ResolutionTooCoarse(resolution));
    }
    let coord = |k: usize| {
        if k == resolution {
            1.0
        } else {
            k as f64 / resolution as f64
        }
    };
    let mut samples = Vec::with_capacity((resolution + 1) * (resolution + 1));
    for i in 0..=resolution {
        for j in 0..=resolution {
            let point = BenchmarkPoint {
                gamma: coord(i),
                sigma: coord(j),
            };
            samples.push(RegionSample {
                point,
                full_exploitation: benchmark_condition(point),
                outside_hypotheses: point.gamma >= 1.0 || point.sigma >= 1.0,
            });
        }
    }
    Ok(samples)
}

/// Share of samples in the full-exploitation region.
pub fn shaded_fraction(samples: &[RegionSample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|s| s.full_exploitation).count() as f64 / samples.len() as f64
}
