//! Scenario files: a TOML document describing the game, the middleman's
//! beliefs, the analysis grid and the requested outputs.
//!
//! ```toml
//! schema_version = 1
//!
//! [game]
//! tag = "benchmark"
//! f1 = { family = "linear", w1 = 0.5, w2 = 0.5 }
//! f2 = { family = "linear", w1 = 0.5, w2 = 0.5 }
//! income = { family = "multiplicative", activity = { family = "linear", w1 = 0.5, w2 = 0.5 } }
//!
//! [beliefs]
//! lambda = 0.0
//! gamma = 0.5
//! loyalty = [0.5, 0.5]
//!
//! [grid]
//! steps = 100
//! eps = 1e-9
//! ```
//!
//! Unknown fields are rejected. Parsing applies every default explicitly, so
//! re-emitting a parsed config and parsing it again yields the same config.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ambiguity::BeliefSystem;
use crate::game::{FeePair, Grid, ANALYTIC_EPS};
use crate::hedonic::{benefit_monotonicity_check, BenefitSpec, GameTag, HedonicGame, IncomeSpec};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_STEPS: usize = 100;
pub const DEFAULT_REGION_RESOLUTION: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// `field` is the dotted path of the single offending field.
    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            Self::Validation { field, .. } => Some(field),
            Self::Parse { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BenefitConfig {
    CobbDouglas {
        alpha: f64,
        beta: f64,
        #[serde(default = "unit_scale")]
        scale: f64,
    },
    Linear {
        w1: f64,
        w2: f64,
    },
    /// `rows` nodes along `s1` by `cols` along `s2`, row-major.
    Tabulated {
        rows: usize,
        cols: usize,
        values: Vec<f64>,
    },
}

fn unit_scale() -> f64 {
    1.0
}

impl BenefitConfig {
    fn build(&self, field: &str) -> Result<BenefitSpec, ScenarioError> {
        let built = match self {
            Self::CobbDouglas { alpha, beta, scale } => BenefitSpec::scaled_cobb_douglas(*scale, *alpha, *beta),
            Self::Linear { w1, w2 } => BenefitSpec::linear(*w1, *w2),
            Self::Tabulated { rows, cols, values } => BenefitSpec::tabulated(*rows, *cols, values.clone()),
        };
        built.map_err(|e| ScenarioError::invalid(field, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum IncomeConfig {
    Multiplicative {
        activity: BenefitConfig,
    },
    AdditiveFees,
    /// Axes are `(fee1, fee2, s1, s2)`; fee axes span `[0, fee_max]`.
    Tabulated {
        shape: [usize; 4],
        fee_max: [f64; 2],
        values: Vec<f64>,
    },
}

impl IncomeConfig {
    fn build(&self) -> Result<IncomeSpec, ScenarioError> {
        match self {
            Self::Multiplicative { activity } => {
                Ok(IncomeSpec::Multiplicative(activity.build("game.income.activity")?))
            }
            Self::AdditiveFees => Ok(IncomeSpec::AdditiveFees),
            Self::Tabulated { shape, fee_max, values } => {
                IncomeSpec::tabulated(*shape, FeePair::new(fee_max[0], fee_max[1]), values.clone())
                    .map_err(|e| ScenarioError::invalid("game.income", e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    #[serde(default)]
    pub tag: GameTag,
    pub f1: BenefitConfig,
    pub f2: BenefitConfig,
    pub income: IncomeConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeliefsConfig {
    pub lambda: f64,
    pub gamma: f64,
    pub loyalty: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    pub steps: usize,
    pub eps: f64,
    pub participation_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputsConfig {
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_svg: Option<String>,
    pub region_resolution: usize,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            verdict: true,
            region_csv: None,
            region_svg: None,
            region_resolution: DEFAULT_REGION_RESOLUTION,
        }
    }
}

/// A fully validated scenario with all defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub game: GameConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beliefs: Option<BeliefsConfig>,
    pub grid: GridConfig,
    pub outputs: OutputsConfig,
    #[serde(skip)]
    built: HedonicGame,
}

impl ScenarioConfig {
    pub fn hedonic_game(&self) -> &HedonicGame {
        &self.built
    }

    pub fn belief_system(&self) -> Option<BeliefSystem> {
        self.beliefs
            .and_then(|b| BeliefSystem::new(b.lambda, b.gamma, b.loyalty[0], b.loyalty[1]).ok())
    }

    /// Grid with fee axes spanning the full-extraction fees.
    pub fn analysis_grid(&self) -> Grid {
        build_grid(&self.built, self.grid.steps, self.grid.participation_floor)
            .expect("grid settings are validated at parse time")
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self, ScenarioError> {
        let mut next = self.clone();
        next.grid.steps = steps;
        next.revalidate()
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self, ScenarioError> {
        let mut next = self.clone();
        next.grid.eps = eps;
        next.revalidate()
    }

    pub fn with_beliefs(&self, beliefs: BeliefsConfig) -> Result<Self, ScenarioError> {
        let mut next = self.clone();
        next.beliefs = Some(beliefs);
        next.revalidate()
    }

    fn revalidate(self) -> Result<Self, ScenarioError> {
        parse_scenario(&emit_scenario(&self))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: Option<i64>,
    game: Option<GameConfig>,
    beliefs: Option<RawBeliefs>,
    grid: Option<RawGrid>,
    outputs: Option<RawOutputs>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeliefs {
    lambda: Option<f64>,
    gamma: Option<f64>,
    loyalty: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    steps: Option<i64>,
    eps: Option<f64>,
    participation_floor: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    verdict: Option<bool>,
    region_csv: Option<String>,
    region_svg: Option<String>,
    region_resolution: Option<i64>,
}

fn build_grid(game: &HedonicGame, steps: usize, floor: f64) -> crate::Result<Grid> {
    game.grid(steps)?.with_participation_floor(floor)
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn in_unit_interval(field: &str, value: f64) -> Result<f64, ScenarioError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ScenarioError::invalid(field, format!("{value} is outside [0, 1]")))
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |span| line_column(text, span.start));
        ScenarioError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;

    let game = raw.game.ok_or_else(|| ScenarioError::invalid("game", "missing game"))?;
    let schema_version = match raw.schema_version {
        None => return Err(ScenarioError::invalid("schema_version", "missing schema_version")),
        Some(v) if v == SCHEMA_VERSION as i64 => SCHEMA_VERSION,
        Some(v) => {
            return Err(ScenarioError::invalid(
                "schema_version",
                format!("unsupported schema_version {v}; expected {SCHEMA_VERSION}"),
            ))
        }
    };

    let built = HedonicGame::new(
        game.f1.build("game.f1")?,
        game.f2.build("game.f2")?,
        game.income.build()?,
        game.tag,
    );

    let beliefs = match raw.beliefs {
        None => None,
        Some(b) => {
            let lambda = in_unit_interval("beliefs.lambda", b.lambda.unwrap_or(0.0))?;
            let gamma = in_unit_interval(
                "beliefs.gamma",
                b.gamma
                    .ok_or_else(|| ScenarioError::invalid("beliefs.gamma", "missing gamma"))?,
            )?;
            let loyalty = b
                .loyalty
                .ok_or_else(|| ScenarioError::invalid("beliefs.loyalty", "missing loyalty"))?;
            in_unit_interval("beliefs.loyalty", loyalty[0])?;
            in_unit_interval("beliefs.loyalty", loyalty[1])?;
            if lambda + gamma > 1.0 {
                return Err(ScenarioError::invalid(
                    "beliefs",
                    format!("properness violated: lambda + gamma = {} > 1", lambda + gamma),
                ));
            }
            Some(BeliefsConfig { lambda, gamma, loyalty })
        }
    };

    let raw_grid = raw.grid.unwrap_or(RawGrid {
        steps: None,
        eps: None,
        participation_floor: None,
    });
    let steps = match raw_grid.steps {
        None => DEFAULT_STEPS,
        Some(s) if s >= 2 => s as usize,
        Some(s) => {
            return Err(ScenarioError::invalid(
                "grid.steps",
                format!("steps must be at least 2, got {s}"),
            ))
        }
    };
    let participation_floor = raw_grid.participation_floor.unwrap_or(0.0);
    let grid = build_grid(&built, steps, participation_floor)
        .map_err(|e| ScenarioError::invalid("grid.participation_floor", e.to_string()))?;
    let eps = match raw_grid.eps {
        Some(eps) if eps >= 0.0 && eps.is_finite() => eps,
        Some(eps) => {
            return Err(ScenarioError::invalid(
                "grid.eps",
                format!("eps must be nonnegative, got {eps}"),
            ))
        }
        None => built.suggested_eps(&grid),
    };

    if built.tag == GameTag::Benchmark {
        for (field, f) in [("game.f1", &built.f1), ("game.f2", &built.f2)] {
            if !benefit_monotonicity_check(f, &grid) {
                return Err(ScenarioError::invalid(
                    field,
                    "benchmark games need benefits strictly increasing in each argument on the grid",
                ));
            }
        }
    }

    let outputs = match raw.outputs {
        None => OutputsConfig::default(),
        Some(o) => OutputsConfig {
            verdict: o.verdict.unwrap_or(true),
            region_csv: o.region_csv,
            region_svg: o.region_svg,
            region_resolution: match o.region_resolution {
                None => DEFAULT_REGION_RESOLUTION,
                Some(r) if r >= 2 => r as usize,
                Some(r) => {
                    return Err(ScenarioError::invalid(
                        "outputs.region_resolution",
                        format!("resolution must be at least 2, got {r}"),
                    ))
                }
            },
        },
    };

    Ok(ScenarioConfig {
        schema_version,
        game,
        beliefs,
        grid: GridConfig {
            steps,
            eps,
            participation_floor,
        },
        outputs,
        built,
    })
}

/// Serializes a config back into the scenario schema.
pub fn emit_scenario(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("scenario configs always serialize")
}

/// Default tolerance for a game on a grid, as applied when `grid.eps` is absent.
pub fn default_eps(game: &HedonicGame, grid: &Grid) -> f64 {
    if [&game.f1, &game.f2].iter().any(|f| f.is_tabulated())
        || matches!(game.income, IncomeSpec::Tabulated(_))
        || game.income.activity().is_some_and(|g| g.is_tabulated())
    {
        game.suggested_eps(grid)
    } else {
        ANALYTIC_EPS
    }
}
