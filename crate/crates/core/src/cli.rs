//! The `contest` command-line tool.
//!
//! Exit status is 0 on success, 1 when `--assert` is given and the analysis
//! verdict is false, and 2 on usage or validation errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::activity::region_sample;
use crate::ambiguity::{contestation_verdict, AmbiguityGame, BeliefSystem};
use crate::game::{best_deviations, find_pareto_dominator, weak_dominance_check, Player, StrategyProfile};
use crate::report::{
    beliefs_into, deviations_into, find_crossings, region_csv, region_svg, sweep_csv, sweep_report, threshold_report,
    Report, SweepRow,
};
use crate::scenario::{parse_scenario, BeliefsConfig, ScenarioConfig, DEFAULT_REGION_RESOLUTION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "contest",
    version,
    about = "Equilibrium analysis for a contested middleman platform"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a profile for a grid Nash equilibrium of the plain game.
    VerifyNash(Common),
    /// Check whether a participation level is weakly dominant for a user.
    Dominance {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "user1")]
        player: PlayerArg,
        #[arg(long, default_value_t = 1.0)]
        candidate: f64,
    },
    /// Check a profile for Pareto optimality on the grid.
    Pareto(Common),
    /// Check a profile for a grid equilibrium under the middleman's beliefs.
    AmbiguityEq(Common),
    /// Full-exploitation verdict under the scenario's beliefs.
    Threshold(Common),
    /// Sample the benchmark full-exploitation region.
    Region(Common),
    /// Evaluate the full-exploitation verdict over a grid of belief values.
    Sweep(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Strategy profile `s1,s2,rho1,rho2`; defaults to full participation
    /// under full-extraction fees.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Exit with status 1 when the verdict is false.
    #[arg(long = "assert")]
    pub assert_verdict: bool,
    /// `field=start:stop:count`, repeatable; fields are lambda, gamma,
    /// loyalty1, loyalty2 and loyalty (both users).
    #[arg(long = "sweep")]
    pub sweeps: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlayerArg {
    User1,
    User2,
    Middleman,
}

/// A parsed `--sweep` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub field: String,
    pub values: Vec<f64>,
}

const SWEEP_FIELDS: [&str; 5] = ["lambda", "gamma", "loyalty1", "loyalty2", "loyalty"];

pub fn parse_sweep(spec: &str) -> Result<SweepAxis, String> {
    let bad = || format!("invalid --sweep `{spec}`; expected field=start:stop:count");
    let (field, range) = spec.split_once('=').ok_or_else(bad)?;
    if !SWEEP_FIELDS.contains(&field) {
        return Err(format!(
            "unknown sweep field `{field}`; expected one of {}",
            SWEEP_FIELDS.join(", ")
        ));
    }
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    let values = match count {
        0 => return Err(format!("sweep `{field}` needs at least one point")),
        1 => vec![start],
        n => (0..n)
            .map(|k| {
                if k == n - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    };
    Ok(SweepAxis {
        field: field.to_string(),
        values,
    })
}

fn parse_profile(text: &str) -> Result<StrategyProfile, String> {
    let values: Vec<f64> = text
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("invalid --profile `{text}`; expected s1,s2,rho1,rho2"))?;
    let [s1, s2, a, b] = values.as_slice() else {
        return Err(format!("invalid --profile `{text}`; expected four values"));
    };
    StrategyProfile::new(*s1, *s2, *a, *b).map_err(|e| e.to_string())
}

/// What a command produced: the document and, where the command decides a
/// yes/no question, the verdict.
struct Outcome {
    body: String,
    verdict: Option<bool>,
}

fn load(common: &Common) -> Result<ScenarioConfig, String> {
    let path = common.scenario.as_ref().ok_or("this command needs --scenario")?;
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut config = parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(steps) = common.steps {
        config = config.with_steps(steps).map_err(|e| e.to_string())?;
    }
    if let Some(eps) = common.eps {
        config = config.with_eps(eps).map_err(|e| e.to_string())?;
    }
    Ok(config)
}

fn beliefs_of(config: &ScenarioConfig) -> Result<BeliefSystem, String> {
    config
        .belief_system()
        .ok_or_else(|| "this command needs a [beliefs] section in the scenario".to_string())
}

fn profile_of(common: &Common, config: &ScenarioConfig) -> Result<StrategyProfile, String> {
    match &common.profile {
        Some(text) => parse_profile(text),
        None => StrategyProfile::with_fees(1.0, 1.0, config.hedonic_game().full_extraction_fees())
            .map_err(|e| e.to_string()),
    }
}

fn header(report: &mut Report, config: &ScenarioConfig, profile: &StrategyProfile) {
    report
        .profile("profile", profile)
        .count("steps", config.grid.steps as u64)
        .text("eps", format!("{:e}", config.grid.eps));
}

fn render(report: &Report, format: Option<Format>) -> Result<String, String> {
    match format.unwrap_or(Format::Text) {
        Format::Text => Ok(report.to_text()),
        Format::Machine => Ok(report.to_json()),
        other => Err(format!("--format {other:?} is not available for this command").to_lowercase()),
    }
}

fn finish(report: Report, common: &Common, key: &str) -> Result<Outcome, String> {
    let verdict = report.get_flag(key);
    Ok(Outcome {
        body: render(&report, common.format)?,
        verdict,
    })
}

fn verify_nash(common: &Common) -> Result<Outcome, String> {
    let config = load(common)?;
    let profile = profile_of(common, &config)?;
    let grid = config.analysis_grid();
    let deviations = best_deviations(config.hedonic_game(), &profile, &grid).map_err(|e| e.to_string())?;
    let mut report = Report::new();
    header(&mut report, &config, &profile);
    report.flag("nash_equilibrium", deviations.iter().all(|d| d.gain <= config.grid.eps));
    deviations_into(&mut report, &deviations);
    finish(report, common, "nash_equilibrium")
}

fn dominance(common: &Common, player: PlayerArg, candidate: f64) -> Result<Outcome, String> {
    let config = load(common)?;
    let player = match player {
        PlayerArg::User1 => Player::User1,
        PlayerArg::User2 => Player::User2,
        PlayerArg::Middleman => return Err("dominance is defined for users only".into()),
    };
    let grid = config.analysis_grid();
    let dominant = weak_dominance_check(config.hedonic_game(), player, candidate, &grid, config.grid.eps)
        .map_err(|e| e.to_string())?;
    let mut report = Report::new();
    report
        .text("player", player.to_string())
        .num("candidate", candidate)
        .count("steps", config.grid.steps as u64)
        .text("eps", format!("{:e}", config.grid.eps))
        .flag("weakly_dominant", dominant);
    finish(report, common, "weakly_dominant")
}

fn pareto(common: &Common) -> Result<Outcome, String> {
    let config = load(common)?;
    let profile = profile_of(common, &config)?;
    let grid = config.analysis_grid();
    let dominator =
        find_pareto_dominator(config.hedonic_game(), &profile, &grid, config.grid.eps).map_err(|e| e.to_string())?;
    let mut report = Report::new();
    header(&mut report, &config, &profile);
    report.flag("pareto_optimal", dominator.is_none());
    if let Some(q) = dominator {
        report.profile("dominated_by", &q);
    }
    finish(report, common, "pareto_optimal")
}

fn ambiguity_eq(common: &Common) -> Result<Outcome, String> {
    let config = load(common)?;
    let beliefs = beliefs_of(&config)?;
    let profile = profile_of(common, &config)?;
    let grid = config.analysis_grid();
    let modified = AmbiguityGame::new(config.hedonic_game(), beliefs).map_err(|e| e.to_string())?;
    let deviations = best_deviations(&modified, &profile, &grid).map_err(|e| e.to_string())?;
    let mut report = Report::new();
    beliefs_into(&mut report, &beliefs);
    header(&mut report, &config, &profile);
    report.flag(
        "ambiguity_equilibrium",
        deviations.iter().all(|d| d.gain <= config.grid.eps),
    );
    deviations_into(&mut report, &deviations);
    finish(report, common, "ambiguity_equilibrium")
}

fn threshold(common: &Common) -> Result<Outcome, String> {
    let config = load(common)?;
    let beliefs = beliefs_of(&config)?;
    let game = config.hedonic_game();
    let verdict = contestation_verdict(game, &beliefs).map_err(|e| e.to_string())?;
    let report = threshold_report(game, &beliefs, &verdict, &config.analysis_grid(), config.grid.eps)
        .map_err(|e| e.to_string())?;
    finish(report, common, "full_exploitation")
}

fn region(common: &Common) -> Result<Outcome, String> {
    let config = common.scenario.as_ref().map(|_| load(common)).transpose()?;
    let resolution = common
        .resolution
        .or(config.as_ref().map(|c| c.outputs.region_resolution))
        .unwrap_or(DEFAULT_REGION_RESOLUTION);
    let samples = region_sample(resolution).map_err(|e| e.to_string())?;
    let body = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => region_csv(&samples),
        Format::Svg => region_svg(&samples, resolution),
        format => {
            let shaded = samples.iter().filter(|s| s.full_exploitation).count();
            let mut report = Report::new();
            report
                .count("resolution", resolution as u64)
                .count("samples", samples.len() as u64)
                .count("full_exploitation_samples", shaded as u64)
                .num("shaded_fraction", shaded as f64 / samples.len() as f64);
            render(&report, Some(format))?
        }
    };
    Ok(Outcome { body, verdict: None })
}

/// Beliefs with one swept field replaced.
fn apply(base: BeliefsConfig, field: &str, value: f64) -> BeliefsConfig {
    let mut next = base;
    match field {
        "lambda" => next.lambda = value,
        "gamma" => next.gamma = value,
        "loyalty1" => next.loyalty[0] = value,
        "loyalty2" => next.loyalty[1] = value,
        _ => next.loyalty = [value, value],
    }
    next
}

fn sweep(common: &Common) -> Result<Outcome, String> {
    let config = load(common)?;
    let base = config
        .beliefs
        .ok_or("sweep needs a [beliefs] section in the scenario")?;
    let axes: Vec<SweepAxis> = common.sweeps.iter().map(|s| parse_sweep(s)).collect::<Result<_, _>>()?;
    if axes.is_empty() {
        return Err("sweep needs at least one --sweep field=start:stop:count".into());
    }
    let fields: Vec<String> = axes.iter().map(|a| a.field.clone()).collect();

    // Cartesian product, first axis slowest.
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let mut rows = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rest = flat;
        let mut coordinates = vec![0.0; axes.len()];
        for (i, axis) in axes.iter().enumerate().rev() {
            coordinates[i] = axis.values[rest % axis.values.len()];
            rest /= axis.values.len();
        }
        let point = axes
            .iter()
            .zip(&coordinates)
            .fold(base, |b, (axis, &v)| apply(b, &axis.field, v));
        let beliefs = BeliefSystem::new(point.lambda, point.gamma, point.loyalty[0], point.loyalty[1])
            .map_err(|e| format!("sweep point {coordinates:?}: {e}"))?;
        let verdict = contestation_verdict(config.hedonic_game(), &beliefs)
            .map_err(|e| format!("sweep point {coordinates:?}: {e}"))?;
        rows.push(SweepRow { coordinates, verdict });
    }

    let crossings = find_crossings(&fields, &rows, axes.last().map_or(1, |a| a.values.len()));
    let verdict = Some(rows.iter().all(|r| r.verdict.full_exploitation));
    let body = match common.format.unwrap_or(Format::Text) {
        Format::Csv => sweep_csv(&fields, &rows),
        format => render(&sweep_report(&fields, &rows, &crossings), Some(format))?,
    };
    Ok(Outcome { body, verdict })
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };

    let (common, outcome) = match &cli.command {
        Command::VerifyNash(c) => (c, verify_nash(c)),
        Command::Dominance {
            common,
            player,
            candidate,
        } => (common, dominance(common, *player, *candidate)),
        Command::Pareto(c) => (c, pareto(c)),
        Command::AmbiguityEq(c) => (c, ambiguity_eq(c)),
        Command::Threshold(c) => (c, threshold(c)),
        Command::Region(c) => (c, region(c)),
        Command::Sweep(c) => (c, sweep(c)),
    };
    let outcome = match outcome {
        Ok(outcome) => outcome,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            return EXIT_USAGE;
        }
    };

    let written = match &common.out {
        Some(path) => fs::write(path, &outcome.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(outcome.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(message) = written {
        let _ = writeln!(err, "error: {message}");
        return EXIT_USAGE;
    }

    match (common.assert_verdict, outcome.verdict) {
        (true, Some(false)) => EXIT_FALSE,
        _ => EXIT_OK,
    }
}
