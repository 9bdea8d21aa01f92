//! Result documents. Every number is printed with six decimals so identical
//! inputs give byte-identical output.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::activity::{activity_verdict, boundary_curve, ActivityVerdict, RegionSample};
use crate::ambiguity::{fee_scan, BeliefSystem, ContestationVerdict};
use crate::error::Result;
use crate::game::{Deviation, FeePair, Grid, StrategyProfile};
use crate::hedonic::{benefit_monotonicity_check, income_monotonicity_check, GameTag, HedonicGame, IncomeSpec};

/// Six-decimal rendering with negative zero folded into zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Entry {
    Num(f64),
    Flag(bool),
    Count(u64),
    Text(String),
}

/// An ordered list of named results.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    entries: Vec<(String, Entry)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, Entry::Num(value))
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.push(key, Entry::Flag(value))
    }

    pub fn count(&mut self, key: &str, value: u64) -> &mut Self {
        self.push(key, Entry::Count(value))
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.push(key, Entry::Text(value.into()))
    }

    pub fn fees(&mut self, key: &str, fees: FeePair) -> &mut Self {
        self.num(&format!("{key}1"), fees.user1)
            .num(&format!("{key}2"), fees.user2)
    }

    pub fn profile(&mut self, key: &str, p: &StrategyProfile) -> &mut Self {
        self.text(
            key,
            format!(
                "{},{},{},{}",
                fmt6(p.s1),
                fmt6(p.s2),
                fmt6(p.fees.user1),
                fmt6(p.fees.user2)
            ),
        )
    }

    fn push(&mut self, key: &str, entry: Entry) -> &mut Self {
        self.entries.push((key.to_string(), entry));
        self
    }

    pub fn get_flag(&self, key: &str) -> Option<bool> {
        self.entries.iter().find_map(|(k, e)| match e {
            Entry::Flag(b) if k == key => Some(*b),
            _ => None,
        })
    }

    /// One `key=value` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, entry) in &self.entries {
            let value = match entry {
                Entry::Num(x) => fmt6(*x),
                Entry::Flag(b) => b.to_string(),
                Entry::Count(n) => n.to_string(),
                Entry::Text(s) => s.clone(),
            };
            let _ = writeln!(out, "{key}={value}");
        }
        out
    }

    /// A flat JSON object with the same keys, numbers rounded to six decimals.
    pub fn to_json(&self) -> String {
        let mut map = Map::new();
        for (key, entry) in &self.entries {
            let value = match entry {
                Entry::Num(x) => {
                    let rounded: f64 = fmt6(*x).parse().unwrap_or(*x);
                    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
                }
                Entry::Flag(b) => Value::Bool(*b),
                Entry::Count(n) => Value::from(*n),
                Entry::Text(s) => Value::String(s.clone()),
            };
            map.insert(key.clone(), value);
        }
        let mut out = serde_json::to_string_pretty(&Value::Object(map)).expect("plain values serialize");
        out.push('\n');
        out
    }
}

pub fn beliefs_into(report: &mut Report, beliefs: &BeliefSystem) {
    report
        .num("lambda", beliefs.optimism)
        .num("gamma", beliefs.pessimism)
        .num("loyalty1", beliefs.loyalty[0])
        .num("loyalty2", beliefs.loyalty[1]);
}

pub fn verdict_into(report: &mut Report, verdict: &ContestationVerdict) {
    report
        .fees("full_fee", verdict.full_fees)
        .fees("loyalty_fee", verdict.loyalty_fees)
        .num("delta", verdict.delta)
        .num("rhs", verdict.rhs)
        .num("slack", verdict.slack())
        .flag("full_exploitation", verdict.full_exploitation);
}

/// Full-exploitation report: the verdict, the hypotheses it rests on, a
/// scan of the fee grid at full participation and, for activity-weighted
/// income, the ratio form.
pub fn threshold_report(
    game: &HedonicGame,
    beliefs: &BeliefSystem,
    verdict: &ContestationVerdict,
    grid: &Grid,
    eps: f64,
) -> Result<Report> {
    let mut report = Report::new();
    beliefs_into(&mut report, beliefs);
    verdict_into(&mut report, verdict);

    let strict = benefit_monotonicity_check(&game.f1, grid) && benefit_monotonicity_check(&game.f2, grid);
    report
        .text(
            "tag",
            if game.tag == GameTag::Benchmark {
                "benchmark"
            } else {
                "externality"
            },
        )
        .flag("benefits_strictly_increasing", strict)
        .flag(
            "income_weakly_increasing",
            income_monotonicity_check(&game.income, grid),
        );

    let scan = fee_scan(game, beliefs, grid, eps)?;
    report
        .count("scan_steps", grid.steps() as u64)
        .fees("scan_best_fee", scan.best_fees)
        .num("scan_best_value", scan.best_value)
        .flag("third_fee_wins", scan.third_fee_wins);

    if matches!(game.income, IncomeSpec::Multiplicative(_)) {
        match activity_verdict(game, beliefs)? {
            ActivityVerdict::Ratio {
                lhs,
                rhs,
                full_exploitation,
            } => {
                report
                    .text("ratio_form", "defined")
                    .num("ratio_lhs", lhs)
                    .num("ratio_rhs", rhs)
                    .flag("ratio_full_exploitation", full_exploitation);
            }
            ActivityVerdict::ZeroPessimisticIncome => {
                report.text("ratio_form", "zero_pessimistic_income");
            }
        }
    }
    Ok(report)
}

pub fn deviations_into(report: &mut Report, deviations: &[Deviation; 3]) {
    for d in deviations {
        let key = match d.player.index() {
            0 => "user1",
            1 => "user2",
            _ => "middleman",
        };
        report.num(&format!("{key}_best_gain"), d.gain);
        report.profile(&format!("{key}_best_deviation"), &d.profile);
    }
}

/// `gamma,sigma,full_exploitation` rows in sampling order.
pub fn region_csv(samples: &[RegionSample]) -> String {
    let mut out = String::from("gamma,sigma,full_exploitation\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt6(s.point.gamma),
            fmt6(s.point.sigma),
            s.full_exploitation
        );
    }
    out
}

/// Region plot with `sigma` on the horizontal axis and `gamma` vertical:
/// sampled points in the region as dots, the region below the boundary
/// curve shaded and the curve drawn as a polyline.
pub fn region_svg(samples: &[RegionSample], resolution: usize) -> String {
    const SIZE: f64 = 400.0;
    const MARGIN: f64 = 40.0;
    let x = |sigma: f64| fmt6(MARGIN + sigma * SIZE);
    let y = |gamma: f64| fmt6(MARGIN + (1.0 - gamma) * SIZE);
    let total = fmt6(SIZE + 2.0 * MARGIN);

    let curve: Vec<String> = (0..=resolution)
        .map(|k| {
            let sigma = k as f64 / resolution as f64;
            format!("{},{}", x(sigma), y(boundary_curve(sigma)))
        })
        .collect();

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white" stroke="black"/>"#,
        x(0.0),
        y(1.0),
        fmt6(SIZE),
        fmt6(SIZE)
    );
    let _ = writeln!(
        out,
        r#"<polygon points="{},{} {} {},{}" fill="steelblue" fill-opacity="0.3"/>"#,
        x(0.0),
        y(0.0),
        curve.join(" "),
        x(1.0),
        y(0.0)
    );
    let _ = writeln!(out, r#"<g fill="steelblue">"#);
    for s in samples.iter().filter(|s| s.full_exploitation) {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="1"/>"#,
            x(s.point.sigma),
            y(s.point.gamma)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        curve.join(" ")
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">sigma</text>"#,
        x(0.5),
        fmt6(SIZE + 1.75 * MARGIN)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">gamma</text>"#,
        fmt6(MARGIN / 2.0),
        y(0.5)
    );
    out.push_str("</svg>\n");
    out
}

/// One evaluated point of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Swept field values in declaration order.
    pub coordinates: Vec<f64>,
    pub verdict: ContestationVerdict,
}

/// A change of verdict between consecutive points along the last sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub field: String,
    /// Coordinates of the other swept fields.
    pub fixed: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub from: bool,
}

/// Rows are ordered with the last field varying fastest, so each run of
/// `axis_len` rows is a line along the last field.
pub fn find_crossings(fields: &[String], rows: &[SweepRow], axis_len: usize) -> Vec<Crossing> {
    let Some(field) = fields.last() else {
        return Vec::new();
    };
    let last = fields.len() - 1;
    let mut crossings = Vec::new();
    for line in rows.chunks(axis_len.max(1)) {
        for pair in line.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.verdict.full_exploitation != b.verdict.full_exploitation {
                crossings.push(Crossing {
                    field: field.clone(),
                    fixed: a.coordinates[..last].to_vec(),
                    lower: a.coordinates[last],
                    upper: b.coordinates[last],
                    from: a.verdict.full_exploitation,
                });
            }
        }
    }
    crossings
}

pub fn sweep_csv(fields: &[String], rows: &[SweepRow]) -> String {
    let mut out = fields.join(",");
    out.push_str(",delta,rhs,slack,full_exploitation\n");
    for row in rows {
        for c in &row.coordinates {
            let _ = write!(out, "{},", fmt6(*c));
        }
        let v = &row.verdict;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt6(v.delta),
            fmt6(v.rhs),
            fmt6(v.slack()),
            v.full_exploitation
        );
    }
    out
}

pub fn sweep_report(fields: &[String], rows: &[SweepRow], crossings: &[Crossing]) -> Report {
    let mut report = Report::new();
    report
        .text("fields", fields.join(","))
        .count("points", rows.len() as u64)
        .count(
            "full_exploitation_points",
            rows.iter().filter(|r| r.verdict.full_exploitation).count() as u64,
        )
        .count("crossings", crossings.len() as u64);
    for (i, c) in crossings.iter().enumerate() {
        let prefix = format!("crossing{}", i + 1);
        let fixed: Vec<String> = c.fixed.iter().map(|v| fmt6(*v)).collect();
        report
            .text(&format!("{prefix}_field"), c.field.clone())
            .text(&format!("{prefix}_fixed"), fixed.join(","))
            .num(&format!("{prefix}_lower"), c.lower)
            .num(&format!("{prefix}_upper"), c.upper)
            .text(
                &format!("{prefix}_direction"),
                if c.from { "true_to_false" } else { "false_to_true" },
            );
    }
    report
}
