use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .display()
        .to_string()
}

fn contest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contest")).args(args).output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn value(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
        .to_string()
}

#[test]
fn threshold_report_matches_the_golden_file() {
    let out = contest(&["threshold", "--scenario", &scenario("worked_half.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let golden = fs::read_to_string(scenario("worked_half.threshold.txt")).unwrap();
    assert_eq!(stdout(&out), golden);
    assert_eq!(value(&golden, "delta"), "1.000000");
    assert_eq!(value(&golden, "rhs"), "0.500000");
    assert_eq!(value(&golden, "full_exploitation"), "true");
}

#[test]
fn reports_are_byte_stable() {
    for args in [
        vec!["threshold", "--scenario", "S", "--format", "machine"],
        vec![
            "sweep",
            "--scenario",
            "S",
            "--sweep",
            "gamma=0:0.99:100",
            "--format",
            "csv",
        ],
        vec!["region", "--resolution", "20", "--format", "svg"],
    ] {
        let path = scenario("worked_half.toml");
        let args: Vec<&str> = args.iter().map(|a| if *a == "S" { path.as_str() } else { a }).collect();
        let (a, b) = (contest(&args), contest(&args));
        assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn machine_format_is_json_with_the_same_fields() {
    let out = contest(&[
        "threshold",
        "--scenario",
        &scenario("worked_half.toml"),
        "--format",
        "machine",
    ]);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["delta"], 1.0);
    assert_eq!(json["rhs"], 0.5);
    assert_eq!(json["full_exploitation"], true);
    assert_eq!(json["loyalty_fee1"], 0.5);
}

#[test]
fn verify_nash_assert_exit_codes() {
    let s = scenario("worked_half.toml");
    assert_eq!(
        contest(&["verify-nash", "--scenario", &s, "--profile", "1,1,1,1", "--assert"])
            .status
            .code(),
        Some(0)
    );
    let under = contest(&["verify-nash", "--scenario", &s, "--profile", "1,1,0.5,0.5", "--assert"]);
    assert_eq!(under.status.code(), Some(1));
    assert_eq!(value(&stdout(&under), "nash_equilibrium"), "false");
    // without --assert a false verdict still exits 0
    assert_eq!(
        contest(&["verify-nash", "--scenario", &s, "--profile", "1,1,0.5,0.5"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn ambiguity_equilibrium_flips_with_pessimism() {
    let dir = tempfile::tempdir().unwrap();
    let gloomy = dir.path().join("gloomy.toml");
    let text = fs::read_to_string(scenario("worked_half.toml"))
        .unwrap()
        .replace("gamma = 0.5", "gamma = 0.8");
    fs::write(&gloomy, text).unwrap();
    let g = gloomy.display().to_string();
    let full = contest(&[
        "ambiguity-eq",
        "--scenario",
        &g,
        "--steps",
        "20",
        "--profile",
        "1,1,1,1",
        "--assert",
    ]);
    assert_eq!(full.status.code(), Some(1));
    let loyal = contest(&[
        "ambiguity-eq",
        "--scenario",
        &g,
        "--steps",
        "20",
        "--profile",
        "1,1,0.5,0.5",
        "--assert",
    ]);
    assert_eq!(loyal.status.code(), Some(0), "{}", stdout(&loyal));
    let threshold = contest(&["threshold", "--scenario", &g, "--assert"]);
    assert_eq!(threshold.status.code(), Some(1));
    assert_eq!(value(&stdout(&threshold), "rhs"), "2.000000");
}

#[test]
fn dominance_and_pareto() {
    let s = scenario("product_floor.toml");
    for player in ["user1", "user2"] {
        let out = contest(&[
            "dominance",
            "--scenario",
            &s,
            "--player",
            player,
            "--steps",
            "10",
            "--assert",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    }
    let low = contest(&[
        "dominance",
        "--scenario",
        &scenario("worked_half.toml"),
        "--candidate",
        "0",
        "--steps",
        "10",
        "--assert",
    ]);
    assert_eq!(low.status.code(), Some(1));
    assert_eq!(
        contest(&["dominance", "--scenario", &s, "--player", "middleman"])
            .status
            .code(),
        Some(2)
    );

    let w = scenario("worked_half.toml");
    assert_eq!(
        contest(&["pareto", "--scenario", &w, "--steps", "10", "--assert"])
            .status
            .code(),
        Some(0)
    );
    let idle = contest(&[
        "pareto",
        "--scenario",
        &w,
        "--steps",
        "10",
        "--profile",
        "0,0,0,0",
        "--assert",
    ]);
    assert_eq!(idle.status.code(), Some(1));
    assert!(stdout(&idle).contains("dominated_by="));
}

#[test]
fn region_writes_the_full_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("region.csv");
    let out = contest(&["region", "--resolution", "100", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,sigma,full_exploitation"));
    assert_eq!(lines.count(), 101 * 101);

    let svg = dir.path().join("region.svg");
    assert_eq!(
        contest(&[
            "region",
            "--resolution",
            "50",
            "--format",
            "svg",
            "--out",
            svg.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));

    let summary = contest(&["region", "--resolution", "2", "--format", "text"]);
    assert_eq!(value(&stdout(&summary), "samples"), "9");
}

#[test]
fn sweep_brackets_the_boundary_once() {
    let out = contest(&[
        "sweep",
        "--scenario",
        &scenario("worked_half.toml"),
        "--sweep",
        "gamma=0:0.99:100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(value(&report, "crossings"), "1");
    assert_eq!(value(&report, "crossing1_direction"), "true_to_false");
    let lower: f64 = value(&report, "crossing1_lower").parse().unwrap();
    let upper: f64 = value(&report, "crossing1_upper").parse().unwrap();
    assert!(lower <= 2.0 / 3.0 && 2.0 / 3.0 <= upper, "[{lower}, {upper}]");
}

#[test]
fn sweep_over_two_fields_follows_declaration_order() {
    let out = contest(&[
        "sweep",
        "--scenario",
        &scenario("worked_half.toml"),
        "--sweep",
        "loyalty=0:0.8:3",
        "--sweep",
        "gamma=0:0.9:4",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(
        text.lines().next(),
        Some("loyalty,gamma,delta,rhs,slack,full_exploitation")
    );
    assert_eq!(rows.len(), 12);
    assert_eq!((rows[0][0], rows[0][1]), ("0.000000", "0.000000"));
    assert_eq!((rows[1][0], rows[1][1]), ("0.000000", "0.300000"));
    assert_eq!((rows[4][0], rows[4][1]), ("0.400000", "0.000000"));
    assert_eq!((rows[11][0], rows[11][1]), ("0.800000", "0.900000"));
}

#[test]
fn usage_and_validation_errors_exit_two() {
    let s = scenario("worked_half.toml");
    let no_beliefs = scenario("externality.toml");
    let cases: Vec<Vec<&str>> = vec![
        vec!["threshold", "--scenario", &s, "--bogus"],
        vec!["frobnicate"],
        vec![],
        vec!["threshold"],
        vec!["threshold", "--scenario", "/nonexistent/scenario.toml"],
        vec!["threshold", "--scenario", &s, "--steps", "1"],
        vec!["threshold", "--scenario", &s, "--eps", "-1"],
        vec!["threshold", "--scenario", &s, "--format", "csv"],
        vec!["verify-nash", "--scenario", &s, "--profile", "1,1"],
        vec!["sweep", "--scenario", &s],
        vec!["sweep", "--scenario", &s, "--sweep", "lambda=0:0.9:4"],
        vec!["sweep", "--scenario", &s, "--sweep", "gamma=0:1:3"],
        vec!["threshold", "--scenario", &no_beliefs],
    ];
    for args in &cases {
        let out = contest(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stdout(&out));
        assert!(!stderr(&out).is_empty(), "{args:?}");
    }
    assert!(stderr(&contest(&["threshold", "--bogus"])).contains("Usage"));
}

#[test]
fn invalid_scenarios_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = fs::read_to_string(scenario("worked_half.toml"))
        .unwrap()
        .replace("lambda = 0.0", "lambda = 0.8");
    fs::write(&path, text).unwrap();
    let out = contest(&["threshold", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("properness violated"), "{}", stderr(&out));
}

#[test]
fn unwritable_output_is_an_error() {
    let out = contest(&["region", "--resolution", "2", "--out", "/nonexistent/dir/region.csv"]);
    assert_eq!(out.status.code(), Some(2));
}
