use std::fs;
use std::path::PathBuf;

use contestability::scenario::{emit_scenario, parse_scenario, ScenarioError};
use proptest::prelude::*;

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn benefit_text() -> impl Strategy<Value = String> {
    prop_oneof![
        (0.5f64..2.0, 0.5f64..2.0, 0.1f64..3.0).prop_map(|(a, b, c)| format!(
            r#"{{ family = "cobb_douglas", alpha = {a:?}, beta = {b:?}, scale = {c:?} }}"#
        )),
        (0.01f64..1.0, 0.01f64..1.0)
            .prop_map(|(w1, w2)| format!(r#"{{ family = "linear", w1 = {w1:?}, w2 = {w2:?} }}"#)),
        proptest::collection::vec(0.0f64..5.0, 9).prop_map(|mut v| {
            // sort so rows and columns increase
            v.sort_by(f64::total_cmp);
            let cells = [v[0], v[1], v[3], v[2], v[4], v[6], v[5], v[7], v[8]];
            let body: Vec<String> = cells.iter().map(|x| format!("{x:?}")).collect();
            format!(
                r#"{{ family = "tabulated", rows = 3, cols = 3, values = [{}] }}"#,
                body.join(", ")
            )
        }),
    ]
}

fn income_text() -> impl Strategy<Value = String> {
    prop_oneof![
        benefit_text().prop_map(|g| format!(r#"{{ family = "multiplicative", activity = {g} }}"#)),
        Just(r#"{ family = "additive_fees" }"#.to_string()),
        (proptest::collection::vec(0.0f64..3.0, 16), 0.5f64..2.0).prop_map(|(v, m)| {
            let body: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
            format!(
                r#"{{ family = "tabulated", shape = [2, 2, 2, 2], fee_max = [{m:?}, {m:?}], values = [{}] }}"#,
                body.join(", ")
            )
        }),
    ]
}

fn document() -> impl Strategy<Value = String> {
    (
        benefit_text(),
        benefit_text(),
        income_text(),
        proptest::option::of((0.0f64..0.5, 0.0f64..0.5, 0.0f64..1.0, 0.0f64..1.0)),
        proptest::option::of(2usize..200),
        proptest::option::of(0.0f64..1e-3),
        proptest::option::of((any::<bool>(), 2usize..300)),
    )
        .prop_map(|(f1, f2, income, beliefs, steps, eps, outputs)| {
            let mut text = format!(
                "schema_version = 1\n\n[game]\ntag = \"externality\"\nf1 = {f1}\nf2 = {f2}\nincome = {income}\n"
            );
            if let Some((lambda, gamma, a, b)) = beliefs {
                text += &format!("\n[beliefs]\nlambda = {lambda:?}\ngamma = {gamma:?}\nloyalty = [{a:?}, {b:?}]\n");
            }
            text += "\n[grid]\n";
            if let Some(steps) = steps {
                text += &format!("steps = {steps}\n");
            }
            if let Some(eps) = eps {
                text += &format!("eps = {eps:?}\n");
            }
            if let Some((verdict, resolution)) = outputs {
                text += &format!(
                    "\n[outputs]\nverdict = {verdict}\nregion_csv = \"region.csv\"\nregion_resolution = {resolution}\n"
                );
            }
            text
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn emitted_configs_parse_back_unchanged(text in document()) {
        let config = parse_scenario(&text).unwrap();
        let emitted = emit_scenario(&config);
        let again = parse_scenario(&emitted).unwrap();
        prop_assert_eq!(&config, &again);
        prop_assert_eq!(emitted, emit_scenario(&again));
    }
}

#[test]
fn shipped_scenarios_parse_and_round_trip() {
    let mut count = 0;
    for entry in fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let config = parse_scenario(&fs::read_to_string(&path).unwrap()).unwrap();
            assert_eq!(
                parse_scenario(&emit_scenario(&config)).unwrap(),
                config,
                "{}",
                path.display()
            );
            count += 1;
        }
    }
    assert!(count >= 3);
}

#[test]
fn parse_errors_carry_a_location() {
    let text = "schema_version = 1\n[game]\nf1 = { family = \"linear\", w1 = 0.5 w2 = 0.5 }\n";
    match parse_scenario(text) {
        Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let text = "schema_version = 1\n[game]\nf1 = { family = \"quadratic\" }\n";
    match parse_scenario(text) {
        Err(ScenarioError::Parse { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("quadratic"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_top_level_sections_are_rejected() {
    let text = fs::read_to_string(scenario_dir().join("worked_half.toml")).unwrap() + "\n[plots]\nwidth = 3\n";
    assert!(matches!(parse_scenario(&text), Err(ScenarioError::Parse { .. })));
}
