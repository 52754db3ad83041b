use std::path::PathBuf;
use std::process::Command as Process;

use glsm_lab::analyzer::{Epsilon, ModelInput};
use glsm_lab::poly::Polynomial;
use glsm_lab::rational::ratio;
use glsm_lab::{IntMatrix, RatVector};
use glsm_lab_cli::model_file::ModelFile;
use glsm_lab_cli::{emit, run, CliError, Command, Format, Options};
use proptest::prelude::*;
use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", &format!("{name}.toml")].iter().collect();
    p.to_string_lossy().into_owned()
}

const FIXTURES: [&str; 6] =
    ["quintic_geometric", "quintic_lg", "two_cubics_geometric", "two_cubics_lg", "graph_space", "generalized_graph_space"];

fn json(command: Command, name: &str, opts: &Options) -> (Value, i32) {
    let out = run(command, &fixture(name), opts).unwrap();
    let text = emit(&out.report, Format::Json);
    (serde_json::from_str(&text).unwrap(), out.exit_code)
}

fn no_floats(v: &Value) -> bool {
    match v {
        Value::Number(n) => !n.is_f64(),
        Value::Array(xs) => xs.iter().all(no_floats),
        Value::Object(m) => m.values().all(no_floats),
        _ => true,
    }
}

#[test]
fn every_fixture_supports_the_model_commands() {
    for name in FIXTURES {
        for c in [Command::Validate, Command::Phases, Command::Analyze, Command::Lifts, Command::Sectors] {
            let (v, code) = json(c, name, &Options::default());
            assert_eq!(code, 0, "{name} {c:?}");
            assert_eq!(v["schema"], "glsm-lab.report/1");
            assert!(v["warnings"].is_array());
            assert!(no_floats(&v), "{name} {c:?} emitted a float");
        }
    }
}

#[test]
fn reports_are_deterministic() {
    for name in FIXTURES {
        for format in [Format::Json, Format::Text] {
            let a = emit(&run(Command::Analyze, &fixture(name), &Options::default()).unwrap().report, format);
            let b = emit(&run(Command::Analyze, &fixture(name), &Options::default()).unwrap().report, format);
            assert_eq!(a, b);
        }
    }
}

#[test]
fn empty_warnings_are_a_list() {
    let out = run(Command::Phases, &fixture("quintic_geometric"), &Options::default()).unwrap();
    assert!(emit(&out.report, Format::Json).contains("\"warnings\": []"));
}

#[test]
fn fixtures_round_trip() {
    for name in FIXTURES {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let file = ModelFile::parse(&text).unwrap();
        let model = file.to_model().unwrap();
        let again = ModelFile::parse(&ModelFile::from_model(&model, &file).to_toml()).unwrap();
        assert_eq!(again.to_model().unwrap(), model, "{name}");
        assert_eq!(again.graph, file.graph);
    }
}

#[test]
fn vdim_example() {
    let opts = Options {
        genus: Some(0),
        marks: Some(3),
        beta: Some("0".into()),
        insertions: Some("J,J,J".into()),
        ..Options::default()
    };
    let (v, _) = json(Command::Vdim, "quintic_lg", &opts);
    assert_eq!(v["payload"]["virtual_dimension"], "3");
}

#[test]
fn lifts_on_geometric_quintic() {
    let (v, _) = json(Command::Lifts, "quintic_geometric", &Options::default());
    assert_eq!(v["payload"]["trivial_lift_good"], true);
    assert_eq!(v["payload"]["good_r_level"], "0");
    let certs = v["certificates"].as_array().unwrap();
    assert!(certs.iter().any(|c| c["certificate"]["verdict"] == "outside"));

    let opts = Options { lift: Some("1/2".into()), ..Options::default() };
    let (v, _) = json(Command::Lifts, "quintic_geometric", &opts);
    assert_eq!(v["payload"]["configured_lift"]["good"], false);
}

#[test]
fn overrides_apply() {
    let opts = Options { theta_override: Some("1".into()), ..Options::default() };
    let (v, _) = json(Command::Sectors, "quintic_geometric", &opts);
    assert_eq!(v["payload"]["count"], 5);
    let opts = Options { theta_override: Some("0".into()), ..Options::default() };
    let (_, code) = json(Command::Validate, "quintic_geometric", &opts);
    assert_eq!(code, 1);
    let opts = Options { theta_override: Some("1,2".into()), ..Options::default() };
    assert!(matches!(run(Command::Phases, &fixture("quintic_lg"), &opts), Err(CliError::Usage(_))));
}

#[test]
fn qmap_commands() {
    let (v, code) = json(Command::QmapCheck, "quintic_lg", &Options::default());
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["stable"], true);
    assert_eq!(v["payload"]["dm_stable"], true);
    let opts = Options { max_degree: Some(3), ..Options::default() };
    let (v, _) = json(Command::QmapEnumerate, "two_cubics_lg", &opts);
    assert_eq!(v["payload"]["count"], 1);
    let (v, _) = json(Command::QmapCheck, "quintic_geometric", &Options { epsilon: Some("0+".into()), ..Options::default() });
    assert_eq!(v["payload"]["stable"], true);
    assert!(matches!(run(Command::QmapCheck, &fixture("graph_space"), &Options::default()), Err(CliError::Semantic(_))));
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_glsm-lab"))
}

#[test]
fn exit_codes() {
    let ok = binary().args(["phases", &fixture("quintic_geometric")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let missing = binary().args(["phases", "does-not-exist.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[model]\nvariables = [\"x\"\n").unwrap();
    let out = binary().args(["validate", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let text = std::fs::read_to_string(fixture("quintic_geometric")).unwrap();
    let gcd = dir.path().join("gcd.toml");
    std::fs::write(&gcd, text.replace("r_weights = [0, 0, 0, 0, 0, 1]", "r_weights = [2, 0, 0, 0, 0, 0]")).unwrap();
    let out = binary().args(["validate", gcd.to_str().unwrap(), "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r_charge"));
}

#[test]
fn fixture_directory_from_environment() {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures"].iter().collect();
    let out = binary()
        .args(["sectors", "quintic_lg", "--format", "json"])
        .env("GLSM_LAB_FIXTURES", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["payload"]["count"], 5);
}

fn random_model() -> impl Strategy<Value = ModelInput> {
    (1usize..=5, 1usize..=2).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(prop::collection::vec(-6i64..=6, n), m),
            prop::collection::vec(-3i64..=3, n),
            1i64..=6,
            prop::collection::vec((prop::collection::vec(0u32..4, n), (-5i64..=5, 1i64..=4)), 1..4),
            prop::collection::vec((-7i64..=7, 1i64..=6), m),
            any::<bool>(),
            prop::option::of((-5i64..=5, 1i64..=5)),
            any::<bool>(),
        )
            .prop_map(move |(rows, c, d, terms, theta, inf, lift, transversality)| {
                let variables: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
                ModelInput {
                    superpotential: Polynomial::from_terms(
                        &variables,
                        terms.into_iter().map(|(e, (a, b))| (e, ratio(a, b))),
                    ),
                    variables,
                    gauge: IntMatrix::new(rows).unwrap(),
                    r_weights: c,
                    r_degree: d,
                    theta: RatVector(theta.into_iter().map(|(a, b)| ratio(a, b)).collect()),
                    epsilon: if inf { Epsilon::Infinity } else { Epsilon::ZeroPlus },
                    lift_r_level: lift.map(|(a, b)| ratio(a, b)),
                    transversality,
                    p_fields: None,
                }
            })
    })
}

proptest! {
    #[test]
    fn model_files_round_trip(m in random_model()) {
        let template = ModelFile::parse(&std::fs::read_to_string(fixture("quintic_lg")).unwrap()).unwrap();
        let file = ModelFile::from_model(&m, &template);
        let back = ModelFile::parse(&file.to_toml()).unwrap().to_model().unwrap();
        prop_assert_eq!(back, m);
    }
}
