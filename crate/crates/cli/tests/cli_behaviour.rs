use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use consolidation_cli::commands::{dispatch, Output as Sink};
use consolidation_cli::presets::{preset, preset_text, NAMES};
use consolidation_cli::{Config, ConfigError};

fn consolidate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_consolidate")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn successful_run_exits_zero_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = consolidate(&["coexistence", "--preset", "coexistence", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("coexistence pressure"));
    assert!(dir.path().join("coexistence_scan.csv").exists());
    assert!(dir.path().join("coexistence.svg").exists());
}

#[test]
fn refused_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(consolidate(&["equilibria", "--preset", "missing"]).status.code(), Some(2));

    let cfg = write_config(dir.path(), "model.unknown = 1\n");
    let out = consolidate(&["equilibria", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.unknown"));

    let cfg = write_config(dir.path(), "grid.N = 20\nscheme.tau = 1\nscheme.T = 1\nscheme.enforce_stability = true\n");
    assert_eq!(consolidate(&["evolve", "--preset", "fig1", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "grid.N = 50\nsteady.max_iters = 1\nsteady.damping = none\n");
    let out = consolidate(&["steady", "--preset", "fig2", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn show_preset_prints_a_parseable_config() {
    for name in NAMES {
        let out = consolidate(&["--show-preset", name]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text, preset_text(name).unwrap());
        Config::parse(&text).unwrap();
    }
}

#[test]
fn config_errors_name_the_problem() {
    assert!(matches!(Config::parse("model.p 0.2"), Err(ConfigError::Syntax { line: 1, .. })));
    assert!(matches!(Config::parse("\n[grid]\nwidth = 3"), Err(ConfigError::UnknownKey { line: 3, .. })));
    let config = Config::parse("grid.N = many").unwrap();
    assert!(matches!(config.grid(), Err(ConfigError::Value { .. })));
    assert!(matches!(preset("nope"), Err(ConfigError::UnknownPreset { .. })));
}

#[test]
fn preset_survives_a_text_round_trip() {
    let original = preset("fig1").unwrap();
    let again = Config::parse(&original.to_text()).unwrap();
    assert_eq!(original, again);
}

#[test]
fn equilibria_csv_round_trips_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = preset("coexistence").unwrap();
    let sink = Sink { dir: Some(dir.path().to_path_buf()), csv: true, svg: true };
    let report = consolidation_cli::commands::equilibria::run(&config, &sink).unwrap();
    let text = fs::read_to_string(dir.path().join("equilibria.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), report.points.len());
    for (row, q) in rows.iter().zip(&report.points) {
        assert_eq!(row[0].parse::<f64>().unwrap(), q.eps);
        assert_eq!(row[1].parse::<f64>().unwrap(), q.m);
        assert_eq!(row[2].parse::<f64>().unwrap(), q.psi);
        assert_eq!(row[3], q.kind.as_str());
    }
}

#[test]
fn evolve_outputs_are_consistent_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = preset("negativity").unwrap();
    config.set("scheme.max_steps", "200");
    let sink = Sink { dir: Some(dir.path().to_path_buf()), csv: true, svg: true };
    let report = consolidation_cli::commands::evolve::run(&config, &sink).unwrap();

    let (header, rows) = read_table(&dir.path().join("final_m.csv"));
    assert_eq!(header, ["x", "m"]);
    let values: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(values, report.result.final_state.m.values);

    let (header, rows) = read_table(&dir.path().join("monitor.csv"));
    assert_eq!(header.len(), 9);
    assert_eq!(rows.len(), 201);

    let svg = fs::read_to_string(dir.path().join("final.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<svg").count(), 1);
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(!svg.contains("NaN"));
}

#[test]
fn output_formats_can_be_restricted() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = preset("coexistence").unwrap();
    config.set("output.formats", "csv");
    let sink = Sink::from_config(&config, Some(dir.path()));
    dispatch("coexistence", &config, &sink).unwrap();
    assert!(dir.path().join("coexistence_scan.csv").exists());
    assert!(!dir.path().join("coexistence.svg").exists());
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "grid.N = 100\nsteady.continuation_k2 = 0.5e-3\n");
    let a = consolidate(&["steady", "--preset", "fig2", "--config", &cfg]);
    let b = consolidate(&["steady", "--preset", "fig2", "--config", &cfg]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_verb_is_rejected_by_dispatch() {
    assert!(dispatch("nothing", &Config::default(), &Sink::discard()).is_err());
}
