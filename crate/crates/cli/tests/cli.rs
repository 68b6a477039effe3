use std::process::Command;

use pmdp_cli::benches::{bench_specs, run_bench};
use pmdp_cli::experiment::{plot_table, Series};
use pmdp_cli::{builtin_model, grid, read_csv, run_experiment, write_csv, ExperimentSpec, GridErrors, ResultRow};
use pmdp_core::{discretize_uniform, induce_pomdp, Algorithm};

fn pmdp_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pmdp"))
}

fn eval_row(text: &str, point: &[f64]) -> Vec<(usize, f64)> {
    let (m, _) = grid(GridErrors::Biased);
    let s = m.state_index(text).unwrap();
    let up = 0;
    let mut row = m.instantiate(point).unwrap().row(s, up).clone();
    row.sort_by_key(|(t, _)| *t);
    row
}

#[test]
fn grid_moves_slip_sideways() {
    let (m, target) = grid(GridErrors::Symmetric);
    assert_eq!(m.num_states(), 9);
    assert_eq!(m.states[target], "r3c3");
    let s = m.state_index("r1c1").unwrap();
    let row = m.instantiate(&[0.2]).unwrap().row(s, 0).clone();
    // Up from the corner: forward with 1-p, the only open side gets p.
    let r2c1 = m.state_index("r2c1").unwrap();
    let r1c2 = m.state_index("r1c2").unwrap();
    let mut row = row;
    row.sort_by_key(|(t, _)| *t);
    assert_eq!(row, vec![(r1c2, 0.2), (r2c1, 0.8)]);

    // From the middle of the bottom row both sides are open.
    let s = m.state_index("r1c2").unwrap();
    let mut row = m.instantiate(&[0.2]).unwrap().row(s, 0).clone();
    row.sort_by_key(|(t, _)| *t);
    let (r1c1, r1c3, r2c2) = (
        m.state_index("r1c1").unwrap(),
        m.state_index("r1c3").unwrap(),
        m.state_index("r2c2").unwrap(),
    );
    assert_eq!(row, vec![(r1c1, 0.1), (r1c3, 0.1), (r2c2, 0.8)]);
}

#[test]
fn sink_absorbs() {
    let (m, _) = grid(GridErrors::Symmetric);
    let sink = m.state_index("r2c2").unwrap();
    let mdp = m.instantiate(&[0.3]).unwrap();
    for a in 0..4 {
        assert_eq!(mdp.row(sink, a), &vec![(sink, 1.0)]);
    }
}

#[test]
fn unbiased_grid2_is_grid1() {
    let (g1, _) = grid(GridErrors::Symmetric);
    for p in [0.0, 0.3, 1.0] {
        let a = g1.instantiate(&[p]).unwrap();
        for s in ["r1c2", "r2c1", "r3c2", "r2c3"] {
            let s1 = g1.state_index(s).unwrap();
            let mut want = a.row(s1, 0).clone();
            want.sort_by_key(|(t, _)| *t);
            assert_eq!(eval_row(s, &[p, 0.5]), want);
        }
    }
}

#[test]
fn builtin_encodings_have_the_expected_sizes() {
    for (name, n, states, observations) in [("learner", 2, 14, 7), ("grid1", 10, 90, 9), ("grid2", 10, 900, 9)] {
        let (m, target) = builtin_model(name).unwrap();
        let pts = discretize_uniform(&m, n).unwrap();
        let (pomdp, _) = induce_pomdp(&m, &pts, target).unwrap();
        assert_eq!((pomdp.num_states(), pomdp.num_observations()), (states, observations), "{name}");
    }
}

#[test]
fn csv_round_trips() {
    let rows = vec![
        ResultRow {
            points: 10,
            encoded_states: 70,
            horizon: 3,
            time_s: 0.25,
            value: Some(19.0 / 27.0),
            nodes: Some(7),
            error: String::new(),
        },
        ResultRow {
            points: 20,
            encoded_states: 140,
            horizon: 3,
            time_s: 0.0,
            value: None,
            nodes: None,
            error: "lp failure, row 3".into(),
        },
    ];
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("points,encoded_states,horizon,time_s,value,nodes,error\n"));
    assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn experiments_sweep_points_then_horizons() {
    let mut spec = ExperimentSpec::new("repeated-learner", Algorithm::IncrementalPruning, vec![2, 5], vec![3, 9]);
    let dir = tempfile::tempdir().unwrap();
    spec.output = Some(dir.path().join("out.csv"));
    let rows = run_experiment(&spec).unwrap();
    let cells: Vec<(usize, usize)> = rows.iter().map(|r| (r.points, r.horizon)).collect();
    assert_eq!(cells, vec![(2, 3), (2, 9), (5, 3), (5, 9)]);
    assert!(rows.iter().all(|r| r.error.is_empty()));
    assert_eq!(rows[0].value, Some(1.0));
    assert_eq!(rows[2].encoded_states, 35);
    let saved = read_csv(std::fs::File::open(dir.path().join("out.csv")).unwrap()).unwrap();
    assert_eq!(saved, rows);

    spec.horizons = vec![];
    assert!(run_experiment(&spec).is_err());
}

#[test]
fn plot_tables_fill_gaps_with_nan() {
    let row = |h, v: Option<f64>| ResultRow {
        points: 2,
        encoded_states: 14,
        horizon: h,
        time_s: 1.0,
        value: v,
        nodes: None,
        error: String::new(),
    };
    let series = vec![
        Series {
            label: "A".into(),
            rows: vec![row(1, Some(0.5)), row(2, Some(0.75))],
        },
        Series {
            label: "B".into(),
            rows: vec![row(2, None)],
        },
    ];
    assert_eq!(plot_table(&series, true), "h A B\n1 0.500000 nan\n2 0.750000 nan\n");
    assert_eq!(plot_table(&series, false), "h A B\n1 1.000000 nan\n2 1.000000 nan\n");
}

#[test]
fn bench_presets_exist_and_run() {
    assert!(bench_specs("table9", 10, 0).is_err());
    let series = run_bench("table1b", 10, 0, Some(&[3])).unwrap();
    assert_eq!(series.len(), 1);
    assert!((series[0].rows[0].value.unwrap() - 19.0 / 27.0).abs() < 1e-9);
    let grid = run_bench("fig-grid1", 20, 1, Some(&[2])).unwrap();
    assert_eq!(grid.len(), 4);
}

#[test]
fn solve_prints_csv() {
    let out = pmdp_bin()
        .args(["solve", "--model", "learner", "--points", "2,5", "--horizon", "3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1].value, Some(0.75));
}

#[test]
fn policy_files_evaluate_and_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let policy = dir.path().join("pi.txt");
    let status = pmdp_bin()
        .args(["solve", "--model", "learner", "--points", "10", "--horizon", "3", "--policy-out"])
        .arg(&policy)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let out = pmdp_bin()
        .args(["eval-policy", "--model", "learner", "--points", "10", "--horizon", "3", "--policy"])
        .arg(&policy)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.lines().next().unwrap().strip_prefix("value ").unwrap().parse().unwrap();
    assert!((value - 19.0 / 27.0).abs() < 1e-9);
    assert_eq!(text.lines().filter(|l| l.starts_with("point ")).count(), 10);

    let out = pmdp_bin()
        .args(["simulate", "--model", "learner", "--points", "10", "--episodes", "2000", "--policy"])
        .arg(&policy)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("standard_error"));
}

#[test]
fn encode_writes_a_pomdp_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("learner.pomdp");
    let out = pmdp_bin()
        .args(["encode", "--model", "learner", "--points", "2", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let m = pmdp_core::parser::parse_pomdp(&std::fs::read_to_string(&path).unwrap(), "encoded").unwrap();
    assert_eq!(m.num_states(), 14);
}

#[test]
fn exit_codes_classify_failures() {
    let code = |args: &[&str]| pmdp_bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["solve"]), Some(1));
    assert_eq!(code(&["solve", "--model", "nosuch.pmdp"]), Some(1));
    assert_eq!(code(&["solve", "--model", "learner", "--points", "0"]), Some(1));
    assert_eq!(code(&["oracle", "--model", "learner", "--points", "2"]), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pmdp");
    std::fs::write(&bad, "pmdp bad\nparam p in [0,2]\nstate s t\naction go\ninit s:1\ntarget t\ntrans s go t:p, s:1-p\n")
        .unwrap();
    let bad = bad.to_str().unwrap();
    assert_eq!(code(&["solve", "--model", bad, "--points", "3"]), Some(2));
    assert_eq!(code(&["encode", "--model", bad, "--points", "3"]), Some(2));
    let syntax = dir.path().join("syntax.pmdp");
    std::fs::write(&syntax, "pmdp x\nstate s\nnonsense\n").unwrap();
    assert_eq!(code(&["encode", "--model", syntax.to_str().unwrap()]), Some(2));
}
