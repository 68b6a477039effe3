//! Sweeps over parameter-point counts and horizons, with CSV output.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use pmdp_core::model::Pmdp;
use pmdp_core::parser::{parse_pmdp, ModelSource};
use pmdp_core::solver::lp::DenseSimplex;
use pmdp_core::solver::{pbvi_solve, reachable_backup_with, StageValueFunction};
use pmdp_core::{discretize_uniform, induce_pomdp, Algorithm, Error, SolveResult};

use crate::builtins::{builtin_model, BUILTIN_NAMES};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Builtin name or path to a `.pmdp` file.
    pub model: String,
    /// Overrides the model's declared target.
    pub target: Option<String>,
    pub algorithm: Algorithm,
    pub points_per_param: Vec<usize>,
    pub horizons: Vec<usize>,
    pub beliefs: usize,
    pub seed: u64,
    pub gamma: f64,
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(model: impl Into<String>, algorithm: Algorithm, points_per_param: Vec<usize>, horizons: Vec<usize>) -> Self {
        ExperimentSpec {
            model: model.into(),
            target: None,
            algorithm,
            points_per_param,
            horizons,
            beliefs: 100,
            seed: 0,
            gamma: 1.0,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.points_per_param.is_empty() || self.horizons.is_empty() {
            return Err(CliError::Usage("points and horizons must be nonempty".into()));
        }
        if self.points_per_param.contains(&0) {
            return Err(CliError::Usage("point counts must be positive".into()));
        }
        if self.horizons.contains(&0) {
            return Err(CliError::Usage("horizons must be positive".into()));
        }
        if self.algorithm == Algorithm::Pbvi && self.beliefs == 0 {
            return Err(CliError::Usage("pbvi needs at least one belief".into()));
        }
        Ok(())
    }
}

/// One CSV row. Failed cells keep their coordinates and carry the error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub points: usize,
    pub encoded_states: usize,
    pub horizon: usize,
    pub time_s: f64,
    pub value: Option<f64>,
    pub nodes: Option<usize>,
    pub error: String,
}

/// Resolves a builtin name or `.pmdp` path, with an optional target override.
pub fn load_model(model: &str, target: Option<&str>) -> Result<(Pmdp, usize), CliError> {
    let (pmdp, declared) = if BUILTIN_NAMES.contains(&model) {
        let (m, t) = builtin_model(model).map_err(CliError::from_model)?;
        (m, Some(t))
    } else {
        let src = ModelSource::from_file(Path::new(model))
            .map_err(|e| CliError::Usage(format!("cannot read model `{model}`: {e}")))?;
        let parsed = parse_pmdp(&src).map_err(CliError::from_model)?;
        (parsed.pmdp, parsed.target)
    };
    let target = match target {
        Some(name) => pmdp.state_index(name).map_err(CliError::from_model)?,
        None => declared.ok_or_else(|| CliError::Usage("model declares no target; pass --target".into()))?,
    };
    Ok((pmdp, target))
}

fn failed(points: usize, encoded_states: usize, horizon: usize, e: &Error) -> ResultRow {
    ResultRow {
        points,
        encoded_states,
        horizon,
        time_s: 0.0,
        value: None,
        nodes: None,
        error: e.to_string(),
    }
}

fn row_of(points: usize, encoded_states: usize, r: &SolveResult) -> ResultRow {
    ResultRow {
        points,
        encoded_states,
        horizon: r.horizon,
        time_s: r.stats.runtime_s,
        value: Some(r.value),
        nodes: Some(r.stats.nodes),
        error: String::new(),
    }
}

/// Solves one encoded instance for every horizon. IP shares its stage
/// sequence across horizons, so a row's time is the time to reach its stage.
pub fn solve_horizons(
    pmdp: &Pmdp,
    target: usize,
    n: usize,
    spec: &ExperimentSpec,
) -> Result<Vec<(ResultRow, Option<SolveResult>)>, CliError> {
    let pts = discretize_uniform(pmdp, n).map_err(CliError::from_model)?;
    let points = pts.len();
    let (pomdp, map) = match induce_pomdp(pmdp, &pts, target) {
        Ok(x) => x,
        Err(e) => return Ok(spec.horizons.iter().map(|&h| (failed(points, 0, h, &e), None)).collect()),
    };
    let states = map.len();
    let mut out = Vec::with_capacity(spec.horizons.len());
    match spec.algorithm {
        Algorithm::IncrementalPruning => {
            let max_h = *spec.horizons.iter().max().expect("nonempty");
            let lp = DenseSimplex::default();
            let clock = Instant::now();
            let mut stages = vec![StageValueFunction::terminal(pomdp.num_states(), pomdp.num_observations())];
            let mut elapsed = vec![0.0];
            let mut failure = None;
            // Stage by stage so the time to every horizon is known.
            while stages.len() <= max_h {
                match reachable_backup_with(&pomdp, stages.last().expect("nonempty"), spec.gamma, &lp) {
                    Ok(next) => {
                        stages.push(next);
                        elapsed.push(clock.elapsed().as_secs_f64());
                    }
                    Err(e) => {
                        failure = Some(e);
                        break;
                    }
                }
            }
            for &h in &spec.horizons {
                if h < stages.len() {
                    let r = SolveResult::from_stages(&pomdp, &stages, h, Algorithm::IncrementalPruning, elapsed[h]);
                    out.push((row_of(points, states, &r), Some(r)));
                } else {
                    let e = failure.as_ref().expect("missing stage implies a failure");
                    out.push((failed(points, states, h, e), None));
                }
            }
        }
        Algorithm::Pbvi => {
            for &h in &spec.horizons {
                match pbvi_solve(&pomdp, h, spec.beliefs, spec.seed, spec.gamma) {
                    Ok(r) => out.push((row_of(points, states, &r), Some(r))),
                    Err(e) => out.push((failed(points, states, h, &e), None)),
                }
            }
        }
    }
    Ok(out)
}

/// Runs the sweep in spec order: point counts outermost, then horizons.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, CliError> {
    spec.validate()?;
    let (pmdp, target) = load_model(&spec.model, spec.target.as_deref())?;
    let mut rows = Vec::new();
    for &n in &spec.points_per_param {
        rows.extend(solve_horizons(&pmdp, target, n, spec)?.into_iter().map(|(r, _)| r));
    }
    if let Some(path) = &spec.output {
        write_csv(std::fs::File::create(path)?, &rows)?;
    }
    Ok(rows)
}

pub fn write_csv(w: impl Write, rows: &[ResultRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(w);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(r: impl Read) -> Result<Vec<ResultRow>, CliError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(CliError::from)
}

/// A labelled series for plot-data files.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub rows: Vec<ResultRow>,
}

/// Whitespace-separated columns `h <label>...` of time or value by horizon;
/// missing cells print as `nan`.
pub fn plot_table(series: &[Series], value: bool) -> String {
    let mut horizons: Vec<usize> = series.iter().flat_map(|s| s.rows.iter().map(|r| r.horizon)).collect();
    horizons.sort_unstable();
    horizons.dedup();
    let mut out = String::from("h");
    for s in series {
        out.push(' ');
        out.push_str(&s.label);
    }
    out.push('\n');
    for h in horizons {
        out.push_str(&h.to_string());
        for s in series {
            let cell = s
                .rows
                .iter()
                .find(|r| r.horizon == h)
                .and_then(|r| if value { r.value } else { r.value.map(|_| r.time_s) });
            match cell {
                Some(x) => out.push_str(&format!(" {x:.6}")),
                None => out.push_str(" nan"),
            }
        }
        out.push('\n');
    }
    out
}
