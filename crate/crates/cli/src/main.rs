use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pmdp_cli::benches::run_bench;
use pmdp_cli::experiment::{plot_table, solve_horizons};
use pmdp_cli::{load_model, write_csv, CliError, ExperimentSpec, ResultRow};
use pmdp_core::parser::serialize_pomdp;
use pmdp_core::policy::{brute_force_value, evaluate_per_point, simulate};
use pmdp_core::{discretize_uniform, induce_pomdp, Algorithm, EncodingMap, PmdpPolicyView, PolicyGraph};

#[derive(Parser)]
#[command(name = "pmdp", version, about = "Parameter-independent policies for parametric MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Builtin name (learner, repeated-learner, grid1, grid2) or `.pmdp` path.
    #[arg(long)]
    model: String,
    /// Target state; defaults to the model's `target` line.
    #[arg(long)]
    target: Option<String>,
    /// Evenly spaced points per parameter (comma-separated for sweeps).
    #[arg(long, value_delimiter = ',', default_value = "10")]
    points: Vec<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the induced POMDP over a sweep and print CSV rows.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        horizon: Vec<usize>,
        #[arg(long, default_value = "ip")]
        algo: Algorithm,
        #[arg(long, default_value_t = 100)]
        beliefs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the policy graph of a single (points, horizon) cell.
        #[arg(long)]
        policy_out: Option<PathBuf>,
    },
    /// Emit the induced POMDP as a `.pomdp` document.
    Encode {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact reachability value of a policy graph on the pMDP.
    EvalPolicy {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
        #[arg(long)]
        policy: PathBuf,
    },
    /// Monte-Carlo estimate of a policy graph's value.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a named preset: table1a, table1b, fig-repeated, fig-grid1, fig-grid2.
    Bench {
        name: String,
        #[arg(long, default_value_t = 100)]
        beliefs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the preset's horizons.
        #[arg(long, value_delimiter = ',')]
        horizon: Option<Vec<usize>>,
        /// Directory for per-series CSV and plot-data files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal value by exhaustive policy enumeration.
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
    },
}

fn single_points(m: &ModelArgs) -> Result<usize, CliError> {
    match m.points.as_slice() {
        [n] if *n > 0 => Ok(*n),
        _ => Err(CliError::Usage("--points takes one positive count here".into())),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn policy_view(m: &ModelArgs, policy: &PathBuf) -> Result<(pmdp_core::Pmdp, usize, pmdp_core::ParamPointSet, PmdpPolicyView), CliError> {
    let (pmdp, target) = load_model(&m.model, m.target.as_deref())?;
    let pts = discretize_uniform(&pmdp, single_points(m)?).map_err(CliError::from_model)?;
    let graph = PolicyGraph::from_document(&fs::read_to_string(policy)?).map_err(|e| CliError::Usage(e.to_string()))?;
    let encoding = EncodingMap {
        num_model_states: pmdp.num_states(),
        num_points: pts.len(),
    };
    let view = PmdpPolicyView::new(graph, encoding).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((pmdp, target, pts, view))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            model,
            horizon,
            algo,
            beliefs,
            seed,
            gamma,
            out,
            policy_out,
        } => {
            let spec = ExperimentSpec {
                model: model.model.clone(),
                target: model.target.clone(),
                algorithm: algo,
                points_per_param: model.points.clone(),
                horizons: horizon,
                beliefs,
                seed,
                gamma,
                output: None,
            };
            spec.validate()?;
            if policy_out.is_some() && (spec.points_per_param.len() != 1 || spec.horizons.len() != 1) {
                return Err(CliError::Usage("--policy-out needs a single points value and horizon".into()));
            }
            let (pmdp, target) = load_model(&spec.model, spec.target.as_deref())?;
            let mut rows = Vec::new();
            for &n in &spec.points_per_param {
                for (row, result) in solve_horizons(&pmdp, target, n, &spec)? {
                    if !row.error.is_empty() {
                        eprintln!("points {} horizon {}: {}", row.points, row.horizon, row.error);
                    }
                    if let (Some(path), Some(r)) = (&policy_out, &result) {
                        fs::write(path, r.policy.to_document())?;
                    }
                    rows.push(row);
                }
            }
            let mut buf = Vec::new();
            write_csv(&mut buf, &rows)?;
            emit(out.as_ref(), &String::from_utf8_lossy(&buf))?;
            // Cells that never got an encoding failed model validation.
            let failed: Vec<&ResultRow> = rows.iter().filter(|r| !r.error.is_empty()).collect();
            if failed.iter().any(|r| r.encoded_states == 0) {
                return Err(CliError::Model(pmdp_core::Error::Validation("some sweep cells failed to encode".into())));
            }
            if !failed.is_empty() {
                return Err(CliError::Solver(pmdp_core::Error::InvalidArgument("some sweep cells failed".into())));
            }
        }
        Command::Encode { model, out } => {
            let (pmdp, target) = load_model(&model.model, model.target.as_deref())?;
            let pts = discretize_uniform(&pmdp, single_points(&model)?).map_err(CliError::from_model)?;
            let (pomdp, map) = induce_pomdp(&pmdp, &pts, target).map_err(CliError::from_model)?;
            emit(out.as_ref(), &serialize_pomdp(&pomdp, Some(&map)))?;
        }
        Command::EvalPolicy { model, horizon, policy } => {
            let (pmdp, target, pts, view) = policy_view(&model, &policy)?;
            let per_point = evaluate_per_point(&pmdp, &pts, &view, target, horizon).map_err(CliError::from_model)?;
            let value: f64 = per_point.iter().zip(pts.weights()).map(|(v, w)| v * w).sum();
            let mut text = format!("value {value}\n");
            for (x, v) in pts.points().iter().zip(&per_point) {
                let coords: Vec<String> = x.iter().map(|c| c.to_string()).collect();
                text.push_str(&format!("point {} {v}\n", coords.join(",")));
            }
            emit(None, &text)?;
        }
        Command::Simulate {
            model,
            horizon,
            policy,
            episodes,
            seed,
        } => {
            let (pmdp, target, pts, view) = policy_view(&model, &policy)?;
            let est = simulate(&pmdp, &pts, &view, target, horizon, episodes, seed).map_err(CliError::from_model)?;
            emit(
                None,
                &format!("estimate {}\nstandard_error {}\nepisodes {}\n", est.estimate, est.standard_error, est.episodes),
            )?;
        }
        Command::Bench {
            name,
            beliefs,
            seed,
            horizon,
            out,
        } => {
            let series = run_bench(&name, beliefs, seed, horizon.as_deref())?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    for s in &series {
                        write_csv(fs::File::create(dir.join(format!("{name}-{}.csv", s.label)))?, &s.rows)?;
                    }
                    fs::write(dir.join(format!("{name}-time.txt")), plot_table(&series, false))?;
                    fs::write(dir.join(format!("{name}-value.txt")), plot_table(&series, true))?;
                }
                None => {
                    for s in &series {
                        println!("# {}", s.label);
                        write_csv(io::stdout(), &s.rows)?;
                    }
                }
            }
        }
        Command::Oracle { model, horizon } => {
            let (pmdp, target) = load_model(&model.model, model.target.as_deref())?;
            let pts = discretize_uniform(&pmdp, single_points(&model)?).map_err(CliError::from_model)?;
            let (pomdp, _) = induce_pomdp(&pmdp, &pts, target).map_err(CliError::from_model)?;
            let r = brute_force_value(&pomdp, horizon).map_err(CliError::Solver)?;
            emit(None, &format!("value {}\npolicies {}\n", r.value, r.policies))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
