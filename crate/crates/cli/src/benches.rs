//! Named experiment presets that regenerate the published tables and the
//! data behind the runtime/value figures.

use pmdp_core::Algorithm;

use crate::experiment::{run_experiment, ExperimentSpec, Series};
use crate::CliError;

pub const BENCH_NAMES: [&str; 5] = ["table1a", "table1b", "fig-repeated", "fig-grid1", "fig-grid2"];

/// Labelled experiment specs of a preset.
pub fn bench_specs(name: &str, beliefs: usize, seed: u64) -> Result<Vec<(String, ExperimentSpec)>, CliError> {
    let with = |label: String, mut s: ExperimentSpec| {
        s.beliefs = beliefs;
        s.seed = seed;
        (label, s)
    };
    let ip = Algorithm::IncrementalPruning;
    let specs = match name {
        "table1a" => vec![with(
            "IP".into(),
            ExperimentSpec::new("learner", ip, vec![2, 5, 10, 20, 50, 100, 200, 500, 1000], vec![3]),
        )],
        "table1b" => vec![with(
            "IP10".into(),
            ExperimentSpec::new("repeated-learner", ip, vec![10], vec![3, 9, 15, 21, 27, 33, 39]),
        )],
        "fig-repeated" => {
            let horizons: Vec<usize> = (1..=21).collect();
            let mut v: Vec<_> = [3, 4, 5, 10]
                .into_iter()
                .map(|n| with(format!("IP{n}"), ExperimentSpec::new("repeated-learner", ip, vec![n], horizons.clone())))
                .collect();
            v.extend([10, 20, 50, 100].into_iter().map(|n| {
                with(
                    format!("P{n}"),
                    ExperimentSpec::new("repeated-learner", Algorithm::Pbvi, vec![n], horizons.clone()),
                )
            }));
            v
        }
        "fig-grid1" | "fig-grid2" => {
            let model = if name == "fig-grid1" { "grid1" } else { "grid2" };
            [2, 5, 7, 10]
                .into_iter()
                .map(|n| with(format!("{n}pts"), ExperimentSpec::new(model, Algorithm::Pbvi, vec![n], (1..=10).collect())))
                .collect()
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown bench `{other}` (known: {})",
                BENCH_NAMES.join(", ")
            )))
        }
    };
    Ok(specs)
}

/// Runs every spec of a preset, optionally overriding its horizons.
pub fn run_bench(name: &str, beliefs: usize, seed: u64, horizons: Option<&[usize]>) -> Result<Vec<Series>, CliError> {
    bench_specs(name, beliefs, seed)?
        .into_iter()
        .map(|(label, mut spec)| {
            if let Some(h) = horizons {
                spec.horizons = h.to_vec();
            }
            Ok(Series {
                label,
                rows: run_experiment(&spec)?,
            })
        })
        .collect()
}
