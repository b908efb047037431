use rayon::prelude::*;

use crate::error::Result;
use crate::run::{run_ber_point, run_rmse_point};
use crate::seed::derive_seed;
use crate::spec::ExperimentSpec;

/// One sweep point. BER rows fill `errors`, `bits` and `ber`; RMSE rows
/// fill `rmse_amp`, `rmse_phase` and `estimates`. A point that failed keeps
/// its axis value and seed and carries the error text instead.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Row {
    pub axis: f64,
    pub errors: Option<u64>,
    pub bits: Option<u64>,
    pub ber: Option<f64>,
    pub rmse_amp: Option<f64>,
    pub rmse_phase: Option<f64>,
    pub estimates: Option<usize>,
    pub seed: u64,
    pub truncated: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: ExperimentSpec,
    pub rows: Vec<Row>,
}

pub fn point_seed(master_seed: u64, index: usize) -> u64 {
    derive_seed(master_seed, index as u64)
}

/// Runs one point of `spec` at `axis` with `seed`.
pub fn run_point(spec: &ExperimentSpec, axis: f64, seed: u64) -> Row {
    let point = spec.at(axis);
    let mut row = Row {
        axis,
        seed,
        ..Row::default()
    };
    if spec.sweep.kind.is_ber() {
        match run_ber_point(&point, seed) {
            Ok(p) => {
                row.errors = Some(p.errors);
                row.bits = Some(p.bits);
                row.ber = Some(p.ber());
                row.truncated = p.truncated;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
    } else {
        match run_rmse_point(&point, seed) {
            Ok(p) => {
                row.rmse_amp = Some(p.rmse_amp);
                row.rmse_phase = Some(p.rmse_phase);
                row.estimates = Some(p.estimates);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    row
}

pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    run_sweep_with(spec, |_, _| {})
}

/// As [`run_sweep`], calling `progress(index, row)` as each point finishes
/// (in completion order). Rows come back in axis order regardless.
pub fn run_sweep_with<F>(spec: &ExperimentSpec, progress: F) -> Result<SweepResult>
where
    F: Fn(usize, &Row) + Sync,
{
    spec.validate()?;
    let values = spec.sweep.resolved_values();
    let rows = values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let row = run_point(spec, v, point_seed(spec.master_seed, i));
            progress(i, &row);
            row
        })
        .collect();
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}
