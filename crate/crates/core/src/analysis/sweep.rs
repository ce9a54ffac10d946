//! Decay-rate measurements over a grid of noise strengths and sizes.
//!
//! Each cell compares a noisy circuit ensemble against the noiseless oracle
//! run on the same schedule. Both series get the same fit; the reported `Γ`
//! is the difference of the two fitted rates, so window effects present
//! without noise cancel. When the noiseless period is longer than half the
//! window, the period, baseline and phase are held at their values from
//! the long noiseless fit, leaving `A` and `Γ` free.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_series, FitOptions, FitResult};
use super::period::{measure_period, PeriodOptions};
use crate::circuit::KickExpansion;
use crate::dynamics::MapParams;
use crate::error::Result;
use crate::evolution::{evolve_runs, Backend, EvolutionConfig, InitialState, Trajectory};
use crate::noise::NoiseModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub n_qubits: usize,
    pub k: f64,
    pub a: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub realizations: usize,
    pub iterations: usize,
    pub stride: usize,
    pub exempt_work_qubit: bool,
    /// Defaults to the packet in the left well.
    pub initial: Option<InitialState>,
}

impl SweepCell {
    pub fn new(n_qubits: usize, k: f64, a: f64, epsilon: f64, iterations: usize) -> Self {
        Self {
            n_qubits,
            k,
            a,
            epsilon,
            seed: 1,
            realizations: 16,
            iterations,
            stride: 1,
            exempt_work_qubit: false,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n_qubits: usize,
    pub k: f64,
    pub a: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub realizations: usize,
    pub exempt_work_qubit: bool,
    pub period: Option<f64>,
    pub gamma: Option<f64>,
    pub rms_residual: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepOptions {
    pub period: PeriodOptions,
    pub fit: FitOptions,
    pub expansion: KickExpansion,
}

/// Everything measured for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayMeasurement {
    pub reference_period: f64,
    pub fit_options: FitOptions,
    pub reference: FitResult,
    pub noisy: FitResult,
    /// Noise-induced rate, `noisy.gamma - reference.gamma`.
    pub gamma: f64,
    pub runs: Vec<Trajectory>,
}

impl DecayMeasurement {
    pub fn average(&self) -> Trajectory {
        Trajectory::average(&self.runs)
    }
}

/// Run one cell. `reference_period`, a noiseless fit from
/// [`measure_period`], skips the period search.
pub fn measure_decay(cell: &SweepCell, opts: &SweepOptions, reference_period: Option<FitResult>) -> Result<DecayMeasurement> {
    let params = MapParams::new(cell.k, cell.a, cell.n_qubits)?;
    let initial = cell.initial.unwrap_or_else(|| InitialState::left_well(&params));
    let shape = match reference_period {
        Some(f) => f,
        None => measure_period(&params, &initial, &opts.period)?,
    };
    let t_ref = shape.period;
    let mut fit_opts = opts.fit;
    if 2.0 * t_ref <= cell.iterations as f64 {
        fit_opts.period_guess = Some(t_ref);
    } else {
        fit_opts.fixed_period = Some(t_ref);
        fit_opts.fixed_baseline = Some(shape.baseline);
        fit_opts.fixed_phase = Some(shape.phase);
    }

    let mut cfg = EvolutionConfig::new(params, cell.iterations);
    cfg.initial = initial;
    cfg.stride = cell.stride;
    cfg.expansion = opts.expansion;
    cfg.backend = Backend::Oracle;
    let reference_run = evolve_runs(&cfg)?.remove(0);
    let reference = fit_series(&reference_run.times, &reference_run.alive, &fit_opts)?;

    cfg.backend = Backend::Circuit;
    cfg.realizations = cell.realizations;
    cfg.noise = NoiseModel::new(cell.epsilon, cell.seed)?.with_exempt_work_qubit(cell.exempt_work_qubit);
    let runs = evolve_runs(&cfg)?;
    let avg = Trajectory::average(&runs);
    let noisy = fit_series(&avg.times, &avg.alive, &fit_opts)?;
    Ok(DecayMeasurement {
        reference_period: t_ref,
        fit_options: fit_opts,
        reference,
        noisy,
        gamma: noisy.gamma - reference.gamma,
        runs,
    })
}

type ShapeKey = (usize, u64, u64, String);

fn shape_key(cell: &SweepCell) -> ShapeKey {
    (cell.n_qubits, cell.k.to_bits(), cell.a.to_bits(), format!("{:?}", cell.initial))
}

/// Measure every cell on the rayon pool. Failures are recorded in the row's
/// status. Rows come back sorted by `(n_q, K, a, ε, seed)` whatever the
/// completion order.
pub fn gamma_sweep(cells: &[SweepCell], opts: &SweepOptions) -> Vec<SweepRecord> {
    let mut unique: Vec<&SweepCell> = Vec::new();
    for cell in cells {
        if !unique.iter().any(|c| shape_key(c) == shape_key(cell)) {
            unique.push(cell);
        }
    }
    let shapes: HashMap<ShapeKey, Option<FitResult>> = unique
        .par_iter()
        .map(|cell| {
            let shape = MapParams::new(cell.k, cell.a, cell.n_qubits).ok().and_then(|params| {
                let initial = cell.initial.unwrap_or_else(|| InitialState::left_well(&params));
                measure_period(&params, &initial, &opts.period).ok()
            });
            (shape_key(cell), shape)
        })
        .collect();
    let mut records: Vec<SweepRecord> = cells
        .par_iter()
        .map(|cell| {
            let outcome = measure_decay(cell, opts, shapes[&shape_key(cell)]);
            SweepRecord {
                n_qubits: cell.n_qubits,
                k: cell.k,
                a: cell.a,
                epsilon: cell.epsilon,
                seed: cell.seed,
                realizations: cell.realizations,
                exempt_work_qubit: cell.exempt_work_qubit,
                period: outcome.as_ref().ok().map(|m| m.noisy.period),
                gamma: outcome.as_ref().ok().map(|m| m.gamma),
                rms_residual: outcome.as_ref().ok().map(|m| m.noisy.rms_residual),
                status: outcome.map_or_else(|e| e.to_string(), |_| "ok".into()),
            }
        })
        .collect();
    records.sort_by(|x, y| {
        (x.n_qubits, x.k, x.a, x.epsilon, x.seed, x.exempt_work_qubit)
            .partial_cmp(&(y.n_qubits, y.k, y.a, y.epsilon, y.seed, y.exempt_work_qubit))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    records
}
