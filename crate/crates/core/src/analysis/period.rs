//! Noiseless tunneling periods from long oracle runs.

use serde::{Deserialize, Serialize};

use super::fit::{fit_damped_cosine, FitOptions, FitResult};
use crate::dynamics::MapParams;
use crate::error::{Error, Result};
use crate::evolution::InitialState;
use crate::oracle::SplitOperator;
use crate::qstate::w_alive_register;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodOptions {
    pub initial_window: usize,
    pub max_window: usize,
    /// Target number of (block-averaged) samples per window.
    pub samples: usize,
    /// Accept once the window holds at least this many periods.
    pub min_periods: f64,
    /// Smaller fitted amplitudes are intra-well motion, not tunneling.
    pub min_amplitude: f64,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        Self { initial_window: 2048, max_window: 1 << 23, samples: 4096, min_periods: 2.0, min_amplitude: 0.1 }
    }
}

/// `W_a` averaged over consecutive blocks of `block` iterations. Sample
/// times are block centres.
pub fn block_averaged_alive(
    params: &MapParams,
    initial: &InitialState,
    iterations: usize,
    block: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let block = block.max(1);
    let state = initial.prepare(params)?;
    let mut psi = state.register().to_vec();
    let mut prop = SplitOperator::new(params);
    let blocks = iterations / block;
    let mut times = Vec::with_capacity(blocks);
    let mut values = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let mut acc = 0.0;
        for _ in 0..block {
            acc += w_alive_register(&psi);
            prop.step(&mut psi)?;
        }
        times.push((b * block) as f64 + 0.5 * (block - 1) as f64);
        values.push(acc / block as f64);
    }
    Ok((times, values))
}

/// Fit the noiseless period, growing the window eightfold until it spans
/// `min_periods` periods of an oscillation with amplitude at least
/// `min_amplitude`.
pub fn measure_period(params: &MapParams, initial: &InitialState, opts: &PeriodOptions) -> Result<FitResult> {
    let fit_opts = FitOptions { downweight_tail: false, ..FitOptions::default() }.with_fixed_gamma(0.0);
    let mut window = opts.initial_window.max(64);
    let mut last_err = None;
    while window <= opts.max_window {
        let block = (window / opts.samples).max(1);
        let (t, v) = block_averaged_alive(params, initial, window, block)?;
        match fit_damped_cosine(&t, &v, &fit_opts) {
            Ok(fit) if fit.amplitude.abs() < opts.min_amplitude => {
                last_err = Some(Error::NoOscillation { peak: fit.amplitude.abs(), threshold: opts.min_amplitude })
            }
            Ok(fit) if fit.period * opts.min_periods <= window as f64 => return Ok(fit),
            Ok(fit) => last_err = Some(Error::NoOscillation { peak: fit.period, threshold: window as f64 }),
            Err(e) => last_err = Some(e),
        }
        window *= 8;
    }
    Err(last_err.unwrap_or(Error::InvalidSeries("empty window".into())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRow {
    pub n_qubits: usize,
    pub k: f64,
    pub a: f64,
    pub hbar: f64,
    pub period: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodScan {
    pub rows: Vec<PeriodRow>,
    /// Slope of `ln T_u` against `1/ħ` over the successful rows.
    pub action: Option<f64>,
}

/// Period for each parameter set (packet started in the left well) and the
/// action `S` from `T_u ∝ exp(S/ħ)`.
pub fn period_scan(params: &[MapParams], opts: &PeriodOptions) -> PeriodScan {
    let rows: Vec<PeriodRow> = params
        .iter()
        .map(|p| {
            let res = measure_period(p, &InitialState::left_well(p), opts);
            PeriodRow {
                n_qubits: p.n_qubits,
                k: p.k,
                a: p.a,
                hbar: p.hbar(),
                period: res.as_ref().ok().map(|f| f.period),
                status: res.map_or_else(|e| e.to_string(), |_| "ok".into()),
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.period.map(|t| (1.0 / r.hbar, t.ln()))).collect();
    PeriodScan { action: slope(&pts), rows }
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
