//! Power-law regression `Γ = c ε^α n_q^β`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::sweep::SweepRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub exponent_eps: f64,
    pub exponent_eps_se: f64,
    pub exponent_nq: f64,
    pub exponent_nq_se: f64,
    /// `c` with the exponents held at `(2, 4)`: geometric mean of
    /// `Γ / (ε² n_q⁴)`.
    pub prefactor: f64,
    /// `c` from the unconstrained regression intercept.
    pub prefactor_free: f64,
    /// Standard error of `ln prefactor_free`.
    pub prefactor_free_log_se: f64,
    pub points: usize,
    /// `S` in `T_u ∝ exp(S/ħ)`, when a period scan was attached.
    pub action: Option<f64>,
}

impl ScalingResult {
    pub fn with_action(mut self, action: Option<f64>) -> Self {
        self.action = action;
        self
    }
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Regress `ln Γ` on `ln ε` and `ln n_q` over successful rows with `Γ > 0`.
pub fn fit_scaling(records: &[SweepRecord]) -> Result<ScalingResult> {
    let pts: Vec<(f64, f64, f64)> = records
        .iter()
        .filter_map(|r| match r.gamma {
            Some(g) if g > 0.0 && r.epsilon > 0.0 => Some((r.epsilon, r.n_qubits as f64, g)),
            _ => None,
        })
        .collect();
    let n_eps = distinct(pts.iter().map(|p| p.0));
    let n_nq = distinct(pts.iter().map(|p| p.1));
    if n_eps < 3 || n_nq < 2 {
        return Err(Error::InsufficientSpread(format!(
            "need >= 3 epsilon values and >= 2 qubit counts, have {n_eps} and {n_nq}"
        )));
    }
    let n = pts.len();
    let x = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => pts[i].0.ln(),
        _ => pts[i].1.ln(),
    });
    let y = DVector::from_iterator(n, pts.iter().map(|p| p.2.ln()));
    let xtx = x.transpose() * &x;
    let inv = xtx
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InsufficientSpread("collinear regressors".into()))?;
    let beta = &inv * x.transpose() * &y;
    let resid = &y - &x * &beta;
    let dof = n.saturating_sub(3);
    let sigma2 = if dof > 0 { resid.norm_squared() / dof as f64 } else { 0.0 };
    let prefactor = (pts.iter().map(|p| p.2.ln() - 2.0 * p.0.ln() - 4.0 * p.1.ln()).sum::<f64>() / n as f64).exp();
    Ok(ScalingResult {
        exponent_eps: beta[1],
        exponent_eps_se: (sigma2 * inv[(1, 1)]).sqrt(),
        exponent_nq: beta[2],
        exponent_nq_se: (sigma2 * inv[(2, 2)]).sqrt(),
        prefactor,
        prefactor_free: beta[0].exp(),
        prefactor_free_log_se: (sigma2 * inv[(0, 0)]).sqrt(),
        points: n,
        action: None,
    })
}
