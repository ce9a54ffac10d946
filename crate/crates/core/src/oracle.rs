//! Split-operator propagator: kick on the grid, FFT to momentum, kinetic
//! phase, inverse FFT. `O(N log N)` per step.
//!
//! The momentum eigenfunctions `e^{inx_m}` differ from the DFT kernel by a
//! factor `(-1)^n`; the kinetic phase is diagonal in `n`, so the factor
//! cancels and needs no correction.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::dynamics::MapParams;
use crate::error::{Error, Result};
use crate::qstate::grid_x;

pub struct SplitOperator {
    params: MapParams,
    kick: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    backward: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SplitOperator {
    pub fn new(params: &MapParams) -> Self {
        let n = params.levels();
        let kick = (0..n).map(|m| Complex64::from_polar(1.0, params.kick_phase(grid_x(m, n)))).collect();
        // k² mod N keeps the phase argument small.
        let kinetic = (0..n)
            .map(|k| {
                let k2 = (k * k) % n;
                Complex64::from_polar(1.0, -TAU * k2 as f64 / n as f64)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let backward = planner.plan_fft_inverse(n);
        let scratch_len = forward.get_inplace_scratch_len().max(backward.get_inplace_scratch_len());
        Self {
            params: *params,
            kick,
            kinetic,
            forward,
            backward,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    /// One map iteration in place.
    pub fn step(&mut self, psi: &mut [Complex64]) -> Result<()> {
        let n = self.kick.len();
        if psi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: psi.len() });
        }
        psi.iter_mut().zip(&self.kick).for_each(|(a, k)| *a *= k);
        self.forward.process_with_scratch(psi, &mut self.scratch);
        // 1/√N on each transform, folded into the kinetic multiply.
        let scale = 1.0 / n as f64;
        psi.iter_mut().zip(&self.kinetic).for_each(|(a, k)| *a *= k * scale);
        self.backward.process_with_scratch(psi, &mut self.scratch);
        Ok(())
    }
}

/// One iteration on a fresh propagator.
pub fn split_operator_step(psi: &[Complex64], params: &MapParams) -> Result<Vec<Complex64>> {
    let mut out = psi.to_vec();
    SplitOperator::new(params).step(&mut out)?;
    Ok(out)
}

/// `W(x)` recorded at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: usize,
    pub w: Vec<f64>,
}

/// Run `iterations` steps, recording the distribution at every multiple of
/// `stride` (including `t = 0`).
pub fn evolve_oracle(
    psi: &[Complex64],
    params: &MapParams,
    iterations: usize,
    stride: usize,
) -> Result<Vec<Snapshot>> {
    let stride = stride.max(1);
    let mut prop = SplitOperator::new(params);
    let mut psi = psi.to_vec();
    if psi.len() != params.levels() {
        return Err(Error::DimensionMismatch { expected: params.levels(), found: psi.len() });
    }
    let record = |t: usize, psi: &[Complex64]| Snapshot { t, w: psi.iter().map(|a| a.norm_sqr()).collect() };
    let mut out = vec![record(0, &psi)];
    for t in 1..=iterations {
        prop.step(&mut psi)?;
        if t % stride == 0 {
            out.push(record(t, &psi));
        }
    }
    Ok(out)
}
