//! Statevector container, initial states and observables.
//!
//! Basis index layout: `i = m + N·w`, where `m ∈ [0, N)` is the physical
//! register (qubit `j` carries `2^j` of `m`) and `w` is the work qubit, the
//! most significant bit. Register value `m` encodes the grid coordinate
//! `x_m = -π + 2πm/N`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::dynamics::MapParams;
use crate::error::{Error, Result};

/// Grid coordinate `x_m = -π + 2πm/N`.
pub fn grid_x(m: usize, levels: usize) -> f64 {
    -PI + TAU * m as f64 / levels as f64
}

/// All `N` grid coordinates.
pub fn grid_points(levels: usize) -> Vec<f64> {
    (0..levels).map(|m| grid_x(m, levels)).collect()
}

/// Amplitudes over `2^n_q` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize << n_qubits;
        if amps.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: amps.len() });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Embed a wave function over the `N` register values with the work
    /// qubit in `|0⟩`.
    pub fn from_register(n_qubits: usize, psi: &[Complex64]) -> Result<Self> {
        let levels = 1usize << (n_qubits - 1);
        if psi.len() != levels {
            return Err(Error::DimensionMismatch { expected: levels, found: psi.len() });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[..levels].copy_from_slice(psi);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of register levels `N = 2^(n_q-1)`.
    pub fn levels(&self) -> usize {
        self.amps.len() / 2
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Amplitudes of the work-qubit-zero sector.
    pub fn register(&self) -> &[Complex64] {
        &self.amps[..self.levels()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// Probability that the work qubit reads 1.
    pub fn work_population(&self) -> f64 {
        self.amps[self.levels()..].iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Periodized minimal-uncertainty packet centred at `(x0, p0)` with the
/// work qubit in `|0⟩`.
///
/// Width `σ² = ħ/(2ω)` with the well frequency `ω = 2a sqrt(2K)`.
pub fn init_coherent(params: &MapParams, x0: f64, p0: f64) -> Result<StateVector> {
    let omega = params.well_frequency();
    let hbar = params.hbar();
    let sigma2 = hbar / (2.0 * omega);
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::DegenerateWidth);
    }
    let levels = params.levels();
    let mut psi: Vec<Complex64> = (0..levels)
        .map(|m| {
            let x = grid_x(m, levels);
            [-1.0, 0.0, 1.0]
                .iter()
                .map(|&l| {
                    let shifted = x + TAU * l;
                    let d = shifted - x0;
                    Complex64::from_polar((-d * d / (4.0 * sigma2)).exp(), p0 * shifted / hbar)
                })
                .sum()
        })
        .collect();
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_register(params.n_qubits, &psi)
}

/// Uniform amplitude `sqrt(2/N)` on every grid point with `x < 0`.
pub fn init_step(params: &MapParams) -> StateVector {
    let levels = params.levels();
    let amp = (2.0 / levels as f64).sqrt();
    let psi: Vec<Complex64> = (0..levels)
        .map(|m| if m < levels / 2 { Complex64::new(amp, 0.0) } else { Complex64::new(0.0, 0.0) })
        .collect();
    StateVector::from_register(params.n_qubits, &psi).expect("register length matches")
}

/// Coordinate distribution `W(x_m)` with the work qubit traced out.
pub fn distribution(state: &StateVector) -> Vec<f64> {
    let levels = state.levels();
    let (low, high) = state.amps.split_at(levels);
    low.iter().zip(high).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
}

/// Probability on the `x < 0` half of the grid, `m < N/2`.
pub fn w_alive(state: &StateVector) -> f64 {
    let levels = state.levels();
    let half = levels / 2;
    state.amps[..half].iter().chain(&state.amps[levels..levels + half]).map(|a| a.norm_sqr()).sum()
}

/// Same observable on a bare register wave function.
pub fn w_alive_register(psi: &[Complex64]) -> f64 {
    psi[..psi.len() / 2].iter().map(|a| a.norm_sqr()).sum()
}

/// Mean coordinate of a distribution over the grid.
pub fn mean_position(w: &[f64]) -> f64 {
    let levels = w.len();
    w.iter().enumerate().map(|(m, p)| p * grid_x(m, levels)).sum()
}

/// `⟨s1|s2⟩`.
pub fn overlap(s1: &StateVector, s2: &StateVector) -> Result<Complex64> {
    if s1.amps.len() != s2.amps.len() {
        return Err(Error::DimensionMismatch { expected: s1.amps.len(), found: s2.amps.len() });
    }
    Ok(s1.amps.iter().zip(&s2.amps).map(|(a, b)| a.conj() * b).sum())
}

/// `|⟨s1|s2⟩|²`.
pub fn fidelity(s1: &StateVector, s2: &StateVector) -> Result<f64> {
    overlap(s1, s2).map(|o| o.norm_sqr())
}
