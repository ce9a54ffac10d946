//! Gate records and in-place statevector kernels.
//!
//! Every gate is `exp(iθ Π)` for a projector `Π`:
//!
//! | kind              | `Π`                                   | canonical `θ` |
//! |-------------------|---------------------------------------|---------------|
//! | `PhaseSubset`     | all qubits of `S` in `|1⟩`            | compiled      |
//! | `ControlledPhase` | both qubits in `|1⟩`                  | compiled      |
//! | `Hadamard`        | the `-1` eigenvector of `H`           | `π`           |
//! | `Toffoli`         | controls in `|11⟩`, target in `|−⟩`   | `π`           |
//!
//! At the canonical angle the last two reproduce `H` and the Toffoli gate
//! exactly. Perturbing the angle rotates about the same axis, which is the
//! hook used by the noise model.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    PhaseSubset,
    ControlledPhase,
    Hadamard,
    Toffoli,
}

impl GateKind {
    pub fn label(self) -> &'static str {
        match self {
            GateKind::PhaseSubset => "PHASE",
            GateKind::ControlledPhase => "CPHASE",
            GateKind::Hadamard => "H",
            GateKind::Toffoli => "TOFFOLI",
        }
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, GateKind::PhaseSubset | GateKind::ControlledPhase)
    }
}

/// A gate on at most four qubits.
///
/// For `Toffoli` the qubit order is `[c1, c2, target]`; for the diagonal
/// kinds the qubits form the subset `S` and their order is irrelevant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 4],
    arity: u8,
    angle: f64,
}

impl Gate {
    fn build(kind: GateKind, qs: &[usize], angle: f64) -> Result<Self> {
        if qs.is_empty() || qs.len() > 4 {
            return Err(Error::InvalidGate(format!("{} needs 1..=4 qubits, got {}", kind.label(), qs.len())));
        }
        for (i, q) in qs.iter().enumerate() {
            if qs[..i].contains(q) {
                return Err(Error::DuplicateQubit(*q));
            }
        }
        let mut qubits = [0; 4];
        qubits[..qs.len()].copy_from_slice(qs);
        Ok(Self { kind, qubits, arity: qs.len() as u8, angle })
    }

    /// Phase `e^{iθ}` on every basis state whose bits in `subset` are all set.
    pub fn phase_subset(subset: &[usize], angle: f64) -> Result<Self> {
        Self::build(GateKind::PhaseSubset, subset, angle)
    }

    pub fn controlled_phase(control: usize, target: usize, angle: f64) -> Result<Self> {
        Self::build(GateKind::ControlledPhase, &[control, target], angle)
    }

    pub fn hadamard(q: usize) -> Self {
        Self::build(GateKind::Hadamard, &[q], PI).expect("single qubit")
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Result<Self> {
        Self::build(GateKind::Toffoli, &[c1, c2, target], PI)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.arity as usize]
    }

    /// Canonical rotation angle.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn mask(&self) -> usize {
        self.qubits().iter().fold(0, |m, &q| m | (1 << q))
    }

    pub fn touches(&self, q: usize) -> bool {
        self.qubits().contains(&q)
    }

    pub fn max_qubit(&self) -> usize {
        *self.qubits().iter().max().expect("gate has qubits")
    }

    /// Same gate with the sign of the angle flipped (the inverse for the
    /// diagonal kinds; `H` and Toffoli are self-inverse).
    pub fn inverse(&self) -> Self {
        let mut g = *self;
        if g.kind.is_diagonal() {
            g.angle = -g.angle;
        }
        g
    }

    pub fn check(&self, n_qubits: usize) -> Result<()> {
        match self.qubits().iter().find(|&&q| q >= n_qubits) {
            Some(&index) => Err(Error::QubitOutOfRange { index, n_qubits }),
            None => Ok(()),
        }
    }
}

/// Visit, in increasing order, every index below `len` whose bits in `set`
/// are 1 and whose bits in `clear` are 0.
#[inline]
fn for_each_masked(len: usize, set: usize, clear: usize, mut f: impl FnMut(usize)) {
    let mut i = set;
    loop {
        f(i);
        // carry ripples through the fixed bits while they are held at 1
        let next = (i | clear) + 1;
        if next >= len {
            break;
        }
        i = (next | set) & !clear;
    }
}

fn check_qubits(qs: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &q) in qs.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        if qs[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

fn phase_kernel(amps: &mut [Complex64], mask: usize, angle: f64) {
    let phase = Complex64::from_polar(1.0, angle);
    for_each_masked(amps.len(), mask, 0, |i| amps[i] *= phase);
}

fn hadamard_kernel(amps: &mut [Complex64], q: usize) {
    let bit = 1 << q;
    for_each_masked(amps.len(), 0, bit, |i0| {
        let (a, b) = (amps[i0], amps[i0 | bit]);
        amps[i0] = (a + b) * FRAC_1_SQRT_2;
        amps[i0 | bit] = (a - b) * FRAC_1_SQRT_2;
    });
}

/// `exp(iθ |v⟩⟨v|)` with `|v⟩ = (sin π/8, -cos π/8)`, the `-1` eigenvector
/// of `H`.
fn hadamard_rotation_kernel(amps: &mut [Complex64], q: usize, angle: f64) {
    let bit = 1 << q;
    let (s, c) = FRAC_PI_8.sin_cos();
    let g = Complex64::from_polar(1.0, angle) - 1.0;
    for_each_masked(amps.len(), 0, bit, |i0| {
        let (a, b) = (amps[i0], amps[i0 | bit]);
        let proj = g * (a * s - b * c);
        amps[i0] = a + proj * s;
        amps[i0 | bit] = b - proj * c;
    });
}

fn toffoli_kernel(amps: &mut [Complex64], c1: usize, c2: usize, t: usize) {
    let ctrl = (1 << c1) | (1 << c2);
    let bit = 1 << t;
    for_each_masked(amps.len(), ctrl, bit, |i0| amps.swap(i0, i0 | bit));
}

/// `exp(iθ P_{11} ⊗ |−⟩⟨−|)`.
fn toffoli_rotation_kernel(amps: &mut [Complex64], c1: usize, c2: usize, t: usize, angle: f64) {
    let ctrl = (1 << c1) | (1 << c2);
    let bit = 1 << t;
    let half_g = (Complex64::from_polar(1.0, angle) - 1.0) * 0.5;
    for_each_masked(amps.len(), ctrl, bit, |i0| {
        let (a, b) = (amps[i0], amps[i0 | bit]);
        let d = half_g * (a - b);
        amps[i0] = a + d;
        amps[i0 | bit] = b - d;
    });
}

/// Multiply by `e^{iθ}` every amplitude whose bits in `subset` are all 1.
/// Touches only the `2^(n - |S|)` selected amplitudes.
pub fn apply_phase_subset(state: &mut StateVector, subset: &[usize], angle: f64) -> Result<()> {
    if subset.is_empty() || subset.len() > 4 {
        return Err(Error::InvalidGate(format!("phase subset size {} not in 1..=4", subset.len())));
    }
    check_qubits(subset, state.n_qubits())?;
    let mask = subset.iter().fold(0, |m, &q| m | (1 << q));
    phase_kernel(state.amplitudes_mut(), mask, angle);
    Ok(())
}

pub fn apply_hadamard(state: &mut StateVector, q: usize) -> Result<()> {
    check_qubits(&[q], state.n_qubits())?;
    hadamard_kernel(state.amplitudes_mut(), q);
    Ok(())
}

pub fn apply_toffoli(state: &mut StateVector, c1: usize, c2: usize, target: usize) -> Result<()> {
    check_qubits(&[c1, c2, target], state.n_qubits())?;
    toffoli_kernel(state.amplitudes_mut(), c1, c2, target);
    Ok(())
}

/// Apply `gate`, optionally at a perturbed angle.
///
/// Without an override the exact kernel runs. With one, diagonal gates take
/// the new phase and `H`/Toffoli apply the rotation `exp(iθΠ)`, which equals
/// the exact gate at `θ = π`.
pub fn apply_gate(state: &mut StateVector, gate: &Gate, angle_override: Option<f64>) -> Result<()> {
    gate.check(state.n_qubits())?;
    apply_gate_unchecked(state.amplitudes_mut(), gate, angle_override);
    Ok(())
}

/// Kernel dispatch without range checks; callers validate the gate list once
/// up front.
pub(crate) fn apply_gate_unchecked(amps: &mut [Complex64], gate: &Gate, angle_override: Option<f64>) {
    let qs = gate.qubits();
    match (gate.kind, angle_override) {
        (GateKind::PhaseSubset | GateKind::ControlledPhase, theta) => {
            phase_kernel(amps, gate.mask(), theta.unwrap_or(gate.angle))
        }
        (GateKind::Hadamard, None) => hadamard_kernel(amps, qs[0]),
        (GateKind::Hadamard, Some(theta)) => hadamard_rotation_kernel(amps, qs[0], theta),
        (GateKind::Toffoli, None) => toffoli_kernel(amps, qs[0], qs[1], qs[2]),
        (GateKind::Toffoli, Some(theta)) => toffoli_rotation_kernel(amps, qs[0], qs[1], qs[2], theta),
    }
}
