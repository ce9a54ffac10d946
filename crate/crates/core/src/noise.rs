//! Noisy gates: every gate application runs at its canonical angle plus an
//! independent jitter drawn uniformly from `(-ε/2, ε/2)`.
//!
//! Jitter comes from ChaCha8 keyed by the seed, with the realization id as
//! the stream number. Draw `g` of iteration `t` sits at a fixed position of
//! that stream (`t · n_gates + g`), so a realization is reproducible
//! regardless of how realizations are scheduled. A draw is consumed for
//! every gate, including exempt ones.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::qstate::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Full width of the jitter interval.
    pub epsilon: f64,
    /// Gates acting on the work qubit run noiselessly.
    pub exempt_work_qubit: bool,
    /// Only diagonal phase gates are jittered.
    pub phase_gates_only: bool,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidParams(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        Ok(Self { epsilon, exempt_work_qubit: false, phase_gates_only: false, seed })
    }

    pub fn noiseless() -> Self {
        Self { epsilon: 0.0, exempt_work_qubit: false, phase_gates_only: false, seed: 0 }
    }

    pub fn with_exempt_work_qubit(mut self, exempt: bool) -> Self {
        self.exempt_work_qubit = exempt;
        self
    }

    pub fn with_phase_gates_only(mut self, only: bool) -> Self {
        self.phase_gates_only = only;
        self
    }

    pub fn is_noiseless(&self) -> bool {
        self.epsilon == 0.0
    }
}

/// Uniform draw on `(-ε/2, ε/2)` from one 64-bit word.
pub fn sample_jitter(epsilon: f64, rng: &mut impl RngCore) -> f64 {
    if epsilon == 0.0 {
        // keep the stream position independent of ε
        rng.next_u64();
        return 0.0;
    }
    // 53 random bits, offset by half a unit so both ends are excluded.
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    epsilon * (u - 0.5)
}

/// Deterministic jitter source for one realization.
pub struct JitterStream {
    rng: ChaCha8Rng,
    epsilon: f64,
    gates_per_iteration: u128,
}

impl JitterStream {
    pub fn new(model: &NoiseModel, realization: u64, gates_per_iteration: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
        rng.set_stream(realization);
        Self { rng, epsilon: model.epsilon, gates_per_iteration: gates_per_iteration as u128 }
    }

    /// Position the stream at the first draw of `iteration`.
    pub fn seek(&mut self, iteration: u64) {
        // two 32-bit words per draw
        self.rng.set_word_pos(iteration as u128 * self.gates_per_iteration * 2);
    }

    pub fn next_jitter(&mut self) -> f64 {
        sample_jitter(self.epsilon, &mut self.rng)
    }
}

/// One noisy map iteration. Iteration `t` always uses the same draws for a
/// given `(seed, realization)`.
pub fn noisy_iterate(
    state: &mut StateVector,
    circuit: &Circuit,
    model: &NoiseModel,
    stream: &mut JitterStream,
    iteration: u64,
) -> Result<()> {
    if model.is_noiseless() {
        return circuit.apply(state);
    }
    let work = circuit.params().work_qubit();
    stream.seek(iteration);
    circuit.apply_with(state, |_, g| {
        let delta = stream.next_jitter();
        let exempt = (model.exempt_work_qubit && g.touches(work)) || (model.phase_gates_only && !g.kind().is_diagonal());
        (!exempt).then(|| g.angle() + delta)
    })
}
