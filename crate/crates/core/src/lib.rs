//! Quantum simulation of chaos-assisted tunneling in the double-well map.
//!
//! The crate compiles one iteration of the quantized map
//! `ψ → exp(-ip²/2ħ) exp(-iKV(x)/ħ) ψ` into elementary gates on
//! `n_q` qubits (`n_q - 1` for the coordinate register plus one work qubit),
//! simulates the circuit on a statevector with optional gate-angle noise, and
//! extracts the tunneling period `T_u` and the noise-induced decay rate `Γ`
//! from the probability `W_a(t)` of finding the packet at `x < 0`.
//!
//! Layout:
//!
//! - [`dynamics`]: classical map and Poincaré sections, plus [`MapParams`].
//! - [`qstate`]: statevector, initial packets, `W(x)` and `W_a`.
//! - [`gateset`]: gate records and in-place kernels.
//! - [`circuit`]: kick phase polynomial, QFT and kinetic stage compilation.
//! - [`noise`]: jittered gate angles with keyed, reproducible streams.
//! - [`oracle`]: FFT split-operator reference propagator.
//! - [`evolution`]: trajectories on either backend, noisy ensembles.
//! - [`analysis`]: damped-cosine fits, `Γ` sweeps, scaling regression,
//!   period scans.
//! - [`cli`]: configuration and output writers behind the `catmap` binary.
//!
//! ```
//! use catmap::{compile_map, init_coherent, w_alive, MapParams};
//!
//! let params = MapParams::new(0.04, 1.6, 6).unwrap();
//! let circuit = compile_map(&params);
//! let mut state = init_coherent(&params, -params.a, 0.0).unwrap();
//! for _ in 0..45 {
//!     circuit.apply(&mut state).unwrap();
//! }
//! // half a tunneling period later most of the packet sits in the right well
//! assert!(w_alive(&state) < 0.3);
//! ```

pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod evolution;
pub mod gateset;
pub mod noise;
pub mod oracle;
pub mod qstate;

pub use circuit::{compile_map, compile_map_with, Circuit, GateCounts, KickExpansion};
pub use dynamics::{classical_step, poincare_section, MapParams, PhasePoint};
pub use error::{Error, Result};
pub use evolution::{evolve, Backend, EvolutionConfig, InitialState, Trajectory};
pub use gateset::{apply_gate, Gate, GateKind};
pub use noise::NoiseModel;
pub use oracle::SplitOperator;
pub use qstate::{distribution, init_coherent, init_step, overlap, w_alive, StateVector};
