//! Classical double-well map and Poincaré sections.
//!
//! One iteration kicks the momentum with the force of the quartic potential
//! `V(x) = (x^2 - a^2)^2` and then rotates the coordinate freely:
//!
//! ```text
//! p' = p - K V'(x)
//! x' = x + p'   (mod 2π, reduced into (-π, π])
//! ```
//!
//! Momentum is kept unreduced during iteration. Section output reduces both
//! coordinates into the plotting cell.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduce an angle into the half-open interval `(-π, π]`.
///
/// `-π` maps to `+π`.
pub fn wrap_angle(v: f64) -> f64 {
    if v > -PI && v <= PI {
        return v;
    }
    let r = v.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Double-well potential `V(x) = (x^2 - a^2)^2`.
pub fn potential(x: f64, a: f64) -> f64 {
    let d = x * x - a * a;
    d * d
}

/// Derivative `V'(x) = 4x(x^2 - a^2)`.
pub fn potential_slope(x: f64, a: f64) -> f64 {
    4.0 * x * (x * x - a * a)
}

/// A point in the classical phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub p: f64,
    pub x: f64,
}

impl PhasePoint {
    pub const fn new(p: f64, x: f64) -> Self {
        Self { p, x }
    }

    /// Parity image `(p, x) -> (-p, -x)`.
    pub fn mirrored(self) -> Self {
        Self::new(-self.p, -self.x)
    }
}

/// Map constants shared by the classical map, the quantum propagators and
/// the circuit compiler.
///
/// The quantum register holds `n_qubits - 1` physical qubits plus one work
/// qubit, so the torus carries `N = 2^(n_qubits-1)` levels and the effective
/// Planck constant is `4π/N` (quantum resonance with two classical cells).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    /// Kick strength `K`.
    pub k: f64,
    /// Well position `a`.
    pub a: f64,
    /// Total qubit count including the work qubit.
    pub n_qubits: usize,
}

impl MapParams {
    pub const MIN_QUBITS: usize = 4;
    pub const MAX_QUBITS: usize = 26;

    pub fn new(k: f64, a: f64, n_qubits: usize) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::InvalidParams(format!("K must be finite and >= 0, got {k}")));
        }
        if !(a > 0.0 && a < PI) {
            return Err(Error::InvalidParams(format!("a must lie in (0, π), got {a}")));
        }
        if !(Self::MIN_QUBITS..=Self::MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::InvalidParams(format!(
                "n_q must lie in [{}, {}], got {n_qubits}",
                Self::MIN_QUBITS,
                Self::MAX_QUBITS
            )));
        }
        Ok(Self { k, a, n_qubits })
    }

    /// Number of physical qubits, `n_q - 1`.
    pub fn register_qubits(&self) -> usize {
        self.n_qubits - 1
    }

    /// Index of the work qubit (the most significant one).
    pub fn work_qubit(&self) -> usize {
        self.n_qubits - 1
    }

    /// Number of levels `N = 2^(n_q-1)`.
    pub fn levels(&self) -> usize {
        1 << (self.n_qubits - 1)
    }

    /// Effective Planck constant `4π/N`.
    pub fn hbar(&self) -> f64 {
        4.0 * PI / self.levels() as f64
    }

    /// Small-oscillation frequency at the bottom of either well,
    /// `sqrt(K V''(±a)) = 2a sqrt(2K)`.
    pub fn well_frequency(&self) -> f64 {
        2.0 * self.a * (2.0 * self.k).sqrt()
    }

    /// Kick phase `-K V(x) / ħ` at coordinate `x`.
    pub fn kick_phase(&self, x: f64) -> f64 {
        -self.k * potential(x, self.a) / self.hbar()
    }
}

/// One iteration of the classical map.
pub fn classical_step(pt: PhasePoint, params: &MapParams) -> PhasePoint {
    let p = pt.p - params.k * potential_slope(pt.x, params.a);
    let x = wrap_angle(pt.x + p);
    PhasePoint { p, x }
}

/// A single orbit of a Poincaré section; points are reduced into the cell
/// `(-π, π]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub id: usize,
    pub start: PhasePoint,
    pub points: Vec<PhasePoint>,
}

/// Iterate each start `iters` times and collect the iterates (the start
/// itself is not included).
pub fn poincare_section(
    starts: &[PhasePoint],
    params: &MapParams,
    iters: usize,
) -> Result<Vec<Orbit>> {
    if iters == 0 {
        return Err(Error::InvalidParams("poincare section needs iters >= 1".into()));
    }
    Ok(starts
        .iter()
        .enumerate()
        .map(|(id, &start)| {
            let mut pt = PhasePoint::new(start.p, wrap_angle(start.x));
            let points = (0..iters)
                .map(|_| {
                    pt = classical_step(pt, params);
                    PhasePoint::new(wrap_angle(pt.p), pt.x)
                })
                .collect();
            Orbit { id, start, points }
        })
        .collect())
}
