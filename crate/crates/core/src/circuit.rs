//! Compilation of one map iteration into gates.
//!
//! The kick `exp(-iKV(x)/ħ)` is diagonal on the coordinate grid. Writing
//! `x_m = -π + (2π/N) m` with `m = Σ_j α_j 2^j` turns the kick phase into a
//! degree-4 polynomial in `m`, and every power `m^d` expands into products of
//! at most four bits:
//!
//! ```text
//! m^d = Σ_{j1..jd} α_j1 ⋯ α_jd 2^(j1+⋯+jd)
//! ```
//!
//! Each product is a phase on the states where the distinct bits involved are
//! all set. Four-bit products use the work qubit: `T(j1,j2→w) · C²(w,j3,j4) ·
//! T(j1,j2→w)`, which leaves `w` in `|0⟩`.
//!
//! After the kick the register is Fourier transformed, the kinetic phase
//! `exp(-2πi k²/N)` is applied bitwise and the transform is undone. The QFT
//! omits the final swaps; the kinetic stage addresses the bit-reversed
//! register instead.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::dynamics::{wrap_angle, MapParams};
use crate::error::{Error, Result};
use crate::gateset::{apply_gate_unchecked, Gate, GateKind};
use crate::qstate::{grid_x, StateVector};

/// How the kick phase polynomial is turned into gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum KickExpansion {
    /// One gate group per ordered bit tuple of every monomial `m^d`; all
    /// degree-4 tuples go through the work qubit. This is the gate budget
    /// quoted for the algorithm (about `3 n_q^4` kick gates).
    #[default]
    Monomial,
    /// Tuples sharing a bit subset are merged into a single phase; only
    /// four-bit subsets use the work qubit.
    Merged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    Kick,
    Qft,
    Kinetic,
    InverseQft,
}

/// Kick phase `φ(m) = -K V(x_m)/ħ` in multilinear bit form:
/// `φ(m) ≡ θ_∅ + Σ_{S ⊆ bits(m)} θ_S (mod 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePolynomial {
    register_bits: usize,
    /// Coefficients of `φ` as a polynomial in `m`, lowest degree first.
    coefficients: [f64; 5],
    /// Subset angles keyed by bit mask, reduced into `(-π, π]`.
    terms: BTreeMap<usize, f64>,
    global_phase: f64,
}

impl PhasePolynomial {
    pub fn new(params: &MapParams) -> Self {
        let coefficients = kick_coefficients(params);
        let bits = params.register_qubits();
        let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
        for_each_tuple(bits, &coefficients, |mask, angle, _| {
            *sums.entry(mask).or_insert(0.0) += angle;
        });
        let terms = sums.into_iter().map(|(mask, s)| (mask, wrap_angle(s))).collect();
        Self { register_bits: bits, coefficients, terms, global_phase: wrap_angle(coefficients[0]) }
    }

    pub fn coefficients(&self) -> &[f64; 5] {
        &self.coefficients
    }

    /// Iterate `(mask, θ_S)` over all non-empty subsets with `|S| ≤ 4`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.terms.iter().map(|(&m, &t)| (m, t))
    }

    pub fn theta(&self, mask: usize) -> f64 {
        if mask == 0 {
            self.global_phase
        } else {
            self.terms.get(&mask).copied().unwrap_or(0.0)
        }
    }

    /// The dropped constant `θ_∅`.
    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn register_bits(&self) -> usize {
        self.register_bits
    }

    /// `θ_∅ + Σ_{S ⊆ bits(m)} θ_S`, not reduced.
    pub fn phase_at(&self, m: usize) -> f64 {
        self.global_phase
            + self.terms.iter().filter(|(&mask, _)| mask & m == mask).map(|(_, &t)| t).sum::<f64>()
    }
}

/// Coefficients of `-K V(c0 + c1 m)/ħ` in powers of `m`.
fn kick_coefficients(params: &MapParams) -> [f64; 5] {
    let c0 = -PI;
    let c1 = TAU / params.levels() as f64;
    let a2 = params.a * params.a;
    // x² - a² = (c0² - a²) + 2 c0 c1 m + c1² m²
    let q = [c0 * c0 - a2, 2.0 * c0 * c1, c1 * c1];
    let scale = -params.k / params.hbar();
    let mut out = [0.0; 5];
    for (i, qi) in q.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            out[i + j] += scale * qi * qj;
        }
    }
    out
}

/// Visit every ordered tuple `(j1..jd)` for `d = 1..=4` whose coefficient is
/// nonzero, passing the bit mask, the reduced angle and the degree.
fn for_each_tuple(bits: usize, coefficients: &[f64; 5], mut f: impl FnMut(usize, f64, usize)) {
    let mut tuple = [0usize; 4];
    for d in 1..=4 {
        let c = coefficients[d];
        if c == 0.0 {
            continue;
        }
        let total = bits.pow(d as u32);
        for code in 0..total {
            let mut rest = code;
            for slot in tuple.iter_mut().take(d) {
                *slot = rest % bits;
                rest /= bits;
            }
            let exponent: usize = tuple[..d].iter().sum();
            let mask = tuple[..d].iter().fold(0, |m, &j| m | (1 << j));
            f(mask, wrap_angle(c * (exponent as f64).exp2()), d);
        }
    }
}

fn mask_bits(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|&b| mask >> b & 1 == 1).collect()
}

/// Emit the phase `θ` on the subset `mask`, routing through the work qubit
/// when requested. The two lowest qubits of the subset drive the Toffolis.
fn emit_subset_phase(gates: &mut Vec<Gate>, mask: usize, theta: f64, work: usize, via_work: bool) {
    let qs = mask_bits(mask);
    if via_work && qs.len() >= 2 {
        let toffoli = Gate::toffoli(qs[0], qs[1], work).expect("distinct qubits");
        let mut rest = vec![work];
        rest.extend_from_slice(&qs[2..]);
        gates.push(toffoli);
        gates.push(Gate::phase_subset(&rest, theta).expect("valid subset"));
        gates.push(toffoli);
    } else {
        gates.push(Gate::phase_subset(&qs, theta).expect("valid subset"));
    }
}

/// Compile the kick stage.
pub fn compile_kick(params: &MapParams, expansion: KickExpansion) -> (PhasePolynomial, Vec<Gate>) {
    let poly = PhasePolynomial::new(params);
    let work = params.work_qubit();
    let mut gates = Vec::new();
    match expansion {
        KickExpansion::Monomial => {
            for_each_tuple(params.register_qubits(), &poly.coefficients, |mask, angle, degree| {
                emit_subset_phase(&mut gates, mask, angle, work, degree == 4);
            });
        }
        KickExpansion::Merged => {
            for (mask, theta) in poly.terms() {
                if theta != 0.0 {
                    emit_subset_phase(&mut gates, mask, theta, work, mask.count_ones() == 4);
                }
            }
        }
    }
    (poly, gates)
}

/// QFT on the physical register without output swaps.
///
/// Maps `|m⟩` to `N^{-1/2} Σ_k e^{2πi mk/N} |rev(k)⟩`. The inverse is the
/// reversed sequence with negated phases.
pub fn compile_qft(params: &MapParams, inverse: bool) -> Vec<Gate> {
    let bits = params.register_qubits();
    let mut gates = Vec::with_capacity(bits * (bits + 1) / 2);
    for j in (0..bits).rev() {
        gates.push(Gate::hadamard(j));
        for l in (0..j).rev() {
            let angle = PI / (1u64 << (j - l)) as f64;
            gates.push(Gate::controlled_phase(j, l, angle).expect("distinct qubits"));
        }
    }
    if inverse {
        gates.reverse();
        gates.iter_mut().for_each(|g| *g = g.inverse());
    }
    gates
}

/// `-2π 2^e / N` reduced into `(-π, π]`, exact in the exponent.
fn kinetic_angle(exponent: usize, bits: usize) -> f64 {
    if exponent >= bits {
        return 0.0;
    }
    wrap_angle(-TAU * (exponent as f64 - bits as f64).exp2())
}

/// Kinetic phase `exp(-iħk²/2) = exp(-2πi k²/N)` in the bit-reversed
/// momentum register: bit `i` of `k` lives on qubit `R-1-i`.
///
/// Every singleton and pair term is emitted, including those whose angle
/// reduces to zero.
pub fn compile_kinetic(params: &MapParams) -> Vec<Gate> {
    let bits = params.register_qubits();
    let qubit = |i: usize| bits - 1 - i;
    let mut gates = Vec::with_capacity(bits * (bits + 1) / 2);
    for i in 0..bits {
        gates.push(Gate::phase_subset(&[qubit(i)], kinetic_angle(2 * i, bits)).expect("valid subset"));
    }
    for i in 0..bits {
        for i2 in i + 1..bits {
            let angle = kinetic_angle(i + i2 + 1, bits);
            gates.push(Gate::phase_subset(&[qubit(i), qubit(i2)], angle).expect("valid subset"));
        }
    }
    gates
}

/// Per-stage gate tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    pub kick_toffoli: usize,
    pub kick_phase: usize,
    pub qft_h: usize,
    pub qft_cphase: usize,
    pub kinetic_phase: usize,
    pub total: usize,
}

/// An ordered gate list for one map iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    params: MapParams,
    gates: Vec<Gate>,
    segments: Vec<(Stage, Range<usize>)>,
}

impl Circuit {
    pub fn new(params: MapParams) -> Self {
        Self { params, gates: Vec::new(), segments: Vec::new() }
    }

    /// Append a stage; the gates are validated against the qubit count.
    pub fn push_stage(&mut self, stage: Stage, gates: Vec<Gate>) -> Result<()> {
        for g in &gates {
            g.check(self.params.n_qubits)?;
        }
        let start = self.gates.len();
        self.gates.extend(gates);
        self.segments.push((stage, start..self.gates.len()));
        Ok(())
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gates with the stage each belongs to.
    pub fn staged_gates(&self) -> impl Iterator<Item = (Stage, &Gate)> {
        self.segments.iter().flat_map(move |(stage, r)| self.gates[r.clone()].iter().map(move |g| (*stage, g)))
    }

    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for (stage, g) in self.staged_gates() {
            match (stage, g.kind()) {
                (Stage::Kick, GateKind::Toffoli) => c.kick_toffoli += 1,
                (Stage::Kick, _) => c.kick_phase += 1,
                (Stage::Qft | Stage::InverseQft, GateKind::Hadamard) => c.qft_h += 1,
                (Stage::Qft | Stage::InverseQft, _) => c.qft_cphase += 1,
                (Stage::Kinetic, _) => c.kinetic_phase += 1,
            }
        }
        c.total = self.gates.len();
        c
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.n_qubits() != self.params.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.params.n_qubits, found: state.n_qubits() });
        }
        Ok(())
    }

    /// Apply every gate exactly.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.check_state(state)?;
        let amps = state.amplitudes_mut();
        for g in &self.gates {
            apply_gate_unchecked(amps, g, None);
        }
        Ok(())
    }

    /// Apply gate `i` at `angle(i, gate)`; `None` runs the exact kernel.
    pub fn apply_with(
        &self,
        state: &mut StateVector,
        mut angle: impl FnMut(usize, &Gate) -> Option<f64>,
    ) -> Result<()> {
        self.check_state(state)?;
        let amps = state.amplitudes_mut();
        for (i, g) in self.gates.iter().enumerate() {
            apply_gate_unchecked(amps, g, angle(i, g));
        }
        Ok(())
    }

    /// Line-oriented dump: `KIND q0,q1,… angle` with 17 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            let qs: Vec<String> = g.qubits().iter().map(|q| q.to_string()).collect();
            writeln!(out, "{} {} {:.16e}", g.kind().label(), qs.join(","), g.angle()).unwrap();
        }
        out
    }
}

/// Compile one full map iteration with the default kick expansion.
pub fn compile_map(params: &MapParams) -> Circuit {
    compile_map_with(params, KickExpansion::default())
}

/// Kick, QFT, kinetic phase and inverse QFT.
pub fn compile_map_with(params: &MapParams, expansion: KickExpansion) -> Circuit {
    let mut c = Circuit::new(*params);
    let (_, kick) = compile_kick(params, expansion);
    c.push_stage(Stage::Kick, kick).expect("compiled gates are in range");
    c.push_stage(Stage::Qft, compile_qft(params, false)).expect("in range");
    c.push_stage(Stage::Kinetic, compile_kinetic(params)).expect("in range");
    c.push_stage(Stage::InverseQft, compile_qft(params, true)).expect("in range");
    c
}

/// Direct evaluation of the kick phase at grid index `m`.
pub fn kick_phase_at(params: &MapParams, m: usize) -> f64 {
    params.kick_phase(grid_x(m, params.levels()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> MapParams {
        MapParams::new(0.04, 1.6, 6).unwrap()
    }

    fn angle_diff(a: f64, b: f64) -> f64 {
        wrap_angle(a - b).abs()
    }

    #[test]
    fn coefficients_reproduce_the_potential() {
        let p = fig1();
        let c = kick_coefficients(&p);
        for m in 0..32 {
            let mf = m as f64;
            let poly: f64 = c.iter().enumerate().map(|(d, cd)| cd * mf.powi(d as i32)).sum();
            assert!((poly - kick_phase_at(&p, m)).abs() < 1e-9 * (1.0 + poly.abs()));
        }
    }

    #[test]
    fn zero_kick_is_empty() {
        let p = MapParams::new(0.0, 1.6, 6).unwrap();
        for e in [KickExpansion::Monomial, KickExpansion::Merged] {
            let (poly, gates) = compile_kick(&p, e);
            assert!(gates.is_empty());
            assert!(poly.terms().all(|(_, t)| t == 0.0));
        }
    }

    #[test]
    fn subset_sums_match_kick_phase() {
        let p = fig1();
        let poly = PhasePolynomial::new(&p);
        for m in 0..32 {
            assert!(angle_diff(poly.phase_at(m), kick_phase_at(&p, m)) < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn merged_subset_count_bound() {
        let (_, gates) = compile_kick(&fig1(), KickExpansion::Merged);
        let subset_gates = gates.iter().filter(|g| g.kind() == GateKind::PhaseSubset).count();
        assert!(subset_gates <= 30);
        // five 4-subsets, each expanded into three gates
        assert_eq!(gates.len(), 30 + 2 * 5);
    }

    #[test]
    fn monomial_kick_counts() {
        let (_, gates) = compile_kick(&fig1(), KickExpansion::Monomial);
        // 625 four-tuples: 5 single-bit ones direct, 620 through the work qubit.
        let toffolis = gates.iter().filter(|g| g.kind() == GateKind::Toffoli).count();
        assert_eq!(toffolis, 2 * 620);
        assert_eq!(gates.len(), 3 * 620 + 5 + 125 + 25 + 5);
    }

    #[test]
    fn work_qubit_only_inside_triples() {
        for e in [KickExpansion::Monomial, KickExpansion::Merged] {
            let c = compile_map_with(&fig1(), e);
            let g = c.gates();
            let w = 5;
            let mut i = 0;
            while i < g.len() {
                if g[i].touches(w) {
                    assert_eq!(g[i].kind(), GateKind::Toffoli);
                    assert!(g[i + 1].touches(w) && g[i + 1].kind() == GateKind::PhaseSubset);
                    assert_eq!(g[i + 2], g[i]);
                    i += 3;
                } else {
                    i += 1;
                }
            }
        }
    }

    #[test]
    fn kinetic_diagonal() {
        let p = fig1();
        let gates = compile_kinetic(&p);
        assert_eq!(gates.len(), 5 + 10);
        let n = 32usize;
        let rev = |k: usize| (0..5).fold(0, |r, b| r | ((k >> b & 1) << (4 - b)));
        for k in 0..n {
            let reg = rev(k);
            let total: f64 = gates.iter().filter(|g| reg & g.mask() == g.mask()).map(|g| g.angle()).sum();
            let expect = -TAU * (k * k) as f64 / n as f64;
            assert!(angle_diff(total, expect) < 1e-10, "k = {k}");
            let shifted = k as f64 - n as f64;
            assert!(angle_diff(expect, -TAU * shifted * shifted / n as f64) < 1e-10);
        }
    }

    #[test]
    fn qft_gate_counts() {
        let g = compile_qft(&fig1(), false);
        assert_eq!(g.iter().filter(|g| g.kind() == GateKind::Hadamard).count(), 5);
        assert_eq!(g.iter().filter(|g| g.kind() == GateKind::ControlledPhase).count(), 10);
    }

    #[test]
    fn counts_are_consistent() {
        let empty = Circuit::new(fig1());
        assert_eq!(empty.counts(), GateCounts::default());

        let mut kick_only = Circuit::new(MapParams::new(0.0, 1.6, 6).unwrap());
        let (_, gates) = compile_kick(kick_only.params(), KickExpansion::Monomial);
        kick_only.push_stage(Stage::Kick, gates).unwrap();
        assert_eq!(kick_only.counts().total, 0);

        let c = compile_map(&fig1());
        let t = c.counts();
        assert_eq!(t.total, c.len());
        assert_eq!(t.kick_toffoli + t.kick_phase + t.qft_h + t.qft_cphase + t.kinetic_phase, t.total);
        assert_eq!(t.qft_h, 10);
        assert_eq!(t.qft_cphase, 20);
        assert_eq!(t.kinetic_phase, 15);
    }

    #[test]
    fn push_stage_rejects_out_of_range() {
        let mut c = Circuit::new(fig1());
        assert!(c.push_stage(Stage::Kick, vec![Gate::hadamard(6)]).is_err());
    }

    #[test]
    fn dump_format() {
        let mut c = Circuit::new(fig1());
        c.push_stage(Stage::Kick, vec![Gate::toffoli(0, 1, 5).unwrap(), Gate::phase_subset(&[5, 2], -0.25).unwrap()])
            .unwrap();
        let d = c.dump();
        let lines: Vec<_> = d.lines().collect();
        assert_eq!(lines[0], "TOFFOLI 0,1,5 3.1415926535897931e0");
        assert_eq!(lines[1], "PHASE 5,2 -2.5000000000000000e-1");
    }
}
