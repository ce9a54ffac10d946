//! Invariants checked over randomized inputs.

use std::f64::consts::{PI, TAU};

use catmap::analysis::{fit_damped_cosine, measure_decay, FitOptions, FitResult, SweepCell, SweepOptions};
use catmap::circuit::{compile_kick, PhasePolynomial};
use catmap::gateset::apply_phase_subset;
use catmap::noise::{noisy_iterate, JitterStream};
use catmap::qstate::fidelity;
use catmap::{compile_map, Gate, KickExpansion, MapParams, NoiseModel, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_state(n_qubits: usize, seed: u64, register_only: bool) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = if register_only { 1 << (n_qubits - 1) } else { 1 << n_qubits };
    let amps: Vec<Complex64> = (0..dim).map(|_| Complex64::new(uniform(&mut rng) - 0.5, uniform(&mut rng) - 0.5)).collect();
    let mut s = if register_only {
        StateVector::from_register(n_qubits, &amps).unwrap()
    } else {
        StateVector::from_amplitudes(n_qubits, amps).unwrap()
    };
    s.normalize();
    s
}

/// `|m⟩ → |−m mod N⟩`, the image of `x → −x` on the grid.
fn parity(state: &StateVector) -> StateVector {
    let n = state.levels();
    let reg = state.register();
    let flipped: Vec<Complex64> = (0..n).map(|m| reg[(n - m) % n]).collect();
    StateVector::from_register(state.n_qubits(), &flipped).unwrap()
}

fn kick_oracle(params: &MapParams, m: usize) -> f64 {
    let x = -PI + TAU * m as f64 / params.levels() as f64;
    -params.k * (x * x - params.a * params.a).powi(2) / params.hbar()
}

fn angle_gap(a: f64, b: f64) -> f64 {
    (a - b).rem_euclid(TAU).min((b - a).rem_euclid(TAU))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn noisy_evolution_preserves_norm(seed in any::<u64>(), eps in 0.0f64..0.2, n in 5usize..8) {
        let params = MapParams::new(0.04, 1.6, n).unwrap();
        let circuit = compile_map(&params);
        let model = NoiseModel::new(eps, seed).unwrap();
        let mut stream = JitterStream::new(&model, 0, circuit.len());
        let mut state = random_state(n, seed, false);
        for it in 0..5 {
            noisy_iterate(&mut state, &circuit, &model, &mut stream, it).unwrap();
        }
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_evolution_commutes_with_parity(seed in any::<u64>(), k in 0.0f64..0.4, a in 0.3f64..2.5, n in 5usize..8) {
        let params = MapParams::new(k, a, n).unwrap();
        let circuit = compile_map(&params);
        let mut direct = random_state(n, seed, true);
        let mut mirrored = parity(&direct);
        for _ in 0..3 {
            circuit.apply(&mut direct).unwrap();
            circuit.apply(&mut mirrored).unwrap();
        }
        let image = parity(&direct);
        let err: f64 = image.amplitudes().iter().zip(mirrored.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum();
        prop_assert!(err.sqrt() < 1e-10, "err {}", err.sqrt());
    }

    #[test]
    fn phase_subset_gates_commute(
        seed in any::<u64>(),
        q1 in prop::sample::subsequence((0..6).collect::<Vec<usize>>(), 1..=4),
        q2 in prop::sample::subsequence((0..6).collect::<Vec<usize>>(), 1..=4),
        t1 in -PI..PI,
        t2 in -PI..PI,
    ) {
        let mut s1 = random_state(6, seed, false);
        let mut s2 = s1.clone();
        apply_phase_subset(&mut s1, &q1, t1).unwrap();
        apply_phase_subset(&mut s1, &q2, t2).unwrap();
        apply_phase_subset(&mut s2, &q2, t2).unwrap();
        apply_phase_subset(&mut s2, &q1, t1).unwrap();
        prop_assert!((fidelity(&s1, &s2).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_gates_undo(seed in any::<u64>(), q in 0usize..6, t in -PI..PI) {
        let original = random_state(6, seed, false);
        let mut s = original.clone();
        let g = Gate::phase_subset(&[q, (q + 1) % 6], t).unwrap();
        catmap::apply_gate(&mut s, &g, None).unwrap();
        catmap::apply_gate(&mut s, &g.inverse(), None).unwrap();
        prop_assert!((fidelity(&s, &original).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kick_polynomial_matches_potential(k in 0.0f64..0.5, a in 0.2f64..3.0, n in 5usize..10) {
        let params = MapParams::new(k, a, n).unwrap();
        let poly = PhasePolynomial::new(&params);
        for m in 0..params.levels() {
            prop_assert!(angle_gap(poly.phase_at(m), kick_oracle(&params, m)) < 1e-10);
        }
    }

    #[test]
    fn fit_is_idempotent(period in 20.0f64..200.0, gamma in 0.0f64..0.01, amp in 0.1f64..0.5, phase in -1.0f64..1.0, base in 0.4f64..0.6) {
        let truth = FitResult { period, gamma, amplitude: amp, phase, baseline: base, rms_residual: 0.0 };
        let t: Vec<f64> = (0..1200).map(f64::from).collect();
        let y: Vec<f64> = t.iter().map(|&t| truth.eval(t)).collect();
        let fit = fit_damped_cosine(&t, &y, &FitOptions::default()).unwrap();
        let y2: Vec<f64> = t.iter().map(|&t| fit.eval(t)).collect();
        let refit = fit_damped_cosine(&t, &y2, &FitOptions::default()).unwrap();
        for (x, z) in [(fit.period, refit.period), (fit.gamma, refit.gamma), (fit.amplitude, refit.amplitude), (fit.baseline, refit.baseline)] {
            prop_assert!((x - z).abs() <= 1e-9 * x.abs().max(1e-3), "{fit:?} vs {refit:?}");
        }
    }
}

#[test]
fn compiled_kick_imprints_the_potential() {
    for n in 5..=8 {
        let params = MapParams::new(0.04, 1.6, n).unwrap();
        for expansion in [KickExpansion::Monomial, KickExpansion::Merged] {
            let (_, gates) = compile_kick(&params, expansion);
            let phase_of = |m: usize| {
                let mut s = StateVector::basis(n, m);
                for g in &gates {
                    catmap::apply_gate(&mut s, g, None).unwrap();
                }
                s.amplitudes()[m].arg()
            };
            let base = phase_of(0) - kick_oracle(&params, 0);
            for m in 0..params.levels() {
                assert!(angle_gap(phase_of(m) - base, kick_oracle(&params, m)) < 1e-10, "n={n} m={m}");
            }
        }
    }
}

#[test]
fn noisy_fit_tolerates_measurement_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t: Vec<f64> = (0..=900).map(f64::from).collect();
    for _ in 0..100 {
        let y: Vec<f64> = t
            .iter()
            .map(|&t| 0.5 + 0.5 * (-0.002 * t).exp() * (TAU * t / 90.0).cos() + 1e-3 * (2.0 * uniform(&mut rng) - 1.0))
            .collect();
        let fit = fit_damped_cosine(&t, &y, &FitOptions::default()).unwrap();
        assert!((fit.period / 90.0 - 1.0).abs() < 0.01, "{fit:?}");
        assert!((fit.gamma / 0.002 - 1.0).abs() < 0.05, "{fit:?}");
    }
}

#[test]
fn noiseless_cell_has_zero_rate() {
    let mut cell = SweepCell::new(6, 0.04, 1.6, 0.0, 400);
    cell.realizations = 4;
    let m = measure_decay(&cell, &SweepOptions::default(), None).unwrap();
    assert!(m.gamma.abs() < 1e-6, "{}", m.gamma);
}

#[test]
fn exempting_the_work_qubit_keeps_fidelity_higher() {
    let params = MapParams::new(0.04, 1.6, 6).unwrap();
    let circuit = compile_map(&params);
    let start = catmap::init_coherent(&params, -1.6, 0.0).unwrap();
    let mut ideal = start.clone();
    for _ in 0..100 {
        circuit.apply(&mut ideal).unwrap();
    }
    let mean_fidelity = |exempt: bool| {
        let model = NoiseModel::new(0.02, 5).unwrap().with_exempt_work_qubit(exempt);
        (0..16u64)
            .map(|r| {
                let mut s = start.clone();
                let mut stream = JitterStream::new(&model, r, circuit.len());
                for it in 0..100 {
                    noisy_iterate(&mut s, &circuit, &model, &mut stream, it).unwrap();
                }
                fidelity(&s, &ideal).unwrap()
            })
            .sum::<f64>()
            / 16.0
    };
    let (full, exempt) = (mean_fidelity(false), mean_fidelity(true));
    assert!(exempt >= full, "exempt {exempt} full {full}");
}
