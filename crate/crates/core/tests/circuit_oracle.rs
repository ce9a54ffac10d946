use std::f64::consts::TAU;

use catmap::circuit::{compile_qft, KickExpansion};
use catmap::qstate::fidelity;
use catmap::{compile_map_with, MapParams, SplitOperator, StateVector};
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_register(levels: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    let v: Vec<Complex64> = (0..levels).map(|_| Complex64::new(u(), u())).collect();
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / n).collect()
}

/// Dense DFT with kernel e^{2πi mk/N}/√N, O(N²).
fn dense_dft(psi: &[Complex64]) -> Vec<Complex64> {
    let n = psi.len();
    (0..n)
        .map(|k| {
            psi.iter()
                .enumerate()
                .map(|(m, a)| a * Complex64::from_polar(1.0, TAU * (m * k % n) as f64 / n as f64))
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

fn bit_reverse(k: usize, bits: usize) -> usize {
    (0..bits).fold(0, |r, b| r | ((k >> b & 1) << (bits - 1 - b)))
}

fn apply_gates(state: &mut StateVector, gates: &[catmap::Gate]) {
    for g in gates {
        catmap::apply_gate(state, g, None).unwrap();
    }
}

#[test]
fn qft_matches_dense_transform() {
    let p = MapParams::new(0.04, 1.6, 6).unwrap();
    let psi = random_register(32, 1);
    let mut s = StateVector::from_register(6, &psi).unwrap();
    apply_gates(&mut s, &compile_qft(&p, false));
    let reference = dense_dft(&psi);
    for k in 0..32 {
        assert!((s.amplitudes()[bit_reverse(k, 5)] - reference[k]).norm() < 1e-12);
    }
}

#[test]
fn qft_on_zero_is_uniform() {
    let p = MapParams::new(0.04, 1.6, 6).unwrap();
    let mut s = StateVector::zero(6);
    apply_gates(&mut s, &compile_qft(&p, false));
    let expect = 1.0 / 32f64.sqrt();
    assert!(s.register().iter().all(|a| (a - expect).norm() < 1e-12));
}

#[test]
fn qft_round_trip() {
    let p = MapParams::new(0.04, 1.6, 7).unwrap();
    let s0 = StateVector::from_register(7, &random_register(64, 2)).unwrap();
    let mut s = s0.clone();
    apply_gates(&mut s, &compile_qft(&p, false));
    apply_gates(&mut s, &compile_qft(&p, true));
    assert!((fidelity(&s, &s0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn one_iteration_matches_oracle_for_both_expansions() {
    for expansion in [KickExpansion::Monomial, KickExpansion::Merged] {
        for n_q in 5..=8 {
            for k in [0.0, 0.04, 0.3] {
                let p = MapParams::new(k, 1.6, n_q).unwrap();
                let psi = random_register(p.levels(), n_q as u64 * 31 + (k * 100.0) as u64);
                let mut s = StateVector::from_register(n_q, &psi).unwrap();
                compile_map_with(&p, expansion).apply(&mut s).unwrap();
                let mut reference = psi.clone();
                SplitOperator::new(&p).step(&mut reference).unwrap();
                let r = StateVector::from_register(n_q, &reference).unwrap();
                let f = fidelity(&s, &r).unwrap();
                assert!(f >= 1.0 - 1e-10, "{expansion:?} n_q={n_q} K={k}: fidelity {f}");
                assert!(s.work_population() < 1e-20);
            }
        }
    }
}
