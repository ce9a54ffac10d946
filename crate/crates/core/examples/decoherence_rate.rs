//! Decay rate of the tunneling oscillation under gate noise, with and
//! without jitter on gates that touch the work qubit.
//!
//! ```text
//! cargo run --release --example decoherence_rate [epsilon] [realizations]
//! ```

use catmap::analysis::{jackknife_gamma, measure_decay, SweepCell, SweepOptions};

fn main() -> catmap::Result<()> {
    let mut args = std::env::args().skip(1);
    let eps: f64 = args.next().map_or(0.01, |s| s.parse().expect("epsilon"));
    let realizations: usize = args.next().map_or(16, |s| s.parse().expect("realizations"));
    let opts = SweepOptions::default();
    for exempt in [false, true] {
        let mut cell = SweepCell::new(6, 0.04, 1.6, eps, 1500);
        cell.realizations = realizations;
        cell.exempt_work_qubit = exempt;
        let m = measure_decay(&cell, &opts, None)?;
        let times: Vec<f64> = m.runs[0].times.iter().map(|&t| t as f64).collect();
        let alive: Vec<Vec<f64>> = m.runs.iter().map(|r| r.alive.clone()).collect();
        let se = jackknife_gamma(&times, &alive, &m.fit_options).map_or(f64::NAN, |(_, se)| se);
        println!(
            "exempt_work_qubit={exempt:<5}  T_u={:.2}  Gamma={:.3e} +- {se:.1e}  (noiseless fit Gamma={:.1e})",
            m.noisy.period, m.gamma, m.reference.gamma
        );
    }
    Ok(())
}
