//! Power-law fit of the decay rate over noise strength and qubit count.
//!
//! The default grid is small enough for a laptop; pass qubit counts to
//! extend it, e.g. `6 7 8`.
//!
//! ```text
//! cargo run --release --example gamma_scaling [n_q ...]
//! ```

use catmap::analysis::{fit_scaling, gamma_sweep, SweepCell, SweepOptions};

fn main() -> catmap::Result<()> {
    let mut sizes: Vec<usize> = std::env::args().skip(1).map(|s| s.parse().expect("n_q")).collect();
    if sizes.is_empty() {
        sizes = vec![6, 7];
    }
    let cells: Vec<SweepCell> = sizes
        .iter()
        .flat_map(|&n| {
            let iters = if n == 6 { 1500 } else { 1000 };
            [0.005, 0.01, 0.02].map(|eps| SweepCell::new(n, 0.04, 1.6, eps, iters))
        })
        .collect();
    let records = gamma_sweep(&cells, &SweepOptions::default());
    println!("n_q  epsilon        T_u      Gamma   Gamma/(eps^2 n_q^4)  status");
    for r in &records {
        let g = r.gamma.unwrap_or(f64::NAN);
        println!(
            "{:>3}  {:>7}  {:>9.1}  {g:>9.3e}  {:>19.4}  {}",
            r.n_qubits,
            r.epsilon,
            r.period.unwrap_or(f64::NAN),
            g / (r.epsilon.powi(2) * (r.n_qubits as f64).powi(4)),
            r.status
        );
    }
    let s = fit_scaling(&records)?;
    println!(
        "exponent_eps = {:.3} +- {:.3}, exponent_nq = {:.3} +- {:.3}, prefactor = {:.4} (free fit {:.4})",
        s.exponent_eps, s.exponent_eps_se, s.exponent_nq, s.exponent_nq_se, s.prefactor, s.prefactor_free
    );
    Ok(())
}
