//! The exact gate circuit against the split-operator propagator.
//!
//! ```text
//! cargo run --release --example oracle_crosscheck
//! ```

use catmap::qstate::fidelity;
use catmap::{compile_map, init_coherent, MapParams, SplitOperator, StateVector};

fn main() -> catmap::Result<()> {
    println!("n_q  iterations  min fidelity     max work population");
    for n in 5..=9 {
        let params = MapParams::new(0.04, 1.6, n)?;
        let circuit = compile_map(&params);
        let mut state = init_coherent(&params, -params.a, 0.0)?;
        let mut psi = state.register().to_vec();
        let mut prop = SplitOperator::new(&params);
        let (mut worst, mut work) = (1.0f64, 0.0f64);
        for _ in 0..100 {
            circuit.apply(&mut state)?;
            prop.step(&mut psi)?;
            worst = worst.min(fidelity(&state, &StateVector::from_register(n, &psi)?)?);
            work = work.max(state.work_population());
        }
        println!("{n:>3}  {:>10}  {:.15}  {work:.3e}", 100, worst);
    }
    Ok(())
}
