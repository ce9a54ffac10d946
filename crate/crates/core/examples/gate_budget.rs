//! Gates per map iteration for both kick expansions.
//!
//! ```text
//! cargo run --release --example gate_budget
//! ```

use catmap::{compile_map_with, KickExpansion, MapParams};

fn main() -> catmap::Result<()> {
    println!("n_q  expansion  toffoli  phase   qft  kinetic   total  total/n_q^4");
    for n in 6..=12 {
        let params = MapParams::new(0.04, 1.6, n)?;
        for (name, exp) in [("monomial", KickExpansion::Monomial), ("merged", KickExpansion::Merged)] {
            let c = compile_map_with(&params, exp).counts();
            println!(
                "{n:>3}  {name:<9} {:>8} {:>6} {:>5} {:>8} {:>7}  {:.3}",
                c.kick_toffoli,
                c.kick_phase,
                c.qft_h + c.qft_cphase,
                c.kinetic_phase,
                c.total,
                c.total as f64 / (n as f64).powi(4)
            );
        }
    }
    Ok(())
}
