//! Tunneling of a packet between the two wells on the exact gate circuit.
//!
//! ```text
//! cargo run --release --example cat_oscillation
//! ```

use catmap::qstate::mean_position;
use catmap::{evolve, EvolutionConfig, MapParams};

fn main() -> catmap::Result<()> {
    let params = MapParams::new(0.04, 1.6, 6)?;
    let mut cfg = EvolutionConfig::new(params, 180);
    cfg.stride = 9;
    cfg.record_distributions = true;
    let traj = evolve(&cfg)?;
    println!("   t   W_a    <x>");
    for ((t, w), dist) in traj.times.iter().zip(&traj.alive).zip(&traj.distributions) {
        let bar = "#".repeat((w * 40.0).round() as usize);
        println!("{t:>4}  {w:.3}  {:+.3}  {bar}", mean_position(dist));
    }
    Ok(())
}
