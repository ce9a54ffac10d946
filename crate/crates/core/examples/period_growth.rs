//! Growth of the noiseless tunneling period as the effective Planck
//! constant shrinks.
//!
//! ```text
//! cargo run --release --example period_growth [max n_q]
//! ```

use catmap::analysis::{period_scan, PeriodOptions};
use catmap::MapParams;

fn main() -> catmap::Result<()> {
    let max: usize = std::env::args().nth(1).map_or(8, |s| s.parse().expect("max n_q"));
    let params: Vec<MapParams> = (6..=max).map(|n| MapParams::new(0.04, 1.6, n)).collect::<catmap::Result<_>>()?;
    let scan = period_scan(&params, &PeriodOptions::default());
    println!("n_q      hbar          T_u  status");
    for r in &scan.rows {
        println!("{:>3}  {:.5}  {:>11.1}  {}", r.n_qubits, r.hbar, r.period.unwrap_or(f64::NAN), r.status);
    }
    if let Some(s) = scan.action {
        println!("S = d ln T_u / d(1/hbar) = {s:.4}");
    }
    let p = MapParams::new(0.3, 0.5, 10)?;
    let row = &period_scan(&[p], &PeriodOptions::default()).rows[0];
    println!("K=0.3 a=0.5 n_q=10: T_u = {:.1}", row.period.unwrap_or(f64::NAN));
    Ok(())
}
