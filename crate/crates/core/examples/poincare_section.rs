//! Classical orbits of the double-well map and the spread each one covers.
//!
//! Regular orbits stay on a torus inside one island; the chaotic orbit
//! wanders across both wells.
//!
//! ```text
//! cargo run --release --example poincare_section
//! ```

use catmap::{poincare_section, MapParams, PhasePoint};

fn main() -> catmap::Result<()> {
    let params = MapParams::new(0.04, 1.6, 6)?;
    let starts = [PhasePoint::new(0.0, -1.0), PhasePoint::new(0.0, 1.0), PhasePoint::new(0.0, 0.3)];
    let orbits = poincare_section(&starts, &params, 20_000)?;
    println!("orbit  start(p, x)      x range            p range          left-well share");
    for o in &orbits {
        let (mut xl, mut xh, mut pl, mut ph) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for pt in &o.points {
            xl = xl.min(pt.x);
            xh = xh.max(pt.x);
            pl = pl.min(pt.p);
            ph = ph.max(pt.p);
        }
        let left = o.points.iter().filter(|pt| pt.x < 0.0).count() as f64 / o.points.len() as f64;
        println!(
            "{:>5}  ({:+.2}, {:+.2})   [{xl:+.3}, {xh:+.3}]   [{pl:+.3}, {ph:+.3}]   {left:.3}",
            o.id, o.start.p, o.start.x
        );
    }
    Ok(())
}
