//! Prints a center-transmission spectrum for a preset next to the thin-cloud
//! analytic transmission.
//!
//! `cargo run --release --example scan -- fig3b 21`

use std::time::Instant;

use rydlens::scenario::thin_cloud_center_transmission;
use rydlens::{preset, run_spectrum};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig3b".into());
    let count: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(21);
    let s = preset(&name)?;
    let g = s.levels.gamma_e;
    let deltas: Vec<f64> = (0..count).map(|i| (-2.0 + 4.0 * i as f64 / (count - 1).max(1) as f64) * g).collect();
    let start = Instant::now();
    let spectrum = run_spectrum(&s, &deltas)?;
    eprintln!("{} points in {:.1?}", count, start.elapsed());
    println!("delta/gamma_e  simulated  thin-cloud");
    for (d, t) in &spectrum.entries {
        println!("{:+.3} {:.5} {:.5}", d / g, t, thin_cloud_center_transmission(&s, *d)?);
    }
    Ok(())
}
