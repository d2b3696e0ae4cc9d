//! Scans the biharmonic family `A_ρ` and reports where the Neumann symbol
//! loses injectivity.

use halfspace_neumann::operator::make_biharmonic_rho;
use halfspace_neumann::verify::{linspace, unit_frequencies, wellposedness_sweep, SweepOptions};

fn main() -> halfspace_neumann::Result<()> {
    let params = linspace(-4.0, 2.0, 61);
    let freqs = unit_frequencies(2, 8);
    let report = wellposedness_sweep(|rho| make_biharmonic_rho(2, rho), &params, &freqs, &SweepOptions::default())?;
    println!("{:>8} {:>14} {:>10}", "rho", "sigma_min", "slice");
    for ((p, s), l) in report.parameters.iter().zip(&report.sigma_min_normalized).zip(&report.lambda_slice).step_by(5) {
        println!("{p:>8.3} {s:>14.6e} {l:>10.4}");
    }
    println!("degenerate parameters: {:?}", report.zeros);
    Ok(())
}
