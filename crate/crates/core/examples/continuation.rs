//! Certifies a path from the biharmonic operator to members of the `A_ρ`
//! family by bounding the change of the Dirichlet-to-Neumann map.

use halfspace_neumann::operator::make_biharmonic_rho;
use halfspace_neumann::verify::{continuation_certificate, unit_frequencies};

fn main() -> halfspace_neumann::Result<()> {
    let start = make_biharmonic_rho(2, 0.0);
    let freqs = unit_frequencies(2, 8);
    for rho in [0.5, -2.0, 1.0] {
        let report = continuation_certificate(&start, &make_biharmonic_rho(2, rho), &freqs, 0.25)?;
        if report.success {
            println!("rho = {rho}: certified in {} steps", report.steps.len() - 1);
        } else {
            println!("rho = {rho}: stuck at s = {:?}", report.failure_point);
        }
    }
    Ok(())
}
