//! Solution and data norms of a Neumann solve on a frequency grid.

use halfspace_neumann::halfspace::{frequency_grid, solve_neumann, GridSpec, SolveOptions};
use halfspace_neumann::io::canonical_json;
use halfspace_neumann::norms::norm_report;
use halfspace_neumann::operator::make_special_operator;
use halfspace_neumann::symbol::HalfSpace;
use halfspace_neumann::verify::profile_data;
use num_complex::Complex64;

fn main() -> halfspace_neumann::Result<()> {
    let a = make_special_operator(1, 2);
    let grid = frequency_grid(1, &GridSpec::default())?;
    let data = profile_data(&grid, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let solved = solve_neumann(&a, &data, HalfSpace::Upper, &SolveOptions::default())?;
    print!("{}", canonical_json(&norm_report(&solved)?)?);
    Ok(())
}
