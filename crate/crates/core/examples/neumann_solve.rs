use halfspace_neumann::halfspace::{frequency_grid, neumann_data, solve_neumann, GridSpec, SolveOptions};
use halfspace_neumann::operator::make_biharmonic_rho;
use halfspace_neumann::symbol::HalfSpace;
use halfspace_neumann::verify::profile_data;
use num_complex::Complex64;

fn main() -> halfspace_neumann::Result<()> {
    let a = make_biharmonic_rho(2, 0.25);
    let grid_spec = GridSpec {
        xi_min: 1e-2,
        xi_max: 10.0,
        radial: 12,
        angular: 4,
    };
    let grid = frequency_grid(2, &grid_spec)?;
    let data = profile_data(&grid, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)]);
    let solved = solve_neumann(&a, &data, HalfSpace::Upper, &SolveOptions::default())?;

    let mut worst = 0.0f64;
    for (s, d) in solved.samples.iter().zip(&data.samples) {
        let (Some(sym), Some(sol)) = (&s.value.symbol, &s.value.solution) else {
            println!("flagged at {:?}", s.xi);
            continue;
        };
        let back = neumann_data(sym, sol);
        let err = back.iter().zip(&d.value).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        worst = worst.max(err);
    }
    println!("{} frequencies solved, worst data residual {worst:.2e}", solved.len());
    let first = &solved.samples[0];
    println!("traces at xi = {:?}: {:?}", first.xi, first.value.solution.as_ref().map(|w| w.traces(2)));
    Ok(())
}
