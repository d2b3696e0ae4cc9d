use halfspace_neumann::halfspace::{solve_neumann, GridSpec, SolveOptions};
use halfspace_neumann::operator::slice_ellipticity;
use halfspace_neumann::symbol::HalfSpace;
use halfspace_neumann::verify::{random_field, random_self_adjoint, rellich_check};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> halfspace_neumann::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let grid_spec = GridSpec {
        xi_min: 1e-2,
        xi_max: 5.0,
        radial: 8,
        angular: 4,
    };
    for trial in 0..5 {
        let (a, lambda) = random_self_adjoint(2, 2, 0.3, 0.1, &mut rng)?;
        let sampled = slice_ellipticity(&a, 16)?;
        let data = random_field(2, 2, &grid_spec, &mut rng)?;
        let solved = solve_neumann(&a, &data, HalfSpace::Upper, &SolveOptions::default())?;
        let report = rellich_check(&a, &solved, lambda.min(sampled.lambda_slice));
        println!(
            "trial {trial}: lhs {:.4e} rhs {:.4e} lambda {:.3} margin {:.3e}",
            report.lhs, report.rhs, report.lambda_used, report.margin
        );
    }
    Ok(())
}
