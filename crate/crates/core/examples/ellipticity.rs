use halfspace_neumann::operator::{check_self_adjoint, make_biharmonic_rho, make_special_operator, slice_ellipticity};

fn main() -> halfspace_neumann::Result<()> {
    let mut operators = vec![("special n=2 m=3".to_string(), make_special_operator(2, 3))];
    for rho in [-0.5, 0.0, 0.5, 1.0] {
        operators.push((format!("biharmonic rho={rho}"), make_biharmonic_rho(2, rho)));
    }
    for (name, a) in &operators {
        let r = slice_ellipticity(a, 32)?;
        println!(
            "{name:<22} slice {:>8.4}  garding {:>8.4}  bound {:>8.4}  self-adjoint {}",
            r.lambda_slice,
            r.lambda_garding,
            r.lambda_bound,
            check_self_adjoint(a, 1e-14)
        );
    }
    Ok(())
}
