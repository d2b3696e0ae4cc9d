//! Compares the generic Neumann matrix of the special operator with its
//! closed form over the roots `2πi|ξ| e^{iπk/(m+1)}`.

use halfspace_neumann::halfspace::{neumann_map, special_neumann_matrix};
use halfspace_neumann::operator::make_special_operator;
use halfspace_neumann::symbol::{mode_basis, reduce, HalfSpace, DEFAULT_ROOT_TOL};

fn main() -> halfspace_neumann::Result<()> {
    let xi = [0.3, -0.4];
    for m in 1..=4u32 {
        let a = make_special_operator(xi.len(), m);
        let sym = reduce(&a, &xi)?;
        let basis = mode_basis(&sym, HalfSpace::Upper, DEFAULT_ROOT_TOL)?;
        let generic = neumann_map(&sym, &basis);
        let closed = special_neumann_matrix(&xi, m as usize)?;
        let err = (&generic - &closed).norm() / closed.norm();
        println!("m = {m}: relative difference {err:.2e}");
        for root in basis.roots() {
            println!("    root {:.6}", root.lambda);
        }
    }
    Ok(())
}
