//! Single and double layer potentials at one frequency, with their jump
//! relations across the boundary.

use halfspace_neumann::operator::make_special_operator;
use halfspace_neumann::potentials::{double_layer, newton_kernel, single_layer};
use halfspace_neumann::quadrature::QuadOptions;
use halfspace_neumann::symbol::{reduce, HalfSpace, DEFAULT_ROOT_TOL};
use num_complex::Complex64;

fn main() -> halfspace_neumann::Result<()> {
    let a = make_special_operator(1, 2);
    let sym = reduce(&a, &[0.35])?;
    let kernel = newton_kernel(&sym, DEFAULT_ROOT_TOL)?;
    let g = vec![Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.25)];
    let f = vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)];

    let s = single_layer(&sym, &kernel, &g);
    let up = s.neumann(&sym, HalfSpace::Upper);
    let down = s.neumann(&sym, HalfSpace::Lower);
    println!("single layer trace jump: {:?}", diff(&s.traces(HalfSpace::Upper, 2), &s.traces(HalfSpace::Lower, 2)));
    println!("single layer Neumann sum: {:?} (data {g:?})", sum(&up, &down));

    let d = double_layer(&sym, &kernel, &f, QuadOptions::default())?.potential()?;
    println!("double layer trace jump: {:?} (data {f:?})", diff(&d.traces(HalfSpace::Upper, 2), &d.traces(HalfSpace::Lower, 2)));
    println!("double layer Neumann sum: {:?}", sum(&d.neumann(&sym, HalfSpace::Upper), &d.neumann(&sym, HalfSpace::Lower)));
    Ok(())
}

fn diff(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn sum(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}
