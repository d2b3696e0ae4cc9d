//! Reduction of the operator to a constant-coefficient ODE in `t` at one
//! horizontal frequency, its characteristic polynomial, and the decaying mode
//! bases built from the roots.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::multiindex::factorial;
use crate::operator::CoefTensor;
use crate::poly;

/// Default clustering tolerance for roots, relative to `2π|ξ|`.
pub const DEFAULT_ROOT_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfSpace {
    Upper,
    Lower,
}

impl HalfSpace {
    /// `+1` for the upper half-space, `-1` for the lower one.
    pub fn sign(self) -> f64 {
        match self {
            HalfSpace::Upper => 1.0,
            HalfSpace::Lower => -1.0,
        }
    }
}

/// The reduced quadratic form `C_ab(ξ)` and the characteristic polynomial
/// `p(λ) = Σ_{a,b} (-1)^a C_ab λ^{a+b}` of the ODE `Σ (-1)^a C_ab w^{(a+b)} = 0`.
#[derive(Clone, Debug)]
pub struct ReducedSymbol {
    xi: Vec<f64>,
    c: DMatrix<Complex64>,
    charpoly: Vec<Complex64>,
}

impl ReducedSymbol {
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn m(&self) -> usize {
        self.c.nrows() - 1
    }

    pub fn c(&self) -> &DMatrix<Complex64> {
        &self.c
    }

    /// Coefficients of `p` in ascending powers of `λ`.
    pub fn charpoly(&self) -> &[Complex64] {
        &self.charpoly
    }

    pub fn leading_coefficient(&self) -> Complex64 {
        self.charpoly[2 * self.m()]
    }

    /// `2π|ξ|`, the natural scale of the roots.
    pub fn scale(&self) -> f64 {
        2.0 * PI * norm(&self.xi)
    }

    /// `|ξ|`.
    pub fn frequency(&self) -> f64 {
        norm(&self.xi)
    }

    /// The symbol of the adjoint operator, `C*_ab = conj(C_ba)`.
    pub fn adjoint(&self) -> ReducedSymbol {
        from_matrix(self.xi.clone(), self.c.adjoint())
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn from_matrix(xi: Vec<f64>, c: DMatrix<Complex64>) -> ReducedSymbol {
    let m = c.nrows() - 1;
    let mut charpoly = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
    for a in 0..=m {
        let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
        for b in 0..=m {
            charpoly[a + b] += c[(a, b)] * sign;
        }
    }
    ReducedSymbol { xi, c, charpoly }
}

pub fn reduce(a: &CoefTensor, xi: &[f64]) -> Result<ReducedSymbol> {
    if xi.len() != a.n() {
        return Err(Error::ShapeMismatch {
            expected: a.n(),
            found: xi.len(),
        });
    }
    if norm(xi) == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    Ok(from_matrix(xi.to_vec(), a.reduced_matrix(xi)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub lambda: Complex64,
    pub multiplicity: usize,
}

/// The solutions `t^r e^{λt}`, `0 ≤ r < multiplicity`, over the roots on one
/// side of the imaginary axis. Roots are ordered by decreasing imaginary part
/// (then increasing real part); within a root the powers increase.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    halfspace: HalfSpace,
    roots: Vec<Root>,
}

impl ModeBasis {
    pub fn new(halfspace: HalfSpace, mut roots: Vec<Root>) -> Self {
        sort_roots(&mut roots);
        ModeBasis { halfspace, roots }
    }

    pub fn halfspace(&self) -> HalfSpace {
        self.halfspace
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn dim(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// `(λ, r)` for every basis function `t^r e^{λt}`, in basis order.
    pub fn functions(&self) -> Vec<(Complex64, u32)> {
        self.roots
            .iter()
            .flat_map(|root| (0..root.multiplicity as u32).map(move |r| (root.lambda, r)))
            .collect()
    }

    /// `ℓ`-th derivative of every basis function at `t = 0`:
    /// `ℓ!/(ℓ-r)! λ^{ℓ-r}` for `ℓ ≥ r`, zero otherwise.
    pub fn derivatives_at_zero(&self, l: u32) -> Vec<Complex64> {
        self.functions()
            .iter()
            .map(|&(lambda, r)| {
                if l < r {
                    Complex64::new(0.0, 0.0)
                } else {
                    lambda.powu(l - r) * (factorial(l) / factorial(l - r))
                }
            })
            .collect()
    }

    /// The exponential polynomial `Σ_k f_k φ_k`.
    pub fn combine(&self, coeffs: &[Complex64]) -> ExpPoly {
        assert_eq!(coeffs.len(), self.dim(), "coefficient count mismatch");
        let mut out = ExpPoly::new();
        for (&(lambda, r), &f) in self.functions().iter().zip(coeffs) {
            out.push(lambda, r, f);
        }
        out
    }

    /// Slowest decay rate `min |Re λ|`.
    pub fn slowest_decay(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.lambda.re.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

fn sort_roots(roots: &mut [Root]) {
    roots.sort_by(|x, y| {
        y.lambda
            .im
            .partial_cmp(&x.lambda.im)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                x.lambda
                    .re
                    .partial_cmp(&y.lambda.re)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
}

/// All `2m` roots of the characteristic polynomial, clustered into distinct
/// roots with multiplicities. `root_tol` is relative to `2π|ξ|`.
pub fn all_roots(sym: &ReducedSymbol, root_tol: f64) -> Result<Vec<Root>> {
    let s = sym.scale();
    // Coefficients of p(sμ) / s^{2m}, that is c_k s^{k-2m}.
    let m2 = 2 * sym.m() as i32;
    let scaled: Vec<Complex64> = sym
        .charpoly()
        .iter()
        .enumerate()
        .map(|(k, c)| c * s.powi(k as i32 - m2))
        .collect();
    let approx = poly::roots(&scaled)?;
    if approx.len() != 2 * sym.m() {
        return Err(Error::RootCount {
            expected: 2 * sym.m(),
            found: approx.len(),
        });
    }
    let mut roots: Vec<Root> = poly::cluster(&scaled, &approx, root_tol)
        .into_iter()
        .map(|(mu, k)| Root {
            lambda: mu * s,
            multiplicity: k,
        })
        .collect();
    sort_roots(&mut roots);
    Ok(roots)
}

/// The decaying solutions on the requested side: `Re λ < 0` for the upper
/// half-space, `Re λ > 0` for the lower.
pub fn mode_basis(sym: &ReducedSymbol, halfspace: HalfSpace, root_tol: f64) -> Result<ModeBasis> {
    let s = sym.scale();
    let roots = all_roots(sym, root_tol)?;
    if let Some(r) = roots.iter().find(|r| r.lambda.re.abs() <= root_tol * s) {
        return Err(Error::ImaginaryAxisRoot {
            root: format!("{}", r.lambda),
            tol: root_tol * s,
        });
    }
    let side: Vec<Root> = roots
        .into_iter()
        .filter(|r| r.lambda.re * halfspace.sign() < 0.0)
        .collect();
    let found: usize = side.iter().map(|r| r.multiplicity).sum();
    if found != sym.m() {
        return Err(Error::RootCount {
            expected: sym.m(),
            found,
        });
    }
    Ok(ModeBasis::new(halfspace, side))
}

/// Closed-form roots `λ_k = 2πi|ξ| e^{iπk/(m+1)}`, `k = 1..m`, of the special
/// operator in the upper half-space.
pub fn special_roots(xi: &[f64], m: usize) -> Result<ModeBasis> {
    let r = norm(xi);
    if r == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let roots = (1..=m)
        .map(|k| Root {
            lambda: Complex64::new(0.0, 2.0 * PI * r)
                * Complex64::from_polar(1.0, PI * k as f64 / (m as f64 + 1.0)),
            multiplicity: 1,
        })
        .collect();
    Ok(ModeBasis::new(HalfSpace::Upper, roots))
}

/// A per-frequency solution `w(t) = Σ_k f_k φ_k(t)` over a mode basis.
#[derive(Clone, Debug)]
pub struct ModeSolution {
    pub basis: ModeBasis,
    pub coeffs: Vec<Complex64>,
}

impl ModeSolution {
    pub fn new(basis: ModeBasis, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(basis.dim(), coeffs.len(), "coefficient count mismatch");
        ModeSolution { basis, coeffs }
    }

    pub fn exppoly(&self) -> ExpPoly {
        self.basis.combine(&self.coeffs)
    }

    /// `w^{(l)}(t)`.
    pub fn derivative(&self, l: u32, t: f64) -> Complex64 {
        self.exppoly().eval_derivative(l, t)
    }

    /// `(w(0), w'(0), …, w^{(count-1)}(0))`.
    pub fn traces(&self, count: u32) -> Vec<Complex64> {
        (0..count)
            .map(|l| {
                self.basis
                    .derivatives_at_zero(l)
                    .iter()
                    .zip(&self.coeffs)
                    .map(|(d, f)| d * f)
                    .sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{make_biharmonic_rho, make_special_operator};

    #[test]
    fn special_charpoly() {
        let xi = [0.13, -0.2];
        let s2 = (2.0 * PI * norm(&xi)).powi(2);
        for m in 1..5u32 {
            let sym = reduce(&make_special_operator(2, m), &xi).unwrap();
            for j in 0..=m as usize {
                let expected = (-1f64).powi(j as i32) * s2.powi(m as i32 - j as i32);
                assert!((sym.charpoly()[2 * j] - Complex64::from(expected)).norm() < 1e-10 * expected.abs().max(1.0));
                if j < m as usize {
                    assert!(sym.charpoly()[2 * j + 1].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn laplacian_charpoly() {
        let xi = [1.0 / (2.0 * PI)];
        let sym = reduce(&make_special_operator(1, 1), &xi).unwrap();
        let p = sym.charpoly();
        assert!((p[0] - Complex64::from(1.0)).norm() < 1e-14);
        assert!(p[1].norm() < 1e-14);
        assert!((p[2] - Complex64::from(-1.0)).norm() < 1e-14);
    }

    #[test]
    fn biharmonic_charpoly_is_rho_independent() {
        let xi = [0.3];
        let s2 = (2.0 * PI * 0.3f64).powi(2);
        // (s² - λ²)² = s⁴ - 2 s² λ² + λ⁴
        let expected = [s2 * s2, 0.0, -2.0 * s2, 0.0, 1.0];
        for &rho in &[-3.0, 0.0, 0.5, 1.0] {
            let sym = reduce(&make_biharmonic_rho(1, rho), &xi).unwrap();
            for (c, e) in sym.charpoly().iter().zip(expected) {
                assert!((c - Complex64::from(e)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_frequency_is_rejected() {
        assert!(matches!(
            reduce(&make_special_operator(2, 1), &[0.0, 0.0]),
            Err(Error::ZeroFrequency)
        ));
    }

    #[test]
    fn special_m2_roots() {
        let xi = [1.0];
        let basis = mode_basis(
            &reduce(&make_special_operator(1, 2), &xi).unwrap(),
            HalfSpace::Upper,
            DEFAULT_ROOT_TOL,
        )
        .unwrap();
        let expected = [
            Complex64::new(-PI * 3f64.sqrt(), PI),
            Complex64::new(-PI * 3f64.sqrt(), -PI),
        ];
        assert_eq!(basis.dim(), 2);
        for (r, e) in basis.roots().iter().zip(expected) {
            assert_eq!(r.multiplicity, 1);
            assert!((r.lambda - e).norm() < 1e-12);
        }
    }

    #[test]
    fn biharmonic_double_root() {
        let xi = [1.0 / (2.0 * PI)];
        let basis = mode_basis(
            &reduce(&make_biharmonic_rho(1, 0.2), &xi).unwrap(),
            HalfSpace::Upper,
            DEFAULT_ROOT_TOL,
        )
        .unwrap();
        assert_eq!(basis.roots().len(), 1);
        assert_eq!(basis.roots()[0].multiplicity, 2);
        assert!((basis.roots()[0].lambda + 1.0).norm() < 1e-12);
        assert_eq!(basis.functions(), vec![(basis.roots()[0].lambda, 0), (basis.roots()[0].lambda, 1)]);
    }

    #[test]
    fn laplacian_lower_and_upper() {
        let xi = [0.7];
        let sym = reduce(&make_special_operator(1, 1), &xi).unwrap();
        let up = mode_basis(&sym, HalfSpace::Upper, DEFAULT_ROOT_TOL).unwrap();
        let down = mode_basis(&sym, HalfSpace::Lower, DEFAULT_ROOT_TOL).unwrap();
        assert!((up.roots()[0].lambda + 2.0 * PI * 0.7).norm() < 1e-12);
        assert!((down.roots()[0].lambda - 2.0 * PI * 0.7).norm() < 1e-12);
    }

    #[test]
    fn special_roots_closed_form() {
        let b = special_roots(&[0.4], 1).unwrap();
        assert!((b.roots()[0].lambda + 2.0 * PI * 0.4).norm() < 1e-14);
        for m in 1..8 {
            let b = special_roots(&[1.0, 0.0], m).unwrap();
            for (k, r) in b.roots().iter().enumerate() {
                let expected = -2.0 * PI * (PI * (k + 1) as f64 / (m as f64 + 1.0)).sin();
                assert!((r.lambda.re - expected).abs() < 1e-12);
                assert!(r.lambda.re <= -2.0 * PI * (PI / (m as f64 + 1.0)).sin() + 1e-12);
            }
        }
    }

    #[test]
    fn special_roots_annihilate_charpoly() {
        for m in 1..6usize {
            let xi = [0.35, 0.1];
            let sym = reduce(&make_special_operator(2, m as u32), &xi).unwrap();
            let s = sym.scale();
            for r in special_roots(&xi, m).unwrap().roots() {
                let value = poly::eval(sym.charpoly(), r.lambda);
                assert!(value.norm() < 1e-10 * s.powi(2 * m as i32));
            }
        }
    }

    #[test]
    fn derivatives_at_zero_confluent() {
        let lambda = Complex64::new(-1.0, 0.0);
        let b = ModeBasis::new(
            HalfSpace::Upper,
            vec![Root {
                lambda,
                multiplicity: 2,
            }],
        );
        assert_eq!(b.derivatives_at_zero(0), vec![Complex64::from(1.0), Complex64::from(0.0)]);
        assert_eq!(b.derivatives_at_zero(1), vec![Complex64::from(-1.0), Complex64::from(1.0)]);
        assert_eq!(b.derivatives_at_zero(2), vec![Complex64::from(1.0), Complex64::from(-2.0)]);
    }
}
