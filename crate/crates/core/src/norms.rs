//! Square-function, sup, Whitney, Besov and weighted Neumann norms as
//! per-frequency quadratic forms integrated over a frequency grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::halfspace::{neumann_data, FrequencyField, Solved};
use crate::multiindex::factorial;
use crate::operator::omega;
use crate::quadrature::{integrate, QuadOptions};
use crate::symbol::{norm, ModeSolution};

/// Integrated norms of a solution field and of its boundary data.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// `∬ |∇^m ∂_t w|² t dt dx`
    pub square_function: f64,
    /// `∬ |∇^m w|² t dt dx`
    pub square_function_rough: f64,
    /// `sup_t ‖∇^m w(·, t)‖²`
    #[serde(rename = "sup_L2")]
    pub sup_l2: f64,
    #[serde(rename = "whitney_L2")]
    pub whitney_l2: f64,
    #[serde(rename = "whitney_W1")]
    pub whitney_w1: f64,
    pub besov_half: f64,
    #[serde(rename = "neumann_L2_weighted")]
    pub neumann_l2_weighted: f64,
    #[serde(rename = "neumann_Wminus1_weighted")]
    pub neumann_wminus1_weighted: f64,
}

/// Weight in the `t`-integral of a Gram form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    One,
    T,
}

impl Weight {
    fn power(self) -> u32 {
        match self {
            Weight::One => 0,
            Weight::T => 1,
        }
    }
}

/// `∫_0^∞ t^{p+q+w} e^{(λ + conj μ) t} dt = (p+q+w)! / (-(λ + conj μ))^{p+q+w+1}`.
pub fn gram_integral(lambda: Complex64, mu: Complex64, p: u32, q: u32, weight: Weight) -> Result<Complex64> {
    let z = lambda + mu.conj();
    if z.re >= 0.0 {
        return Err(Error::NotDecaying(z.re));
    }
    let k = p + q + weight.power();
    Ok(Complex64::from(factorial(k)) / (-z).powu(k + 1))
}

/// `∫_0^∞ conj(u(t)) v(t) t^w dt` for decaying exponential polynomials.
pub fn exppoly_inner(u: &ExpPoly, v: &ExpPoly, weight: Weight) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in u.terms() {
        for b in v.terms() {
            acc += a.coeff.conj() * b.coeff * gram_integral(b.lambda, a.lambda, a.power, b.power, weight)?;
        }
    }
    Ok(acc)
}

/// Per-frequency contributions of a mode solution to the bulk norms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModeNorms {
    pub square_function: f64,
    pub square_function_rough: f64,
    /// `sup_t Σ_a ω_a |w^{(a)}(t)|²` at this frequency alone.
    pub sup_l2: f64,
}

/// `Σ_a ω_a(ξ) ∫ |w^{(a+shift)}|² t^w dt`.
fn weighted_form(omega: &[f64], w: &ExpPoly, shift: u32, weight: Weight) -> Result<f64> {
    let mut total = 0.0;
    for (a, om) in omega.iter().enumerate() {
        let d = w.derivative(a as u32 + shift);
        total += om * exppoly_inner(&d, &d, weight)?.re;
    }
    Ok(total)
}

/// `|∇^m w(·, t)|²` at one frequency: `Σ_a ω_a(ξ) |w^{(a)}(t)|²`.
pub fn gradient_density(omega: &[f64], derivs: &[ExpPoly], t: f64) -> f64 {
    omega
        .iter()
        .zip(derivs)
        .map(|(om, d)| om * d.eval(t).norm_sqr())
        .sum()
}

/// Log grid of 64 points per decade on `[lo, hi]`, plus `t = 0`.
pub fn sup_grid(lo: f64, hi: f64) -> Vec<f64> {
    let decades = (hi / lo).log10().max(0.0);
    let count = (64.0 * decades).ceil() as usize;
    let mut grid = vec![0.0];
    for k in 0..=count {
        let u = if count == 0 { 0.0 } else { k as f64 / count as f64 };
        grid.push(lo * (hi / lo).powf(u));
    }
    grid
}

pub fn mode_norms(xi: &[f64], m: usize, w: &ModeSolution) -> Result<ModeNorms> {
    let om = omega(xi, m as u32);
    let poly = w.exppoly();
    let r = norm(xi);
    let derivs: Vec<ExpPoly> = (0..=m as u32).map(|a| poly.derivative(a)).collect();
    let sup_l2 = sup_grid(1e-3 / r, 1e3 / r)
        .into_iter()
        .map(|t| gradient_density(&om, &derivs, t))
        .fold(0.0, f64::max);
    Ok(ModeNorms {
        square_function: weighted_form(&om, &poly, 1, Weight::T)?,
        square_function_rough: weighted_form(&om, &poly, 0, Weight::T)?,
        sup_l2: sup_l2,
    })
}

/// The square-function forms of [`mode_norms`] recomputed by adaptive
/// quadrature in `t`; returns `(square_function, square_function_rough)`.
pub fn mode_norms_by_quadrature(xi: &[f64], m: usize, w: &ModeSolution, opts: QuadOptions) -> Result<(f64, f64)> {
    let om = omega(xi, m as u32);
    let poly = w.exppoly();
    let derivs: Vec<ExpPoly> = (0..=m as u32 + 1).map(|a| poly.derivative(a)).collect();
    let decay = w.basis.slowest_decay();
    let end = 60.0 / decay;
    let r = integrate(
        |t| {
            vec![
                Complex64::from(t * gradient_density(&om, &derivs[1..], t)),
                Complex64::from(t * gradient_density(&om, &derivs[..=m], t)),
            ]
        },
        0.0,
        end,
        2,
        opts,
    )?;
    Ok((r.value[0].re, r.value[1].re))
}

/// Per-frequency weights of the boundary data norms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DataNorms {
    pub whitney_l2: f64,
    pub whitney_w1: f64,
    pub besov_half: f64,
    pub neumann_l2_weighted: f64,
    pub neumann_wminus1_weighted: f64,
}

/// Whitney norms read `v` as Dirichlet traces `φ_ℓ`: the order-`(m-1)`
/// derivatives have squared size `Σ_ℓ ω'_ℓ |φ_ℓ|²` with `ω'` the horizontal
/// weights of order `m-1`. Neumann norms read `v` as conormal data `G_ℓ` with
/// weights `|ξ|^{2ℓ+2-2m}` and `|ξ|^{2ℓ-2m}`.
pub fn data_density(xi: &[f64], v: &[Complex64]) -> DataNorms {
    let m = v.len();
    let r = norm(xi);
    let om = omega(xi, m as u32 - 1);
    let whitney: f64 = om.iter().zip(v).map(|(o, z)| o * z.norm_sqr()).sum();
    let mut l2 = 0.0;
    let mut wm1 = 0.0;
    for (l, z) in v.iter().enumerate() {
        let e = 2 * l as i32 - 2 * m as i32;
        l2 += z.norm_sqr() * r.powi(e + 2);
        wm1 += z.norm_sqr() * r.powi(e);
    }
    DataNorms {
        whitney_l2: whitney,
        whitney_w1: whitney * (2.0 * std::f64::consts::PI * r).powi(2),
        besov_half: whitney * r,
        neumann_l2_weighted: l2,
        neumann_wminus1_weighted: wm1,
    }
}

/// Data norms integrated over a field of trace or Neumann vectors.
pub fn data_norms(data: &FrequencyField<Vec<Complex64>>) -> DataNorms {
    let mut out = DataNorms::default();
    for s in &data.samples {
        let d = data_density(&s.xi, &s.value);
        out.whitney_l2 += s.weight * d.whitney_l2;
        out.whitney_w1 += s.weight * d.whitney_w1;
        out.besov_half += s.weight * d.besov_half;
        out.neumann_l2_weighted += s.weight * d.neumann_l2_weighted;
        out.neumann_wminus1_weighted += s.weight * d.neumann_wminus1_weighted;
    }
    out
}

/// Full report for a solved field. Whitney and Besov norms use the
/// Dirichlet traces of the solution, Neumann norms its conormal data.
/// `sup_l2` is the supremum over a shared `t` grid of the integrated density.
/// Frequencies that failed to solve are skipped.
pub fn norm_report(field: &FrequencyField<Solved>) -> Result<NormReport> {
    let mut report = NormReport::default();
    let solved: Vec<_> = field
        .samples
        .iter()
        .filter_map(|s| match (&s.value.symbol, &s.value.solution) {
            (Some(sym), Some(sol)) => Some((s, sym, sol)),
            _ => None,
        })
        .collect();
    if solved.is_empty() {
        return Ok(report);
    }
    let (mut r_min, mut r_max) = (f64::INFINITY, 0.0f64);
    for (s, _, _) in &solved {
        let r = norm(&s.xi);
        r_min = r_min.min(r);
        r_max = r_max.max(r);
    }
    let grid = sup_grid(1e-3 / r_max, 1e3 / r_min);
    let mut density = vec![0.0; grid.len()];
    for (s, sym, sol) in &solved {
        let m = sym.m();
        let om = omega(&s.xi, m as u32);
        let poly = sol.exppoly();
        report.square_function += s.weight * weighted_form(&om, &poly, 1, Weight::T)?;
        report.square_function_rough += s.weight * weighted_form(&om, &poly, 0, Weight::T)?;
        let derivs: Vec<ExpPoly> = (0..=m as u32).map(|a| poly.derivative(a)).collect();
        for (acc, &t) in density.iter_mut().zip(&grid) {
            *acc += s.weight * gradient_density(&om, &derivs, t);
        }
        let traces = data_density(&s.xi, &sol.traces(m as u32));
        report.whitney_l2 += s.weight * traces.whitney_l2;
        report.whitney_w1 += s.weight * traces.whitney_w1;
        report.besov_half += s.weight * traces.besov_half;
        let g = data_density(&s.xi, &neumann_data(sym, sol));
        report.neumann_l2_weighted += s.weight * g.neumann_l2_weighted;
        report.neumann_wminus1_weighted += s.weight * g.neumann_wminus1_weighted;
    }
    report.sup_l2 = density.into_iter().fold(0.0, f64::max);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::{solve_at, Problem, Sample, SolveOptions};
    use crate::operator::make_special_operator;
    use crate::quadrature::integrate_scalar;
    use crate::symbol::{mode_basis, reduce, HalfSpace, DEFAULT_ROOT_TOL};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gram_integral_standard_values() {
        let one = c(-1.0, 0.0);
        assert!((gram_integral(one, one, 0, 0, Weight::T).unwrap() - 0.25).norm() < 1e-15);
        assert!((gram_integral(one, one, 0, 0, Weight::One).unwrap() - 0.5).norm() < 1e-15);
        assert!(gram_integral(c(0.5, 0.0), c(-0.2, 0.0), 0, 0, Weight::One).is_err());
    }

    #[test]
    fn gram_integral_matches_quadrature() {
        let lambda = c(-1.0, 1.0);
        let mu = c(-0.7, -2.0);
        for &(p, q, w) in &[(0, 0, Weight::One), (1, 2, Weight::T), (3, 0, Weight::T)] {
            let exact = gram_integral(lambda, mu, p, q, w).unwrap();
            let quad = integrate_scalar(
                |t| t.powi((p + q + w.power()) as i32) * ((lambda + mu.conj()) * t).exp(),
                0.0,
                60.0,
                QuadOptions {
                    rel_tol: 1e-13,
                    ..QuadOptions::default()
                },
            )
            .unwrap();
            assert!((exact - quad).norm() < 1e-12 * (1.0 + exact.norm()));
        }
    }

    #[test]
    fn laplacian_single_mode() {
        let xi = [1.0 / (2.0 * PI)];
        let sym = reduce(&make_special_operator(1, 1), &xi).unwrap();
        let basis = mode_basis(&sym, HalfSpace::Upper, DEFAULT_ROOT_TOL).unwrap();
        let w = ModeSolution::new(basis.clone(), vec![c(1.0, 0.0)]);
        let n = mode_norms(&xi, 1, &w).unwrap();
        assert!((n.square_function_rough - 0.5).abs() < 1e-14);
        assert!((n.square_function - 0.5).abs() < 1e-14);
        assert!((n.sup_l2 - 2.0).abs() < 1e-14);
        let zero = mode_norms(&xi, 1, &ModeSolution::new(basis, vec![c(0.0, 0.0)])).unwrap();
        assert_eq!(zero, ModeNorms::default());
    }

    #[test]
    fn closed_form_matches_quadrature_for_special_operator() {
        let xi = [0.3, -0.2];
        for m in 2usize..4 {
            let sym = reduce(&make_special_operator(2, m as u32), &xi).unwrap();
            let basis = mode_basis(&sym, HalfSpace::Upper, DEFAULT_ROOT_TOL).unwrap();
            let coeffs: Vec<Complex64> = (0..m).map(|k| c(0.3 + k as f64, 0.7 - 0.4 * k as f64)).collect();
            let w = ModeSolution::new(basis, coeffs);
            let n = mode_norms(&xi, m, &w).unwrap();
            let om = omega(&xi, m as u32);
            let poly = w.exppoly();
            let derivs: Vec<ExpPoly> = (0..=m as u32 + 1).map(|a| poly.derivative(a)).collect();
            let opts = QuadOptions {
                rel_tol: 1e-12,
                ..QuadOptions::default()
            };
            let rough = integrate_scalar(|t| c(t * gradient_density(&om, &derivs[..=m], t), 0.0), 0.0, 40.0, opts).unwrap();
            let regular = integrate_scalar(|t| c(t * gradient_density(&om, &derivs[1..], t), 0.0), 0.0, 40.0, opts).unwrap();
            assert!((rough.re - n.square_function_rough).abs() < 1e-9 * n.square_function_rough);
            assert!((regular.re - n.square_function).abs() < 1e-9 * n.square_function);
        }
    }

    #[test]
    fn data_norms_m1_and_single_sample() {
        let field = FrequencyField::new(
            1,
            vec![Sample {
                xi: vec![0.5],
                weight: 0.25,
                value: vec![c(3.0, 4.0)],
            }],
        )
        .unwrap();
        let d = data_norms(&field);
        assert!((d.whitney_l2 - 0.25 * 25.0).abs() < 1e-14);
        assert!((d.besov_half - 0.25 * 25.0 * 0.5).abs() < 1e-14);
        assert!((d.neumann_l2_weighted - 0.25 * 25.0).abs() < 1e-14);
        assert!((d.neumann_wminus1_weighted - 0.25 * 25.0 / 0.25).abs() < 1e-12);
    }

    #[test]
    fn besov_scales_homogeneously() {
        // φ(ξ) = |ξ|^{-1} on a radial ring: besov_half scales by s^{n+1-2} = s^0 for n = 1.
        let make = |s: f64| {
            let samples = [0.3, 0.7, 1.1]
                .iter()
                .map(|&r| Sample {
                    xi: vec![s * r],
                    weight: s,
                    value: vec![c(1.0 / (s * r), 0.0)],
                })
                .collect();
            data_norms(&FrequencyField::new(1, samples).unwrap()).besov_half
        };
        assert!((make(1.0) - make(3.0)).abs() < 1e-12 * make(1.0));
    }

    #[test]
    fn report_round_trip_and_solved_field() {
        let a = make_special_operator(1, 2);
        let samples = [0.2, 0.4]
            .iter()
            .map(|&x| {
                let g = vec![c(1.0, 0.0), c(0.0, 0.5)];
                Sample {
                    xi: vec![x],
                    weight: 0.1,
                    value: solve_at(&a, &[x], &g, HalfSpace::Upper, Problem::Neumann, &SolveOptions::default()).unwrap(),
                }
            })
            .collect();
        let report = norm_report(&FrequencyField::new(1, samples).unwrap()).unwrap();
        assert!(report.square_function > 0.0 && report.sup_l2 > 0.0 && report.neumann_l2_weighted > 0.0);
        let json = serde_json::to_string(&report).unwrap();
        let back: NormReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}
