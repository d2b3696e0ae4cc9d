//! Numerical certificates: the Rellich inequality, uniqueness ratios, the
//! well-posedness sweep over a tensor family, perturbation continuation,
//! duality of layer potentials, jump relations and Green's formula.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfspace::{
    dirichlet_map, frequency_grid, neumann_data, neumann_map, solve_at, FrequencyField, GridSpec, Problem, Sample,
    SolveOptions, Solved,
};
use crate::norms::norm_report;
use crate::operator::{make_special_operator, omega, slice_constant_at, slice_ellipticity, sphere_directions, CoefTensor};
use crate::potentials::{newton_kernel, single_layer, DoubleLayer};
use crate::quadrature::QuadOptions;
use crate::symbol::{mode_basis, norm, reduce, HalfSpace, ModeSolution, ReducedSymbol};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RellichReport {
    /// `Σ_ξ w_ξ Σ_a ω_a |w^{(a)}(0)|²`
    pub lhs: f64,
    /// `-(2/λ) Re Σ_ξ w_ξ Σ_ℓ conj(w^{(ℓ+1)}(0)) G_ℓ`
    pub rhs: f64,
    pub lambda_used: f64,
    pub margin: f64,
    /// Smallest per-frequency margin relative to `1 + rhs(ξ)`.
    pub worst_relative_margin: f64,
}

impl RellichReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.margin >= -tol * (1.0 + self.rhs)
    }
}

/// Per-frequency terms `(lhs, Re Σ_ℓ conj(w^{(ℓ+1)}(0)) G_ℓ)`.
pub fn rellich_terms(sym: &ReducedSymbol, w: &ModeSolution) -> (f64, f64) {
    let m = sym.m();
    let traces = w.traces(m as u32 + 1);
    let om = omega(sym.xi(), m as u32);
    let lhs = om.iter().zip(&traces).map(|(o, z)| o * z.norm_sqr()).sum();
    let g = neumann_data(sym, w);
    let pairing: Complex64 = (0..m).map(|l| traces[l + 1].conj() * g[l]).sum();
    (lhs, pairing.re)
}

/// Rellich inequality over a solved field. `lambda` is the global slice
/// constant; the bound uses the smaller of it and the slice constants at the
/// field frequencies.
pub fn rellich_check(a: &CoefTensor, field: &FrequencyField<Solved>, lambda: f64) -> RellichReport {
    let mut lambda_used = lambda;
    for s in &field.samples {
        lambda_used = lambda_used.min(slice_constant_at(a, &s.xi));
    }
    let (mut lhs, mut pairing) = (0.0, 0.0);
    let mut worst = f64::INFINITY;
    for s in &field.samples {
        if let (Some(sym), Some(w)) = (&s.value.symbol, &s.value.solution) {
            let (l, p) = rellich_terms(sym, w);
            let r = -2.0 / lambda_used * p;
            worst = worst.min((r - l) / (1.0 + r.abs()));
            lhs += s.weight * l;
            pairing += s.weight * p;
        }
    }
    let rhs = -2.0 / lambda_used * pairing;
    RellichReport {
        lhs,
        rhs,
        lambda_used,
        margin: rhs - lhs,
        worst_relative_margin: worst,
    }
}

/// Radial test profile for uniqueness ratios:
/// `G_ℓ(ξ) = c_ℓ h(|ξ|) |ξ|^{m-1-ℓ}` with `h(r) = r e^{-r²}`.
pub fn profile_data(grid: &FrequencyField<()>, c: &[Complex64]) -> FrequencyField<Vec<Complex64>> {
    let m = c.len();
    grid.map(|s| {
        let r = norm(&s.xi);
        let h = r * (-r * r).exp();
        c.iter()
            .enumerate()
            .map(|(l, cl)| cl * h * r.powi(m as i32 - 1 - l as i32))
            .collect()
    })
}

/// Solves the Neumann problem for every sample.
pub fn solve_field(
    a: &CoefTensor,
    data: &FrequencyField<Vec<Complex64>>,
    halfspace: HalfSpace,
    problem: Problem,
    opts: &SolveOptions,
) -> Result<FrequencyField<Solved>> {
    data.try_map(|s| solve_at(a, &s.xi, &s.value, halfspace, problem, opts))
}

/// `(sup_L2 + square_function) / neumann_L2_weighted` for the Neumann
/// solution with profile data on the given grid.
pub fn uniqueness_estimate(a: &CoefTensor, grid_spec: &GridSpec, c: &[Complex64]) -> Result<f64> {
    let grid = frequency_grid(a.n(), grid_spec)?;
    let data = profile_data(&grid, c);
    let field = solve_field(a, &data, HalfSpace::Upper, Problem::Neumann, &SolveOptions::default())?;
    if let Some(bad) = field.samples.iter().find(|s| !s.value.is_ok()) {
        return Err(Error::IllConditioned { cond: bad.value.cond });
    }
    let report = norm_report(&field)?;
    Ok((report.sup_l2 + report.square_function) / report.neumann_l2_weighted)
}

/// Unit-scale frequencies `ω / 2π` with `2π|ξ| = 1`.
pub fn unit_frequencies(n: usize, samples: usize) -> Vec<Vec<f64>> {
    sphere_directions(n, samples)
        .into_iter()
        .map(|w| w.iter().map(|x| x / (2.0 * std::f64::consts::PI)).collect())
        .collect()
}

/// `σ_min(N) / σ_max(N)` at one frequency; zero if no decaying basis exists.
pub fn normalized_sigma_min(a: &CoefTensor, xi: &[f64], root_tol: f64) -> f64 {
    let sym = match reduce(a, xi) {
        Ok(s) => s,
        Err(_) => return 0.0,
    };
    let basis = match mode_basis(&sym, HalfSpace::Upper, root_tol) {
        Ok(b) => b,
        Err(_) => return 0.0,
    };
    let sv = neumann_map(&sym, &basis).singular_values();
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameters: Vec<f64>,
    pub sigma_min_normalized: Vec<f64>,
    pub lambda_slice: Vec<f64>,
    pub zeros: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub zero_tol: f64,
    pub param_tol: f64,
    pub root_tol: f64,
    pub ellipticity_samples: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            zero_tol: 1e-6,
            param_tol: 1e-10,
            root_tol: crate::symbol::DEFAULT_ROOT_TOL,
            ellipticity_samples: 16,
        }
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Minimum over the unit-scale frequencies of `σ_min(N)/σ_max(N)` for each
/// parameter value, the slice constant of each family member, and the
/// parameters where the normalized symbol vanishes. Zeros are located by
/// golden-section refinement of grid-local minima and kept when the refined
/// value is below `zero_tol`.
pub fn wellposedness_sweep<F>(family: F, params: &[f64], frequencies: &[Vec<f64>], opts: &SweepOptions) -> Result<SweepReport>
where
    F: Fn(f64) -> CoefTensor,
{
    if params.is_empty() {
        return Err(Error::InvalidArgument("empty parameter range".into()));
    }
    let objective = |p: f64| {
        let a = family(p);
        frequencies
            .iter()
            .map(|xi| normalized_sigma_min(&a, xi, opts.root_tol))
            .fold(f64::INFINITY, f64::min)
    };
    let sigma: Vec<f64> = params.iter().map(|&p| objective(p)).collect();
    let lambda_slice = params
        .iter()
        .map(|&p| slice_ellipticity(&family(p), opts.ellipticity_samples).map(|r| r.lambda_slice))
        .collect::<Result<Vec<f64>>>()?;
    let mut zeros = Vec::new();
    for k in 0..params.len() {
        let left = if k > 0 { sigma[k - 1] } else { f64::INFINITY };
        let right = if k + 1 < params.len() { sigma[k + 1] } else { f64::INFINITY };
        if sigma[k] > left || sigma[k] > right || (sigma[k] == left && k > 0) {
            continue;
        }
        let lo = if k > 0 { params[k - 1] } else { params[k] };
        let hi = if k + 1 < params.len() { params[k + 1] } else { params[k] };
        let p = if hi > lo { golden_section(objective, lo, hi, opts.param_tol) } else { params[k] };
        if objective(p).min(sigma[k]) < opts.zero_tol {
            let p = if sigma[k] <= objective(p) { params[k] } else { p };
            zeros.push(p);
        }
    }
    Ok(SweepReport {
        parameters: params.to_vec(),
        sigma_min_normalized: sigma,
        lambda_slice,
        zeros,
    })
}

/// `n` equally spaced values on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Dirichlet-to-Neumann matrix `N D^{-1}` on the upper half-space.
pub fn dtn_map(a: &CoefTensor, xi: &[f64], root_tol: f64) -> Option<DMatrix<Complex64>> {
    let sym = reduce(a, xi).ok()?;
    let basis = mode_basis(&sym, HalfSpace::Upper, root_tol).ok()?;
    let d = dirichlet_map(&basis);
    let n = neumann_map(&sym, &basis);
    let d_inv = d.try_inverse()?;
    Some(n * d_inv)
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.singular_values().max()
}

fn inverse_norm(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.singular_values();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        1.0 / min
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationReport {
    pub success: bool,
    /// Accepted interpolation parameters, starting at 0.
    pub steps: Vec<f64>,
    /// Last certified parameter when no admissible step exists.
    pub failure_point: Option<f64>,
    /// Frequency at which the last rejected step failed.
    pub failure_frequency: Option<Vec<f64>>,
}

/// Walks `A_s = (1-s) A0 + s A1` from `s = 0` to `1`. A step `r → s` is
/// accepted when at every frequency
/// `‖Λ_s - Λ_r‖ · max(‖Λ_r^{-1}‖, ‖Λ_s^{-1}‖) ≤ 1/2` for the DtN maps `Λ`.
/// Rejected steps are halved; the walk fails below a step of `1e-6`.
pub fn continuation_certificate(a0: &CoefTensor, a1: &CoefTensor, frequencies: &[Vec<f64>], max_step: f64) -> Result<ContinuationReport> {
    let root_tol = crate::symbol::DEFAULT_ROOT_TOL;
    let maps = |s: f64| -> Result<Vec<Option<DMatrix<Complex64>>>> {
        let a = a0.interpolate(a1, s)?;
        Ok(frequencies.iter().map(|xi| dtn_map(&a, xi, root_tol)).collect())
    };
    let mut r = 0.0;
    let mut current = maps(0.0)?;
    if let Some(k) = current.iter().position(|m| m.as_ref().map_or(true, |m| !inverse_norm(m).is_finite())) {
        return Ok(ContinuationReport {
            success: false,
            steps: Vec::new(),
            failure_point: Some(0.0),
            failure_frequency: Some(frequencies[k].clone()),
        });
    }
    let mut steps = vec![0.0];
    let mut h = max_step;
    while r < 1.0 {
        let s = (r + h).min(1.0);
        let next = maps(s)?;
        let bad = current.iter().zip(&next).position(|(lr, ls)| match (lr, ls) {
            (Some(lr), Some(ls)) => {
                let inv = inverse_norm(lr).max(inverse_norm(ls));
                spectral_norm(&(ls - lr)) * inv > 0.5
            }
            _ => true,
        });
        match bad {
            None => {
                r = s;
                steps.push(s);
                current = next;
                h = (2.0 * h).min(max_step);
            }
            Some(k) => {
                h *= 0.5;
                if h < 1e-6 {
                    return Ok(ContinuationReport {
                        success: false,
                        steps,
                        failure_point: Some(r),
                        failure_frequency: Some(frequencies[k].clone()),
                    });
                }
            }
        }
    }
    Ok(ContinuationReport {
        success: true,
        steps,
        failure_point: None,
        failure_frequency: None,
    })
}

fn pairing(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Deviations of the two adjoint identities at one frequency:
/// `⟨γ, Tr 𝒮^A g⟩ = ⟨Tr 𝒮^{A*} γ, g⟩` and
/// `⟨M⁺ 𝒟^A f, φ⟩ = ⟨f, M⁺ 𝒟^{A*} φ⟩`, each relative to the size of its terms.
pub fn duality_check(
    a: &CoefTensor,
    xi: &[f64],
    gamma: &[Complex64],
    g: &[Complex64],
    f: &[Complex64],
    phi: &[Complex64],
    opts: QuadOptions,
) -> Result<(f64, f64)> {
    let root_tol = crate::symbol::DEFAULT_ROOT_TOL;
    let adj = a.adjoint();
    let sym = reduce(a, xi)?;
    let sym_adj = reduce(&adj, xi)?;
    let kernel = newton_kernel(&sym, root_tol)?;
    let kernel_adj = newton_kernel(&sym_adj, root_tol)?;
    let m = sym.m() as u32;

    let s_g = single_layer(&sym, &kernel, g).traces(HalfSpace::Upper, m);
    let s_gamma = single_layer(&sym_adj, &kernel_adj, gamma).traces(HalfSpace::Upper, m);
    let left = pairing(gamma, &s_g);
    let right = pairing(&s_gamma, g);
    let single = (left - right).norm() / (left.norm() + right.norm()).max(f64::MIN_POSITIVE);

    let d_f = DoubleLayer::new(&sym, &kernel, f, opts)?.potential()?.neumann(&sym, HalfSpace::Upper);
    let d_phi = DoubleLayer::new(&sym_adj, &kernel_adj, phi, opts)?
        .potential()?
        .neumann(&sym_adj, HalfSpace::Upper);
    let left = pairing(&d_f, phi);
    let right = pairing(f, &d_phi);
    let double = (left - right).norm() / (left.norm() + right.norm()).max(f64::MIN_POSITIVE);
    Ok((single, double))
}

/// Jump deviations at one frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    /// `Tr⁺ 𝒮g - Tr⁻ 𝒮g`, relative to `|Tr 𝒮g|`.
    pub single_trace: f64,
    /// `M⁺ 𝒮g + M⁻ 𝒮g - g`, relative to `|g|`.
    pub single_neumann: f64,
    /// `Tr⁺ 𝒟f - Tr⁻ 𝒟f + f`, relative to `|f|`.
    pub double_trace: f64,
    /// `M⁺ 𝒟f + M⁻ 𝒟f`, relative to `|M⁺ 𝒟f|`.
    pub double_neumann: f64,
}

impl JumpReport {
    pub fn single_max(&self) -> f64 {
        self.single_trace.max(self.single_neumann)
    }

    pub fn double_max(&self) -> f64 {
        self.double_trace.max(self.double_neumann)
    }
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Relative size of a trace vector, each component `k` scaled by `s^{-k}`.
fn scaled_diff(a: &[Complex64], b: &[Complex64], s: f64, row_power: impl Fn(usize) -> i32) -> f64 {
    let scale = |v: &[Complex64]| -> Vec<Complex64> {
        v.iter().enumerate().map(|(k, z)| z * s.powi(-row_power(k))).collect()
    };
    let (a, b) = (scale(a), scale(b));
    let diff: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    max_abs(&diff) / max_abs(&a).max(max_abs(&b)).max(f64::MIN_POSITIVE)
}

pub fn jump_check(a: &CoefTensor, xi: &[f64], g: &[Complex64], f: &[Complex64], opts: QuadOptions) -> Result<JumpReport> {
    let sym = reduce(a, xi)?;
    let kernel = newton_kernel(&sym, crate::symbol::DEFAULT_ROOT_TOL)?;
    let m = sym.m();
    let s = sym.scale();
    let neumann_power = |l: usize| 2 * m as i32 - 1 - l as i32;
    let trace_power = |l: usize| l as i32;

    let single = single_layer(&sym, &kernel, g);
    let up = single.traces(HalfSpace::Upper, m as u32);
    let down = single.traces(HalfSpace::Lower, m as u32);
    let single_trace = scaled_diff(&up, &down, s, trace_power);
    let sum: Vec<Complex64> = single
        .neumann(&sym, HalfSpace::Upper)
        .iter()
        .zip(single.neumann(&sym, HalfSpace::Lower))
        .map(|(x, y)| x + y)
        .collect();
    let single_neumann = scaled_diff(&sum, g, s, neumann_power);

    let double = DoubleLayer::new(&sym, &kernel, f, opts)?;
    let up = double.derivatives(0.0, HalfSpace::Upper, m)?;
    let down = double.derivatives(0.0, HalfSpace::Lower, m)?;
    let jump: Vec<Complex64> = up.iter().zip(&down).map(|(x, y)| y - x).collect();
    let double_trace = scaled_diff(&jump, f, s, trace_power);
    let pot = double.potential()?;
    let nu = pot.neumann(&sym, HalfSpace::Upper);
    let nl = pot.neumann(&sym, HalfSpace::Lower);
    let neg: Vec<Complex64> = nl.iter().map(|z| -z).collect();
    let double_neumann = scaled_diff(&nu, &neg, s, neumann_power);
    Ok(JumpReport {
        single_trace,
        single_neumann,
        double_trace,
        double_neumann,
    })
}

/// Green's formula for a decaying solution `w` on one side:
/// `1_± w = ∓𝒟(Tr w) + 𝒮(M w)`. Evaluated by direct quadrature at the given
/// points `t` (distances from the boundary, positive), for all derivatives
/// `k < 2m`, on the solution's side and on the opposite side. Returns the
/// largest deviation on each side relative to the size of the solution.
pub fn green_check(sym: &ReducedSymbol, w: &ModeSolution, points: &[f64], opts: QuadOptions) -> Result<(f64, f64)> {
    let m = sym.m();
    let hs = w.basis.halfspace();
    let kernel = newton_kernel(sym, crate::symbol::DEFAULT_ROOT_TOL)?;
    let phi = w.traces(m as u32);
    let g = neumann_data(sym, w);
    let single = single_layer(sym, &kernel, &g);
    let double = DoubleLayer::new(sym, &kernel, &phi, opts)?;
    let s = sym.scale();
    let size = (0..2 * m as u32)
        .map(|k| w.traces(2 * m as u32)[k as usize].norm() * s.powi(-(k as i32)))
        .fold(0.0, f64::max);
    let mut inside = 0.0f64;
    let mut outside = 0.0f64;
    for &t in points {
        for (side_sign, target) in [(1.0, true), (-1.0, false)] {
            let tt = hs.sign() * side_sign * t;
            let d = double.derivatives(tt, hs, 2 * m)?;
            for k in 0..2 * m {
                let value = -hs.sign() * d[k] + single.eval(k as u32, tt);
                let expected = if target { w.derivative(k as u32, tt) } else { Complex64::new(0.0, 0.0) };
                let err = (value - expected).norm() * s.powi(-(k as i32)) / size;
                if target {
                    inside = inside.max(err);
                } else {
                    outside = outside.max(err);
                }
            }
        }
    }
    Ok((inside, outside))
}

/// Special operator plus a Hermitian perturbation with entries of modulus at
/// most `delta`, redrawn until the sampled slice constant exceeds `min_lambda`.
pub fn random_self_adjoint(n: usize, m: u32, delta: f64, min_lambda: f64, rng: &mut ChaCha8Rng) -> Result<(CoefTensor, f64)> {
    let base = make_special_operator(n, m);
    let size = base.entries().nrows();
    for _ in 0..1000 {
        let mut e = base.entries().clone();
        for i in 0..size {
            for j in i..size {
                let z = if i == j {
                    Complex64::new(rng.gen_range(-1.0..1.0), 0.0)
                } else {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / 2f64.sqrt()
                };
                e[(i, j)] += z * delta;
                if i != j {
                    e[(j, i)] += z.conj() * delta;
                }
            }
        }
        let a = CoefTensor::new(n, m, e)?;
        let lambda = slice_ellipticity(&a, 32)?.lambda_slice;
        if lambda > min_lambda {
            return Ok((a, lambda));
        }
    }
    Err(Error::InvalidArgument("no admissible tensor drawn".into()))
}

/// Special operator plus a general (not necessarily Hermitian) perturbation.
pub fn random_tensor(n: usize, m: u32, delta: f64, rng: &mut ChaCha8Rng) -> Result<CoefTensor> {
    let base = make_special_operator(n, m);
    let e = base
        .entries()
        .zip_map(&DMatrix::from_fn(base.entries().nrows(), base.entries().ncols(), |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }), |z, p| z + p * delta);
    CoefTensor::new(n, m, e)
}

pub fn random_vector(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// A frequency with `|ξ|` log-uniform in `[0.05, 2]` and uniform direction.
pub fn random_frequency(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r > 1e-3 && r <= 1.0 {
            let radius = 0.05 * 40f64.powf(rng.gen_range(0.0..1.0));
            return v.iter().map(|x| x * radius / r).collect();
        }
    }
}

/// A field of random data on a coarse grid, for property trials.
pub fn random_field(n: usize, m: usize, grid_spec: &GridSpec, rng: &mut ChaCha8Rng) -> Result<FrequencyField<Vec<Complex64>>> {
    let grid = frequency_grid(n, grid_spec)?;
    let samples = grid
        .samples
        .iter()
        .map(|s| Sample {
            xi: s.xi.clone(),
            weight: s.weight,
            value: random_vector(m, rng),
        })
        .collect();
    FrequencyField::new(n, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::make_biharmonic_rho;
    use crate::symbol::DEFAULT_ROOT_TOL;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn laplacian_rellich_is_equality() {
        let a = make_special_operator(1, 1);
        let xi = [1.0 / (2.0 * PI)];
        let w = solve_at(&a, &xi, &[c(1.0, 0.0)], HalfSpace::Upper, Problem::Neumann, &SolveOptions::default()).unwrap();
        let (lhs, p) = rellich_terms(w.symbol.as_ref().unwrap(), w.solution.as_ref().unwrap());
        assert!((lhs - 2.0).abs() < 1e-13);
        assert!((-2.0 * p - 2.0).abs() < 1e-13);
    }

    #[test]
    fn rellich_holds_for_special_and_biharmonic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid_spec = GridSpec {
            xi_min: 0.05,
            xi_max: 3.0,
            radial: 6,
            angular: 4,
        };
        for (a, lambda) in [(make_special_operator(1, 2), 1.0), (make_biharmonic_rho(1, 0.5), 0.5)] {
            let data = random_field(1, 2, &grid_spec, &mut rng).unwrap();
            let field = solve_field(&a, &data, HalfSpace::Upper, Problem::Neumann, &SolveOptions::default()).unwrap();
            let report = rellich_check(&a, &field, lambda);
            assert!(report.passes(1e-9), "{report:?}");
        }
    }

    #[test]
    fn sweep_finds_biharmonic_zeros() {
        let params = linspace(-4.0, 2.0, 121);
        let report = wellposedness_sweep(|r| make_biharmonic_rho(1, r), &params, &unit_frequencies(1, 2), &SweepOptions::default()).unwrap();
        assert_eq!(report.zeros.len(), 2, "{:?}", report.zeros);
        assert!((report.zeros[0] + 3.0).abs() < 1e-6);
        assert!((report.zeros[1] - 1.0).abs() < 1e-6);
        let constant = wellposedness_sweep(|_| make_special_operator(1, 2), &params[..5], &unit_frequencies(1, 2), &SweepOptions::default()).unwrap();
        assert!(constant.zeros.is_empty());
        assert!(wellposedness_sweep(|r| make_biharmonic_rho(1, r), &[], &unit_frequencies(1, 2), &SweepOptions::default()).is_err());
    }

    #[test]
    fn continuation_special_to_special_is_one_step() {
        let a = make_special_operator(1, 2);
        let r = continuation_certificate(&a, &a, &unit_frequencies(1, 2), 1.0).unwrap();
        assert!(r.success);
        assert_eq!(r.steps, vec![0.0, 1.0]);
    }

    #[test]
    fn continuation_to_biharmonic() {
        let a = make_special_operator(1, 2);
        let ok = continuation_certificate(&a, &make_biharmonic_rho(1, 0.0), &unit_frequencies(1, 2), 0.25).unwrap();
        assert!(ok.success, "{ok:?}");
        let bad = continuation_certificate(&a, &make_biharmonic_rho(1, 1.0), &unit_frequencies(1, 2), 0.25).unwrap();
        assert!(!bad.success);
        let point = bad.failure_point.unwrap();
        assert!(point > 0.99 && point < 1.0, "{point}");
    }

    #[test]
    fn duality_for_special_and_general_tensors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let opts = QuadOptions::default();
        let general = random_tensor(1, 1, 0.3, &mut rng).unwrap();
        for a in [make_special_operator(1, 2), general] {
            let m = a.m() as usize;
            let xi = [0.3];
            let (v1, v2, v3, v4) = (
                random_vector(m, &mut rng),
                random_vector(m, &mut rng),
                random_vector(m, &mut rng),
                random_vector(m, &mut rng),
            );
            let (single, double) = duality_check(&a, &xi, &v1, &v2, &v3, &v4, opts).unwrap();
            assert!(single < 1e-10, "{single}");
            assert!(double < 1e-6, "{double}");
        }
    }

    #[test]
    fn jumps_for_biharmonic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = make_biharmonic_rho(1, 0.3);
        let r = jump_check(&a, &[0.2], &random_vector(2, &mut rng), &random_vector(2, &mut rng), QuadOptions::default()).unwrap();
        assert!(r.single_max() < 1e-9, "{r:?}");
        assert!(r.double_max() < 1e-6, "{r:?}");
    }

    #[test]
    fn green_for_special_m2() {
        let a = make_special_operator(1, 2);
        let xi = [0.25];
        let sym = reduce(&a, &xi).unwrap();
        for hs in [HalfSpace::Upper, HalfSpace::Lower] {
            let basis = mode_basis(&sym, hs, DEFAULT_ROOT_TOL).unwrap();
            let w = ModeSolution::new(basis, vec![c(1.0, 0.2), c(-0.4, 0.5)]);
            let s = sym.scale();
            let (inside, outside) = green_check(&sym, &w, &[0.1 / s, 1.0 / s, 3.0 / s], QuadOptions::default()).unwrap();
            assert!(inside < 1e-6 && outside < 1e-6, "{hs:?}: {inside} {outside}");
        }
    }

    #[test]
    fn random_tensors_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, lambda) = random_self_adjoint(2, 2, 0.3, 0.1, &mut rng).unwrap();
        assert!(lambda > 0.1);
        assert!(crate::operator::check_self_adjoint(&a, 1e-14));
    }

    #[test]
    fn uniqueness_ratio_is_finite_for_laplacian() {
        let a = make_special_operator(1, 1);
        let grid_spec = GridSpec {
            xi_min: 1e-3,
            xi_max: 10.0,
            radial: 32,
            angular: 2,
        };
        let r = uniqueness_estimate(&a, &grid_spec, &[c(1.0, 0.0)]).unwrap();
        assert!(r.is_finite() && r > 0.0);
    }
}
