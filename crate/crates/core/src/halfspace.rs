//! Boundary symbol maps, the per-frequency Dirichlet and Neumann solvers, the
//! closed forms for the special operator, frequency grids and synthesis.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::enumerate;
use crate::operator::CoefTensor;
use crate::symbol::{mode_basis, norm, reduce, HalfSpace, ModeBasis, ModeSolution, ReducedSymbol};

/// Normal-derivative Dirichlet traces `(φ_0, …, φ_{m-1})` at one frequency.
pub type TraceVector = Vec<Complex64>;
/// Canonical Neumann data `(G_0, …, G_{m-1})` at one frequency, paired with
/// traces by `⟨φ, G⟩ = Σ_ℓ conj(φ_ℓ) G_ℓ`.
pub type NeumannVector = Vec<Complex64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub xi: Vec<f64>,
    pub weight: f64,
    pub value: T,
}

/// Values attached to sampled frequencies together with quadrature weights
/// for integrals over `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyField<T> {
    pub n: usize,
    pub samples: Vec<Sample<T>>,
}

impl<T> FrequencyField<T> {
    pub fn new(n: usize, samples: Vec<Sample<T>>) -> Result<Self> {
        for s in &samples {
            if s.xi.len() != n {
                return Err(Error::ShapeMismatch {
                    expected: n,
                    found: s.xi.len(),
                });
            }
            if norm(&s.xi) == 0.0 {
                return Err(Error::ZeroFrequency);
            }
            if !(s.weight > 0.0 && s.weight.is_finite()) {
                return Err(Error::InvalidArgument(format!("weight {} is not positive", s.weight)));
            }
        }
        Ok(FrequencyField { n, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn map<U, F>(&self, mut f: F) -> FrequencyField<U>
    where
        F: FnMut(&Sample<T>) -> U,
    {
        FrequencyField {
            n: self.n,
            samples: self
                .samples
                .iter()
                .map(|s| Sample {
                    xi: s.xi.clone(),
                    weight: s.weight,
                    value: f(s),
                })
                .collect(),
        }
    }

    pub fn try_map<U, F>(&self, mut f: F) -> Result<FrequencyField<U>>
    where
        F: FnMut(&Sample<T>) -> Result<U>,
    {
        let mut samples = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            samples.push(Sample {
                xi: s.xi.clone(),
                weight: s.weight,
                value: f(s)?,
            });
        }
        Ok(FrequencyField { n: self.n, samples })
    }

    /// `Σ weight · f(sample)`, summed in sample order.
    pub fn integrate<F>(&self, mut f: F) -> f64
    where
        F: FnMut(&Sample<T>) -> f64,
    {
        self.samples.iter().map(|s| s.weight * f(s)).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xi_min: f64,
    pub xi_max: f64,
    pub radial: usize,
    pub angular: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            xi_min: 1e-3,
            xi_max: 1e1,
            radial: 48,
            angular: 8,
        }
    }
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    // |S^{n-1}| = 2π^{n/2} / Γ(n/2), with Γ at integers and half-integers.
    let half = n as f64 / 2.0;
    let gamma = if n % 2 == 0 {
        (1..n / 2).fold(1.0, |acc, k| acc * k as f64)
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < half - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    };
    2.0 * PI.powf(half) / gamma
}

/// Log-radial × angular grid on `ξ_min ≤ |ξ| ≤ ξ_max`. Radii are midpoints in
/// `log |ξ|`; the angular set is `{±1}` for `n = 1`, uniformly spaced angles
/// for `n = 2` and antipodally closed Fibonacci points for `n = 3`. Each
/// direction carries the weight `|ξ|^n Δ(log|ξ|) |S^{n-1}| / #directions`.
pub fn frequency_grid(n: usize, grid_spec: &GridSpec) -> Result<FrequencyField<()>> {
    if !(grid_spec.xi_min > 0.0 && grid_spec.xi_max > grid_spec.xi_min) {
        return Err(Error::InvalidArgument("need 0 < xi_min < xi_max".into()));
    }
    if grid_spec.radial == 0 || grid_spec.angular == 0 {
        return Err(Error::InvalidArgument("grid counts must be positive".into()));
    }
    let dirs = grid_directions(n, grid_spec.angular);
    let du = (grid_spec.xi_max / grid_spec.xi_min).ln() / grid_spec.radial as f64;
    let area = sphere_area(n);
    let mut samples = Vec::with_capacity(grid_spec.radial * dirs.len());
    for i in 0..grid_spec.radial {
        let r = grid_spec.xi_min * ((i as f64 + 0.5) * du).exp();
        let w = r.powi(n as i32) * du * area / dirs.len() as f64;
        for d in &dirs {
            samples.push(Sample {
                xi: d.iter().map(|x| x * r).collect(),
                weight: w,
                value: (),
            });
        }
    }
    FrequencyField::new(n, samples)
}

fn grid_directions(n: usize, angular: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let count = angular.max(2).div_ceil(2) * 2;
            (0..count)
                .map(|k| {
                    let theta = 2.0 * PI * (k as f64 + 0.5) / count as f64;
                    vec![theta.cos(), theta.sin()]
                })
                .collect()
        }
        _ => {
            let half = angular.max(2).div_ceil(2);
            let base = crate::operator::sphere_directions(n, 2 * n + half);
            let picked: Vec<Vec<f64>> = base.into_iter().skip(2 * n).take(half).collect();
            let mut dirs = picked.clone();
            dirs.extend(picked.iter().map(|d| d.iter().map(|x| -x).collect()));
            dirs
        }
    }
}

/// `(ℓ, k)` entry: `ℓ`-th derivative at `t = 0` of the `k`-th basis function.
pub fn dirichlet_map(basis: &ModeBasis) -> DMatrix<Complex64> {
    let m = basis.dim();
    let mut d = DMatrix::zeros(m, m);
    for l in 0..m {
        for (k, v) in basis.derivatives_at_zero(l as u32).into_iter().enumerate() {
            d[(l, k)] = v;
        }
    }
    d
}

/// Conormal map `N` with `N f = G`, obtained by integrating
/// `∫ Σ conj(ψ^{(a)}) C_ab w^{(b)} dt` by parts:
/// `G_ℓ = ∓ Σ_{a=ℓ+1}^{m} (-1)^{a-1-ℓ} Σ_b C_ab w^{(a+b-1-ℓ)}(0)`,
/// with the upper sign for the upper half-space.
pub fn neumann_map(sym: &ReducedSymbol, basis: &ModeBasis) -> DMatrix<Complex64> {
    let m = sym.m();
    let c = sym.c();
    let derivs: Vec<Vec<Complex64>> = (0..2 * m as u32).map(|l| basis.derivatives_at_zero(l)).collect();
    let sign = -basis.halfspace().sign();
    let mut n = DMatrix::zeros(m, basis.dim());
    for l in 0..m {
        for a in (l + 1)..=m {
            let parity = if (a - 1 - l) % 2 == 0 { 1.0 } else { -1.0 };
            for b in 0..=m {
                let order = a + b - 1 - l;
                for k in 0..basis.dim() {
                    n[(l, k)] += c[(a, b)] * derivs[order][k] * (sign * parity);
                }
            }
        }
    }
    n
}

/// Conormal data from the one-sided derivative traces `w^{(j)}(0^±)`,
/// `j = 0..2m`, by the same formula as [`neumann_map`].
pub fn conormal_from_traces(sym: &ReducedSymbol, traces: &[Complex64], halfspace: HalfSpace) -> NeumannVector {
    let m = sym.m();
    assert!(traces.len() >= 2 * m, "need 2m derivative traces");
    let c = sym.c();
    let sign = -halfspace.sign();
    (0..m)
        .map(|l| {
            let mut g = Complex64::new(0.0, 0.0);
            for a in (l + 1)..=m {
                let parity = if (a - 1 - l) % 2 == 0 { 1.0 } else { -1.0 };
                for b in 0..=m {
                    g += c[(a, b)] * traces[a + b - 1 - l] * (sign * parity);
                }
            }
            g
        })
        .collect()
}

/// Conormal data `G` of a mode solution.
pub fn neumann_data(sym: &ReducedSymbol, sol: &ModeSolution) -> NeumannVector {
    let n = neumann_map(sym, &sol.basis);
    (n * DVector::from_column_slice(&sol.coeffs)).iter().cloned().collect()
}

/// `N_{ℓk} = -2 i^ℓ (2π|ξ|)^{2m-1-ℓ} sin(π(1+ℓ)k/(m+1)) / (e^{2πik/(m+1)} - 1)`,
/// the Neumann matrix of the special operator over the closed-form roots.
pub fn special_neumann_matrix(xi: &[f64], m: usize) -> Result<DMatrix<Complex64>> {
    let r = norm(xi);
    if r == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let s = 2.0 * PI * r;
    let m1 = m as f64 + 1.0;
    Ok(DMatrix::from_fn(m, m, |l, kk| {
        let k = (kk + 1) as f64;
        let numerator = Complex64::i().powu(l as u32)
            * (-2.0 * s.powi(2 * m as i32 - 1 - l as i32) * (PI * (1 + l) as f64 * k / m1).sin());
        numerator / (Complex64::from_polar(1.0, 2.0 * PI * k / m1) - 1.0)
    }))
}

/// `M_{Lk} = sin(πLk/(m+1))`, `L, k = 1..m`, and its inverse `(2/(m+1)) M`.
pub fn sine_matrix(m: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let m1 = m as f64 + 1.0;
    let s = DMatrix::from_fn(m, m, |l, k| (PI * (l + 1) as f64 * (k + 1) as f64 / m1).sin());
    let inv = &s * (2.0 / m1);
    (s, inv)
}

/// Mode coefficients of the special operator's Neumann solution from the
/// closed form: `G_ℓ = Σ_k N_{ℓk} f_k` is inverted through the sine matrix,
/// `f_k = (e^{2πik/(m+1)} - 1)/(-2) Σ_L (M^{-1})_{kL} (-i)^{L-1} s^{-(2m-L)} G_{L-1}`.
pub fn special_neumann_solve(xi: &[f64], m: usize, g: &[Complex64]) -> Result<Vec<Complex64>> {
    let r = norm(xi);
    if r == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let s = 2.0 * PI * r;
    let m1 = m as f64 + 1.0;
    let (_, inv) = sine_matrix(m);
    let h: Vec<Complex64> = (0..m)
        .map(|l| (-Complex64::i()).powu(l as u32) * g[l] / s.powi(2 * m as i32 - 1 - l as i32))
        .collect();
    Ok((0..m)
        .map(|k| {
            let sum: Complex64 = (0..m).map(|l| h[l] * inv[(k, l)]).sum();
            sum * (Complex64::from_polar(1.0, 2.0 * PI * (k + 1) as f64 / m1) - 1.0) / -2.0
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub rtol: f64,
    pub cond_max: f64,
    pub root_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rtol: 1e-9,
            cond_max: 1e12,
            root_tol: crate::symbol::DEFAULT_ROOT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Ok,
    IllPosed(String),
}

/// Result of one per-frequency solve.
#[derive(Clone, Debug)]
pub struct Solved {
    pub status: Status,
    /// Condition number of the scale-equilibrated boundary matrix.
    pub cond: f64,
    pub residual: f64,
    pub symbol: Option<ReducedSymbol>,
    pub solution: Option<ModeSolution>,
}

impl Solved {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    fn ill(reason: String, cond: f64) -> Solved {
        Solved {
            status: Status::IllPosed(reason),
            cond,
            residual: f64::NAN,
            symbol: None,
            solution: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    Neumann,
    Dirichlet,
}

/// Condition number of `diag(s^{-row_power}) B diag(s^{r_k})`, which removes
/// the trivial dependence of boundary matrices on `|ξ|`.
pub fn equilibrated_cond(b: &DMatrix<Complex64>, basis: &ModeBasis, s: f64, row_power: impl Fn(usize) -> i32) -> f64 {
    let powers: Vec<u32> = basis.functions().iter().map(|&(_, r)| r).collect();
    let scaled = DMatrix::from_fn(b.nrows(), b.ncols(), |l, k| {
        b[(l, k)] * s.powi(-row_power(l)) * s.powi(powers[k] as i32)
    });
    cond(&scaled)
}

pub fn cond(b: &DMatrix<Complex64>) -> f64 {
    let sv = b.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves the boundary problem at one frequency.
pub fn solve_at(
    a: &CoefTensor,
    xi: &[f64],
    data: &[Complex64],
    halfspace: HalfSpace,
    problem: Problem,
    opts: &SolveOptions,
) -> Result<Solved> {
    let m = a.m() as usize;
    if data.len() != m {
        return Err(Error::ShapeMismatch {
            expected: m,
            found: data.len(),
        });
    }
    let sym = reduce(a, xi)?;
    let basis = match mode_basis(&sym, halfspace, opts.root_tol) {
        Ok(b) => b,
        Err(e @ (Error::ImaginaryAxisRoot { .. } | Error::RootCount { .. })) => {
            return Ok(Solved::ill(e.to_string(), f64::INFINITY))
        }
        Err(e) => return Err(e),
    };
    let s = sym.scale();
    let (matrix, cond) = match problem {
        Problem::Neumann => {
            let n = neumann_map(&sym, &basis);
            let c = equilibrated_cond(&n, &basis, s, |l| (2 * m - 1 - l) as i32);
            (n, c)
        }
        Problem::Dirichlet => {
            let d = dirichlet_map(&basis);
            let c = equilibrated_cond(&d, &basis, s, |l| l as i32);
            (d, c)
        }
    };
    if !(cond <= opts.cond_max) {
        return Ok(Solved::ill(format!("condition number {cond:e} exceeds {:e}", opts.cond_max), cond));
    }
    let rhs = DVector::from_column_slice(data);
    let f = match matrix.clone().lu().solve(&rhs) {
        Some(f) => f,
        None => return Ok(Solved::ill("singular boundary matrix".into(), f64::INFINITY)),
    };
    let residual = (&matrix * &f - &rhs).norm();
    let scale = rhs.norm();
    if residual > opts.rtol * scale.max(f64::MIN_POSITIVE) && scale > 0.0 {
        return Ok(Solved::ill(format!("residual {residual:e} exceeds tolerance"), cond));
    }
    Ok(Solved {
        status: Status::Ok,
        cond,
        residual,
        symbol: Some(sym),
        solution: Some(ModeSolution::new(basis, f.iter().cloned().collect())),
    })
}

pub fn solve_neumann(
    a: &CoefTensor,
    data: &FrequencyField<NeumannVector>,
    halfspace: HalfSpace,
    opts: &SolveOptions,
) -> Result<FrequencyField<Solved>> {
    data.try_map(|s| solve_at(a, &s.xi, &s.value, halfspace, Problem::Neumann, opts))
}

pub fn solve_dirichlet(
    a: &CoefTensor,
    data: &FrequencyField<TraceVector>,
    halfspace: HalfSpace,
    opts: &SolveOptions,
) -> Result<FrequencyField<Solved>> {
    data.try_map(|s| solve_at(a, &s.xi, &s.value, halfspace, Problem::Dirichlet, opts))
}

/// A point `(x, t)` of a spatial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub x: Vec<f64>,
    pub t: f64,
}

/// Inverse Fourier synthesis of all components of `∇^j w` at the grid points:
/// `∂^γ w(x,t) = Σ weight · (2πiξ)^{γ_∥} ŵ^{(γ_{n+1})}(ξ,t) e^{2πiξ·x}`.
/// Components follow the canonical order of multiindices of order `j`.
/// Flagged frequencies contribute nothing.
pub fn synthesize(field: &FrequencyField<Solved>, grid: &[GridPoint], j: u32) -> Vec<Vec<Complex64>> {
    let gammas = enumerate(field.n + 1, j);
    let mut out = vec![vec![Complex64::new(0.0, 0.0); gammas.len()]; grid.len()];
    for sample in &field.samples {
        let Some(sol) = &sample.value.solution else { continue };
        let w = sol.exppoly();
        let v: Vec<Complex64> = sample.xi.iter().map(|&x| Complex64::new(0.0, 2.0 * PI * x)).collect();
        let horizontal: Vec<Complex64> = gammas.iter().map(|g| g.horizontal().monomial(&v)).collect();
        for (p, row) in grid.iter().zip(out.iter_mut()) {
            let phase: f64 = sample.xi.iter().zip(&p.x).map(|(a, b)| a * b).sum();
            let e = Complex64::from_polar(sample.weight, 2.0 * PI * phase);
            for (k, g) in gammas.iter().enumerate() {
                row[k] += e * horizontal[k] * w.eval_derivative(g.vertical(), p.t);
            }
        }
    }
    out
}
