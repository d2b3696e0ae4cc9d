//! Coefficient tensors, the built-in operator families and ellipticity
//! diagnostics.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{count, enumerate, multinomial, rank, MultiIndex};

/// Coefficients `A_{αβ}` of a constant-coefficient operator of order `2m` in
/// `n + 1` variables, indexed by multiindices of order `m` in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefTensor {
    n: usize,
    m: u32,
    entries: DMatrix<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticityReport {
    pub lambda_slice: f64,
    pub lambda_garding: f64,
    #[serde(rename = "Lambda")]
    pub lambda_bound: f64,
    pub is_self_adjoint: bool,
    pub sample_count: usize,
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    n: usize,
    m: u32,
    order: String,
    entries: Vec<[f64; 2]>,
}

impl CoefTensor {
    pub fn new(n: usize, m: u32, entries: DMatrix<Complex64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument("n and m must be positive".into()));
        }
        let side = count(n + 1, m);
        if entries.nrows() != side || entries.ncols() != side {
            return Err(Error::ShapeMismatch {
                expected: side * side,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(CoefTensor { n, m, entries })
    }

    pub fn zeros(n: usize, m: u32) -> Self {
        let side = count(n + 1, m);
        CoefTensor {
            n,
            m,
            entries: DMatrix::zeros(side, side),
        }
    }

    /// Horizontal dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Half the order of the operator.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn multiindices(&self) -> Vec<MultiIndex> {
        enumerate(self.n + 1, self.m)
    }

    pub fn get(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Complex64 {
        self.entries[(rank(alpha), rank(beta))]
    }

    pub fn set(&mut self, alpha: &MultiIndex, beta: &MultiIndex, value: Complex64) {
        let (i, j) = (rank(alpha), rank(beta));
        self.entries[(i, j)] = value;
    }

    /// `Λ = max |A_{αβ}|`.
    pub fn bound(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// The adjoint tensor `A*_{αβ} = conj(A_{βα})`.
    pub fn adjoint(&self) -> CoefTensor {
        CoefTensor {
            n: self.n,
            m: self.m,
            entries: self.entries.adjoint(),
        }
    }

    /// `(1 - s) self + s other`.
    pub fn interpolate(&self, other: &CoefTensor, s: f64) -> Result<CoefTensor> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::ShapeMismatch {
                expected: self.entries.len(),
                found: other.entries.len(),
            });
        }
        Ok(CoefTensor {
            n: self.n,
            m: self.m,
            entries: &self.entries * Complex64::from(1.0 - s) + &other.entries * Complex64::from(s),
        })
    }

    /// The reduced matrix `C_ab(ξ)`, `0 ≤ a, b ≤ m`, of the quadratic form
    /// obtained after Fourier transform in the horizontal variables:
    /// `⟨∇^m ψ, A ∇^m w⟩ = Σ_{a,b} conj(ψ^{(a)}) C_ab w^{(b)}`.
    pub fn reduced_matrix(&self, xi: &[f64]) -> DMatrix<Complex64> {
        assert_eq!(xi.len(), self.n, "frequency dimension mismatch");
        let m = self.m as usize;
        let v: Vec<Complex64> = xi.iter().map(|&x| Complex64::new(0.0, 2.0 * PI * x)).collect();
        let indices = self.multiindices();
        let weights: Vec<Complex64> = indices.iter().map(|a| a.horizontal().monomial(&v)).collect();
        let mut c = DMatrix::zeros(m + 1, m + 1);
        for (i, alpha) in indices.iter().enumerate() {
            let a = alpha.vertical() as usize;
            for (j, beta) in indices.iter().enumerate() {
                let b = beta.vertical() as usize;
                c[(a, b)] += weights[i].conj() * self.entries[(i, j)] * weights[j];
            }
        }
        c
    }

    fn to_json_struct(&self) -> TensorJson {
        let side = self.entries.nrows();
        let mut entries = Vec::with_capacity(side * side);
        for i in 0..side {
            for j in 0..side {
                let z = self.entries[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        TensorJson {
            n: self.n,
            m: self.m,
            order: "lex".into(),
            entries,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_struct()).expect("tensor serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let parsed: TensorJson = serde_json::from_value(value.clone())?;
        if parsed.order != "lex" {
            return Err(Error::Malformed(format!(
                "unsupported multiindex order {:?}",
                parsed.order
            )));
        }
        let side = count(parsed.n + 1, parsed.m);
        if parsed.entries.len() != side * side {
            return Err(Error::ShapeMismatch {
                expected: side * side,
                found: parsed.entries.len(),
            });
        }
        let entries = DMatrix::from_row_iterator(
            side,
            side,
            parsed.entries.iter().map(|[re, im]| Complex64::new(*re, *im)),
        );
        CoefTensor::new(parsed.n, parsed.m, entries)
    }
}

/// `ω_a(ξ) = Σ_{|μ| = k - a} (2πξ)^{2μ}` for `a = 0..=k`: the weight that turns
/// `|∇^k w|²` into `Σ_a ω_a |w^{(a)}|²` after a horizontal Fourier transform.
pub fn omega(xi: &[f64], k: u32) -> Vec<f64> {
    let sq: Vec<f64> = xi.iter().map(|&x| (2.0 * PI * x).powi(2)).collect();
    (0..=k)
        .map(|a| {
            enumerate(xi.len(), k - a)
                .iter()
                .map(|mu| mu.monomial_real(&sq))
                .sum()
        })
        .collect()
}

/// The operator with `A_{αα} = |α_∥|!/α_∥!` and no off-diagonal entries, whose
/// reduced symbol is `Σ_j (-1)^j (4π²|ξ|²)^{m-j} λ^{2j}`.
pub fn make_special_operator(n: usize, m: u32) -> CoefTensor {
    let mut a = CoefTensor::zeros(n, m);
    for alpha in a.multiindices() {
        let value = multinomial(&alpha.horizontal()) as f64;
        a.set(&alpha, &alpha, Complex64::from(value));
    }
    a
}

/// The biharmonic family `ρ⟨Δψ, Δφ⟩ + (1 - ρ) Σ_{j,k} ⟨∂_jk ψ, ∂_jk φ⟩`, where
/// `ρ` plays the role of the Poisson ratio.
pub fn make_biharmonic_rho(n: usize, rho: f64) -> CoefTensor {
    let dim = n + 1;
    let mut a = CoefTensor::zeros(n, 2);
    for j in 0..dim {
        let ej = MultiIndex::axis(dim, j, 2);
        a.set(&ej, &ej, Complex64::from(1.0));
        for k in 0..dim {
            if k != j {
                a.set(&ej, &MultiIndex::axis(dim, k, 2), Complex64::from(rho));
            }
        }
        for k in (j + 1)..dim {
            let mut e = vec![0; dim];
            e[j] = 1;
            e[k] = 1;
            let mixed = MultiIndex::new(e);
            a.set(&mixed, &mixed, Complex64::from(2.0 * (1.0 - rho)));
        }
    }
    a
}

/// True iff `max |A_{αβ} - conj(A_{βα})| ≤ tol`.
pub fn check_self_adjoint(a: &CoefTensor, tol: f64) -> bool {
    let e = &a.entries;
    let side = e.nrows();
    (0..side).all(|i| (0..side).all(|j| (e[(i, j)] - e[(j, i)].conj()).norm() <= tol))
}

/// Deterministic directions on the unit sphere `S^{n-1}`: all signed
/// coordinate axes plus a low-discrepancy set, `samples` points in total at
/// least. For `n = 1` the sphere is `{-1, 1}`.
pub fn sphere_directions(n: usize, samples: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[j] = sign;
            dirs.push(e);
        }
    }
    if n == 1 {
        return dirs;
    }
    let extra = samples.saturating_sub(dirs.len());
    match n {
        2 => {
            for k in 0..extra {
                let theta = 2.0 * PI * (k as f64 + 0.5) / extra as f64;
                dirs.push(vec![theta.cos(), theta.sin()]);
            }
        }
        3 => {
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            for k in 0..extra {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / extra as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = 2.0 * PI * k as f64 / golden;
                dirs.push(vec![r * phi.cos(), r * phi.sin(), z]);
            }
        }
        _ => {
            // Halton points in the cube [-1, 1]^n projected radially.
            let mut k = 1u64;
            while dirs.len() < samples {
                let p: Vec<f64> = (0..n)
                    .map(|j| 2.0 * radical_inverse(k, PRIMES[j % PRIMES.len()]) - 1.0)
                    .collect();
                k += 1;
                let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.1 {
                    dirs.push(p.iter().map(|x| x / norm).collect());
                }
            }
        }
    }
    dirs
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

/// Smallest generalized eigenvalue of `(Re C(ξ), Ω(ξ))` at one frequency,
/// where `Re C = (C + C*)/2` and `Ω = diag(ω_a(ξ))`.
pub fn slice_constant_at(a: &CoefTensor, xi: &[f64]) -> f64 {
    let c = a.reduced_matrix(xi);
    let w = omega(xi, a.m);
    let scale: Vec<f64> = w.iter().map(|x| 1.0 / x.sqrt()).collect();
    let k = c.nrows();
    let mut h = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            h[(i, j)] = (c[(i, j)] + c[(j, i)].conj()) * 0.5 * scale[i] * scale[j];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(h);
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Samples the slice-ellipticity and Gårding constants on the unit sphere.
pub fn slice_ellipticity(a: &CoefTensor, sphere_samples: usize) -> Result<EllipticityReport> {
    if sphere_samples == 0 {
        return Err(Error::InvalidArgument("sphere_samples must be positive".into()));
    }
    let dirs = sphere_directions(a.n, sphere_samples);
    let lambda_slice = dirs
        .iter()
        .map(|xi| slice_constant_at(a, xi))
        .fold(f64::INFINITY, f64::min);
    let lambda_garding = garding_constant(a, &dirs);
    Ok(EllipticityReport {
        lambda_slice,
        lambda_garding,
        lambda_bound: a.bound(),
        is_self_adjoint: check_self_adjoint(a, 1e-12),
        sample_count: dirs.len(),
    })
}

/// Minimum of `Re⟨V, A V⟩ / |V|²` over gradient arrays `V_α = (2πi ζ)^α` with
/// `ζ = (ξ cos θ, sin θ)` for the given horizontal directions.
fn garding_constant(a: &CoefTensor, dirs: &[Vec<f64>]) -> f64 {
    const ANGLES: usize = 33;
    let indices = a.multiindices();
    let mut best = f64::INFINITY;
    for xi in dirs {
        for k in 0..=ANGLES {
            let theta = -PI / 2.0 + PI * k as f64 / ANGLES as f64;
            let mut zeta: Vec<Complex64> = xi
                .iter()
                .map(|&x| Complex64::new(0.0, 2.0 * PI * x * theta.cos()))
                .collect();
            zeta.push(Complex64::new(0.0, 2.0 * PI * theta.sin()));
            let v = DVector::from_iterator(indices.len(), indices.iter().map(|al| al.monomial(&zeta)));
            let form = (v.adjoint() * &a.entries * &v)[(0, 0)].re;
            best = best.min(form / v.norm_squared());
        }
    }
    best
}
