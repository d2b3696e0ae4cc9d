//! Per-frequency Newton potential, single and double layer potentials, the
//! extension operator `𝓔` and the `𝓔`-based Neumann pairing.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::halfspace::{conormal_from_traces, dirichlet_map, NeumannVector, TraceVector};
use crate::multiindex::{binomial, factorial};
use crate::quadrature::{integrate, QuadOptions};
use crate::symbol::{all_roots, HalfSpace, ModeBasis, ModeSolution, ReducedSymbol, Root};

/// Fundamental solution `E` of the reduced ODE, `p(D) E = δ`, decaying on
/// both sides: residues at the roots with `Re λ < 0` give `E` on `t > 0`,
/// minus the residues at roots with `Re λ > 0` give `E` on `t < 0`.
#[derive(Clone, Debug)]
pub struct OdeKernel {
    upper: ExpPoly,
    lower: ExpPoly,
    upper_basis: ModeBasis,
    lower_basis: ModeBasis,
    leading: Complex64,
}

impl OdeKernel {
    /// `E` restricted to one side, as an exponential polynomial.
    pub fn side(&self, halfspace: HalfSpace) -> &ExpPoly {
        match halfspace {
            HalfSpace::Upper => &self.upper,
            HalfSpace::Lower => &self.lower,
        }
    }

    pub fn basis(&self, halfspace: HalfSpace) -> &ModeBasis {
        match halfspace {
            HalfSpace::Upper => &self.upper_basis,
            HalfSpace::Lower => &self.lower_basis,
        }
    }

    /// Leading coefficient of `p`; `E^{(2m-1)}` jumps by its reciprocal at 0.
    pub fn leading(&self) -> Complex64 {
        self.leading
    }

    /// `E^{(k)}(t)` for `t ≠ 0`, or the one-sided limit at `t = 0` on `side`.
    pub fn eval(&self, k: u32, t: f64, side: HalfSpace) -> Complex64 {
        let hs = if t > 0.0 {
            HalfSpace::Upper
        } else if t < 0.0 {
            HalfSpace::Lower
        } else {
            side
        };
        self.side(hs).eval_derivative(k, t)
    }
}

/// Partial-fraction coefficients `c_j`, `j = 1..μ`, of `1/p` at the root `r`
/// of multiplicity `μ`: `1/p(λ) = Σ_j c_j (λ - r)^{-j} + (regular)`.
fn principal_part(roots: &[Root], index: usize, leading: Complex64) -> Vec<Complex64> {
    let r = roots[index].lambda;
    let mu = roots[index].multiplicity;
    // Taylor coefficients of h(λ) = 1 / (lc Π_{i≠index} (λ - r_i)^{μ_i}) at r.
    let mut h = vec![Complex64::new(0.0, 0.0); mu];
    h[0] = Complex64::new(1.0, 0.0) / leading;
    for (i, other) in roots.iter().enumerate() {
        if i == index {
            continue;
        }
        let d = r - other.lambda;
        let k = other.multiplicity as u64;
        // (d + x)^{-k} = d^{-k} Σ_j (-1)^j C(k+j-1, j) (x/d)^j
        let series: Vec<Complex64> = (0..mu)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                d.powi(-(k as i32) - j as i32) * (sign * binomial(k + j as u64 - 1, j as u64) as f64)
            })
            .collect();
        let mut product = vec![Complex64::new(0.0, 0.0); mu];
        for (a, ha) in h.iter().enumerate() {
            for (b, sb) in series.iter().enumerate().take(mu - a) {
                product[a + b] += ha * sb;
            }
        }
        h = product;
    }
    // c_{μ-k} = h_k
    (1..=mu).map(|j| h[mu - j]).collect()
}

pub fn newton_kernel(sym: &ReducedSymbol, root_tol: f64) -> Result<OdeKernel> {
    let roots = all_roots(sym, root_tol)?;
    let s = sym.scale();
    if let Some(r) = roots.iter().find(|r| r.lambda.re.abs() <= root_tol * s) {
        return Err(Error::ImaginaryAxisRoot {
            root: format!("{}", r.lambda),
            tol: root_tol * s,
        });
    }
    let leading = sym.leading_coefficient();
    let mut upper = ExpPoly::new();
    let mut lower = ExpPoly::new();
    for (i, root) in roots.iter().enumerate() {
        let c = principal_part(&roots, i, leading);
        // Res_{λ=r} e^{λt} (λ - r)^{-j} = t^{j-1}/(j-1)! e^{rt}
        for (j, cj) in c.iter().enumerate() {
            let coeff = cj / factorial(j as u32);
            if root.lambda.re < 0.0 {
                upper.push(root.lambda, j as u32, coeff);
            } else {
                lower.push(root.lambda, j as u32, -coeff);
            }
        }
    }
    let split = |hs: HalfSpace| {
        ModeBasis::new(
            hs,
            roots
                .iter()
                .filter(|r| r.lambda.re * hs.sign() < 0.0)
                .cloned()
                .collect(),
        )
    };
    let upper_basis = split(HalfSpace::Upper);
    let lower_basis = split(HalfSpace::Lower);
    for basis in [&upper_basis, &lower_basis] {
        if basis.dim() != sym.m() {
            return Err(Error::RootCount {
                expected: sym.m(),
                found: basis.dim(),
            });
        }
    }
    Ok(OdeKernel {
        upper,
        lower,
        upper_basis,
        lower_basis,
        leading,
    })
}

/// Restrictions of a layer potential to both half-lines, each a decaying
/// mode solution there.
#[derive(Clone, Debug)]
pub struct LayerPotential {
    pub upper: ModeSolution,
    pub lower: ModeSolution,
}

impl LayerPotential {
    pub fn side(&self, halfspace: HalfSpace) -> &ModeSolution {
        match halfspace {
            HalfSpace::Upper => &self.upper,
            HalfSpace::Lower => &self.lower,
        }
    }

    /// Derivative traces `u^{(j)}(0^±)`, `j < count`.
    pub fn traces(&self, halfspace: HalfSpace, count: u32) -> Vec<Complex64> {
        self.side(halfspace).traces(count)
    }

    /// Conormal data on one side.
    pub fn neumann(&self, sym: &ReducedSymbol, halfspace: HalfSpace) -> NeumannVector {
        let traces = self.traces(halfspace, 2 * sym.m() as u32);
        conormal_from_traces(sym, &traces, halfspace)
    }

    /// `u^{(k)}(t)` for `t ≠ 0`.
    pub fn eval(&self, k: u32, t: f64) -> Complex64 {
        if t > 0.0 {
            self.upper.derivative(k, t)
        } else {
            self.lower.derivative(k, t)
        }
    }
}

/// Expresses an exponential polynomial in the given basis; every term must
/// be one of the basis functions.
fn coefficients_in(basis: &ModeBasis, p: &ExpPoly) -> Vec<Complex64> {
    let functions = basis.functions();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); functions.len()];
    for term in p.terms() {
        let k = functions
            .iter()
            .position(|&(lambda, r)| lambda == term.lambda && r == term.power)
            .expect("term belongs to the basis");
        coeffs[k] += term.coeff;
    }
    coeffs
}

/// Single layer potential `u = Σ_{a<m} (-1)^a g_a E^{(a)}`: the Newton
/// potential of the layer source whose pairing with `∇^m φ` is
/// `Σ_a conj(φ^{(a)}(0)) g_a`.
pub fn single_layer(sym: &ReducedSymbol, kernel: &OdeKernel, g: &[Complex64]) -> LayerPotential {
    let m = sym.m();
    assert_eq!(g.len(), m, "Neumann data length must be m");
    let build = |hs: HalfSpace| {
        let mut u = ExpPoly::new();
        for (a, ga) in g.iter().enumerate() {
            let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
            u.add_scaled(&kernel.side(hs).derivative(a as u32), ga * sign);
        }
        let basis = kernel.basis(hs).clone();
        let coeffs = coefficients_in(&basis, &u);
        ModeSolution::new(basis, coeffs)
    };
    LayerPotential {
        upper: build(HalfSpace::Upper),
        lower: build(HalfSpace::Lower),
    }
}

/// Horizontal source weights `s_μ = g_a (2πiξ)^μ / ω_a(ξ)` over multiindices
/// `|μ| = m - a`, one array per `a < m`. Their pairing with the symbol of
/// `∇^m φ` reproduces `conj(φ^{(a)}) g_a`.
pub fn layer_source_weights(xi: &[f64], m: usize, g: &[Complex64]) -> Vec<Vec<Complex64>> {
    let v: Vec<Complex64> = xi
        .iter()
        .map(|&x| Complex64::new(0.0, 2.0 * std::f64::consts::PI * x))
        .collect();
    let omega = crate::operator::omega(xi, m as u32);
    (0..m)
        .map(|a| {
            crate::multiindex::enumerate(xi.len(), (m - a) as u32)
                .iter()
                .map(|mu| g[a] * mu.monomial(&v) / omega[a])
                .collect()
        })
        .collect()
}

/// Axis-aligned alternative: all of `g_a` is carried by `μ = (m - a) e_j`,
/// with `j` the coordinate of largest `|ξ_j|`.
pub fn layer_source_weights_axis(xi: &[f64], m: usize, g: &[Complex64]) -> Vec<Vec<Complex64>> {
    let j = xi
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(j, _)| j)
        .expect("nonempty frequency");
    let v: Vec<Complex64> = xi
        .iter()
        .map(|&x| Complex64::new(0.0, 2.0 * std::f64::consts::PI * x))
        .collect();
    (0..m)
        .map(|a| {
            let list = crate::multiindex::enumerate(xi.len(), (m - a) as u32);
            let target = crate::multiindex::MultiIndex::axis(xi.len(), j, (m - a) as u32);
            list.iter()
                .map(|mu| {
                    if *mu == target {
                        g[a] / mu.monomial(&v).conj()
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// Per-`a` layer densities `h_a = Σ_μ conj((2πiξ)^μ) s_μ` carried by a
/// source array; both weightings above give `h_a = g_a`.
pub fn reduced_layer_density(xi: &[f64], weights: &[Vec<Complex64>]) -> Vec<Complex64> {
    let m = weights.len();
    let v: Vec<Complex64> = xi
        .iter()
        .map(|&x| Complex64::new(0.0, 2.0 * std::f64::consts::PI * x))
        .collect();
    (0..m)
        .map(|a| {
            crate::multiindex::enumerate(xi.len(), (m - a) as u32)
                .iter()
                .zip(&weights[a])
                .map(|(mu, s)| mu.monomial(&v).conj() * s)
                .sum()
        })
        .collect()
}

/// The extension `𝓔φ(t) = Σ_{k<m} φ_k t^k/k! · e^{-(2π|ξ|t)^{2m}}` at one
/// frequency, with all `t`-derivatives in closed form.
#[derive(Clone, Debug)]
pub struct Extension {
    m: usize,
    c: f64,
    /// `P_j` in the variable `τ = ct`, ascending powers:
    /// `𝓔φ^{(j)}(t) = c^j P_j(τ) e^{-τ^{2m}}`.
    polys: Vec<Vec<Complex64>>,
}

impl Extension {
    pub fn new(phi: &[Complex64], xi: &[f64], max_order: usize) -> Result<Self> {
        let r = crate::symbol::norm(xi);
        if r == 0.0 {
            return Err(Error::ZeroFrequency);
        }
        let m = phi.len();
        let c = 2.0 * std::f64::consts::PI * r;
        let p0: Vec<Complex64> = phi
            .iter()
            .enumerate()
            .map(|(k, &f)| f / (c.powi(k as i32) * factorial(k as u32)))
            .collect();
        let mut polys = vec![p0];
        for _ in 0..max_order {
            let p = polys.last().expect("nonempty");
            // P_{j+1} = P_j' - 2m τ^{2m-1} P_j
            let mut next = vec![Complex64::new(0.0, 0.0); p.len() + 2 * m - 1];
            for (k, &a) in p.iter().enumerate().skip(1) {
                next[k - 1] += a * k as f64;
            }
            for (k, &a) in p.iter().enumerate() {
                next[k + 2 * m - 1] -= a * (2 * m) as f64;
            }
            polys.push(next);
        }
        Ok(Extension { m, c, polys })
    }

    pub fn max_order(&self) -> usize {
        self.polys.len() - 1
    }

    /// `𝓔φ^{(j)}(t)`.
    pub fn derivative(&self, j: usize, t: f64) -> Complex64 {
        let tau = self.c * t;
        let decay = (-tau.powi(2 * self.m as i32)).exp();
        if decay == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        crate::poly::eval(&self.polys[j], Complex64::from(tau)) * (self.c.powi(j as i32) * decay)
    }

    /// A cutoff beyond which `e^{-(ct)^{2m}} < e^{-55}` (about `1.3e-24`).
    pub fn cutoff(&self) -> f64 {
        55f64.powf(1.0 / (2.0 * self.m as f64)) / self.c
    }
}

/// `𝓔φ^{(j)}(t)` for `j = 0..=m`.
pub fn extension_e(phi: &[Complex64], xi: &[f64], t: f64) -> Result<Vec<Complex64>> {
    let m = phi.len();
    let e = Extension::new(phi, xi, m)?;
    Ok((0..=m).map(|j| e.derivative(j, t)).collect())
}


/// Double layer potential `𝒟f = -1_+ F + Π(1_+ A∇^m F)` with `F = 𝓔f`.
///
/// Integrating the Newton potential of the half-line source by parts gives
/// `𝒟f = -1_+ F + Σ_{r<m} β_r E^{(r)} + ∫_0^∞ E(t-s) q(s) ds` with
/// `q = p(D)F` and `β_r = Σ_{a>r} (-1)^a Σ_b C_ab F^{(a+b-1-r)}(0)`.
#[derive(Clone, Debug)]
pub struct DoubleLayer {
    m: usize,
    scale: f64,
    kernel: OdeKernel,
    kernel_derivs: [Vec<ExpPoly>; 2],
    extension: Extension,
    beta: Vec<Complex64>,
    charpoly: Vec<Complex64>,
    opts: QuadOptions,
}

impl DoubleLayer {
    pub fn new(sym: &ReducedSymbol, kernel: &OdeKernel, f: &[Complex64], opts: QuadOptions) -> Result<Self> {
        let m = sym.m();
        if f.len() != m {
            return Err(Error::ShapeMismatch {
                expected: m,
                found: f.len(),
            });
        }
        let extension = Extension::new(f, sym.xi(), 2 * m)?;
        let c = sym.c();
        let beta = (0..m)
            .map(|r| {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in (r + 1)..=m {
                    let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
                    for b in 0..=m {
                        let order = a + b - 1 - r;
                        let value = if order < m { f[order] } else { Complex64::new(0.0, 0.0) };
                        acc += c[(a, b)] * value * sign;
                    }
                }
                acc
            })
            .collect();
        let derivs = |hs: HalfSpace| (0..2 * m as u32).map(|k| kernel.side(hs).derivative(k)).collect();
        Ok(DoubleLayer {
            m,
            scale: sym.scale(),
            kernel: kernel.clone(),
            kernel_derivs: [derivs(HalfSpace::Upper), derivs(HalfSpace::Lower)],
            extension,
            beta,
            charpoly: sym.charpoly().to_vec(),
            opts,
        })
    }

    fn q(&self, s: f64) -> Complex64 {
        self.charpoly
            .iter()
            .enumerate()
            .map(|(k, pk)| pk * self.extension.derivative(k, s))
            .sum()
    }

    /// `I^{(k)}(t) = ∫_0^∞ E^{(k)}(t-s) q(s) ds`, `k < count ≤ 2m`, for the
    /// given evaluation point (at `t = 0` all of the mass lies in `s > t`).
    /// Components are scaled by `(2π|ξ|)^{-k}` during integration.
    fn volume_term(&self, t: f64, count: usize) -> Result<Vec<Complex64>> {
        let cutoff = self.extension.cutoff();
        let s = self.scale;
        let eval = |hs: usize, tt: f64, x: f64| -> Vec<Complex64> {
            let qx = self.q(x);
            (0..count)
                .map(|k| self.kernel_derivs[hs][k].eval(tt - x) * qx * s.powi(-(k as i32)))
                .collect()
        };
        let mut total = vec![Complex64::new(0.0, 0.0); count];
        let opts = self.opts;
        if t > 0.0 {
            let upper_end = t.min(cutoff);
            let r = integrate(|x| eval(0, t, x), 0.0, upper_end, count, opts)?;
            for k in 0..count {
                total[k] += r.value[k];
            }
        }
        let start = t.max(0.0);
        if start < cutoff {
            let r = integrate(|x| eval(1, t, x), start, cutoff, count, opts)?;
            for k in 0..count {
                total[k] += r.value[k];
            }
        }
        for (k, v) in total.iter_mut().enumerate() {
            *v *= s.powi(k as i32);
        }
        Ok(total)
    }

    /// `(𝒟f)^{(k)}(t)` for `k < count ≤ 2m`; at `t = 0` the one-sided limit
    /// on `side` is returned.
    pub fn derivatives(&self, t: f64, side: HalfSpace, count: usize) -> Result<Vec<Complex64>> {
        if count > 2 * self.m {
            return Err(Error::InvalidArgument("at most 2m derivatives are available".into()));
        }
        let hs = if t > 0.0 {
            HalfSpace::Upper
        } else if t < 0.0 {
            HalfSpace::Lower
        } else {
            side
        };
        let mut out = self.volume_term(t, count)?;
        for (k, slot) in out.iter_mut().enumerate() {
            for (r, b) in self.beta.iter().enumerate() {
                *slot += b * self.kernel.eval((r + k) as u32, t, hs);
            }
            if hs == HalfSpace::Upper {
                *slot -= self.extension.derivative(k, t.max(0.0));
            }
        }
        Ok(out)
    }

    /// Both one-sided restrictions as mode solutions, reconstructed from the
    /// Dirichlet traces at `0^±`.
    pub fn potential(&self) -> Result<LayerPotential> {
        let side = |hs: HalfSpace| -> Result<ModeSolution> {
            let traces = self.derivatives(0.0, hs, self.m)?;
            let basis = self.kernel.basis(hs).clone();
            let d = dirichlet_map(&basis);
            let f = d
                .lu()
                .solve(&DVector::from_vec(traces))
                .ok_or(Error::IllConditioned { cond: f64::INFINITY })?;
            Ok(ModeSolution::new(basis, f.iter().cloned().collect()))
        };
        Ok(LayerPotential {
            upper: side(HalfSpace::Upper)?,
            lower: side(HalfSpace::Lower)?,
        })
    }
}

/// Convenience constructor matching the single-layer signature.
pub fn double_layer(
    sym: &ReducedSymbol,
    kernel: &OdeKernel,
    f: &TraceVector,
    opts: QuadOptions,
) -> Result<DoubleLayer> {
    DoubleLayer::new(sym, kernel, f, opts)
}

/// `∫_ε^T ⟨∇^m 𝓔φ, A∇^m w⟩ dt = ∫_ε^T Σ_{a,b} conj(𝓔φ^{(a)}) C_ab w^{(b)} dt`
/// with `ε = 1e-8/|ξ|` and `T` the decay cutoff of `𝓔φ`. For decaying mode
/// solutions this equals `Σ_ℓ conj(φ_ℓ) G_ℓ`.
pub fn neumann_via_e(sym: &ReducedSymbol, w: &ModeSolution, phi: &[Complex64], opts: QuadOptions) -> Result<Complex64> {
    let m = sym.m();
    if phi.len() != m {
        return Err(Error::ShapeMismatch {
            expected: m,
            found: phi.len(),
        });
    }
    if phi.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ext = Extension::new(phi, sym.xi(), m)?;
    let c = sym.c().clone();
    let poly = w.exppoly();
    let derivs: Vec<ExpPoly> = (0..=m as u32).map(|b| poly.derivative(b)).collect();
    let eps = 1e-8 / sym.frequency();
    let r = integrate(
        |t| {
            let fa: Vec<Complex64> = (0..=m).map(|a| ext.derivative(a, t).conj()).collect();
            let wb: Vec<Complex64> = derivs.iter().map(|d| d.eval(t)).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..=m {
                for b in 0..=m {
                    acc += fa[a] * c[(a, b)] * wb[b];
                }
            }
            vec![acc]
        },
        eps,
        ext.cutoff(),
        1,
        opts,
    )?;
    Ok(r.value[0])
}
