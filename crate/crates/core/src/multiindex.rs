//! Multiindices in `N^dim` and dense complex arrays indexed by them.
//!
//! The canonical layout is lexicographic on exponent vectors with the first
//! coordinate descending: for `dim = 2, order = 2` the order is
//! `(2,0), (1,1), (0,2)`. Every array in the crate uses this layout.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Exponent vector of a mixed partial derivative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Unit multiindex `e_j` scaled by `k`.
    pub fn axis(dim: usize, j: usize, k: u32) -> Self {
        let mut e = vec![0; dim];
        e[j] = k;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// The horizontal part (all but the last coordinate).
    pub fn horizontal(&self) -> MultiIndex {
        MultiIndex(self.0[..self.0.len() - 1].to_vec())
    }

    /// The last (vertical) exponent.
    pub fn vertical(&self) -> u32 {
        *self.0.last().expect("multiindex of dimension >= 1")
    }

    /// Appends a vertical exponent to a horizontal multiindex.
    pub fn with_vertical(&self, a: u32) -> MultiIndex {
        let mut e = self.0.clone();
        e.push(a);
        MultiIndex(e)
    }

    /// `v^α` for a complex vector `v` of matching length.
    pub fn monomial(&self, v: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(v)
            .fold(Complex64::new(1.0, 0.0), |acc, (&e, &x)| acc * x.powu(e))
    }

    /// `x^α` for a real vector.
    pub fn monomial_real(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .fold(1.0, |acc, (&e, &xi)| acc * xi.powi(e as i32))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multiindices of `dim` coordinates and the given order, in canonical order.
pub fn enumerate(dim: usize, order: u32) -> Vec<MultiIndex> {
    assert!(dim >= 1, "multiindex dimension must be positive");
    let mut out = Vec::with_capacity(count(dim, order));
    let mut buf = vec![0u32; dim];
    fill(&mut buf, 0, order, &mut out);
    out
}

fn fill(buf: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos == buf.len() - 1 {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        buf[pos] = e;
        fill(buf, pos + 1, remaining - e, out);
    }
}

/// Number of multiindices of `dim` coordinates and given order: `C(order+dim-1, dim-1)`.
pub fn count(dim: usize, order: u32) -> usize {
    binomial(order as u64 + dim as u64 - 1, dim as u64 - 1) as usize
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `|α|! / (α_1! ⋯ α_dim!)`.
pub fn multinomial(alpha: &MultiIndex) -> u64 {
    let mut total = 0u64;
    let mut acc = 1u64;
    for &e in alpha.exponents() {
        total += e as u64;
        acc *= binomial(total, e as u64);
    }
    acc
}

/// Position of `alpha` inside `enumerate(alpha.dim(), alpha.order())`.
pub fn rank(alpha: &MultiIndex) -> usize {
    let dim = alpha.dim();
    let mut remaining = alpha.order();
    let mut r = 0;
    for (pos, &e) in alpha.exponents().iter().enumerate().take(dim - 1) {
        // Entries with a larger exponent at `pos` come first.
        for larger in (e + 1)..=remaining {
            r += count(dim - pos - 1, remaining - larger);
        }
        remaining -= e;
    }
    r
}

/// Dense array of complex numbers indexed by the multiindices of one order.
#[derive(Clone, Debug, PartialEq)]
pub struct MIArray {
    dim: usize,
    order: u32,
    values: Vec<Complex64>,
}

impl MIArray {
    pub fn zeros(dim: usize, order: u32) -> Self {
        MIArray {
            dim,
            order,
            values: vec![Complex64::new(0.0, 0.0); count(dim, order)],
        }
    }

    pub fn from_values(dim: usize, order: u32, values: Vec<Complex64>) -> Result<Self> {
        let expected = count(dim, order);
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(MIArray { dim, order, values })
    }

    /// Unit array `e_ζ`.
    pub fn unit(zeta: &MultiIndex) -> Self {
        let mut a = MIArray::zeros(zeta.dim(), zeta.order());
        a.values[rank(zeta)] = Complex64::new(1.0, 0.0);
        a
    }

    /// The array `(v^α)_{|α| = order}`, e.g. the symbol of `∇^order` for `v = 2πi(ξ, τ)`.
    pub fn monomials(v: &[Complex64], order: u32) -> Self {
        let values = enumerate(v.len(), order)
            .iter()
            .map(|alpha| alpha.monomial(v))
            .collect();
        MIArray {
            dim: v.len(),
            order,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, alpha: &MultiIndex) -> Complex64 {
        self.values[rank(alpha)]
    }

    pub fn set(&mut self, alpha: &MultiIndex, value: Complex64) {
        let r = rank(alpha);
        self.values[r] = value;
    }

    fn check_shape(&self, other: &MIArray) -> Result<()> {
        if self.dim != other.dim || self.order != other.order {
            return Err(Error::ShapeMismatch {
                expected: self.values.len(),
                found: other.values.len(),
            });
        }
        Ok(())
    }
}

/// `⟨F, G⟩ = Σ_ζ conj(F_ζ) G_ζ`, conjugate-linear in the first argument.
pub fn inner(f: &MIArray, g: &MIArray) -> Result<Complex64> {
    f.check_shape(g)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a.conj() * b)
        .sum())
}
