//! Exponential polynomials `Σ c t^p e^{λt}`, the function class of every
//! per-frequency mode solution and kernel.

use num_complex::Complex64;

use crate::multiindex::factorial;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub lambda: Complex64,
    pub power: u32,
    pub coeff: Complex64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

impl ExpPoly {
    pub fn new() -> Self {
        ExpPoly::default()
    }

    pub fn monomial(lambda: Complex64, power: u32, coeff: Complex64) -> Self {
        let mut p = ExpPoly::new();
        p.push(lambda, power, coeff);
        p
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Adds `coeff t^power e^{λt}`, merging with an existing term of the same shape.
    pub fn push(&mut self, lambda: Complex64, power: u32, coeff: Complex64) {
        match self
            .terms
            .iter_mut()
            .find(|t| t.lambda == lambda && t.power == power)
        {
            Some(t) => t.coeff += coeff,
            None => self.terms.push(Term {
                lambda,
                power,
                coeff,
            }),
        }
    }

    pub fn add_scaled(&mut self, other: &ExpPoly, scale: Complex64) {
        for t in &other.terms {
            self.push(t.lambda, t.power, t.coeff * scale);
        }
    }

    pub fn scaled(&self, scale: Complex64) -> ExpPoly {
        let mut out = ExpPoly::new();
        out.add_scaled(self, scale);
        out
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| term.coeff * t.powi(term.power as i32) * (term.lambda * t).exp())
            .sum()
    }

    /// `k`-th derivative in `t`.
    pub fn derivative(&self, k: u32) -> ExpPoly {
        let mut out = ExpPoly::new();
        for term in &self.terms {
            // d^k (t^p e^{λt}) = Σ_i C(k,i) p!/(p-i)! t^{p-i} λ^{k-i} e^{λt}
            for i in 0..=k.min(term.power) {
                let c = binom(k, i) * factorial(term.power) / factorial(term.power - i);
                let coeff = term.coeff * c * term.lambda.powu(k - i);
                out.push(term.lambda, term.power - i, coeff);
            }
        }
        out
    }

    pub fn eval_derivative(&self, k: u32, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..=k.min(term.power) {
                    let c = binom(k, i) * factorial(term.power) / factorial(term.power - i);
                    acc += term.lambda.powu(k - i) * c * t.powi((term.power - i) as i32);
                }
                term.coeff * acc * (term.lambda * t).exp()
            })
            .sum()
    }
}

fn binom(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}
