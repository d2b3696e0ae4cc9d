#![allow(dead_code)]

pub mod fd_bvp;

use std::f64::consts::PI;

use halfspace_neumann::operator::CoefTensor;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Closed-form Neumann matrix of the special operator over the roots
/// `λ_k = 2πi|ξ| e^{iπk/(m+1)}`, `k = 1..m`.
pub fn closed_form_special_neumann(xi: &[f64], m: usize) -> DMatrix<Complex64> {
    let s = 2.0 * PI * xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let m1 = (m + 1) as f64;
    DMatrix::from_fn(m, m, |l, k| {
        let k = (k + 1) as f64;
        let top = Complex64::i().powu(l as u32) * (-2.0 * s.powi(2 * m as i32 - 1 - l as i32)) * (PI * (l + 1) as f64 * k / m1).sin();
        top / (Complex64::from_polar(1.0, 2.0 * PI * k / m1) - 1.0)
    })
}

/// Coefficients `C_ab(ξ)` of the reduced symbol, summed directly from the
/// tensor entries over multiindex pairs with vertical orders `a` and `b`.
pub fn reduced_coefficients(a: &CoefTensor, xi: &[f64]) -> DMatrix<Complex64> {
    let m = a.m() as usize;
    let n = a.n();
    let idx = a.multiindices();
    let v: Vec<Complex64> = xi.iter().map(|&x| Complex64::new(0.0, 2.0 * PI * x)).collect();
    let mono = |e: &[u32]| -> Complex64 { (0..n).map(|j| v[j].powu(e[j])).product() };
    let mut c = DMatrix::from_element(m + 1, m + 1, Complex64::new(0.0, 0.0));
    for (i, alpha) in idx.iter().enumerate() {
        for (j, beta) in idx.iter().enumerate() {
            let ea = alpha.exponents();
            let eb = beta.exponents();
            let va = ea[n] as usize;
            let vb = eb[n] as usize;
            c[(va, vb)] += mono(&ea[..n]).conj() * a.entries()[(i, j)] * mono(&eb[..n]);
        }
    }
    c
}

/// `max_k |x_k - y_k| / max_k |y_k|`.
pub fn relative_max_diff(x: &[Complex64], y: &[Complex64]) -> f64 {
    let scale = y.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let diff = x.iter().zip(y).fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
    diff / scale.max(f64::MIN_POSITIVE)
}
