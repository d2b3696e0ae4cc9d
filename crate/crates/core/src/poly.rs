//! Dense complex polynomials (coefficients in ascending powers) and a
//! simultaneous root finder with multiplicity detection.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiindex::binomial;

const MAX_ITER: usize = 800;

/// Horner evaluation of `Σ c_k z^k`.
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and first derivative in one pass.
fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Taylor coefficient `p^{(j)}(z) / j!` together with the size of the terms
/// that were summed, which bounds the rounding error of the evaluation.
fn taylor_coefficient(coeffs: &[Complex64], z: Complex64, j: usize) -> (Complex64, f64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (i, &c) in coeffs.iter().enumerate().skip(j) {
        let b = binomial(i as u64, j as u64) as f64;
        let term = c * b * z.powu((i - j) as u32);
        value += term;
        scale += c.norm() * b * z.norm().powi((i - j) as i32);
    }
    (value, scale)
}

fn degree(coeffs: &[Complex64]) -> usize {
    coeffs
        .iter()
        .rposition(|c| *c != Complex64::new(0.0, 0.0))
        .unwrap_or(0)
}

/// All complex roots of the polynomial, repeated according to how the
/// iteration resolves them (multiple roots come back as tight clusters).
///
/// Uses the Aberth-Ehrlich simultaneous iteration started on a circle whose
/// radius is the geometric mean of the root moduli, followed by Newton
/// polishing of isolated roots.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = degree(coeffs);
    if n == 0 {
        return Ok(Vec::new());
    }
    let coeffs = &coeffs[..=n];
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::RootFinding);
    }

    // Factor out roots at the origin exactly.
    let zeros_at_origin = coeffs
        .iter()
        .position(|c| *c != Complex64::new(0.0, 0.0))
        .unwrap_or(0);
    let reduced = &coeffs[zeros_at_origin..];
    let deg = reduced.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if deg == 0 {
        return Ok(out);
    }

    let lead = reduced[deg];
    let monic: Vec<Complex64> = reduced.iter().map(|c| c / lead).collect();
    let radius = monic[0].norm().powf(1.0 / deg as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..MAX_ITER {
        let mut converged = true;
        for i in 0..deg {
            let (p, dp) = eval_with_derivative(&monic, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() > 4.0 * f64::EPSILON * z[i].norm().max(radius) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    if z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::RootFinding);
    }
    out.extend(z);
    Ok(out)
}

/// Groups approximate roots into distinct roots with multiplicities.
///
/// Roots closer than `tol` are merged by single linkage. Neighbouring groups
/// that are still within a wider window are merged when the polynomial and
/// its derivatives up to the combined multiplicity all vanish at the merged
/// centre to rounding accuracy; this catches high-multiplicity roots whose
/// computed approximations spread beyond `tol`. Each group is represented by
/// the mean of its members, which is far better conditioned than any single
/// member. Isolated roots are polished by Newton's method.
pub fn cluster(coeffs: &[Complex64], approx: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let n = approx.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (approx[i] - approx[j]).norm() < tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    let mut seen: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match seen.iter().find(|(r, _)| *r == root) {
            Some(&(_, g)) => groups[g].push(approx[i]),
            None => {
                seen.push((root, groups.len()));
                groups.push(vec![approx[i]]);
            }
        }
    }

    let scale = approx.iter().fold(1.0f64, |acc, r| acc.max(r.norm()));
    let window = 1e-2 * scale;
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..groups.len() {
            for b in (a + 1)..groups.len() {
                let d = (mean(&groups[a]) - mean(&groups[b])).norm();
                if d < window && best.is_none_or(|(_, _, bd)| d < bd) {
                    let mut merged = groups[a].clone();
                    merged.extend_from_slice(&groups[b]);
                    let centre = refine_multiple(coeffs, mean(&merged), merged.len());
                    if is_multiple_root(coeffs, centre, merged.len()) {
                        best = Some((a, b, d));
                    }
                }
            }
        }
        match best {
            Some((a, b, _)) => {
                let moved = groups.remove(b);
                groups[a].extend(moved);
            }
            None => break,
        }
    }

    groups
        .iter()
        .map(|g| {
            let centre = mean(g);
            if g.len() == 1 {
                (newton_polish(coeffs, centre), 1)
            } else {
                (refine_multiple(coeffs, centre, g.len()), g.len())
            }
        })
        .collect()
}

fn mean(points: &[Complex64]) -> Complex64 {
    points.iter().sum::<Complex64>() / points.len() as f64
}

fn is_multiple_root(coeffs: &[Complex64], z: Complex64, multiplicity: usize) -> bool {
    (0..multiplicity).all(|j| {
        let (value, scale) = taylor_coefficient(coeffs, z, j);
        value.norm() <= 1e-11 * scale.max(f64::MIN_POSITIVE)
    })
}

/// Newton's method on `p^{(k-1)}`, for which a root of multiplicity `k` of
/// `p` is a simple root. Steps are only accepted while they reduce the
/// residual, so a wrong multiplicity guess cannot move the centre far.
fn refine_multiple(coeffs: &[Complex64], mut z: Complex64, k: usize) -> Complex64 {
    let mut residual = taylor_coefficient(coeffs, z, k - 1).0.norm();
    for _ in 0..8 {
        let value = taylor_coefficient(coeffs, z, k - 1).0;
        let slope = taylor_coefficient(coeffs, z, k).0 * k as f64;
        if slope == Complex64::new(0.0, 0.0) {
            break;
        }
        let candidate = z - value / slope;
        let r = taylor_coefficient(coeffs, candidate, k - 1).0.norm();
        if !(r < residual) {
            break;
        }
        z = candidate;
        residual = r;
    }
    z
}

fn newton_polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut residual = eval(coeffs, z).norm();
    for _ in 0..5 {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if dp == Complex64::new(0.0, 0.0) {
            break;
        }
        let candidate = z - p / dp;
        let r = eval(coeffs, candidate).norm();
        if !(r < residual) {
            break;
        }
        z = candidate;
        residual = r;
    }
    z
}
