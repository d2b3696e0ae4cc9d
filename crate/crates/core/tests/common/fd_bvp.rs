//! Finite-difference two-point boundary value solver for the reduced ODE
//! `Σ_{a,b} (-1)^a C_ab w^{(a+b)} = 0` on `[0, L]` with conormal data at
//! `t = 0` and `w^{(j)}(L) = 0`, `j < m`.
//!
//! Centered `(2m+1)`-point stencils from Fornberg's recursion, `m` ghost
//! points on each side and a banded LU with partial pivoting.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Fornberg weights: `w[d][j]` approximates the `d`-th derivative at `z` from
/// values at `x[j]`, for `d ≤ order`.
pub fn fornberg(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    (0..=order).map(|d| (0..n).map(|j| c[j][d]).collect()).collect()
}

/// Square banded matrix with lower bandwidth `kl` and upper bandwidth `ku`,
/// stored with room for the `kl` extra superdiagonals created by pivoting.
pub struct Banded {
    n: usize,
    kl: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl Banded {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Banded {
            n,
            kl,
            width,
            data: vec![Complex64::new(0.0, 0.0); n * width],
        }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let offset = j as isize - i as isize + self.kl as isize;
        assert!(offset >= 0 && (offset as usize) < self.width, "({i}, {j}) outside the band");
        i * self.width + offset as usize
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let offset = j as isize - i as isize + self.kl as isize;
        if offset < 0 || offset as usize >= self.width {
            Complex64::new(0.0, 0.0)
        } else {
            self.data[i * self.width + offset as usize]
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.slot(i, j);
        self.data[k] += v;
    }

    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.slot(i, j);
        self.data[k] = v;
    }

    fn last_col(&self, i: usize) -> usize {
        (i + self.width - self.kl - 1).min(self.n - 1)
    }

    /// Gaussian elimination with partial pivoting; consumes the matrix.
    pub fn solve(mut self, mut rhs: Vec<Complex64>) -> Vec<Complex64> {
        let n = self.n;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let p = (k..=last_row)
                .max_by(|&a, &b| self.get(a, k).norm().total_cmp(&self.get(b, k).norm()))
                .expect("nonempty pivot range");
            if p != k {
                for j in k..=self.last_col(k) {
                    let (a, b) = (self.get(k, j), self.get(p, j));
                    self.set(k, j, b);
                    self.set(p, j, a);
                }
                rhs.swap(k, p);
            }
            let pivot = self.get(k, k);
            assert!(pivot.norm() > 0.0, "singular banded system");
            for i in (k + 1)..=last_row {
                let factor = self.get(i, k) / pivot;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k..=self.last_col(k) {
                    let v = self.get(k, j);
                    if v != Complex64::new(0.0, 0.0) {
                        self.add(i, j, -factor * v);
                    }
                }
                let r = rhs[k];
                rhs[i] -= factor * r;
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for j in (i + 1)..=self.last_col(i) {
                acc -= self.get(i, j) * x[j];
            }
            x[i] = acc / self.get(i, i);
        }
        x
    }
}

/// Traces `w^{(j)}(0)`, `j < 2m`, of the finite-difference solution of the
/// upper half-space Neumann problem with data `g` and reduced coefficients
/// `c` (an `(m+1) × (m+1)` matrix), on `[0, length]` with `points` nodes.
pub fn fd_neumann_traces(c: &DMatrix<Complex64>, g: &[Complex64], length: f64, points: usize) -> Vec<Complex64> {
    let m = c.nrows() - 1;
    let h = length / (points - 1) as f64;
    let offsets: Vec<f64> = (-(m as i32)..=m as i32).map(|k| k as f64).collect();
    let raw = fornberg(0.0, &offsets, 2 * m);
    let stencil: Vec<Vec<f64>> = raw
        .iter()
        .enumerate()
        .map(|(d, w)| w.iter().map(|x| x / h.powi(d as i32)).collect())
        .collect();
    let size = points + 2 * m;
    let col = |node: isize| (node + m as isize) as usize;

    // charpoly coefficients p_k = Σ_{a+b=k} (-1)^a C_ab
    let mut p = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
    for a in 0..=m {
        for b in 0..=m {
            let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
            p[a + b] += c[(a, b)] * sign;
        }
    }

    let mut mat = Banded::new(size, 2 * m, 2 * m);
    let mut rhs = vec![Complex64::new(0.0, 0.0); size];
    // conormal conditions at t = 0
    for l in 0..m {
        let row = l;
        for a in (l + 1)..=m {
            let sign = if (a - 1 - l) % 2 == 0 { 1.0 } else { -1.0 };
            for b in 0..=m {
                let d = a + b - 1 - l;
                for (k, w) in stencil[d].iter().enumerate() {
                    mat.add(row, col(k as isize - m as isize), -c[(a, b)] * sign * *w);
                }
            }
        }
        rhs[row] = g[l];
    }
    // the ODE at every node
    for i in 0..points {
        let row = m + i;
        for (d, pd) in p.iter().enumerate() {
            for (k, w) in stencil[d].iter().enumerate() {
                mat.add(row, col(i as isize + k as isize - m as isize), pd * *w);
            }
        }
    }
    // decay conditions at t = L
    for j in 0..m {
        let row = m + points + j;
        let i = points as isize - 1;
        for (k, w) in stencil[j].iter().enumerate() {
            mat.add(row, col(i + k as isize - m as isize), Complex64::from(*w));
        }
    }
    let u = mat.solve(rhs);
    (0..2 * m)
        .map(|d| {
            stencil[d]
                .iter()
                .enumerate()
                .map(|(k, w)| u[col(k as isize - m as isize)] * *w)
                .sum()
        })
        .collect()
}
