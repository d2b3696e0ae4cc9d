//! Adaptive Gauss-Kronrod (7/15) quadrature for vector-valued complex
//! integrands on finite intervals.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    /// Relative tolerance on the max-norm of the integral.
    pub rel_tol: f64,
    /// Absolute floor for the error target, used when the integral is tiny.
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Vec<Complex64>,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    error: f64,
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn kronrod<F>(f: &mut F, a: f64, b: f64, len: usize) -> Segment
where
    F: FnMut(f64) -> Vec<Complex64>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = vec![Complex64::new(0.0, 0.0); len];
    let mut g = vec![Complex64::new(0.0, 0.0); len];
    let fc = f(centre);
    for i in 0..len {
        k[i] += fc[i] * WGK[7];
        g[i] += fc[i] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        for i in 0..len {
            let sum = f1[i] + f2[i];
            k[i] += sum * WGK[j];
            if j % 2 == 1 {
                g[i] += sum * WG[j / 2];
            }
        }
    }
    let mut error = 0.0f64;
    for i in 0..len {
        k[i] *= half;
        g[i] *= half;
        error = error.max((k[i] - g[i]).norm());
    }
    Segment {
        a,
        b,
        value: k,
        error,
    }
}

/// Integrates `f` over `[a, b]`, where `f` returns `len` components.
/// Bisects the segment with the largest error estimate until the total error
/// estimate is below `max(rel_tol · ‖integral‖, abs_tol)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, len: usize, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64) -> Vec<Complex64>,
{
    if a == b {
        return Ok(QuadResult {
            value: vec![Complex64::new(0.0, 0.0); len],
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut segments = vec![kronrod(&mut f, a, b, len)];
    let mut evaluations = 15;
    loop {
        let mut total = vec![Complex64::new(0.0, 0.0); len];
        let mut error = 0.0;
        for s in &segments {
            for i in 0..len {
                total[i] += s.value[i];
            }
            error += s.error;
        }
        let target = (opts.rel_tol * max_norm(&total)).max(opts.abs_tol);
        if error <= target {
            return Ok(QuadResult {
                value: total,
                error,
                evaluations,
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                tol: target,
                achieved: error,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Err(Error::Quadrature {
                tol: target,
                achieved: error,
            });
        }
        segments.push(kronrod(&mut f, seg.a, mid, len));
        segments.push(kronrod(&mut f, mid, seg.b, len));
        evaluations += 30;
    }
}

/// Scalar convenience wrapper.
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    Ok(integrate(|t| vec![f(t)], a, b, 1, opts)?.value[0])
}
