#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Fourier,
    Cosine,
    Sine,
}

/// Forward transform matrix straight from the textbook formulas.
pub fn forward_matrix(basis: Basis, n: usize) -> Vec<Vec<Complex64>> {
    let nf = n as f64;
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| match basis {
                    Basis::Fourier => Complex64::from_polar(1.0 / nf.sqrt(), -2.0 * PI * (j * k) as f64 / nf),
                    Basis::Cosine => {
                        let s = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
                        Complex64::new(s * (PI * (j as f64 + 0.5) * k as f64 / nf).cos(), 0.0)
                    }
                    Basis::Sine => {
                        let s = if k == n - 1 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
                        Complex64::new(s * (PI * (j as f64 + 0.5) * (k + 1) as f64 / nf).sin(), 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn adjoint(m: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = m.len();
    (0..n).map(|r| (0..n).map(|c| m[c][r].conj()).collect()).collect()
}

pub fn matvec(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Applies `m` along x (`axis = 0`) or y (`axis = 1`) of an x-fastest grid.
pub fn along(m: &[Vec<Complex64>], v: &mut [Complex64], nx: usize, ny: usize, axis: usize) {
    if axis == 0 {
        for iy in 0..ny {
            let out = matvec(m, &v[iy * nx..(iy + 1) * nx]);
            v[iy * nx..(iy + 1) * nx].copy_from_slice(&out);
        }
    } else {
        for ix in 0..nx {
            let fiber: Vec<Complex64> = (0..ny).map(|iy| v[ix + nx * iy]).collect();
            for (iy, o) in matvec(m, &fiber).into_iter().enumerate() {
                v[ix + nx * iy] = o;
            }
        }
    }
}

/// Signed Fourier index: `j` below `N/2`, `j - N` above.
pub fn signed_index(j: usize, n: usize) -> f64 {
    if j < n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

/// Wavenumber of spectral index `j` on a unit domain.
pub fn wavenumber(basis: Basis, j: usize, n: usize) -> f64 {
    match basis {
        Basis::Fourier => 2.0 * PI * signed_index(j, n),
        Basis::Cosine => PI * j as f64,
        Basis::Sine => PI * (j + 1) as f64,
    }
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

pub fn distance_normalized(state: &[Complex64], reference: &[Complex64]) -> f64 {
    let rn = norm_sqr(reference).sqrt();
    state
        .iter()
        .zip(reference)
        .map(|(a, r)| (a - r / rn).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub struct SplitSetup<'a> {
    pub nx: usize,
    pub ny: usize,
    pub y_basis: Basis,
    pub u: &'a dyn Fn(f64) -> f64,
    pub d: f64,
    pub t: f64,
    pub steps: usize,
    pub strang: bool,
}

/// Classical split-step on the unit square: x-Fourier advection and
/// diffusion, then y diffusion, with `u` sampled at `y_q = q/(N_y - 1)`.
pub fn split_step(setup: &SplitSetup, initial: &[Complex64]) -> Vec<Complex64> {
    let (nx, ny) = (setup.nx, setup.ny);
    let fx = forward_matrix(Basis::Fourier, nx);
    let bx = adjoint(&fx);
    let fy = forward_matrix(setup.y_basis, ny);
    let by = adjoint(&fy);
    let dt = setup.t / setup.steps as f64;
    let u: Vec<f64> = (0..ny).map(|q| (setup.u)(q as f64 / (ny - 1) as f64)).collect();
    let xpart = |v: &mut Vec<Complex64>, h_adv: f64, h_diff: f64| {
        along(&fx, v, nx, ny, 0);
        for iy in 0..ny {
            for ix in 0..nx {
                let k = wavenumber(Basis::Fourier, ix, nx);
                v[ix + nx * iy] *= Complex64::from_polar((-setup.d * k * k * h_diff).exp(), -u[iy] * k * h_adv);
            }
        }
        along(&bx, v, nx, ny, 0);
    };
    let ypart = |v: &mut Vec<Complex64>| {
        along(&fy, v, nx, ny, 1);
        for iy in 0..ny {
            let k = wavenumber(setup.y_basis, iy, ny);
            for ix in 0..nx {
                v[ix + nx * iy] *= (-setup.d * k * k * dt).exp();
            }
        }
        along(&by, v, nx, ny, 1);
    };
    let mut v = initial.to_vec();
    for _ in 0..setup.steps {
        if setup.strang {
            xpart(&mut v, dt / 2.0, dt);
            ypart(&mut v);
            xpart(&mut v, dt / 2.0, 0.0);
        } else {
            xpart(&mut v, dt, dt);
            ypart(&mut v);
        }
    }
    v
}

/// Fourier coefficients `∫₀¹ exp(-100(η-½)²) e^{-2πikη} dη` by composite
/// Gauss-Legendre quadrature (5 nodes on 400 panels).
pub fn pulse_coefficient(k: i64) -> Complex64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let panels = 400;
    let h = 1.0 / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            let eta = mid + 0.5 * h * x;
            let g = (-100.0 * (eta - 0.5) * (eta - 0.5)).exp();
            acc += Complex64::from_polar(g * w * 0.5 * h, -2.0 * PI * k as f64 * eta);
        }
    }
    acc
}

/// Continuous periodic solution of the 1D pulse as a Fourier series.
pub fn pulse_series(x: &[f64], t: f64, u: f64, d: f64) -> Vec<f64> {
    let modes = 60i64;
    let coeffs: Vec<(i64, Complex64)> = (-modes..=modes).map(|k| (k, pulse_coefficient(k))).collect();
    x.iter()
        .map(|&xi| {
            coeffs
                .iter()
                .map(|&(k, c)| {
                    let kw = 2.0 * PI * k as f64;
                    c * Complex64::from_polar((-d * kw * kw * t).exp(), kw * (xi - u * t))
                })
                .sum::<Complex64>()
                .re
        })
        .collect()
}

pub fn pulse_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| (-100.0 * (i as f64 / n as f64 - 0.5).powi(2)).exp()).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}
