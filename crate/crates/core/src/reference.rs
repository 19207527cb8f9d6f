//! Classical ground truth: the analytic periodic pulse, dense-matrix
//! spectral propagators, a tenth-order finite-difference solver, and the
//! error metric.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::splitting::{ScenarioConfig, Splitting};
use crate::state::QuantumState;
use crate::transforms::{wavenumbers, BoundaryKind};

/// Real field on an `nx × ny` grid, stored x-fastest (`ix + nx·iy`), which
/// matches the qubit layout with x in the low bits.
///
/// `x_i = i L / nx`; `y_q = q L / (ny - 1)` (`y = 0` when `ny = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    nx: usize,
    ny: usize,
    length: T,
    pub time: T,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn new(nx: usize, ny: usize, length: T, values: Vec<T>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter("field dimensions must be positive".into()));
        }
        if values.len() != nx * ny {
            return Err(Error::DimensionMismatch {
                expected: nx * ny,
                got: values.len(),
            });
        }
        if !length.is_finite() || length <= T::zero() {
            return Err(Error::InvalidParameter(format!("domain length must be positive, got {length}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("field contains non-finite values".into()));
        }
        Ok(Self {
            nx,
            ny,
            length,
            time: T::zero(),
            values,
        })
    }

    pub fn from_fn(nx: usize, ny: usize, length: T, mut f: impl FnMut(T, T) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                values.push(f(x_coord(ix, nx, length), y_coord(iy, ny, length)));
            }
        }
        Self::new(nx, ny, length, values)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> T {
        self.values[ix + self.nx * iy]
    }

    pub fn x(&self, ix: usize) -> T {
        x_coord(ix, self.nx, self.length)
    }

    pub fn y(&self, iy: usize) -> T {
        y_coord(iy, self.ny, self.length)
    }

    /// `(Δx, Δy)` of the finite-difference grid (`Δy = L / ny`).
    pub fn spacing(&self) -> (T, T) {
        (
            self.length / T::from_usize_exact(self.nx),
            self.length / T::from_usize_exact(self.ny),
        )
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a + v)
    }

    pub fn to_complex(&self) -> Vec<Complex<T>> {
        self.values.iter().map(|&v| Complex::new(v, T::zero())).collect()
    }

    /// Encodes the field as a normalized state on `log2(nx) + log2(ny)` qubits.
    pub fn to_state(&self) -> Result<QuantumState<T>> {
        QuantumState::encode_real(&self.values)
    }
}

fn x_coord<T: Real>(ix: usize, nx: usize, length: T) -> T {
    length * T::from_usize_exact(ix) / T::from_usize_exact(nx)
}

fn y_coord<T: Real>(iy: usize, ny: usize, length: T) -> T {
    if ny <= 1 {
        return T::zero();
    }
    length * T::from_usize_exact(iy) / T::from_usize_exact(ny - 1)
}

const PULSE_WIDTH: f64 = 100.0;

/// `erf(b) - erf(a)` without cancellation when both arguments share a sign.
pub fn erf_diff(a: f64, b: f64) -> f64 {
    if a >= 0.0 && b >= 0.0 {
        libm::erfc(a) - libm::erfc(b)
    } else if a <= 0.0 && b <= 0.0 {
        libm::erfc(-b) - libm::erfc(-a)
    } else {
        libm::erf(b) - libm::erf(a)
    }
}

/// Periodic solution of `φ_t + u φ_x = D φ_xx` on `[0, L)` for the initial
/// pulse `exp(-100 (x - L/2)²)` restricted to one period, as the image sum of
/// its convolution with the heat kernel (closed form in `erf`).
pub fn analytic_pulse_solution(x: f64, t: f64, u: f64, d: f64, length: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    if !d.is_finite() || d < 0.0 {
        return Err(Error::InvalidParameter(format!("diffusivity must be non-negative, got {d}")));
    }
    if !length.is_finite() || length <= 0.0 {
        return Err(Error::InvalidParameter(format!("domain length must be positive, got {length}")));
    }
    let c = 0.5 * length;
    let a = PULSE_WIDTH;
    let z0 = (x - u * t).rem_euclid(length);
    let dt = d * t;
    if dt == 0.0 {
        return Ok((-a * (z0 - c) * (z0 - c)).exp());
    }
    let b = 1.0 / (4.0 * dt);
    let ab = a + b;
    let root = ab.sqrt();
    let pref = (b / ab).sqrt();
    let sigma = (0.5 / a + 2.0 * dt).sqrt();
    let reach = 6.0 * sigma + (4.0 * dt * 37.0).sqrt();
    let images = 1 + (reach / length).ceil() as i64;
    let mut total = 0.0;
    for m in -images..=images {
        let z = z0 + m as f64 * length;
        let eta0 = (a * c + b * z) / ab;
        let gauss = (-a * b / ab * (z - c) * (z - c)).exp();
        if gauss == 0.0 {
            continue;
        }
        total += pref * gauss * 0.5 * erf_diff(-root * eta0, root * (length - eta0));
    }
    Ok(total)
}

/// [`analytic_pulse_solution`] sampled at `x_i = i L / N`.
pub fn analytic_pulse_samples(n_points: usize, t: f64, u: f64, d: f64, length: f64) -> Result<Vec<f64>> {
    (0..n_points)
        .map(|i| analytic_pulse_solution(length * i as f64 / n_points as f64, t, u, d, length))
        .collect()
}

/// Dense complex square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.n + c]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(c, r).conj())
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|r| {
                let row = &self.data[r * self.n..(r + 1) * self.n];
                row.iter().zip(v).fold(Complex::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Applies the matrix to every fiber of an `nx × ny` x-fastest grid
    /// along x (`axis = 0`) or y (`axis = 1`).
    pub fn apply_axis(&self, values: &mut [Complex<T>], nx: usize, ny: usize, axis: usize) {
        let (len, stride, count, step) = if axis == 0 { (nx, 1, ny, nx) } else { (ny, nx, nx, 1) };
        assert_eq!(len, self.n);
        let mut fiber = vec![Complex::zero(); len];
        for f in 0..count {
            let base = f * step;
            for (i, slot) in fiber.iter_mut().enumerate() {
                *slot = values[base + i * stride];
            }
            let out = self.apply(&fiber);
            for (i, o) in out.into_iter().enumerate() {
                values[base + i * stride] = o;
            }
        }
    }
}

/// Forward spectral transform from its defining formula:
/// Periodic `e^{-2πi jk/N}/√N`, Neumann orthonormal DCT-II, Dirichlet
/// orthonormal DST-II.
pub fn transform_matrix<T: Real>(kind: BoundaryKind, n_points: usize) -> DenseMatrix<T> {
    let n = T::from_usize_exact(n_points);
    let s1 = (T::one() / n).sqrt();
    let s2 = (T::lit(2.0) / n).sqrt();
    let half = T::lit(0.5);
    match kind {
        BoundaryKind::Periodic => DenseMatrix::from_fn(n_points, |k, j| {
            let ang = -T::lit(2.0) * T::PI() * T::from_usize_exact((j * k) % n_points) / n;
            Complex::from_polar(s1, ang)
        }),
        BoundaryKind::Neumann => DenseMatrix::from_fn(n_points, |k, q| {
            let s = if k == 0 { s1 } else { s2 };
            let v = s * (T::PI() * (T::from_usize_exact(q) + half) * T::from_usize_exact(k) / n).cos();
            Complex::new(v, T::zero())
        }),
        BoundaryKind::Dirichlet => DenseMatrix::from_fn(n_points, |k, q| {
            let s = if k + 1 == n_points { s1 } else { s2 };
            let v = s * (T::PI() * (T::from_usize_exact(q) + half) * T::from_usize_exact(k + 1) / n).sin();
            Complex::new(v, T::zero())
        }),
    }
}

/// Exact 1D propagator `e^{-i u k_j t - D k_j² t}` applied in the dense
/// spectral basis of `kind`. The result is unnormalized, so its squared
/// norm ratio is the success probability. Advection (`velocity ≠ 0`) is
/// only diagonal for periodic boundaries.
pub fn diagonal_propagator_oracle<T: Real>(
    initial: &[Complex<T>],
    kind: BoundaryKind,
    length: T,
    velocity: Option<T>,
    diffusivity: T,
    t: T,
) -> Result<Vec<Complex<T>>> {
    let n = initial.len();
    let table = wavenumbers(kind, n, length)?;
    let u = velocity.unwrap_or_else(T::zero);
    if kind != BoundaryKind::Periodic && !u.is_zero() {
        return Err(Error::InvalidParameter(format!("advection is not diagonal under {kind} boundaries")));
    }
    let f = transform_matrix::<T>(kind, n);
    let mut spectrum = f.apply(initial);
    for (s, &k) in spectrum.iter_mut().zip(&table.values) {
        let factor = Complex::from_polar((-diffusivity * k * k * t).exp(), -u * k * t);
        *s *= factor;
    }
    Ok(f.adjoint().apply(&spectrum))
}

/// Exact propagator for a uniform velocity in 2D: advection along periodic
/// x plus diffusion along both axes, diagonal in the product spectral basis.
/// `ny = 1` is the 1D case.
pub fn diagonal_propagator_oracle_2d<T: Real>(
    initial: &[Complex<T>],
    nx: usize,
    ny: usize,
    bc_y: BoundaryKind,
    length: T,
    velocity: T,
    diffusivity: T,
    t: T,
) -> Result<Vec<Complex<T>>> {
    if initial.len() != nx * ny {
        return Err(Error::DimensionMismatch {
            expected: nx * ny,
            got: initial.len(),
        });
    }
    let kx = wavenumbers(BoundaryKind::Periodic, nx, length)?.values;
    let (ky, fy) = if ny > 1 {
        (wavenumbers(bc_y, ny, length)?.values, Some(transform_matrix::<T>(bc_y, ny)))
    } else {
        (vec![T::zero()], None)
    };
    let fx = transform_matrix::<T>(BoundaryKind::Periodic, nx);
    let mut v = initial.to_vec();
    fx.apply_axis(&mut v, nx, ny, 0);
    if let Some(fy) = &fy {
        fy.apply_axis(&mut v, nx, ny, 1);
    }
    for iy in 0..ny {
        for ix in 0..nx {
            let k2 = kx[ix] * kx[ix] + ky[iy] * ky[iy];
            let factor = Complex::from_polar((-diffusivity * k2 * t).exp(), -velocity * kx[ix] * t);
            v[ix + nx * iy] *= factor;
        }
    }
    fx.adjoint().apply_axis(&mut v, nx, ny, 0);
    if let Some(fy) = &fy {
        fy.adjoint().apply_axis(&mut v, nx, ny, 1);
    }
    Ok(v)
}

/// Classical split-step propagation with dense transforms and the velocity
/// sampled directly at `y_q`, using the same step sequence as the quantum
/// circuit. Returns the unnormalized field.
pub fn split_step_oracle<T: Real>(config: &ScenarioConfig<T>, initial: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    config.validate()?;
    let nx = config.points_x();
    let ny = config.points_y();
    if initial.len() != nx * ny {
        return Err(Error::DimensionMismatch {
            expected: nx * ny,
            got: initial.len(),
        });
    }
    let dt = config.dt();
    let l = config.length;
    let d = config.diffusivity;
    let kx = wavenumbers(BoundaryKind::Periodic, nx, l)?.values;
    let fx = transform_matrix::<T>(BoundaryKind::Periodic, nx);
    let fx_inv = fx.adjoint();
    let y_axis = if config.n_y > 0 {
        let ky = wavenumbers(config.bc_y, ny, l)?.values;
        let fy = transform_matrix::<T>(config.bc_y, ny);
        let fy_inv = fy.adjoint();
        Some((ky, fy, fy_inv))
    } else {
        None
    };
    let u: Vec<T> = (0..ny).map(|q| config.velocity_at_row(q)).collect();

    let x_phase = |v: &mut [Complex<T>], h_adv: T, h_diff: T| {
        fx.apply_axis(v, nx, ny, 0);
        for iy in 0..ny {
            for ix in 0..nx {
                let k = kx[ix];
                let f = Complex::from_polar((-d * k * k * h_diff).exp(), -u[iy] * k * h_adv);
                v[ix + nx * iy] *= f;
            }
        }
        fx_inv.apply_axis(v, nx, ny, 0);
    };
    let y_diff = |v: &mut [Complex<T>]| {
        if let Some((ky, fy, fy_inv)) = &y_axis {
            fy.apply_axis(v, nx, ny, 1);
            for iy in 0..ny {
                let f = (-d * ky[iy] * ky[iy] * dt).exp();
                for ix in 0..nx {
                    v[ix + nx * iy] *= f;
                }
            }
            fy_inv.apply_axis(v, nx, ny, 1);
        }
    };

    let mut v = initial.to_vec();
    let half = dt * T::lit(0.5);
    for _ in 0..config.steps {
        match config.splitting {
            Splitting::Trotter => {
                x_phase(&mut v, dt, dt);
                y_diff(&mut v);
            }
            Splitting::Strang => {
                x_phase(&mut v, half, dt);
                y_diff(&mut v);
                x_phase(&mut v, half, T::zero());
            }
        }
    }
    Ok(v)
}

/// `‖ψ - r/‖r‖‖₂` between a state's amplitudes and a normalized reference.
pub fn error_norm<T: Real>(state: &QuantumState<T>, reference: &[Complex<T>]) -> Result<T> {
    error_norm_of(state.amplitudes(), reference)
}

pub fn error_norm_of<T: Real>(amplitudes: &[Complex<T>], reference: &[Complex<T>]) -> Result<T> {
    if amplitudes.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: amplitudes.len(),
            got: reference.len(),
        });
    }
    let rn = reference.iter().fold(T::zero(), |a, r| a + r.norm_sqr()).sqrt();
    if rn.is_nan() || rn <= T::zero() {
        return Err(Error::ZeroNorm);
    }
    let sq = amplitudes
        .iter()
        .zip(reference)
        .fold(T::zero(), |acc, (a, r)| acc + (a - r / rn).norm_sqr());
    Ok(sq.sqrt())
}

const D1: [f64; 5] = [5.0 / 6.0, -5.0 / 21.0, 5.0 / 84.0, -5.0 / 504.0, 1.0 / 1260.0];
const D2_CENTER: f64 = -5269.0 / 1800.0;
const D2: [f64; 5] = [5.0 / 3.0, -5.0 / 21.0, 5.0 / 126.0, -5.0 / 1008.0, 1.0 / 3150.0];
const HALO: usize = 5;

/// Fills a padded fiber `[HALO ghosts | n values | HALO ghosts]`.
fn pad<T: Real>(src: impl Iterator<Item = T>, n: usize, kind: BoundaryKind, out: &mut [T]) {
    for (i, v) in src.enumerate() {
        out[HALO + i] = v;
    }
    for m in 0..HALO {
        let (lo, hi) = match kind {
            BoundaryKind::Periodic => (out[HALO + (n - 1 - m % n)], out[HALO + m % n]),
            BoundaryKind::Neumann => (out[HALO + m.min(n - 1)], out[HALO + n - 1 - m.min(n - 1)]),
            BoundaryKind::Dirichlet => (-out[HALO + m.min(n - 1)], -out[HALO + n - 1 - m.min(n - 1)]),
        };
        out[HALO - 1 - m] = lo;
        out[HALO + n + m] = hi;
    }
}

/// Stencil derivatives of a padded fiber, written into `d1`/`d2` (unscaled).
fn stencil<T: Real>(p: &[T], n: usize, d1: &mut [T], d2: &mut [T]) {
    let c1: [T; 5] = D1.map(T::lit);
    let c2: [T; 5] = D2.map(T::lit);
    let c0 = T::lit(D2_CENTER);
    for i in 0..n {
        let mid = HALO + i;
        let mut a = T::zero();
        let mut b = c0 * p[mid];
        for m in 0..HALO {
            let plus = p[mid + m + 1];
            let minus = p[mid - m - 1];
            a += c1[m] * (plus - minus);
            b += c2[m] * (plus + minus);
        }
        d1[i] = a;
        d2[i] = b;
    }
}

/// Right-hand side `-u(y) φ_x + D (φ_xx + φ_yy)`.
struct FdOperator<T> {
    nx: usize,
    ny: usize,
    dx: T,
    dy: T,
    u: Vec<T>,
    d: T,
    bc_y: BoundaryKind,
}

impl<T: Real> FdOperator<T> {
    fn rhs(&self, phi: &[T], out: &mut [T]) {
        let (nx, ny) = (self.nx, self.ny);
        let mut pad_x = vec![T::zero(); nx + 2 * HALO];
        let mut d1 = vec![T::zero(); nx.max(ny)];
        let mut d2 = vec![T::zero(); nx.max(ny)];
        let inv_dx = T::one() / self.dx;
        let inv_dx2 = inv_dx * inv_dx;
        for iy in 0..ny {
            let row = &phi[iy * nx..(iy + 1) * nx];
            pad(row.iter().copied(), nx, BoundaryKind::Periodic, &mut pad_x);
            stencil(&pad_x, nx, &mut d1, &mut d2);
            for ix in 0..nx {
                out[ix + nx * iy] = -self.u[iy] * d1[ix] * inv_dx + self.d * d2[ix] * inv_dx2;
            }
        }
        if ny > 1 {
            let mut pad_y = vec![T::zero(); ny + 2 * HALO];
            let inv_dy2 = T::one() / (self.dy * self.dy);
            for ix in 0..nx {
                pad((0..ny).map(|iy| phi[ix + nx * iy]), ny, self.bc_y, &mut pad_y);
                stencil(&pad_y, ny, &mut d1, &mut d2);
                for iy in 0..ny {
                    out[ix + nx * iy] += self.d * d2[iy] * inv_dy2;
                }
            }
        }
    }
}

/// Tenth-order central finite differences with classical RK4 in time.
///
/// x is periodic; y uses ghost reflection about `-Δy/2` and `L + Δy/2`
/// (even for Neumann, odd for Dirichlet, wrap for periodic) with
/// `Δy = L / N_y`. The velocity of row `q` is taken at `y_q = q/(N_y - 1)`.
/// Internal step `0.4 · min(Δ/|u|max, Δ²/(2D))`.
pub fn fd10_reference<T: Real>(config: &ScenarioConfig<T>, initial: &ScalarField<T>) -> Result<ScalarField<T>> {
    config.validate()?;
    let nx = config.points_x();
    let ny = config.points_y();
    if initial.nx() != nx || initial.ny() != ny {
        return Err(Error::DimensionMismatch {
            expected: nx * ny,
            got: initial.nx() * initial.ny(),
        });
    }
    if nx < 2 * HALO || (ny > 1 && ny < HALO) {
        return Err(Error::InvalidParameter(format!(
            "grid {nx}×{ny} too small for the tenth-order stencil"
        )));
    }
    let d = config.diffusivity;
    if !d.is_finite() || d < T::zero() {
        return Err(Error::Unstable(format!("diffusivity {d} must be finite and non-negative")));
    }
    let l = config.length;
    let dx = l / T::from_usize_exact(nx);
    let dy = l / T::from_usize_exact(ny);
    let u: Vec<T> = (0..ny).map(|q| config.velocity_at_row(q)).collect();
    let umax = u.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let h = if ny > 1 { dx.min(dy) } else { dx };
    let mut limit = T::infinity();
    if umax > T::zero() {
        limit = limit.min(dx / umax);
    }
    if d > T::zero() {
        limit = limit.min(h * h / (T::lit(2.0) * d));
    }
    let t_end = config.t_final;
    let mut field = initial.clone();
    if t_end.is_zero() || !limit.is_finite() {
        field.time = initial.time + t_end;
        return Ok(field);
    }
    let dt_max = T::lit(0.4) * limit;
    let n_sub = (t_end / dt_max).ceil().to_usize().filter(|&s| s <= 50_000_000).ok_or_else(|| {
        Error::Unstable(format!("time step {:e} too small for t = {t_end}", dt_max.as_f64()))
    })?;
    let n_sub = n_sub.max(1);
    let h = t_end / T::from_usize_exact(n_sub);

    let op = FdOperator {
        nx,
        ny,
        dx,
        dy,
        u,
        d,
        bc_y: config.bc_y,
    };
    let size = nx * ny;
    let mut phi = field.values.clone();
    let mut k1 = vec![T::zero(); size];
    let mut k2 = vec![T::zero(); size];
    let mut k3 = vec![T::zero(); size];
    let mut k4 = vec![T::zero(); size];
    let mut tmp = vec![T::zero(); size];
    let half = T::lit(0.5);
    let sixth = h / T::lit(6.0);
    for _ in 0..n_sub {
        op.rhs(&phi, &mut k1);
        for i in 0..size {
            tmp[i] = phi[i] + half * h * k1[i];
        }
        op.rhs(&tmp, &mut k2);
        for i in 0..size {
            tmp[i] = phi[i] + half * h * k2[i];
        }
        op.rhs(&tmp, &mut k3);
        for i in 0..size {
            tmp[i] = phi[i] + h * k3[i];
        }
        op.rhs(&tmp, &mut k4);
        for i in 0..size {
            phi[i] += sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
        }
    }
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::Unstable("finite-difference solution diverged".into()));
    }
    field.values = phi;
    field.time = initial.time + t_end;
    Ok(field)
}
