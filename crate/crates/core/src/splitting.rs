//! Trotter and Strang steps for advection-diffusion in shear flows, and
//! full scenario runs.
//!
//! Register layout: x on qubits `0..n_x`, y on `n_x..n_x+n_y`, one ancilla
//! on top. Advection is diagonal with x in Fourier space and y in physical
//! space; diffusion is applied per axis in its own spectral basis.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;

use crate::advection::{grid_y, shear_advection_on, uniform_advection_on, VelocityProfile};
use crate::circuit::Circuit;
use crate::diffusion::diffusion_on;
use crate::error::{Error, Result};
use crate::reference::{
    analytic_pulse_samples, diagonal_propagator_oracle_2d, error_norm, split_step_oracle, transform_matrix,
    ScalarField,
};
use crate::scalar::Real;
use crate::state::QuantumState;
use crate::transforms::{wavenumbers, BoundaryKind, SpectralBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Splitting {
    Trotter,
    #[default]
    Strang,
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Splitting::Trotter => "trotter",
            Splitting::Strang => "strang",
        })
    }
}

impl FromStr for Splitting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trotter" | "lie" | "lie-trotter" => Ok(Splitting::Trotter),
            "strang" => Ok(Splitting::Strang),
            other => Err(Error::InvalidParameter(format!("unknown splitting '{other}'"))),
        }
    }
}

/// Scenario on a square domain `[0, L)²` (or `[0, L)` when `n_y = 0`).
/// The profile is non-dimensional: `u(y) = U · profile(y / L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<T> {
    pub n_x: usize,
    pub n_y: usize,
    pub length: T,
    pub velocity: T,
    pub diffusivity: T,
    pub t_final: T,
    pub steps: usize,
    pub splitting: Splitting,
    pub profile: VelocityProfile<T>,
    pub bc_x: BoundaryKind,
    pub bc_y: BoundaryKind,
    pub checkpoints: usize,
    pub merge_half_steps: bool,
}

impl<T: Real> ScenarioConfig<T> {
    /// `L = U = 1`, `D = 0`, `t = 0`, one Strang step, periodic x,
    /// Neumann y, 10 checkpoints.
    pub fn new(n_x: usize, n_y: usize, profile: VelocityProfile<T>) -> Self {
        Self {
            n_x,
            n_y,
            length: T::one(),
            velocity: T::one(),
            diffusivity: T::zero(),
            t_final: T::zero(),
            steps: 1,
            splitting: Splitting::Strang,
            profile,
            bc_x: BoundaryKind::Periodic,
            bc_y: BoundaryKind::Neumann,
            checkpoints: 10,
            merge_half_steps: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 {
            return Err(Error::EmptyRegister);
        }
        if self.bc_x != BoundaryKind::Periodic {
            return Err(Error::InvalidParameter("x must be periodic for Fourier advection".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        for (name, v) in [("length", self.length), ("velocity", self.velocity)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if self.length.is_nan() || self.length <= T::zero() {
            return Err(Error::InvalidParameter(format!("length must be positive, got {}", self.length)));
        }
        if !self.diffusivity.is_finite() || self.diffusivity < T::zero() {
            return Err(Error::NegativeDamping(self.diffusivity.as_f64()));
        }
        if !self.t_final.is_finite() || self.t_final < T::zero() {
            return Err(Error::InvalidParameter(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if self.n_y == 0 && !self.profile.is_uniform() {
            return Err(Error::InvalidParameter("a sheared profile needs a y register".into()));
        }
        Ok(())
    }

    /// `Pe = U L / D` (infinite without diffusion).
    pub fn peclet(&self) -> T {
        self.velocity * self.length / self.diffusivity
    }

    /// `Fo = D t / L²`.
    pub fn fourier(&self) -> T {
        self.diffusivity * self.t_final / (self.length * self.length)
    }

    pub fn dt(&self) -> T {
        self.t_final / T::from_usize_exact(self.steps)
    }

    pub fn points_x(&self) -> usize {
        1 << self.n_x
    }

    pub fn points_y(&self) -> usize {
        1 << self.n_y
    }

    pub fn main_qubits(&self) -> usize {
        self.n_x + self.n_y
    }

    pub fn ancilla(&self) -> usize {
        self.main_qubits()
    }

    pub fn x_qubits(&self) -> Vec<usize> {
        (0..self.n_x).collect()
    }

    pub fn y_qubits(&self) -> Vec<usize> {
        (self.n_x..self.n_x + self.n_y).collect()
    }

    /// Velocity of grid row `q` (at `y_q = q/(N_y - 1)`).
    pub fn velocity_at_row(&self, q: usize) -> T {
        self.velocity * self.profile.eval(grid_y(q, self.points_y()))
    }
}

struct StepBlocks<T> {
    open: Circuit<T>,
    y: Circuit<T>,
    close: Circuit<T>,
    merged: Circuit<T>,
}

/// `F_x · A(h_adv) · Dx(h_diff) · F_x⁻¹`, where `Dx` is skipped when
/// `h_diff` is `None`.
fn x_block<T: Real>(config: &ScenarioConfig<T>, h_adv: T, h_diff: Option<T>) -> Result<Circuit<T>> {
    let n = config.main_qubits() + 1;
    let x = config.x_qubits();
    let basis = SpectralBasis::new(BoundaryKind::Periodic);
    let mut c = basis.forward(&x, n)?;
    let alpha = T::lit(2.0) * T::PI() * config.velocity * h_adv / config.length;
    if config.n_y == 0 {
        c.append(&uniform_advection_on(&x, n, alpha * config.profile.eval(T::zero()))?)?;
    } else {
        c.append(&shear_advection_on(&config.profile, &x, &config.y_qubits(), n, alpha)?)?;
    }
    if let Some(h) = h_diff {
        let beta = BoundaryKind::Periodic.beta(config.diffusivity, h, config.length);
        c.append(&diffusion_on(BoundaryKind::Periodic, &x, config.ancilla(), n, beta)?)?;
    }
    c.append(&basis.backward(&x, n)?)?;
    Ok(c)
}

/// `T_y · Dy(h) · T_y⁻¹`; empty for 1D scenarios.
fn y_block<T: Real>(config: &ScenarioConfig<T>, h: T) -> Result<Circuit<T>> {
    let n = config.main_qubits() + 1;
    let mut c = Circuit::new(n);
    if config.n_y == 0 {
        return Ok(c);
    }
    let y = config.y_qubits();
    let basis = SpectralBasis::new(config.bc_y);
    let beta = config.bc_y.beta(config.diffusivity, h, config.length);
    c.append(&basis.forward(&y, n)?)?;
    c.append(&diffusion_on(config.bc_y, &y, config.ancilla(), n, beta)?)?;
    c.append(&basis.backward(&y, n)?)?;
    Ok(c)
}

fn step_blocks<T: Real>(config: &ScenarioConfig<T>, dt: T) -> Result<StepBlocks<T>> {
    let half = dt * T::lit(0.5);
    Ok(match config.splitting {
        Splitting::Trotter => StepBlocks {
            open: x_block(config, dt, Some(dt))?,
            y: y_block(config, dt)?,
            close: Circuit::new(config.main_qubits() + 1),
            merged: x_block(config, dt, Some(dt))?,
        },
        Splitting::Strang => StepBlocks {
            open: x_block(config, half, Some(dt))?,
            y: y_block(config, dt)?,
            close: x_block(config, half, None)?,
            merged: x_block(config, dt, Some(dt))?,
        },
    })
}

/// Full circuit of one step of size `dt` on the main register plus ancilla.
pub fn step_circuit<T: Real>(config: &ScenarioConfig<T>, dt: T) -> Result<Circuit<T>> {
    config.validate()?;
    let b = step_blocks(config, dt)?;
    let mut c = b.open;
    c.append(&b.y)?;
    c.append(&b.close)?;
    Ok(c)
}

fn single_step<T: Real>(state: &QuantumState<T>, config: &ScenarioConfig<T>, dt: T) -> Result<QuantumState<T>> {
    if state.n_qubits() != config.main_qubits() {
        return Err(Error::DimensionMismatch {
            expected: config.main_qubits(),
            got: state.n_qubits(),
        });
    }
    let circuit = step_circuit(config, dt)?;
    let mut s = state.with_ancillas(1)?;
    s.apply_circuit(&circuit)?;
    s.take_low_register(config.main_qubits())
}

/// One Lie-Trotter step: advection then diffusion.
pub fn trotter_step<T: Real>(state: &QuantumState<T>, config: &ScenarioConfig<T>, dt: T) -> Result<QuantumState<T>> {
    let cfg = ScenarioConfig {
        splitting: Splitting::Trotter,
        ..config.clone()
    };
    single_step(state, &cfg, dt)
}

/// One Strang step: half advection, diffusion, half advection.
pub fn strang_step<T: Real>(state: &QuantumState<T>, config: &ScenarioConfig<T>, dt: T) -> Result<QuantumState<T>> {
    let cfg = ScenarioConfig {
        splitting: Splitting::Strang,
        ..config.clone()
    };
    single_step(state, &cfg, dt)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<T> {
    pub step: usize,
    pub time: T,
    pub state: QuantumState<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T> {
    pub final_state: QuantumState<T>,
    /// Cumulative success probability after each step.
    pub success_prob_history: Vec<T>,
    pub error_norms: BTreeMap<String, T>,
    /// `‖φ(t)‖² / ‖φ(0)‖²` of the classical split-step propagation.
    pub oracle_success_prob: Option<T>,
    pub gate_counts: BTreeMap<String, usize>,
    pub checkpoint_states: Vec<Checkpoint<T>>,
}

impl<T: Real> RunResult<T> {
    pub fn success_prob(&self) -> T {
        self.final_state.success_prob()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Propagate the classical split-step oracle alongside the circuit.
    pub oracle: bool,
    /// Keep the states at the configured checkpoints.
    pub keep_checkpoints: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            oracle: true,
            keep_checkpoints: true,
        }
    }
}

/// Step indices (including 0) at which checkpoints are captured.
pub fn checkpoint_steps(steps: usize, checkpoints: usize) -> Vec<usize> {
    let mut out = vec![0];
    if checkpoints > 0 {
        for i in 1..=checkpoints {
            let s = ((i * steps) as f64 / checkpoints as f64).round() as usize;
            if s > *out.last().unwrap() {
                out.push(s);
            }
        }
    }
    if *out.last().unwrap() != steps {
        out.push(steps);
    }
    out
}

pub fn run_scenario<T: Real>(config: &ScenarioConfig<T>, initial: &QuantumState<T>) -> Result<RunResult<T>> {
    run_scenario_with(config, initial, RunOptions::default())
}

pub fn run_scenario_with<T: Real>(
    config: &ScenarioConfig<T>,
    initial: &QuantumState<T>,
    options: RunOptions,
) -> Result<RunResult<T>> {
    config.validate()?;
    let main = config.main_qubits();
    if initial.n_qubits() != main {
        return Err(Error::DimensionMismatch {
            expected: main,
            got: initial.n_qubits(),
        });
    }
    let dt = config.dt();
    let blocks = step_blocks(config, dt)?;
    let merge = config.merge_half_steps && config.splitting == Splitting::Strang;
    let marks = checkpoint_steps(config.steps, config.checkpoints);

    let mut state = initial.with_ancillas(1)?;
    let mut history = Vec::with_capacity(config.steps);
    let mut checkpoints = Vec::new();
    if options.keep_checkpoints {
        checkpoints.push(Checkpoint {
            step: 0,
            time: T::zero(),
            state: initial.clone(),
        });
    }
    let mut open = false;
    for step in 1..=config.steps {
        if open {
            state.apply_circuit(&blocks.merged)?;
        } else {
            state.apply_circuit(&blocks.open)?;
        }
        state.apply_circuit(&blocks.y)?;
        let at_mark = marks.binary_search(&step).is_ok();
        if merge && !at_mark && step < config.steps {
            open = true;
        } else {
            state.apply_circuit(&blocks.close)?;
            open = false;
        }
        history.push(state.success_prob());
        if options.keep_checkpoints && at_mark {
            checkpoints.push(Checkpoint {
                step,
                time: dt * T::from_usize_exact(step),
                state: state.take_low_register(main)?,
            });
        }
    }
    let final_state = state.take_low_register(main)?;

    let mut error_norms = BTreeMap::new();
    let mut oracle_success_prob = None;
    let amps = initial.amplitudes();
    if options.oracle {
        let reference = split_step_oracle(config, amps)?;
        error_norms.insert("split_oracle".to_string(), error_norm(&final_state, &reference)?);
        let ratio = norm_sqr(&reference) / norm_sqr(amps) * initial.success_prob();
        oracle_success_prob = Some(ratio);
    }
    if config.profile.is_uniform() {
        let reference = diagonal_propagator_oracle_2d(
            amps,
            config.points_x(),
            config.points_y(),
            config.bc_y,
            config.length,
            config.velocity * config.profile.eval(T::zero()),
            config.diffusivity,
            config.t_final,
        )?;
        error_norms.insert("exact".to_string(), error_norm(&final_state, &reference)?);
    }

    let step = step_circuit(config, dt)?;
    let counts = step.counts();
    let mut gate_counts = BTreeMap::new();
    gate_counts.insert("steps".to_string(), config.steps);
    gate_counts.insert("single_qubit_per_step".to_string(), counts.single_qubit);
    gate_counts.insert("multi_qubit_per_step".to_string(), counts.multi_qubit);
    gate_counts.insert("two_qubit_decomposed_per_step".to_string(), counts.two_qubit_decomposed);
    gate_counts.insert("postselections_per_step".to_string(), counts.postselections);
    gate_counts.insert("transforms_per_step".to_string(), counts.transforms);

    Ok(RunResult {
        final_state,
        success_prob_history: history,
        error_norms,
        oracle_success_prob,
        gate_counts,
        checkpoint_states: checkpoints,
    })
}

fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |a, c| a + c.norm_sqr())
}

/// Dense derivative operator along one axis: `∂ = B' · F`, with `F` the
/// forward spectral transform and `B'` the derivative of the synthesis
/// basis at the grid points.
fn derivative_matrix<T: Real>(kind: BoundaryKind, n: usize, length: T) -> Result<Vec<Vec<Complex<T>>>> {
    let f = transform_matrix::<T>(kind, n);
    let k = wavenumbers(kind, n, length)?.values;
    let inv = f.adjoint();
    let mut synth = vec![vec![Complex::zero(); n]; n];
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let nf = T::from_usize_exact(n);
    for (q, row) in synth.iter_mut().enumerate() {
        for (j, s) in row.iter_mut().enumerate() {
            *s = match kind {
                BoundaryKind::Periodic => {
                    let kj = if 2 * j == n { T::zero() } else { k[j] };
                    inv.get(q, j) * Complex::new(T::zero(), kj)
                }
                BoundaryKind::Neumann => {
                    let norm = if j == 0 { (T::one() / nf).sqrt() } else { (two / nf).sqrt() };
                    let arg = T::PI() * (T::from_usize_exact(q) + half) * T::from_usize_exact(j) / nf;
                    Complex::new(-k[j] * norm * arg.sin(), T::zero())
                }
                BoundaryKind::Dirichlet => {
                    let norm = if j + 1 == n { (T::one() / nf).sqrt() } else { (two / nf).sqrt() };
                    let arg = T::PI() * (T::from_usize_exact(q) + half) * T::from_usize_exact(j + 1) / nf;
                    Complex::new(k[j] * norm * arg.cos(), T::zero())
                }
            };
        }
    }
    Ok((0..n)
        .map(|q| {
            (0..n)
                .map(|c| (0..n).fold(Complex::zero(), |acc, j| acc + synth[q][j] * f.get(j, c)))
                .collect()
        })
        .collect())
}

fn apply_real_axis<T: Real>(m: &[Vec<Complex<T>>], v: &[T], nx: usize, ny: usize, axis: usize) -> Vec<T> {
    let mut out = vec![T::zero(); v.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            let mut acc = Complex::zero();
            if axis == 0 {
                for (c, mc) in m[ix].iter().enumerate() {
                    acc += mc * v[c + nx * iy];
                }
            } else {
                for (c, mc) in m[iy].iter().enumerate() {
                    acc += mc * v[ix + nx * c];
                }
            }
            out[ix + nx * iy] = acc.re;
        }
    }
    out
}

/// Leading local splitting error `D (2 u'(y) ∂_xy φ + u''(y) ∂_x φ)`, per
/// unit `Δt²/2`, with spectral derivatives.
pub fn commutator_error_estimate<T: Real>(config: &ScenarioConfig<T>, field: &ScalarField<T>) -> Result<ScalarField<T>> {
    let nx = config.points_x();
    let ny = config.points_y();
    if field.nx() != nx || field.ny() != ny {
        return Err(Error::DimensionMismatch {
            expected: nx * ny,
            got: field.nx() * field.ny(),
        });
    }
    let l = config.length;
    let mut out = vec![T::zero(); nx * ny];
    if config.n_y > 0 && !config.profile.is_uniform() {
        let dx = derivative_matrix(BoundaryKind::Periodic, nx, l)?;
        let dy = derivative_matrix(config.bc_y, ny, l)?;
        let phi_x = apply_real_axis(&dx, field.values(), nx, ny, 0);
        let phi_xy = apply_real_axis(&dy, &phi_x, nx, ny, 1);
        for iy in 0..ny {
            let y = grid_y::<T>(iy, ny);
            let u1 = config.velocity * config.profile.derivative(y) / l;
            let u2 = config.velocity * config.profile.second_derivative(y) / (l * l);
            for ix in 0..nx {
                let i = ix + nx * iy;
                out[i] = config.diffusivity * (T::lit(2.0) * u1 * phi_xy[i] + u2 * phi_x[i]);
            }
        }
    }
    let mut res = ScalarField::new(nx, ny, l, out)?;
    res.time = field.time;
    Ok(res)
}

/// Splits `field` into the fluctuation about the linear steady state
/// `φ̄ = offset + x ∂_xφ̄ + y ∂_yφ̄` and `φ̄` itself.
pub fn decompose_steady_state<T: Real>(
    field: &ScalarField<T>,
    gradients: (T, T),
    offset: T,
) -> Result<(ScalarField<T>, ScalarField<T>)> {
    let (gx, gy) = gradients;
    let (nx, ny) = (field.nx(), field.ny());
    let mut steady = Vec::with_capacity(nx * ny);
    let mut fluct = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let s = offset + field.x(ix) * gx + field.y(iy) * gy;
            steady.push(s);
            fluct.push(field.get(ix, iy) - s);
        }
    }
    let mut f = ScalarField::new(nx, ny, field.length(), fluct)?;
    let mut s = ScalarField::new(nx, ny, field.length(), steady)?;
    f.time = field.time;
    s.time = field.time;
    Ok((f, s))
}

/// The periodic pulse `exp(-100 (x - L/2)²)`, uniform in y.
pub fn pulse_field<T: Real>(nx: usize, ny: usize, length: T) -> Result<ScalarField<T>> {
    let c = length * T::lit(0.5);
    ScalarField::from_fn(nx, ny, length, |x, _| (-T::lit(100.0) * (x - c) * (x - c)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsePoint {
    pub n_qubits: usize,
    /// Largest error norm over the checkpoints.
    pub max_error: f64,
    pub final_error: f64,
    pub success_prob: f64,
}

/// 1D pulse against the analytic solution: at each of `config.checkpoints`
/// equispaced times `t_i`, one step of `config.splitting` from the initial
/// pulse to `t_i` is compared with the analytic field at `t_i`. The flow is
/// uniform, so the step is exact in time.
pub fn pulse_convergence_point(config: &ScenarioConfig<f64>) -> Result<PulsePoint> {
    config.validate()?;
    if config.n_y != 0 {
        return Err(Error::InvalidParameter("pulse convergence needs a 1D scenario".into()));
    }
    let n = config.points_x();
    let l = config.length;
    let initial = pulse_field::<f64>(n, 1, l)?.to_state()?;
    let u = config.velocity * config.profile.eval(0.0);
    let mut cfg = config.clone();
    cfg.steps = 1;
    let mut max_error: f64 = 0.0;
    let mut final_error = 0.0;
    let mut success_prob = 1.0;
    let count = config.checkpoints.max(1);
    for i in 1..=count {
        let t = config.t_final * i as f64 / count as f64;
        cfg.t_final = t;
        let s = single_step(&initial, &cfg, t)?;
        let exact: Vec<Complex<f64>> = analytic_pulse_samples(n, t, u, config.diffusivity, l)?
            .into_iter()
            .map(|v| Complex::new(v, 0.0))
            .collect();
        let e = error_norm(&s, &exact)?;
        max_error = max_error.max(e);
        final_error = e;
        success_prob = s.success_prob();
    }
    Ok(PulsePoint {
        n_qubits: config.n_x,
        max_error,
        final_error,
        success_prob,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    slope.is_finite().then_some(slope)
}
