//! Spectral transforms: the exact QFT circuit, the orthonormal cosine and
//! sine transforms (type II), and wavenumber tables per boundary kind.
//!
//! Sign convention: [`build_qft_circuit`] is the textbook QFT,
//! `|x> -> N^{-1/2} Σ_k e^{+2πi xk/N} |k>`. The solver analyses a periodic
//! field with its adjoint so that spectral index `j` carries physical
//! wavenumber `k_j` and a positive velocity transports toward `+x`
//! (see [`SpectralBasis`]).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rustdct::DctPlanner;

use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::scalar::Real;
use crate::state::QuantumState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Periodic,
    /// Zero gradient, even reflection about the half-cell boundary.
    Neumann,
    /// Zero value, odd reflection about the half-cell boundary.
    Dirichlet,
}

impl BoundaryKind {
    pub const ALL: [BoundaryKind; 3] = [Self::Periodic, Self::Neumann, Self::Dirichlet];

    /// Wavenumber quantum: `2π/L` for periodic, `π/L` otherwise.
    pub fn base_wavenumber<T: Real>(self, length: T) -> T {
        match self {
            Self::Periodic => T::lit(2.0) * T::PI() / length,
            Self::Neumann | Self::Dirichlet => T::PI() / length,
        }
    }

    /// Diffusion exponent scale `β = D t k₁²` (β₁ periodic, β₂ walls).
    pub fn beta<T: Real>(self, diffusivity: T, time: T, length: T) -> T {
        let k = self.base_wavenumber(length);
        diffusivity * time * k * k
    }
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Periodic => "periodic",
            Self::Neumann => "neumann",
            Self::Dirichlet => "dirichlet",
        })
    }
}

impl FromStr for BoundaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "periodic" => Ok(Self::Periodic),
            "neumann" => Ok(Self::Neumann),
            "dirichlet" => Ok(Self::Dirichlet),
            other => Err(Error::InvalidParameter(format!(
                "unknown boundary kind `{other}` (expected periodic, neumann or dirichlet)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberTable<T> {
    pub values: Vec<T>,
    pub kind: BoundaryKind,
    pub length: T,
}

/// Wavenumbers in spectral-index order.
///
/// Periodic: `2π/L · {0, …, N/2-1, -N/2, …, -1}`; Neumann: `πj/L`;
/// Dirichlet: `π(j+1)/L`.
pub fn wavenumbers<T: Real>(kind: BoundaryKind, n_points: usize, length: T) -> Result<WavenumberTable<T>> {
    if n_points < 2 || !n_points.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n_points));
    }
    if !length.is_finite() || length <= T::zero() {
        return Err(Error::InvalidParameter(format!("domain length must be positive, got {length}")));
    }
    let base = kind.base_wavenumber(length);
    let values = (0..n_points)
        .map(|j| {
            let m = match kind {
                BoundaryKind::Periodic if j >= n_points / 2 => j as f64 - n_points as f64,
                BoundaryKind::Periodic | BoundaryKind::Neumann => j as f64,
                BoundaryKind::Dirichlet => j as f64 + 1.0,
            };
            base * T::lit(m)
        })
        .collect();
    Ok(WavenumberTable { values, kind, length })
}

/// Exact QFT on qubits `0..n` including the final swap network.
pub fn build_qft_circuit<T: Real>(n: usize, inverse: bool) -> Result<Circuit<T>> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    let qubits: Vec<usize> = (0..n).collect();
    qft_on(&qubits, n, inverse)
}

/// QFT on an arbitrary register (`qubits[0]` least significant) inside an
/// `n_qubits` circuit.
pub fn qft_on<T: Real>(qubits: &[usize], n_qubits: usize, inverse: bool) -> Result<Circuit<T>> {
    validate_register(qubits, n_qubits)?;
    let n = qubits.len();
    let mut gates = Vec::with_capacity(n * (n + 1) / 2 + n / 2);
    for i in (0..n).rev() {
        gates.push(GateOp::hadamard(qubits[i]));
        for j in (0..i).rev() {
            let theta = T::PI() / T::lit(2f64.powi((i - j) as i32));
            gates.push(GateOp::controlled_phase(&[qubits[j]], qubits[i], theta));
        }
    }
    for i in 0..n / 2 {
        gates.push(GateOp::swap(qubits[i], qubits[n - 1 - i]));
    }
    if inverse {
        gates = gates.iter().rev().map(GateOp::inverse).collect();
    }
    let mut circuit = Circuit::new(n_qubits);
    for g in gates {
        circuit.push_gate(g)?;
    }
    Ok(circuit)
}

pub(crate) fn validate_register(qubits: &[usize], n_qubits: usize) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::InvalidRegister("empty qubit set".into()));
    }
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidRegister(format!("duplicate qubit in {qubits:?}")));
    }
    if let Some(&q) = sorted.last() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
    }
    Ok(())
}

/// Real orthogonal transforms applied directly to the statevector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    /// Orthonormal DCT-II: row 0 `√(1/N)`, row k `√(2/N) cos[π(n+½)k/N]`.
    Cosine,
    /// Orthonormal DST-II: `√(2/N) sin[π(n+½)(k+1)/N]`, last row scaled by `1/√2`.
    Sine,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cosine => "qct",
            Self::Sine => "qst",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralTransform {
    pub kind: TransformKind,
    pub qubits: Vec<usize>,
    pub inverse: bool,
}

pub fn apply_qct<T: Real>(state: &mut QuantumState<T>, axis_qubits: &[usize], inverse: bool) -> Result<()> {
    apply_real_transform(state, TransformKind::Cosine, axis_qubits, inverse)
}

pub fn apply_qst<T: Real>(state: &mut QuantumState<T>, axis_qubits: &[usize], inverse: bool) -> Result<()> {
    apply_real_transform(state, TransformKind::Sine, axis_qubits, inverse)
}

pub(crate) fn apply_real_transform<T: Real>(
    state: &mut QuantumState<T>,
    kind: TransformKind,
    axis_qubits: &[usize],
    inverse: bool,
) -> Result<()> {
    validate_register(axis_qubits, state.n_qubits())?;
    let len = 1usize << axis_qubits.len();
    let offsets: Vec<usize> = (0..len)
        .map(|local| {
            axis_qubits
                .iter()
                .enumerate()
                .filter(|(r, _)| local >> r & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | 1 << q)
        })
        .collect();
    let axis_mask = offsets[len - 1];

    let mut planner = DctPlanner::<T>::new();
    let plan = match kind {
        TransformKind::Cosine => planner.plan_dct2(len),
        TransformKind::Sine => planner.plan_dst2(len),
    };
    let mut scratch = vec![T::zero(); plan.get_scratch_len()];
    let mut re = vec![T::zero(); len];
    let mut im = vec![T::zero(); len];

    let nf = T::from_usize_exact(len);
    let s1 = (T::one() / nf).sqrt();
    let s2 = (T::lit(2.0) / nf).sqrt();
    let run = |buf: &mut [T], scratch: &mut [T]| match (kind, inverse) {
        (TransformKind::Cosine, false) => {
            plan.process_dct2_with_scratch(buf, scratch);
            buf[0] *= s1;
            buf[1..].iter_mut().for_each(|v| *v *= s2);
        }
        (TransformKind::Cosine, true) => {
            buf[0] *= T::lit(2.0) * s1;
            buf[1..].iter_mut().for_each(|v| *v *= s2);
            plan.process_dct3_with_scratch(buf, scratch);
        }
        (TransformKind::Sine, false) => {
            plan.process_dst2_with_scratch(buf, scratch);
            buf.iter_mut().for_each(|v| *v *= s2);
            buf[len - 1] *= T::FRAC_1_SQRT_2();
        }
        (TransformKind::Sine, true) => {
            buf.iter_mut().for_each(|v| *v *= s2);
            buf[len - 1] *= T::SQRT_2();
            plan.process_dst3_with_scratch(buf, scratch);
        }
    };

    let amps = state.amplitudes_mut();
    for base in 0..amps.len() {
        if base & axis_mask != 0 {
            continue;
        }
        for (k, &off) in offsets.iter().enumerate() {
            let a = amps[base | off];
            re[k] = a.re;
            im[k] = a.im;
        }
        run(&mut re, &mut scratch);
        run(&mut im, &mut scratch);
        for (k, &off) in offsets.iter().enumerate() {
            amps[base | off] = Complex::new(re[k], im[k]);
        }
    }
    Ok(())
}

/// Which transform diagonalizes the Laplacian for a boundary kind, and in
/// which direction it is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralBasis {
    pub kind: BoundaryKind,
}

impl SpectralBasis {
    pub fn new(kind: BoundaryKind) -> Self {
        Self { kind }
    }

    /// Physical space to spectral space on `qubits`.
    pub fn forward<T: Real>(&self, qubits: &[usize], n_qubits: usize) -> Result<Circuit<T>> {
        self.circuit(qubits, n_qubits, false)
    }

    /// Spectral space back to physical space.
    pub fn backward<T: Real>(&self, qubits: &[usize], n_qubits: usize) -> Result<Circuit<T>> {
        self.circuit(qubits, n_qubits, true)
    }

    fn circuit<T: Real>(&self, qubits: &[usize], n_qubits: usize, backward: bool) -> Result<Circuit<T>> {
        let kind = match self.kind {
            // Analysis uses e^{-2πi jk/N}, i.e. the adjoint of the textbook QFT.
            BoundaryKind::Periodic => return qft_on(qubits, n_qubits, !backward),
            BoundaryKind::Neumann => TransformKind::Cosine,
            BoundaryKind::Dirichlet => TransformKind::Sine,
        };
        validate_register(qubits, n_qubits)?;
        let mut c = Circuit::new(n_qubits);
        c.push(Instruction::Transform(SpectralTransform {
            kind,
            qubits: qubits.to_vec(),
            inverse: backward,
        }))?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn dft_entry(j: usize, k: usize, n: usize) -> Complex<f64> {
        Complex::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * (j * k) as f64 / n as f64)
    }

    #[test]
    fn wavenumber_tables() {
        let p = wavenumbers(BoundaryKind::Periodic, 4, 2.0 * PI).unwrap();
        for (a, b) in p.values.iter().zip([0.0, 1.0, -2.0, -1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let n = wavenumbers(BoundaryKind::Neumann, 4, PI).unwrap();
        assert_eq!(n.values, vec![0.0, 1.0, 2.0, 3.0]);
        let d = wavenumbers(BoundaryKind::Dirichlet, 4, PI).unwrap();
        assert_eq!(d.values, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(wavenumbers::<f64>(BoundaryKind::Neumann, 6, 1.0).is_err());
        assert!(wavenumbers::<f64>(BoundaryKind::Neumann, 8, 0.0).is_err());
    }

    #[test]
    fn periodic_mirror_identity() {
        // For j >= N/2: k_j^2 = (2π/L)^2 (j'+1)^2 with j' = N-1-j.
        for n_points in [4usize, 8, 16, 64] {
            let t = wavenumbers(BoundaryKind::Periodic, n_points, 1.0).unwrap();
            let base = 2.0 * PI;
            for j in n_points / 2..n_points {
                let jp = (n_points - 1 - j) as f64;
                let lhs = t.values[j] * t.values[j];
                let rhs = base * base * (jp + 1.0) * (jp + 1.0);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9 * rhs);
            }
        }
    }

    #[test]
    fn single_qubit_qft_is_hadamard() {
        let c = build_qft_circuit::<f64>(1, false).unwrap();
        assert_eq!(c.gates().cloned().collect::<Vec<_>>(), vec![GateOp::hadamard(0)]);
    }

    #[test]
    fn qft_matches_dft_matrix() {
        for n in 1..=4 {
            let dim = 1 << n;
            let c = build_qft_circuit::<f64>(n, false).unwrap();
            for j in 0..dim {
                let mut s = QuantumState::basis(n, j).unwrap();
                s.apply_circuit(&c).unwrap();
                for k in 0..dim {
                    let e = dft_entry(j, k, dim);
                    assert_abs_diff_eq!(s.amplitudes()[k].re, e.re, epsilon = 1e-12);
                    assert_abs_diff_eq!(s.amplitudes()[k].im, e.im, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn qft_round_trip() {
        let n = 5;
        let fwd = build_qft_circuit::<f64>(n, false).unwrap();
        let inv = build_qft_circuit::<f64>(n, true).unwrap();
        let vals: Vec<Complex<f64>> = (0..32).map(|i| Complex::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let s0 = QuantumState::encode_amplitudes(vals).unwrap();
        let mut s = s0.clone();
        s.apply_circuit(&fwd).unwrap();
        s.apply_circuit(&inv).unwrap();
        for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    fn formula(kind: TransformKind, k: usize, n: usize, len: usize) -> f64 {
        let nf = len as f64;
        match kind {
            TransformKind::Cosine if k == 0 => (1.0 / nf).sqrt(),
            TransformKind::Cosine => (2.0 / nf).sqrt() * (PI * (n as f64 + 0.5) * k as f64 / nf).cos(),
            TransformKind::Sine => {
                let s = if k == len - 1 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
                s * (2.0 / nf).sqrt() * (PI * (n as f64 + 0.5) * (k as f64 + 1.0) / nf).sin()
            }
        }
    }

    #[test]
    fn real_transforms_match_formula_columns() {
        for kind in [TransformKind::Cosine, TransformKind::Sine] {
            for m in 1..=4 {
                let len = 1 << m;
                let qubits: Vec<usize> = (0..m).collect();
                for col in 0..len {
                    let mut s = QuantumState::<f64>::basis(m, col).unwrap();
                    apply_real_transform(&mut s, kind, &qubits, false).unwrap();
                    for k in 0..len {
                        assert_abs_diff_eq!(s.amplitudes()[k].re, formula(kind, k, col, len), epsilon = 1e-13);
                    }
                    apply_real_transform(&mut s, kind, &qubits, true).unwrap();
                    for k in 0..len {
                        let e = if k == col { 1.0 } else { 0.0 };
                        assert_abs_diff_eq!(s.amplitudes()[k].re, e, epsilon = 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn cosine_of_constant_is_k0() {
        let mut s = QuantumState::encode_real(&[1.0f64; 8]).unwrap();
        apply_qct(&mut s, &[0, 1, 2], false).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, 1.0, epsilon = 1e-14);
        for a in &s.amplitudes()[1..] {
            assert_abs_diff_eq!(a.norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn transform_on_upper_register_leaves_lower_alone() {
        // 2 qubits on top of 1: apply QCT on qubits [1, 2] only.
        let vals: Vec<f64> = (0..8).map(|i| i as f64 + 1.0).collect();
        let mut s = QuantumState::encode_real(&vals).unwrap();
        let before = s.clone();
        apply_qct(&mut s, &[1, 2], false).unwrap();
        for low in 0..2 {
            let fiber: Vec<f64> = (0..4).map(|k| before.amplitudes()[low | k << 1].re).collect();
            for k in 0..4 {
                let expect: f64 = (0..4).map(|n| formula(TransformKind::Cosine, k, n, 4) * fiber[n]).sum();
                assert_abs_diff_eq!(s.amplitudes()[low | k << 1].re, expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn invalid_transform_registers() {
        let mut s = QuantumState::<f64>::zero(3).unwrap();
        assert!(apply_qct(&mut s, &[], false).is_err());
        assert!(apply_qct(&mut s, &[0, 0], false).is_err());
        assert!(apply_qst(&mut s, &[3], false).is_err());
    }

    #[test]
    fn boundary_kind_parsing() {
        for k in BoundaryKind::ALL {
            assert_eq!(k.to_string().parse::<BoundaryKind>().unwrap(), k);
        }
        assert!("robin".parse::<BoundaryKind>().is_err());
    }
}
