//! Block-encoded diffusion in spectral space.
//!
//! `e^{-β m_j}` (with `m_j` the squared-wavenumber multiple of mode `j`) is
//! factorized over the bits of `j` into products of `e^{-γ}` with `γ ≥ 0`.
//! Each factor is a controlled [`GateKind::DampingRotation`] on an ancilla
//! in `|0>`, postselected on `|0>` right after the gate.
//!
//! Periodic boundaries need the mirror trick: the upper half of the Fourier
//! spectrum has `(j-N)² = (j'+1)²` with `j'` the bit-complement of the lower
//! bits, so a CNOT fan from the top qubit folds it onto the lower half and
//! the extra `(2j'+1)` terms are controlled on the top qubit.
//!
//! [`GateKind::DampingRotation`]: crate::gate::GateKind::DampingRotation

use num_complex::Complex;
use num_traits::Zero;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::scalar::Real;
use crate::state::QuantumState;
use crate::transforms::{validate_register, BoundaryKind, SpectralBasis};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams<T> {
    pub beta: T,
    pub kind: BoundaryKind,
    pub n: usize,
}

impl<T: Real> DiffusionParams<T> {
    pub fn new(kind: BoundaryKind, n: usize, beta: T) -> Result<Self> {
        check_beta(beta)?;
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        Ok(Self { beta, kind, n })
    }

    /// `β = D t k₁²` with `k₁ = 2π/L` (periodic) or `π/L` (walls).
    pub fn from_physical(kind: BoundaryKind, n: usize, diffusivity: T, time: T, length: T) -> Result<Self> {
        Self::new(kind, n, kind.beta(diffusivity, time, length))
    }
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if !beta.is_finite() || beta < T::zero() {
        return Err(Error::NegativeDamping(beta.as_f64()));
    }
    Ok(())
}

/// One factor `e^{-γ Π q_c}`; `controls` are register-relative bit positions.
#[derive(Debug, Clone, PartialEq)]
pub struct DampingTerm<T> {
    pub gamma: T,
    pub controls: Vec<usize>,
}

fn pow2<T: Real>(e: usize) -> T {
    T::lit(2f64.powi(e as i32))
}

/// `Σ 2^{2r} q_r + 2 Σ_{r<s} 2^{r+s} q_r q_s` over `bits`.
fn square_terms<T: Real>(bits: &[usize], beta: T, out: &mut Vec<DampingTerm<T>>) {
    for &r in bits {
        out.push(DampingTerm {
            gamma: pow2::<T>(2 * r) * beta,
            controls: vec![r],
        });
    }
    for (i, &r) in bits.iter().enumerate() {
        for &s in &bits[i + 1..] {
            out.push(DampingTerm {
                gamma: pow2::<T>(1 + r + s) * beta,
                controls: vec![r, s],
            });
        }
    }
}

/// The damping factors for an `n`-qubit register, in emission order.
/// For periodic boundaries they act after the CNOT fold.
pub fn damping_terms<T: Real>(kind: BoundaryKind, n: usize, beta: T) -> Result<Vec<DampingTerm<T>>> {
    check_beta(beta)?;
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    let mut terms = Vec::new();
    match kind {
        BoundaryKind::Periodic => {
            let msb = n - 1;
            let lower: Vec<usize> = (0..msb).collect();
            square_terms(&lower, beta, &mut terms);
            for &r in &lower {
                terms.push(DampingTerm {
                    gamma: pow2::<T>(r + 1) * beta,
                    controls: vec![r, msb],
                });
            }
            terms.push(DampingTerm {
                gamma: beta,
                controls: vec![msb],
            });
        }
        BoundaryKind::Neumann => {
            let bits: Vec<usize> = (0..n).collect();
            square_terms(&bits, beta, &mut terms);
        }
        BoundaryKind::Dirichlet => {
            let bits: Vec<usize> = (0..n).collect();
            square_terms(&bits, beta, &mut terms);
            for &r in &bits {
                terms.push(DampingTerm {
                    gamma: pow2::<T>(r + 1) * beta,
                    controls: vec![r],
                });
            }
            terms.push(DampingTerm {
                gamma: beta,
                controls: Vec::new(),
            });
        }
    }
    Ok(terms)
}

/// Squared-wavenumber multiples `m_j` in spectral order, so that the
/// diffusion propagator is `diag(e^{-β m_j})`.
pub fn damping_multiples(kind: BoundaryKind, n_points: usize) -> Vec<f64> {
    (0..n_points)
        .map(|j| {
            let m = match kind {
                BoundaryKind::Periodic if j >= n_points / 2 => n_points as f64 - j as f64,
                BoundaryKind::Periodic | BoundaryKind::Neumann => j as f64,
                BoundaryKind::Dirichlet => j as f64 + 1.0,
            };
            m * m
        })
        .collect()
}

/// Diffusion on register `qubits` (least significant first) using `ancilla`,
/// inside an `n_qubits`-wide circuit. The register must already be in the
/// spectral basis of `kind`.
pub fn diffusion_on<T: Real>(
    kind: BoundaryKind,
    qubits: &[usize],
    ancilla: usize,
    n_qubits: usize,
    beta: T,
) -> Result<Circuit<T>> {
    validate_register(qubits, n_qubits)?;
    if qubits.contains(&ancilla) {
        return Err(Error::InvalidRegister(format!("ancilla {ancilla} overlaps the main register")));
    }
    let n = qubits.len();
    let terms = damping_terms(kind, n, beta)?;
    let mut c = Circuit::new(n_qubits);
    c.add_ancilla(ancilla)?;
    let msb = qubits[n - 1];
    let fold = |c: &mut Circuit<T>| -> Result<()> {
        if kind == BoundaryKind::Periodic {
            for &q in &qubits[..n - 1] {
                c.push_gate(GateOp::cnot(msb, q))?;
            }
        }
        Ok(())
    };
    fold(&mut c)?;
    for t in &terms {
        let controls: Vec<usize> = t.controls.iter().map(|&r| qubits[r]).collect();
        c.push_gate(GateOp::damping(&controls, ancilla, t.gamma)?)?;
        c.postselect(ancilla)?;
    }
    fold(&mut c)?;
    Ok(c)
}

/// Periodic diffusion on qubits `0..n` with the ancilla at `n`.
pub fn build_periodic_diffusion<T: Real>(n: usize, beta: T) -> Result<Circuit<T>> {
    let qubits: Vec<usize> = (0..n).collect();
    diffusion_on(BoundaryKind::Periodic, &qubits, n, n + 1, beta)
}

/// Neumann or Dirichlet diffusion on qubits `0..n` with the ancilla at `n`.
pub fn build_halfspectrum_diffusion<T: Real>(n: usize, beta: T, kind: BoundaryKind) -> Result<Circuit<T>> {
    if kind == BoundaryKind::Periodic {
        return Err(Error::InvalidParameter(
            "half-spectrum diffusion needs a Neumann or Dirichlet boundary".into(),
        ));
    }
    let qubits: Vec<usize> = (0..n).collect();
    diffusion_on(kind, &qubits, n, n + 1, beta)
}

/// `p∞ = N |mean φ|² / ‖φ‖²`: the success probability once every non-zero
/// mode has decayed.
pub fn worst_case_success<T: Real>(initial: &QuantumState<T>) -> T {
    worst_case_success_of(initial.amplitudes())
}

pub fn worst_case_success_of<T: Real>(values: &[Complex<T>]) -> T {
    let n = T::from_usize_exact(values.len());
    let sum = values.iter().fold(Complex::<T>::zero(), |acc, a| acc + a);
    let norm2 = values.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
    if norm2.is_zero() {
        return T::zero();
    }
    let mean = sum / n;
    n * mean.norm_sqr() / norm2
}

/// Heat-kernel profile obtained by diffusing the centered basis state
/// `|N/2>` on a unit periodic domain for diffusion time `dt` (`D t`).
/// The returned `n`-qubit state carries the postselection probability.
pub fn prepare_gaussian_by_diffusion<T: Real>(n: usize, dt: T) -> Result<QuantumState<T>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("Gaussian preparation needs n >= 3, got {n}")));
    }
    let qubits: Vec<usize> = (0..n).collect();
    let basis = SpectralBasis::new(BoundaryKind::Periodic);
    let beta = BoundaryKind::Periodic.beta(T::one(), dt, T::one());
    let mut circuit = basis.forward(&qubits, n + 1)?;
    circuit.append(&diffusion_on(BoundaryKind::Periodic, &qubits, n, n + 1, beta)?)?;
    circuit.append(&basis.backward(&qubits, n + 1)?)?;

    let mut state = QuantumState::basis(n, 1 << (n - 1))?.with_ancillas(1)?;
    state.apply_circuit(&circuit)?;
    state.take_low_register(n)
}
