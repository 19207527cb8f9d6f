//! Shallow 1D demonstration circuit for noisy devices: a three-mode
//! Fourier state, one advection step, and diffusion with one fresh ancilla
//! per damping factor (no mid-circuit measurement).

use crate::advection::uniform_advection_on;
use crate::circuit::Circuit;
use crate::diffusion::damping_terms;
use crate::error::{Error, Result};
use crate::gate::{Control, GateOp};
use crate::scalar::Real;
use crate::state::{sample_multinomial, QuantumState};
use crate::transforms::{BoundaryKind, SpectralBasis};

/// Default advection phase of the demo (a quarter period).
pub const DEMO_ALPHA: f64 = -std::f64::consts::FRAC_PI_2;
/// Default damping exponent of the demo (`-ln 0.5`).
pub const DEMO_BETA: f64 = std::f64::consts::LN_2;

/// Prepares `√(2/3)|0> + √(1/6)(|1> + |N-1>)` in the Fourier basis, i.e.
/// the physical profile `∝ 0.5 (1 + cos x)`.
pub fn build_fourier_initial_state<T: Real>(n: usize) -> Result<Circuit<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("demo state needs n >= 2, got {n}")));
    }
    let mut c = Circuit::new(n);
    let theta = T::lit(2.0) * (T::lit(2.0) / T::lit(3.0)).sqrt().acos();
    c.push_gate(GateOp::rotation_y(0, theta))?;
    c.push_gate(GateOp::hadamard(1).controlled_by([Control::on(0)]))?;
    for q in 1..n - 1 {
        c.push_gate(GateOp::cnot(q, q + 1))?;
    }
    Ok(c)
}

/// Number of fresh ancillas used by [`hardware_demo_circuit`].
pub fn demo_ancilla_count(n: usize) -> Result<usize> {
    Ok(damping_terms(BoundaryKind::Periodic, n, 0.0f64)?.len())
}

/// Full demo circuit: preparation, advection by `alpha`, periodic diffusion
/// with one ancilla per damping factor (ancillas `n..n+n_a`), then the
/// inverse spectral transform to physical space.
pub fn hardware_demo_circuit<T: Real>(n: usize, alpha: T, beta: T) -> Result<Circuit<T>> {
    let terms = damping_terms(BoundaryKind::Periodic, n, beta)?;
    let total = n + terms.len();
    let main: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(total);
    let prep = build_fourier_initial_state::<T>(n)?;
    for op in prep.ops() {
        c.push(op.clone())?;
    }
    c.append(&uniform_advection_on(&main, total, alpha)?)?;
    let msb = n - 1;
    for q in 0..msb {
        c.push_gate(GateOp::cnot(msb, q))?;
    }
    for (i, t) in terms.iter().enumerate() {
        let ancilla = n + i;
        c.add_ancilla(ancilla)?;
        c.push_gate(GateOp::damping(&t.controls, ancilla, t.gamma)?)?;
    }
    for q in 0..msb {
        c.push_gate(GateOp::cnot(msb, q))?;
    }
    c.append(&SpectralBasis::new(BoundaryKind::Periodic).backward(&main, total)?)?;
    Ok(c)
}

pub fn build_hardware_demo<T: Real>(n: usize) -> Result<Circuit<T>> {
    hardware_demo_circuit(n, T::lit(DEMO_ALPHA), T::lit(DEMO_BETA))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoOutcome<T> {
    pub n: usize,
    pub n_ancillas: usize,
    /// Joint probability of main-register outcome `i` with all ancillas `0`.
    pub probabilities: Vec<T>,
    /// Probability that every ancilla reads `0`.
    pub success_prob: T,
    /// Postselected, normalized main-register state.
    pub state: QuantumState<T>,
}

/// Ideal statevector execution of the demo circuit.
pub fn run_demo<T: Real>(n: usize, alpha: T, beta: T) -> Result<DemoOutcome<T>> {
    let circuit = hardware_demo_circuit(n, alpha, beta)?;
    let mut s = QuantumState::zero(circuit.n_qubits())?;
    s.apply_circuit(&circuit)?;
    let low = s.low_register(n);
    let probabilities: Vec<T> = low.iter().map(|a| a.norm_sqr()).collect();
    let success_prob = probabilities.iter().fold(T::zero(), |a, &p| a + p);
    let state = QuantumState::encode_amplitudes(low.to_vec())?;
    Ok(DemoOutcome {
        n,
        n_ancillas: circuit.n_qubits() - n,
        probabilities,
        success_prob,
        state,
    })
}

/// One row of a shot-based amplitude reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionRow {
    pub index: usize,
    pub ideal_amp: f64,
    pub sampled_amp: f64,
    pub lo_3sigma: f64,
    pub hi_3sigma: f64,
}

impl ReconstructionRow {
    pub fn inside(&self) -> bool {
        self.lo_3sigma <= self.sampled_amp && self.sampled_amp <= self.hi_3sigma
    }
}

/// `√(count/M)` per bin with the binomial band `√(p ± 3σ)`,
/// `σ = √(p(1-p)/M)`, around the ideal probability `p`.
pub fn reconstruct(probabilities: &[f64], counts: &[u64], shots: u64) -> Result<Vec<ReconstructionRow>> {
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    if counts.len() < probabilities.len() {
        return Err(Error::DimensionMismatch {
            expected: probabilities.len(),
            got: counts.len(),
        });
    }
    let m = shots as f64;
    Ok(probabilities
        .iter()
        .zip(counts)
        .enumerate()
        .map(|(index, (&p, &k))| {
            let p = p.clamp(0.0, 1.0);
            let sigma = (p * (1.0 - p) / m).sqrt();
            ReconstructionRow {
                index,
                ideal_amp: p.sqrt(),
                sampled_amp: (k as f64 / m).sqrt(),
                lo_3sigma: (p - 3.0 * sigma).max(0.0).sqrt(),
                hi_3sigma: (p + 3.0 * sigma).min(1.0).sqrt(),
            }
        })
        .collect())
}

/// Samples `shots` joint outcomes (main register plus a single
/// "some ancilla reads 1" bin) and reconstructs the postselected bins.
pub fn sample_reconstruction(probabilities: &[f64], shots: u64, seed: u64) -> Result<Vec<ReconstructionRow>> {
    let kept: f64 = probabilities.iter().sum();
    let mut bins = probabilities.to_vec();
    bins.push((1.0 - kept).max(0.0));
    let counts = sample_multinomial(&bins, shots, seed)?;
    reconstruct(probabilities, &counts, shots)
}

/// Fraction of rows whose sampled amplitude lies inside its band.
pub fn band_coverage(rows: &[ReconstructionRow]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    rows.iter().filter(|r| r.inside()).count() as f64 / rows.len() as f64
}
