use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::QuantumState;

/// Gate kinds. Controlled phases and CNOTs are [`GateKind::Phase`] and
/// [`GateKind::Not`] carrying a non-empty control list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind<T> {
    /// `diag(1, e^{iθ})`.
    Phase(T),
    /// `R_Y(2 arccos e^{-γ})`, which block-encodes the damping `e^{-γ}`
    /// on the `|0>` branch of its target.
    DampingRotation(T),
    /// Real rotation `[[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
    RotationY(T),
    Hadamard,
    Not,
    /// Exchanges the target with the held qubit.
    Swap(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Self { qubit, value: true }
    }

    pub fn off(qubit: usize) -> Self {
        Self {
            qubit,
            value: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp<T> {
    pub kind: GateKind<T>,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl<T: Real> GateOp<T> {
    pub fn new(kind: GateKind<T>, target: usize) -> Self {
        Self {
            kind,
            target,
            controls: Vec::new(),
        }
    }

    pub fn phase(target: usize, theta: T) -> Self {
        Self::new(GateKind::Phase(theta), target)
    }

    pub fn controlled_phase(controls: &[usize], target: usize, theta: T) -> Self {
        Self::phase(target, theta).controlled_by(controls.iter().map(|&q| Control::on(q)))
    }

    pub fn hadamard(target: usize) -> Self {
        Self::new(GateKind::Hadamard, target)
    }

    pub fn not(target: usize) -> Self {
        Self::new(GateKind::Not, target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::not(target).controlled_by([Control::on(control)])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap(b), a)
    }

    pub fn rotation_y(target: usize, theta: T) -> Self {
        Self::new(GateKind::RotationY(theta), target)
    }

    pub fn damping(controls: &[usize], ancilla: usize, gamma: T) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self::new(GateKind::DampingRotation(gamma), ancilla)
            .controlled_by(controls.iter().map(|&q| Control::on(q))))
    }

    pub fn controlled_by(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.kind, GateKind::Phase(_))
    }

    /// Qubits touched by the gate, controls included.
    pub fn qubits(&self) -> Vec<usize> {
        let mut qs = vec![self.target];
        if let GateKind::Swap(other) = self.kind {
            qs.push(other);
        }
        qs.extend(self.controls.iter().map(|c| c.qubit));
        qs
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if self.controls.iter().any(|c| c.qubit == self.target) {
            return Err(Error::TargetIsControl(self.target));
        }
        if let GateKind::Swap(other) = self.kind {
            if other == self.target || self.controls.iter().any(|c| c.qubit == other) {
                return Err(Error::TargetIsControl(other));
            }
        }
        let mut seen = self.controls.iter().map(|c| c.qubit).collect::<Vec<_>>();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidRegister("duplicate control qubit".into()));
        }
        if let GateKind::DampingRotation(g) = self.kind {
            check_gamma(g)?;
        }
        Ok(())
    }

    /// Adjoint gate.
    pub fn inverse(&self) -> Self {
        let kind = match self.kind {
            GateKind::Phase(t) => GateKind::Phase(-t),
            GateKind::RotationY(t) => GateKind::RotationY(-t),
            GateKind::DampingRotation(g) => GateKind::RotationY(-damping_angle(g)),
            k @ (GateKind::Hadamard | GateKind::Not | GateKind::Swap(_)) => k,
        };
        Self {
            kind,
            target: self.target,
            controls: self.controls.clone(),
        }
    }

    fn control_masks(&self) -> (usize, usize) {
        self.controls.iter().fold((0, 0), |(mask, value), c| {
            let bit = 1usize << c.qubit;
            (mask | bit, if c.value { value | bit } else { value })
        })
    }

    /// The 2x2 matrix of single-target kinds; `None` for phase and swap.
    pub fn matrix(&self) -> Option<[[Complex<T>; 2]; 2]> {
        let r = |v: T| Complex::new(v, T::zero());
        match self.kind {
            GateKind::Hadamard => {
                let h = T::FRAC_1_SQRT_2();
                Some([[r(h), r(h)], [r(h), r(-h)]])
            }
            GateKind::Not => Some([[Complex::zero(), Complex::one()], [Complex::one(), Complex::zero()]]),
            GateKind::RotationY(theta) => {
                let (s, c) = (theta / T::lit(2.0)).sin_cos();
                Some([[r(c), r(-s)], [r(s), r(c)]])
            }
            GateKind::DampingRotation(g) => {
                let m = damping_unitary(g).ok()?;
                Some([[r(m[0][0]), r(m[0][1])], [r(m[1][0]), r(m[1][1])]])
            }
            GateKind::Phase(_) | GateKind::Swap(_) => None,
        }
    }
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if gamma < T::zero() || gamma.is_nan() {
        return Err(Error::NegativeDamping(gamma.as_f64()));
    }
    Ok(())
}

/// `U(γ) = [[e^{-γ}, -√(1-e^{-2γ})], [√(1-e^{-2γ}), e^{-γ}]]`.
pub fn damping_unitary<T: Real>(gamma: T) -> Result<[[T; 2]; 2]> {
    check_gamma(gamma)?;
    let e = (-gamma).exp();
    // 1 - e^{-2γ} via expm1 keeps the off-diagonal accurate for small γ.
    let s = (-(-(gamma + gamma)).exp_m1()).sqrt();
    Ok([[e, -s], [s, e]])
}

/// Rotation angle θ with `R_Y(θ) = U(γ)`.
pub fn damping_angle<T: Real>(gamma: T) -> T {
    T::lit(2.0) * (-gamma).exp().acos()
}

impl<T: Real> QuantumState<T> {
    pub fn apply_gate(&mut self, gate: &GateOp<T>) -> Result<()> {
        gate.validate(self.n_qubits())?;
        let (cmask, cval) = gate.control_masks();
        let tbit = 1usize << gate.target;
        let amps = self.amplitudes_mut();
        match gate.kind {
            GateKind::Phase(theta) => {
                let (s, c) = theta.sin_cos();
                let w = Complex::new(c, s);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & tbit != 0 && i & cmask == cval {
                        *a *= w;
                    }
                }
            }
            GateKind::Swap(other) => {
                let obit = 1usize << other;
                for i in 0..amps.len() {
                    if i & tbit != 0 && i & obit == 0 && i & cmask == cval {
                        amps.swap(i, i ^ tbit ^ obit);
                    }
                }
            }
            GateKind::DampingRotation(gamma) if (-gamma).exp().is_zero() => {
                let weight = amps
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i & cmask == cval)
                    .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr());
                if weight.as_f64() > 1e-12 {
                    return Err(Error::DampingUnderflow {
                        gamma: gamma.as_f64(),
                        weight: weight.as_f64(),
                    });
                }
                apply_single(amps, &gate.matrix().expect("damping matrix"), tbit, cmask, cval);
            }
            _ => {
                let m = gate.matrix().expect("single-target gate");
                apply_single(amps, &m, tbit, cmask, cval);
            }
        }
        Ok(())
    }
}

fn apply_single<T: Real>(
    amps: &mut [Complex<T>],
    m: &[[Complex<T>; 2]; 2],
    tbit: usize,
    cmask: usize,
    cval: usize,
) {
    for i in 0..amps.len() {
        if i & tbit == 0 && i & cmask == cval {
            let j = i | tbit;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

    #[test]
    fn hadamard_on_zero() {
        let mut s = QuantumState::<f64>::zero(1).unwrap();
        s.apply_gate(&GateOp::hadamard(0)).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn phase_pi_on_one() {
        let mut s = QuantumState::<f64>::basis(1, 1).unwrap();
        s.apply_gate(&GateOp::phase(0, PI)).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[1].re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn damping_matrix_values() {
        assert_eq!(damping_unitary(0.0f64).unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
        let m = damping_unitary(LN_2).unwrap();
        let r = 0.75f64.sqrt();
        assert_abs_diff_eq!(m[0][0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[0][1], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1][0], r, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1][1], 0.5, epsilon = 1e-15);
        let err = damping_unitary(-0.1f64).unwrap_err();
        assert!(err.to_string().contains("amplification not block-encodable"));
    }

    #[test]
    fn damping_matrix_is_orthogonal() {
        for g in [0.0, 1e-9, 0.3, 1.0, 5.0, 40.0] {
            let m = damping_unitary(g).unwrap();
            let a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
            let b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
            assert_abs_diff_eq!(a, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(b, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn damping_rotation_on_controlled_ancilla() {
        // q0 control in |1>, ancilla q1 in |0>.
        let mut s = QuantumState::<f64>::basis(2, 0b01).unwrap();
        s.apply_gate(&GateOp::damping(&[0], 1, LN_2).unwrap()).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0b01].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[0b11].re, 0.75f64.sqrt(), epsilon = 1e-15);
        // Control not satisfied: untouched.
        let mut s = QuantumState::<f64>::zero(2).unwrap();
        s.apply_gate(&GateOp::damping(&[0], 1, LN_2).unwrap()).unwrap();
        assert_eq!(s, QuantumState::zero(2).unwrap());
    }

    #[test]
    fn damping_equals_ry_of_arccos() {
        let g = 0.37f64;
        let mut a = QuantumState::encode_real(&[0.6, 0.8]).unwrap();
        let mut b = a.clone();
        a.apply_gate(&GateOp::new(GateKind::DampingRotation(g), 0)).unwrap();
        b.apply_gate(&GateOp::rotation_y(0, damping_angle(g))).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = 1e-15);
        }
    }

    #[test]
    fn underflowing_damping_rejected_on_live_subspace() {
        let mut s = QuantumState::<f64>::basis(2, 0b01).unwrap();
        let err = s.apply_gate(&GateOp::damping(&[0], 1, 1000.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DampingUnderflow { .. }));
        // Nothing in the controlled subspace: allowed.
        let mut s = QuantumState::<f64>::zero(2).unwrap();
        s.apply_gate(&GateOp::damping(&[0], 1, 1000.0).unwrap()).unwrap();
    }

    #[test]
    fn invalid_indices() {
        let mut s = QuantumState::<f64>::zero(2).unwrap();
        assert!(matches!(
            s.apply_gate(&GateOp::hadamard(2)),
            Err(Error::QubitOutOfRange { index: 2, .. })
        ));
        assert_eq!(
            s.apply_gate(&GateOp::cnot(1, 1)).unwrap_err(),
            Error::TargetIsControl(1)
        );
        assert!(GateOp::<f64>::damping(&[0], 1, -0.1).is_err());
    }

    #[test]
    fn cnot_and_swap() {
        let mut s = QuantumState::<f64>::basis(3, 0b001).unwrap();
        s.apply_gate(&GateOp::cnot(0, 2)).unwrap();
        assert_eq!(s.amplitudes()[0b101].re, 1.0);
        s.apply_gate(&GateOp::swap(0, 1)).unwrap();
        assert_eq!(s.amplitudes()[0b110].re, 1.0);
        let mut s = QuantumState::<f64>::basis(2, 0b01).unwrap();
        s.apply_gate(&GateOp::cnot(0, 1).controlled_by([]).clone()).unwrap();
        assert_eq!(s.amplitudes()[0b11].re, 1.0);
        let mut s = QuantumState::<f64>::basis(2, 0b00).unwrap();
        s.apply_gate(&GateOp::not(1).controlled_by([Control::off(0)])).unwrap();
        assert_eq!(s.amplitudes()[0b10].re, 1.0);
    }
}
