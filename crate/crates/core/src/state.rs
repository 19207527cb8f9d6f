//! Complex statevector register with postselection and measurement sampling.
//!
//! Basis indices are little-endian: qubit `q` is bit `q` of the index.

use std::io::{Read, Write};

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "QSCALAR_MAX_QUBITS";

/// 26 qubits is about 1 GiB of `Complex<f64>` amplitudes.
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Probability below which postselection on `|0>` is refused.
pub const POSTSELECT_FLOOR: f64 = 1e-300;

pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n >= 1)
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

fn check_register(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    let max = max_qubits();
    if n > max {
        return Err(Error::RegisterTooLarge { requested: n, max });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
    success_prob: T,
}

impl<T: Real> QuantumState<T> {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_register(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amplitudes = vec![Complex::zero(); dim];
        amplitudes[index] = Complex::one();
        Ok(Self {
            n_qubits: n,
            amplitudes,
            success_prob: T::one(),
        })
    }

    /// Normalizes `values` into a fresh register with `success_prob = 1`.
    pub fn encode_amplitudes(values: Vec<Complex<T>>) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        check_register(n)?;
        let norm = l2_norm(&values);
        if !norm.is_finite() || norm <= T::zero() {
            return Err(Error::ZeroNorm);
        }
        let amplitudes = values.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            n_qubits: n,
            amplitudes,
            success_prob: T::one(),
        })
    }

    pub fn encode_real(values: &[T]) -> Result<Self> {
        Self::encode_amplitudes(values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    pub fn success_prob(&self) -> T {
        self.success_prob
    }

    pub fn norm(&self) -> T {
        l2_norm(&self.amplitudes)
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Appends `k` ancilla qubits in `|0>` above the existing register.
    pub fn with_ancillas(&self, k: usize) -> Result<Self> {
        let n = self.n_qubits + k;
        check_register(n)?;
        let mut amplitudes = vec![Complex::zero(); 1 << n];
        amplitudes[..self.dim()].copy_from_slice(&self.amplitudes);
        Ok(Self {
            n_qubits: n,
            amplitudes,
            success_prob: self.success_prob,
        })
    }

    /// Amplitudes of the low `n_low` qubits with every higher qubit in `|0>`.
    pub fn low_register(&self, n_low: usize) -> &[Complex<T>] {
        &self.amplitudes[..1usize << n_low.min(self.n_qubits)]
    }

    /// Probability that `qubit` reads `|0>`.
    pub fn zero_probability(&self, qubit: usize) -> Result<T> {
        self.check_index(qubit)?;
        let bit = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == 0)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr()))
    }

    /// Projects `ancilla` onto `|0>`, renormalizes, and folds the branch
    /// probability into `success_prob`. Returns that branch probability.
    pub fn project_ancilla_zero(&mut self, ancilla: usize) -> Result<T> {
        let p0 = self.zero_probability(ancilla)?;
        if p0.as_f64().is_nan() || p0.as_f64() < POSTSELECT_FLOOR {
            return Err(Error::PostselectionImpossible(p0.as_f64()));
        }
        let bit = 1usize << ancilla;
        let scale = T::one() / p0.sqrt();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & bit == 0 {
                *a *= scale;
            } else {
                *a = Complex::zero();
            }
        }
        self.success_prob *= p0;
        Ok(p0)
    }

    /// Draws a multinomial histogram of `shots` measurements in the
    /// computational basis. Reproducible for a given `seed`.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> Result<Vec<u64>> {
        sample_multinomial(&self.probabilities(), shots, seed)
    }

    pub(crate) fn check_index(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Drops the qubits above `n_low`, which must all be in `|0>`
    /// (as after postselection). Keeps `success_prob`.
    pub fn take_low_register(&self, n_low: usize) -> Result<Self> {
        if n_low == 0 {
            return Err(Error::EmptyRegister);
        }
        if n_low > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: n_low - 1,
                n_qubits: self.n_qubits,
            });
        }
        let low = 1usize << n_low;
        let leak = self.amplitudes[low..].iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        if leak.as_f64() > 1e-24 {
            return Err(Error::InvalidRegister(format!(
                "upper qubits carry weight {:e}",
                leak.as_f64()
            )));
        }
        Ok(Self {
            n_qubits: n_low,
            amplitudes: self.amplitudes[..low].to_vec(),
            success_prob: self.success_prob,
        })
    }

    /// Binary dump: `n` as little-endian `u64`, then `2^n` pairs of
    /// little-endian `f64` (re, im).
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.n_qubits as u64).to_le_bytes())?;
        for a in &self.amplitudes {
            w.write_all(&a.re.as_f64().to_le_bytes())?;
            w.write_all(&a.im.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump written by [`write_binary`](Self::write_binary). The
    /// amplitudes are taken verbatim; `success_prob` is reset to 1.
    pub fn read_binary<R: Read>(mut r: R) -> std::io::Result<Self> {
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        check_register(n).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for _ in 0..(1usize << n) {
            r.read_exact(&mut word)?;
            let re = f64::from_le_bytes(word);
            r.read_exact(&mut word)?;
            let im = f64::from_le_bytes(word);
            amplitudes.push(Complex::new(T::lit(re), T::lit(im)));
        }
        Ok(Self {
            n_qubits: n,
            amplitudes,
            success_prob: T::one(),
        })
    }
}

pub(crate) fn l2_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()).sqrt()
}

/// Multinomial draw by sequential conditional binomials.
pub fn sample_multinomial<T: Real>(probs: &[T], shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining_shots = shots;
    let mut remaining_mass: f64 = probs.iter().map(|p| p.as_f64()).sum();
    let mut counts = vec![0u64; probs.len()];
    for (count, p) in counts.iter_mut().zip(probs) {
        if remaining_shots == 0 || remaining_mass <= 0.0 {
            break;
        }
        let p = p.as_f64();
        let q = (p / remaining_mass).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining_shots, q)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(&mut rng);
        *count = draw;
        remaining_shots -= draw;
        remaining_mass -= p;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_state_layouts() {
        let s = QuantumState::<f64>::zero(1).unwrap();
        assert_eq!(s.amplitudes(), &[Complex::one(), Complex::zero()]);
        let s = QuantumState::<f64>::zero(3).unwrap();
        assert_eq!(s.amplitudes()[0], Complex::one());
        assert!(s.amplitudes()[1..].iter().all(|a| a.is_zero()));
        assert_eq!(s.success_prob(), 1.0);
    }

    #[test]
    fn empty_register_rejected() {
        let err = QuantumState::<f64>::zero(0).unwrap_err();
        assert_eq!(err.to_string(), "register must have at least one qubit");
    }

    #[test]
    fn oversized_register_rejected() {
        assert!(matches!(
            QuantumState::<f64>::zero(DEFAULT_MAX_QUBITS + 1),
            Err(Error::RegisterTooLarge { .. })
        ));
    }

    #[test]
    fn uniform_encoding() {
        let s = QuantumState::encode_real(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        for a in s.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn encoding_errors() {
        let err = QuantumState::encode_real(&[0.0f64; 4]).unwrap_err();
        assert_eq!(err.to_string(), "cannot normalize zero vector");
        assert_eq!(
            QuantumState::encode_real(&[1.0f64; 3]).unwrap_err(),
            Error::NotPowerOfTwo(3)
        );
    }

    #[test]
    fn gaussian_encoding_matches_samples() {
        let n = 128;
        let raw: Vec<f64> = (0..n)
            .map(|j| {
                let x = j as f64 / n as f64;
                (-100.0 * (x - 0.5) * (x - 0.5)).exp()
            })
            .collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = QuantumState::encode_real(&raw).unwrap();
        assert_eq!(s.n_qubits(), 7);
        for (a, r) in s.amplitudes().iter().zip(&raw) {
            assert_abs_diff_eq!(a.re, r / norm, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn projection_of_symmetric_split() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = QuantumState::encode_real(&[h, h]).unwrap();
        let p = s.project_ancilla_zero(0).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.success_prob(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        assert!(s.amplitudes()[1].is_zero());
    }

    #[test]
    fn projection_noop_when_already_zero() {
        let mut s = QuantumState::<f64>::zero(2).unwrap();
        s.project_ancilla_zero(1).unwrap();
        assert_eq!(s, QuantumState::zero(2).unwrap());
    }

    #[test]
    fn projection_impossible() {
        let mut s = QuantumState::<f64>::basis(1, 1).unwrap();
        assert!(matches!(
            s.project_ancilla_zero(0),
            Err(Error::PostselectionImpossible(_))
        ));
        assert!(matches!(
            s.project_ancilla_zero(3),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn sampling_basis_state() {
        let s = QuantumState::<f64>::basis(3, 5).unwrap();
        let counts = s.sample_counts(100, 7).unwrap();
        assert_eq!(counts[5], 100);
        assert_eq!(counts.iter().sum::<u64>(), 100);
    }

    #[test]
    fn sampling_is_seeded() {
        let s = QuantumState::encode_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(
            s.sample_counts(1000, 42).unwrap(),
            s.sample_counts(1000, 42).unwrap()
        );
        assert_ne!(
            s.sample_counts(1000, 42).unwrap(),
            s.sample_counts(1000, 43).unwrap()
        );
        assert_eq!(s.sample_counts(0, 1).unwrap_err(), Error::InvalidShots);
    }

    #[test]
    fn uniform_sampling_within_three_sigma() {
        let s = QuantumState::encode_real(&[1.0; 4]).unwrap();
        let shots = 10_000u64;
        let sigma = (0.25f64 * 0.75 * shots as f64).sqrt();
        for seed in 0..5 {
            for c in s.sample_counts(shots, seed).unwrap() {
                assert!((c as f64 - 2500.0).abs() <= 3.0 * sigma, "count {c}");
            }
        }
    }

    #[test]
    fn binary_dump_round_trip() {
        let s = QuantumState::encode_amplitudes(vec![
            Complex::new(0.3, -0.1),
            Complex::new(0.0, 0.7),
            Complex::new(-0.2, 0.2),
            Complex::new(0.5, 0.0),
        ])
        .unwrap();
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 2 * 4 * 8);
        assert_eq!(&buf[..8], &2u64.to_le_bytes());
        let back = QuantumState::<f64>::read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.amplitudes(), s.amplitudes());
    }
}
