//! Spectral-space phase circuits for advection by a uniform velocity or a
//! polynomial shear profile `u(y)`.
//!
//! With the x register in Fourier space, `e^{-i u k_j t}` factorizes over the
//! bits of `j` into one phase gate per qubit: `P(-α·2^r)` on the lower bits
//! and `P(+α·2^{n-1})` on the top bit (the negative half of the spectrum).
//! A shear profile is expanded into monomials over the y-register bits and
//! each monomial conditions a copy of that pattern.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::scalar::Real;
use crate::transforms::validate_register;

/// Highest polynomial order accepted by [`expand_profile_phases`].
pub const MAX_PROFILE_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileLabel {
    Uniform,
    Couette,
    Poiseuille,
    Blasius,
    Custom,
}

impl ProfileLabel {
    fn canonical(self) -> Option<&'static [f64]> {
        match self {
            Self::Uniform => Some(&[1.0]),
            Self::Couette => Some(&[0.0, 1.0]),
            Self::Poiseuille => Some(&[0.0, 4.0, -4.0]),
            Self::Blasius => Some(&[0.0, 2.0, -1.0]),
            Self::Custom => None,
        }
    }
}

impl fmt::Display for ProfileLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Couette => "couette",
            Self::Poiseuille => "poiseuille",
            Self::Blasius => "blasius",
            Self::Custom => "custom",
        })
    }
}

impl FromStr for ProfileLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(Self::Uniform),
            "couette" => Ok(Self::Couette),
            "poiseuille" | "channel" => Ok(Self::Poiseuille),
            "blasius" => Ok(Self::Blasius),
            "custom" => Ok(Self::Custom),
            other => Err(Error::InvalidParameter(format!("unknown velocity profile `{other}`"))),
        }
    }
}

/// Streamwise velocity `u(y) = Σ c_m y^m` on `y ∈ [0, 1]`, in units of the
/// reference velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityProfile<T> {
    coefficients: Vec<T>,
    label: ProfileLabel,
}

impl<T: Real> VelocityProfile<T> {
    pub fn new(label: ProfileLabel, coefficients: Vec<T>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("velocity profile needs at least one coefficient".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("velocity coefficients must be finite".into()));
        }
        if let Some(expected) = label.canonical() {
            let matches = expected.len() == coefficients.len()
                && expected.iter().zip(&coefficients).all(|(e, c)| T::lit(*e) == *c);
            if !matches {
                return Err(Error::InvalidParameter(format!(
                    "{label} profile requires coefficients {expected:?}"
                )));
            }
        }
        Ok(Self { coefficients, label })
    }

    pub fn named(label: ProfileLabel) -> Result<Self> {
        let coeffs = label
            .canonical()
            .ok_or_else(|| Error::InvalidParameter("custom profile needs explicit coefficients".into()))?;
        Self::new(label, coeffs.iter().map(|&c| T::lit(c)).collect())
    }

    pub fn uniform() -> Self {
        Self::named(ProfileLabel::Uniform).expect("canonical")
    }

    pub fn couette() -> Self {
        Self::named(ProfileLabel::Couette).expect("canonical")
    }

    pub fn poiseuille() -> Self {
        Self::named(ProfileLabel::Poiseuille).expect("canonical")
    }

    pub fn blasius() -> Self {
        Self::named(ProfileLabel::Blasius).expect("canonical")
    }

    pub fn custom(coefficients: Vec<T>) -> Result<Self> {
        Self::new(ProfileLabel::Custom, coefficients)
    }

    pub fn label(&self) -> ProfileLabel {
        self.label
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// Polynomial order ignoring trailing zero coefficients.
    pub fn order(&self) -> usize {
        self.coefficients.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn is_uniform(&self) -> bool {
        self.order() == 0
    }

    pub fn eval(&self, y: T) -> T {
        self.coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * y + c)
    }

    pub fn derivative(&self, y: T) -> T {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(T::zero(), |acc, (m, &c)| acc * y + c * T::from_usize_exact(m))
    }

    pub fn second_derivative(&self, y: T) -> T {
        self.coefficients
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(T::zero(), |acc, (m, &c)| acc * y + c * T::from_usize_exact(m * (m - 1)))
    }

    pub fn max_abs_on_grid(&self, n_points: usize) -> T {
        (0..n_points)
            .map(|q| self.eval(grid_y(q, n_points)).abs())
            .fold(T::zero(), T::max)
    }
}

/// Wall-normal coordinate of row `q`: the binary fraction `q / (N - 1)`.
pub fn grid_y<T: Real>(q: usize, n_points: usize) -> T {
    if n_points <= 1 {
        return T::zero();
    }
    T::from_usize_exact(q) / T::from_usize_exact(n_points - 1)
}

/// One monomial of the expanded profile: `coefficient · Π_{r ∈ y_controls} q_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTerm<T> {
    pub coefficient: T,
    pub exact: BigRational,
    /// y-register bit positions (register-relative, ascending).
    pub y_controls: Vec<usize>,
}

impl<T: Real> PhaseTerm<T> {
    pub fn degree(&self) -> usize {
        self.y_controls.len()
    }
}

fn to_exact<T: Real>(v: T) -> Result<BigRational> {
    BigRational::from_float(v.as_f64())
        .ok_or_else(|| Error::InvalidParameter(format!("coefficient {v} is not finite")))
}

fn rational_to<T: Real>(r: &BigRational) -> T {
    T::lit(r.to_f64().unwrap_or(f64::NAN))
}

/// Expands `u(y)` with `y = Σ 2^r q_r / (2^n - 1)` into monomials over the
/// y-register bits using `q_r² = q_r`. Like terms are collected in exact
/// rational arithmetic; zero terms are dropped. Terms are ordered by degree,
/// then lexicographically by control set.
pub fn expand_profile_phases<T: Real>(profile: &VelocityProfile<T>, n_y: usize) -> Result<Vec<PhaseTerm<T>>> {
    let h = profile.order();
    if h > MAX_PROFILE_ORDER {
        return Err(Error::InvalidParameter(format!(
            "profile order {h} exceeds the supported maximum of {MAX_PROFILE_ORDER}"
        )));
    }
    if n_y == 0 || n_y > 63 {
        return Err(Error::InvalidParameter(format!("y register must have 1..=63 qubits, got {n_y}")));
    }
    let denom = BigRational::from_integer((BigInt::one() << n_y) - BigInt::one());
    let weights: Vec<BigRational> = (0..n_y)
        .map(|r| BigRational::from_integer(BigInt::one() << r) / &denom)
        .collect();

    let mut total: BTreeMap<u64, BigRational> = BTreeMap::new();
    let mut power: BTreeMap<u64, BigRational> = BTreeMap::from([(0u64, BigRational::one())]);
    for (m, &c) in profile.coefficients().iter().enumerate().take(h + 1) {
        if m > 0 {
            let mut next: BTreeMap<u64, BigRational> = BTreeMap::new();
            for (mask, coef) in &power {
                for (r, w) in weights.iter().enumerate() {
                    *next.entry(mask | 1 << r).or_insert_with(BigRational::zero) += coef * w;
                }
            }
            power = next;
        }
        let c = to_exact(c)?;
        if c.is_zero() {
            continue;
        }
        for (mask, coef) in &power {
            *total.entry(*mask).or_insert_with(BigRational::zero) += &c * coef;
        }
    }

    let mut terms: Vec<PhaseTerm<T>> = total
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(mask, exact)| PhaseTerm {
            coefficient: rational_to(&exact),
            y_controls: (0..n_y).filter(|r| mask >> r & 1 == 1).collect(),
            exact,
        })
        .collect();
    terms.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.y_controls.cmp(&b.y_controls)));
    Ok(terms)
}

/// Reconstructs `u` at row `q` from expanded terms (exact arithmetic).
pub fn evaluate_terms_exact<T: Real>(terms: &[PhaseTerm<T>], q: usize) -> BigRational {
    terms
        .iter()
        .filter(|t| t.y_controls.iter().all(|r| q >> r & 1 == 1))
        .fold(BigRational::zero(), |acc, t| acc + &t.exact)
}

fn push_phase_pattern<T: Real>(
    circuit: &mut Circuit<T>,
    x_qubits: &[usize],
    controls: &[usize],
    alpha: T,
) -> Result<()> {
    let n = x_qubits.len();
    for (r, &q) in x_qubits.iter().enumerate() {
        let weight = T::lit(2f64.powi(r as i32));
        let theta = if r + 1 == n { alpha * weight } else { -alpha * weight };
        circuit.push_gate(GateOp::controlled_phase(controls, q, theta))?;
    }
    Ok(())
}

/// `diag(e^{-i u k_j t})` on qubits `0..n`, with `alpha = 2π u t / L`.
pub fn build_uniform_advection<T: Real>(n: usize, alpha: T) -> Result<Circuit<T>> {
    let qubits: Vec<usize> = (0..n).collect();
    uniform_advection_on(&qubits, n, alpha)
}

pub fn uniform_advection_on<T: Real>(x_qubits: &[usize], n_qubits: usize, alpha: T) -> Result<Circuit<T>> {
    validate_register(x_qubits, n_qubits)?;
    let mut c = Circuit::new(n_qubits);
    push_phase_pattern(&mut c, x_qubits, &[], alpha)?;
    Ok(c)
}

/// Shear advection on the standard layout (x on `0..n_x`, y above it) for
/// non-dimensional time `t` (L = U = 1, so `α = 2πt`).
pub fn build_shear_advection<T: Real>(
    profile: &VelocityProfile<T>,
    n_x: usize,
    n_y: usize,
    t: T,
) -> Result<Circuit<T>> {
    let x: Vec<usize> = (0..n_x).collect();
    let y: Vec<usize> = (n_x..n_x + n_y).collect();
    shear_advection_on(profile, &x, &y, n_x + n_y, T::lit(2.0) * T::PI() * t)
}

/// Applies `e^{-i u(y) k_j t}` with the x register in Fourier space and the
/// y register in physical space. `alpha = 2π U t / L`.
pub fn shear_advection_on<T: Real>(
    profile: &VelocityProfile<T>,
    x_qubits: &[usize],
    y_qubits: &[usize],
    n_qubits: usize,
    alpha: T,
) -> Result<Circuit<T>> {
    validate_register(x_qubits, n_qubits)?;
    validate_register(y_qubits, n_qubits)?;
    if x_qubits.iter().any(|q| y_qubits.contains(q)) {
        return Err(Error::InvalidRegister("x and y registers overlap".into()));
    }
    let terms = expand_profile_phases(profile, y_qubits.len())?;
    let mut c = Circuit::new(n_qubits);
    for term in &terms {
        let controls: Vec<usize> = term.y_controls.iter().map(|&r| y_qubits[r]).collect();
        push_phase_pattern(&mut c, x_qubits, &controls, alpha * term.coefficient)?;
    }
    Ok(c)
}

/// Decomposed two-qubit gate count (see [`crate::circuit::controlled_cost`]).
pub fn count_two_qubit_gates<T: Real>(circuit: &Circuit<T>) -> usize {
    circuit.counts().two_qubit_decomposed
}

/// Gates carrying at least one control, each counted once.
pub fn count_controlled_gates<T: Real>(circuit: &Circuit<T>) -> usize {
    circuit.gates().filter(|g| !g.controls.is_empty()).count()
}
