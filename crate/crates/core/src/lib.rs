//! Statevector simulation of spectral quantum algorithms for the
//! advection-diffusion of a passive scalar, with classical reference solvers.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`.

pub mod advection;
pub mod circuit;
pub mod diffusion;
pub mod error;
pub mod gate;
pub mod hardware;
pub mod reference;
pub mod scalar;
pub mod splitting;
pub mod state;
pub mod transforms;

pub use advection::{ProfileLabel, VelocityProfile};
pub use circuit::{Circuit, GateCounts, Instruction};
pub use error::{Error, Result};
pub use gate::{Control, GateKind, GateOp};
pub use reference::ScalarField;
pub use scalar::Real;
pub use splitting::{RunResult, ScenarioConfig, Splitting};
pub use state::QuantumState;
pub use transforms::BoundaryKind;

pub type State64 = QuantumState<f64>;
pub type Gate64 = GateOp<f64>;
pub type Circuit64 = Circuit<f64>;
pub type Profile64 = VelocityProfile<f64>;
pub type Scenario64 = ScenarioConfig<f64>;
pub type Field64 = ScalarField<f64>;
pub type RunResult64 = RunResult<f64>;
