//! Traveling waves of discrete reaction-diffusion equations
//!
//! ```text
//! c φ'(z) = F(φ(z + r_0), ..., φ(z + r_N)) + σ
//! ```
//!
//! The crate measures the wave velocity `c(σ)` by long-time evolution of
//! `u_t = F((u(·+r_i))_i) + σ` with a monotone explicit scheme, assembles the
//! velocity diagram over the bistable range `(σ⁻, σ⁺)`, and reaches the
//! vertical branches at `σ = σ±` through the effective velocity of the hull
//! function.
//!
//! Modules, bottom-up:
//! - [`nonlinearity`]: the operator `F`, its diagonal `f`, `σ±`, equilibria,
//!   Lipschitz data and the reflection conjugation.
//! - [`evolution`]: grids, stencils and the monotone Euler scheme.
//! - [`fronts`]: level-set front positions and velocity fits.
//! - [`hull`]: hull-function drift `λ_p(σ)` and its inversion.
//! - [`analysis`]: diagram sweeps, critical velocities and verifiers.
//! - [`specfile`] / [`export`]: the config file format and CSV writers.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod export;
pub mod fronts;
pub mod hull;
pub mod nonlinearity;
mod numeric;
pub mod specfile;

pub use analysis::{
    critical_velocities, integral_identity, integral_identity_averaged, normalize_to_sigma_plus,
    supersolution_threshold, sweep_diagram,
    velocity_at, verify_supersolution, CriticalVelocities, Diagram, DiagramPoint,
    SupersolutionReport, VelocityConfig,
};
pub use error::{Axiom, Error, Result};
pub use evolution::{EvolutionConfig, GridParams, GridProfile, ShiftStencil};
pub use fronts::{FrontTrace, VelocityEstimate};
pub use hull::{HullConfig, HullResult, HullState};
pub use nonlinearity::{EquilibriumPair, LipschitzData, LocalFn, NonlinearitySpec, OperatorKind};
