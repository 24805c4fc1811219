//! Continuous-time dual-space game dynamics over N-player concave games.
//!
//! The library is organized around four pieces:
//!
//! - [`geometry`]: regularizers, mirror maps, Bregman divergences and their
//!   convex-conjugate identities. The mirror map `C_ε(z)` maximizes
//!   `yᵀz − ε ϑ(y)` over the strategy set; the squared-Euclidean regularizer
//!   yields a projection of `z/ε`, negative entropy yields a softmax with
//!   temperature `ε`.
//! - [`games`]: game representations (pseudo-gradient plus optional
//!   potential), builders for the bilinear and adversarial case studies, and
//!   sampled monotonicity estimation.
//! - [`dynamics`]: the MD / DMD / AC vector fields in stacked form and a
//!   fixed-step RK4 integrator producing sampled trajectories.
//! - [`analysis`]: equilibrium solvers, the Lyapunov observable
//!   `V_z = γ⁻¹ Σ_p D_{ψ⋆}(zᵖ, zᵖ_target)` and the exponential rate-bound
//!   envelopes `C₀ e^{−βt}` together with trajectory-vs-bound verification.
//!
//! All numeric code is generic over the scalar type through [`scalar::Scalar`]
//! (any `num_traits::Float`); the aliases below fix `f64`, which is what the
//! CLI and the test suite use.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod games;
pub mod geometry;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` strategy profile.
pub type Profile = games::StrategyProfile<f64>;
/// `f64` game.
pub type Game = games::Game<f64>;
/// `f64` mirror map specification.
pub type MirrorSpec = geometry::MirrorSpec<f64>;
/// `f64` regularizer.
pub type RegularizerKind = geometry::RegularizerKind<f64>;
/// `f64` domain descriptor.
pub type Domain = geometry::Domain<f64>;
/// `f64` dynamics specification.
pub type DynamicsSpec = dynamics::DynamicsSpec<f64>;
/// `f64` sampled trajectory.
pub type Trajectory = dynamics::Trajectory<f64>;
/// `f64` rate bound.
pub type RateBound = analysis::RateBound<f64>;
