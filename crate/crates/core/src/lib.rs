//! Finite-time stabilization of perturbed integrator chains.
//!
//! The chain `ż_i = z_{i+1}`, `ż_r = φ(t) + γ(t)·u` with bounded but unknown
//! `φ` and `γ` is stabilized by wrapping a homogeneous nominal feedback `u0`
//! either in a robust law (known bounds) or in an adaptive law (unknown
//! bounds). The crate provides:
//!
//! * [`signed_algebra`]: signed powers, saturation, the blending ramp and the
//!   dilation group.
//! * [`gain_synthesis`]: nested Hurwitz gain construction and Routh testing.
//! * [`controllers`]: Hong's homogeneous law, its simplified variant, the
//!   robust wrapper and the adaptive law with its gain dynamics.
//! * [`lyapunov`]: the Lyapunov function paired with Hong's law, homogeneity
//!   constants sampled on the unit level set, and analytic bound calculators.
//! * [`simulation`]: fixed-step closed-loop integration with bounded
//!   disturbance generators and tail metrics.
//! * [`harness`]: scenario files, result files and the property-verification
//!   suite behind the `chainstab` binary.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`). The
//! `*64` aliases below fix the scalar to `f64`, which is what the harness
//! uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controllers;
pub mod error;
pub mod gain_synthesis;
pub mod harness;
pub mod lyapunov;
pub mod scalar;
pub mod signed_algebra;
pub mod simulation;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use controllers::{
    AdaptiveConfig, AdaptiveOutput, AdaptiveState, Feedback, FeedbackLaw, HongParams, Switching,
    UncertaintyBounds,
};
pub use gain_synthesis::GainVector;
pub use lyapunov::{AdaptiveBounds, HomogeneityCertificate, HomogeneityDegrees};
pub use signed_algebra::DilationWeights;
pub use simulation::{
    Controller, Disturbance, DisturbanceSpec, Integrator, RunMetrics, Signal, SimConfig,
    Trajectory,
};

/// State of the integrator chain, `z_1..z_r`.
pub type ChainState<T> = Vec<T>;

pub type ChainState64 = ChainState<f64>;
pub type DilationWeights64 = DilationWeights<f64>;
pub type GainVector64 = GainVector<f64>;
pub type HongParams64 = HongParams<f64>;
pub type UncertaintyBounds64 = UncertaintyBounds<f64>;
pub type AdaptiveConfig64 = AdaptiveConfig<f64>;
pub type AdaptiveState64 = AdaptiveState<f64>;
pub type HomogeneityCertificate64 = HomogeneityCertificate<f64>;
pub type AdaptiveBounds64 = AdaptiveBounds<f64>;
pub type DisturbanceSpec64 = DisturbanceSpec<f64>;
pub type Disturbance64 = Disturbance<f64>;
pub type Controller64 = Controller<f64>;
pub type SimConfig64 = SimConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type RunMetrics64 = RunMetrics<f64>;

pub type ChainState32 = ChainState<f32>;
pub type GainVector32 = GainVector<f32>;
pub type HongParams32 = HongParams<f32>;
pub type Trajectory32 = Trajectory<f32>;
