//! Nonlinear asset-price diffusion toolkit.
//!
//! Implements the quantum equilibrium-disequilibrium (QED) family of asset
//! price models: a geometric diffusion with quadratic and cubic drift
//! corrections,
//!
//! ```text
//! dX = (theta X - kappa X^2 - g X^3) dt + sigma X dW
//! ```
//!
//! whose log-price obeys additive-noise Langevin dynamics in the potential
//! `V(y) = -theta_bar y + kappa e^y + (g/2) e^{2y}`. For suitable parameters
//! the well at finite price is metastable and the origin (default) is reached
//! by noise-activated barrier escape. The crate provides:
//!
//! - parameter maps and regime classification ([`params`]),
//! - the classical, log-space, effective, and partner potentials
//!   ([`potentials`]),
//! - deterministic and stochastic simulation plus a Monte Carlo escape-rate
//!   estimator ([`dynamics`]),
//! - three independent escape-rate estimators and the credit-triangle
//!   conversion ([`rates`]),
//! - instanton trajectories and actions ([`instanton`]),
//! - steady-state densities and the partition function ([`fpe`]),
//! - maximum-likelihood calibration against price series with CDS-spread
//!   penalties ([`calibrate`]).
//!
//! Numeric kernels that evaluate model formulas are generic over the scalar
//! type (see [`Scalar`]); estimator layers that depend on quadrature,
//! eigensolves, or random numbers are pinned to `f64`.

pub mod calibrate;
pub mod dynamics;
mod error;
pub mod fpe;
pub mod instanton;
mod numerics;
pub mod params;
pub mod potentials;
pub mod rates;
mod scalar;

pub use error::{ModelError, Result};
pub use params::{Calculus, MarketParams, ModelParams, Regime, RegimeKind};
pub use scalar::Scalar;

/// Double-precision model parameters, the working type of the estimator layers.
pub type ModelParams64 = params::ModelParams<f64>;
/// Single-precision model parameters.
pub type ModelParams32 = params::ModelParams<f32>;
/// Double-precision market parameters.
pub type MarketParams64 = params::MarketParams<f64>;
/// Single-precision market parameters.
pub type MarketParams32 = params::MarketParams<f32>;
