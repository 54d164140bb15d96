//! Phase-space classicality diagnostics for Gaussian quantum states.
//!
//! The analytic core is generic over the scalar type; `f64` and `f32` aliases
//! are exported below. The grid-based modules (`husimi`, `quasiprojector`) work in `f64`.

// NaN-rejecting guards are written as `!(x > 0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bogoliubov;
pub mod conventions;
pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod husimi;
pub mod linalg;
pub mod modes;
pub mod ode;
pub mod open_system;
pub mod quasiprojector;
pub mod scalar;
pub mod state;

pub use bogoliubov::{apply, coherent_overlap, compose, one_mode_squeeze, rotation, two_mode_squeeze, BogoliubovMap, Elementary};
pub use conventions::Conventions;
pub use dynamics::{evolve, PotentialModel};
pub use husimi::{q_function, HusimiGrid, WavefunctionGrid};
pub use modes::{Mode, ModeSpectrum};
pub use open_system::{cl_moments_evolve, BathSpec};
pub use quasiprojector::PhaseSpaceCell;
pub use error::{Error, Result};
pub use scalar::Real;
pub use state::{
    covariance_from_1d_params, covariance_from_k, k_from_covariance, k_from_ml, ml_from_k, CovarianceState,
    Gaussian1DParams, GaussianPureState,
};

pub type ConventionsF64 = Conventions<f64>;
pub type ConventionsF32 = Conventions<f32>;
pub type GaussianPureStateF64 = GaussianPureState<f64>;
pub type GaussianPureStateF32 = GaussianPureState<f32>;
pub type CovarianceStateF64 = CovarianceState<f64>;
pub type CovarianceStateF32 = CovarianceState<f32>;
pub type Gaussian1DParamsF64 = Gaussian1DParams<f64>;
pub type BogoliubovMapF64 = BogoliubovMap<f64>;
pub type BogoliubovMapF32 = BogoliubovMap<f32>;
pub type ModeF64 = modes::Mode<f64>;
pub type ModeF32 = modes::Mode<f32>;
pub type ModeSpectrumF64 = modes::ModeSpectrum<f64>;
pub type ModeSpectrumF32 = modes::ModeSpectrum<f32>;
pub type PotentialModelF64 = dynamics::PotentialModel<f64>;
pub type PotentialModelF32 = dynamics::PotentialModel<f32>;
pub type BathSpecF64 = open_system::BathSpec<f64>;
pub type BathSpecF32 = open_system::BathSpec<f32>;
