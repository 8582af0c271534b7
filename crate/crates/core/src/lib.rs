//! Generalized solutions of one-dimensional pressureless gas dynamics.
//!
//! Free-particle solutions come from a Gaussian-kernel representation of
//! stochastically perturbed characteristics; sticky-particle solutions are
//! obtained from them by mass and momentum conservation.

pub mod blowup;
pub mod error;
pub mod fields;
pub mod general_law;
pub mod hugoniot;
pub mod mollified_kernel;
pub mod presets;
pub mod quadrature;
pub mod riemann_closed_form;
pub mod scalar;
pub mod sde_oracle;
pub mod sticky;

pub use error::{Error, Result};
pub use fields::{Bridge, Grid, InitialData, LineMeasure, Piece, PiecewiseFunction};
pub use presets::Preset;
pub use scalar::Scalar;

pub type RiemannData = fields::RiemannData<f64>;
pub type RiemannData32 = fields::RiemannData<f32>;
pub type RiemannFpResult = riemann_closed_form::RiemannFpResult<f64>;
pub type RiemannFpResult32 = riemann_closed_form::RiemannFpResult<f32>;
pub type MollifiedRiemannTerms = riemann_closed_form::MollifiedRiemannTerms<f64>;
pub type JumpState = sticky::JumpState<f64>;
pub type JumpAudit = hugoniot::JumpAudit<f64>;
