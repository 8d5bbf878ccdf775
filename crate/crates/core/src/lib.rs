//! Pseudospectral laboratory for the fractional nonlinear Schrödinger equation
//!
//! ```text
//! i ∂_t u - (-Δ)^s u = -μ |u|^{p-1} u,    μ = +1 focusing, -1 defocusing
//! ```
//!
//! on a periodic box. The crate computes radial ground states, evolves data by
//! Strang splitting with the exact linear propagator, and checks the virial,
//! Morawetz, resolvent-representation and dispersive-decay machinery used in
//! below-threshold scattering arguments.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checkpoint;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod ground_state;
pub mod norms;
pub mod params;
mod reduce;
pub mod scenario;
pub mod spectral;
pub mod threshold;

pub use error::{Error, Result};
pub use field::{ComplexField, Space};
pub use grid::Grid;
pub use params::{PhysParams, Sign};
