//! Bistable fronts meeting a hostile strip, at desk scale.
//!
//! The medium grows bistably (u(u-α)(1-u)) everywhere except a strip |x| < L
//! where it decays (-u). This crate computes everything that model admits in
//! closed or semi-closed form — phase-plane intersection ordinates, the strip
//! spans R/r/ℓ, the critical half-width L*, the exact piecewise stationary
//! profiles — and pairs it with a 1-D IMEX solver that classifies the
//! long-time fate of front-like initial data (spreading / residue /
//! transition) and locates the sharp threshold shifts by bisection.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod numerics;
pub mod ode;
pub mod pde;
pub mod phase_plane;
pub mod reaction;
pub mod report;
pub mod stationary;

pub use error::{Error, Result};
pub use grid::Grid1D;
pub use reaction::ModelParams;
