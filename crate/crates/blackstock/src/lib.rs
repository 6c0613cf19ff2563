//! Spectral simulation toolkit for the Blackstock-Crighton equation
//! `(aΔ − ∂t)(u_tt − bΔu_t − c²Δu) = (k u_t² + s|∇u|²)_tt + f`
//! on intervals and rectangles with Dirichlet or Neumann boundary conditions.

pub mod error;
pub mod extension;
pub mod block;
pub mod cli;
pub mod compat;
pub mod data;
pub mod decay;
pub mod expm;
pub mod fd;
pub mod field;
pub mod linear;
pub mod nonlinear;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};
