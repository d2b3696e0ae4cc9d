//! Per-frequency spectral solver and verification suite for Neumann problems
//! of higher-order elliptic operators with constant self-adjoint coefficients
//! in the half-space `R^{n+1}_+`.
//!
//! After a Fourier transform in the horizontal variables every problem
//! reduces, frequency by frequency, to a constant-coefficient ODE in the
//! vertical variable `t`. The crate builds the reduced symbol, its decaying
//! mode bases, Dirichlet and Neumann boundary maps, layer potentials and the
//! norms needed to check boundary estimates numerically.

pub mod error;
pub mod exppoly;
pub mod halfspace;
pub mod io;
pub mod multiindex;
pub mod norms;
pub mod operator;
pub mod poly;
pub mod potentials;
pub mod quadrature;
pub mod symbol;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
