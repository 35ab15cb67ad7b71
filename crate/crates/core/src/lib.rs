//! Entanglement dynamics of resonantly coupled electromagnetic modes in
//! cavities with an oscillating wall.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: log-gamma, digamma, Gauss hypergeometric function and
//!   complete elliptic integrals.
//! - [`gaussian_core`]: two-mode covariance matrices, purities, block algebra
//!   and symplectic eigenvalues.
//! - [`measures`]: covariance, purity, distance and entropic entanglement
//!   coefficients.
//! - [`cavity3d`]: two resonant modes of a three-dimensional cavity, closed
//!   forms plus a direct ODE integration used as an oracle.
//! - [`cavity1d`]: Bogoliubov coefficients of a one-dimensional cavity and the
//!   derived pair moments and measures.
//!
//! Quadratures are ordered `(x1, p1, x2, p2)` with ħ = 1, so the vacuum
//! covariance is `I/2`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity1d;
pub mod cavity3d;
pub mod error;
pub mod gaussian_core;
pub mod measures;
pub mod ode;
pub mod specfun;

pub use cavity1d::{BogoliubovTable, InitialState, PairMoments1D};
pub use cavity3d::{Cavity3DParams, Regime, SlowTime};
pub use error::{Error, Result};
pub use gaussian_core::{Mat4, SecondMoments, SymplecticSpectrum, TwoModeCovariance};
pub use measures::MeasureSet;
pub use specfun::EllipticPair;
