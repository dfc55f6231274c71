//! Horizon geometry, radial-point dynamics and quasinormal-mode spectra for
//! Kerr and Kerr–de Sitter black holes.
//!
//! The modules build on one another: [`geometry`] provides the spacetime, its
//! horizons and charts; [`gnc`] puts the metric into null normal form at a
//! horizon; [`microlocal`] checks the Hamiltonian dynamics at the conormal
//! bundle of a horizon; [`modes`] discretises the spectral family of a
//! wave-type operator and extracts its quasinormal modes.

pub mod error;
pub mod geometry;
pub mod gnc;
pub mod microlocal;
pub mod modes;
pub mod numerics;

pub use error::{Error, Result};
