//! Numerical building blocks shared by the geometry and spectral code.

pub mod cheb;
pub mod fd;
pub mod halton;
pub mod legendre;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod tensor;
