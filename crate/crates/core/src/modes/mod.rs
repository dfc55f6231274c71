//! Quasinormal modes of Kerr–de Sitter from the stationary reduced operator.
//!
//! The mode ansatz `u = exp(-i (sigma t* + k phi*)) v(r, theta)` turns the wave-type
//! operator into a quadratic pencil in `sigma` on a domain that extends a little past
//! both horizons. With this chart's time orientation the modes that decay towards the
//! future of the horizons have `Im sigma > 0`.

pub mod analyticity;
pub mod assemble;
pub mod grid;
pub mod oracle;
pub mod quotient;
pub mod solve;

pub use analyticity::{analyticity_fit, chebyshev_decay, classify_decay, DecayFit, Eigenfunction, Verdict};
pub use assemble::{assemble_reduced_operator, Frame, ModeProblem, ParityBlock};
pub use grid::{AngularBasis, Parity, RadialBasis, SpectralGrid};
pub use oracle::{separated_oracle, OracleMode, SeparatedProblem};
pub use quotient::{misner_cross_check, misner_inverse, reduced_operator_at, Jet, MisnerCheck};
pub use solve::{mode_residual, pencil_eigenvalues, polish, qnm_solve, QnmMode, QnmResult, SolveOptions, Window};
