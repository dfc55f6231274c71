//! Principal symbol of the operator reduced by the horizon Killing field, and the
//! Hamiltonian dynamics at the conormal bundle of a horizon.
//!
//! The symbol is taken for the rescaled metric `psi g`, i.e. `p = g^{ij} xi_i xi_j / psi`
//! over the quotient coordinates `(x1, x2, x3)` of the horizon-adapted chart. The
//! rescaling changes `H_p` only by a positive factor on the characteristic set and
//! makes the radial rate on the conormal bundle exactly `-2 kappa_chart xi1^2`.

pub mod flow;
pub mod signature;
pub mod symbol;

pub use flow::{flow_bicharacteristic, perturbed_conormal, FlowOptions, FlowResult, FlowSample};
pub use signature::{symbol_signature, Signature};
pub use symbol::{
    conormal_check, hamiltonian_field, principal_symbol, quotient_inverse, radial_point_check, Classification,
    ConormalReport, CotangentPoint, RadialPointReport, RadialSample,
};
