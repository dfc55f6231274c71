//! Null normal form of the metric at a Killing horizon.

pub mod geodesic;
pub mod misner;
pub mod normal_form;

pub use geodesic::{geodesic_normalize, GeodesicFrame, Transversal};
pub use misner::{misner_reduced_operator, misner_reduced_operator_derived, MisnerModel};
pub use normal_form::{normal_form_check, psi, NormalFormReport, NormalFormSample};
