//! Executable stability theorems: fit the exact solution hidden in an
//! approximate one, evaluate the explicit constant and compare.

mod associativity;
mod certificate;
pub mod constants;
mod entropy_eq;
mod fundamental;
pub mod minimax;
mod modified;
mod sequence;
mod sum_form;

pub use associativity::{certify_associativity, Interval};
pub use certificate::{slack, Candidate, StabilityCertificate, Trace};
pub use constants::{
    c_n, d_n, stability_constant_K, stability_constant_T, StabilityConstants, K_AT_ZERO,
};
pub use entropy_eq::{certify_entropy_equation, HOMOGENEITY_SCALES};
pub use fundamental::{
    certify_fundamental_closed, certify_fundamental_open, certify_hyperstable,
    hyperstability_blowup_probe, CertifyOptions, EXACTNESS_TOLERANCE,
};
pub use modified::certify_modified_entropy;
pub use sequence::certify_measure_sequence;
pub use sum_form::{certify_mixed_sum_form, certify_sum_form, certify_sum_form_multiplicative};
