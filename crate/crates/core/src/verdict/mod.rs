//! Irreducibility criteria and their certificates.

mod certificate;
mod checks;

pub use certificate::{
    content_hash, decide, pole_shortcut, CertInput, Certificate, Evidence, MatrixSource, OperatorSource, Role, Rows,
    Term, Verdict, OBSTRUCTION_COMMAND,
};
pub use checks::{
    check_p2, check_p3, criterion_airy_family, family_pipeline, lnve_group_dimension, obstruction_certificate,
    p3_ideal_basis, p3_l2, reduced_form_obstruction, Obstruction,
};
