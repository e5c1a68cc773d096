//! Variational equations: jet prolongation, monomial linearization,
//! normal restriction and the concrete families built from them.

mod families;
mod jetpoly;
mod oracle;
mod planar;
mod system;

pub use families::{
    airy_matrix, build_lnve_airy_family, build_p3_chain, split_infinity_zero, EquationFamily, P3Chain, P3Spec,
};
pub use jetpoly::{JetMono, JetPoly, JetVar};
pub use oracle::{curve_point, numeric_ve_oracle, OracleConfig, OracleReport};
pub use planar::{hamiltonian_basis, vf_decompose, VectorField2};
pub use system::{
    prolong, prolong_capped, taylor_lve, JetSystem, LinearizedSystem, VectorFieldSpec, DEFAULT_MAX_ORDER,
};
