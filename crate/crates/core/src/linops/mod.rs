//! Matrices over rational functions and scalar differential operators:
//! gauge calculus, symmetric powers, adjoints, cyclic vectors.

mod cyclic;
mod diffop;
mod matrix;
mod sym;

pub use cyclic::{cyclic_vector_scalarize, scalar_form_rhs, scalarize_with_retry, Scalarization};
pub use diffop::DiffOp;
pub use matrix::{ratfun_weight, Matrix, RatFunMatrix, RatMatrix};
pub use sym::{companion, sym_power_group, sym_power_matrix, sym_power_operator};

use crate::exactalg::RatFun;
use crate::{Error, Result};

/// `P[A] = P·A·P⁻¹ − P′·P⁻¹`.
pub fn gauge_transform(p: &RatFunMatrix, a: &RatFunMatrix) -> Result<RatFunMatrix> {
    if !p.is_square() || p.rows() != a.rows() || !a.is_square() {
        return Err(Error::Dimension(format!(
            "gauge {}x{} against system {}x{}",
            p.rows(),
            p.cols(),
            a.rows(),
            a.cols()
        )));
    }
    let inv = p.inverse().ok_or(Error::NotGauge)?;
    Ok(p.mul(a).mul(&inv).sub(&p.derivative().mul(&inv)))
}

/// Applies `F ↦ F′ − A·F` to a vector; zero exactly on solutions of `F′ = A·F`.
pub fn system_residual(a: &RatFunMatrix, f: &[RatFun], b: &[RatFun]) -> Vec<RatFun> {
    let af = a.mul_vec(f);
    f.iter().zip(af.iter().zip(b)).map(|(fi, (ai, bi))| &(&fi.derivative() - ai) - bi).collect()
}
