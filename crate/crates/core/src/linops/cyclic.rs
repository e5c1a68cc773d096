use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DiffOp, RatFunMatrix};
use crate::exactalg::RatFun;
use crate::{Error, Result};

/// Scalar form `op(f) = rhs` of `F′ = A·F + b` for `f = v·F`.
#[derive(Clone, Debug)]
pub struct Scalarization {
    pub op: DiffOp,
    pub rhs: RatFun,
    /// Covector actually used.
    pub covector: Vec<RatFun>,
    /// Rows `w_i` with `f⁽ⁱ⁾ = w_i·F + h_i`.
    pub w: RatFunMatrix,
    pub h: Vec<RatFun>,
}

impl Scalarization {
    /// Recovers `F = W⁻¹ (f⁽ⁱ⁾ − h_i)` from a scalar solution `f`.
    pub fn recover(&self, f: &RatFun) -> Vec<RatFun> {
        let n = self.h.len();
        let mut rhs = Vec::with_capacity(n);
        let mut d = f.clone();
        for i in 0..n {
            if i > 0 {
                d = d.derivative();
            }
            rhs.push(&d - &self.h[i]);
        }
        self.w.solve(&rhs).expect("W is invertible")
    }
}

/// Rows `w_0..w_n` and terms `h_0..h_n` with `(v·F)⁽ⁱ⁾ = w_i·F + h_i` for
/// every solution of `F′ = A·F + b`.
fn derivative_rows(a: &RatFunMatrix, b: &[RatFun], v: &[RatFun]) -> Result<(Vec<Vec<RatFun>>, Vec<RatFun>)> {
    let n = a.rows();
    if !a.is_square() || b.len() != n || v.len() != n {
        return Err(Error::Dimension("cyclic vector: size mismatch".into()));
    }
    let dot = |w: &[RatFun], x: &[RatFun]| {
        w.iter()
            .zip(x)
            .fold(RatFun::zero(), |acc, (p, q)| if p.is_zero() || q.is_zero() { acc } else { &acc + &(p * q) })
    };
    let mut ws: Vec<Vec<RatFun>> = vec![v.to_vec()];
    let mut hs = vec![RatFun::zero()];
    for i in 0..n {
        let w = &ws[i];
        let wa = a.vec_mul(w);
        let next: Vec<RatFun> = w.iter().zip(&wa).map(|(x, y)| &x.derivative() + y).collect();
        let hn = &hs[i].derivative() + &dot(w, b);
        ws.push(next);
        hs.push(hn);
    }
    Ok((ws, hs))
}

/// Scalarizes `F′ = A·F + b` along the covector `v`.
pub fn cyclic_vector_scalarize(a: &RatFunMatrix, b: &[RatFun], v: &[RatFun]) -> Result<Scalarization> {
    let (mut ws, mut hs) = derivative_rows(a, b, v)?;
    let wn = ws.pop().unwrap();
    let hn = hs.pop().unwrap();
    let w = RatFunMatrix::from_rows(ws);
    // λ with w_n = Σ λ_i w_i, i.e. Wᵀ λ = w_nᵀ.
    let lambda = match w.transpose().inverse() {
        Some(inv) => inv.mul_vec(&wn),
        None => return Err(Error::CyclicVectorFailed),
    };
    let mut coeffs: Vec<RatFun> = lambda.iter().map(|x| -x).collect();
    coeffs.push(RatFun::one());
    let rhs = hs.iter().zip(&lambda).fold(hn, |acc, (h, l)| &acc - &(h * l));
    Ok(Scalarization { op: DiffOp::new(coeffs), rhs, covector: v.to_vec(), w, h: hs })
}

/// Checks that `f = v·F` satisfies `op(f) = g` for every solution of
/// `F′ = A·F + b`, where `op` is monic of order `dim A`, and returns `g`.
/// Needs no inversion, so it stays cheap over parameter fields.
pub fn scalar_form_rhs(a: &RatFunMatrix, b: &[RatFun], v: &[RatFun], op: &DiffOp) -> Result<Option<RatFun>> {
    let n = a.rows();
    if op.order() != n || !op.leading().is_one() {
        return Err(Error::InvalidOperator(format!("expected a monic operator of order {n}")));
    }
    let (ws, hs) = derivative_rows(a, b, v)?;
    let mut residual = vec![RatFun::zero(); n];
    let mut g = RatFun::zero();
    for (i, (w, h)) in ws.iter().zip(&hs).enumerate() {
        let c = op.coeff(i);
        if c.is_zero() {
            continue;
        }
        for (r, x) in residual.iter_mut().zip(w) {
            *r = &*r + &(&c * x);
        }
        g = &g + &(&c * h);
    }
    Ok(residual.iter().all(RatFun::is_zero).then_some(g))
}

/// Tries `v`, then random covectors with small integer entries, then
/// random ones with entries linear in the variable (constant covectors
/// never work for systems with constant `A` and repeated eigenvalues).
pub fn scalarize_with_retry(a: &RatFunMatrix, b: &[RatFun], v: &[RatFun], seed: u64) -> Result<Scalarization> {
    match cyclic_vector_scalarize(a, b, v) {
        Err(Error::CyclicVectorFailed) => {}
        other => return other,
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..40 {
        let w: Vec<RatFun> = (0..a.rows())
            .map(|_| {
                let c = RatFun::from(rng.gen_range(-5i64..=5));
                if attempt < 20 {
                    c
                } else {
                    &c + &(&RatFun::from(rng.gen_range(-5i64..=5)) * &RatFun::x())
                }
            })
            .collect();
        if w.iter().all(|x| x.is_zero()) {
            continue;
        }
        match cyclic_vector_scalarize(a, b, &w) {
            Err(Error::CyclicVectorFailed) => continue,
            other => return other,
        }
    }
    Err(Error::CyclicVectorFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{companion, sym_power_matrix, system_residual};

    fn mat(rows: &[&[&str]]) -> RatFunMatrix {
        RatFunMatrix::parse(rows, "t", &[]).unwrap()
    }

    #[test]
    fn companion_inverse() {
        let a = mat(&[&["0", "1"], &["t", "0"]]);
        let s =
            cyclic_vector_scalarize(&a, &[RatFun::zero(), RatFun::zero()], &[RatFun::one(), RatFun::zero()]).unwrap();
        assert_eq!(s.op, DiffOp::parse("D^2 - t", "t", &[]).unwrap());
        assert!(s.rhs.is_zero());
    }

    #[test]
    fn non_cyclic_covector() {
        let a = mat(&[&["1", "0"], &["0", "2"]]);
        let z = [RatFun::zero(), RatFun::zero()];
        let err = cyclic_vector_scalarize(&a, &z, &[RatFun::one(), RatFun::zero()]).unwrap_err();
        assert_eq!(err, Error::CyclicVectorFailed);
        let s = scalarize_with_retry(&a, &z, &[RatFun::one(), RatFun::zero()], 7).unwrap();
        assert_eq!(s.op.order(), 2);
    }

    #[test]
    fn dual_airy_system_reduces_to_l4() {
        // Ψ = −sym⁴(A₁)ᵀ with b = (p, 0, 0, 0, 0); covector e₅.
        let a1 = companion(&DiffOp::parse("D^2 - t", "t", &[]).unwrap()).unwrap();
        let psi = sym_power_matrix(&a1, 4).transpose().neg();
        let p = RatFun::x().pow(2);
        let mut b = vec![RatFun::zero(); 5];
        b[0] = p.clone();
        let mut v = vec![RatFun::zero(); 5];
        v[4] = RatFun::one();
        let s = cyclic_vector_scalarize(&psi, &b, &v).unwrap();
        let l4 = DiffOp::parse("D^5 - 20*t*D^3 - 30*D^2 + 64*t^2*D + 64*t", "t", &[]).unwrap();
        // The operator is L₄ up to sign of odd-order terms (self-adjointness).
        assert_eq!(s.op, l4.adjoint().scale(&RatFun::from(-1)));
        assert_eq!(s.op.adjoint().scale(&RatFun::from(-1)), l4);
        assert_eq!(s.rhs, &RatFun::from(24) * &p);
    }

    #[test]
    fn recover_round_trip() {
        let a = mat(&[&["0", "1"], &["1/t", "0"]]);
        let f = [RatFun::x().pow(3), RatFun::x()];
        // b chosen so that f is a solution.
        let b: Vec<RatFun> = system_residual(&a, &f, &[RatFun::zero(), RatFun::zero()]);
        let s = cyclic_vector_scalarize(&a, &b, &[RatFun::one(), RatFun::one()]).unwrap();
        let scalar = &f[0] + &f[1];
        assert_eq!(s.op.apply(&scalar), s.rhs);
        assert_eq!(s.recover(&scalar), f.to_vec());
    }
}
