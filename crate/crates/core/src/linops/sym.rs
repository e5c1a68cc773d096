use super::{cyclic_vector_scalarize, DiffOp, Matrix, RatFunMatrix};
use crate::exactalg::{Field, Rat, RatFun};
use crate::{Error, Result};

fn binom(n: usize, k: usize) -> Rat {
    let mut r = Rat::from_integer(1.into());
    for i in 0..k {
        r = r * Rat::from_integer(((n - i) as i64).into()) / Rat::from_integer(((i + 1) as i64).into());
    }
    r
}

/// Induced derivation on `u_k = C(m,k) y^(m−k) z^k` for `(y,z)′ = A(y,z)`.
pub fn sym_power_matrix<F: Field>(a: &Matrix<F>, m: usize) -> Matrix<F> {
    assert!(a.rows() == 2 && a.cols() == 2, "sym_power_matrix needs a 2x2 matrix");
    let (p, q, r, s) = (&a[(0, 0)], &a[(0, 1)], &a[(1, 0)], &a[(1, 1)]);
    let mut out = Matrix::zeros(m + 1, m + 1);
    if m == 0 {
        return out;
    }
    for k in 0..=m {
        let diag = p.times(&F::from_int((m - k) as i64)).plus(&s.times(&F::from_int(k as i64)));
        out[(k, k)] = diag;
        if k < m {
            out[(k, k + 1)] = q.times(&F::from_int((k + 1) as i64));
        }
        if k > 0 {
            out[(k, k - 1)] = r.times(&F::from_int((m - k + 1) as i64));
        }
    }
    out
}

/// Binary form coefficients on `y^(m−j) z^j`.
fn form_mul<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].plus(&x.times(y));
        }
    }
    out
}

/// Induced action of a 2×2 gauge matrix on the same binomial monomials:
/// if `Ỹ = P·Y` then `U(Ỹ) = sym_power_group(P, m)·U(Y)`.
pub fn sym_power_group<F: Field>(pm: &Matrix<F>, m: usize) -> Matrix<F> {
    assert!(pm.rows() == 2 && pm.cols() == 2, "sym_power_group needs a 2x2 matrix");
    let ly = vec![pm[(0, 0)].clone(), pm[(0, 1)].clone()];
    let lz = vec![pm[(1, 0)].clone(), pm[(1, 1)].clone()];
    let mut out = Matrix::zeros(m + 1, m + 1);
    for k in 0..=m {
        let mut f = vec![F::one()];
        for _ in 0..m - k {
            f = form_mul(&f, &ly);
        }
        for _ in 0..k {
            f = form_mul(&f, &lz);
        }
        let ck = F::from_rat(binom(m, k));
        for (j, c) in f.iter().enumerate() {
            out[(k, j)] = c.times(&ck).times(&F::from_rat(binom(m, j).recip()));
        }
    }
    out
}

/// Companion matrix of the monicized operator, acting on `(y, y′, …)`.
pub fn companion(l: &DiffOp) -> Result<RatFunMatrix> {
    let n = l.order();
    if n == 0 {
        return Err(Error::InvalidOperator("companion matrix of an order-0 operator".into()));
    }
    let lm = l.monic();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n - 1 {
        out[(i, i + 1)] = RatFun::one();
    }
    for j in 0..n {
        out[(n - 1, j)] = -&lm.coeff(j);
    }
    Ok(out)
}

/// Monic operator of order `m+1` annihilating products of `m` solutions of
/// a second-order `L`.
pub fn sym_power_operator(l: &DiffOp, m: usize) -> Result<DiffOp> {
    if l.order() != 2 {
        return Err(Error::InvalidOperator(format!("expected order 2, got {}", l.order())));
    }
    if m == 1 {
        return Ok(l.monic());
    }
    let a = sym_power_matrix(&companion(l)?, m);
    let mut v = vec![RatFun::zero(); m + 1];
    v[0] = RatFun::one();
    let zero = vec![RatFun::zero(); m + 1];
    Ok(cyclic_vector_scalarize(&a, &zero, &v)?.op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::gauge_transform;

    fn op(s: &str) -> DiffOp {
        DiffOp::parse(s, "t", &["mu"]).unwrap()
    }

    fn mat(rows: &[&[&str]]) -> RatFunMatrix {
        RatFunMatrix::parse(rows, "t", &["mu"]).unwrap()
    }

    #[test]
    fn airy_sym_powers() {
        let a1 = companion(&op("D^2 - t")).unwrap();
        assert_eq!(a1, mat(&[&["0", "1"], &["t", "0"]]));
        assert_eq!(sym_power_matrix(&a1, 1), a1);
        assert_eq!(sym_power_matrix(&a1, 2), mat(&[&["0", "1", "0"], &["2*t", "0", "2"], &["0", "t", "0"]]));
        assert_eq!(
            sym_power_matrix(&a1, 3),
            mat(&[&["0", "1", "0", "0"], &["3*t", "0", "2", "0"], &["0", "2*t", "0", "3"], &["0", "0", "t", "0"]])
        );
        assert_eq!(sym_power_matrix(&a1, 0), RatFunMatrix::zeros(1, 1));
    }

    #[test]
    fn companion_examples() {
        assert_eq!(companion(&op("D - 1")).unwrap(), mat(&[&["1"]]));
        assert_eq!(companion(&op("D^2 - 4 - 4*mu/t")).unwrap(), mat(&[&["0", "1"], &["4 + 4*mu/t", "0"]]));
        assert!(companion(&op("t")).is_err());
    }

    #[test]
    fn sym_operators() {
        let airy = op("D^2 - t");
        assert_eq!(sym_power_operator(&airy, 4).unwrap(), op("D^5 - 20*t*D^3 - 30*D^2 + 64*t^2*D + 64*t"));
        assert_eq!(sym_power_operator(&airy, 2).unwrap(), op("D^3 - 4*t*D - 2"));
        assert_eq!(sym_power_operator(&airy, 1).unwrap(), airy);
    }

    #[test]
    fn group_and_derivation_agree() {
        // For constant P, sym(P[A]) = symgroup(P)·sym(A)·symgroup(P)^-1.
        let a = mat(&[&["1/t", "t"], &["2", "-1/t"]]);
        let p = mat(&[&["2", "1"], &["-3", "5"]]);
        for m in 1..=4 {
            let lhs = sym_power_matrix(&gauge_transform(&p, &a).unwrap(), m);
            let sp = sym_power_group(&p, m);
            let rhs = sp.mul(&sym_power_matrix(&a, m)).mul(&sp.inverse().unwrap());
            assert_eq!(lhs, rhs, "m = {m}");
        }
    }

    #[test]
    fn p3_first_variational_gauge() {
        let a1 = mat(&[&["-2 - 2*mu/t", "4/t"], &["-mu - mu^2/t", "2 + 2*mu/t"]]);
        let q1 = mat(&[&["-2*mu", "1"], &["-mu^2", "0"]]);
        let t1 = gauge_transform(&q1.inverse().unwrap(), &a1).unwrap();
        assert_eq!(t1, mat(&[&["0", "1/mu + 1/t"], &["4*mu", "0"]]));
    }
}
