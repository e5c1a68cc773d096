use super::jetpoly::{JetPoly, JetVar};
use super::system::{taylor_lve, VectorFieldSpec};
use crate::exactalg::parse::parse_coeff;
use crate::exactalg::{Coeff, Field, MPoly, Param, Poly, Rat, RatFun};
use crate::linops::{sym_power_group, sym_power_matrix, Matrix, RatFunMatrix};
use crate::{Error, Result};

/// Airy first variational matrix `[[0,1],[t,0]]`.
pub fn airy_matrix() -> RatFunMatrix {
    Matrix::from_rows(vec![vec![RatFun::zero(), RatFun::one()], vec![RatFun::x(), RatFun::zero()]])
}

/// Block lower-triangular `(n+3)×(n+3)` system: `symⁿ(A₁)` on top, `A₁`
/// at the bottom, coupled through `p` in the last row, first column.
pub fn build_lnve_airy_family(n: usize, p: &RatFun) -> RatFunMatrix {
    let a1 = airy_matrix();
    let mut m = Matrix::block_diag(&[sym_power_matrix(&a1, n), a1]);
    m[(n + 2, 0)] = p.clone();
    m
}

/// `y″ = x·y + yⁿ·P(x, y)` with `P` rational in `x, y` and finite on `y = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationFamily {
    n: usize,
    p_text: String,
    p_num: MPoly,
    p_den: MPoly,
}

fn xy_params() -> (Param, Param) {
    (Param::new("x"), Param::new("y"))
}

/// Converts a polynomial in the single parameter `v` to a `Poly`.
fn mpoly_to_poly(p: &MPoly, v: Param) -> Result<Poly> {
    let coeffs = p
        .to_univariate(v)
        .iter()
        .map(|c| c.as_constant().ok_or_else(|| Error::Input("unexpected extra variable".into())))
        .collect::<Result<Vec<Rat>>>()?;
    Ok(Poly::from_rats(&coeffs))
}

impl EquationFamily {
    pub fn parse(n: usize, p: &str) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input(format!("exponent n = {n} must be at least 2")));
        }
        let c = parse_coeff(p, &["x", "y"])?;
        let (num, den) = (c.num(), c.den());
        let (_, y) = xy_params();
        if den.substitute(y, &Rat::from_integer(0.into())).is_zero() {
            return Err(Error::Input(format!("P = {p} has a pole along y = 0")));
        }
        Ok(EquationFamily { n, p_text: p.to_string(), p_num: num, p_den: den })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p_text(&self) -> &str {
        &self.p_text
    }

    /// `p(t) = n!·P(t, 0)`.
    pub fn p(&self) -> Result<RatFun> {
        let (x, y) = xy_params();
        let zero = Rat::from_integer(0.into());
        let num = mpoly_to_poly(&self.p_num.substitute(y, &zero), x)?;
        let den = mpoly_to_poly(&self.p_den.substitute(y, &zero), x)?;
        let fact: i64 = (1..=self.n as i64).product();
        Ok(&RatFun::new(num, den) * &RatFun::from(fact))
    }

    /// The field `∂x + z∂y + (xy + yⁿP)∂z`; needs `P` polynomial in `y`.
    pub fn vector_field(&self) -> Result<VectorFieldSpec> {
        let (x, y) = xy_params();
        if self.p_den.degree_in(y) > 0 {
            return Err(Error::Input("P must be polynomial in y for prolongation".into()));
        }
        let den = RatFun::from_poly(mpoly_to_poly(&self.p_den, x)?);
        let yv = JetPoly::var(JetVar::new(1, 0));
        let mut pj = JetPoly::zero();
        for (e, c) in self.p_num.to_univariate(y).iter().enumerate() {
            let cx = &RatFun::from_poly(mpoly_to_poly(c, x)?) / &den;
            pj = pj.plus(&yv.pow(e as u32).scale(&cx));
        }
        let f = yv.scale(&RatFun::x()).plus(&yv.pow(self.n as u32).times(&pj));
        VectorFieldSpec::new(
            vec!["x".into(), "y".into(), "z".into()],
            Some(0),
            vec![JetPoly::constant(RatFun::one()), JetPoly::var(JetVar::new(2, 0)), f],
        )
    }
}

/// Parameter of the P₃ family `(α,β,γ,δ) = (2μ−1, −2μ+1, 1, −1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct P3Spec {
    pub mu: Coeff,
}

impl P3Spec {
    pub fn symbolic() -> Self {
        P3Spec { mu: Coeff::param(Param::new("mu")) }
    }

    pub fn at(mu: Rat) -> Self {
        P3Spec { mu: Coeff::from(mu) }
    }

    /// Hamiltonian field along which the chain is built: coordinates
    /// `(x, y, z)`, `x` independent.
    pub fn vector_field(&self) -> VectorFieldSpec {
        let c = |f: RatFun| JetPoly::constant(f);
        let mu = RatFun::constant(self.mu.clone());
        let inv_x = RatFun::x().pow(-1);
        let y = JetPoly::var(JetVar::new(1, 0));
        let z = JetPoly::var(JetVar::new(2, 0));
        let k = |n: i64| RatFun::from(n);
        // ∂H/∂z = 4/x·y²z − y² + 2μ/x·y + 1
        let hz = y
            .pow(2)
            .times(&z)
            .scale(&(&k(4) * &inv_x))
            .minus(&y.pow(2))
            .plus(&y.scale(&(&(&k(2) * &mu) * &inv_x)))
            .plus(&c(RatFun::one()));
        // −∂H/∂y = −4/x·yz² + 2yz − 2μ/x·z + μ
        let hy = y
            .times(&z.pow(2))
            .scale(&(&k(-4) * &inv_x))
            .plus(&y.times(&z).scale(&k(2)))
            .minus(&z.scale(&(&(&k(2) * &mu) * &inv_x)))
            .plus(&c(mu.clone()));
        VectorFieldSpec::new(vec!["x".into(), "y".into(), "z".into()], Some(0), vec![c(RatFun::one()), hz, hy])
            .expect("well-formed field")
    }

    /// The invariant curve `y = 1, z = −μ/2`.
    pub fn curve(&self) -> Vec<RatFun> {
        let mu = RatFun::constant(self.mu.clone());
        vec![RatFun::x(), RatFun::one(), &mu * &RatFun::from_rat(Rat::new((-1).into(), 2.into()))]
    }
}

/// The three truncated variational systems along the P₃ curve with their
/// partial reductions `Ãᵢ = Qᵢ⁻¹·Aᵢ·Qᵢ`.
#[derive(Clone, Debug)]
pub struct P3Chain {
    pub a: [RatFunMatrix; 3],
    pub q: [RatFunMatrix; 3],
    pub a_tilde: [RatFunMatrix; 3],
}

impl P3Chain {
    pub fn into_tuple(
        self,
    ) -> (
        RatFunMatrix,
        RatFunMatrix,
        RatFunMatrix,
        RatFunMatrix,
        RatFunMatrix,
        RatFunMatrix,
        RatFunMatrix,
        RatFunMatrix,
        RatFunMatrix,
    ) {
        let [a1, a2, a3] = self.a;
        let [q1, q2, q3] = self.q;
        let [t1, t2, t3] = self.a_tilde;
        (a1, q1, t1, a2, q2, t2, a3, q3, t3)
    }
}

pub fn build_p3_chain(spec: &P3Spec) -> Result<P3Chain> {
    if spec.mu.is_zero() {
        return Err(Error::Q1Singular);
    }
    let field = spec.vector_field();
    let curve = spec.curve();
    let mu = RatFun::constant(spec.mu.clone());
    let q1 = Matrix::from_rows(vec![vec![&mu * &RatFun::from(-2), RatFun::one()], vec![-&mu.pow(2), RatFun::zero()]]);
    let q = [
        q1.clone(),
        Matrix::block_diag(&[sym_power_group(&q1, 2), q1.clone()]),
        Matrix::block_diag(&[sym_power_group(&q1, 3), sym_power_group(&q1, 2), q1.clone()]),
    ];
    let mut a = Vec::with_capacity(3);
    let mut at = Vec::with_capacity(3);
    for k in 1..=3 {
        let ak = taylor_lve(&field, &curve, k)?.matrix().clone();
        let qk = &q[k - 1];
        let inv = qk.inverse().ok_or(Error::Q1Singular)?;
        at.push(inv.mul(&ak).mul(qk));
        a.push(ak);
    }
    let [a1, a2, a3]: [RatFunMatrix; 3] = a.try_into().unwrap();
    let [t1, t2, t3]: [RatFunMatrix; 3] = at.try_into().unwrap();
    Ok(P3Chain { a: [a1, a2, a3], q, a_tilde: [t1, t2, t3] })
}

/// Splits `A = C_∞ + C₀/x` with constant `C_∞, C₀`; fails if any other
/// power of `x` occurs.
pub fn split_infinity_zero(a: &RatFunMatrix) -> Result<(Matrix<Coeff>, Matrix<Coeff>)> {
    let mut cinf = Matrix::zeros(a.rows(), a.cols());
    let mut c0 = Matrix::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let f = &a[(i, j)] * &RatFun::x();
            let bad = || Error::UnexpectedStructure(format!("entry ({i},{j}) is not of the form a + b/x"));
            if !f.is_polynomial() || f.num().degree().is_some_and(|d| d > 1) {
                return Err(bad());
            }
            c0[(i, j)] = f.num().coeff(0);
            cinf[(i, j)] = f.num().coeff(1);
        }
    }
    Ok((cinf, c0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::prolong;
    use crate::linops::cyclic_vector_scalarize;
    use crate::linops::DiffOp;

    fn mu_matrix(rows: &[&[&str]]) -> Matrix<Coeff> {
        RatFunMatrix::parse(rows, "x", &["mu"]).unwrap().to_coeff().unwrap()
    }

    fn pipeline(fam: &EquationFamily) -> RatFunMatrix {
        let f = fam.vector_field().unwrap();
        let curve = vec![RatFun::x(), RatFun::zero(), RatFun::zero()];
        let j = prolong(&f, fam.n()).unwrap().restrict_to_curve(&f, &curve).unwrap();
        j.normal_restrict(0).unwrap().linearize(fam.n()).unwrap().principal_subsystem().matrix().clone()
    }

    #[test]
    fn airy_family_matches_pipeline() {
        for (n, p, expect) in [(2, "1/(2*x)", "1/t"), (3, "2", "12"), (4, "x + y", "24*t"), (2, "0", "0")] {
            let fam = EquationFamily::parse(n, p).unwrap();
            let pt = fam.p().unwrap();
            assert_eq!(pt, crate::exactalg::parse::parse_ratfun(expect, "t", &[]).unwrap());
            assert_eq!(pipeline(&fam), build_lnve_airy_family(n, &pt), "n={n}, P={p}");
        }
    }

    #[test]
    fn family_rejects_pole_on_axis() {
        assert!(EquationFamily::parse(2, "1/y").is_err());
        assert!(EquationFamily::parse(2, "1/(x + y)").is_ok());
        assert!(EquationFamily::parse(1, "1").is_err());
    }

    #[test]
    fn decoupled_family() {
        let m = build_lnve_airy_family(2, &RatFun::zero());
        let a1 = airy_matrix();
        assert_eq!(m, Matrix::block_diag(&[sym_power_matrix(&a1, 2), a1]));
    }

    #[test]
    fn p3_first_variational() {
        let chain = build_p3_chain(&P3Spec::symbolic()).unwrap();
        let a1 =
            RatFunMatrix::parse(&[&["-2 - 2*mu/x", "4/x"], &["-mu - mu^2/x", "2 + 2*mu/x"]], "x", &["mu"]).unwrap();
        assert_eq!(chain.a[0], a1);
        let t1 = RatFunMatrix::parse(&[&["0", "1/mu + 1/x"], &["4*mu", "0"]], "x", &["mu"]).unwrap();
        assert_eq!(chain.a_tilde[0], t1);
        assert!(chain.a_tilde[0].trace().is_zero());
        let s =
            cyclic_vector_scalarize(&t1, &[RatFun::zero(), RatFun::zero()], &[RatFun::zero(), RatFun::one()]).unwrap();
        assert_eq!(s.op, DiffOp::parse("D^2 - 4 - 4*mu/x", "x", &["mu"]).unwrap());
    }

    #[test]
    fn p3_second_variational() {
        let chain = build_p3_chain(&P3Spec::symbolic()).unwrap();
        let (cinf, c0) = split_infinity_zero(&chain.a_tilde[1]).unwrap();
        let mu = Coeff::param(Param::new("mu"));
        let m2 = cinf.sub(&c0.scale(&mu.inverse().unwrap()));
        let m1_expect = mu_matrix(&[
            &["0", "1", "0", "0", "0"],
            &["0", "0", "2", "0", "0"],
            &["0", "0", "0", "0", "0"],
            &["-4*mu^2", "2*mu", "0", "0", "1"],
            &["0", "4*mu^2", "-2*mu", "0", "0"],
        ]);
        let m2_expect = mu_matrix(&[
            &["0", "0", "0", "0", "0"],
            &["8*mu", "0", "0", "0", "0"],
            &["0", "4*mu", "0", "0", "0"],
            &["0", "-1", "0", "0", "0"],
            &["-12*mu^2", "0", "1", "4*mu", "0"],
        ]);
        assert_eq!(c0, m1_expect);
        assert_eq!(m2, m2_expect);
        let m3 = c0.bracket(&m2).scale(&(&Coeff::from(8) * &mu).inverse().unwrap());
        assert_eq!(c0.bracket(&m3), c0.neg());
        assert_eq!(m2.bracket(&m3), m2);
    }

    #[test]
    fn p3_third_variational_shape() {
        let chain = build_p3_chain(&P3Spec::symbolic()).unwrap();
        assert_eq!(chain.a[2].rows(), 9);
        let (_, c0) = split_infinity_zero(&chain.a_tilde[2]).unwrap();
        let bl = mu_matrix(&[&["-8*mu^3", "4/3*mu^2", "0", "0"], &["-32*mu^4", "8*mu^3", "-4/3*mu^2", "0"]]);
        assert_eq!(c0.submatrix(7, 0, 2, 4), bl);
    }

    #[test]
    fn p3_specialized_and_singular() {
        let chain = build_p3_chain(&P3Spec::at(Rat::new(1.into(), 2.into()))).unwrap();
        assert!(chain.a_tilde[2].entries().iter().all(|e| e.is_rational()));
        assert!(matches!(build_p3_chain(&P3Spec::at(Rat::from_integer(0.into()))), Err(Error::Q1Singular)));
        let bad = RatFunMatrix::parse(&[&["1/x^2"]], "x", &[]).unwrap();
        assert!(split_infinity_zero(&bad).is_err());
    }
}
