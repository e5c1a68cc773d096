use crate::exactalg::parse::assignment;
use crate::exactalg::{fmt_rat, Coeff, Field, Param, Rat, RatFun};
use crate::galois_screen::certify_sl2;
use crate::jets::{build_lnve_airy_family, build_p3_chain, prolong, split_infinity_zero, EquationFamily, P3Spec};
use crate::liealg::{
    adjoint_action_matrix, associated_lie_algebra, classify_lnve_lie_algebra, lie_closure, ConstMatrix,
};
use crate::linops::{scalar_form_rhs, sym_power_operator, DiffOp, Matrix, RatFunMatrix};
use crate::ratsolve::{
    denominator_bound, indicial_polynomial, rational_solutions, system_rational_solutions, SingularPoint,
    SystemSolutionSpace,
};
use crate::{Error, Result};

use super::certificate::{
    build, closure_hash, const_rows, pole_shortcut, rows_of, Certificate, Evidence, MatrixSource, OperatorSource, Role,
    Term, OBSTRUCTION_COMMAND,
};

const MU: &str = "mu";

/// Principal linearized subsystem of the prolonged family along `y = 0`.
pub fn family_pipeline(fam: &EquationFamily) -> Result<RatFunMatrix> {
    let f = fam.vector_field()?;
    let curve = vec![RatFun::x(), RatFun::zero(), RatFun::zero()];
    let j = prolong(&f, fam.n())?.restrict_to_curve(&f, &curve)?;
    Ok(j.normal_restrict(0)?.linearize(fam.n())?.principal_subsystem().matrix().clone())
}

fn unit(n: usize, i: usize, j: usize) -> ConstMatrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = Coeff::one();
    m
}

fn ratfun_vec(v: &[RatFun], var: &str) -> Vec<String> {
    v.iter().map(|f| f.render(var)).collect()
}

/// `Id − Σ fᵢ·Fᵢ`.
fn gauge_of(size: usize, f: &[RatFun], basis: &[ConstMatrix]) -> RatFunMatrix {
    f.iter().zip(basis).fold(RatFunMatrix::identity(size), |p, (fi, bi)| p.sub(&bi.to_ratfun().scale(fi)))
}

/// `P·A·P⁻¹ + P′·P⁻¹`, the system satisfied by `P·Y` when `Y′ = A·Y`.
fn push_forward(p: &RatFunMatrix, a: &RatFunMatrix) -> Result<RatFunMatrix> {
    let inv = p.inverse().ok_or(Error::NotGauge)?;
    Ok(p.mul(a).mul(&inv).add(&p.derivative().mul(&inv)))
}

/// Reduction data for the Airy family at order `n`.
#[derive(Clone, Debug)]
pub struct Obstruction {
    pub n: usize,
    pub system: RatFunMatrix,
    /// `X + t·Y`, the block-diagonal part.
    pub diag: RatFunMatrix,
    /// `F₀ = E_{n+2,0}` and `F_{i+1} = −[X, Fᵢ]/(i+1)`.
    pub basis: Vec<ConstMatrix>,
    pub psi: RatFunMatrix,
    pub b: Vec<RatFun>,
    pub solutions: SystemSolutionSpace,
    /// `P = Id − Σ fᵢ·Fᵢ` reducing `system` to `diag`, when one exists.
    pub gauge: Option<RatFunMatrix>,
}

impl Obstruction {
    pub fn is_solvable(&self) -> bool {
        self.gauge.is_some()
    }

    /// Dimension of the Galois group of the linearized system.
    pub fn dimension(&self) -> usize {
        if self.is_solvable() {
            3
        } else {
            self.n + 5
        }
    }
}

fn split_constant(diag: &RatFunMatrix) -> Result<(ConstMatrix, ConstMatrix)> {
    let dec = associated_lie_algebra(diag)?;
    let t = RatFun::x();
    match (dec.functions.as_slice(), dec.matrices.as_slice()) {
        ([f0, f1], [x, y]) if f0.is_one() && *f1 == t => Ok((x.clone(), y.clone())),
        _ => Err(Error::UnexpectedStructure("diagonal part is not X + tY".into())),
    }
}

/// Builds `F′ = Ψ·F + b` for the order-`n` family with coupling `p`, solves it
/// and, when solvable, checks the reduction to the diagonal part.
pub fn reduced_form_obstruction(n: usize, p: &RatFun) -> Result<Obstruction> {
    if n < 2 {
        return Err(Error::Input(format!("n = {n} must be at least 2")));
    }
    let system = build_lnve_airy_family(n, p);
    let diag = build_lnve_airy_family(n, &RatFun::zero());
    let (x, _) = split_constant(&diag)?;
    let mut basis = vec![unit(n + 3, n + 2, 0)];
    for i in 0..=n {
        let next = x.bracket(&basis[i]).scale(&Coeff::from(-1).quotient(&Coeff::from(i as i64 + 1)));
        basis.push(next);
    }
    let psi = adjoint_action_matrix(&diag, &basis)?;
    let mut b = vec![RatFun::zero(); n + 2];
    b[0] = p.clone();
    let solutions = system_rational_solutions(&psi, &b)?;
    let gauge = match &solutions.particular {
        Some(f) => {
            let g = gauge_of(n + 3, f, &basis);
            if push_forward(&g, &system)? != diag {
                return Err(Error::Check("obstruction solution does not reduce the system".into()));
            }
            Some(g)
        }
        None => None,
    };
    Ok(Obstruction { n, system, diag, basis, psi, b, solutions, gauge })
}

/// Galois group dimension of the order-`n` linearized system with its
/// classification: `sl2` when the obstruction is solvable, else the
/// semidirect product with `Sym^{n+1}`.
pub fn lnve_group_dimension(n: usize, p: &RatFun) -> Result<(usize, String)> {
    let ob = reduced_form_obstruction(n, p)?;
    let (x, y) = split_constant(&ob.diag)?;
    let mut gens = vec![x, y];
    if !ob.is_solvable() {
        gens.push(ob.basis[0].clone());
    }
    let class = classify_lnve_lie_algebra(&lie_closure(&gens)?, n)?;
    if class.dim != ob.dimension() {
        return Err(Error::Check(format!("closure has dimension {}, expected {}", class.dim, ob.dimension())));
    }
    Ok((class.dim, class.tag()))
}

fn airy_op() -> DiffOp {
    DiffOp::new(vec![-RatFun::x(), RatFun::zero(), RatFun::one()])
}

fn screen_record(label: &str, var: &str, l: &DiffOp) -> Result<Evidence> {
    let v = certify_sl2(l)?;
    Ok(Evidence::Screen {
        label: label.into(),
        role: Role::FirstVariational,
        var: var.into(),
        operator: l.render(var),
        tag: v.tag,
        witness: v.witness.map(|w| w.render(var)),
        reasons: v.reasons,
    })
}

fn rational_solutions_record(label: &str, var: &str, l: &DiffOp, g: &RatFun, dim: usize) -> Result<(Evidence, bool)> {
    let s = rational_solutions(l, g)?;
    let shift = indicial_polynomial(l, &SingularPoint::Infinity)?.shift;
    let empty = s.is_empty();
    let record = Evidence::RationalSolutions {
        label: label.into(),
        role: Role::DimensionBound,
        var: var.into(),
        operator: l.render(var),
        rhs: g.render(var),
        denominator: denominator_bound(l, g)?.render(var),
        degree_bound: s.bounds.degree_bound,
        infinity_shift: shift,
        unknowns: s.bounds.unknowns,
        equations: s.bounds.equations,
        particular: s.particular.map(|y| y.render(var)),
        homogeneous: ratfun_vec(&s.homogeneous, var),
        dimension_if_empty: Some(dim),
    };
    Ok((record, empty))
}

fn system_record(
    label: &str,
    var: &str,
    psi: &RatFunMatrix,
    b: &[RatFun],
    s: &SystemSolutionSpace,
    dim: usize,
) -> Evidence {
    Evidence::SystemSolutions {
        label: label.into(),
        role: Role::DimensionBound,
        var: var.into(),
        matrix: rows_of(psi, var),
        rhs: ratfun_vec(b, var),
        scalar_operator: s.operator.render(var),
        scalar_rhs: s.rhs.render(var),
        particular: s.particular.as_ref().map(|f| ratfun_vec(f, var)),
        dimension_if_empty: Some(dim),
    }
}

fn gauge_record(
    label: &str,
    var: &str,
    gauge: &RatFunMatrix,
    system: &RatFunMatrix,
    reduced: &RatFunMatrix,
) -> Evidence {
    Evidence::Gauge {
        label: label.into(),
        var: var.into(),
        gauge: rows_of(gauge, var),
        system: rows_of(system, var),
        reduced: rows_of(reduced, var),
    }
}

/// Evidence for the Airy family `y″ = ty + yⁿP`; shared by the family
/// criterion, the P₂ showcase and the obstruction certificate.
fn airy_family_evidence(fam: &EquationFamily) -> Result<(Vec<Evidence>, Obstruction)> {
    let n = fam.n();
    let p = fam.p()?;
    let mut ev = vec![
        build::matrix("lnve", "t", &[], MatrixSource::Lnve { n, p: p.render("t") }, &build_lnve_airy_family(n, &p)),
        screen_record("first-variational", "t", &airy_op())?,
    ];
    let (orders, applies) = pole_shortcut(n, &p);
    ev.push(Evidence::PoleShortcut {
        label: "pole-shortcut".into(),
        role: if applies { Role::DimensionBound } else { Role::Supporting },
        var: "t".into(),
        n,
        p: p.render("t"),
        pole_orders: orders,
        applies,
    });
    let ob = reduced_form_obstruction(n, &p)?;
    if !applies {
        let l = sym_power_operator(&airy_op(), n + 1)?;
        ev.push(build::operator(
            "L",
            "t",
            &[],
            OperatorSource::SymPower { base: airy_op().render("t"), power: n + 1 },
            &l,
        ));
        let (record, empty) = rational_solutions_record("scalar-obstruction", "t", &l, &p, n + 5)?;
        ev.push(record);
        ev.push(system_record("system-obstruction", "t", &ob.psi, &ob.b, &ob.solutions, n + 5));
        if empty == ob.is_solvable() {
            return Err(Error::Check("scalar and system routes disagree".into()));
        }
    } else if ob.is_solvable() {
        return Err(Error::Check("pole shortcut applies but the obstruction is solvable".into()));
    }
    if let Some(g) = &ob.gauge {
        ev.push(gauge_record("reduction", "t", g, &ob.system, &ob.diag));
    }
    Ok((ev, ob))
}

fn family_args(fam: &EquationFamily) -> Vec<(&'static str, String)> {
    vec![("n", fam.n().to_string()), ("P", fam.p_text().to_string())]
}

/// Irreducibility criterion for `y″ = xy + yⁿP(x, y)`: the pole shortcut
/// when it applies, else solvability of `L_{n+1}(f) = p` with
/// `L_{n+1} = sym^{n+1}(∂² − t)`.
pub fn criterion_airy_family(fam: &EquationFamily) -> Result<Certificate> {
    let (ev, _) = airy_family_evidence(fam)?;
    Ok(Certificate::new("family", &family_args(fam), ev))
}

/// Certificate for the reduced-form obstruction itself; reports
/// OBSTRUCTION-SOLVABLE when the reduction exists.
pub fn obstruction_certificate(fam: &EquationFamily) -> Result<Certificate> {
    let (mut ev, ob) = airy_family_evidence(fam)?;
    if !ev.iter().any(|e| matches!(e, Evidence::SystemSolutions { .. })) {
        ev.push(system_record("system-obstruction", "t", &ob.psi, &ob.b, &ob.solutions, fam.n() + 5));
    }
    Ok(Certificate::new(OBSTRUCTION_COMMAND, &family_args(fam), ev))
}

/// Painlevé II at `a = 0`, `y″ = xy + 2y³`: the Lie-algebraic route on the
/// third variational system together with the scalar route `L₄(f) = 12`.
pub fn check_p2() -> Result<Certificate> {
    let fam = EquationFamily::parse(3, "2")?;
    let (mut ev, ob) = airy_family_evidence(&fam)?;
    let a = family_pipeline(&fam)?;
    if a != ob.system {
        return Err(Error::Check("prolonged system differs from the family matrix".into()));
    }
    ev.insert(1, build::matrix("pnve3", "t", &[], MatrixSource::Family { n: 3, p: "2".into() }, &a));
    let dec = associated_lie_algebra(&a)?;
    ev.push(Evidence::Decomposition {
        label: "pnve3-decomposition".into(),
        var: "t".into(),
        params: vec![],
        matrix: rows_of(&a, "t"),
        functions: ratfun_vec(&dec.functions, "t"),
        matrices: dec.matrices.iter().map(|m| const_rows(m, "x")).collect(),
    });
    let closure = lie_closure(&dec.matrices)?;
    let class = classify_lnve_lie_algebra(&closure, 3)?;
    let (x, y) = split_constant(&ob.diag)?;
    let h = x.bracket(&y);
    let members: Vec<_> = [x, y, h].into_iter().chain(ob.basis.iter().cloned()).collect();
    if members.iter().any(|m| !closure.contains(m)) {
        return Err(Error::Check("sl2 or ideal element outside Lie(A)".into()));
    }
    ev.push(Evidence::LieClosure {
        label: "pnve3-lie-algebra".into(),
        role: Role::Supporting,
        params: vec![],
        generators: dec.matrices.iter().map(|m| const_rows(m, "x")).collect(),
        dimension: closure.dim(),
        n: Some(3),
        classification: Some(class.tag()),
        members: members.iter().map(|m| const_rows(m, "x")).collect(),
        basis_sha256: closure_hash(&closure.basis),
    });
    ev.push(Evidence::AdjointAction {
        label: "psi".into(),
        var: "t".into(),
        params: vec![],
        diag: rows_of(&ob.diag, "t"),
        basis: ob.basis.iter().map(|m| const_rows(m, "t")).collect(),
        psi: rows_of(&ob.psi, "t"),
    });
    Ok(Certificate::new("p2", &[], ev))
}

/// Symbolic identities of the P₃ chain over ℚ(μ), shared by every
/// specialization.
struct P3Symbolic {
    evidence: Vec<Evidence>,
    a3: RatFunMatrix,
    n_basis: Vec<ConstMatrix>,
    psi: RatFunMatrix,
    b: Vec<RatFun>,
    l: DiffOp,
    g: RatFun,
}

fn mu_coeff() -> Coeff {
    Coeff::param(Param::new(MU))
}

/// `L₂ = ∂² − 4 − 4μ/x`, the scalar form of the first variational system.
pub fn p3_l2(mu: &Coeff) -> DiffOp {
    let c = RatFun::constant(mu.clone());
    let a0 = &RatFun::from(-4) - &(&(&RatFun::from(4) * &c) / &RatFun::x());
    DiffOp::new(vec![a0, RatFun::zero(), RatFun::one()])
}

/// Ideal basis `N₁..N₅` of `Lie(Ã₃)`, supported in rows 7–8, columns 0–3.
pub fn p3_ideal_basis() -> Vec<ConstMatrix> {
    let e = |i, j| unit(9, i, j);
    vec![e(8, 0), e(7, 0).sub(&e(8, 1)), e(7, 1).sub(&e(8, 2)), e(7, 2).sub(&e(8, 3)), e(7, 3)]
}

fn combination(label: &str, terms: &[(RatFun, &RatFunMatrix)], result: &RatFunMatrix) -> Result<Evidence> {
    let sum = terms.iter().fold(RatFunMatrix::zeros(result.rows(), result.cols()), |acc, (c, m)| acc.add(&m.scale(c)));
    if &sum != result {
        return Err(Error::Check(format!("{label}: linear combination fails")));
    }
    Ok(Evidence::Combination {
        label: label.into(),
        var: "x".into(),
        params: vec![MU.into()],
        terms: terms.iter().map(|(c, m)| Term { coeff: c.render("x"), matrix: rows_of(m, "x") }).collect(),
        result: rows_of(result, "x"),
    })
}

fn expect_bracket(label: &str, a: &ConstMatrix, b: &ConstMatrix, want: &ConstMatrix) -> Result<Evidence> {
    if &a.bracket(b) != want {
        return Err(Error::Check(format!("{label}: bracket identity fails")));
    }
    Ok(build::bracket(label, &[MU], a, b))
}

fn adjoint_record(label: &str, diag: &RatFunMatrix, basis: &[ConstMatrix]) -> Result<(Evidence, RatFunMatrix)> {
    let psi = adjoint_action_matrix(diag, basis)?;
    let record = Evidence::AdjointAction {
        label: label.into(),
        var: "x".into(),
        params: vec![MU.into()],
        diag: rows_of(diag, "x"),
        basis: basis.iter().map(|m| const_rows(m, "x")).collect(),
        psi: rows_of(&psi, "x"),
    };
    Ok((record, psi))
}

fn p3_symbolic() -> Result<P3Symbolic> {
    let chain = build_p3_chain(&P3Spec::symbolic())?;
    let mu = mu_coeff();
    let inv_mu = mu.inverse().ok_or(Error::DivisionByZero)?;
    let mu_f = RatFun::constant(mu.clone());
    let inv_x = &RatFun::one() / &RatFun::x();
    let one = RatFun::one();
    let mut ev = Vec::new();
    for (k, at) in chain.a_tilde.iter().enumerate() {
        let label = format!("A{}~", k + 1);
        ev.push(build::matrix(&label, "x", &[MU], MatrixSource::P3 { mu: MU.into(), order: k + 1 }, at));
        let (cinf, c0) = split_infinity_zero(at)?;
        ev.push(combination(
            &format!("{label} = Cinf + C0/x"),
            &[(one.clone(), &cinf.to_ratfun()), (inv_x.clone(), &c0.to_ratfun())],
            at,
        )?);
    }
    let a1 = &chain.a_tilde[0];
    if !a1.trace().is_zero() {
        return Err(Error::Check("first variational system is not trace free".into()));
    }
    ev.push(Evidence::Trace {
        label: "trace A1~".into(),
        var: "x".into(),
        params: vec![MU.into()],
        matrix: rows_of(a1, "x"),
        trace: "0".into(),
    });

    // Second order: the sl2 triple of Ã₂.
    let (cinf, c0) = split_infinity_zero(&chain.a_tilde[1])?;
    let (m1, m2) = (c0.clone(), cinf.sub(&c0.scale(&inv_mu)));
    ev.push(combination(
        "A2~: M2 = Cinf - C0/mu",
        &[(one.clone(), &cinf.to_ratfun()), (RatFun::constant(-&inv_mu), &c0.to_ratfun())],
        &m2.to_ratfun(),
    )?);
    let k = m1.bracket(&m2);
    ev.push(build::bracket("A2~: [M1, M2]", &[MU], &m1, &m2));
    let m3 = k.scale(&(&Coeff::from(8) * &mu).inverse().ok_or(Error::DivisionByZero)?);
    ev.push(combination(
        "A2~: M3 = [M1, M2]/(8*mu)",
        &[(RatFun::constant((&Coeff::from(8) * &mu).inverse().unwrap()), &k.to_ratfun())],
        &m3.to_ratfun(),
    )?);
    ev.push(expect_bracket("A2~: [M1, M3] = -M1", &m1, &m3, &m1.neg())?);
    ev.push(expect_bracket("A2~: [M2, M3] = M2", &m2, &m3, &m2)?);

    // Third order.
    let a3 = chain.a_tilde[2].clone();
    let (cinf, c0) = split_infinity_zero(&a3)?;
    let m1 = c0.clone();
    let m2 = cinf.sub(&c0.scale(&inv_mu)).scale(&(&Coeff::from(4) * &mu).inverse().unwrap());
    let m3 = m1.bracket(&m2);
    let four_mu = &RatFun::from(4) * &mu_f;
    let coeff1 = &RatFun::constant(inv_mu.clone()) + &inv_x;
    ev.push(combination(
        "A3~ = (1/mu + 1/x)*M1 + 4*mu*M2",
        &[(coeff1.clone(), &m1.to_ratfun()), (four_mu.clone(), &m2.to_ratfun())],
        &a3,
    )?);
    ev.push(build::bracket("A3~: M3 = [M1, M2]", &[MU], &m1, &m2));
    let n_basis = p3_ideal_basis();
    let closure = lie_closure(&[m1.clone(), m2.clone()])?;
    let members: Vec<ConstMatrix> = std::iter::once(m3.clone()).chain(n_basis.iter().cloned()).collect();
    if closure.dim() != 8 || members.iter().any(|m| !closure.contains(m)) {
        return Err(Error::Check(format!("Lie(A3~) has dimension {}, expected 8 = span(M, N)", closure.dim())));
    }
    ev.push(Evidence::LieClosure {
        label: "Lie(A3~)".into(),
        role: Role::Supporting,
        params: vec![MU.into()],
        generators: vec![const_rows(&m1, "x"), const_rows(&m2, "x")],
        dimension: closure.dim(),
        n: None,
        classification: None,
        members: members.iter().map(|m| const_rows(m, "x")).collect(),
        basis_sha256: closure_hash(&closure.basis),
    });

    let (r1, psi1) = adjoint_record("Psi1", &m1.to_ratfun(), &n_basis)?;
    let (r2, psi2) = adjoint_record("Psi2", &m2.to_ratfun(), &n_basis)?;
    let (r3, psi3) = adjoint_record("Psi3", &m3.to_ratfun(), &n_basis)?;
    ev.extend([r1, r2, r3]);
    let (psi1c, psi2c, psi3c) = (const_of(&psi1)?, const_of(&psi2)?, const_of(&psi3)?);
    ev.push(expect_bracket("Psi3 = [Psi1, Psi2]", &psi1c, &psi2c, &psi3c)?);
    let (rpsi, psi) = adjoint_record("Psi", &a3, &n_basis)?;
    ev.push(rpsi);
    ev.push(combination("Psi = (1/mu + 1/x)*Psi1 + 4*mu*Psi2", &[(coeff1, &psi1), (four_mu, &psi2)], &psi)?);

    // b: coordinates of the lower-left block of Ã₃ on N.
    let block = RatFunMatrix::from_fn(9, 9, |i, j| if i >= 7 && j < 4 { a3[(i, j)].clone() } else { RatFun::zero() });
    let flat = RatFunMatrix::from_fn(81, 5, |r, c| n_basis[c].to_ratfun().entries()[r].clone());
    let b = flat.solve(&block.flatten()).ok_or(Error::NotInvariantSubspace)?;
    let n_rf: Vec<RatFunMatrix> = n_basis.iter().map(|m| m.to_ratfun()).collect();
    let terms: Vec<(RatFun, &RatFunMatrix)> = b.iter().cloned().zip(n_rf.iter()).collect();
    ev.push(combination("b: lower-left block of A3~ on N", &terms, &block)?);

    // Scalar route along the first coordinate.
    let mut e1 = vec![RatFun::zero(); 5];
    e1[0] = RatFun::one();
    let l2 = p3_l2(&mu);
    let l = sym_power_operator(&l2, 4)?;
    let g = scalar_form_rhs(&psi, &b, &e1, &l)?
        .ok_or_else(|| Error::Check("sym^4(L2) does not annihilate the first coordinate".into()))?;
    ev.push(build::operator(
        "L = sym^4(L2)",
        "x",
        &[MU],
        OperatorSource::SymPower { base: l2.render("x"), power: 4 },
        &l,
    ));
    ev.push(Evidence::Scalarization {
        label: "L(f1) = g".into(),
        var: "x".into(),
        params: vec![MU.into()],
        matrix: rows_of(&psi, "x"),
        rhs: ratfun_vec(&b, "x"),
        covector: ratfun_vec(&e1, "x"),
        operator: l.render("x"),
        scalar_rhs: g.render("x"),
    });
    Ok(P3Symbolic { evidence: ev, a3, n_basis, psi, b, l, g })
}

fn const_of(m: &RatFunMatrix) -> Result<ConstMatrix> {
    m.to_coeff().ok_or_else(|| Error::UnexpectedStructure("expected a constant matrix".into()))
}

fn p3_specialized(sym: &P3Symbolic, mu: &Rat) -> Result<Vec<Evidence>> {
    let tag = fmt_rat(mu);
    let at = assignment(&[(MU, mu.clone())]);
    let a3 = sym.a3.specialize(&at)?;
    let direct = build_p3_chain(&P3Spec::at(mu.clone()))?.a_tilde[2].clone();
    if direct != a3 {
        return Err(Error::Check("specialized chain differs from the symbolic one".into()));
    }
    let psi = sym.psi.specialize(&at)?;
    let b = sym.b.iter().map(|x| x.specialize(&at)).collect::<Result<Vec<_>>>()?;
    let l = sym.l.specialize(&at)?;
    let g = sym.g.specialize(&at)?;
    let label = |s: &str| format!("{s} @ mu={tag}");

    let mut ev = vec![
        build::matrix(&label("A3~"), "x", &[], MatrixSource::P3 { mu: tag.clone(), order: 3 }, &a3),
        screen_record(&label("first-variational"), "x", &p3_l2(&Coeff::Rat(mu.clone())))?,
    ];
    let sys = system_rational_solutions(&psi, &b)?;
    ev.push(system_record(&label("system-obstruction"), "x", &psi, &b, &sys, 8));
    let ind = indicial_polynomial(&l, &SingularPoint::at(Rat::from_integer(0.into())))?;
    ev.push(Evidence::Exponents {
        label: label("exponents of L at 0"),
        var: "x".into(),
        operator: l.render("x"),
        point: "0".into(),
        indicial: ind.poly.render("e"),
        integer_roots: ind.integer_roots.iter().map(|r| r.to_string()).collect(),
    });
    let (record, empty) = rational_solutions_record(&label("scalar-obstruction"), "x", &l, &g, 8)?;
    ev.push(record);
    if empty != sys.is_empty() {
        return Err(Error::Check(format!("scalar and system routes disagree at mu = {tag}")));
    }
    if let Some(f) = &sys.particular {
        let p = gauge_of(9, f, &sym.n_basis);
        let reduced = push_forward(&p, &a3)?;
        ev.push(gauge_record(&label("reduction"), "x", &p, &a3, &reduced));
    }
    Ok(ev)
}

/// P₃ with `(α, β, γ, δ) = (2μ−1, −2μ+1, 1, −1)`: symbolic identities over
/// ℚ(μ), then the obstruction at each requested `μ ∉ ℤ`.
pub fn check_p3(mus: &[Rat]) -> Result<Certificate> {
    if mus.is_empty() {
        return Err(Error::Input("at least one value of mu is required".into()));
    }
    for mu in mus {
        if mu.is_integer() {
            let v = certify_sl2(&p3_l2(&Coeff::Rat(mu.clone())))?;
            let witness = match v.witness {
                Some(w) => w.render("x"),
                None => v.reasons.join("; "),
            };
            return Err(Error::IntegerMu { mu: fmt_rat(mu), witness });
        }
    }
    let sym = p3_symbolic()?;
    let mut ev = sym.evidence.clone();
    for mu in mus {
        ev.extend(p3_specialized(&sym, mu)?);
    }
    let list = mus.iter().map(fmt_rat).collect::<Vec<_>>().join(",");
    Ok(Certificate::new("p3", &[("mu", list)], ev))
}
