use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exactalg::parse::parse_ratfun;
use crate::exactalg::{parse_rat, RatFun};
use crate::galois_screen::{certify_sl2, ScreenTag};
use crate::jets::{build_lnve_airy_family, build_p3_chain, EquationFamily, P3Spec};
use crate::liealg::{
    adjoint_action_matrix, associated_lie_algebra, classify_lnve_lie_algebra, const_matrix, lie_closure, ConstMatrix,
};
use crate::linops::{scalar_form_rhs, sym_power_operator, DiffOp, RatFunMatrix};
use crate::ratsolve::{
    denominator_bound, indicial_polynomial, rational_solutions, system_rational_solutions, SingularPoint,
};
use crate::{Error, Result};

/// Row-major matrix of expressions in the input grammar.
pub type Rows = Vec<Vec<String>>;

pub fn rows_of(m: &RatFunMatrix, var: &str) -> Rows {
    m.render_rows(var)
}

pub fn const_rows(m: &ConstMatrix, var: &str) -> Rows {
    m.to_ratfun().render_rows(var)
}

pub fn parse_rows(rows: &Rows, var: &str, params: &[String]) -> Result<RatFunMatrix> {
    let ps: Vec<&str> = params.iter().map(String::as_str).collect();
    let refs: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
    let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
    RatFunMatrix::parse(&slices, var, &ps)
}

fn parse_const_rows(rows: &Rows, var: &str, params: &[String]) -> Result<ConstMatrix> {
    const_matrix(&parse_rows(rows, var, params)?)
}

fn parse_rf(s: &str, var: &str, params: &[String]) -> Result<RatFun> {
    let ps: Vec<&str> = params.iter().map(String::as_str).collect();
    parse_ratfun(s, var, &ps)
}

fn parse_op(s: &str, var: &str, params: &[String]) -> Result<DiffOp> {
    let ps: Vec<&str> = params.iter().map(String::as_str).collect();
    DiffOp::parse(s, var, &ps)
}

/// Hex SHA-256 of the canonical JSON form of `value`.
pub fn content_hash<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable");
    hex::encode(Sha256::digest(&bytes))
}

/// Which hypothesis of the irreducibility theorem a record supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// The first variational equation is not virtually solvable.
    FirstVariational,
    /// The Galois group of some higher variational equation has dimension > 5.
    DimensionBound,
    Supporting,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MatrixSource {
    /// `build_lnve_airy_family(n, p)` in the variable `t`.
    Lnve {
        n: usize,
        p: String,
    },
    /// Principal subsystem of the prolonged family `y″ = xy + yⁿP`.
    Family {
        n: usize,
        #[serde(rename = "P")]
        p: String,
    },
    /// Reduced P₃ matrix `Ã_order` at symbolic or specialized `mu`.
    P3 {
        mu: String,
        order: usize,
    },
    Given,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum OperatorSource {
    SymPower { base: String, power: usize },
    Given,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: String,
    pub matrix: Rows,
}

/// One independently re-checkable fact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    Matrix {
        label: String,
        var: String,
        params: Vec<String>,
        source: MatrixSource,
        rows: Rows,
        sha256: String,
    },
    Operator {
        label: String,
        var: String,
        params: Vec<String>,
        source: OperatorSource,
        expr: String,
        sha256: String,
    },
    Screen {
        label: String,
        role: Role,
        var: String,
        operator: String,
        tag: ScreenTag,
        witness: Option<String>,
        reasons: Vec<String>,
    },
    Trace {
        label: String,
        var: String,
        params: Vec<String>,
        matrix: Rows,
        trace: String,
    },
    /// `matrix = Σ functions[i]·matrices[i]` with independent functions.
    Decomposition {
        label: String,
        var: String,
        params: Vec<String>,
        matrix: Rows,
        functions: Vec<String>,
        matrices: Vec<Rows>,
    },
    LieClosure {
        label: String,
        role: Role,
        params: Vec<String>,
        generators: Vec<Rows>,
        dimension: usize,
        /// Block size parameter for the family classification.
        n: Option<usize>,
        classification: Option<String>,
        /// Matrices asserted to lie in the closure.
        members: Vec<Rows>,
        basis_sha256: String,
    },
    Bracket {
        label: String,
        params: Vec<String>,
        left: Rows,
        right: Rows,
        result: Rows,
    },
    Combination {
        label: String,
        var: String,
        params: Vec<String>,
        terms: Vec<Term>,
        result: Rows,
    },
    AdjointAction {
        label: String,
        var: String,
        params: Vec<String>,
        diag: Rows,
        basis: Vec<Rows>,
        psi: Rows,
    },
    Exponents {
        label: String,
        var: String,
        operator: String,
        point: String,
        indicial: String,
        integer_roots: Vec<String>,
    },
    PoleShortcut {
        label: String,
        role: Role,
        var: String,
        n: usize,
        p: String,
        pole_orders: Vec<u32>,
        applies: bool,
    },
    RationalSolutions {
        label: String,
        role: Role,
        var: String,
        operator: String,
        rhs: String,
        denominator: String,
        degree_bound: i64,
        /// `deg L(q) = deg q + infinity_shift` away from the exponents at infinity.
        infinity_shift: i64,
        unknowns: usize,
        equations: usize,
        particular: Option<String>,
        homogeneous: Vec<String>,
        dimension_if_empty: Option<usize>,
    },
    SystemSolutions {
        label: String,
        role: Role,
        var: String,
        matrix: Rows,
        rhs: Vec<String>,
        scalar_operator: String,
        scalar_rhs: String,
        particular: Option<Vec<String>>,
        dimension_if_empty: Option<usize>,
    },
    /// `operator(v·F) = scalar_rhs` for every solution of `F′ = matrix·F + rhs`.
    Scalarization {
        label: String,
        var: String,
        params: Vec<String>,
        matrix: Rows,
        rhs: Vec<String>,
        covector: Vec<String>,
        operator: String,
        scalar_rhs: String,
    },
    /// `P·A·P⁻¹ + P′·P⁻¹ = reduced`.
    Gauge {
        label: String,
        var: String,
        gauge: Rows,
        system: Rows,
        reduced: Rows,
    },
}

impl Evidence {
    pub fn label(&self) -> &str {
        match self {
            Evidence::Matrix { label, .. }
            | Evidence::Operator { label, .. }
            | Evidence::Screen { label, .. }
            | Evidence::Trace { label, .. }
            | Evidence::Decomposition { label, .. }
            | Evidence::LieClosure { label, .. }
            | Evidence::Bracket { label, .. }
            | Evidence::Combination { label, .. }
            | Evidence::AdjointAction { label, .. }
            | Evidence::Exponents { label, .. }
            | Evidence::PoleShortcut { label, .. }
            | Evidence::RationalSolutions { label, .. }
            | Evidence::SystemSolutions { label, .. }
            | Evidence::Scalarization { label, .. }
            | Evidence::Gauge { label, .. } => label,
        }
    }

    pub fn role(&self) -> Role {
        match self {
            Evidence::Screen { role, .. }
            | Evidence::LieClosure { role, .. }
            | Evidence::PoleShortcut { role, .. }
            | Evidence::RationalSolutions { role, .. }
            | Evidence::SystemSolutions { role, .. } => *role,
            _ => Role::Supporting,
        }
    }

    /// For dimension records: `Some(true)` when the record proves a
    /// dimension above 5, `Some(false)` when the obstruction is solvable.
    pub fn dimension_outcome(&self) -> Option<bool> {
        match self {
            Evidence::PoleShortcut { applies, .. } => Some(*applies),
            Evidence::RationalSolutions { particular, dimension_if_empty, .. } => {
                Some(particular.is_none() && dimension_if_empty.is_some_and(|d| d > 5))
            }
            Evidence::SystemSolutions { particular, dimension_if_empty, .. } => {
                Some(particular.is_none() && dimension_if_empty.is_some_and(|d| d > 5))
            }
            _ => None,
        }
    }

    fn is_solvable_obstruction(&self) -> bool {
        matches!(
            self,
            Evidence::RationalSolutions { particular: Some(_), .. }
                | Evidence::SystemSolutions { particular: Some(_), .. }
        )
    }

    /// Re-runs the computation behind the record and compares.
    pub fn replay(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Check(format!("{}: {what}", self.label())));
        match self {
            Evidence::Matrix { var, params, source, rows, sha256, .. } => {
                if &content_hash(rows) != sha256 {
                    return fail("hash mismatch");
                }
                let rebuilt = match source {
                    MatrixSource::Given => return Ok(()),
                    MatrixSource::Lnve { n, p } => build_lnve_airy_family(*n, &parse_rf(p, var, params)?),
                    MatrixSource::Family { n, p } => super::checks::family_pipeline(&EquationFamily::parse(*n, p)?)?,
                    MatrixSource::P3 { mu, order } => {
                        let spec = if params.iter().any(|p| p == mu) {
                            P3Spec::symbolic()
                        } else {
                            P3Spec::at(parse_rat(mu)?)
                        };
                        let chain = build_p3_chain(&spec)?;
                        match order {
                            1..=3 => chain.a_tilde[order - 1].clone(),
                            _ => return fail("order out of range"),
                        }
                    }
                };
                if &rows_of(&rebuilt, var) != rows {
                    return fail("matrix differs from its construction");
                }
            }
            Evidence::Operator { var, params, source, expr, sha256, .. } => {
                if &content_hash(expr) != sha256 {
                    return fail("hash mismatch");
                }
                if let OperatorSource::SymPower { base, power } = source {
                    let l = sym_power_operator(&parse_op(base, var, params)?, *power)?;
                    if l != parse_op(expr, var, params)? {
                        return fail("symmetric power differs");
                    }
                }
            }
            Evidence::Screen { var, operator, tag, witness, .. } => {
                let v = certify_sl2(&parse_op(operator, var, &[])?)?;
                if &v.tag != tag || v.witness.map(|w| w.render(var)) != *witness {
                    return fail("screen verdict differs");
                }
            }
            Evidence::Trace { var, params, matrix, trace, .. } => {
                let m = parse_rows(matrix, var, params)?;
                if m.trace() != parse_rf(trace, var, params)? {
                    return fail("trace differs");
                }
            }
            Evidence::Decomposition { var, params, matrix, functions, matrices, .. } => {
                let d = associated_lie_algebra(&parse_rows(matrix, var, params)?)?;
                let fs: Vec<String> = d.functions.iter().map(|f| f.render(var)).collect();
                let ms: Vec<Rows> = d.matrices.iter().map(|m| const_rows(m, var)).collect();
                if &fs != functions || &ms != matrices {
                    return fail("decomposition differs");
                }
            }
            Evidence::LieClosure {
                params, generators, dimension, n, classification, members, basis_sha256, ..
            } => {
                let gens = generators.iter().map(|g| parse_const_rows(g, "x", params)).collect::<Result<Vec<_>>>()?;
                let l = lie_closure(&gens)?;
                if l.dim() != *dimension || &closure_hash(&l.basis) != basis_sha256 {
                    return fail("closure differs");
                }
                let class = n.map(|n| classify_lnve_lie_algebra(&l, n).map(|c| c.tag())).transpose()?;
                if &class != classification {
                    return fail("classification differs");
                }
                for m in members {
                    if !l.contains(&parse_const_rows(m, "x", params)?) {
                        return fail("member outside the closure");
                    }
                }
            }
            Evidence::Bracket { params, left, right, result, .. } => {
                let (a, b) = (parse_const_rows(left, "x", params)?, parse_const_rows(right, "x", params)?);
                if a.bracket(&b) != parse_const_rows(result, "x", params)? {
                    return fail("bracket differs");
                }
            }
            Evidence::Combination { var, params, terms, result, .. } => {
                let r = parse_rows(result, var, params)?;
                let mut acc = RatFunMatrix::zeros(r.rows(), r.cols());
                for t in terms {
                    acc = acc.add(&parse_rows(&t.matrix, var, params)?.scale(&parse_rf(&t.coeff, var, params)?));
                }
                if acc != r {
                    return fail("combination differs");
                }
            }
            Evidence::AdjointAction { var, params, diag, basis, psi, .. } => {
                let b = basis.iter().map(|m| parse_const_rows(m, var, params)).collect::<Result<Vec<_>>>()?;
                let p = adjoint_action_matrix(&parse_rows(diag, var, params)?, &b)?;
                if &rows_of(&p, var) != psi {
                    return fail("adjoint matrix differs");
                }
            }
            Evidence::Exponents { var, operator, point, indicial, integer_roots, .. } => {
                let d = indicial_polynomial(&parse_op(operator, var, &[])?, &SingularPoint::at(parse_rat(point)?))?;
                let roots: Vec<String> = d.integer_roots.iter().map(|r| r.to_string()).collect();
                if &d.poly.render("e") != indicial || &roots != integer_roots {
                    return fail("exponents differ");
                }
            }
            Evidence::PoleShortcut { var, n, p, pole_orders, applies, .. } => {
                let (orders, ok) = pole_shortcut(*n, &parse_rf(p, var, &[])?);
                if &orders != pole_orders || ok != *applies {
                    return fail("pole orders differ");
                }
            }
            Evidence::RationalSolutions {
                var,
                operator,
                rhs,
                particular,
                homogeneous,
                degree_bound,
                denominator,
                ..
            } => {
                let (l, g) = (parse_op(operator, var, &[])?, parse_rf(rhs, var, &[])?);
                let s = rational_solutions(&l, &g)?;
                let hom: Vec<String> = s.homogeneous.iter().map(|h| h.render(var)).collect();
                if s.particular.map(|y| y.render(var)) != *particular
                    || &hom != homogeneous
                    || s.bounds.degree_bound != *degree_bound
                    || &denominator_bound(&l, &g)?.render(var) != denominator
                {
                    return fail("rational solutions differ");
                }
            }
            Evidence::SystemSolutions { var, matrix, rhs, particular, scalar_operator, scalar_rhs, .. } => {
                let b = rhs.iter().map(|s| parse_rf(s, var, &[])).collect::<Result<Vec<_>>>()?;
                let s = system_rational_solutions(&parse_rows(matrix, var, &[])?, &b)?;
                let part = s.particular.map(|f| f.iter().map(|y| y.render(var)).collect::<Vec<_>>());
                if &part != particular || &s.operator.render(var) != scalar_operator || &s.rhs.render(var) != scalar_rhs
                {
                    return fail("system solutions differ");
                }
            }
            Evidence::Scalarization { var, params, matrix, rhs, covector, operator, scalar_rhs, .. } => {
                let parse_vec = |v: &[String]| v.iter().map(|s| parse_rf(s, var, params)).collect::<Result<Vec<_>>>();
                let l = parse_op(operator, var, params)?;
                let g =
                    scalar_form_rhs(&parse_rows(matrix, var, params)?, &parse_vec(rhs)?, &parse_vec(covector)?, &l)?;
                if g.map(|g| g.render(var)).as_ref() != Some(scalar_rhs) {
                    return fail("scalar form differs");
                }
            }
            Evidence::Gauge { var, gauge, system, reduced, .. } => {
                let p = parse_rows(gauge, var, &[])?;
                let inv = p.inverse().ok_or(Error::NotGauge)?;
                let a = parse_rows(system, var, &[])?;
                let r = p.mul(&a).mul(&inv).add(&p.derivative().mul(&inv));
                if &rows_of(&r, var) != reduced {
                    return fail("gauge transform differs");
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn closure_hash(basis: &[ConstMatrix]) -> String {
    let rows: Vec<Rows> = basis.iter().map(|m| const_rows(m, "x")).collect();
    content_hash(&rows)
}

/// Pole orders of `p` at its finite poles and whether one of them lies in
/// `1..=n+2`, which rules out a rational solution of `L_{n+1}(f) = p`.
pub fn pole_shortcut(n: usize, p: &RatFun) -> (Vec<u32>, bool) {
    let orders: Vec<u32> = crate::exactalg::roots::factor_over_q(p.den()).into_iter().map(|(_, m)| m as u32).collect();
    let applies = orders.iter().any(|&k| k >= 1 && k as usize <= n + 2);
    (orders, applies)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "IRREDUCIBLE")]
    Irreducible,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
    #[serde(rename = "OBSTRUCTION-SOLVABLE")]
    ObstructionSolvable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Irreducible => "IRREDUCIBLE",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::ObstructionSolvable => "OBSTRUCTION-SOLVABLE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertInput {
    pub command: String,
    pub args: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub input: CertInput,
    pub evidence: Vec<Evidence>,
    pub verdict: Verdict,
}

/// Command whose certificates report a solvable obstruction as such.
pub const OBSTRUCTION_COMMAND: &str = "obstruction";

/// The verdict the evidence supports. IRREDUCIBLE needs a certified first
/// variational equation and dimension records that all exceed 5. A solvable
/// obstruction is INCONCLUSIVE for the criteria; only the obstruction
/// command names it, and only with a verified reduction on record.
pub fn decide(command: &str, evidence: &[Evidence]) -> Verdict {
    let hyp1 = evidence
        .iter()
        .any(|e| matches!(e, Evidence::Screen { role: Role::FirstVariational, tag: ScreenTag::Sl2Certified, .. }));
    let bounds: Vec<bool> =
        evidence.iter().filter(|e| e.role() == Role::DimensionBound).filter_map(|e| e.dimension_outcome()).collect();
    if hyp1 && !bounds.is_empty() && bounds.iter().all(|&b| b) {
        return Verdict::Irreducible;
    }
    let reduction = evidence.iter().any(|e| matches!(e, Evidence::Gauge { .. }));
    let solvable = evidence.iter().any(|e| e.role() == Role::DimensionBound && e.is_solvable_obstruction());
    if command == OBSTRUCTION_COMMAND && solvable && reduction {
        Verdict::ObstructionSolvable
    } else {
        Verdict::Inconclusive
    }
}

impl Certificate {
    pub fn new(command: &str, args: &[(&str, String)], evidence: Vec<Evidence>) -> Self {
        let verdict = decide(command, &evidence);
        let args = args.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        Certificate { input: CertInput { command: command.into(), args }, evidence, verdict }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(format!("certificate: {e}")))
    }

    pub fn find(&self, label: &str) -> Option<&Evidence> {
        self.evidence.iter().find(|e| e.label() == label)
    }

    /// Re-runs every record and the verdict rule.
    pub fn replay(&self) -> Result<()> {
        for e in &self.evidence {
            e.replay()?;
        }
        if decide(&self.input.command, &self.evidence) != self.verdict {
            return Err(Error::Check("verdict does not follow from the evidence".into()));
        }
        Ok(())
    }
}

/// Record builders shared by the checks.
pub(crate) mod build {
    use super::*;

    pub fn matrix(label: &str, var: &str, params: &[&str], source: MatrixSource, m: &RatFunMatrix) -> Evidence {
        let rows = rows_of(m, var);
        Evidence::Matrix {
            label: label.into(),
            var: var.into(),
            params: strings(params),
            source,
            sha256: content_hash(&rows),
            rows,
        }
    }

    pub fn operator(label: &str, var: &str, params: &[&str], source: OperatorSource, l: &DiffOp) -> Evidence {
        let expr = l.render(var);
        Evidence::Operator {
            label: label.into(),
            var: var.into(),
            params: strings(params),
            source,
            sha256: content_hash(&expr),
            expr,
        }
    }

    pub fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    pub fn bracket(label: &str, params: &[&str], a: &ConstMatrix, b: &ConstMatrix) -> Evidence {
        Evidence::Bracket {
            label: label.into(),
            params: strings(params),
            left: const_rows(a, "x"),
            right: const_rows(b, "x"),
            result: const_rows(&a.bracket(b), "x"),
        }
    }
}
