//! Screening of second-order operators: exponential solutions of a
//! restricted shape, logarithms at regular singular points, and the
//! combination of both that certifies the group `SL₂`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactalg::roots::rational_roots;
use crate::exactalg::{fmt_rat, Coeff, Poly, Rat, RatFun};
use crate::linops::DiffOp;
use crate::ratsolve::{indicial_polynomial, rational_solutions, singular_points, SingularPoint};
use crate::{Error, Result};

/// `y = e^{λx} · Π (x − s)^ρ · R(x)` with `R` rational.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpWitness {
    pub lambda: Rat,
    /// `(s, ρ)` pairs with `ρ` not an integer.
    pub exponents: Vec<(Rat, Rat)>,
    pub part: RatFun,
}

impl ExpWitness {
    /// Logarithmic derivative `y′/y`.
    pub fn log_derivative(&self) -> RatFun {
        let mut u = RatFun::constant(Coeff::Rat(self.lambda.clone()));
        for (s, rho) in &self.exponents {
            let lin = RatFun::from_poly(Poly::linear(Coeff::Rat(s.clone())));
            u = &u + &(&RatFun::constant(Coeff::Rat(rho.clone())) / &lin);
        }
        &u + &(&self.part.derivative() / &self.part)
    }

    /// Checks `L(y) = 0` through the Riccati equation for `u = y′/y`.
    pub fn satisfies(&self, l: &DiffOp) -> bool {
        if l.order() != 2 || self.part.is_zero() {
            return false;
        }
        let u = self.log_derivative();
        let riccati = &(&l.coeff(2) * &(&u.derivative() + &(&u * &u))) + &(&(&l.coeff(1) * &u) + &l.coeff(0));
        riccati.is_zero()
    }

    pub fn render(&self, var: &str) -> String {
        let mut parts = Vec::new();
        if !self.lambda.is_zero() {
            parts.push(format!("exp({}*{var})", fmt_rat(&self.lambda)));
        }
        for (s, rho) in &self.exponents {
            let base = if s.is_zero() { var.to_string() } else { format!("({var} - {})", fmt_rat(s)) };
            parts.push(format!("{base}^({})", fmt_rat(rho)));
        }
        let p = self.part.render(var);
        if p != "1" || parts.is_empty() {
            parts.push(if p.contains([' ', '/']) { format!("({p})") } else { p });
        }
        parts.join("*")
    }

    /// `R` when it is a polynomial.
    pub fn polynomial(&self) -> Option<&Poly> {
        self.part.is_polynomial().then(|| self.part.num())
    }
}

impl fmt::Display for ExpWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

/// Outcome of the restricted exponential-solution search.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpSearch {
    pub witnesses: Vec<ExpWitness>,
    /// Why the search could not be completed, if it could not.
    pub unsupported: Option<String>,
    /// Human-readable record of what was searched.
    pub searched: Vec<String>,
}

impl ExpSearch {
    pub fn is_complete_and_empty(&self) -> bool {
        self.unsupported.is_none() && self.witnesses.is_empty()
    }

    fn unsupported(reason: String, searched: Vec<String>) -> Self {
        ExpSearch { witnesses: vec![], unsupported: Some(reason), searched }
    }
}

fn check_order2(l: &DiffOp) -> Result<()> {
    if l.order() != 2 || !l.is_rational() {
        return Err(Error::InvalidOperator("expected an order 2 operator over Q".into()));
    }
    Ok(())
}

/// All roots of `p` when they are rational, with multiplicity.
fn all_rational_roots(p: &Poly) -> Option<Vec<Rat>> {
    let mut rest = p.clone();
    let mut out = Vec::new();
    for r in rational_roots(p) {
        let lin = Poly::linear(Coeff::Rat(r.clone()));
        while let Some(q) = rest.div_exact(&lin) {
            rest = q;
            out.push(r.clone());
        }
    }
    rest.is_constant().then_some(out)
}

/// One representative exponent per class modulo ℤ, integers folded to 0.
fn exponent_classes(roots: &[Rat]) -> Vec<Rat> {
    let mut reps: Vec<Rat> = Vec::new();
    let mut sorted = roots.to_vec();
    sorted.sort();
    for r in sorted {
        if !reps.iter().any(|q| (&r - q).is_integer()) {
            reps.push(r);
        }
    }
    reps.into_iter().map(|r| if r.is_integer() { Rat::zero() } else { r }).collect()
}

fn cleared(l: &DiffOp) -> Vec<Poly> {
    l.clear_denominators().coeffs().iter().map(|c| c.num().clone()).collect()
}

/// Candidate `λ` from the Newton polygon at infinity, or the reason the
/// shape is outside the supported classes. `Ok(None)` means no
/// exponential solution can have a rational logarithmic derivative.
fn infinity_candidates(p: &[Poly]) -> std::result::Result<Option<Vec<Rat>>, String> {
    let d: Vec<Option<i64>> = p.iter().map(|c| c.deg_i()).collect();
    let d2 = d[2].unwrap();
    let kappa =
        [d[1].map(|d1| Rat::from_integer((d1 - d2).into())), d[0].map(|d0| Rat::new((d0 - d2).into(), 2.into()))]
            .into_iter()
            .flatten()
            .max();
    match kappa {
        Some(k) if k.is_positive() && !k.is_integer() => Ok(None),
        Some(k) if k.is_positive() => {
            Err(format!("irregular at infinity with integer slope {}", fmt_rat(&(k + Rat::one()))))
        }
        Some(k) if k.is_zero() => {
            let chi =
                (0..3).fold(
                    Poly::zero(),
                    |acc, i| {
                        if d[i] == Some(d2) {
                            acc.plus(&Poly::monomial(p[i].lc(), i))
                        } else {
                            acc
                        }
                    },
                );
            let mut roots = all_rational_roots(&chi).ok_or_else(|| {
                format!("characteristic polynomial {} at infinity has irrational roots", chi.render("lambda"))
            })?;
            roots.dedup();
            Ok(Some(roots))
        }
        _ => Ok(Some(vec![Rat::zero()])),
    }
}

/// `L` conjugated by `h` with `h′/h = r`: the operator `L̃` with
/// `L(h·R) = h·L̃(R)`.
fn twist(l: &DiffOp, r: &RatFun) -> DiffOp {
    let (a0, a1, a2) = (l.coeff(0), l.coeff(1), l.coeff(2));
    let c1 = &(&a2 * &(r + r)) + &a1;
    let c0 = &(&(&a2 * &(&r.derivative() + &(r * r))) + &(&a1 * r)) + &a0;
    DiffOp::new(vec![c0, c1, a2])
}

/// Exponential solutions `e^{λx} Π(x − s)^ρ R(x)` with `λ, ρ` rational.
/// Supported: finite singular points rational and regular singular, and
/// infinity regular or irregular of slope 1.
pub fn exponential_solutions_restricted(l: &DiffOp) -> Result<ExpSearch> {
    check_order2(l)?;
    let p = cleared(l);
    let mut searched = Vec::new();
    let lambdas = match infinity_candidates(&p) {
        Err(why) => return Ok(ExpSearch::unsupported(why, searched)),
        Ok(None) => {
            searched.push("non-integer Newton slope at infinity: no rational logarithmic derivative".into());
            return Ok(ExpSearch { witnesses: vec![], unsupported: None, searched });
        }
        Ok(Some(v)) => v,
    };
    searched.push(format!("lambda in {{{}}}", lambdas.iter().map(fmt_rat).collect::<Vec<_>>().join(", ")));
    let mut local: Vec<(Rat, Vec<Rat>)> = Vec::new();
    for pt in singular_points(l)? {
        let SingularPoint::Finite(f) = &pt else { unreachable!() };
        if f.degree() != Some(1) {
            return Ok(ExpSearch::unsupported(format!("singular factor {} of degree > 1", f.render("x")), searched));
        }
        let s = -f.coeff(0).as_rat().unwrap().clone();
        let data = indicial_polynomial(l, &pt)?;
        if data.poly.degree() != Some(2) {
            return Ok(ExpSearch::unsupported(format!("irregular singular point x = {}", fmt_rat(&s)), searched));
        }
        let Some(roots) = all_rational_roots(&data.poly) else {
            return Ok(ExpSearch::unsupported(format!("irrational exponents at x = {}", fmt_rat(&s)), searched));
        };
        let reps = exponent_classes(&roots);
        searched.push(format!(
            "rho at x = {} in {{{}}}",
            fmt_rat(&s),
            reps.iter().map(fmt_rat).collect::<Vec<_>>().join(", ")
        ));
        local.push((s, reps));
    }
    let mut combos: Vec<Vec<(Rat, Rat)>> = vec![vec![]];
    for (s, reps) in &local {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                reps.iter().map(move |r| {
                    let mut c = c.clone();
                    if !r.is_zero() {
                        c.push((s.clone(), r.clone()));
                    }
                    c
                })
            })
            .collect();
    }
    let mut witnesses = Vec::new();
    for lambda in &lambdas {
        for exps in &combos {
            let probe = ExpWitness { lambda: lambda.clone(), exponents: exps.clone(), part: RatFun::one() };
            let r = probe.log_derivative();
            let space = rational_solutions(&twist(l, &r), &RatFun::zero())?;
            for part in space.homogeneous {
                let w = ExpWitness { part, ..probe.clone() };
                if !w.satisfies(l) {
                    return Err(Error::Check(format!("exponential witness fails: {w}")));
                }
                witnesses.push(w);
            }
        }
    }
    Ok(ExpSearch { witnesses, unsupported: None, searched })
}

/// Taylor coefficients of `f` at 0 up to `x^n`; `f` must be regular at 0.
fn taylor(f: &RatFun, n: usize) -> Vec<Rat> {
    let num: Vec<Rat> = (0..=n).map(|k| f.num().coeff(k).as_rat().cloned().unwrap()).collect();
    let den: Vec<Rat> = (0..=n).map(|k| f.den().coeff(k).as_rat().cloned().unwrap()).collect();
    let mut out: Vec<Rat> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut c = num[k].clone();
        for j in 1..=k {
            c -= &den[j] * &out[k - j];
        }
        out.push(c / &den[0]);
    }
    out
}

/// Whether local solutions at `x = point` involve a logarithm. Ordinary
/// points give `false`.
pub fn has_log_at(l: &DiffOp, point: &Rat) -> Result<bool> {
    check_order2(l)?;
    // shift so the point sits at 0 and normalize to y″ + (P/x) y′ + (Q/x²) y
    let shift = RatFun::from_poly(Poly::from_rats(&[point.clone(), Rat::one()]));
    let at = |c: &RatFun| c.compose(&shift);
    let (a0, a1, a2) = (at(&l.coeff(0)), at(&l.coeff(1)), at(&l.coeff(2)));
    let x = RatFun::x();
    let pp = &(&a1 * &x) / &a2;
    let qq = &(&a0 * &(&x * &x)) / &a2;
    let regular = |f: &RatFun| f.is_zero() || !f.den().coeff(0).is_zero();
    if !regular(&pp) || !regular(&qq) {
        return Err(Error::NotRegularSingular);
    }
    let (p0, q0) = (taylor(&pp, 0)[0].clone(), taylor(&qq, 0)[0].clone());
    // r(r−1) + p₀r + q₀
    let ind = Poly::from_rats(&[q0, &p0 - Rat::one(), Rat::one()]);
    let Some(mut roots) = all_rational_roots(&ind) else { return Ok(false) };
    roots.sort();
    let (r2, r1) = (roots[0].clone(), roots[1].clone());
    if r1 == r2 {
        return Ok(true);
    }
    let k = &r1 - &r2;
    if !k.is_integer() {
        return Ok(false);
    }
    let k: usize = k.to_integer().try_into().unwrap();
    let (ps, qs) = (taylor(&pp, k), taylor(&qq, k));
    let f = |r: &Rat| ind.eval_rat(r).unwrap();
    let mut c = vec![Rat::one()];
    for n in 1..=k {
        let e = &r2 + Rat::from_integer(n.into());
        let rhs = (1..=n).fold(Rat::zero(), |acc, j| {
            let ej = &e - Rat::from_integer(j.into());
            acc - (&ps[j] * &ej + &qs[j]) * &c[n - j]
        });
        if n == k {
            return Ok(!rhs.is_zero());
        }
        c.push(rhs / f(&e));
    }
    unreachable!()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScreenTag {
    #[serde(rename = "SL2-certified")]
    Sl2Certified,
    #[serde(rename = "reducible")]
    Reducible,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl fmt::Display for ScreenTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScreenTag::Sl2Certified => "SL2-certified",
            ScreenTag::Reducible => "reducible",
            ScreenTag::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScreenVerdict {
    pub tag: ScreenTag,
    pub witness: Option<ExpWitness>,
    pub reasons: Vec<String>,
}

/// Certifies `Gal(L) = SL₂` for a trace-zero order 2 operator: no
/// exponential solution (irreducible), unimodular, and either a logarithm
/// at a finite regular singular point (a unipotent element rules out the
/// imprimitive and finite cases) or `L = ∂² − r` with `r` polynomial
/// (no poles, so Kovacic's cases 2 and 3 are impossible).
pub fn certify_sl2(l: &DiffOp) -> Result<ScreenVerdict> {
    check_order2(l)?;
    let l = l.monic();
    let undetermined = |why: String| ScreenVerdict { tag: ScreenTag::Undetermined, witness: None, reasons: vec![why] };
    if !l.coeff(1).is_zero() {
        return Ok(undetermined("not trace-zero normalized".into()));
    }
    let mut reasons = vec!["trace zero: group inside SL2".to_string()];
    let search = exponential_solutions_restricted(&l)?;
    reasons.extend(search.searched.iter().cloned());
    if let Some(w) = search.witnesses.first() {
        reasons.push(format!("exponential solution {w}"));
        return Ok(ScreenVerdict { tag: ScreenTag::Reducible, witness: Some(w.clone()), reasons });
    }
    if let Some(why) = search.unsupported {
        reasons.push(format!("unsupported: {why}"));
        return Ok(ScreenVerdict { tag: ScreenTag::Undetermined, witness: None, reasons });
    }
    reasons.push("no exponential solution: irreducible".into());
    if l.coeff(0).is_polynomial() {
        reasons.push("potential is polynomial: no poles, imprimitive and finite cases excluded".into());
        return Ok(ScreenVerdict { tag: ScreenTag::Sl2Certified, witness: None, reasons });
    }
    for pt in singular_points(&l)? {
        let SingularPoint::Finite(f) = &pt else { continue };
        if f.degree() != Some(1) {
            continue;
        }
        let s = -f.coeff(0).as_rat().unwrap().clone();
        if has_log_at(&l, &s)? {
            reasons.push(format!("logarithm at x = {}: unipotent local monodromy", fmt_rat(&s)));
            return Ok(ScreenVerdict { tag: ScreenTag::Sl2Certified, witness: None, reasons });
        }
    }
    reasons.push("no logarithmic point found".into());
    Ok(ScreenVerdict { tag: ScreenTag::Undetermined, witness: None, reasons })
}
