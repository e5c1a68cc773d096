use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use super::jetpoly::{JetMono, JetPoly, JetVar};
use crate::exactalg::parse::{eval, parse_expr};
use crate::exactalg::{Field, Param, Rat, RatFun};
use crate::linops::{Matrix, RatFunMatrix};
use crate::{Error, Result};

/// Default cap on the prolongation order.
pub const DEFAULT_MAX_ORDER: usize = 5;

/// Polynomial vector field `Σ aᵢ ∂/∂xᵢ`. When `indep` is set, that
/// coordinate is the independent variable: coefficients are rational
/// functions of it and it never appears as a polynomial variable.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSpec {
    names: Vec<String>,
    indep: Option<usize>,
    comps: Vec<JetPoly>,
}

impl VectorFieldSpec {
    pub fn new(names: Vec<String>, indep: Option<usize>, comps: Vec<JetPoly>) -> Result<Self> {
        if names.len() != comps.len() {
            return Err(Error::Dimension(format!("{} coordinates but {} components", names.len(), comps.len())));
        }
        if indep.is_some_and(|i| i >= names.len()) {
            return Err(Error::IndexOutOfRange(format!("independent coordinate {}", indep.unwrap())));
        }
        for c in &comps {
            if c.max_order().is_some_and(|o| o > 0) || c.vars().iter().any(|v| Some(v.coord) == indep) {
                return Err(Error::Input("components must be functions of the base coordinates".into()));
            }
        }
        Ok(VectorFieldSpec { names, indep, comps })
    }

    /// Parses components in the expression grammar. `indep` names the
    /// coordinate entering rationally; all others must enter polynomially.
    pub fn parse(names: &[&str], indep: Option<&str>, comps: &[&str], params: &[&str]) -> Result<Self> {
        let indep_idx = match indep {
            Some(n) => Some(
                names.iter().position(|m| *m == n).ok_or_else(|| Error::Input(format!("unknown coordinate {n}")))?,
            ),
            None => None,
        };
        let mut out = Vec::with_capacity(comps.len());
        for s in comps {
            let e = parse_expr(s)?;
            let p = eval(&e, &|name| {
                if Some(name) == indep {
                    Ok(JetPoly::constant(RatFun::x()))
                } else if let Some(i) = names.iter().position(|m| *m == name) {
                    Ok(JetPoly::var(JetVar::new(i, 0)))
                } else if params.contains(&name) {
                    Ok(JetPoly::constant(RatFun::param(Param::new(name))))
                } else {
                    Err(Error::Parse { pos: 0, msg: format!("unknown identifier '{name}'") })
                }
            })?;
            out.push(p);
        }
        VectorFieldSpec::new(names.iter().map(|s| s.to_string()).collect(), indep_idx, out)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn indep(&self) -> Option<usize> {
        self.indep
    }

    pub fn components(&self) -> &[JetPoly] {
        &self.comps
    }

    fn indep_name(&self) -> &str {
        self.indep.map_or("t", |i| &self.names[i])
    }

    /// Component `i` as a jet polynomial, the independent coordinate's
    /// component included.
    pub fn component(&self, i: usize) -> &JetPoly {
        &self.comps[i]
    }

    /// Checks that `curve` (one entry per coordinate, functions of the
    /// independent variable) is an integral curve and returns the
    /// substitution for the order-0 variables.
    fn curve_substitution(&self, curve: &[RatFun]) -> Result<BTreeMap<JetVar, JetPoly>> {
        if curve.len() != self.dim() {
            return Err(Error::Dimension(format!("curve has {} entries, field {}", curve.len(), self.dim())));
        }
        if let Some(i) = self.indep {
            if curve[i] != RatFun::x() {
                return Err(Error::Input("curve must be parameterized by the independent variable".into()));
            }
        }
        let map: BTreeMap<JetVar, JetPoly> = (0..self.dim())
            .filter(|&i| Some(i) != self.indep)
            .map(|i| (JetVar::new(i, 0), JetPoly::constant(curve[i].clone())))
            .collect();
        for (i, a) in self.comps.iter().enumerate() {
            let along = a.substitute(&map);
            let expect = JetPoly::constant(curve[i].derivative());
            if along != expect {
                return Err(Error::NotInvariant(format!(
                    "component {} gives {} along the curve, expected {}",
                    self.names[i],
                    along.render(&self.names, self.indep_name()),
                    expect.render(&self.names, self.indep_name())
                )));
            }
        }
        Ok(map)
    }
}

/// Prolonged field `C_k X`: right-hand sides for every `xᵢ^(ℓ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetSystem {
    names: Vec<String>,
    indep: Option<usize>,
    order: usize,
    removed: BTreeSet<usize>,
    restricted: bool,
    rhs: BTreeMap<JetVar, JetPoly>,
}

/// Jet prolongation up to order `k` with the default order cap.
pub fn prolong(x: &VectorFieldSpec, k: usize) -> Result<JetSystem> {
    prolong_capped(x, k, DEFAULT_MAX_ORDER)
}

pub fn prolong_capped(x: &VectorFieldSpec, k: usize, cap: usize) -> Result<JetSystem> {
    if k > cap {
        return Err(Error::Input(format!("prolongation order {k} exceeds the cap {cap}")));
    }
    let mut rhs = BTreeMap::new();
    for (i, a) in x.comps.iter().enumerate() {
        let mut d = a.clone();
        for l in 0..=k {
            if l > 0 {
                d = d.total_derivative(x.indep);
            }
            rhs.insert(JetVar::new(i, l), d.clone());
        }
    }
    Ok(JetSystem { names: x.names.clone(), indep: x.indep, order: k, removed: BTreeSet::new(), restricted: false, rhs })
}

impl JetSystem {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    pub fn rhs(&self, v: JetVar) -> Option<&JetPoly> {
        self.rhs.get(&v)
    }

    pub fn equations(&self) -> impl Iterator<Item = (&JetVar, &JetPoly)> {
        self.rhs.iter()
    }

    /// Restricts along an integral curve: order-0 variables are replaced by
    /// the curve and their equations dropped.
    pub fn restrict_to_curve(&self, field: &VectorFieldSpec, curve: &[RatFun]) -> Result<JetSystem> {
        let map = field.curve_substitution(curve)?;
        let rhs = self.rhs.iter().filter(|(v, _)| v.order > 0).map(|(v, p)| (*v, p.substitute(&map))).collect();
        Ok(JetSystem { rhs, restricted: true, ..self.clone() })
    }

    /// Sets every jet of coordinate `idx` of order ≥ 1 to zero.
    pub fn normal_restrict(&self, idx: usize) -> Result<JetSystem> {
        if idx >= self.names.len() {
            return Err(Error::IndexOutOfRange(format!("coordinate {idx} of {}", self.names.len())));
        }
        let rhs = self
            .rhs
            .iter()
            .filter(|(v, _)| !(v.coord == idx && v.order >= 1))
            .map(|(v, p)| (*v, p.kill_coord_jets(idx)))
            .collect();
        let mut removed = self.removed.clone();
        removed.insert(idx);
        Ok(JetSystem { rhs, removed, ..self.clone() })
    }

    /// Equation list, one line per jet variable, ascending order.
    pub fn render(&self) -> Vec<String> {
        let indep_name = self.indep.map_or("t", |i| self.names[i].as_str());
        let mut vars: Vec<&JetVar> = self.rhs.keys().collect();
        vars.sort_by_key(|v| (v.order, v.coord));
        vars.into_iter()
            .map(|v| format!("{}' = {}", v.render(&self.names), self.rhs[v].render(&self.names, indep_name)))
            .collect()
    }

    /// Linearization on the weight-`k` monomials of the jet variables.
    pub fn linearize(&self, k: usize) -> Result<LinearizedSystem> {
        if k == 0 || k > self.order {
            return Err(Error::Input(format!("linearization order {k} outside 1..={}", self.order)));
        }
        let active: Vec<JetVar> = self.rhs.keys().filter(|v| v.order >= 1 && v.order <= k).copied().collect();
        for v in &active {
            let p = &self.rhs[v];
            if p.vars().iter().any(|w| w.order == 0) {
                return Err(Error::NotInvariant(format!(
                    "equation of {} still depends on base coordinates",
                    v.render(&self.names)
                )));
            }
        }
        let vars = weighted_monomials(&active, k);
        let index: BTreeMap<&JetMono, usize> = vars.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mults: Vec<Rat> = vars.iter().map(|m| Rat::from_integer(m.multinomial())).collect();
        let mut a = RatFunMatrix::zeros(vars.len(), vars.len());
        for (i, m) in vars.iter().enumerate() {
            // d/dt of the monomial, expanded in monomials.
            let mut d = JetPoly::zero();
            let mono = JetPoly::term(m.clone(), RatFun::one());
            for &(v, _) in m.factors() {
                d = d.plus(&mono.partial(v).times(&self.rhs[&v]));
            }
            for (n, c) in d.terms() {
                let j = *index.get(n).ok_or_else(|| {
                    Error::Check(format!("derivative leaves the weight-{k} monomials: {}", n.render(&self.names)))
                })?;
                a[(i, j)] = c * &RatFun::from_rat(&mults[i] / &mults[j]);
            }
        }
        Ok(LinearizedSystem { names: self.names.clone(), vars, matrix: a })
    }
}

/// Partition of a monomial's weight by jet order, descending.
fn partition(m: &JetMono) -> Vec<usize> {
    let mut p: Vec<usize> = m.factors().iter().flat_map(|&(v, e)| std::iter::repeat_n(v.order, e as usize)).collect();
    p.sort_by(|a, b| b.cmp(a));
    p
}

/// Layout order: finer partitions first, then lexicographic in the
/// exponents, variables taken by descending jet order and ascending
/// coordinate, larger exponent first.
fn layout_cmp(a: &JetMono, b: &JetMono) -> Ordering {
    partition(a).cmp(&partition(b)).then_with(|| {
        let mut vars: Vec<JetVar> = a.factors().iter().chain(b.factors()).map(|&(v, _)| v).collect();
        vars.sort_by(|x, y| y.order.cmp(&x.order).then(x.coord.cmp(&y.coord)));
        vars.dedup();
        vars.iter()
            .map(|&v| b.exponent(v).cmp(&a.exponent(v)))
            .find(|c| *c != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    })
}

/// All monomials of weighted degree exactly `k` in `vars`, in layout order.
fn weighted_monomials(vars: &[JetVar], k: usize) -> Vec<JetMono> {
    fn rec(vars: &[JetVar], k: usize, acc: &mut Vec<(JetVar, u32)>, out: &mut Vec<JetMono>) {
        if k == 0 {
            out.push(JetMono::from_pairs(acc.clone()));
            return;
        }
        let Some((&v, rest)) = vars.split_first() else { return };
        let mut e = 0u32;
        while e as usize * v.order <= k {
            if e > 0 {
                acc.push((v, e));
            }
            rec(rest, k - e as usize * v.order, acc, out);
            if e > 0 {
                acc.pop();
            }
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(vars, k, &mut Vec::new(), &mut out);
    out.sort_by(layout_cmp);
    out
}

/// Linear system `z′ = A z` in monomial variables `z_α = mult(α)·α`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizedSystem {
    names: Vec<String>,
    vars: Vec<JetMono>,
    matrix: RatFunMatrix,
}

impl LinearizedSystem {
    pub fn vars(&self) -> &[JetMono] {
        &self.vars
    }

    pub fn matrix(&self) -> &RatFunMatrix {
        &self.matrix
    }

    pub fn render_vars(&self) -> Vec<String> {
        self.vars.iter().map(|m| m.render(&self.names)).collect()
    }

    fn select(&self, keep: &[usize]) -> LinearizedSystem {
        LinearizedSystem {
            names: self.names.clone(),
            vars: keep.iter().map(|&i| self.vars[i].clone()).collect(),
            matrix: Matrix::from_fn(keep.len(), keep.len(), |i, j| self.matrix[(keep[i], keep[j])].clone()),
        }
    }

    /// Removes every monomial containing a jet of coordinate `idx`.
    pub fn normal_restrict(&self, idx: usize) -> Result<LinearizedSystem> {
        if idx >= self.names.len() {
            return Err(Error::IndexOutOfRange(format!("coordinate {idx} of {}", self.names.len())));
        }
        let keep: Vec<usize> =
            (0..self.vars.len()).filter(|&i| !self.vars[i].factors().iter().any(|(v, _)| v.coord == idx)).collect();
        Ok(self.select(&keep))
    }

    /// Smallest subsystem containing the top-order jets `xᵢ^(k)` and the
    /// pure first-order powers (the `symᵏ` of the first variational
    /// equation), closed under the dependencies of their equations.
    pub fn principal_subsystem(&self) -> LinearizedSystem {
        let k = self.vars.iter().map(|m| m.weight()).max().unwrap_or(0);
        let mut seen: BTreeSet<usize> = (0..self.vars.len())
            .filter(|&i| {
                let p = partition(&self.vars[i]);
                p == [k] || p.iter().all(|&o| o == 1)
            })
            .collect();
        let mut stack: Vec<usize> = seen.iter().copied().collect();
        while let Some(i) = stack.pop() {
            for j in 0..self.vars.len() {
                if !self.matrix[(i, j)].is_zero() && seen.insert(j) {
                    stack.push(j);
                }
            }
        }
        let keep: Vec<usize> = seen.into_iter().collect();
        self.select(&keep)
    }
}

/// Truncated flow of the deviation `ξ = x − c(t)` from an integral curve:
/// the linear system on the binomially weighted monomials of degree
/// `k, k−1, …, 1` in `ξ` obtained by dropping terms of degree above `k`.
pub fn taylor_lve(field: &VectorFieldSpec, curve: &[RatFun], k: usize) -> Result<LinearizedSystem> {
    if k == 0 {
        return Err(Error::Input("order must be positive".into()));
    }
    let map = field.curve_substitution(curve)?;
    let deps: Vec<usize> = (0..field.dim()).filter(|&i| Some(i) != field.indep).collect();
    // ξ_i stored as the order-1 jet of coordinate i.
    let xi = |i: usize| JetPoly::var(JetVar::new(i, 1));
    let shift: BTreeMap<JetVar, JetPoly> =
        deps.iter().map(|&i| (JetVar::new(i, 0), map[&JetVar::new(i, 0)].plus(&xi(i)))).collect();
    let flow: BTreeMap<usize, JetPoly> = deps
        .iter()
        .map(|&i| (i, field.comps[i].substitute(&shift).minus(&JetPoly::constant(curve[i].derivative()))))
        .collect();
    let xi_vars: Vec<JetVar> = deps.iter().map(|&i| JetVar::new(i, 1)).collect();
    let mut vars = Vec::new();
    for d in (1..=k).rev() {
        vars.extend(weighted_monomials(&xi_vars, d));
    }
    let index: BTreeMap<&JetMono, usize> = vars.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mults: Vec<Rat> = vars.iter().map(|m| Rat::from_integer(m.multinomial())).collect();
    let mut a = RatFunMatrix::zeros(vars.len(), vars.len());
    for (i, m) in vars.iter().enumerate() {
        let mono = JetPoly::term(m.clone(), RatFun::one());
        let mut d = JetPoly::zero();
        for &(v, _) in m.factors() {
            d = d.plus(&mono.partial(v).times(&flow[&v.coord]));
        }
        for (n, c) in d.terms() {
            if n.degree() as usize > k {
                continue;
            }
            let j = index[n];
            a[(i, j)] = c * &RatFun::from_rat(&mults[i] / &mults[j]);
        }
    }
    Ok(LinearizedSystem { names: field.names.clone(), vars, matrix: a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2_field() -> VectorFieldSpec {
        VectorFieldSpec::parse(&["x", "y", "z"], Some("x"), &["1", "z", "x*y + 2*y^3"], &[]).unwrap()
    }

    fn axis() -> Vec<RatFun> {
        vec![RatFun::x(), RatFun::zero(), RatFun::zero()]
    }

    #[test]
    fn translation_field() {
        let f = VectorFieldSpec::parse(&["x"], None, &["1"], &[]).unwrap();
        let j = prolong(&f, 3).unwrap();
        assert_eq!(j.rhs(JetVar::new(0, 0)), Some(&JetPoly::constant(RatFun::one())));
        for l in 1..=3 {
            assert!(j.rhs(JetVar::new(0, l)).unwrap().is_zero());
        }
    }

    #[test]
    fn euler_field() {
        let f = VectorFieldSpec::parse(&["x"], None, &["x"], &[]).unwrap();
        let j = prolong(&f, 2).unwrap();
        for l in 0..=2 {
            assert_eq!(j.rhs(JetVar::new(0, l)), Some(&JetPoly::var(JetVar::new(0, l))));
        }
        let lin = j.linearize(2).unwrap();
        assert_eq!(lin.render_vars(), vec!["(x^(1))^2", "x^(2)"]);
        assert_eq!(lin.matrix(), &RatFunMatrix::diag(&[RatFun::from(2), RatFun::one()]));
        let t = taylor_lve(&f, &[RatFun::zero()], 2);
        assert!(t.is_ok());
    }

    #[test]
    fn p2_first_order() {
        let j = prolong(&p2_field(), 1).unwrap().restrict_to_curve(&p2_field(), &axis()).unwrap();
        let y1 = JetPoly::var(JetVar::new(1, 1));
        let z1 = JetPoly::var(JetVar::new(2, 1));
        assert_eq!(j.rhs(JetVar::new(1, 1)), Some(&z1));
        assert_eq!(j.rhs(JetVar::new(2, 1)), Some(&y1.scale(&RatFun::x())));
        assert!(j.rhs(JetVar::new(0, 1)).unwrap().is_zero());
        let n = j.normal_restrict(0).unwrap();
        let lin = n.linearize(1).unwrap();
        assert_eq!(lin.matrix(), &RatFunMatrix::parse(&[&["0", "1"], &["t", "0"]], "t", &[]).unwrap());
    }

    #[test]
    fn triangular_weights() {
        let j = prolong(&p2_field(), 3).unwrap();
        for (v, p) in j.equations() {
            if v.order >= 1 && !p.is_zero() {
                assert_eq!(p.homogeneous_weight(), Some(v.order), "{:?}", v);
            }
        }
    }

    #[test]
    fn pnve3_matrix() {
        let f = p2_field();
        let j = prolong(&f, 3).unwrap().restrict_to_curve(&f, &axis()).unwrap().normal_restrict(0).unwrap();
        let lin = j.linearize(3).unwrap();
        assert_eq!(lin.vars().len(), 10);
        let top = lin.principal_subsystem();
        assert_eq!(
            top.render_vars(),
            vec!["(y^(1))^3", "(y^(1))^2*z^(1)", "y^(1)*(z^(1))^2", "(z^(1))^3", "y^(3)", "z^(3)"]
        );
        let expect = RatFunMatrix::parse(
            &[
                &["0", "1", "0", "0", "0", "0"],
                &["3*t", "0", "2", "0", "0", "0"],
                &["0", "2*t", "0", "3", "0", "0"],
                &["0", "0", "t", "0", "0", "0"],
                &["0", "0", "0", "0", "0", "1"],
                &["12", "0", "0", "0", "t", "0"],
            ],
            "t",
            &[],
        )
        .unwrap();
        assert_eq!(top.matrix(), &expect);
        // Restricting before or after linearizing agrees.
        let full = prolong(&f, 3).unwrap().restrict_to_curve(&f, &axis()).unwrap();
        let other = full.linearize(3).unwrap().normal_restrict(0).unwrap();
        assert_eq!(other.principal_subsystem(), top);
    }

    #[test]
    fn errors() {
        let f = p2_field();
        let bad = vec![RatFun::x(), RatFun::one(), RatFun::zero()];
        assert!(matches!(prolong(&f, 1).unwrap().restrict_to_curve(&f, &bad), Err(Error::NotInvariant(_))));
        assert!(matches!(prolong(&f, 1).unwrap().normal_restrict(3), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(prolong(&f, 2).unwrap().linearize(2), Err(Error::NotInvariant(_))));
        assert!(prolong(&f, 6).is_err());
    }
}
