//! Rational solutions of `L(y) = g` over ℚ(x): universal denominator from
//! local indicial data, numerator degree from the behaviour at infinity,
//! then undetermined coefficients. Systems go through a cyclic vector.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactalg::roots::{factor_over_q, integer_roots};
use crate::exactalg::{Coeff, Int, Poly, Rat, RatFun};
use crate::linops::{scalarize_with_retry, system_residual, DiffOp, Matrix, RatFunMatrix};
use crate::{Error, Result};

/// Where local exponents are computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SingularPoint {
    /// Zero set of a monic irreducible polynomial over ℚ.
    Finite(Poly),
    Infinity,
}

impl SingularPoint {
    pub fn at(r: Rat) -> Self {
        SingularPoint::Finite(Poly::linear(Coeff::Rat(r)))
    }

    pub fn render(&self, var: &str) -> String {
        match self {
            SingularPoint::Finite(f) => f.render(var),
            SingularPoint::Infinity => "oo".into(),
        }
    }
}

/// Local exponent data. At a finite factor `f`, `y ~ f^e`; at infinity,
/// `y ~ x^e`, so `e` is the degree there.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicialData {
    pub point: SingularPoint,
    /// For a factor of degree > 1, the gcd of the coordinate polynomials of
    /// the indicial polynomial over `ℚ[x]/(f)`; its rational roots are
    /// exactly the rational exponents.
    pub poly: Poly,
    pub integer_roots: Vec<Int>,
    /// When `e` is not a root, `L(f^e·u)` has order `e − shift` at `f`, and
    /// `L(x^e + …)` has degree `e + shift` at infinity.
    pub shift: i64,
}

fn falling(i: usize) -> Poly {
    (0..i)
        .fold(Poly::one(), |acc, k| acc.times(&Poly::from_rats(&[Rat::from_integer((-(k as i64)).into()), Rat::one()])))
}

fn valuation(p: &Poly, f: &Poly) -> (usize, Poly) {
    let mut v = 0;
    let mut q = p.clone();
    while let Some(next) = q.div_exact(f) {
        q = next;
        v += 1;
    }
    (v, q)
}

fn check_rational(l: &DiffOp) -> Result<()> {
    if l.is_zero() || !l.is_rational() {
        return Err(Error::InvalidOperator("expected a nonzero operator over Q".into()));
    }
    Ok(())
}

/// `(q·L, q)` with polynomial coefficients.
fn cleared(l: &DiffOp) -> (Vec<Poly>, Poly) {
    let mut q = Poly::one();
    for c in l.coeffs() {
        let g = Poly::gcd(&q, c.den());
        q = q.times(c.den()).div_exact(&g).unwrap();
    }
    let coeffs = l.coeffs().iter().map(|c| c.num().times(&q.div_exact(c.den()).unwrap())).collect();
    (coeffs, q)
}

pub fn indicial_polynomial(l: &DiffOp, point: &SingularPoint) -> Result<IndicialData> {
    check_rational(l)?;
    let (p, _) = cleared(l);
    let data = match point {
        SingularPoint::Infinity => {
            let s = p.iter().enumerate().filter_map(|(i, c)| c.deg_i().map(|d| d - i as i64)).max().unwrap();
            let poly = p.iter().enumerate().fold(Poly::zero(), |acc, (i, c)| match c.deg_i() {
                Some(d) if d - i as i64 == s => acc.plus(&falling(i).scale(&c.lc())),
                _ => acc,
            });
            IndicialData { point: point.clone(), integer_roots: integer_roots(&poly), poly, shift: s }
        }
        SingularPoint::Finite(f) => {
            if f.degree().unwrap_or(0) == 0 || !f.is_rational() {
                return Err(Error::Input("singular point must be a nonconstant polynomial over Q".into()));
            }
            let f = f.monic();
            let df = f.derivative();
            let local: Vec<Option<(i64, Poly)>> = p
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    (!c.is_zero()).then(|| {
                        let (v, q) = valuation(c, &f);
                        (i as i64 - v as i64, q.times(&df.pow(i as u32)).rem(&f))
                    })
                })
                .collect();
            let s = local.iter().flatten().map(|(s, _)| *s).max().unwrap();
            // Σ cᵢ(x)·e^(i) with cᵢ ∈ ℚ[x]/(f), split by powers of x.
            let m = f.degree().unwrap();
            let mut coords = vec![Poly::zero(); m];
            for (i, t) in local.iter().enumerate() {
                if let Some((si, c)) = t {
                    if *si == s {
                        for (k, ck) in coords.iter_mut().enumerate() {
                            *ck = ck.plus(&falling(i).scale(&c.coeff(k)));
                        }
                    }
                }
            }
            let poly = coords.iter().fold(Poly::zero(), |g, c| Poly::gcd(&g, c));
            let poly = if m == 1 { coords[0].clone() } else { poly };
            IndicialData { point: SingularPoint::Finite(f), integer_roots: integer_roots(&poly), poly, shift: s }
        }
    };
    if data.poly.is_zero() {
        return Err(Error::Check("vanishing indicial polynomial".into()));
    }
    Ok(data)
}

/// Irreducible factors of the leading coefficient of `L` with its
/// denominators cleared.
pub fn singular_points(l: &DiffOp) -> Result<Vec<SingularPoint>> {
    check_rational(l)?;
    let (p, _) = cleared(l);
    Ok(factor_over_q(p.last().unwrap()).into_iter().map(|(f, _)| SingularPoint::Finite(f)).collect())
}

fn order_at(g: &RatFun, f: &Poly) -> Option<i64> {
    (!g.is_zero()).then(|| valuation(g.num(), f).0 as i64 - valuation(g.den(), f).0 as i64)
}

/// `q·g` with `q` the factor clearing the denominators of `L`.
fn cleared_rhs(l: &DiffOp, g: &RatFun) -> (Vec<Poly>, RatFun) {
    let (p, q) = cleared(l);
    (p, g * &RatFun::from_poly(q))
}

/// Every rational solution `y` of `L(y) = g` has `y·D` polynomial.
pub fn denominator_bound(l: &DiffOp, g: &RatFun) -> Result<Poly> {
    check_rational(l)?;
    if !g.is_rational() {
        return Err(Error::Input("right-hand side must be over Q".into()));
    }
    let (p, g) = cleared_rhs(l, g);
    let mut factors: Vec<Poly> = factor_over_q(p.last().unwrap()).into_iter().map(|(f, _)| f).collect();
    for (f, _) in factor_over_q(g.den()) {
        if !factors.contains(&f) {
            factors.push(f);
        }
    }
    let mut d = Poly::one();
    for f in factors {
        let data = indicial_polynomial(l, &SingularPoint::Finite(f.clone()))?;
        // Either the exponent is an indicial root or it is forced by g.
        let from_roots = data.integer_roots.first().map_or(Int::zero(), |r| -r).max(Int::zero());
        let from_rhs = order_at(&g, &f).map_or(0, |v| -(v + data.shift)).max(0);
        let k = from_roots.max(Int::from(from_rhs));
        let k: u32 = k.try_into().map_err(|_| Error::Input("pole order bound too large".into()))?;
        d = d.times(&f.pow(k));
    }
    Ok(d)
}

/// Bound on `deg(y·D)` for `D` the denominator bound; `−1` when no
/// numerator can exist.
pub fn degree_bound(l: &DiffOp, g: &RatFun) -> Result<i64> {
    let d = denominator_bound(l, g)?;
    let (_, g) = cleared_rhs(l, g);
    let inf = indicial_polynomial(l, &SingularPoint::Infinity)?;
    let from_roots = inf.integer_roots.last().map(|r| i64::try_from(r).unwrap_or(i64::MAX));
    let from_rhs = g.order_at_infinity().map(|o| -o - inf.shift);
    let e = match (from_roots, from_rhs) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Ok(-1),
    };
    let n = e + d.deg_i().unwrap();
    Ok(if n < 0 { -1 } else { n })
}

/// Bounds and system sizes behind a [`SolutionSpace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveBounds {
    pub denominator: String,
    pub degree_bound: i64,
    pub unknowns: usize,
    pub equations: usize,
}

/// Affine space of rational solutions of `L(y) = g`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSpace {
    pub particular: Option<RatFun>,
    pub homogeneous: Vec<RatFun>,
    pub bounds: SolveBounds,
}

impl SolutionSpace {
    fn checked(
        l: &DiffOp,
        g: &RatFun,
        particular: Option<RatFun>,
        mut homogeneous: Vec<RatFun>,
        bounds: SolveBounds,
    ) -> Result<Self> {
        if let Some(y) = &particular {
            if &l.apply(y) != g {
                return Err(Error::Check(format!("particular solution fails: {}", y.render("x"))));
            }
        }
        if let Some(y) = homogeneous.iter().find(|y| !l.apply(y).is_zero()) {
            return Err(Error::Check(format!("homogeneous solution fails: {}", y.render("x"))));
        }
        homogeneous.sort_by_key(|a| (a.den().degree(), a.num().degree()));
        Ok(SolutionSpace { particular, homogeneous, bounds })
    }

    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    /// Whether `y` is one of the solutions.
    pub fn contains(&self, y: &RatFun) -> bool {
        let Some(p) = &self.particular else { return false };
        let diff = y - p;
        if diff.is_zero() {
            return true;
        }
        // Write diff over the basis: coefficients are constants, so compare
        // in a linear system of sampled Laurent data via exact solve.
        let den = self.homogeneous.iter().fold(diff.den().clone(), |acc, h| {
            let g = Poly::gcd(&acc, h.den());
            acc.times(h.den()).div_exact(&g).unwrap()
        });
        let vec_of = |r: &RatFun| r.num().times(&den.div_exact(r.den()).unwrap());
        let cols: Vec<Poly> = self.homogeneous.iter().map(vec_of).collect();
        let target = vec_of(&diff);
        let len = cols.iter().chain([&target]).filter_map(|p| p.degree()).max().unwrap_or(0) + 1;
        let m = Matrix::from_fn(len, cols.len(), |i, j| cols[j].coeff(i));
        let rhs: Vec<Coeff> = (0..len).map(|i| target.coeff(i)).collect();
        !cols.is_empty() && m.solve(&rhs).is_some()
    }
}

fn poly_coeff_rat(p: &Poly, k: usize) -> Rat {
    p.coeff(k).as_rat().cloned().expect("rational coefficients")
}

/// Complete space of rational solutions of `L(y) = g`.
pub fn rational_solutions(l: &DiffOp, g: &RatFun) -> Result<SolutionSpace> {
    let d = denominator_bound(l, g)?;
    let n = degree_bound(l, g)?;
    let empty = |n: i64| SolveBounds { denominator: d.render("x"), degree_bound: n, unknowns: 0, equations: 0 };
    if n < 0 {
        let particular = g.is_zero().then(RatFun::zero);
        return SolutionSpace::checked(l, g, particular, vec![], empty(n));
    }
    let unknowns = n as usize + 1;
    let dr = RatFun::from_poly(d.clone());
    let images: Vec<RatFun> =
        (0..unknowns).map(|k| l.apply(&(&RatFun::from_poly(Poly::monomial(Coeff::one(), k)) / &dr))).collect();
    let common = images.iter().chain([g]).fold(Poly::one(), |acc, r| {
        let gg = Poly::gcd(&acc, r.den());
        acc.times(r.den()).div_exact(&gg).unwrap()
    });
    let num = |r: &RatFun| r.num().times(&common.div_exact(r.den()).unwrap());
    let cols: Vec<Poly> = images.iter().map(num).collect();
    let target = num(g);
    let equations = cols.iter().chain([&target]).filter_map(|p| p.degree()).max().unwrap_or(0) + 1;
    let m: Matrix<Rat> = Matrix::from_fn(equations, unknowns, |i, j| poly_coeff_rat(&cols[j], i));
    let rhs: Vec<Rat> = (0..equations).map(|i| poly_coeff_rat(&target, i)).collect();
    let to_ratfun = |c: &[Rat]| &RatFun::from_poly(Poly::from_rats(c)) / &dr;
    let particular = m.solve(&rhs).map(|c| to_ratfun(&c));
    let homogeneous = m.nullspace().iter().map(|c| to_ratfun(c)).collect();
    let bounds = SolveBounds { denominator: d.render("x"), degree_bound: n, unknowns, equations };
    SolutionSpace::checked(l, g, particular, homogeneous, bounds)
}

/// Rational solutions of `F′ = A·F + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSolutionSpace {
    pub particular: Option<Vec<RatFun>>,
    pub homogeneous: Vec<Vec<RatFun>>,
    /// Scalar equation actually solved.
    pub operator: DiffOp,
    pub rhs: RatFun,
    pub covector: Vec<RatFun>,
    pub scalar: SolutionSpace,
}

impl SystemSolutionSpace {
    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }
}

pub fn system_rational_solutions(a: &RatFunMatrix, b: &[RatFun]) -> Result<SystemSolutionSpace> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(Error::Dimension("system: size mismatch".into()));
    }
    if !a.entries().iter().chain(b).all(|x| x.is_rational()) {
        return Err(Error::Input("system must be over Q; specialize parameters first".into()));
    }
    let mut e1 = vec![RatFun::zero(); n];
    e1[0] = RatFun::one();
    let s = scalarize_with_retry(a, b, &e1, 0)?;
    let scalar = rational_solutions(&s.op, &s.rhs)?;
    let lift = |f: &RatFun, with_rhs: bool| -> Vec<RatFun> {
        let mut rhs = Vec::with_capacity(n);
        let mut d = f.clone();
        for i in 0..n {
            if i > 0 {
                d = d.derivative();
            }
            rhs.push(if with_rhs { &d - &s.h[i] } else { d.clone() });
        }
        s.w.solve(&rhs).expect("W is invertible")
    };
    let particular = scalar.particular.as_ref().map(|f| lift(f, true));
    let homogeneous: Vec<Vec<RatFun>> = scalar.homogeneous.iter().map(|f| lift(f, false)).collect();
    if let Some(f) = &particular {
        if system_residual(a, f, b).iter().any(|r| !r.is_zero()) {
            return Err(Error::Check("system solution fails".into()));
        }
    }
    let zero = vec![RatFun::zero(); n];
    if homogeneous.iter().any(|f| system_residual(a, f, &zero).iter().any(|r| !r.is_zero())) {
        return Err(Error::Check("homogeneous system solution fails".into()));
    }
    Ok(SystemSolutionSpace {
        particular,
        homogeneous,
        operator: s.op.clone(),
        rhs: s.rhs.clone(),
        covector: s.covector.clone(),
        scalar,
    })
}

/// Pole order of `L(y)` at `f` for `y` with a pole of order `d` there,
/// when `−d` is not an exponent of `L` at `f`.
pub fn image_pole_order(l: &DiffOp, f: &Poly, d: u32) -> Result<Option<i64>> {
    let f = f.monic();
    let data = indicial_polynomial(l, &SingularPoint::Finite(f.clone()))?;
    let (_, q) = cleared(l);
    let e = -(d as i64);
    if data.integer_roots.iter().any(|r| r == &Int::from(e)) {
        return Ok(None);
    }
    // Undo the clearing factor.
    Ok(Some(data.shift - e + valuation(&q, &f).0 as i64))
}
