//! Polynomial vector fields on the plane and the splitting of a
//! homogeneous field into a radial part and a Hamiltonian part.

use crate::exactalg::parse::parse_coeff;
use crate::exactalg::{MPoly, Param, Rat};
use crate::{Error, Result};

fn xy() -> (Param, Param) {
    (Param::new("x"), Param::new("y"))
}

/// `A ∂x + B ∂y` with polynomial components over ℚ.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField2 {
    pub a: MPoly,
    pub b: MPoly,
}

impl VectorField2 {
    pub fn new(a: MPoly, b: MPoly) -> Self {
        VectorField2 { a, b }
    }

    /// Parses both components as polynomials in `x, y`.
    pub fn parse(a: &str, b: &str) -> Result<Self> {
        let p = |s: &str| -> Result<MPoly> {
            let c = parse_coeff(s, &["x", "y"])?;
            if !c.den().is_one() {
                return Err(Error::Input(format!("not a polynomial: {s}")));
            }
            Ok(c.num())
        };
        Ok(VectorField2 { a: p(a)?, b: p(b)? })
    }

    /// Radial field `x∂x + y∂y`.
    pub fn euler() -> Self {
        let (x, y) = xy();
        VectorField2 { a: MPoly::var(x), b: MPoly::var(y) }
    }

    /// `J∇K = (∂K/∂y)∂x − (∂K/∂x)∂y`.
    pub fn hamiltonian(k: &MPoly) -> Self {
        let (x, y) = xy();
        VectorField2 { a: k.derivative(y), b: k.derivative(x).neg() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Applies the field as a derivation.
    pub fn apply(&self, f: &MPoly) -> MPoly {
        let (x, y) = xy();
        self.a.mul(&f.derivative(x)).add(&self.b.mul(&f.derivative(y)))
    }

    /// Lie bracket `[U, V] = U(V) − V(U)` componentwise.
    pub fn bracket(&self, rhs: &VectorField2) -> VectorField2 {
        VectorField2 { a: self.apply(&rhs.a).sub(&rhs.apply(&self.a)), b: self.apply(&rhs.b).sub(&rhs.apply(&self.b)) }
    }

    pub fn scale(&self, c: &Rat) -> VectorField2 {
        VectorField2 { a: self.a.scale(c), b: self.b.scale(c) }
    }

    pub fn add(&self, rhs: &VectorField2) -> VectorField2 {
        VectorField2 { a: self.a.add(&rhs.a), b: self.b.add(&rhs.b) }
    }

    pub fn mul_fn(&self, g: &MPoly) -> VectorField2 {
        VectorField2 { a: self.a.mul(g), b: self.b.mul(g) }
    }
}

fn homogeneous_degree(p: &MPoly) -> Option<u32> {
    let mut ds = p.terms().map(|(m, _)| m.degree());
    let d = ds.next()?;
    ds.all(|e| e == d).then_some(d)
}

/// `A∂x + B∂y = G·(x∂x + y∂y) + J∇K` for homogeneous `A, B` of degree
/// `n`, with `G = (∂A/∂x + ∂B/∂y)/(n+1)` and `K = (yA − xB)/(n+1)`.
pub fn vf_decompose(a: &MPoly, b: &MPoly) -> Result<(MPoly, MPoly)> {
    let n = match (homogeneous_degree(a), homogeneous_degree(b)) {
        (Some(p), Some(q)) if p == q && p >= 1 => p,
        (Some(p), None) if b.is_zero() && p >= 1 => p,
        (None, Some(q)) if a.is_zero() && q >= 1 => q,
        _ => return Err(Error::NotHomogeneous(format!("A = {a}, B = {b}"))),
    };
    let (x, y) = xy();
    let inv = Rat::new(1.into(), (n as i64 + 1).into());
    let g = a.derivative(x).add(&b.derivative(y)).scale(&inv);
    let k = MPoly::var(y).mul(a).sub(&MPoly::var(x).mul(b)).scale(&inv);
    let rebuilt = VectorField2::euler().mul_fn(&g).add(&VectorField2::hamiltonian(&k));
    if rebuilt != VectorField2::new(a.clone(), b.clone()) {
        return Err(Error::Check("radial/Hamiltonian reconstruction failed".into()));
    }
    Ok((g, k))
}

/// `Eᵢ = J∇Kᵢ/(n+1)` with `Kᵢ = C(n+1,i) x^(n+1−i) yⁱ`, `i = 0..=n+1`.
pub fn hamiltonian_basis(n: usize) -> Vec<VectorField2> {
    let (x, y) = xy();
    let inv = Rat::new(1.into(), (n as i64 + 1).into());
    let mut binom = Rat::from_integer(1.into());
    (0..=n + 1)
        .map(|i| {
            if i > 0 {
                binom = &binom * Rat::new(((n + 2 - i) as i64).into(), (i as i64).into());
            }
            let k = MPoly::var(x).pow((n + 1 - i) as u32).mul(&MPoly::var(y).pow(i as u32)).scale(&binom);
            VectorField2::hamiltonian(&k).scale(&inv)
        })
        .collect()
}
