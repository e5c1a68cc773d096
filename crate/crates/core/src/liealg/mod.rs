//! Lie algebras of constant matrices: closure under brackets, the algebra
//! attached to a system matrix, sl₂ detection and adjoint actions.

use std::fmt;

use crate::exactalg::{Coeff, Field, Poly, RatFun};
use crate::linops::{Matrix, RatFunMatrix};
use crate::{Error, Result};

/// Square matrix with entries in the parameter field.
pub type ConstMatrix = Matrix<Coeff>;

/// Checks that no entry depends on the main variable.
pub fn const_matrix(a: &RatFunMatrix) -> Result<ConstMatrix> {
    a.to_coeff().ok_or_else(|| Error::Input("matrix entries depend on the main variable".into()))
}

pub fn bracket(m: &ConstMatrix, n: &ConstMatrix) -> Result<ConstMatrix> {
    if !m.is_square() || m.rows() != n.rows() || m.cols() != n.cols() {
        return Err(Error::Dimension(format!("bracket of {}x{} and {}x{}", m.rows(), m.cols(), n.rows(), n.cols())));
    }
    Ok(m.bracket(n))
}

/// Incremental row echelon form that remembers how each row was built from
/// the inserted vectors.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<(usize, Vec<Coeff>, Vec<Coeff>)>,
    inserted: usize,
}

impl Echelon {
    /// Reduces `v`; returns the remainder and the combination of inserted
    /// vectors subtracted.
    fn reduce(&self, v: &[Coeff]) -> (Vec<Coeff>, Vec<Coeff>) {
        let mut v = v.to_vec();
        let mut combo = vec![Coeff::zero(); self.inserted];
        for (p, row, rc) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = x.minus(&f.times(r));
                }
            }
            for (c, r) in combo.iter_mut().zip(rc) {
                if !r.is_zero() {
                    *c = c.plus(&f.times(r));
                }
            }
        }
        (v, combo)
    }

    /// Inserts `v` if independent; returns whether it was.
    fn insert(&mut self, v: &[Coeff]) -> bool {
        let (rem, combo) = self.reduce(v);
        let Some(p) = rem.iter().position(|x| !x.is_zero()) else { return false };
        let inv = rem[p].inverse().unwrap();
        let row: Vec<Coeff> = rem.iter().map(|x| x.times(&inv)).collect();
        // row = (v − Σ combo·basis)/rem[p]
        let mut rc: Vec<Coeff> = combo.iter().map(|c| c.negated().times(&inv)).collect();
        rc.push(inv);
        for (_, _, r) in self.rows.iter_mut() {
            r.push(Coeff::zero());
        }
        self.rows.push((p, row, rc));
        self.inserted += 1;
        true
    }

    /// Coordinates of `v` in the inserted vectors, if it lies in their span.
    fn coords(&self, v: &[Coeff]) -> Option<Vec<Coeff>> {
        let (rem, combo) = self.reduce(v);
        rem.iter().all(|x| x.is_zero()).then_some(combo)
    }
}

/// Bracket-closed span with its structure constants.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraBasis {
    pub size: usize,
    pub basis: Vec<ConstMatrix>,
    /// `structure[i][j]` are the coordinates of `[bᵢ, bⱼ]`.
    pub structure: Vec<Vec<Vec<Coeff>>>,
    /// Basis indices `(x, y)` with `h = [x, y]` completing an sl₂ triplet.
    pub sl2_pair: Option<(usize, usize)>,
}

impl LieAlgebraBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn echelon(&self) -> Echelon {
        let mut e = Echelon::default();
        for b in &self.basis {
            e.insert(&b.flatten());
        }
        e
    }

    /// Coordinates of `m` in the basis, if it lies in the span.
    pub fn coords(&self, m: &ConstMatrix) -> Option<Vec<Coeff>> {
        if m.rows() != self.size || m.cols() != self.size {
            return None;
        }
        self.echelon().coords(&m.flatten())
    }

    pub fn contains(&self, m: &ConstMatrix) -> bool {
        self.coords(m).is_some()
    }

    /// Same span, compared as subspaces.
    pub fn same_span(&self, other: &LieAlgebraBasis) -> bool {
        self.dim() == other.dim() && other.basis.iter().all(|b| self.contains(b))
    }

    /// Re-checks independence and every structure constant by brackets.
    pub fn verify(&self) -> bool {
        let mut e = Echelon::default();
        if !self.basis.iter().all(|b| e.insert(&b.flatten())) {
            return false;
        }
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let expect = self
                    .basis
                    .iter()
                    .zip(&self.structure[i][j])
                    .fold(Matrix::zeros(self.size, self.size), |acc, (m, c)| acc.add(&m.scale(c)));
                if a.bracket(b) != expect {
                    return false;
                }
            }
        }
        true
    }
}

/// Smallest bracket-closed span containing `gens`: breadth-first over
/// brackets, each candidate kept only if it raises the rank.
pub fn lie_closure(gens: &[ConstMatrix]) -> Result<LieAlgebraBasis> {
    let size = gens.first().ok_or_else(|| Error::Input("no generators".into()))?.rows();
    if gens.iter().any(|g| g.rows() != size || g.cols() != size) {
        return Err(Error::Dimension("generators of different sizes".into()));
    }
    let mut ech = Echelon::default();
    let mut basis: Vec<ConstMatrix> = Vec::new();
    let mut queue: std::collections::VecDeque<ConstMatrix> = gens.iter().cloned().collect();
    while let Some(g) = queue.pop_front() {
        if g.is_zero() || !ech.insert(&g.flatten()) {
            continue;
        }
        for b in &basis {
            queue.push_back(b.bracket(&g));
        }
        basis.push(g);
    }
    let d = basis.len();
    let mut structure = vec![vec![vec![Coeff::zero(); d]; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let c = ech
                .coords(&basis[i].bracket(&basis[j]).flatten())
                .ok_or_else(|| Error::Check("closure is not bracket-closed".into()))?;
            structure[j][i] = c.iter().map(|x| x.negated()).collect();
            structure[i][j] = c;
        }
    }
    let sl2_pair = find_sl2_pair(&structure);
    Ok(LieAlgebraBasis { size, basis, structure, sl2_pair })
}

/// Looks for `x, y` with `h = [x, y]`, `[h, x] = 2x`, `[h, y] = −2y`,
/// working on structure constants only.
fn find_sl2_pair(s: &[Vec<Vec<Coeff>>]) -> Option<(usize, usize)> {
    let d = s.len();
    let ad = |h: &[Coeff], k: usize| -> Vec<Coeff> {
        (0..d)
            .map(|m| h.iter().enumerate().fold(Coeff::zero(), |acc, (l, c)| acc.plus(&c.times(&s[l][k][m]))))
            .collect()
    };
    for (i, row) in s.iter().enumerate() {
        for (j, h) in row.iter().enumerate() {
            if i == j || h.iter().all(|c| c.is_zero()) {
                continue;
            }
            let unit = |k: usize, v: i64| {
                (0..d).map(|m| if m == k { Coeff::from(v) } else { Coeff::zero() }).collect::<Vec<_>>()
            };
            if ad(h, i) == unit(i, 2) && ad(h, j) == unit(j, -2) {
                return Some((i, j));
            }
        }
    }
    None
}

/// `A = Σ aᵢ(x)·Mᵢ` with the `aᵢ` independent over the constants.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub functions: Vec<RatFun>,
    pub matrices: Vec<ConstMatrix>,
}

/// Minimal decomposition of `A`; the `aᵢ` are the reduced echelon basis of
/// the entries' numerators over a common denominator, by ascending power.
pub fn associated_lie_algebra(a: &RatFunMatrix) -> Result<Decomposition> {
    let mut den = Poly::one();
    for e in a.entries() {
        let g = Poly::gcd(&den, e.den());
        den = den.times(e.den()).div_exact(&g).unwrap();
    }
    let nums: Vec<Poly> = a.entries().iter().map(|e| e.num().times(&den.div_exact(e.den()).unwrap())).collect();
    let len = nums.iter().filter_map(|p| p.degree()).max().map_or(0, |d| d + 1);
    let rows = Matrix::from_fn(nums.len(), len, |i, j| nums[i].coeff(j));
    let (r, pivots) = rows.rref();
    let functions: Vec<RatFun> = (0..pivots.len())
        .map(|k| RatFun::new(Poly::from_coeffs((0..len).map(|j| r[(k, j)].clone()).collect()), den.clone()))
        .collect();
    let matrices: Vec<ConstMatrix> = pivots
        .iter()
        .map(|&p| Matrix::from_flat(a.rows(), a.cols(), nums.iter().map(|n| n.coeff(p)).collect()))
        .collect();
    let rebuilt = functions
        .iter()
        .zip(&matrices)
        .fold(RatFunMatrix::zeros(a.rows(), a.cols()), |acc, (f, m)| acc.add(&m.to_ratfun().scale(f)));
    if &rebuilt != a {
        return Err(Error::Check("decomposition does not reproduce the matrix".into()));
    }
    Ok(Decomposition { functions, matrices })
}

/// Result of testing `[X,Y] = H`, `[H,X] = 2X`, `[H,Y] = −2Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripletCheck {
    pub holds: bool,
    /// All three matrices vanish: the relations hold in the abelian sense only.
    pub abelian: bool,
}

pub fn sl2_triplet_check(x: &ConstMatrix, y: &ConstMatrix, h: &ConstMatrix) -> Result<TripletCheck> {
    let xy = bracket(x, y)?;
    let hx = bracket(h, x)?;
    let hy = bracket(h, y)?;
    let holds = &xy == h && hx == x.scale(&Coeff::from(2)) && hy == y.scale(&Coeff::from(-2));
    Ok(TripletCheck { holds, abelian: x.is_zero() && y.is_zero() && h.is_zero() })
}

/// Matrix `Ψ` of `[D, ·]` on `span(F)`: `[D, Fⱼ] = Σᵢ Ψᵢⱼ Fᵢ`.
pub fn adjoint_action_matrix(diag: &RatFunMatrix, offbasis: &[ConstMatrix]) -> Result<RatFunMatrix> {
    let d = offbasis.len();
    if d == 0 {
        return Ok(RatFunMatrix::zeros(0, 0));
    }
    let m = diag.rows();
    if offbasis.iter().any(|f| f.rows() != m || f.cols() != m) || !diag.is_square() {
        return Err(Error::Dimension("adjoint action: size mismatch".into()));
    }
    let fs: Vec<RatFunMatrix> = offbasis.iter().map(|f| f.to_ratfun()).collect();
    let basis = Matrix::from_fn(m * m, d, |r, c| fs[c].entries()[r].clone());
    let mut psi = RatFunMatrix::zeros(d, d);
    for (j, f) in fs.iter().enumerate() {
        let b = diag.bracket(f).flatten();
        let c = basis.solve(&b).ok_or(Error::NotInvariantSubspace)?;
        for (i, x) in c.into_iter().enumerate() {
            psi[(i, j)] = x;
        }
    }
    if basis.rank() < d {
        return Err(Error::Input("adjoint action: dependent basis".into()));
    }
    Ok(psi)
}

/// Possible Lie algebras of an order-`n` linearized normal variational
/// system of the Airy family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LnveClass {
    Sl2,
    Sl2SymNMinus1,
    Sl2SymNPlus1,
    Sl2SymBoth,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LnveClassification {
    pub class: LnveClass,
    pub n: usize,
    pub dim: usize,
    /// Basis of the part supported in the off-diagonal block.
    pub ideal: Vec<ConstMatrix>,
}

impl LnveClassification {
    pub fn tag(&self) -> String {
        let n = self.n;
        match self.class {
            LnveClass::Sl2 => "sl2".into(),
            LnveClass::Sl2SymNMinus1 => format!("sl2⋉Sym^{}", n - 1),
            LnveClass::Sl2SymNPlus1 => format!("sl2⋉Sym^{}", n + 1),
            LnveClass::Sl2SymBoth => format!("sl2⋉(Sym^{}⊕Sym^{})", n - 1, n + 1),
        }
    }
}

impl fmt::Display for LnveClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Matches a closure on the `(n+1) + 2` block layout against the four
/// possible structures, by dimension and by the dimension of the part
/// living in the lower-left block.
pub fn classify_lnve_lie_algebra(basis: &LieAlgebraBasis, n: usize) -> Result<LnveClassification> {
    let m = n + 3;
    if basis.size != m {
        return Err(Error::Dimension(format!("expected {m}x{m} matrices, got {}", basis.size)));
    }
    let d = basis.dim();
    let class = match d {
        3 => LnveClass::Sl2,
        _ if d == n + 3 => LnveClass::Sl2SymNMinus1,
        _ if d == n + 5 => LnveClass::Sl2SymNPlus1,
        _ if d == 2 * n + 5 => LnveClass::Sl2SymBoth,
        _ => return Err(Error::UnexpectedStructure(format!("Lie algebra of dimension {d} for n = {n}"))),
    };
    let in_block = |r: usize, c: usize| r > n && c <= n;
    let outside: Vec<usize> = (0..m * m).filter(|&k| !in_block(k / m, k % m)).collect();
    let q = Matrix::from_fn(outside.len(), d, |r, c| basis.basis[c].entries()[outside[r]].clone());
    let ideal: Vec<ConstMatrix> = q
        .nullspace()
        .into_iter()
        .map(|c| basis.basis.iter().zip(&c).fold(Matrix::zeros(m, m), |acc, (b, x)| acc.add(&b.scale(x))))
        .collect();
    if ideal.len() + 3 != d {
        return Err(Error::UnexpectedStructure(format!(
            "dimension {d} with a {}-dimensional off-diagonal part",
            ideal.len()
        )));
    }
    Ok(LnveClassification { class, n, dim: d, ideal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Param;
    use crate::jets::{build_lnve_airy_family, build_p3_chain, P3Spec};
    use crate::linops::sym_power_matrix;

    fn ints(rows: &[&[i64]]) -> ConstMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Coeff::from(x)).collect()).collect())
    }

    /// `X, Y, H, E₀..E₄` for the third-order Painlevé II system.
    pub(crate) fn p2_basis() -> (ConstMatrix, ConstMatrix, ConstMatrix, Vec<ConstMatrix>) {
        let x = ints(&[
            &[0, 1, 0, 0, 0, 0],
            &[0, 0, 2, 0, 0, 0],
            &[0, 0, 0, 3, 0, 0],
            &[0, 0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 0, 0],
        ]);
        let y = ints(&[
            &[0, 0, 0, 0, 0, 0],
            &[3, 0, 0, 0, 0, 0],
            &[0, 2, 0, 0, 0, 0],
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 1, 0],
        ]);
        let h = x.bracket(&y);
        let blocks: [[[i64; 4]; 2]; 5] = [
            [[0, 0, 0, 0], [1, 0, 0, 0]],
            [[1, 0, 0, 0], [0, -1, 0, 0]],
            [[0, -1, 0, 0], [0, 0, 1, 0]],
            [[0, 0, 1, 0], [0, 0, 0, -1]],
            [[0, 0, 0, -1], [0, 0, 0, 0]],
        ];
        let e = blocks
            .iter()
            .map(|b| {
                let mut m = Matrix::zeros(6, 6);
                for r in 0..2 {
                    for c in 0..4 {
                        m[(4 + r, c)] = Coeff::from(b[r][c]);
                    }
                }
                m
            })
            .collect();
        (x, y, h, e)
    }

    #[test]
    fn brackets() {
        let (x, y, h, _) = p2_basis();
        assert_eq!(h, Matrix::diag(&[3, 1, -1, -3, 1, -1].map(Coeff::from)));
        assert!(bracket(&x, &x).unwrap().is_zero());
        assert!(bracket(&x, &ints(&[&[1]])).is_err());
        let t = sl2_triplet_check(&x, &y, &h).unwrap();
        assert!(t.holds && !t.abelian);
        let z = Matrix::zeros(2, 2);
        assert_eq!(sl2_triplet_check(&z, &z, &z).unwrap(), TripletCheck { holds: true, abelian: true });
    }

    #[test]
    fn p2_bracket_table_and_closure() {
        let (x, y, h, e) = p2_basis();
        let z = Matrix::zeros(6, 6);
        for i in 0..5 {
            let up = if i < 4 { e[i + 1].scale(&Coeff::from(i as i64 + 1)) } else { z.clone() };
            let down = if i > 0 { e[i - 1].scale(&Coeff::from(5 - i as i64)) } else { z.clone() };
            assert_eq!(x.bracket(&e[i]), up);
            assert_eq!(y.bracket(&e[i]), down);
            assert_eq!(h.bracket(&e[i]), e[i].scale(&Coeff::from(2 * i as i64 - 4)));
            for ej in &e {
                assert!(e[i].bracket(ej).is_zero());
            }
        }
        let named: Vec<ConstMatrix> = [x.clone(), y.clone(), h].into_iter().chain(e.iter().cloned()).collect();
        // E₁ = [X, E₀] and [E₀, Y] = 0, so X + E₁ is conjugate to X with Y fixed.
        let conj = lie_closure(&[x.add(&e[1]), y.clone()]).unwrap();
        assert_eq!(conj.dim(), 3);
        assert!(conj.sl2_pair.is_some());
        for c in [1, 12] {
            let l = lie_closure(&[x.add(&e[0].scale(&Coeff::from(c))), y.clone()]).unwrap();
            assert_eq!(l.dim(), 8);
            assert!(l.verify());
            assert!(named.iter().all(|m| l.contains(m)));
            let c = classify_lnve_lie_algebra(&l, 3).unwrap();
            assert_eq!(c.class, LnveClass::Sl2SymNPlus1);
            assert_eq!(c.tag(), "sl2⋉Sym^4");
            assert_eq!(c.ideal.len(), 5);
        }
        let l = lie_closure(&named).unwrap();
        assert_eq!(lie_closure(&l.basis).unwrap().basis, l.basis);
    }

    #[test]
    fn small_closures() {
        assert_eq!(lie_closure(&[ints(&[&[1, 0], &[0, 2]])]).unwrap().dim(), 1);
        let l = lie_closure(&[ints(&[&[0, 1], &[0, 0]]), ints(&[&[0, 0], &[1, 0]])]).unwrap();
        assert_eq!(l.dim(), 3);
        assert_eq!(l.sl2_pair, Some((0, 1)));
    }

    #[test]
    fn decomposition_of_system_matrices() {
        let a = build_lnve_airy_family(3, &RatFun::from(12));
        let dec = associated_lie_algebra(&a).unwrap();
        assert_eq!(dec.functions, vec![RatFun::one(), RatFun::x()]);
        let (x, y, _, e) = p2_basis();
        assert_eq!(dec.matrices, vec![x.add(&e[0].scale(&Coeff::from(12))), y]);

        let chain = build_p3_chain(&P3Spec::symbolic()).unwrap();
        let dec = associated_lie_algebra(&chain.a_tilde[0]).unwrap();
        assert_eq!(dec.functions, vec![RatFun::x().pow(-1), RatFun::one()]);
        let mu = Coeff::param(Param::new("mu"));
        let c0 = Matrix::from_rows(vec![vec![Coeff::zero(), Coeff::one()], vec![Coeff::zero(), Coeff::zero()]]);
        let cinf = Matrix::from_rows(vec![
            vec![Coeff::zero(), mu.inverse().unwrap()],
            vec![mu.times(&Coeff::from(4)), Coeff::zero()],
        ]);
        assert_eq!(dec.matrices, vec![c0, cinf.clone()]);
        let k = ints(&[&[1, 2], &[3, 4]]).to_ratfun();
        assert_eq!(associated_lie_algebra(&k).unwrap().matrices, vec![const_matrix(&k).unwrap()]);
    }

    #[test]
    fn adjoint_on_recursion_basis() {
        for n in 2..=4usize {
            let a = build_lnve_airy_family(n, &RatFun::zero());
            let dec = associated_lie_algebra(&a).unwrap();
            let (x, y) = (&dec.matrices[0], &dec.matrices[1]);
            let mut e0 = Matrix::zeros(n + 3, n + 3);
            e0[(n + 2, 0)] = Coeff::one();
            let mut f = vec![e0];
            for i in 0..=n {
                let next = x.bracket(&f[i]).scale(&Coeff::from(-1).quotient(&Coeff::from(i as i64 + 1)));
                f.push(next);
            }
            let diag = x.to_ratfun().add(&y.to_ratfun().scale(&RatFun::x()));
            let psi = adjoint_action_matrix(&diag, &f).unwrap();
            let a1 = crate::jets::airy_matrix();
            assert_eq!(psi, sym_power_matrix(&a1, n + 1).transpose().neg(), "n={n}");
            for i in 1..f.len() {
                assert_eq!(y.bracket(&f[i]), f[i - 1].scale(&Coeff::from(-((n + 2 - i) as i64))));
            }
        }
    }

    #[test]
    fn adjoint_errors() {
        let a = ints(&[&[0, 1], &[0, 0]]).to_ratfun();
        let e = ints(&[&[0, 0], &[1, 0]]);
        assert!(matches!(adjoint_action_matrix(&a, std::slice::from_ref(&e)), Err(Error::NotInvariantSubspace)));
        let id = RatFunMatrix::identity(2);
        assert!(adjoint_action_matrix(&id, &[e]).unwrap().is_zero());
    }

    #[test]
    fn p3_third_order_algebra() {
        let chain = build_p3_chain(&P3Spec::symbolic()).unwrap();
        let dec = associated_lie_algebra(&chain.a_tilde[2]).unwrap();
        assert_eq!(dec.functions.len(), 2);
        let l = lie_closure(&dec.matrices).unwrap();
        assert_eq!(l.dim(), 8);
    }

    #[test]
    fn family_classification() {
        let class = |n: usize, p: RatFun| {
            let dec = associated_lie_algebra(&build_lnve_airy_family(n, &p)).unwrap();
            classify_lnve_lie_algebra(&lie_closure(&dec.matrices).unwrap(), n).unwrap()
        };
        assert_eq!(class(2, RatFun::zero()).class, LnveClass::Sl2);
        let c = class(2, RatFun::x());
        assert_eq!((c.class, c.dim), (LnveClass::Sl2SymNPlus1, 7));
        let c = class(3, RatFun::from(12));
        assert_eq!((c.class, c.dim, c.tag()), (LnveClass::Sl2SymNPlus1, 8, "sl2⋉Sym^4".to_string()));
    }

    #[test]
    fn unexpected_dimension() {
        let l = lie_closure(&[ints(&[&[1, 0, 0, 0, 0], &[0; 5], &[0; 5], &[0; 5], &[0; 5]])]).unwrap();
        assert!(matches!(classify_lnve_lie_algebra(&l, 2), Err(Error::UnexpectedStructure(_))));
    }
}
