use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::exactalg::{Coeff, Field, Param, Rat, RatFun};
use crate::{Error, Result};

/// Dense row-major matrix over a field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

pub type RatFunMatrix = Matrix<RatFun>;
pub type RatMatrix = Matrix<Rat>;

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn diag(entries: &[F]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<G: Field>(&self, f: impl Fn(&F) -> Result<G>) -> Result<Matrix<G>> {
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.negated())
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].plus(&a.times(b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(F::zero(), |acc, (a, b)| {
                    if a.is_zero() || b.is_zero() {
                        acc
                    } else {
                        acc.plus(&a.times(b))
                    }
                })
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.rows, v.len(), "shape mismatch");
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(F::zero(), |acc, i| {
                    if v[i].is_zero() || self[(i, j)].is_zero() {
                        acc
                    } else {
                        acc.plus(&v[i].times(&self[(i, j)]))
                    }
                })
            })
            .collect()
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn bracket(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Block diagonal matrix.
    pub fn block_diag(blocks: &[Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Reduced row echelon form and pivot columns. Pivots are chosen by
    /// `weight` (smallest first) to limit expression swell.
    pub fn rref_by(&self, weight: impl Fn(&F) -> usize) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let best = (r..m.rows).filter(|&i| !m[(i, c)].is_zero()).min_by_key(|&i| weight(&m[(i, c)]));
            let Some(p) = best else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m[(r, c)].inverse().unwrap();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].times(&inv);
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if !m[(r, j)].is_zero() {
                        m[(i, j)] = m[(i, j)].minus(&f.times(&m[(r, j)]));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rref(&self) -> (Self, Vec<usize>) {
        self.rref_by(|_| 0)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = r[(i, free)].negated();
            }
            out.push(v);
        }
        out
    }

    /// One solution of `self·x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows, "shape mismatch");
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (i, x) in b.iter().enumerate() {
            aug[(i, self.cols)] = x.clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Self::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.submatrix(0, n, n, n))
    }

    pub fn det(&self) -> F {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return F::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = det.negated();
            }
            let piv = m[(c, c)].clone();
            det = det.times(&piv);
            let inv = piv.inverse().unwrap();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].times(&inv);
                for j in c..n {
                    m[(i, j)] = m[(i, j)].minus(&f.times(&m[(c, j)]));
                }
            }
        }
        det
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc.plus(&self[(i, i)]))
    }

    /// Entries as a flat vector (row-major), for span computations.
    pub fn flatten(&self) -> Vec<F> {
        self.data.clone()
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }
}

impl Matrix<RatFun> {
    pub fn derivative(&self) -> Self {
        self.map(|x| x.derivative())
    }

    pub fn specialize(&self, a: &BTreeMap<Param, Rat>) -> Result<Self> {
        self.try_map(|x| x.specialize(a))
    }

    /// Entries as strings in the parse grammar, row-major.
    pub fn render_rows(&self, var: &str) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.render(var)).collect()).collect()
    }

    pub fn from_rat(m: &RatMatrix) -> Self {
        m.map(|x| RatFun::from_rat(x.clone()))
    }

    /// The matrix as a constant rational matrix, if it is one.
    pub fn to_rat(&self) -> Option<RatMatrix> {
        let data: Option<Vec<Rat>> = self.data.iter().map(|x| x.as_rat()).collect();
        Some(Matrix { rows: self.rows, cols: self.cols, data: data? })
    }

    /// The matrix as a constant matrix over ℚ(params), if it is one.
    pub fn to_coeff(&self) -> Option<Matrix<Coeff>> {
        let data: Option<Vec<Coeff>> = self.data.iter().map(|x| x.as_constant()).collect();
        Some(Matrix { rows: self.rows, cols: self.cols, data: data? })
    }

    /// Parses row strings in the exactalg grammar.
    pub fn parse(rows: &[&[&str]], var: &str, params: &[&str]) -> Result<Self> {
        let parsed: Vec<Vec<RatFun>> = rows
            .iter()
            .map(|r| r.iter().map(|s| crate::exactalg::parse::parse_ratfun(s, var, params)).collect())
            .collect::<Result<_>>()?;
        if parsed.iter().any(|r| r.len() != parsed[0].len()) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self::from_rows(parsed))
    }
}

impl Matrix<Coeff> {
    pub fn to_ratfun(&self) -> RatFunMatrix {
        self.map(|x| RatFun::constant(x.clone()))
    }
}

impl Matrix<Rat> {
    pub fn to_ratfun(&self) -> RatFunMatrix {
        self.map(|x| RatFun::from_rat(x.clone()))
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect()).collect())
    }

    pub fn render_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(crate::exactalg::fmt_rat).collect()).collect()
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> =
                self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| format!("{x:?}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Weight heuristic for pivoting over rational functions.
pub fn ratfun_weight(x: &RatFun) -> usize {
    x.num().degree().unwrap_or(0) + x.den().degree().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rint;

    #[test]
    fn inverse_and_det() {
        let m = RatMatrix::from_ints(&[&[2, 1], &[7, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMatrix::identity(2));
        assert_eq!(m.det(), rint(1));
        assert!(RatMatrix::from_ints(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn nullspace_and_solve() {
        let m = RatMatrix::from_ints(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x| x == &rint(0)));
        }
        let x = m.solve(&[rint(1), rint(2)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![rint(1), rint(2)]);
        assert!(m.solve(&[rint(1), rint(3)]).is_none());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn ratfun_inverse() {
        let t = RatFun::x();
        let m = RatFunMatrix::from_rows(vec![vec![RatFun::one(), t.clone()], vec![t.clone(), RatFun::one()]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatFunMatrix::identity(2));
    }
}
