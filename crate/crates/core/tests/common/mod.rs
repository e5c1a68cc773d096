//! Random instance builders shared by the property suite and the acceptance
//! harness. Everything is driven by a seeded `ChaCha8Rng`, so a failing seed
//! reproduces exactly.

#![allow(dead_code)]

use irred_core::exactalg::{rat, Coeff, Poly, RatFun};
use irred_core::liealg::ConstMatrix;
use irred_core::linops::{DiffOp, Matrix, RatFunMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_poly(r: &mut ChaCha8Rng, max_deg: usize, bound: i64) -> Poly {
    let deg = r.gen_range(0..=max_deg);
    Poly::from_ints(&(0..=deg).map(|_| r.gen_range(-bound..=bound)).collect::<Vec<_>>())
}

pub fn nonzero_poly(r: &mut ChaCha8Rng, max_deg: usize, bound: i64) -> Poly {
    loop {
        let p = small_poly(r, max_deg, bound);
        if !p.is_zero() {
            return p;
        }
    }
}

/// `Π (x − a)^k` with integer roots in `-3..=3`.
pub fn root_product(r: &mut ChaCha8Rng, factors: usize) -> Poly {
    (0..factors).fold(Poly::one(), |acc, _| {
        let a = r.gen_range(-3..=3);
        let k = r.gen_range(1..=2);
        acc.times(&Poly::from_ints(&[-a, 1]).pow(k))
    })
}

pub fn small_ratfun(r: &mut ChaCha8Rng) -> RatFun {
    let k = r.gen_range(0..=1);
    let den = root_product(r, k);
    RatFun::new(small_poly(r, 2, 4), den)
}

/// Operator of the given order with polynomial coefficients and a nonzero
/// leading coefficient.
pub fn poly_operator(r: &mut ChaCha8Rng, order: usize) -> DiffOp {
    let mut c: Vec<RatFun> = (0..order).map(|_| RatFun::from_poly(small_poly(r, 2, 3))).collect();
    c.push(RatFun::from_poly(nonzero_poly(r, 2, 3)));
    DiffOp::new(c)
}

pub fn ratfun_operator(r: &mut ChaCha8Rng, order: usize) -> DiffOp {
    let mut c: Vec<RatFun> = (0..order).map(|_| small_ratfun(r)).collect();
    c.push(RatFun::from_poly(nonzero_poly(r, 1, 3)));
    DiffOp::new(c)
}

/// A planted rational solution `N / D` with `D` a product of linear powers.
pub fn planted_solution(r: &mut ChaCha8Rng) -> RatFun {
    let k = r.gen_range(0..=2);
    let den = root_product(r, k);
    RatFun::new(nonzero_poly(r, 3, 5), den)
}

pub fn const_matrix(r: &mut ChaCha8Rng, n: usize) -> ConstMatrix {
    let data = (0..n * n).map(|_| Coeff::from(rat(r.gen_range(-5..=5), r.gen_range(1..=3)))).collect();
    Matrix::from_flat(n, n, data)
}

/// Invertible gauge with entries of degree at most one.
pub fn linear_gauge(r: &mut ChaCha8Rng, n: usize) -> RatFunMatrix {
    loop {
        let rows = (0..n).map(|_| (0..n).map(|_| RatFun::from_poly(small_poly(r, 1, 3))).collect()).collect();
        let p = Matrix::from_rows(rows);
        if !p.det().is_zero() {
            return p;
        }
    }
}

pub fn ratfun_matrix(r: &mut ChaCha8Rng, n: usize) -> RatFunMatrix {
    let rows = (0..n).map(|_| (0..n).map(|_| small_ratfun(r)).collect()).collect();
    Matrix::from_rows(rows)
}
