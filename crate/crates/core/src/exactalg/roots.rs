//! Rational roots and factorization over ℚ (linear factors split off,
//! higher-degree squarefree factors kept whole).

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Coeff, Int, Poly, Rat};

/// Primitive integer polynomial proportional to `p`, positive leading term.
fn to_primitive_int(p: &[Rat]) -> Vec<Int> {
    let l = p.iter().fold(Int::one(), |acc, c| acc.lcm(c.denom()));
    let mut v: Vec<Int> = p.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = v.iter().fold(Int::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    if v.last().is_some_and(|c| c.is_negative()) {
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }
    v
}

fn rat_poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = b[db].recip();
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() * &inv;
        for (i, bc) in b.iter().enumerate() {
            r[i + k] = &r[i + k] - &c * bc;
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

fn rat_poly_eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

fn sturm_sequence(p: &[Rat]) -> Vec<Vec<Rat>> {
    let dp: Vec<Rat> = p.iter().enumerate().skip(1).map(|(k, c)| c * Rat::from_integer(Int::from(k))).collect();
    let mut seq = vec![p.to_vec()];
    if dp.is_empty() {
        return seq;
    }
    seq.push(dp);
    loop {
        let n = seq.len();
        let r = rat_poly_rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn variations(seq: &[Vec<Rat>], x: &Rat) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for p in seq {
        let v = rat_poly_eval(p, x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Integer roots of a monic integer polynomial with only integral rational
/// roots, located by Sturm bisection between half-integers.
fn integer_roots_monic(q: &[Int]) -> Vec<Int> {
    let qr: Vec<Rat> = q.iter().cloned().map(Rat::from_integer).collect();
    // Squarefree part keeps the Sturm count exact.
    let dq: Vec<Rat> = qr.iter().enumerate().skip(1).map(|(k, c)| c * Rat::from_integer(Int::from(k))).collect();
    let sq = if dq.is_empty() {
        qr.clone()
    } else {
        let g = Poly::gcd(&Poly::from_rats(&qr), &Poly::from_rats(&dq));
        Poly::from_rats(&qr).div_exact(&g).unwrap().to_rats().unwrap()
    };
    if sq.len() <= 1 {
        return Vec::new();
    }
    let seq = sturm_sequence(&sq);
    let bound: Int = q.iter().map(|c| c.abs()).max().unwrap() + Int::one();
    let half = Rat::new(Int::one(), Int::from(2));
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let a = Rat::from_integer(lo.clone()) - &half;
        let b = Rat::from_integer(hi.clone()) + &half;
        let count = variations(&seq, &a) as i64 - variations(&seq, &b) as i64;
        if count <= 0 {
            continue;
        }
        if lo == hi {
            if rat_poly_eval(&sq, &Rat::from_integer(lo.clone())).is_zero() {
                out.push(lo);
            }
            continue;
        }
        let mid = (&lo + &hi).div_floor(&Int::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid + Int::one(), hi));
    }
    out.sort();
    out
}

/// Distinct rational roots of a nonzero polynomial over ℚ, ascending.
pub fn rational_roots_of(p: &[Rat]) -> Vec<Rat> {
    let v = to_primitive_int(p);
    let d = match v.len().checked_sub(1) {
        Some(d) if d > 0 => d,
        _ => return Vec::new(),
    };
    let an = v[d].clone();
    // q(y) = an^(d-1) p(y/an) is monic with integer coefficients.
    let q: Vec<Int> = v
        .iter()
        .enumerate()
        .map(|(i, c)| if i == d { Int::one() } else { c * num_traits::pow(an.clone(), d - 1 - i) })
        .collect();
    let mut roots: Vec<Rat> = integer_roots_monic(&q).into_iter().map(|y| Rat::new(y, an.clone())).collect();
    roots.sort();
    roots
}

/// Distinct rational roots of `p`; empty unless `p` has rational coefficients.
pub fn rational_roots(p: &Poly) -> Vec<Rat> {
    match p.to_rats() {
        Some(v) if !v.is_empty() => rational_roots_of(&v),
        _ => Vec::new(),
    }
}

/// Distinct integer roots of `p`, ascending.
pub fn integer_roots(p: &Poly) -> Vec<Int> {
    rational_roots(p).into_iter().filter(|r| r.is_integer()).map(|r| r.to_integer()).collect()
}

/// Monic factors of `p` with multiplicities: linear factors for rational
/// roots, remaining squarefree cofactors unsplit. Sorted by degree, then
/// by root or printed form.
pub fn factor_over_q(p: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    for (f, m) in p.squarefree() {
        if !f.is_rational() {
            out.push((f, m));
            continue;
        }
        let mut rest = f;
        for r in rational_roots(&rest) {
            let lin = Poly::linear(Coeff::Rat(r));
            rest = rest.div_exact(&lin).unwrap();
            out.push((lin, m));
        }
        if !rest.is_constant() {
            out.push((rest.monic(), m));
        }
    }
    out.sort_by(|(a, _), (b, _)| {
        a.degree().cmp(&b.degree()).then_with(|| {
            let ra = a.coeff(0).as_rat().cloned();
            let rb = b.coeff(0).as_rat().cloned();
            // Linear factors x - r: order by r.
            match (a.degree(), ra, rb) {
                (Some(1), Some(x), Some(y)) => y.cmp(&x),
                _ => a.render("x").cmp(&b.render("x")),
            }
        })
    });
    out
}
