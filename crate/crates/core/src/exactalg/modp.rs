//! Arithmetic modulo the Mersenne prime 2⁶¹ − 1, used to detect coprime
//! rational polynomials without running Euclid over ℚ.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::Rat;

const P: u64 = (1 << 61) - 1;

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

fn reduce_int(n: &BigInt) -> u64 {
    let m = n % BigInt::from(P);
    let m = if m < BigInt::zero() { m + BigInt::from(P) } else { m };
    m.to_u64().expect("residue below the modulus")
}

/// `None` when the prime divides a denominator.
fn reduce(r: &Rat) -> Option<u64> {
    let d = reduce_int(r.denom());
    (d != 0).then(|| mul(reduce_int(r.numer()), inv(d)))
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn rem(mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    let lead_inv = inv(*b.last().unwrap());
    while a.len() >= b.len() {
        let q = mul(*a.last().unwrap(), lead_inv);
        let shift = a.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            a[shift + i] = sub(a[shift + i], mul(q, *c));
        }
        trim(&mut a);
    }
    a
}

/// True when `a` and `b` are certainly coprime over ℚ: their images mod p
/// keep their degrees and have a constant gcd. A false answer means nothing.
pub(crate) fn certainly_coprime(a: &[Rat], b: &[Rat]) -> bool {
    let image = |v: &[Rat]| -> Option<Vec<u64>> {
        let out: Vec<u64> = v.iter().map(reduce).collect::<Option<_>>()?;
        (out.last() != Some(&0)).then_some(out)
    };
    let (Some(mut x), Some(mut y)) = (image(a), image(b)) else { return false };
    if x.is_empty() || y.is_empty() {
        return false;
    }
    while !y.is_empty() {
        let r = rem(x, &y);
        x = std::mem::replace(&mut y, r);
    }
    x.len() == 1
}
