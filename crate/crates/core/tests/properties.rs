//! Property checks over random instances.

mod common;

use common::*;
use irred_core::exactalg::parse::parse_ratfun;
use irred_core::exactalg::{Poly, RatFun};
use irred_core::jets::EquationFamily;
use irred_core::linops::{gauge_transform, sym_power_operator, DiffOp};
use irred_core::ratsolve::rational_solutions;
use irred_core::verdict::{criterion_airy_family, Certificate, Verdict};
use proptest::prelude::*;
use rand::Rng;

fn airy() -> DiffOp {
    DiffOp::parse("D^2 - t", "t", &[]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn planted_solution_is_recovered(seed in any::<u64>(), order in 1usize..=3) {
        let mut r = rng(seed);
        let l = poly_operator(&mut r, order);
        let y = planted_solution(&mut r);
        let g = l.apply(&y);
        let sols = rational_solutions(&l, &g).unwrap();
        prop_assert!(sols.contains(&y), "L = {}, y = {}", l.render("x"), y.render("x"));
    }

    #[test]
    fn gauge_cocycle(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let (p, q, a) = (linear_gauge(&mut r, n), linear_gauge(&mut r, n), ratfun_matrix(&mut r, n));
        let left = gauge_transform(&p.mul(&q), &a).unwrap();
        let right = gauge_transform(&p, &gauge_transform(&q, &a).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn adjoint_is_an_anti_involution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (ol, om) = (r.gen_range(0..=3), r.gen_range(0..=2));
        let (l, m) = (ratfun_operator(&mut r, ol), ratfun_operator(&mut r, om));
        prop_assert_eq!(l.adjoint().adjoint(), l.clone());
        prop_assert_eq!(l.compose(&m).adjoint(), m.adjoint().compose(&l.adjoint()));
    }

    #[test]
    fn jacobi_identity(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let (a, b, c) = (const_matrix(&mut r, n), const_matrix(&mut r, n), const_matrix(&mut r, n));
        let sum = a.bracket(&b.bracket(&c)).add(&b.bracket(&c.bracket(&a))).add(&c.bracket(&a.bracket(&b)));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn leibniz_and_composition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (small_ratfun(&mut r), small_ratfun(&mut r));
        prop_assert_eq!((&f * &g).derivative(), &(&f.derivative() * &g) + &(&f * &g.derivative()));
        let (l, m) = (ratfun_operator(&mut r, 2), ratfun_operator(&mut r, 1));
        prop_assert_eq!(l.compose(&m).apply(&f), l.apply(&m.apply(&f)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// L₄ raises degrees by one, so no polynomial is sent to a constant.
    #[test]
    fn l4_raises_degree_by_one(coeffs in prop::collection::vec(-9i64..=9, 1..8)) {
        let q = Poly::from_ints(&coeffs);
        prop_assume!(!q.is_zero());
        let l4 = sym_power_operator(&airy(), 4).unwrap();
        let image = l4.apply(&RatFun::from_poly(q.clone()));
        prop_assert!(image.is_polynomial());
        prop_assert_eq!(image.num().degree(), Some(q.degree().unwrap() + 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The system and scalar routes agree (the certificate builder refuses
    /// to emit otherwise) and a planted obstruction is never called
    /// irreducible.
    #[test]
    fn family_routes_agree(seed in any::<u64>(), n in 2usize..=3, planted in any::<bool>()) {
        let mut r = rng(seed);
        let p = if planted {
            let f = RatFun::from_poly(small_poly(&mut r, 2, 4));
            sym_power_operator(&airy(), n + 1).unwrap().apply(&f)
        } else {
            RatFun::from_poly(nonzero_poly(&mut r, 2, 6))
        };
        let text = p.render("x");
        let c = criterion_airy_family(&EquationFamily::parse(n, &text).unwrap()).unwrap();
        if planted {
            prop_assert_eq!(c.verdict, Verdict::Inconclusive);
        }
        let back = Certificate::from_json(&c.to_json()).unwrap();
        prop_assert!(back.replay().is_ok());
    }
}

#[test]
fn nonpolynomial_planted_operators() {
    // Euler-type operator with a pole in the coefficients.
    let l = DiffOp::parse("x^2*D^2 + 3*x*D - 3", "x", &[]).unwrap();
    let y = parse_ratfun("(x^2 + 1)/(x - 2)^2", "x", &[]).unwrap();
    let sols = rational_solutions(&l, &l.apply(&y)).unwrap();
    assert!(sols.contains(&y));
    // x and x^-3 span the kernel.
    assert_eq!(sols.homogeneous.len(), 2);
}
