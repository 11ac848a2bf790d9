//! Puiseux arithmetic against a naive term-by-term oracle.

use std::collections::BTreeMap;

use almostperiods_core::field::Fe;
use almostperiods_core::rational::qi;
use almostperiods_core::{BaseRing, Puiseux};
use proptest::prelude::*;

fn base(p: u32, s: u32) -> BaseRing {
    BaseRing::new(p, s, 2, qi(6)).unwrap()
}

/// Scaled exponents below `hi` and nonzero coefficient codes.
fn terms(hi: i64) -> impl Strategy<Value = Vec<(i64, u64)>> {
    proptest::collection::vec((0..hi, 1u64..9), 0..5)
}

fn series(b: BaseRing, t: &[(i64, u64)], prec: i64) -> Puiseux {
    let order = b.field.order();
    let t: Vec<(i64, Fe)> =
        t.iter().map(|&(e, c)| (e, b.field.from_code(1 + (c - 1) % (order - 1)).unwrap())).collect();
    Puiseux::from_scaled_terms(b, t, prec)
}

/// Schoolbook product with the precision rule `min(N_a + v_b, N_b + v_a)`.
fn oracle_mul(a: &Puiseux, b: &Puiseux) -> Puiseux {
    let base = a.base();
    let f = base.field;
    let prec = (a.prec_scaled() + b.val_or_prec()).min(b.prec_scaled() + a.val_or_prec()).min(base.cap);
    let mut acc: BTreeMap<i64, Fe> = BTreeMap::new();
    for &(ea, ca) in a.scaled_terms() {
        for &(eb, cb) in b.scaled_terms() {
            let slot = acc.entry(ea + eb).or_insert(f.zero());
            *slot = f.add(*slot, f.mul(ca, cb));
        }
    }
    Puiseux::from_scaled_terms(base, acc.into_iter().filter(|(_, c)| !f.is_zero(*c)).collect(), prec)
}

fn prime_and_degree() -> impl Strategy<Value = (u32, u32)> {
    prop_oneof![Just((2, 1)), Just((2, 2)), Just((3, 1)), Just((3, 2)), Just((5, 1))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_matches_schoolbook((p, s) in prime_and_degree(), x in terms(60), y in terms(60)) {
        let b = base(p, s);
        let (a, c) = (series(b, &x, b.cap), series(b, &y, b.cap));
        let prod = a.mul(&c).unwrap();
        let want = oracle_mul(&a, &c);
        prop_assert_eq!(prod.prec_scaled(), want.prec_scaled());
        prop_assert!(prod.agrees_with(&want));
    }

    #[test]
    fn valuation_is_additive((p, s) in prime_and_degree(), x in terms(40), y in terms(40)) {
        let b = base(p, s);
        let (a, c) = (series(b, &x, b.cap), series(b, &y, b.cap));
        // Past the cap the product is zero at precision.
        if let (Some(va), Some(vc)) = (a.val_scaled(), c.val_scaled()) {
            if va + vc < b.cap {
                prop_assert_eq!(a.mul(&c).unwrap().val_scaled(), Some(va + vc));
            }
        }
    }

    #[test]
    fn frobenius_is_invertible((p, s) in prime_and_degree(), x in terms(30)) {
        let b = base(p, s);
        let a = series(b, &x, b.cap / p as i64);
        let back = a.frobenius().frobenius_inverse().unwrap();
        prop_assert!(back.agrees_with(&a));
        prop_assert_eq!(back.prec_scaled(), a.prec_scaled());
    }

    #[test]
    fn frobenius_is_additive((p, s) in prime_and_degree(), x in terms(30), y in terms(30)) {
        let b = base(p, s);
        let (a, c) = (series(b, &x, b.cap), series(b, &y, b.cap));
        let lhs = a.add(&c).unwrap().pow(p as u64);
        let rhs = a.pow(p as u64).add(&c.pow(p as u64)).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn gcd_with_multiple((p, s) in prime_and_degree(), x in terms(40), y in terms(40)) {
        let b = base(p, s);
        let (a, c) = (series(b, &x, b.cap), series(b, &y, b.cap));
        let ac = a.mul(&c).unwrap();
        if let (Some(va), false) = (a.val_scaled(), ac.is_zero()) {
            let g = Puiseux::gcd(&[a.clone(), ac]).unwrap();
            prop_assert_eq!(g.val_scaled(), Some(va));
        }
    }

    /// Substitutes the solution back: `x^p − x − a` vanishes below the
    /// guaranteed precision.
    #[test]
    fn artin_schreier_residual((p, s) in prime_and_degree(), lead in 1i64..=50, x in terms(100)) {
        let b = base(p, s);
        let a = series(b, &x, b.cap).add(&Puiseux::monomial_scaled(b, b.field.one(), lead)).unwrap();
        prop_assume!(a.val_scaled().is_some_and(|v| v > 0));
        let sol = a.artin_schreier_solve().unwrap();
        let res = sol.pow(p as u64).sub(&sol).unwrap().sub(&a).unwrap();
        prop_assert!(res.is_zero());
        prop_assert!(res.prec_scaled() >= sol.prec_scaled());
    }
}

#[test]
fn artin_schreier_examples() {
    let b = base(2, 1);
    let t = Puiseux::t_pow(b, qi(1)).unwrap();
    // t + t^2 + t^4 below precision 6.
    let want = Puiseux::parse(b, "t+t^2+t^4").unwrap();
    assert!(t.artin_schreier_solve().unwrap().agrees_with(&want));
    assert!(Puiseux::zero(b).artin_schreier_solve().unwrap().is_zero());
}
