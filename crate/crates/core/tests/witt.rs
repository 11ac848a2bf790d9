//! Witt-vector arithmetic against integer arithmetic in `Z/p^m` and the
//! Teichmüller identities.

use almostperiods_core::field::Fe;
use almostperiods_core::params::ModelParams;
use almostperiods_core::rational::{q, qi};
use almostperiods_core::witt::period::{divide_by_xi, epsilon_root, BdrRing, Division, Truth};
use almostperiods_core::witt::{WittRing, WittVector};
use almostperiods_core::Puiseux;
use proptest::prelude::*;

fn ring(p: u32, n: i64, m: u32, d: u32) -> WittRing {
    WittRing::new(ModelParams::new(p, 1, 1, qi(n), m, d).unwrap()).unwrap()
}

fn digit(w: &WittRing, terms: &[(i64, u64)]) -> Puiseux {
    let ub = w.user_base();
    let f = ub.field;
    let t: Vec<(i64, Fe)> =
        terms.iter().map(|&(e, c)| (e, f.from_code(1 + (c - 1) % (f.order() - 1)).unwrap())).collect();
    Puiseux::from_scaled_terms(ub, t, ub.cap)
}

fn vector(w: &WittRing, raw: &[Vec<(i64, u64)>]) -> WittVector {
    w.from_digits(raw.iter().take(w.len()).map(|t| digit(w, t)).collect()).unwrap()
}

/// Two digits, each with up to two terms of small exponent.
fn raw() -> impl Strategy<Value = Vec<Vec<(i64, u64)>>> {
    proptest::collection::vec(proptest::collection::vec((0i64..4, 1u64..5), 0..3), 2)
}

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3u32)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn integers_embed_as_a_ring_map(p in prime(), a in -40i64..40, b in -40i64..40) {
        let w = ring(p, 6, 2, 1);
        let sum = w.add(&w.from_int(a), &w.from_int(b)).unwrap();
        let prod = w.mul(&w.from_int(a), &w.from_int(b)).unwrap();
        let diff = w.sub(&w.from_int(a), &w.from_int(b)).unwrap();
        prop_assert!(sum.agrees_with(&w.from_int(a + b)));
        prop_assert!(prod.agrees_with(&w.from_int(a * b)));
        prop_assert!(diff.agrees_with(&w.from_int(a - b)));
    }

    #[test]
    fn ring_laws(p in prime(), x in raw(), y in raw(), z in raw()) {
        let w = ring(p, 6, 2, 1);
        let (a, b, c) = (vector(&w, &x), vector(&w, &y), vector(&w, &z));
        prop_assert!(w.add(&a, &b).unwrap().agrees_with(&w.add(&b, &a).unwrap()));
        prop_assert!(w.mul(&a, &b).unwrap().agrees_with(&w.mul(&b, &a).unwrap()));
        let lhs = w.mul(&a, &w.add(&b, &c).unwrap()).unwrap();
        let rhs = w.add(&w.mul(&a, &b).unwrap(), &w.mul(&a, &c).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
        prop_assert!(w.add(&a, &w.neg(&a).unwrap()).unwrap().is_zero());
        prop_assert!(w.mul(&a, &w.one()).unwrap().agrees_with(&a));
    }

    #[test]
    fn p_times_is_integer_multiplication(p in prime(), x in raw()) {
        let w = ring(p, 6, 2, 1);
        let a = vector(&w, &x);
        let by_int = w.mul(&a, &w.from_int(p as i64)).unwrap();
        prop_assert!(w.mul_p(&a).agrees_with(&by_int));
        prop_assert!(w.div_p(&w.mul_p(&a)).unwrap().agrees_with(&a.truncate_len(1)));
    }

    #[test]
    fn teichmuller_is_multiplicative(p in prime(), x in raw(), y in raw()) {
        let w = ring(p, 6, 2, 1);
        let (a, b) = (digit(&w, &x[0]), digit(&w, &y[0]));
        let lhs = w.mul(&w.teichmuller(&a).unwrap(), &w.teichmuller(&b).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&w.teichmuller(&a.mul(&b).unwrap()).unwrap()));
    }

    /// For odd `p`, `[−x] = −[x]`.
    #[test]
    fn teichmuller_of_negative(x in raw()) {
        let w = ring(3, 6, 2, 1);
        let a = digit(&w, &x[0]);
        let s = w.add(&w.teichmuller(&a).unwrap(), &w.teichmuller(&a.neg()).unwrap()).unwrap();
        prop_assert!(s.is_zero());
    }

    /// At `p = 2`, `[a] + [b]` has Witt coordinates `(a + b, ab)`.
    #[test]
    fn teichmuller_sum_carry(x in raw(), y in raw()) {
        let w = ring(2, 6, 2, 1);
        let (a, b) = (digit(&w, &x[0]), digit(&w, &y[0]));
        let s = w.add(&w.teichmuller(&a).unwrap(), &w.teichmuller(&b).unwrap()).unwrap();
        let (a, b) = (w.embed(&a).unwrap(), w.embed(&b).unwrap());
        prop_assert!(s.digit(0).agrees_with(&a.add(&b).unwrap()));
        prop_assert!(s.digit(1).frobenius().agrees_with(&a.mul(&b).unwrap()));
    }

    #[test]
    fn frobenius_is_a_ring_map(p in prime(), x in raw(), y in raw()) {
        let w = ring(p, 6, 2, 1);
        let (a, b) = (vector(&w, &x), vector(&w, &y));
        let lhs = w.frobenius(&w.mul(&a, &b).unwrap());
        let rhs = w.mul(&w.frobenius(&a), &w.frobenius(&b)).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }

    /// Multiplying a unit-led `y` by `ξ` and dividing back recovers `y`.
    #[test]
    fn division_by_xi_inverts_multiplication(p in prime(), x in raw(), c in 1u64..5) {
        let w = ring(p, 8, 2, 1);
        let b = BdrRing::new(w.clone()).unwrap();
        let mut x = x;
        x[0].retain(|&(e, _)| e > 0);
        x[0].push((0, c));
        let y = vector(&w, &x);
        prop_assume!(y.digit(0).val_scaled() == Some(0));
        let prod = w.mul(&b.xi, &y).unwrap();
        let Division::Quotient(back) = divide_by_xi(&w, &b.xi, &prod).unwrap() else {
            return Err(TestCaseError::fail("ξy not divisible by ξ"));
        };
        prop_assert!(back.digit(0).agrees_with(y.digit(0)));
    }
}

#[test]
fn xi_digit_zero() {
    for p in [2u32, 3, 5] {
        let w = ring(p, 6, 2, 1);
        let b = BdrRing::new(w.clone()).unwrap();
        let want = Puiseux::t_pow(w.base(), q(p as i64 - 1, p as i64)).unwrap();
        assert!(b.xi.digit(0).agrees_with(&want), "p = {p}");
    }
}

#[test]
fn epsilon_factors_through_xi() {
    for p in [2u32, 3] {
        let w = ring(p, 8, 2, 1);
        let b = BdrRing::new(w.clone()).unwrap();
        let eps = w.teichmuller(&epsilon_root(&w, 0).unwrap()).unwrap();
        let root = w.teichmuller(&epsilon_root(&w, 1).unwrap()).unwrap();
        let lhs = w.sub(&eps, &w.one()).unwrap();
        let rhs = w.mul(&b.xi, &w.sub(&root, &w.one()).unwrap()).unwrap();
        assert!(lhs.agrees_with(&rhs), "p = {p}");
    }
}

#[test]
fn xi_vanishes_exactly_to_first_order() {
    let w = ring(3, 8, 2, 2);
    let b = BdrRing::new(w.clone()).unwrap();
    let xi = b.elem(b.xi.clone());
    let zero = b.elem(w.zero());
    assert_eq!(b.with_d(1).eq(&xi, &zero), Truth::True);
    assert_eq!(b.with_d(2).eq(&xi, &zero), Truth::False);
    let sq = b.elem(w.mul(&b.xi, &b.xi).unwrap());
    assert_eq!(b.with_d(2).eq(&sq, &zero), Truth::True);
}

/// `log[ε] ≡ [ε] − 1` modulo `Fil^2`.
#[test]
fn log_epsilon_is_first_order() {
    let w = ring(3, 10, 2, 3);
    let b = BdrRing::new(w.clone()).unwrap();
    let t = b.log_epsilon().unwrap();
    let eps = w.teichmuller(&epsilon_root(&w, 0).unwrap()).unwrap();
    let u = b.elem(w.sub(&eps, &w.one()).unwrap());
    assert_eq!(b.with_d(2).eq(&t, &u), Truth::True);
    assert_eq!(b.xi_adic_order(&t.num, 2).unwrap().0, 1);
}
