//! Smith normal form and torsion-module laws on random inputs.

use almostperiods_core::eldiv::EldivSeq;
use almostperiods_core::matrix::Matrix;
use almostperiods_core::module::{
    approx_eq, exact_sequence_check, witness_maps, Factor, Flag, ModuleMap, TorsionModule,
};
use almostperiods_core::rational::{q, qi};
use almostperiods_core::snf::cokernel_divisors;
use almostperiods_core::{BaseRing, Puiseux, Q};
use proptest::prelude::*;

fn base(p: u32, n: i64) -> BaseRing {
    BaseRing::new(p, 1, 2, qi(n)).unwrap()
}

/// A polynomial with scaled exponents `e_k` and coefficient `1`.
fn poly(b: BaseRing, exps: &[i64]) -> Puiseux {
    exps.iter().fold(Puiseux::zero(b), |acc, &e| acc.add(&Puiseux::monomial_scaled(b, b.field.one(), e)).unwrap())
}

fn entries(n: usize, hi: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(0..hi, 0..3), n * n)
}

fn matrix(b: BaseRing, n: usize, e: &[Vec<i64>]) -> Matrix {
    Matrix::from_fn(b, n, n, |i, j| poly(b, &e[i * n + j]))
}

/// Leibniz expansion over all permutations.
fn leibniz_det(a: &Matrix) -> Puiseux {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for k in 0..n {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }
    let b = a.base();
    let n = a.rows();
    let mut det = Puiseux::zero(b);
    for perm in perms(n) {
        let inversions =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        let term = (0..n).fold(Puiseux::one(b), |acc, i| acc.mul(a.get(i, perm[i])).unwrap());
        det = if inversions % 2 == 0 { det.add(&term) } else { det.sub(&term) }.unwrap();
    }
    det
}

/// Unipotent upper times unipotent lower, so determinant one.
fn unimodular(b: BaseRing, n: usize, up: &[Vec<i64>], low: &[Vec<i64>]) -> Matrix {
    let u = Matrix::from_fn(b, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Puiseux::one(b),
        std::cmp::Ordering::Less => poly(b, &up[i * n + j]),
        _ => Puiseux::zero(b),
    });
    let l = Matrix::from_fn(b, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Puiseux::one(b),
        std::cmp::Ordering::Greater => poly(b, &low[i * n + j]),
        _ => Puiseux::zero(b),
    });
    u.mul(&l).unwrap()
}

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3u32)]
}

fn indexwise_le(a: &EldivSeq, b: &EldivSeq) -> bool {
    (0..a.len().max(b.len())).all(|i| a.get(i) <= b.get(i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambda_is_leibniz_det_valuation(p in prime(), e in entries(4, 18)) {
        let b = base(p, 16);
        let a = matrix(b, 4, &e);
        let det = leibniz_det(&a);
        prop_assume!(det.val_scaled().is_some());
        let c = cokernel_divisors(&a).unwrap();
        prop_assert_eq!(c.free_rank, 0);
        prop_assert_eq!(c.torsion.lambda(), b.from_scaled(det.val_scaled().unwrap()));
    }

    #[test]
    fn divisors_recovered_after_unimodular_change(
        p in prime(),
        g in proptest::collection::vec(0i64..=27, 1..=4),
        up in entries(4, 27),
        low in entries(4, 27),
    ) {
        let b = base(p, 12);
        let n = g.len();
        let d = Matrix::diag_monomials(b, n, n, &g);
        let a = unimodular(b, n, &up, &low).mul(&d).unwrap().mul(&unimodular(b, n, &low, &up)).unwrap();
        let want = EldivSeq::from_unsorted(g.iter().map(|&x| b.from_scaled(x)).collect()).unwrap();
        prop_assert_eq!(cokernel_divisors(&a).unwrap().torsion, want);
    }

    #[test]
    fn block_triangular_det_valuation_adds(p in prime(), x in entries(2, 18), y in entries(2, 18), z in entries(2, 18)) {
        let b = base(p, 16);
        let (a1, a2, off) = (matrix(b, 2, &x), matrix(b, 2, &y), matrix(b, 2, &z));
        prop_assume!(leibniz_det(&a1).val_scaled().is_some() && leibniz_det(&a2).val_scaled().is_some());
        let top = a1.hcat(&off).unwrap();
        let bottom = Matrix::zeros(b, 2, 2).hcat(&a2).unwrap();
        let a = top.vcat(&bottom).unwrap();
        let sum = a1.det_valuation().unwrap() + a2.det_valuation().unwrap();
        prop_assert_eq!(a.det_valuation().unwrap(), sum);
        prop_assert_eq!(cokernel_divisors(&a).unwrap().torsion.lambda(), sum);
    }

    #[test]
    fn merge_is_block_diagonal_snf(p in prime(), x in entries(2, 18), y in entries(3, 18)) {
        let b = base(p, 16);
        let (a1, a2) = (matrix(b, 2, &x), matrix(b, 3, &y));
        let (c1, c2) = (cokernel_divisors(&a1).unwrap(), cokernel_divisors(&a2).unwrap());
        let c = cokernel_divisors(&a1.block_diag(&a2)).unwrap();
        prop_assert_eq!(c.torsion, c1.torsion.merge_sorted(&c2.torsion));
        prop_assert_eq!(c.free_rank, c1.free_rank + c2.free_rank);
    }

    /// Image and cokernel of `f : M → N` are dominated termwise by `γ_N`.
    #[test]
    fn subquotients_are_dominated(
        p in prime(),
        gs in proptest::collection::vec(1i64..=12, 1..=3),
        gt in proptest::collection::vec(1i64..=12, 1..=3),
        e in entries(3, 8),
    ) {
        let b = base(p, 12);
        let src = TorsionModule::from_gammas(&gs.iter().map(|&x| b.from_scaled(x)).collect::<Vec<_>>()).unwrap();
        let tgt = TorsionModule::from_gammas(&gt.iter().map(|&x| b.from_scaled(x)).collect::<Vec<_>>()).unwrap();
        let (sg, tg) = (src.gammas(), tgt.gammas());
        let m = Matrix::from_fn(b, tgt.len(), src.len(), |i, j| {
            let shift = b.to_scaled((tg[i] - sg[j]).max(Q::from(0))).unwrap();
            poly(b, &e[i * 3 + j]).shift_up(shift)
        });
        let f = ModuleMap::new(src, tgt.clone(), m).unwrap();
        prop_assert!(indexwise_le(&f.image_divisors().unwrap(), &tgt.divisors()));
        prop_assert!(indexwise_le(&f.cokernel().unwrap().divisors(), &tgt.divisors()));
        let (im, cok) = (f.image_divisors().unwrap(), f.cokernel().unwrap().divisors());
        prop_assert_eq!(im.lambda() + cok.lambda(), tgt.divisors().lambda());
    }

    #[test]
    fn dual_preserves_divisors(g in proptest::collection::vec((1i64..=12, any::<bool>()), 0..=4)) {
        let b = base(2, 12);
        let factors = g
            .iter()
            .map(|&(x, open)| Factor { gamma: b.from_scaled(x), flag: if open { Flag::Open } else { Flag::Closed } })
            .collect();
        let m = TorsionModule::new(factors).unwrap();
        prop_assert_eq!(m.dual().divisors(), m.divisors());
        prop_assert_eq!(m.dual().dual(), m);
    }

    /// The metric criterion agrees with the existence of diagonal witnesses.
    #[test]
    fn metric_criterion_both_directions(
        p in prime(),
        a in proptest::collection::vec(1i64..=18, 0..=3),
        c in proptest::collection::vec(1i64..=18, 0..=3),
        k in 0usize..3,
    ) {
        let b = base(p, 12);
        let eps = [q(1, p as i64), qi(1), qi(2)][k];
        let m = TorsionModule::from_gammas(&a.iter().map(|&x| b.from_scaled(x)).collect::<Vec<_>>()).unwrap();
        let n = TorsionModule::from_gammas(&c.iter().map(|&x| b.from_scaled(x)).collect::<Vec<_>>()).unwrap();
        let w = witness_maps(b, &m, &n, eps).unwrap();
        prop_assert_eq!(approx_eq(&m, &n, eps), w.is_some());
        if let Some((f, g)) = w {
            prop_assert!(g.compose(&f).unwrap().same_map(&ModuleMap::scalar(b, &m, eps).unwrap()));
            prop_assert!(f.compose(&g).unwrap().same_map(&ModuleMap::scalar(b, &n, eps).unwrap()));
        }
    }
}

#[test]
fn fixture_matrix_has_unit_divisors() {
    for p in [2, 3, 5] {
        let b = base(p, 8);
        let t = |e: i64| Puiseux::t_pow(b, qi(e)).unwrap();
        let a = Matrix::new(b, 2, 2, vec![t(1), t(1), t(1), t(2)]).unwrap();
        assert_eq!(cokernel_divisors(&a).unwrap().torsion.entries(), &[qi(1), qi(1)]);
    }
}

#[test]
fn two_term_exact_sequence() {
    // 0 → O/t → O/t^2 → O/t → 0, multiplication by t then projection.
    let b = base(2, 8);
    let one = |x: i64| TorsionModule::from_gammas(&[qi(x)]).unwrap();
    let t = Puiseux::t_pow(b, qi(1)).unwrap();
    let f = ModuleMap::new(one(1), one(2), Matrix::new(b, 1, 1, vec![t]).unwrap()).unwrap();
    let g = ModuleMap::new(one(2), one(1), Matrix::identity(b, 1)).unwrap();
    let r = exact_sequence_check(&f, &g).unwrap();
    assert!(r.exact && r.majorization);
    assert_eq!((r.lambda_lhs, r.lambda_rhs), (qi(2), qi(2)));
}
