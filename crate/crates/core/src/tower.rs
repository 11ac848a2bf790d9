//! Verifier for Frobenius towers `M_k = (O/t^k)^r` with reduction maps
//! `p_k`, multiplication maps `q_k` and Frobenius identifications `φ_k`.
//!
//! The hypotheses checked are: `p_k q_k = t`; exactness of
//! `M_1 → M_{k+1} → M_k` in the middle; `φ_k: M_k ⊗_φ O/t^{pk} ≅ M_{pk}`
//! compatible with `p_k` and `q_k`. The conclusions checked are
//! `γ_{M_k} = k γ_{M_1}` and exactness of `0 → M_1 → M_{k+1} → M_k → 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::matrix::Matrix;
use crate::module::{exact_sequence_check, ModuleMap, TorsionModule};
use crate::params::BaseRing;
use crate::puiseux::Puiseux;
use crate::rational::{qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Perturbation {
    None,
    /// `q_k = t^2`.
    WrongQ,
    /// `M_2` replaced by `(O/t^2)^r ⊕ O/t`.
    BrokenExactness,
    /// `φ_1 = (1+t)·id`.
    BrokenPhi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TowerCheck {
    PqIsT,
    MiddleExact,
    PhiIso,
    PhiCompatP,
    PhiCompatQ,
    DivisorGrowth,
    FrobeniusScaling,
    ConclusionExact,
}

impl TowerCheck {
    pub fn name(self) -> &'static str {
        match self {
            TowerCheck::PqIsT => "p_k q_k = t",
            TowerCheck::MiddleExact => "M_1 -> M_{k+1} -> M_k exact in the middle",
            TowerCheck::PhiIso => "phi_k is an isomorphism",
            TowerCheck::PhiCompatP => "phi compatible with p_k",
            TowerCheck::PhiCompatQ => "phi compatible with q_k",
            TowerCheck::DivisorGrowth => "gamma(M_k) = k gamma(M_1)",
            TowerCheck::FrobeniusScaling => "gamma(M_pk) = p gamma(M_k)",
            TowerCheck::ConclusionExact => "0 -> M_1 -> M_{k+1} -> M_k -> 0 exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerReport {
    pub p: u32,
    pub r: usize,
    pub kmax: u32,
    pub perturbation: Perturbation,
    /// `(check, k, passed)` in evaluation order.
    pub checks: Vec<(TowerCheck, u32, bool)>,
}

impl TowerReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.2)
    }

    pub fn failed(&self, which: TowerCheck) -> bool {
        self.checks.iter().any(|c| c.0 == which && !c.2)
    }

    /// Earliest failing check in declaration order (hypotheses before
    /// conclusions), then smallest `k`.
    pub fn first_failure(&self) -> Option<(TowerCheck, u32)> {
        self.checks.iter().filter(|c| !c.2).map(|c| (c.0, c.1)).min()
    }
}

struct Tower {
    base: BaseRing,
    r: usize,
    pert: Perturbation,
}

impl Tower {
    fn broken_m2(&self, k: u32) -> bool {
        self.pert == Perturbation::BrokenExactness && k == 2
    }

    fn module(&self, k: u32) -> TorsionModule {
        let mut g = vec![qi(k as i64); self.r];
        if self.broken_m2(k) {
            g.push(qi(1));
        }
        TorsionModule::from_gammas(&g).expect("positive")
    }

    fn mono(&self, e: i64) -> Puiseux {
        Puiseux::monomial_scaled(self.base, self.base.field.one(), e * self.base.scale)
    }

    /// `r × r` block `c·I` padded with zeros to `rows × cols`.
    fn block(&self, rows: usize, cols: usize, c: &Puiseux) -> Matrix {
        Matrix::from_fn(
            self.base,
            rows,
            cols,
            |i, j| {
                if i == j && i < self.r {
                    c.clone()
                } else {
                    Puiseux::zero(self.base)
                }
            },
        )
    }

    fn map(&self, src: TorsionModule, tgt: TorsionModule, c: &Puiseux) -> Result<ModuleMap> {
        let m = self.block(tgt.len(), src.len(), c);
        ModuleMap::new(src, tgt, m)
    }

    /// `p_k: M_{k+1} → M_k`.
    fn p(&self, k: u32) -> Result<ModuleMap> {
        self.map(self.module(k + 1), self.module(k), &self.mono(0))
    }

    /// `q_k: M_k → M_{k+1}`.
    fn q(&self, k: u32) -> Result<ModuleMap> {
        let e = if self.pert == Perturbation::WrongQ { 2 } else { 1 };
        self.map(self.module(k), self.module(k + 1), &self.mono(e))
    }

    /// `M_k ⊗_φ O/t^{pk}`.
    fn twisted_module(&self, k: u32) -> TorsionModule {
        let p = self.base.p() as i64;
        TorsionModule::from_gammas(&self.module(k).gammas().iter().map(|g| *g * p).collect::<Vec<Q>>())
            .expect("positive")
    }

    /// Base change of a map along Frobenius.
    fn twist(&self, f: &ModuleMap, src: u32, tgt: u32) -> Result<ModuleMap> {
        let m = f.matrix().map(|x| x.frobenius());
        ModuleMap::new(self.twisted_module(src), self.twisted_module(tgt), m)
    }

    /// `φ_k: M_k ⊗_φ O/t^{pk} → M_{pk}`.
    fn phi(&self, k: u32) -> Result<ModuleMap> {
        let c = if self.pert == Perturbation::BrokenPhi && k == 1 {
            self.mono(0).add(&self.mono(1))?
        } else {
            self.mono(0)
        };
        let pk = k * self.base.p();
        self.map(self.twisted_module(k), self.module(pk), &c)
    }

    /// `M_{k+j} → M_k`, composite of reductions.
    fn reduce(&self, from: u32, to: u32) -> Result<ModuleMap> {
        let mut f = ModuleMap::identity(self.base, &self.module(from));
        for k in (to..from).rev() {
            f = self.p(k)?.compose(&f)?;
        }
        Ok(f)
    }

    /// `M_k → M_{k+j}`, composite of multiplications.
    fn lift(&self, from: u32, to: u32) -> Result<ModuleMap> {
        let mut f = ModuleMap::identity(self.base, &self.module(from));
        for k in from..to {
            f = self.q(k)?.compose(&f)?;
        }
        Ok(f)
    }
}

pub fn frobenius_tower_check(p: u32, r: usize, kmax: u32, pert: Perturbation) -> Result<TowerReport> {
    let top = p * (kmax + 1) + 2;
    let base = BaseRing::new(p, 1, 0, qi(top as i64))?;
    let tw = Tower { base, r, pert };
    let mut checks = Vec::new();
    let g1 = tw.module(1).divisors();

    for k in 1..=kmax {
        let pq = tw.p(k)?.compose(&tw.q(k)?)?;
        let t = ModuleMap::scalar(base, &tw.module(k), qi(1))?;
        checks.push((TowerCheck::PqIsT, k, pq.same_map(&t)));

        let into = tw.lift(1, k + 1)?;
        let h = ModuleMap::homology(&into, &tw.p(k)?);
        checks.push((TowerCheck::MiddleExact, k, h.is_ok_and(|h| h.is_empty())));

        let phi = tw.phi(k)?;
        let iso = phi.cokernel()?.is_empty() && phi.image_divisors()?.lambda() == phi.source().lambda();
        checks.push((TowerCheck::PhiIso, k, iso));

        let lhs = phi.compose(&tw.twist(&tw.p(k)?, k + 1, k)?)?;
        let rhs = tw.reduce(p * (k + 1), p * k)?.compose(&tw.phi(k + 1)?)?;
        checks.push((TowerCheck::PhiCompatP, k, lhs.same_map(&rhs)));

        let lhs = tw.phi(k + 1)?.compose(&tw.twist(&tw.q(k)?, k, k + 1)?)?;
        let rhs = tw.lift(p * k, p * (k + 1))?.compose(&phi)?;
        checks.push((TowerCheck::PhiCompatQ, k, lhs.same_map(&rhs)));

        let gk = tw.module(k).divisors();
        let scaled = g1.entries().iter().map(|g| *g * (k as i64)).collect();
        checks.push((TowerCheck::DivisorGrowth, k, gk.entries() == &scaled as &Vec<Q>));
        let gpk = tw.module(p * k).divisors();
        let pscaled: Vec<Q> = gk.entries().iter().map(|g| *g * p as i64).collect();
        checks.push((TowerCheck::FrobeniusScaling, k, gpk.entries() == pscaled.as_slice()));

        let ok = match exact_sequence_check(&into, &tw.p(k)?) {
            Ok(rep) => rep.exact && rep.lambda_lhs == rep.lambda_rhs && rep.majorization,
            Err(_) => false,
        };
        checks.push((TowerCheck::ConclusionExact, k, ok));
    }
    Ok(TowerReport { p, r, kmax, perturbation: pert, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_tower_passes() {
        let rep = frobenius_tower_check(2, 1, 3, Perturbation::None).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.first_failure());
        let rep = frobenius_tower_check(3, 2, 2, Perturbation::None).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.first_failure());
    }

    #[test]
    fn perturbations_detected() {
        let rep = frobenius_tower_check(2, 1, 3, Perturbation::WrongQ).unwrap();
        assert!(rep.failed(TowerCheck::PqIsT));
        let rep = frobenius_tower_check(2, 2, 3, Perturbation::BrokenExactness).unwrap();
        assert!(rep.failed(TowerCheck::MiddleExact));
        assert!(!rep.failed(TowerCheck::PqIsT));
        let rep = frobenius_tower_check(3, 1, 2, Perturbation::BrokenPhi).unwrap();
        assert!(rep.failed(TowerCheck::PhiCompatP));
        assert!(!rep.failed(TowerCheck::PhiIso));
        assert!(!rep.failed(TowerCheck::MiddleExact));
    }
}
