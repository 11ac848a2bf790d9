//! Universal Witt polynomials by the ghost-component method.
//!
//! For length `m` and `n < m`, the `n`-th sum, difference and product
//! polynomials `S_n ∈ Z[a_0..a_n, b_0..b_n]` satisfy
//! `Φ_n(S) = Φ_n(a) ⊙ Φ_n(b)` with `Φ_n(x) = Σ_{i≤n} p^i x_i^{p^{n−i}}`.
//! Only `S_i mod p^{m−i}` enters `Φ_{m−1}` modulo `p^m`, so the whole
//! computation runs in `Z/p^m`. Evaluation over a ring of characteristic
//! `p` needs the reduction mod `p` only.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Exponents of `a_0..a_3, b_0..b_3`.
pub type Key = [u16; 8];

pub const MAX_TERMS: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Add,
    Sub,
    Mul,
}

/// Polynomial with coefficients in `Z/modulus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    pub modulus: i64,
    pub terms: BTreeMap<Key, i64>,
}

impl IntPoly {
    fn new(modulus: i64) -> Self {
        Self { modulus, terms: BTreeMap::new() }
    }

    fn var(modulus: i64, slot: usize, exp: u16, coeff: i64) -> Self {
        let mut p = Self::new(modulus);
        let mut k = [0u16; 8];
        k[slot] = exp;
        p.add_term(k, coeff);
        p
    }

    fn add_term(&mut self, k: Key, c: i64) {
        let c = c.rem_euclid(self.modulus);
        if c == 0 {
            return;
        }
        let e = self.terms.entry(k).or_insert(0);
        *e = (*e + c) % self.modulus;
        if *e == 0 {
            self.terms.remove(&k);
        }
    }

    fn add(&self, other: &Self, sign: i64) -> Self {
        let mut r = self.clone();
        for (&k, &c) in &other.terms {
            r.add_term(k, sign * c);
        }
        r
    }

    fn mul(&self, other: &Self) -> Result<Self> {
        let mut r = Self::new(self.modulus);
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                let mut k = [0u16; 8];
                for i in 0..8 {
                    k[i] = ka[i].checked_add(kb[i]).ok_or(Error::WittTableTooLarge { p: 0, len: 0 })?;
                }
                r.add_term(k, ca * cb % self.modulus);
            }
        }
        Ok(r)
    }

    fn scale(&self, c: i64) -> Self {
        let mut r = Self::new(self.modulus);
        for (&k, &x) in &self.terms {
            r.add_term(k, x * c % self.modulus);
        }
        r
    }

    fn pow(&self, mut e: u64) -> Result<Self> {
        let mut r = Self::new(self.modulus);
        r.add_term([0; 8], 1);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b)?;
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b)?;
            }
        }
        Ok(r)
    }

    fn reduce(&self, modulus: i64) -> Self {
        let mut r = Self::new(modulus);
        for (&k, &c) in &self.terms {
            r.add_term(k, c);
        }
        r
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates at integer points modulo `modulus` (test oracle helper).
    pub fn eval_mod(&self, a: &[i64], b: &[i64], modulus: i64) -> i64 {
        let mut acc = 0i64;
        for (k, &c) in &self.terms {
            let mut t = c.rem_euclid(modulus);
            for i in 0..4 {
                for (slot, vals) in [(i, a), (4 + i, b)] {
                    let x = vals.get(i).copied().unwrap_or(0).rem_euclid(modulus);
                    for _ in 0..k[slot] {
                        t = t * x % modulus;
                    }
                }
            }
            acc = (acc + t) % modulus;
        }
        acc
    }
}

/// Multinomial bound on the term count of `f^e` for `f` with `t` terms.
fn power_term_bound(t: u64, e: u64) -> u64 {
    // binom(t + e - 1, e), saturating.
    let mut r: u64 = 1;
    for i in 0..e.min(t.saturating_sub(1)) {
        let num = t + e - 1 - i;
        r = r.saturating_mul(num) / (i + 1);
        if r > MAX_TERMS {
            return MAX_TERMS + 1;
        }
    }
    r
}

fn ghost(p: i64, modulus: i64, n: usize, offset: usize) -> Result<IntPoly> {
    let mut g = IntPoly::new(modulus);
    for i in 0..=n {
        let e = p.pow((n - i) as u32);
        let exp = u16::try_from(e).map_err(|_| Error::WittTableTooLarge { p: p as u32, len: n + 1 })?;
        g = g.add(&IntPoly::var(modulus, offset + i, exp, p.pow(i as u32)), 1);
    }
    Ok(g)
}

/// `S_0..S_{m−1}` with `S_n` reduced modulo `p^{m−n}`.
pub fn universal(p: u32, m: usize, kind: Kind) -> Result<Vec<IntPoly>> {
    let too_large = Error::WittTableTooLarge { p, len: m };
    if !(1..=4).contains(&m) {
        return Err(too_large);
    }
    let p = p as i64;
    let modulus = p.checked_pow(m as u32).filter(|&x| x < 1 << 31).ok_or(too_large.clone())?;
    let mut out: Vec<IntPoly> = Vec::with_capacity(m);
    for n in 0..m {
        let (ga, gb) = (ghost(p, modulus, n, 0)?, ghost(p, modulus, n, 4)?);
        let mut t = match kind {
            Kind::Add => ga.add(&gb, 1),
            Kind::Sub => ga.add(&gb, -1),
            Kind::Mul => ga.mul(&gb)?,
        };
        for (i, s) in out.iter().enumerate() {
            let e = p.pow((n - i) as u32) as u64;
            if power_term_bound(s.len() as u64, e) > MAX_TERMS {
                return Err(too_large);
            }
            let pw = s.reduce(modulus).pow(e)?;
            t = t.add(&pw.scale(p.pow(i as u32)), -1);
        }
        let pn = p.pow(n as u32);
        let mut s = IntPoly::new(modulus / pn);
        for (&k, &c) in &t.terms {
            debug_assert_eq!(c % pn, 0, "ghost identity leaves a non-divisible coefficient");
            s.add_term(k, c / pn);
        }
        out.push(s);
    }
    Ok(out)
}

/// A table entry reduced modulo `p`, ready for evaluation in characteristic `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPPoly {
    pub terms: Vec<(Key, u32)>,
}

pub fn reduce_mod_p(poly: &IntPoly, p: u32) -> ModPPoly {
    ModPPoly {
        terms: poly
            .terms
            .iter()
            .filter_map(|(&k, &c)| {
                let r = c.rem_euclid(p as i64) as u32;
                (r != 0).then_some((k, r))
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn counts(p: u32, m: usize, kind: Kind, n: usize) -> (usize, usize) {
        let t = universal(p, m, kind).unwrap();
        (t[n].len(), reduce_mod_p(&t[n], p).terms.len())
    }

    #[test]
    fn first_sum_polynomial_p2() {
        let s = universal(2, 2, Kind::Add).unwrap();
        let mut want = BTreeMap::new();
        // S_1 = a_1 + b_1 − a_0 b_0, and −1 ≡ 1 mod 2.
        want.insert([0, 1, 0, 0, 0, 0, 0, 0], 1);
        want.insert([0, 0, 0, 0, 0, 1, 0, 0], 1);
        want.insert([1, 0, 0, 0, 1, 0, 0, 0], 1);
        assert_eq!(s[1].terms, want);
    }

    #[test]
    fn frozen_term_counts() {
        // Counts from an independent sympy expansion of the ghost recursion.
        assert_eq!(counts(2, 2, Kind::Add, 0), (2, 2));
        assert_eq!(counts(2, 2, Kind::Add, 1), (3, 3));
        assert_eq!(counts(2, 2, Kind::Mul, 0), (1, 1));
        assert_eq!(counts(2, 2, Kind::Mul, 1), (2, 2));
        assert_eq!(counts(2, 3, Kind::Add, 2), (7, 7));
        assert_eq!(counts(2, 3, Kind::Mul, 2), (4, 4));
        assert_eq!(counts(3, 2, Kind::Add, 1), (4, 4));
        assert_eq!(counts(3, 3, Kind::Add, 2), (22, 22));
        assert_eq!(counts(3, 3, Kind::Mul, 2), (5, 5));
        assert_eq!(counts(5, 2, Kind::Add, 1), (6, 6));
        assert_eq!(counts(5, 3, Kind::Add, 2), (112, 112));
        assert_eq!(counts(5, 3, Kind::Mul, 2), (7, 7));
        assert_eq!(counts(2, 4, Kind::Add, 3), (29, 29));
        assert_eq!(counts(2, 4, Kind::Mul, 3), (12, 12));
        for p in [2, 3, 5] {
            assert_eq!(counts(p, 3, Kind::Mul, 1), (3, 2));
        }
    }

    #[test]
    fn ghost_identity_on_integers() {
        let mut rng = SplitMix64::new(11);
        for (p, m) in [(2u32, 4usize), (3, 3), (5, 2), (5, 3), (7, 2)] {
            let pm = (p as i64).pow(m as u32);
            for kind in [Kind::Add, Kind::Sub, Kind::Mul] {
                let tab = universal(p, m, kind).unwrap();
                for _ in 0..20 {
                    let a: Vec<i64> = (0..m).map(|_| rng.below(pm as u64) as i64).collect();
                    let b: Vec<i64> = (0..m).map(|_| rng.below(pm as u64) as i64).collect();
                    let s: Vec<i64> = tab.iter().map(|t| t.eval_mod(&a, &b, pm)).collect();
                    for n in 0..m {
                        let gh = |x: &[i64]| -> i64 {
                            (0..=n).fold(0, |acc, i| {
                                let mut t = x[i] % pm;
                                let e = (p as i64).pow((n - i) as u32);
                                let mut r = 1i64;
                                for _ in 0..e {
                                    r = r * t % pm;
                                }
                                t = r * (p as i64).pow(i as u32) % pm;
                                (acc + t) % pm
                            })
                        };
                        let want = match kind {
                            Kind::Add => (gh(&a) + gh(&b)) % pm,
                            Kind::Sub => (gh(&a) - gh(&b)).rem_euclid(pm),
                            Kind::Mul => gh(&a) * gh(&b) % pm,
                        };
                        assert_eq!(gh(&s), want, "p={p} m={m} {kind:?} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn oversized_tables_refused() {
        assert_eq!(universal(13, 4, Kind::Add), Err(Error::WittTableTooLarge { p: 13, len: 4 }));
        assert!(matches!(universal(5, 4, Kind::Add), Err(Error::WittTableTooLarge { .. })));
    }
}
