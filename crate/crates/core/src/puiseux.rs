//! Truncated Puiseux series `Σ c_e t^e` over `F_{p^s}` with exponents in
//! `p^{-L} Z_{≥0}`, known modulo `t^prec`.
//!
//! Precision is tracked per element. Results never claim more digits than
//! the worst-case rule of the operation allows, and never more than the
//! cap `N` of the [`BaseRing`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::Fe;
use crate::params::BaseRing;
use crate::rational::{fmt_q_short, parse_q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Puiseux {
    base: BaseRing,
    /// Scaled exponents, strictly increasing, all `< prec`; coefficients nonzero.
    terms: Vec<(i64, Fe)>,
    prec: i64,
}

/// Valuation of a truncated element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(Q),
    /// No terms below the given precision.
    ZeroAt(Q),
}

impl Valuation {
    pub fn finite(self) -> Option<Q> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::ZeroAt(_) => None,
        }
    }
}

impl Puiseux {
    pub fn zero(base: BaseRing) -> Self {
        Self { base, terms: Vec::new(), prec: base.cap }
    }

    pub fn zero_at(base: BaseRing, prec: i64) -> Self {
        Self { base, terms: Vec::new(), prec: prec.min(base.cap) }
    }

    pub fn one(base: BaseRing) -> Self {
        Self::constant(base, base.field.one())
    }

    pub fn constant(base: BaseRing, c: Fe) -> Self {
        Self::monomial_scaled(base, c, 0)
    }

    /// `c·t^e` for a scaled exponent.
    pub fn monomial_scaled(base: BaseRing, c: Fe, e: i64) -> Self {
        debug_assert!(e >= 0);
        let mut x = Self::zero(base);
        if !base.field.is_zero(c) && e < base.cap {
            x.terms.push((e, c));
        }
        x
    }

    pub fn monomial(base: BaseRing, c: Fe, e: Q) -> Result<Self> {
        let e = base.to_scaled(e)?;
        if e < 0 {
            return Err(Error::NotDivisible);
        }
        Ok(Self::monomial_scaled(base, c, e))
    }

    /// `t^e` with a rational exponent.
    pub fn t_pow(base: BaseRing, e: Q) -> Result<Self> {
        Self::monomial(base, base.field.one(), e)
    }

    /// Builds from arbitrary scaled terms: sorts, combines, truncates.
    pub fn from_scaled_terms(base: BaseRing, terms: Vec<(i64, Fe)>, prec: i64) -> Self {
        let prec = prec.min(base.cap);
        Self { base, terms: normalize(&base, terms, prec), prec }
    }

    pub fn from_terms(base: BaseRing, terms: &[(Q, Fe)], prec: Q) -> Result<Self> {
        let prec = base.to_scaled(prec)?;
        let mut v = Vec::with_capacity(terms.len());
        for &(e, c) in terms {
            let e = base.to_scaled(e)?;
            if e < 0 {
                return Err(Error::NotDivisible);
            }
            v.push((e, c));
        }
        Ok(Self::from_scaled_terms(base, v, prec))
    }

    #[inline]
    pub fn base(&self) -> BaseRing {
        self.base
    }

    #[inline]
    pub fn prec_scaled(&self) -> i64 {
        self.prec
    }

    pub fn prec(&self) -> Q {
        self.base.from_scaled(self.prec)
    }

    pub fn scaled_terms(&self) -> &[(i64, Fe)] {
        &self.terms
    }

    pub fn terms(&self) -> impl Iterator<Item = (Q, Fe)> + '_ {
        self.terms.iter().map(move |&(e, c)| (self.base.from_scaled(e), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Scaled valuation, or `None` when zero at precision.
    #[inline]
    pub fn val_scaled(&self) -> Option<i64> {
        self.terms.first().map(|&(e, _)| e)
    }

    /// Scaled valuation with the precision standing in for zero.
    #[inline]
    pub fn val_or_prec(&self) -> i64 {
        self.val_scaled().unwrap_or(self.prec)
    }

    pub fn valuation(&self) -> Valuation {
        match self.val_scaled() {
            Some(v) => Valuation::Finite(self.base.from_scaled(v)),
            None => Valuation::ZeroAt(self.prec()),
        }
    }

    pub fn leading(&self) -> Option<(i64, Fe)> {
        self.terms.first().copied()
    }

    pub fn coeff_scaled(&self, e: i64) -> Fe {
        match self.terms.binary_search_by_key(&e, |&(x, _)| x) {
            Ok(i) => self.terms[i].1,
            Err(_) => self.base.field.zero(),
        }
    }

    /// Largest root level actually used by the exponents.
    pub fn used_level(&self) -> u32 {
        let p = self.base.p() as i64;
        let mut lvl = 0;
        for &(e, _) in &self.terms {
            let mut e = e;
            let mut l = self.base.level;
            while l > 0 && e % p == 0 {
                e /= p;
                l -= 1;
            }
            lvl = lvl.max(l);
        }
        lvl
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(Error::ParameterMismatch)
        }
    }

    /// Re-expresses the element over `base`, which may differ in root
    /// level and cap. Lowering the level fails if an exponent needs it.
    pub fn convert(&self, base: BaseRing) -> Result<Self> {
        if base.field != self.base.field {
            return Err(Error::ParameterMismatch);
        }
        let rescale = |e: i64| -> Result<i64> {
            if base.scale >= self.base.scale {
                Ok(e * (base.scale / self.base.scale))
            } else {
                let d = self.base.scale / base.scale;
                if e % d != 0 {
                    return Err(Error::LevelOverflow { level: base.level });
                }
                Ok(e / d)
            }
        };
        let prec = if base.scale >= self.base.scale {
            self.prec.saturating_mul(base.scale / self.base.scale)
        } else {
            self.prec.div_euclid(self.base.scale / base.scale)
        }
        .min(base.cap);
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(e, c) in &self.terms {
            let e = rescale(e)?;
            if e >= prec {
                break;
            }
            terms.push((e, c));
        }
        Ok(Self { base, terms, prec })
    }

    /// Moves to a ring differing only in the precision cap.
    pub fn rebase(&self, base: BaseRing) -> Result<Self> {
        if base.field != self.base.field || base.level != self.base.level {
            return Err(Error::ParameterMismatch);
        }
        let prec = self.prec.min(base.cap);
        Ok(Self { base, terms: self.terms.iter().copied().take_while(|&(e, _)| e < prec).collect(), prec })
    }

    /// Forgets everything at and above `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        Self { base: self.base, terms: self.terms.iter().copied().take_while(|&(e, _)| e < prec).collect(), prec }
    }

    /// Declares the unknown tail zero up to `prec` (a choice of lift).
    pub fn lift_to(&self, prec: i64) -> Self {
        Self { prec: prec.max(self.prec).min(self.base.cap), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let f = self.base.field;
        let prec = self.prec.min(other.prec);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        loop {
            let next = match (a.get(i), b.get(j)) {
                (Some(&(ea, ca)), Some(&(eb, cb))) => {
                    if ea < eb {
                        i += 1;
                        (ea, ca)
                    } else if eb < ea {
                        j += 1;
                        (eb, cb)
                    } else {
                        i += 1;
                        j += 1;
                        (ea, f.add(ca, cb))
                    }
                }
                (Some(&t), None) => {
                    i += 1;
                    t
                }
                (None, Some(&t)) => {
                    j += 1;
                    t
                }
                (None, None) => break,
            };
            if next.0 >= prec {
                break;
            }
            if !f.is_zero(next.1) {
                out.push(next);
            }
        }
        Self { base: self.base, terms: out, prec }
    }

    pub fn neg(&self) -> Self {
        let f = self.base.field;
        Self { base: self.base, terms: self.terms.iter().map(|&(e, c)| (e, f.neg(c))).collect(), prec: self.prec }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Fe) -> Self {
        let f = self.base.field;
        if f.is_zero(c) {
            return Self::zero_at(self.base, self.prec);
        }
        Self { base: self.base, terms: self.terms.iter().map(|&(e, x)| (e, f.mul(x, c))).collect(), prec: self.prec }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let f = self.base.field;
        let prec = (self.prec.saturating_add(other.val_or_prec()))
            .min(other.prec.saturating_add(self.val_or_prec()))
            .min(self.base.cap);
        let mut acc = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ea, ca) in &self.terms {
            for &(eb, cb) in &other.terms {
                let e = ea + eb;
                if e >= prec {
                    break;
                }
                acc.push((e, f.mul(ca, cb)));
            }
        }
        Self { base: self.base, terms: normalize(&self.base, acc, prec), prec }
    }

    pub fn square(&self) -> Self {
        self.mul_unchecked(self)
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut r = Self::one(self.base);
        let mut b = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul_unchecked(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.square();
            }
        }
        r
    }

    /// Multiplication by `t^e` (scaled, `e ≥ 0`).
    pub fn shift_up(&self, e: i64) -> Self {
        debug_assert!(e >= 0);
        let prec = self.prec.saturating_add(e).min(self.base.cap);
        Self::from_scaled_terms(self.base, self.terms.iter().map(|&(x, c)| (x + e, c)).collect(), prec)
    }

    /// Division by `t^e`; fails unless the quotient is integral.
    pub fn shift_down(&self, e: i64) -> Result<Self> {
        match self.val_scaled() {
            Some(v) if v < e => return Err(Error::NotDivisible),
            None if self.prec < e => return Err(Error::PrecisionExhausted { needed: Some(self.base.from_scaled(e)) }),
            _ => {}
        }
        Ok(Self { base: self.base, terms: self.terms.iter().map(|&(x, c)| (x - e, c)).collect(), prec: self.prec - e })
    }

    pub fn frobenius(&self) -> Self {
        self.frobenius_pow(1).expect("forward Frobenius never overflows")
    }

    pub fn frobenius_inverse(&self) -> Result<Self> {
        self.frobenius_pow(-1)
    }

    /// `x ↦ x^{p^k}` for any integer `k`.
    pub fn frobenius_pow(&self, k: i64) -> Result<Self> {
        let f = self.base.field;
        let p = self.base.p() as i64;
        if k >= 0 {
            let m = p.checked_pow(k as u32).ok_or(Error::LevelOverflow { level: self.base.level })?;
            let prec = self.prec.saturating_mul(m).min(self.base.cap);
            let terms = self
                .terms
                .iter()
                .map(|&(e, c)| (e.saturating_mul(m), f.frobenius_pow(c, k)))
                .take_while(|&(e, _)| e < prec)
                .collect();
            Ok(Self { base: self.base, terms, prec })
        } else {
            let m = p.checked_pow((-k) as u32).ok_or(Error::LevelOverflow { level: self.base.level })?;
            let mut terms = Vec::with_capacity(self.terms.len());
            for &(e, c) in &self.terms {
                if e % m != 0 {
                    return Err(Error::LevelOverflow { level: self.base.level });
                }
                terms.push((e / m, f.frobenius_pow(c, k)));
            }
            Ok(Self { base: self.base, terms, prec: self.prec.div_euclid(m) })
        }
    }

    /// Inverse of a unit (valuation 0), to the unit's own precision.
    pub fn inv_unit(&self) -> Result<Self> {
        let f = self.base.field;
        let (e0, c0) = match self.leading() {
            Some(l) => l,
            None => return Err(Error::PrecisionExhausted { needed: None }),
        };
        if e0 != 0 {
            return Err(Error::NotDivisible);
        }
        let c0inv = f.inv(c0).expect("nonzero");
        // u = c0 (1 - y),  u^{-1} = c0^{-1} Π_j (1 + y^{2^j})
        let normalized = self.scale(c0inv);
        let y = Self::one(self.base).sub(&normalized)?.truncate(self.prec);
        let mut r = Self::one(self.base).truncate(self.prec);
        let mut yk = y;
        while let Some(v) = yk.val_scaled() {
            if v >= self.prec {
                break;
            }
            r = r.mul_unchecked(&Self::one(self.base).add_unchecked(&yk));
            yk = yk.square();
        }
        Ok(r.truncate(self.prec).scale(c0inv))
    }

    /// Exact quotient `self / b` in the valuation ring.
    ///
    /// With `b = t^{v_b} u`, the result is known to
    /// `min(P_a − v_b, P_b + v_a − 2 v_b)`.
    pub fn div_exact(&self, b: &Self) -> Result<Self> {
        self.check(b)?;
        let vb = match b.val_scaled() {
            Some(v) => v,
            None => return Err(Error::PrecisionExhausted { needed: None }),
        };
        let a_shift = self.shift_down(vb)?;
        let u = b.shift_down(vb)?;
        Ok(a_shift.mul_unchecked(&u.inv_unit()?))
    }

    /// `true` when both agree on every term below the smaller precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.base != other.base {
            return false;
        }
        let p = self.prec.min(other.prec);
        let a = self.terms.iter().take_while(|&&(e, _)| e < p);
        let b = other.terms.iter().take_while(|&&(e, _)| e < p);
        a.eq(b)
    }

    /// Monomial `t^{min v}` generating the ideal of the inputs.
    pub fn gcd(elems: &[Self]) -> Result<Self> {
        let first = elems.first().ok_or(Error::AllZero)?;
        for e in elems {
            first.check(e)?;
        }
        let v = elems.iter().filter_map(|e| e.val_scaled()).min().ok_or(Error::AllZero)?;
        if let Some(z) = elems.iter().find(|e| e.is_zero() && e.prec < v) {
            return Err(Error::PrecisionExhausted { needed: Some(first.base.from_scaled(v.max(z.prec))) });
        }
        Ok(Self::monomial_scaled(first.base, first.base.field.one(), v))
    }

    /// Solves `x^p − x = a` for `v(a) > 0` by `x = −Σ_k a^{p^k}`.
    pub fn artin_schreier_solve(&self) -> Result<Self> {
        let v = match self.val_scaled() {
            None => return Ok(Self::zero_at(self.base, self.prec)),
            Some(v) if v <= 0 => return Err(Error::NonPositiveValuation),
            Some(v) => v,
        };
        let p = self.base.p() as i64;
        let mut sum = Self::zero_at(self.base, self.prec);
        let mut term = self.clone();
        let mut pk: i64 = 1;
        while pk.saturating_mul(v) < self.prec {
            sum = sum.add_unchecked(&term);
            term = term.frobenius();
            pk = pk.saturating_mul(p);
        }
        Ok(sum.neg())
    }

    pub fn parse(base: BaseRing, s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut prec = base.cap;
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() || s == "0" {
            return Ok(Self::zero(base));
        }
        for tok in s.split('+') {
            if let Some(inner) = tok.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
                let e = parse_exponent(inner.strip_prefix('t').ok_or_else(|| bad(tok))?, true)?;
                prec = prec.min(base.to_scaled(e).map_err(|_| bad(tok))?);
                continue;
            }
            let (coef, mono) = match tok.split_once('*') {
                Some((c, m)) => (c, Some(m)),
                None if tok.starts_with('t') => ("1", Some(tok)),
                None => (tok, None),
            };
            let code: u64 = coef.parse().map_err(|_| bad(tok))?;
            let c = base.field.from_code(code)?;
            let e = match mono {
                None => Q::from_integer(0),
                Some(m) => parse_exponent(m.strip_prefix('t').ok_or_else(|| bad(tok))?, false)?,
            };
            if e < Q::from_integer(0) {
                return Err(bad(tok));
            }
            terms.push((base.to_scaled(e)?, c));
        }
        Ok(Self::from_scaled_terms(base, terms, prec))
    }
}

fn bad(tok: &str) -> Error {
    Error::Parse(format!("bad series term {tok:?}"))
}

/// Parses the part after `t`: empty, `^k` or `^(a/b)`.
fn parse_exponent(s: &str, required: bool) -> Result<Q> {
    if s.is_empty() {
        return if required { Err(bad(s)) } else { Ok(Q::from_integer(1)) };
    }
    let e = s.strip_prefix('^').ok_or_else(|| bad(s))?;
    let e = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(e);
    parse_q(e)
}

fn normalize(base: &BaseRing, mut terms: Vec<(i64, Fe)>, prec: i64) -> Vec<(i64, Fe)> {
    let f = base.field;
    terms.sort_unstable_by_key(|&(e, _)| e);
    let mut out: Vec<(i64, Fe)> = Vec::with_capacity(terms.len());
    for (e, c) in terms {
        if e >= prec {
            break;
        }
        match out.last_mut() {
            Some(last) if last.0 == e => last.1 = f.add(last.1, c),
            _ => out.push((e, c)),
        }
    }
    out.retain(|&(_, c)| !f.is_zero(c));
    out
}

impl fmt::Display for Puiseux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in self.terms() {
            write!(f, "{}*t^({})+", self.base.field.code(c), fmt_q_short(e))?;
        }
        write!(f, "O(t^({}))", fmt_q_short(self.prec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn base(p: u32, s: u32, level: u32, n: i64) -> BaseRing {
        BaseRing::new(p, s, level, q(n, 1)).unwrap()
    }

    fn el(b: BaseRing, s: &str) -> Puiseux {
        Puiseux::parse(b, s).unwrap()
    }

    #[test]
    fn characteristic_two_sum() {
        let b = base(2, 1, 2, 8);
        assert!(el(b, "t").add(&el(b, "t")).unwrap().is_zero());
    }

    #[test]
    fn half_powers_multiply() {
        let b = base(2, 1, 2, 8);
        let h = el(b, "t^(1/2)");
        assert_eq!(h.mul(&h).unwrap(), el(b, "t"));
    }

    #[test]
    fn freshmans_dream_p2() {
        let b = base(2, 1, 1, 8);
        let x = el(b, "1+t");
        // (1+t)^2 = 1 + 2t + t^2 expanded over Z, then reduced mod 2.
        let expanded = [1i64, 2, 1];
        let want = Puiseux::from_scaled_terms(
            b,
            expanded.iter().enumerate().map(|(i, &c)| (2 * i as i64, b.field.from_int(c))).collect(),
            b.cap,
        );
        assert_eq!(x.mul(&x).unwrap(), want);
    }

    #[test]
    fn frobenius_p3_expansion() {
        let b = base(3, 1, 1, 12);
        let x = el(b, "1+t");
        // (1+t)^3 by binomial coefficients 1,3,3,1 mod 3.
        let want = Puiseux::from_scaled_terms(
            b,
            [1i64, 3, 3, 1].iter().enumerate().map(|(i, &c)| (3 * i as i64, b.field.from_int(c))).collect(),
            b.cap,
        );
        assert_eq!(x.frobenius(), want);
        assert_eq!(x.pow(3), want);
        assert_eq!(el(b, "t^(1/3)").frobenius(), el(b, "t"));
    }

    #[test]
    fn valuation_cases() {
        let b = base(2, 1, 1, 5);
        assert_eq!(el(b, "t^(3/2)+t^2").valuation(), Valuation::Finite(q(3, 2)));
        assert_eq!(Puiseux::zero(b).valuation(), Valuation::ZeroAt(q(5, 1)));
    }

    #[test]
    fn gcd_examples() {
        let b = base(2, 1, 1, 8);
        assert_eq!(Puiseux::gcd(&[el(b, "t"), el(b, "t^(1/2)")]).unwrap(), el(b, "t^(1/2)"));
        assert_eq!(Puiseux::gcd(&[el(b, "t+t^2"), el(b, "t^3")]).unwrap(), el(b, "t"));
        assert_eq!(Puiseux::gcd(&[Puiseux::zero(b)]), Err(Error::AllZero));
        assert!(matches!(Puiseux::gcd(&[el(b, "t^3"), el(b, "O(t^2)")]), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn artin_schreier_t_p2() {
        let b = base(2, 1, 0, 20);
        let x = el(b, "t").artin_schreier_solve().unwrap();
        assert_eq!(x, el(b, "t+t^2+t^4+t^8+t^16"));
        let resid = x.mul(&x).unwrap().sub(&x).unwrap().sub(&el(b, "t")).unwrap();
        assert!(resid.is_zero());
        assert_eq!(resid.prec(), q(20, 1));
    }

    #[test]
    fn artin_schreier_root_p3() {
        let b = base(3, 1, 1, 10);
        let a = el(b, "t^(1/3)");
        let x = a.artin_schreier_solve().unwrap();
        assert_eq!(x, el(b, "t^(1/3)+t+t^3+t^9").neg());
        let resid = x.pow(3).sub(&x).unwrap().sub(&a).unwrap();
        assert!(resid.is_zero());
        assert!(Puiseux::zero(b).artin_schreier_solve().unwrap().is_zero());
        assert_eq!(el(b, "1+t").artin_schreier_solve(), Err(Error::NonPositiveValuation));
    }

    #[test]
    fn level_overflow_on_root() {
        let b = base(2, 1, 1, 8);
        assert_eq!(el(b, "t^(1/2)").frobenius_inverse(), Err(Error::LevelOverflow { level: 1 }));
        assert_eq!(el(b, "t").frobenius_inverse().unwrap(), el(b, "t^(1/2)+O(t^4)"));
    }

    #[test]
    fn inverse_of_unit() {
        let b = base(5, 2, 1, 6);
        let u = el(b, "7+3*t^(1/5)+t^2");
        let w = u.inv_unit().unwrap();
        let one = u.mul(&w).unwrap();
        assert!(one.agrees_with(&Puiseux::one(b)));
        assert_eq!(one.prec(), q(6, 1));
    }

    #[test]
    fn exact_division_precision() {
        let b = base(3, 1, 1, 9);
        let a = el(b, "t^2+t^(7/3)");
        let d = el(b, "t+2*t^(4/3)");
        let quo = a.div_exact(&d).unwrap();
        assert!(quo.mul(&d).unwrap().agrees_with(&a));
        // min(P_a − v_b, P_b + v_a − 2 v_b) = min(8, 9)
        assert_eq!(quo.prec(), q(8, 1));
        assert_eq!(d.div_exact(&a), Err(Error::NotDivisible));
    }

    #[test]
    fn display_round_trip() {
        let b = base(3, 2, 1, 5);
        let x = el(b, "1*t^(1/3)+8*t^(4/3)+O(t^(5))");
        assert_eq!(format!("{x}"), "1*t^(1/3)+8*t^(4/3)+O(t^(5))");
        assert_eq!(el(b, &format!("{x}")), x);
        assert!(Puiseux::parse(b, "t^(1/4)").is_err());
        assert!(Puiseux::parse(b, "9*t").is_err());
    }
}
