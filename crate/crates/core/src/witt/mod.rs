//! Truncated Witt vectors `W_m(R)` over the Puiseux model `R`.
//!
//! An element is stored by its Teichmüller digits `x_i`, meaning
//! `Σ_{i<m} p^i [x_i]`; its Witt coordinates are `a_i = x_i^{p^i}`. Digit
//! `i` of a result is the `p^i`-th root of a universal polynomial in the
//! coordinates, so the ring works at root level `L + m − 1` where `L` is
//! the level of the inputs.

pub mod period;
pub mod polys;

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::params::{BaseRing, ModelParams};
use crate::puiseux::Puiseux;

use polys::{reduce_mod_p, universal, Kind, ModPPoly};

#[derive(Debug)]
struct Tables {
    add: Vec<ModPPoly>,
    sub: Vec<ModPPoly>,
    mul: Vec<ModPPoly>,
}

/// Shared context: base ring, length and the polynomial tables.
#[derive(Clone, Debug)]
pub struct WittRing {
    params: ModelParams,
    base: BaseRing,
    len: usize,
    tables: Arc<Tables>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    digits: Vec<Puiseux>,
}

impl WittVector {
    pub fn digits(&self) -> &[Puiseux] {
        &self.digits
    }

    pub fn digit(&self, i: usize) -> &Puiseux {
        &self.digits[i]
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Zero at precision in every digit.
    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|d| d.is_zero())
    }

    /// Digitwise agreement below the smaller precisions, over common length.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.digits.iter().zip(&other.digits).all(|(a, b)| a.agrees_with(b))
    }

    pub fn truncate_len(&self, n: usize) -> Self {
        Self { digits: self.digits.iter().take(n).cloned().collect() }
    }
}

impl WittRing {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let len = params.m as usize;
        let p = params.p;
        let build = |kind| -> Result<Vec<ModPPoly>> {
            Ok(universal(p, len, kind)?.iter().map(|t| reduce_mod_p(t, p)).collect())
        };
        let tables = Tables { add: build(Kind::Add)?, sub: build(Kind::Sub)?, mul: build(Kind::Mul)? };
        let user = params.base();
        let base = BaseRing::new(p, params.s, params.level + params.m - 1, params.prec)?;
        debug_assert_eq!(base.field, user.field);
        Ok(Self { params, base, len, tables: Arc::new(tables) })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Ring of the digits.
    pub fn base(&self) -> BaseRing {
        self.base
    }

    /// Ring at the user's root level `L`.
    pub fn user_base(&self) -> BaseRing {
        self.params.base()
    }

    /// Witt length `m`, at least one.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    /// Table sizes `(add, sub, mul)` of the `n`-th polynomials mod `p`.
    pub fn table_terms(&self, n: usize) -> (usize, usize, usize) {
        let t = &self.tables;
        (t.add[n].terms.len(), t.sub[n].terms.len(), t.mul[n].terms.len())
    }

    /// Brings a Puiseux element into the digit ring.
    pub fn embed(&self, x: &Puiseux) -> Result<Puiseux> {
        x.convert(self.base)
    }

    pub fn from_digits(&self, digits: Vec<Puiseux>) -> Result<WittVector> {
        if digits.len() > self.len {
            return Err(Error::ShapeMismatch("more digits than the Witt length".into()));
        }
        let digits = digits.iter().map(|d| self.embed(d)).collect::<Result<_>>()?;
        Ok(WittVector { digits })
    }

    pub fn zero(&self) -> WittVector {
        WittVector { digits: (0..self.len).map(|_| Puiseux::zero(self.base)).collect() }
    }

    pub fn one(&self) -> WittVector {
        self.teichmuller(&Puiseux::one(self.base)).expect("same ring")
    }

    /// `[x]`.
    pub fn teichmuller(&self, x: &Puiseux) -> Result<WittVector> {
        let mut w = self.zero();
        w.digits[0] = self.embed(x)?;
        Ok(w)
    }

    /// Image of an integer: Teichmüller digits of `k` in `Z/p^m`.
    pub fn from_int(&self, k: i64) -> WittVector {
        let p = self.p() as i64;
        let pm = p.pow(self.len as u32);
        let f = self.base.field;
        let mut rest = k.rem_euclid(pm);
        let mut digits = Vec::with_capacity(self.len);
        for i in 0..self.len {
            let modulus = pm / p.pow(i as u32);
            let c = rest % p;
            // Teichmüller representative of c modulo p^{m−i}.
            let mut omega = 1i64;
            let e = (p as u64).pow((self.len - i - 1) as u32);
            let mut b = c;
            let mut ee = e;
            while ee > 0 {
                if ee & 1 == 1 {
                    omega = omega * b % modulus;
                }
                b = b * b % modulus;
                ee >>= 1;
            }
            if c == 0 {
                omega = 0;
            }
            digits.push(Puiseux::constant(self.base, f.from_int(c)));
            rest = (rest - omega).rem_euclid(modulus) / p;
        }
        WittVector { digits }
    }

    fn eval(&self, kind: Kind, a: &WittVector, b: &WittVector) -> Result<WittVector> {
        let n = a.len().min(b.len()).min(self.len);
        let table = match kind {
            Kind::Add => &self.tables.add,
            Kind::Sub => &self.tables.sub,
            Kind::Mul => &self.tables.mul,
        };
        let mut cache = PowerCache::new(self, a, b, n)?;
        let mut digits = Vec::with_capacity(n);
        for (k, poly) in table.iter().take(n).enumerate() {
            let mut c = Puiseux::zero(self.base);
            for (key, coeff) in &poly.terms {
                if let Some(mono) = cache.monomial(key)? {
                    c = c.add(&mono.scale(self.base.field.from_int(*coeff as i64)))?;
                }
            }
            digits.push(c.frobenius_pow(-(k as i64))?);
        }
        Ok(WittVector { digits })
    }

    pub fn add(&self, a: &WittVector, b: &WittVector) -> Result<WittVector> {
        self.eval(Kind::Add, a, b)
    }

    pub fn sub(&self, a: &WittVector, b: &WittVector) -> Result<WittVector> {
        self.eval(Kind::Sub, a, b)
    }

    pub fn mul(&self, a: &WittVector, b: &WittVector) -> Result<WittVector> {
        self.eval(Kind::Mul, a, b)
    }

    pub fn neg(&self, a: &WittVector) -> Result<WittVector> {
        self.sub(&self.zero().truncate_len(a.len()), a)
    }

    pub fn pow(&self, a: &WittVector, n: u32) -> Result<WittVector> {
        let mut r = self.one().truncate_len(a.len());
        for _ in 0..n {
            r = self.mul(&r, a)?;
        }
        Ok(r)
    }

    /// `Σ p^i [x_i] ↦ Σ p^i [x_i^p]`.
    pub fn frobenius(&self, a: &WittVector) -> WittVector {
        WittVector { digits: a.digits.iter().map(|d| d.frobenius()).collect() }
    }

    /// `[x] · a`, digitwise since `[x][y] = [xy]`.
    pub fn scale_teichmuller(&self, a: &WittVector, x: &Puiseux) -> Result<WittVector> {
        let x = self.embed(x)?;
        Ok(WittVector { digits: a.digits.iter().map(|d| d.mul(&x)).collect::<Result<_>>()? })
    }

    /// Multiplication by `p`: digits move up, the top one falls off.
    pub fn mul_p(&self, a: &WittVector) -> WittVector {
        let mut digits = Vec::with_capacity(a.len());
        if !a.is_empty() {
            digits.push(Puiseux::zero(self.base));
            digits.extend(a.digits.iter().take(a.len() - 1).cloned());
        }
        WittVector { digits }
    }

    /// Exact division by `p`; the vector gets one digit shorter.
    pub fn div_p(&self, a: &WittVector) -> Result<WittVector> {
        match a.digits.first() {
            None => Err(Error::PrecisionExhausted { needed: None }),
            Some(d) if !d.is_zero() => Err(Error::NotDivisible),
            Some(_) => Ok(WittVector { digits: a.digits[1..].to_vec() }),
        }
    }
}

/// Powers of the Witt coordinates `a_i = x_i^{p^i}`, built from digit-`<p`
/// powers and Frobenius.
struct PowerCache {
    base: BaseRing,
    p: u16,
    /// `small[slot][d] = coordinate^d` for `d < p`.
    small: Vec<Vec<Puiseux>>,
    /// Coordinate is exactly zero.
    vanishing: Vec<bool>,
    powers: BTreeMap<(usize, u16), Puiseux>,
}

impl PowerCache {
    fn new(ring: &WittRing, a: &WittVector, b: &WittVector, n: usize) -> Result<Self> {
        let base = ring.base;
        let p = ring.p() as u16;
        let mut small = Vec::with_capacity(8);
        let mut vanishing = Vec::with_capacity(8);
        for slot in 0..8 {
            let (v, i) = if slot < 4 { (a, slot) } else { (b, slot - 4) };
            let coord = if i < n { v.digits[i].frobenius_pow(i as i64)? } else { Puiseux::zero(base) };
            vanishing.push(coord.is_zero() && coord.prec_scaled() >= base.cap);
            let mut pw = Vec::with_capacity(p as usize);
            pw.push(Puiseux::one(base));
            for d in 1..p as usize {
                let next = pw[d - 1].mul(&coord)?;
                pw.push(next);
            }
            small.push(pw);
        }
        Ok(Self { base, p, small, vanishing, powers: BTreeMap::new() })
    }

    fn power(&mut self, slot: usize, e: u16) -> Result<Puiseux> {
        if let Some(x) = self.powers.get(&(slot, e)) {
            return Ok(x.clone());
        }
        let mut r = Puiseux::one(self.base);
        let mut rest = e;
        let mut j = 0i64;
        while rest > 0 {
            let d = (rest % self.p) as usize;
            if d > 0 {
                r = r.mul(&self.small[slot][d].frobenius_pow(j)?)?;
            }
            rest /= self.p;
            j += 1;
        }
        self.powers.insert((slot, e), r.clone());
        Ok(r)
    }

    fn monomial(&mut self, key: &polys::Key) -> Result<Option<Puiseux>> {
        if (0..8).any(|s| key[s] > 0 && self.vanishing[s]) {
            return Ok(None);
        }
        let mut r = Puiseux::one(self.base);
        for (slot, &e) in key.iter().enumerate() {
            if e > 0 {
                r = r.mul(&self.power(slot, e)?)?;
            }
        }
        Ok(Some(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn ring(p: u32, m: u32, n: i64) -> WittRing {
        WittRing::new(ModelParams::new(p, 1, 1, qi(n), m, 1).unwrap()).unwrap()
    }

    fn el(r: &WittRing, s: &str) -> Puiseux {
        Puiseux::parse(r.user_base(), s).unwrap()
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let r = ring(2, 3, 6);
        let a = r.teichmuller(&el(&r, "t")).unwrap();
        let b = r.teichmuller(&el(&r, "t^(1/2)")).unwrap();
        let want = r.teichmuller(&el(&r, "t^(3/2)")).unwrap();
        assert!(r.mul(&a, &b).unwrap().agrees_with(&want));
    }

    #[test]
    fn bracket_plus_negative_vanishes_odd_p() {
        for p in [3, 5] {
            let r = ring(p, 3, 4);
            let x = el(&r, &alloc::format!("2+t^(1/{p})+t"));
            let s = r.add(&r.teichmuller(&x).unwrap(), &r.teichmuller(&x.neg()).unwrap()).unwrap();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn cross_term_p2() {
        // [a] + [b] in W_2 over F_2[[t]]: coordinates (a + b, ab), so digit
        // one is (ab)^{1/2}.
        let r = ring(2, 2, 8);
        let (a, b) = (el(&r, "t"), el(&r, "1+t^2"));
        let s = r.add(&r.teichmuller(&a).unwrap(), &r.teichmuller(&b).unwrap()).unwrap();
        assert!(s.digit(0).agrees_with(&r.embed(&a.add(&b).unwrap()).unwrap()));
        let coord1 = s.digit(1).frobenius();
        assert!(coord1.agrees_with(&r.embed(&a.mul(&b).unwrap()).unwrap()));
        assert_eq!(s.digit(1).prec(), q(4, 1));
    }

    #[test]
    fn integers_embed() {
        let r = ring(3, 3, 4);
        let two = r.from_int(2);
        let one = r.one();
        assert!(r.add(&one, &one).unwrap().agrees_with(&two));
        let p = r.from_int(3);
        assert!(p.agrees_with(&r.mul_p(&one)));
        let m1 = r.from_int(-1);
        assert!(r.add(&m1, &one).unwrap().is_zero());
        let r2 = ring(2, 3, 4);
        let m1 = r2.from_int(-1);
        assert!(r2.add(&m1, &r2.one()).unwrap().is_zero());
        assert!(r2.neg(&r2.one()).unwrap().agrees_with(&m1));
    }

    #[test]
    fn frobenius_on_brackets() {
        let r = ring(3, 2, 6);
        let x = el(&r, "t^(1/3)+2*t");
        let lhs = r.frobenius(&r.teichmuller(&x).unwrap());
        assert!(lhs.agrees_with(&r.teichmuller(&x.frobenius()).unwrap()));
    }
}
