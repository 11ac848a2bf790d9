//! The generator `ξ` of `ker θ`, division by `ξ`, and `B_dR^+ / Fil^d`.
//!
//! With `ε = 1 + t` and `ε^{1/p^k} = 1 + t^{1/p^k}`, the element
//! `ξ = Σ_{j<p} [ε^{j/p}]` has digit zero `(ε − 1)/(ε^{1/p} − 1) = t^{(p−1)/p}`
//! and satisfies `[ε] − 1 = ξ · ([ε^{1/p}] − 1)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::puiseux::Puiseux;
use crate::rational::q;

use super::{WittRing, WittVector};

/// `ε^{1/p^k} = 1 + t^{1/p^k}` in the digit ring.
pub fn epsilon_root(ring: &WittRing, k: u32) -> Result<Puiseux> {
    let b = ring.base();
    let p = ring.p() as i64;
    let e = Puiseux::t_pow(b, q(1, p.pow(k)))?;
    Puiseux::one(b).add(&e)
}

/// `ε^{j/p}`.
fn epsilon_pow(ring: &WittRing, j: u32) -> Result<Puiseux> {
    Ok(epsilon_root(ring, 1)?.pow(j as u64))
}

/// `ξ = Σ_{j<p} [ε^{j/p}]`; needs root level at least one.
pub fn xi(ring: &WittRing) -> Result<WittVector> {
    if ring.params().level < 1 {
        return Err(Error::InvalidParams("ξ needs root level L ≥ 1".into()));
    }
    let p = ring.p();
    let mut x = ring.one();
    for j in 1..p {
        x = ring.add(&x, &ring.teichmuller(&epsilon_pow(ring, j)?)?)?;
    }
    let b = ring.base();
    let v0 = q(p as i64 - 1, p as i64);
    if x.digit(0).prec() <= v0 {
        // Smallest admissible N above (p−1)/p.
        let step = q(1, (p as i64).pow(ring.params().level));
        return Err(Error::PrecisionExhausted { needed: Some(v0 + step) });
    }
    let d0 = Puiseux::t_pow(b, v0)?;
    if !x.digit(0).agrees_with(&d0) {
        return Err(Error::Unsupported("ξ digit zero is not t^{(p-1)/p}".into()));
    }
    if x.len() > 1 && x.digit(1).val_scaled() != Some(0) {
        return Err(Error::PrecisionExhausted { needed: None });
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Division {
    /// `y = q · ξ` modulo `p^{len(y)}`.
    Quotient(WittVector),
    /// The digit-zero divisibility test failed at step `index`.
    Obstruction { index: usize },
}

impl Division {
    pub fn quotient(self) -> Option<WittVector> {
        match self {
            Division::Quotient(q) => Some(q),
            Division::Obstruction { .. } => None,
        }
    }
}

/// One `p`-digit per step: `z_k = r_0 / ξ_0`, then `r ← (r − [z_k]ξ)/p`.
pub fn divide_by_xi(ring: &WittRing, xi: &WittVector, y: &WittVector) -> Result<Division> {
    let x0 = xi.digit(0);
    let mut r = y.clone();
    let mut z: Vec<Puiseux> = Vec::with_capacity(y.len());
    for k in 0..y.len() {
        let zk = match r.digit(0).div_exact(x0) {
            Ok(v) => v,
            Err(Error::NotDivisible) => return Ok(Division::Obstruction { index: k }),
            Err(e) => return Err(e),
        };
        if k + 1 < y.len() {
            let prod = ring.scale_teichmuller(&xi.truncate_len(r.len()), &zk)?;
            let diff = ring.sub(&r, &prod)?;
            r = ring.div_p(&diff)?;
        }
        z.push(zk);
    }
    Ok(Division::Quotient(WittVector { digits: z }))
}

/// Three-valued answer of an equality test at finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Indeterminate,
}

/// Class of `p^{−pshift} · num` in `W[1/p] / (ξ^d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BdrElem {
    pub num: WittVector,
    pub pshift: u32,
}

#[derive(Clone, Debug)]
pub struct BdrRing {
    pub witt: WittRing,
    pub xi: WittVector,
    pub d: u32,
}

impl BdrRing {
    pub fn new(witt: WittRing) -> Result<Self> {
        let xi = xi(&witt)?;
        let d = witt.params().d;
        Ok(Self { witt, xi, d })
    }

    pub fn with_d(&self, d: u32) -> Self {
        Self { d, ..self.clone() }
    }

    pub fn elem(&self, num: WittVector) -> BdrElem {
        BdrElem { num, pshift: 0 }
    }

    fn shift_up(&self, w: &WittVector, e: u32) -> WittVector {
        (0..e).fold(w.clone(), |acc, _| self.witt.mul_p(&acc))
    }

    pub fn add(&self, a: &BdrElem, b: &BdrElem) -> Result<BdrElem> {
        let e = a.pshift.max(b.pshift);
        let x = self.shift_up(&a.num, e - a.pshift);
        let y = self.shift_up(&b.num, e - b.pshift);
        Ok(BdrElem { num: self.witt.add(&x, &y)?, pshift: e })
    }

    pub fn sub(&self, a: &BdrElem, b: &BdrElem) -> Result<BdrElem> {
        let e = a.pshift.max(b.pshift);
        let x = self.shift_up(&a.num, e - a.pshift);
        let y = self.shift_up(&b.num, e - b.pshift);
        Ok(BdrElem { num: self.witt.sub(&x, &y)?, pshift: e })
    }

    pub fn mul(&self, a: &BdrElem, b: &BdrElem) -> Result<BdrElem> {
        let e = a.pshift + b.pshift;
        if e as usize >= self.witt.len() {
            return Err(Error::PshiftOverflow);
        }
        Ok(BdrElem { num: self.witt.mul(&a.num, &b.num)?, pshift: e })
    }

    /// Number of successive exact divisions of `w` by `ξ`, up to `d`.
    pub fn xi_adic_order(&self, w: &WittVector, d: u32) -> Result<(u32, Option<WittVector>)> {
        let mut cur = w.clone();
        for i in 0..d {
            match divide_by_xi(&self.witt, &self.xi, &cur)? {
                Division::Quotient(q) => cur = q,
                Division::Obstruction { .. } => return Ok((i, None)),
            }
        }
        Ok((d, Some(cur)))
    }

    /// `p^{e_b} num_a − p^{e_a} num_b ∈ (ξ^d)`.
    pub fn eq(&self, a: &BdrElem, b: &BdrElem) -> Truth {
        if (a.pshift + b.pshift) as usize >= self.witt.len() {
            return Truth::Indeterminate;
        }
        let x = self.shift_up(&a.num, b.pshift);
        let y = self.shift_up(&b.num, a.pshift);
        let z = match self.witt.sub(&x, &y) {
            Ok(z) => z,
            Err(_) => return Truth::Indeterminate,
        };
        match self.xi_adic_order(&z, self.d) {
            Ok((k, _)) if k == self.d => Truth::True,
            Ok(_) => Truth::False,
            Err(_) => Truth::Indeterminate,
        }
    }

    /// `Σ_{n<d} (−1)^{n+1} ([ε] − 1)^n / n`.
    pub fn log_epsilon(&self) -> Result<BdrElem> {
        let p = self.witt.p();
        if self.d > p {
            return Err(Error::InvalidParams("log([ε]) needs d ≤ p".into()));
        }
        let w = &self.witt;
        let eps = w.teichmuller(&epsilon_root(w, 0)?)?;
        let u = w.sub(&eps, &w.one())?;
        let pm = (p as i64).pow(w.len() as u32);
        let mut acc = w.zero();
        let mut un = w.one();
        for n in 1..self.d as i64 {
            un = w.mul(&un, &u)?;
            let inv = mod_inverse(n, pm).ok_or(Error::NotDivisible)?;
            let sign = if n % 2 == 1 { 1 } else { -1 };
            let term = w.mul(&un, &w.from_int(sign * inv))?;
            acc = w.add(&acc, &term)?;
        }
        Ok(BdrElem { num: acc, pshift: 0 })
    }
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let qq = r0 / r1;
        (r0, r1) = (r1, r0 - qq * r1);
        (s0, s1) = (s1, s0 - qq * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}
