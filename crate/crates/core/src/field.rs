//! Finite fields `F_{p^s}` for `s ≤ 4` in a fixed polynomial basis.
//!
//! The basis is `1, x, …, x^{s-1}` modulo the Conway polynomial of degree
//! `s`. For `s = 1` any prime works and `x` is the least primitive root.

use alloc::format;
use core::fmt;

use crate::error::{Error, Result};

/// Low coefficients `c_0..c_{s-1}` of the monic Conway polynomial.
const CONWAY: &[(u32, u32, [u32; 4])] = &[
    (2, 2, [1, 1, 0, 0]),
    (2, 3, [1, 1, 0, 0]),
    (2, 4, [1, 1, 0, 0]),
    (3, 2, [2, 2, 0, 0]),
    (3, 3, [1, 2, 0, 0]),
    (3, 4, [2, 0, 0, 2]),
    (5, 2, [2, 4, 0, 0]),
    (5, 3, [3, 3, 0, 0]),
    (5, 4, [2, 4, 4, 0]),
    (7, 2, [3, 6, 0, 0]),
    (7, 3, [4, 0, 6, 0]),
    (7, 4, [3, 4, 5, 0]),
    (11, 2, [2, 7, 0, 0]),
    (11, 3, [9, 2, 0, 0]),
    (11, 4, [2, 10, 8, 0]),
    (13, 2, [2, 12, 0, 0]),
    (13, 3, [11, 2, 0, 0]),
    (13, 4, [2, 12, 3, 0]),
];

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn least_primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let n = (p - 1) as u64;
    let mut factors = [0u64; 16];
    let mut nf = 0;
    let mut r = n;
    let mut d = 2;
    while d * d <= r {
        if r.is_multiple_of(d) {
            factors[nf] = d;
            nf += 1;
            while r.is_multiple_of(d) {
                r /= d;
            }
        }
        d += 1;
    }
    if r > 1 {
        factors[nf] = r;
        nf += 1;
    }
    (2..p)
        .find(|&g| factors[..nf].iter().all(|&f| pow_mod(g as u64, n / f, p as u64) != 1))
        .expect("primitive root exists")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FiniteField {
    p: u32,
    s: u32,
    /// Low coefficients of the monic modulus.
    modulus: [u32; 4],
}

/// Field element as coordinates in the polynomial basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(pub [u32; 4]);

impl FiniteField {
    pub fn new(p: u32, s: u32) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 16 {
            return Err(Error::InvalidParams(format!("p = {p} must be a prime below 65536")));
        }
        if s == 1 {
            let g = least_primitive_root(p);
            return Ok(Self { p, s, modulus: [(p - g) % p, 0, 0, 0] });
        }
        CONWAY
            .iter()
            .find(|&&(q, t, _)| q == p && t == s)
            .map(|&(_, _, modulus)| Self { p, s, modulus })
            .ok_or_else(|| Error::InvalidParams(format!("no Conway polynomial shipped for p = {p}, s = {s}")))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.s
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.s)
    }

    pub fn modulus(&self) -> [u32; 4] {
        self.modulus
    }

    pub fn zero(&self) -> Fe {
        Fe([0; 4])
    }

    pub fn one(&self) -> Fe {
        Fe([1, 0, 0, 0])
    }

    /// The basis element `x`; for `s = 1` the least primitive root.
    pub fn generator(&self) -> Fe {
        if self.s == 1 {
            Fe([(self.p - self.modulus[0]) % self.p, 0, 0, 0])
        } else {
            Fe([0, 1, 0, 0])
        }
    }

    pub fn from_int(&self, n: i64) -> Fe {
        Fe([n.rem_euclid(self.p as i64) as u32, 0, 0, 0])
    }

    /// Element with base-`p` digits of `code` as coordinates.
    pub fn from_code(&self, code: u64) -> Result<Fe> {
        if code >= self.order() {
            return Err(Error::Parse(format!("coefficient {code} outside F_{}", self.order())));
        }
        let mut c = [0u32; 4];
        let mut r = code;
        for slot in c.iter_mut().take(self.s as usize) {
            *slot = (r % self.p as u64) as u32;
            r /= self.p as u64;
        }
        Ok(Fe(c))
    }

    pub fn code(&self, a: Fe) -> u64 {
        a.0[..self.s as usize].iter().rev().fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    #[inline]
    pub fn is_zero(&self, a: Fe) -> bool {
        a.0 == [0; 4]
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let mut c = [0; 4];
        for i in 0..self.s as usize {
            c[i] = (a.0[i] + b.0[i]) % self.p;
        }
        Fe(c)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        let mut c = [0; 4];
        for i in 0..self.s as usize {
            c[i] = (self.p - a.0[i]) % self.p;
        }
        Fe(c)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let s = self.s as usize;
        let p = self.p as u64;
        let mut prod = [0u64; 7];
        for i in 0..s {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..s {
                prod[i + j] = (prod[i + j] + a.0[i] as u64 * b.0[j] as u64) % p;
            }
        }
        // x^s = -Σ modulus_i x^i
        for k in (s..2 * s - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..s {
                let sub = top * self.modulus[i] as u64 % p;
                prod[k - s + i] = (prod[k - s + i] + p - sub) % p;
            }
        }
        let mut c = [0; 4];
        for i in 0..s {
            c[i] = prod[i] as u32;
        }
        Fe(c)
    }

    pub fn scale(&self, a: Fe, k: i64) -> Fe {
        self.mul(a, self.from_int(k))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        (!self.is_zero(a)).then(|| self.pow(a, self.order() - 2))
    }

    #[inline]
    pub fn frobenius(&self, a: Fe) -> Fe {
        if self.s == 1 {
            a
        } else {
            self.pow(a, self.p as u64)
        }
    }

    pub fn frobenius_inverse(&self, a: Fe) -> Fe {
        if self.s == 1 {
            a
        } else {
            self.pow(a, (self.p as u64).pow(self.s - 1))
        }
    }

    /// `a^{p^k}` for any integer `k` (negative means inverse Frobenius).
    pub fn frobenius_pow(&self, a: Fe, k: i64) -> Fe {
        let k = k.rem_euclid(self.s as i64) as u32;
        if k == 0 {
            a
        } else {
            self.pow(a, (self.p as u64).pow(k))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.order()).map(move |c| self.from_code(c).expect("in range"))
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn all_fields() -> Vec<FiniteField> {
        let mut v = Vec::new();
        for &p in &[2, 3, 5, 7, 11, 13] {
            for s in 1..=4 {
                v.push(FiniteField::new(p, s).unwrap());
            }
        }
        v
    }

    fn multiplicative_order(f: &FiniteField, a: Fe) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != f.one() {
            x = f.mul(x, a);
            k += 1;
        }
        k
    }

    #[test]
    fn modulus_is_primitive() {
        // The generator has order p^s - 1, so the modulus is irreducible and
        // primitive. Orders up to 13^4 are cheap to walk.
        for f in all_fields() {
            assert_eq!(multiplicative_order(&f, f.generator()), f.order() - 1, "{f}");
        }
    }

    #[test]
    fn modulus_has_no_roots_in_prime_field() {
        for f in all_fields().into_iter().filter(|f| f.degree() > 1) {
            let m = f.modulus();
            for x in 0..f.p() as u64 {
                let mut v = 1u64;
                for i in (0..f.degree() as usize).rev() {
                    v = (v * x + m[i] as u64) % f.p() as u64;
                }
                assert_ne!(v, 0, "{f} has root {x}");
            }
        }
    }

    #[test]
    fn frobenius_inverts() {
        for f in all_fields().into_iter().filter(|f| f.order() < 3000) {
            for a in f.elements() {
                assert_eq!(f.frobenius(f.frobenius_inverse(a)), a);
                assert_eq!(f.frobenius_pow(a, -1), f.frobenius_inverse(a));
            }
        }
    }

    #[test]
    fn field_axioms_small() {
        let f = FiniteField::new(3, 2).unwrap();
        let els: Vec<_> = f.elements().collect();
        for &a in &els {
            if !f.is_zero(a) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
            for &b in &els {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &els {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn code_round_trip() {
        let f = FiniteField::new(5, 3).unwrap();
        for c in 0..f.order() {
            assert_eq!(f.code(f.from_code(c).unwrap()), c);
        }
        assert!(f.from_code(125).is_err());
    }

    #[test]
    fn prime_fields_any_prime() {
        let f = FiniteField::new(17, 1).unwrap();
        assert_eq!(f.generator(), Fe([3, 0, 0, 0]));
        assert!(FiniteField::new(17, 2).is_err());
    }
}
