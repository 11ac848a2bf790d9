//! `A_ℓ = Z[ζ_{p^ℓ}] / p^m` in the power basis modulo `Φ_{p^ℓ}`.
//!
//! `A_ℓ` is a chain ring with uniformizer `π = ζ − 1`, ramification index
//! `e = p^{ℓ−1}(p − 1)` and residue field `F_p`. Level zero is `Z/p^m` with
//! `ζ = 1`.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::zpm::{self, ZpmMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicRing {
    pub p: u32,
    pub m: u32,
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicScalar {
    pub ring: CyclotomicRing,
    /// Power-basis coordinates, reduced mod `p^m`.
    pub coeffs: Vec<i64>,
}

/// Coefficients of `Φ_{p^ℓ}` (low degree first); `x − 1` at level zero.
pub fn cyclotomic_poly(p: u32, level: u32) -> Vec<i64> {
    if level == 0 {
        return vec![-1, 1];
    }
    let step = (p as usize).pow(level - 1);
    let mut c = vec![0; step * (p as usize - 1) + 1];
    for j in 0..p as usize {
        c[j * step] = 1;
    }
    c
}

/// `v_p(x)` for a nonzero integer.
fn int_val(mut x: i64, p: i64) -> u32 {
    let mut v = 0;
    while x != 0 && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// `v(ζ_{p^ℓ} − 1)` with `v(p) = 1`, from the norm `N(ζ − 1) = ±Φ_{p^ℓ}(1)`
/// spread evenly over the `deg Φ` conjugates.
pub fn norm_valuation(p: u32, level: u32) -> Option<Q> {
    if level == 0 {
        return None;
    }
    let phi = cyclotomic_poly(p, level);
    let at_one: i64 = phi.iter().sum();
    Some(Q::new(int_val(at_one, p as i64) as i64, (phi.len() - 1) as i64))
}

impl CyclotomicRing {
    pub fn new(p: u32, m: u32, level: u32) -> Result<Self> {
        zpm::modulus(p, m)?;
        if level > 6 || (p as u64).pow(level) > 1 << 12 {
            return Err(Error::Unsupported("cyclotomic level too large".into()));
        }
        Ok(Self { p, m, level })
    }

    pub fn modulus(&self) -> i64 {
        (self.p as i64).pow(self.m)
    }

    /// `[Q_p(ζ_{p^ℓ}) : Q_p]`.
    pub fn degree(&self) -> usize {
        cyclotomic_poly(self.p, self.level).len() - 1
    }

    /// Ramification index; `π^e` is `p` times a unit.
    pub fn e(&self) -> u32 {
        self.degree() as u32
    }

    /// Length of the chain ring, `e · m`.
    pub fn chain_length(&self) -> u32 {
        self.e() * self.m
    }

    /// Order of `ζ`.
    pub fn root_order(&self) -> i64 {
        (self.p as i64).pow(self.level)
    }

    fn reduce(&self, mut c: Vec<i64>) -> Vec<i64> {
        let phi = cyclotomic_poly(self.p, self.level);
        let d = phi.len() - 1;
        let q = self.modulus();
        while c.len() > d {
            let top = c.pop().expect("nonempty");
            let off = c.len() - d;
            for (j, &f) in phi[..d].iter().enumerate() {
                c[off + j] -= top * f;
                c[off + j] = c[off + j].rem_euclid(q);
            }
        }
        c.resize(d, 0);
        c.iter().map(|x| x.rem_euclid(q)).collect()
    }

    pub fn from_coeffs(&self, c: Vec<i64>) -> CyclotomicScalar {
        CyclotomicScalar { ring: *self, coeffs: self.reduce(c) }
    }

    pub fn int(&self, k: i64) -> CyclotomicScalar {
        self.from_coeffs(vec![k])
    }

    /// `ζ^k`.
    pub fn zeta_pow(&self, k: i64) -> CyclotomicScalar {
        let k = k.mod_floor(&self.root_order()) as usize;
        let mut c = vec![0; k + 1];
        c[k] = 1;
        self.from_coeffs(c)
    }

    /// `ζ_{p^ℓ'} − 1 = ζ^{p^{ℓ−ℓ'}} − 1`.
    pub fn pi_at(&self, sub_level: u32) -> Result<CyclotomicScalar> {
        if sub_level > self.level {
            return Err(Error::InvalidParams("sub-level above ring level".into()));
        }
        let z = self.zeta_pow((self.p as i64).pow(self.level - sub_level));
        Ok(z.sub(&self.int(1)))
    }

    /// The uniformizer `ζ − 1` (`p` at level zero).
    pub fn uniformizer(&self) -> CyclotomicScalar {
        if self.level == 0 {
            self.int(self.p as i64)
        } else {
            self.zeta_pow(1).sub(&self.int(1))
        }
    }
}

impl CyclotomicScalar {
    pub fn add(&self, o: &Self) -> Self {
        let c = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        self.ring.from_coeffs(c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        self.ring.from_coeffs(c)
    }

    pub fn neg(&self) -> Self {
        self.ring.from_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let q = self.ring.modulus();
        let mut c = vec![0i64; self.coeffs.len() + o.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % q;
            }
        }
        self.ring.from_coeffs(c)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut r = self.ring.int(1);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&x| x == 0)
    }

    /// Matrix of `x ↦ self · x` on power-basis column vectors.
    pub fn mult_matrix(&self) -> ZpmMatrix {
        let r = self.ring;
        let d = r.degree();
        let mut mat = ZpmMatrix::zero(r.p, r.m, d, d).expect("ring checked");
        for j in 0..d {
            let mut basis = vec![0; d];
            basis[j] = 1;
            let col = self.mul(&r.from_coeffs(basis));
            for (i, &x) in col.coeffs.iter().enumerate() {
                mat.set(i, j, x);
            }
        }
        mat
    }

    /// `π`-adic valuation as the `F_p`-length of `A / self·A`, capped at `e·m`.
    pub fn pi_valuation(&self) -> u32 {
        let r = self.ring;
        let d = r.degree();
        let id = ZpmMatrix::identity(r.p, r.m, d).expect("ring checked");
        let image = zpm::howell_form(&self.mult_matrix().transpose()).span_log();
        zpm::howell_form(&id).span_log() - image
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_mod_phi() {
        let r = CyclotomicRing::new(3, 2, 1).unwrap();
        // ζ^2 = −1 − ζ at level one for p = 3.
        assert_eq!(r.zeta_pow(2).coeffs, vec![8, 8]);
        assert_eq!(r.zeta_pow(3), r.int(1));
        let r = CyclotomicRing::new(2, 3, 2).unwrap();
        assert_eq!(r.zeta_pow(2).coeffs, vec![7, 0]);
        assert_eq!(r.zeta_pow(1).pow(4), r.int(1));
    }

    #[test]
    fn norm_oracle_valuations() {
        assert_eq!(norm_valuation(2, 1), Some(Q::new(1, 1)));
        assert_eq!(norm_valuation(3, 1), Some(Q::new(1, 2)));
        assert_eq!(norm_valuation(2, 2), Some(Q::new(1, 2)));
        assert_eq!(norm_valuation(3, 2), Some(Q::new(1, 6)));
        assert_eq!(norm_valuation(5, 1), Some(Q::new(1, 4)));
    }

    #[test]
    fn uniformizer_valuation_from_matrix() {
        for (p, level, m) in [(2, 1, 2), (2, 2, 2), (3, 1, 2), (3, 2, 1), (5, 1, 1), (2, 3, 1)] {
            let r = CyclotomicRing::new(p, m, level).unwrap();
            assert_eq!(r.uniformizer().pi_valuation(), 1);
            assert_eq!(r.int(p as i64).pi_valuation(), r.e().min(r.chain_length()));
            assert_eq!(r.int(0).pi_valuation(), r.chain_length());
            for sub in 1..=level {
                let v = r.pi_at(sub).unwrap().pi_valuation();
                let want = norm_valuation(p, sub).unwrap() * Q::from(r.e() as i64);
                assert_eq!(Q::from(v as i64), want);
            }
        }
    }

    #[test]
    fn multiplication_matrix_is_a_homomorphism() {
        let r = CyclotomicRing::new(3, 2, 2).unwrap();
        let a = r.from_coeffs(vec![1, 4, 0, 7, 2, 5]);
        let b = r.from_coeffs(vec![3, 0, 8, 1, 1, 0]);
        assert_eq!(a.mul(&b).mult_matrix(), a.mult_matrix().mul(&b.mult_matrix()).unwrap());
        assert_eq!(a.add(&b).mult_matrix().to_rows().len(), 6);
    }
}
