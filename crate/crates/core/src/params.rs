//! Model parameters shared by every engine.

use alloc::format;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::rational::{level_of, scaled, Q};

/// `(p, s, L, N, m, d)`: prime, residue degree, root level, `t`-adic
/// precision, Witt length and filtration degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelParams {
    pub p: u32,
    pub s: u32,
    pub level: u32,
    pub prec: Q,
    pub m: u32,
    pub d: u32,
}

pub const MAX_WITT_LEN: u32 = 4;

impl ModelParams {
    pub fn new(p: u32, s: u32, level: u32, prec: Q, m: u32, d: u32) -> Result<Self> {
        let mp = Self { p, s, level, prec, m, d };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        FiniteField::new(self.p, self.s)?;
        if self.level > 12 || (self.p as u64).checked_pow(self.level).is_none_or(|x| x > 1 << 40) {
            return Err(Error::InvalidParams(format!("root level {} too large", self.level)));
        }
        if self.prec <= Q::zero() {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        match level_of(self.prec, self.p as i64) {
            Some(l) if l <= self.level => {}
            _ => return Err(Error::InvalidParams(format!("denominator of N must divide p^{}", self.level))),
        }
        if self.m == 0 || self.m > MAX_WITT_LEN {
            return Err(Error::InvalidParams(format!("m must lie in 1..={MAX_WITT_LEN}")));
        }
        if self.d == 0 || self.d > self.p {
            return Err(Error::InvalidParams("d must lie in 1..=p".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> FiniteField {
        FiniteField::new(self.p, self.s).expect("validated")
    }

    pub fn base(&self) -> BaseRing {
        let scale = (self.p as i64).pow(self.level);
        let cap = scaled(self.prec, scale).expect("validated");
        BaseRing { field: self.field(), level: self.level, scale, cap }
    }
}

/// Coefficient field, root level and precision cap of the Puiseux model.
///
/// Exponents are stored as integers in units of `1/p^level`; `cap` is `N`
/// in those units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BaseRing {
    pub field: FiniteField,
    pub level: u32,
    pub scale: i64,
    pub cap: i64,
}

impl BaseRing {
    pub fn new(p: u32, s: u32, level: u32, prec: Q) -> Result<Self> {
        Ok(ModelParams::new(p, s, level, prec, 1, 1)?.base())
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.field.p()
    }

    /// Rational exponent to scaled units.
    pub fn to_scaled(&self, e: Q) -> Result<i64> {
        scaled(e, self.scale).ok_or(Error::LevelOverflow { level: self.level })
    }

    pub fn from_scaled(&self, e: i64) -> Q {
        Q::new(e, self.scale)
    }

    pub fn with_prec(&self, prec: Q) -> Result<Self> {
        let cap = self.to_scaled(prec)?;
        if cap <= 0 {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        Ok(Self { cap, ..*self })
    }

    pub fn prec(&self) -> Q {
        self.from_scaled(self.cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(4, 1, 1, q(1, 1), 1, 1).is_err());
        assert!(ModelParams::new(2, 1, 1, q(1, 4), 1, 1).is_err());
        assert!(ModelParams::new(2, 1, 2, q(1, 4), 1, 1).is_ok());
        assert!(ModelParams::new(3, 1, 1, q(0, 1), 1, 1).is_err());
        assert!(ModelParams::new(3, 1, 1, q(5, 1), 5, 1).is_err());
        assert!(ModelParams::new(3, 1, 1, q(5, 1), 2, 4).is_err());
        assert!(ModelParams::new(3, 5, 1, q(5, 1), 2, 1).is_err());
    }
}
