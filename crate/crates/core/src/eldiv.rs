//! Elementary-divisor sequences: finite nonincreasing lists of nonnegative
//! rationals standing for `γ_1 ≥ γ_2 ≥ … ≥ 0, 0, …`.

use alloc::vec::Vec;
use core::cmp::Reverse;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EldivSeq {
    entries: Vec<Q>,
}

impl EldivSeq {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates order and sign; trailing zeros are dropped.
    pub fn new(mut entries: Vec<Q>) -> Result<Self> {
        if entries.iter().any(|x| *x < Q::zero()) {
            return Err(Error::InvalidParams("elementary divisors must be nonnegative".into()));
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParams("elementary divisors must be nonincreasing".into()));
        }
        while entries.last().is_some_and(|x| x.is_zero()) {
            entries.pop();
        }
        Ok(Self { entries })
    }

    /// Sorts an arbitrary multiset of nonnegative rationals.
    pub fn from_unsorted(mut entries: Vec<Q>) -> Result<Self> {
        entries.sort_unstable_by_key(|&x| Reverse(x));
        Self::new(entries)
    }

    pub fn entries(&self) -> &[Q] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `γ_i` with 0-based index, zero past the end.
    pub fn get(&self, i: usize) -> Q {
        self.entries.get(i).copied().unwrap_or_else(Q::zero)
    }

    /// Length `λ = Σ γ_i`.
    pub fn lambda(&self) -> Q {
        self.entries.iter().copied().sum()
    }

    pub fn norm(&self) -> Q {
        self.get(0)
    }

    pub fn linf_dist(&self, other: &Self) -> Q {
        let n = self.len().max(other.len());
        (0..n)
            .map(|i| {
                let d = self.get(i) - other.get(i);
                if d < Q::zero() {
                    -d
                } else {
                    d
                }
            })
            .max()
            .unwrap_or_else(Q::zero)
    }

    /// Prefix-sum domination `γ_1 + … + γ_i ≥ γ'_1 + … + γ'_i` for all `i`.
    pub fn majorizes(&self, other: &Self) -> bool {
        let n = self.len().max(other.len());
        let (mut a, mut b) = (Q::zero(), Q::zero());
        for i in 0..n {
            a += self.get(i);
            b += other.get(i);
            if a < b {
                return false;
            }
        }
        true
    }

    /// Divisors of `t^ε M`: `max(γ_i − ε, 0)`.
    pub fn shift_eps(&self, eps: Q) -> Self {
        let entries = self.entries.iter().map(|&g| g - eps).take_while(|g| *g > Q::zero()).collect();
        Self { entries }
    }

    pub fn indexwise_sum(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        Self { entries: (0..n).map(|i| self.get(i) + other.get(i)).collect() }
    }

    /// Divisors of a direct sum.
    pub fn merge_sorted(&self, other: &Self) -> Self {
        let mut v = self.entries.clone();
        v.extend_from_slice(&other.entries);
        v.sort_unstable_by_key(|&x| Reverse(x));
        Self { entries: v }
    }
}
