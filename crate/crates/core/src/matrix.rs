//! Dense matrices over the Puiseux model.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::params::BaseRing;
use crate::puiseux::Puiseux;
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    base: BaseRing,
    rows: usize,
    cols: usize,
    data: Vec<Puiseux>,
}

impl Matrix {
    pub fn new(base: BaseRing, rows: usize, cols: usize, data: Vec<Puiseux>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|x| x.base() != base) {
            return Err(Error::ParameterMismatch);
        }
        Ok(Self { base, rows, cols, data })
    }

    pub fn from_fn(base: BaseRing, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Puiseux) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { base, rows, cols, data }
    }

    pub fn zeros(base: BaseRing, rows: usize, cols: usize) -> Self {
        Self::from_fn(base, rows, cols, |_, _| Puiseux::zero(base))
    }

    pub fn identity(base: BaseRing, n: usize) -> Self {
        Self::from_fn(base, n, n, |i, j| if i == j { Puiseux::one(base) } else { Puiseux::zero(base) })
    }

    /// Diagonal of monomials `t^{g_i}` (scaled exponents) in a `rows × cols` frame.
    pub fn diag_monomials(base: BaseRing, rows: usize, cols: usize, g: &[i64]) -> Self {
        let one = base.field.one();
        Self::from_fn(base, rows, cols, |i, j| {
            if i == j && i < g.len() {
                Puiseux::monomial_scaled(base, one, g[i])
            } else {
                Puiseux::zero(base)
            }
        })
    }

    #[inline]
    pub fn base(&self) -> BaseRing {
        self.base
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Puiseux {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Puiseux) {
        self.data[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[Puiseux] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Puiseux] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(&Puiseux) -> Puiseux) -> Self {
        Self { data: self.data.iter().map(f).collect(), ..self.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.base != other.base {
            return Err(Error::ParameterMismatch);
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Puiseux::zero(self.base);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                out.push(acc);
            }
        }
        Ok(Self { base: self.base, rows: self.rows, cols: other.cols, data: out })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch("matrix sum".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(Self { data, ..self.clone() })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.base, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch("hcat row count".into()));
        }
        Ok(Self::from_fn(self.base, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    pub fn vcat(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch("vcat column count".into()));
        }
        Ok(Self::from_fn(self.base, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                other.get(i - self.rows, j).clone()
            }
        }))
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        Self::from_fn(self.base, self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j).clone(),
                (false, false) => other.get(i - self.rows, j - self.cols).clone(),
                _ => Puiseux::zero(self.base),
            }
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.base, rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn rebase(&self, base: BaseRing) -> Result<Self> {
        let data = self.data.iter().map(|x| x.rebase(base)).collect::<Result<_>>()?;
        Ok(Self { base, rows: self.rows, cols: self.cols, data })
    }

    pub fn lift_to(&self, prec: i64) -> Self {
        self.map(|x| x.lift_to(prec))
    }

    pub fn truncate(&self, prec: i64) -> Self {
        self.map(|x| x.truncate(prec))
    }

    /// Least precision among the entries.
    pub fn min_prec(&self) -> i64 {
        self.data.iter().map(|x| x.prec_scaled()).min().unwrap_or(self.base.cap)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.data.iter().zip(&other.data).all(|(a, b)| a.agrees_with(b))
    }

    /// Determinant by cofactor expansion; independent of any elimination.
    pub fn det(&self) -> Result<Puiseux> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        if self.rows > 10 {
            return Err(Error::Unsupported("cofactor determinant beyond 10x10".into()));
        }
        let cols: Vec<usize> = (0..self.cols).collect();
        self.det_rec(0, &cols)
    }

    fn det_rec(&self, row: usize, cols: &[usize]) -> Result<Puiseux> {
        if cols.is_empty() {
            return Ok(Puiseux::one(self.base));
        }
        let mut acc = Puiseux::zero(self.base);
        let mut rest: Vec<usize> = Vec::with_capacity(cols.len() - 1);
        for (k, &c) in cols.iter().enumerate() {
            let a = self.get(row, c);
            if a.is_zero() && a.prec_scaled() >= self.base.cap {
                continue;
            }
            rest.clear();
            rest.extend(cols.iter().copied().filter(|&x| x != c));
            let term = a.mul(&self.det_rec(row + 1, &rest)?)?;
            acc = if k % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
        }
        Ok(acc)
    }

    /// `v(det A)`; fails when the determinant is zero at precision.
    pub fn det_valuation(&self) -> Result<Q> {
        let d = self.det()?;
        d.valuation().finite().ok_or(Error::PrecisionExhausted { needed: Some(d.prec()) })
    }
}
