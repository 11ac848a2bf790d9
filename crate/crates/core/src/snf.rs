//! Smith normal form over the valuation ring by corner elimination.
//!
//! At each stage the entry of least valuation (ties: lowest row, then
//! column) of the remaining upper-left block is a gcd of the block. It is
//! moved to the lower-right corner of the block, scaled by a unit to the
//! monomial `t^γ`, and its row and column are cleared by exact monomial
//! quotients. Pivot valuations come out nondecreasing.

use alloc::vec::Vec;

use crate::eldiv::EldivSeq;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::puiseux::Puiseux;
use crate::rational::Q;

#[derive(Clone, Debug)]
pub struct Snf {
    /// `U·A·V`, nonzero only at `(r−1−s, c−1−s)`.
    pub d: Matrix,
    pub u: Matrix,
    pub u_inv: Matrix,
    pub v: Matrix,
    /// Scaled pivot valuation for stage `s`; `None` once the block is zero.
    pub pivots: Vec<Option<i64>>,
}

impl Snf {
    /// Diagonal valuations, nonincreasing, `None` (infinite) first.
    pub fn diagonal(&self) -> Vec<Option<Q>> {
        let b = self.d.base();
        self.pivots.iter().rev().map(|g| g.map(|g| b.from_scaled(g))).collect()
    }

    pub fn rank(&self) -> usize {
        self.pivots.iter().filter(|g| g.is_some()).count()
    }

    /// Row index of the pivot found at stage `s`.
    pub fn pivot_row(&self, s: usize) -> usize {
        self.d.rows() - 1 - s
    }

    pub fn pivot_col(&self, s: usize) -> usize {
        self.d.cols() - 1 - s
    }

    /// Torsion divisors of the cokernel of `A: O^c → O^r`.
    pub fn cokernel(&self) -> Cokernel {
        let b = self.d.base();
        let torsion = EldivSeq::from_unsorted(self.pivots.iter().flatten().map(|&g| b.from_scaled(g)).collect())
            .expect("pivot valuations are nonnegative");
        Cokernel { torsion, free_rank: self.d.rows() - self.rank() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    pub torsion: EldivSeq,
    pub free_rank: usize,
}

fn swap_rows(m: &mut Matrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

/// `row_dst -= f · row_src`.
fn row_axpy(m: &mut Matrix, dst: usize, src: usize, f: &Puiseux) -> Result<()> {
    for j in 0..m.cols() {
        let x = m.get(dst, j).sub(&f.mul(m.get(src, j))?)?;
        m.set(dst, j, x);
    }
    Ok(())
}

/// `col_dst -= f · col_src`.
fn col_axpy(m: &mut Matrix, dst: usize, src: usize, f: &Puiseux) -> Result<()> {
    for i in 0..m.rows() {
        let x = m.get(i, dst).sub(&f.mul(m.get(i, src))?)?;
        m.set(i, dst, x);
    }
    Ok(())
}

pub fn smith_normal_form(a: &Matrix) -> Result<Snf> {
    let base = a.base();
    let (r, c) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut u = Matrix::identity(base, r);
    let mut u_inv = Matrix::identity(base, r);
    let mut v = Matrix::identity(base, c);
    let mut pivots = Vec::with_capacity(r.min(c));

    for s in 0..r.min(c) {
        let (br, bc) = (r - s, c - s);
        let mut best: Option<(i64, usize, usize)> = None;
        for i in 0..br {
            for j in 0..bc {
                if let Some(val) = w.get(i, j).val_scaled() {
                    if best.is_none_or(|(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((gamma, pi, pj)) = best else {
            pivots.extend(core::iter::repeat_n(None, r.min(c) - s));
            break;
        };
        for i in 0..br {
            for j in 0..bc {
                let x = w.get(i, j);
                if x.is_zero() && x.prec_scaled() < gamma {
                    return Err(Error::PrecisionExhausted { needed: Some(base.from_scaled(gamma)) });
                }
            }
        }
        let (cr, cc) = (br - 1, bc - 1);
        swap_rows(&mut w, pi, cr);
        swap_rows(&mut u, pi, cr);
        swap_cols(&mut u_inv, pi, cr);
        swap_cols(&mut w, pj, cc);
        swap_cols(&mut v, pj, cc);

        // Scale the pivot row so the pivot is exactly t^γ.
        let unit = w.get(cr, cc).shift_down(gamma)?;
        let unit_inv = unit.inv_unit()?;
        for j in 0..c {
            let x = w.get(cr, j).mul(&unit_inv)?;
            w.set(cr, j, x);
        }
        for j in 0..r {
            let x = u.get(cr, j).mul(&unit_inv)?;
            u.set(cr, j, x);
            let y = u_inv.get(j, cr).mul(&unit)?;
            u_inv.set(j, cr, y);
        }
        let pivot_prec = w.get(cr, cc).prec_scaled();
        w.set(cr, cc, Puiseux::monomial_scaled(base, base.field.one(), gamma).truncate(pivot_prec));

        for i in 0..br {
            if i == cr {
                continue;
            }
            let x = w.get(i, cc);
            if x.is_zero() {
                continue;
            }
            let f = x.shift_down(gamma)?;
            row_axpy(&mut w, i, cr, &f)?;
            debug_assert!(w.get(i, cc).is_zero());
            row_axpy(&mut u, i, cr, &f)?;
            col_axpy(&mut u_inv, cr, i, &f.neg())?;
        }
        for j in 0..bc {
            if j == cc {
                continue;
            }
            let x = w.get(cr, j);
            if x.is_zero() {
                continue;
            }
            let g = x.shift_down(gamma)?;
            col_axpy(&mut w, j, cc, &g)?;
            debug_assert!(w.get(cr, j).is_zero());
            col_axpy(&mut v, j, cc, &g)?;
        }
        pivots.push(Some(gamma));
    }
    Ok(Snf { d: w, u, u_inv, v, pivots })
}

/// Torsion divisors and free rank of `coker(A)`.
pub fn cokernel_divisors(a: &Matrix) -> Result<Cokernel> {
    Ok(smith_normal_form(a)?.cokernel())
}
