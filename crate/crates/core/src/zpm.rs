//! Dense linear algebra over `Z/p^m`: Howell form, kernels and the
//! cohomology of two-step complexes.
//!
//! Matrices act on column vectors, so `d : (Z/p^m)^a → (Z/p^m)^b` is `b × a`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_MODULUS: i64 = 1 << 30;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZpmMatrix {
    pub p: u32,
    pub m: u32,
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

/// `p^m`, checked against [`MAX_MODULUS`].
pub fn modulus(p: u32, m: u32) -> Result<i64> {
    if !crate::field::is_prime(p) || m == 0 {
        return Err(Error::InvalidParams("need p prime and m ≥ 1".into()));
    }
    (p as i64).checked_pow(m).filter(|&q| q <= MAX_MODULUS).ok_or_else(|| Error::Unsupported("p^m exceeds 2^30".into()))
}

impl ZpmMatrix {
    pub fn zero(p: u32, m: u32, rows: usize, cols: usize) -> Result<Self> {
        modulus(p, m)?;
        Ok(Self { p, m, rows, cols, data: vec![0; rows * cols] })
    }

    pub fn identity(p: u32, m: u32, n: usize) -> Result<Self> {
        let mut r = Self::zero(p, m, n, n)?;
        for i in 0..n {
            r.set(i, i, 1);
        }
        Ok(r)
    }

    pub fn from_rows(p: u32, m: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut r = Self::zero(p, m, rows.len(), cols)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
            for (j, &x) in row.iter().enumerate() {
                r.set(i, j, x);
            }
        }
        Ok(r)
    }

    pub fn modulus(&self) -> i64 {
        (self.p as i64).pow(self.m)
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    /// Stores `x mod p^m`.
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        let q = self.modulus();
        self.data[i * self.cols + j] = x.rem_euclid(q);
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn same_ring(&self, o: &Self) -> Result<()> {
        if (self.p, self.m) != (o.p, o.m) {
            return Err(Error::ParameterMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_ring(o)?;
        if self.cols != o.rows {
            return Err(Error::ShapeMismatch("inner dimensions differ".into()));
        }
        let q = self.modulus();
        let mut r = Self::zero(self.p, self.m, self.rows, o.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * o.cols + j;
                    r.data[idx] = (r.data[idx] + a * o.get(k, j)) % q;
                }
            }
        }
        Ok(r)
    }

    pub fn transpose(&self) -> Self {
        let mut r = Self { rows: self.cols, cols: self.rows, data: vec![0; self.data.len()], ..*self };
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.data[j * self.rows + i] = self.get(i, j);
            }
        }
        r
    }

    pub fn hcat(&self, o: &Self) -> Result<Self> {
        self.same_ring(o)?;
        if self.rows != o.rows {
            return Err(Error::ShapeMismatch("row counts differ".into()));
        }
        let mut r = Self::zero(self.p, self.m, self.rows, self.cols + o.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.set(i, j, self.get(i, j));
            }
            for j in 0..o.cols {
                r.set(i, self.cols + j, o.get(i, j));
            }
        }
        Ok(r)
    }

    pub fn vcat(&self, o: &Self) -> Result<Self> {
        self.same_ring(o)?;
        if self.cols != o.cols {
            return Err(Error::ShapeMismatch("column counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        Ok(Self { rows: self.rows + o.rows, data, ..*self })
    }

    pub fn scale(&self, c: i64) -> Self {
        let q = self.modulus();
        let c = c.rem_euclid(q);
        Self { data: self.data.iter().map(|&x| x * c % q).collect(), ..*self }
    }

    /// Columns `from..to`.
    pub fn columns(&self, from: usize, to: usize) -> Self {
        let mut r = Self { cols: to - from, data: Vec::with_capacity(self.rows * (to - from)), ..*self };
        for i in 0..self.rows {
            r.data.extend_from_slice(&self.row(i)[from..to]);
        }
        r
    }

    /// `p`-adic valuation of an entry residue, `m` for zero.
    pub fn val(&self, x: i64) -> u32 {
        val_p(x, self.p, self.m)
    }
}

fn val_p(mut x: i64, p: u32, m: u32) -> u32 {
    if x == 0 {
        return m;
    }
    let mut v = 0;
    while x % p as i64 == 0 {
        x /= p as i64;
        v += 1;
    }
    v
}

/// Inverse of a unit modulo `q`.
fn unit_inverse(a: i64, q: i64) -> i64 {
    let (mut r0, mut r1) = (a.rem_euclid(q), q);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(q)
}

/// Row-span canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Howell {
    /// Nonzero rows in echelon order; each pivot is a power of `p` and the
    /// entries above it are reduced modulo that pivot.
    pub h: ZpmMatrix,
    /// `h = u · a`. Rows of `u` need not be independent: closure rows are
    /// multiples `p^{m−k}` of earlier rows.
    pub u: ZpmMatrix,
    /// `(column, k)` for each row, pivot `p^k`.
    pub pivots: Vec<(usize, u32)>,
}

impl Howell {
    /// `log_p` of the number of elements of the row span.
    pub fn span_log(&self) -> u32 {
        self.pivots.iter().map(|&(_, k)| self.h.m - k).sum()
    }
}

struct Work {
    q: i64,
    rows: Vec<(Vec<i64>, Vec<i64>)>,
}

impl Work {
    fn axpy(&mut self, dst: usize, src: usize, c: i64) {
        let q = self.q;
        let c = c.rem_euclid(q);
        if c == 0 {
            return;
        }
        let (s0, s1) = self.rows[src].clone();
        let (d0, d1) = &mut self.rows[dst];
        for (d, s) in d0.iter_mut().zip(&s0) {
            *d = (*d + c * s) % q;
        }
        for (d, s) in d1.iter_mut().zip(&s1) {
            *d = (*d + c * s) % q;
        }
    }

    fn scale(&mut self, i: usize, c: i64) {
        let q = self.q;
        let (a, b) = &mut self.rows[i];
        for x in a.iter_mut().chain(b.iter_mut()) {
            *x = *x * c % q;
        }
    }
}

pub fn howell_form(a: &ZpmMatrix) -> Howell {
    let (p, m, q) = (a.p as i64, a.m, a.modulus());
    let n0 = a.rows;
    let mut w = Work {
        q,
        rows: (0..n0)
            .map(|i| {
                let mut e = vec![0; n0];
                e[i] = 1;
                (a.row(i).to_vec(), e)
            })
            .collect(),
    };
    let mut pivots: Vec<(usize, u32)> = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r >= w.rows.len() {
            break;
        }
        let best = (r..w.rows.len()).map(|i| (val_p(w.rows[i].0[c], a.p, m), i)).min().filter(|&(v, _)| v < m);
        let Some((k, i)) = best else { continue };
        w.rows.swap(r, i);
        let pk = p.pow(k);
        let unit = w.rows[r].0[c] / pk;
        w.scale(r, unit_inverse(unit, q));
        for j in r + 1..w.rows.len() {
            let x = w.rows[j].0[c];
            if x != 0 {
                w.axpy(j, r, -(x / pk));
            }
        }
        if k > 0 {
            // The annihilator multiple p^{m−k}·row vanishes in column c.
            let mut extra = w.rows[r].clone();
            let f = p.pow(m - k);
            for x in extra.0.iter_mut().chain(extra.1.iter_mut()) {
                *x = *x * f % q;
            }
            if extra.0.iter().any(|&x| x != 0) {
                w.rows.push(extra);
            }
        }
        pivots.push((c, k));
        r += 1;
    }
    w.rows.truncate(r);
    for (i, &(c, k)) in pivots.iter().enumerate() {
        let pk = p.pow(k);
        for j in 0..i {
            let x = w.rows[j].0[c];
            let t = x / pk;
            if t != 0 {
                w.axpy(j, i, -t);
            }
        }
    }
    let h_rows: Vec<Vec<i64>> = w.rows.iter().map(|(x, _)| x.clone()).collect();
    let u_rows: Vec<Vec<i64>> = w.rows.iter().map(|(_, y)| y.clone()).collect();
    let mut h = ZpmMatrix::zero(a.p, m, h_rows.len(), a.cols).expect("modulus checked");
    let mut u = ZpmMatrix::zero(a.p, m, u_rows.len(), n0).expect("modulus checked");
    for (i, row) in h_rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            h.set(i, j, x);
        }
    }
    for (i, row) in u_rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            u.set(i, j, x);
        }
    }
    Howell { h, u, pivots }
}

/// Generating rows of `{x : a · x = 0}`.
pub fn kernel_basis(a: &ZpmMatrix) -> ZpmMatrix {
    let id = ZpmMatrix::identity(a.p, a.m, a.cols).expect("modulus checked");
    let aug = a.transpose().hcat(&id).expect("same ring");
    let hw = howell_form(&aug);
    let keep: Vec<usize> = (0..hw.h.rows).filter(|&i| hw.pivots[i].0 >= a.rows).collect();
    let mut k = ZpmMatrix::zero(a.p, a.m, keep.len(), a.cols).expect("modulus checked");
    for (r, &i) in keep.iter().enumerate() {
        for j in 0..a.cols {
            k.set(r, j, hw.h.get(i, a.rows + j));
        }
    }
    k
}

/// Invariants of a finite `Z/p^m`-module `⊕ Z/p^{a_i} ⊕ (Z/p^m)^f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleType {
    /// Exponents `a_i < m`, nonincreasing.
    pub orders: Vec<u32>,
    pub free_rank: usize,
}

impl ModuleType {
    pub fn is_zero(&self) -> bool {
        self.orders.is_empty() && self.free_rank == 0
    }

    /// `log_p` of the cardinality.
    pub fn length(&self, m: u32) -> u32 {
        self.orders.iter().sum::<u32>() + m * self.free_rank as u32
    }
}

fn span_log_rows(p: u32, m: u32, cols: usize, parts: &[&ZpmMatrix]) -> u32 {
    let mut acc = ZpmMatrix::zero(p, m, 0, cols).expect("modulus checked");
    for x in parts {
        acc = acc.vcat(x).expect("same ring");
    }
    howell_form(&acc).span_log()
}

/// `l_j = log_p |sub·op^j + rel| − log_p |rel|` for `j = 0..=steps`, with
/// `op` acting on row vectors from the right.
pub fn filtration_lengths(sub: &ZpmMatrix, rel: &ZpmMatrix, op: &ZpmMatrix, steps: u32) -> Result<Vec<u32>> {
    sub.same_ring(rel)?;
    sub.same_ring(op)?;
    if sub.cols != rel.cols || op.rows != sub.cols || op.cols != sub.cols {
        return Err(Error::ShapeMismatch("filtration operands".into()));
    }
    let (p, m, cols) = (sub.p, sub.m, sub.cols);
    let base = span_log_rows(p, m, cols, &[rel]);
    let mut cur = sub.clone();
    let mut out = Vec::with_capacity(steps as usize + 1);
    for j in 0..=steps {
        out.push(span_log_rows(p, m, cols, &[&cur, rel]) - base);
        if j < steps {
            cur = cur.mul(op)?;
        }
    }
    Ok(out)
}

/// Module over a chain ring of length `top` whose uniformizer filtration has
/// lengths `l` (residue field `F_p`): `l_j − l_{j+1}` factors have length `> j`.
pub fn type_from_lengths(l: &[u32], top: u32) -> ModuleType {
    let ge = |j: usize| (l[j - 1] - l[j]) as usize;
    let mut orders = Vec::new();
    for e in (1..top as usize).rev() {
        orders.extend(core::iter::repeat_n(e as u32, ge(e) - ge(e + 1)));
    }
    ModuleType { orders, free_rank: ge(top as usize) }
}

/// Type of `span(sub) / span(rel)` where `span(rel) ⊆ span(sub)`.
pub fn quotient_type(sub: &ZpmMatrix, rel: &ZpmMatrix) -> Result<ModuleType> {
    let op = ZpmMatrix::identity(sub.p, sub.m, sub.cols)?.scale(sub.p as i64);
    let l = filtration_lengths(sub, rel, &op, sub.m)?;
    Ok(type_from_lengths(&l, sub.m))
}

/// `ker(d_out) / im(d_in)` for `d_out · d_in = 0`.
pub fn cohomology(d_in: &ZpmMatrix, d_out: &ZpmMatrix) -> Result<ModuleType> {
    d_in.same_ring(d_out)?;
    if d_in.rows != d_out.cols {
        return Err(Error::ShapeMismatch("d_in target differs from d_out source".into()));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(Error::NotAComplex);
    }
    let k = kernel_basis(d_out);
    quotient_type(&k, &d_in.transpose())
}
