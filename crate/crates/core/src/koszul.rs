//! Koszul complexes of commuting scalars over `A_ℓ = Z[ζ_{p^ℓ}]/p^m` and the
//! monomial-line cohomology tables of a `Z_p^n`-action `γ_k(T^i) = ζ^{i_k} T^i`.
//!
//! `C^q = Λ^q A^n` with basis the `q`-subsets in lexicographic order and
//! `d(e_S) = Σ_{k∉S} (−1)^{#{s∈S : s<k}} c_k e_{S∪k}`.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::binomial;

use crate::cyclotomic::{norm_valuation, CyclotomicRing, CyclotomicScalar};
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::zpm::{self, ModuleType, ZpmMatrix};

pub const MAX_OPERATORS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoszulSpec {
    pub ring: CyclotomicRing,
    pub scalars: Vec<CyclotomicScalar>,
}

/// `q`-subsets of `0..n` as bitmasks, lexicographic.
pub fn subsets(n: usize, q: usize) -> Vec<u32> {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(cur.iter().map(|&i| 1u32 << i).sum());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, q, &mut Vec::new(), &mut out);
    out
}

impl KoszulSpec {
    pub fn new(ring: CyclotomicRing, scalars: Vec<CyclotomicScalar>) -> Result<Self> {
        if scalars.len() > MAX_OPERATORS {
            return Err(Error::Unsupported("at most four operators".into()));
        }
        if scalars.iter().any(|c| c.ring != ring) {
            return Err(Error::ParameterMismatch);
        }
        Ok(Self { ring, scalars })
    }

    /// `c_k = ζ^{a_k} − 1` for `ζ` of order `p^ℓ`.
    pub fn line(ring: CyclotomicRing, numerators: &[i64]) -> Result<Self> {
        let one = ring.int(1);
        Self::new(ring, numerators.iter().map(|&a| ring.zeta_pow(a).sub(&one)).collect())
    }

    pub fn n(&self) -> usize {
        self.scalars.len()
    }

    /// Signed entries `(target, source, k, sign)` of `d^q`, by subset index.
    pub fn boundary_pattern(&self, q: usize) -> Vec<(usize, usize, usize, i64)> {
        let n = self.n();
        let src = subsets(n, q);
        let dst = subsets(n, q + 1);
        let mut out = Vec::new();
        for (j, &s) in src.iter().enumerate() {
            for k in 0..n {
                if s & (1 << k) != 0 {
                    continue;
                }
                let t = s | (1 << k);
                let i = dst.iter().position(|&x| x == t).expect("subset");
                let below = (s & ((1 << k) - 1)).count_ones();
                out.push((i, j, k, if below % 2 == 0 { 1 } else { -1 }));
            }
        }
        out
    }

    fn block_matrix(&self, rows: usize, cols: usize, blocks: &[(usize, usize, ZpmMatrix)]) -> ZpmMatrix {
        let r = self.ring;
        let d = r.degree();
        let mut out = ZpmMatrix::zero(r.p, r.m, rows * d, cols * d).expect("ring checked");
        for (bi, bj, b) in blocks {
            for i in 0..d {
                for j in 0..d {
                    out.set(bi * d + i, bj * d + j, b.get(i, j));
                }
            }
        }
        out
    }

    /// `d^q : Λ^q → Λ^{q+1}` over `Z/p^m`, for `q = 0..n−1`.
    pub fn koszul_matrices(&self) -> Vec<ZpmMatrix> {
        let n = self.n();
        (0..n)
            .map(|q| {
                let blocks: Vec<(usize, usize, ZpmMatrix)> = self
                    .boundary_pattern(q)
                    .into_iter()
                    .map(|(i, j, k, s)| {
                        let c = if s > 0 { self.scalars[k].clone() } else { self.scalars[k].neg() };
                        (i, j, c.mult_matrix())
                    })
                    .collect();
                self.block_matrix(binomial(n, q + 1), binomial(n, q), &blocks)
            })
            .collect()
    }

    fn dim(&self, q: usize) -> usize {
        binomial(self.n(), q) * self.ring.degree()
    }

    /// Cycles and boundaries in `C^q`, as generating rows.
    fn cycles_boundaries(&self, mats: &[ZpmMatrix], q: usize) -> (ZpmMatrix, ZpmMatrix) {
        let r = self.ring;
        let dim = self.dim(q);
        let cycles = if q < self.n() {
            zpm::kernel_basis(&mats[q])
        } else {
            ZpmMatrix::identity(r.p, r.m, dim).expect("ring checked")
        };
        let bounds =
            if q > 0 { mats[q - 1].transpose() } else { ZpmMatrix::zero(r.p, r.m, 0, dim).expect("ring checked") };
        (cycles, bounds)
    }

    /// Right action of a scalar on row vectors of `C^q`.
    fn scalar_op(&self, q: usize, c: &CyclotomicScalar) -> ZpmMatrix {
        let t = c.mult_matrix().transpose();
        let k = binomial(self.n(), q);
        let blocks: Vec<(usize, usize, ZpmMatrix)> = (0..k).map(|i| (i, i, t.clone())).collect();
        self.block_matrix(k, k, &blocks)
    }

    /// `H^q` as an `A_ℓ`-module, lengths in units of the uniformizer.
    pub fn cohomology(&self, q: usize) -> Result<ModuleType> {
        self.cohomology_with(&self.koszul_matrices(), q)
    }

    fn cohomology_with(&self, mats: &[ZpmMatrix], q: usize) -> Result<ModuleType> {
        if q > self.n() {
            return Err(Error::InvalidParams("degree above n".into()));
        }
        if q > 0 && q < self.n() && !mats[q].mul(&mats[q - 1])?.is_zero() {
            return Err(Error::NotAComplex);
        }
        let (z, b) = self.cycles_boundaries(mats, q);
        let top = self.ring.chain_length();
        let op = self.scalar_op(q, &self.ring.uniformizer());
        let l = zpm::filtration_lengths(&z, &b, &op, top)?;
        Ok(zpm::type_from_lengths(&l, top))
    }

    /// `c · H^q = 0`.
    pub fn annihilated_by(&self, q: usize, c: &CyclotomicScalar) -> Result<bool> {
        let mats = self.koszul_matrices();
        let (z, b) = self.cycles_boundaries(&mats, q);
        let l = zpm::filtration_lengths(&z, &b, &self.scalar_op(q, c), 1)?;
        Ok(l[1] == 0)
    }
}

/// Module type with lengths converted to valuations, `v(p) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineModule {
    /// Cyclic factors `O/π^a` reported as `a/e`, nonincreasing, each `< m`.
    pub orders: Vec<Q>,
    /// Factors `O/p^m`.
    pub free_rank: usize,
}

impl LineModule {
    pub fn from_type(t: &ModuleType, e: u32) -> Self {
        Self { orders: t.orders.iter().map(|&a| Q::new(a as i64, e as i64)).collect(), free_rank: t.free_rank }
    }

    /// Smallest `v` with `p^v` killing the module.
    pub fn exponent(&self, m: u32) -> Q {
        if self.free_rank > 0 {
            Q::from(m as i64)
        } else {
            self.orders.first().copied().unwrap_or_else(|| Q::from(0))
        }
    }
}

/// Exact denominator level of `a / p^L`.
pub fn denominator_level(a: i64, p: u32, big_l: u32) -> u32 {
    if a == 0 {
        return 0;
    }
    let mut l = big_l;
    let mut a = a;
    while a % p as i64 == 0 && l > 0 {
        a /= p as i64;
        l -= 1;
    }
    l
}

/// Prediction `(O/π^{min(v, e·m)})^{binom(n,q)}` with `v = min_k v_π(ζ^{a_k} − 1)`,
/// valuations taken from the norm oracle.
pub fn closed_form(ring: CyclotomicRing, numerators: &[i64], q: usize) -> LineModule {
    let n = numerators.len();
    let e = ring.e() as i64;
    let top = ring.chain_length() as i64;
    let count = binomial(n, q);
    let v = numerators
        .iter()
        .filter(|&&a| a.rem_euclid(ring.root_order()) != 0)
        .map(|&a| {
            let lv = denominator_level(a.rem_euclid(ring.root_order()), ring.p, ring.level);
            let w = norm_valuation(ring.p, lv).expect("nonzero level") * Q::from(e);
            debug_assert!(w.is_integer());
            w.to_integer()
        })
        .min();
    match v {
        Some(v) if v < top => LineModule { orders: vec![Q::new(v, e); count], free_rank: 0 },
        _ => LineModule { orders: vec![], free_rank: count },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineRecord {
    /// Numerators `a_k` of `i_k = a_k / p^L`.
    pub numerators: Vec<i64>,
    pub tuple: Vec<Q>,
    /// Level of the lcm of the denominators.
    pub level: u32,
    /// `(q, H^q)` for the requested degrees.
    pub cohomology: Vec<(usize, LineModule)>,
    /// Matrix result equals [`closed_form`] in every requested degree.
    pub closed_form_ok: bool,
    /// `(ζ_{p^ℓ} − 1)·H^q = 0` in every requested degree; `None` on the integral line.
    pub annihilated: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableSummary {
    /// Integral line has free rank `binom(n, q)` in each requested degree.
    pub integral_ranks_ok: bool,
    pub annihilation_ok: bool,
    pub closed_form_ok: bool,
    /// `(ε, #lines whose cohomology survives p^ε)` for `ε = v(ζ_{p^ℓ} − 1)`, `ℓ = 1..L`.
    pub survivors: Vec<(Q, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomTable {
    pub p: u32,
    pub n: usize,
    pub level: u32,
    pub m: u32,
    pub degrees: Vec<usize>,
    pub lines: Vec<LineRecord>,
    pub summary: TableSummary,
}

impl CohomTable {
    pub fn all_ok(&self) -> bool {
        let s = &self.summary;
        s.integral_ranks_ok && s.annihilation_ok && s.closed_form_ok
    }
}

/// `p^{Ln} · 2^n`, saturating.
pub fn table_cells(n: usize, big_l: u32, p: u32) -> u64 {
    (p as u64).checked_pow(big_l * n as u32).and_then(|x| x.checked_mul(1 << n)).unwrap_or(u64::MAX)
}

fn all_tuples(n: usize, base: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..base).map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn line_record(ring: CyclotomicRing, numerators: &[i64], degrees: &[usize]) -> Result<LineRecord> {
    let spec = KoszulSpec::line(ring, numerators)?;
    let mats = spec.koszul_matrices();
    let level = numerators.iter().map(|&a| denominator_level(a, ring.p, ring.level)).max().unwrap_or(0);
    let e = ring.e();
    let mut cohomology = Vec::new();
    let mut closed_ok = true;
    let mut ann = true;
    let killer = if level > 0 { Some(ring.pi_at(level)?) } else { None };
    for &q in degrees {
        let t = spec.cohomology_with(&mats, q)?;
        let lm = LineModule::from_type(&t, e);
        closed_ok &= lm == closed_form(ring, numerators, q);
        if let Some(c) = &killer {
            let (z, b) = spec.cycles_boundaries(&mats, q);
            let l = zpm::filtration_lengths(&z, &b, &spec.scalar_op(q, c), 1)?;
            ann &= l[1] == 0;
        }
        cohomology.push((q, lm));
    }
    let root = ring.root_order();
    Ok(LineRecord {
        numerators: numerators.to_vec(),
        tuple: numerators.iter().map(|&a| Q::new(a, root)).collect(),
        level,
        cohomology,
        closed_form_ok: closed_ok,
        annihilated: killer.map(|_| ann),
    })
}

/// Every line `i ∈ (p^{−L}Z ∩ [0,1))^n` over `A_L / p^m`.
pub fn full_table(
    n: usize,
    big_l: u32,
    m: u32,
    p: u32,
    degrees: Option<(usize, usize)>,
    budget: u64,
) -> Result<CohomTable> {
    if n == 0 || n > MAX_OPERATORS {
        return Err(Error::Unsupported("need 1 ≤ n ≤ 4".into()));
    }
    let cells = table_cells(n, big_l, p);
    if cells > budget {
        return Err(Error::BudgetExceeded { cells, budget });
    }
    let ring = CyclotomicRing::new(p, m, big_l)?;
    let (lo, hi) = degrees.unwrap_or((0, n));
    if lo > hi || hi > n {
        return Err(Error::InvalidParams("degree range outside 0..=n".into()));
    }
    let degs: Vec<usize> = (lo..=hi).collect();
    let lines =
        all_tuples(n, ring.root_order()).iter().map(|t| line_record(ring, t, &degs)).collect::<Result<Vec<_>>>()?;
    let integral = &lines[0];
    let integral_ranks_ok =
        integral.cohomology.iter().all(|(q, h)| h.orders.is_empty() && h.free_rank == binomial(n, *q));
    let annihilation_ok = lines.iter().all(|l| l.annihilated != Some(false));
    let closed_form_ok = lines.iter().all(|l| l.closed_form_ok);
    let survivors = (1..=big_l)
        .map(|lv| {
            let eps = norm_valuation(p, lv).expect("positive level");
            let count =
                lines.iter().filter(|l| l.level > 0 && l.cohomology.iter().any(|(_, h)| h.exponent(m) > eps)).count();
            (eps, count)
        })
        .collect();
    Ok(CohomTable {
        p,
        n,
        level: big_l,
        m,
        degrees: degs,
        lines,
        summary: TableSummary { integral_ranks_ok, annihilation_ok, closed_form_ok, survivors },
    })
}

/// Compares the exponent of every line `a / p^L` with that of `a / p^{L+1}`,
/// which should be smaller by the factor `p`.
pub fn frobenius_twist_check(n: usize, big_l: u32, m: u32, p: u32) -> Result<Vec<(Vec<i64>, bool)>> {
    let r0 = CyclotomicRing::new(p, m, big_l)?;
    let r1 = CyclotomicRing::new(p, m, big_l + 1)?;
    let mut out = Vec::new();
    for t in all_tuples(n, r0.root_order()) {
        if t.iter().all(|&a| a == 0) {
            continue;
        }
        let a = line_record(r0, &t, &[0])?;
        let b = line_record(r1, &t, &[0])?;
        let ok = b.cohomology[0].1.exponent(m) * Q::from(p as i64) == a.cohomology[0].1.exponent(m);
        out.push((t, ok));
    }
    Ok(out)
}
