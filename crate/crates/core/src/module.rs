//! Finitely presented torsion modules `⊕ O/t^{γ_i}` and maps between them.
//!
//! A map `M → N` is a matrix `X` with `v(x_ij) ≥ γ_N,i − γ_M,j`, entries
//! reduced modulo `t^{γ_N,i}`. Every construction on maps goes through a
//! Smith normal form of a block matrix built from `X` and the diagonal
//! presentations; entries are lifted with a zero tail to a working
//! precision large enough that no elimination runs out of digits.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use num_traits::Zero;

use crate::eldiv::EldivSeq;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::params::BaseRing;
use crate::puiseux::Puiseux;
use crate::rational::Q;
use crate::snf::smith_normal_form;

/// `O/t^γ` (closed) versus `O/I_γ` with `I_γ = {v > γ}` (open).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    Closed,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub gamma: Q,
    pub flag: Flag,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TorsionModule {
    factors: Vec<Factor>,
}

impl TorsionModule {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Cyclic factors in any order; a closed factor needs `γ > 0`.
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        for f in &factors {
            if f.gamma < Q::zero() || (f.gamma.is_zero() && f.flag == Flag::Closed) {
                return Err(Error::InvalidParams("closed factors need γ > 0, open ones γ ≥ 0".into()));
            }
        }
        Ok(Self { factors })
    }

    pub fn closed(divisors: &EldivSeq) -> Self {
        Self { factors: divisors.entries().iter().map(|&gamma| Factor { gamma, flag: Flag::Closed }).collect() }
    }

    pub fn from_gammas(g: &[Q]) -> Result<Self> {
        Self::new(g.iter().map(|&gamma| Factor { gamma, flag: Flag::Closed }).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn gammas(&self) -> Vec<Q> {
        self.factors.iter().map(|f| f.gamma).collect()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Elementary divisors; flags are forgotten.
    pub fn divisors(&self) -> EldivSeq {
        EldivSeq::from_unsorted(self.gammas()).expect("validated")
    }

    pub fn lambda(&self) -> Q {
        self.gammas().into_iter().sum()
    }

    /// `Hom_O(−, K/O)`: divisors kept, closed and open exchanged.
    pub fn dual(&self) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .map(|f| Factor {
                    gamma: f.gamma,
                    flag: match f.flag {
                        Flag::Closed => Flag::Open,
                        Flag::Open => Flag::Closed,
                    },
                })
                .collect(),
        }
    }

    /// Killed by the maximal ideal, i.e. all divisors vanish.
    pub fn is_almost_zero(&self) -> bool {
        self.factors.iter().all(|f| f.gamma.is_zero())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self { factors }
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.gammas() == other.gammas()
    }

    /// `diag(t^{γ_i})` over `base`.
    pub fn presentation(&self, base: BaseRing) -> Result<Matrix> {
        let g = self.gammas().iter().map(|&x| base.to_scaled(x)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix::diag_monomials(base, g.len(), g.len(), &g))
    }
}

/// Cokernel of a square presentation in diagonal coordinates.
#[derive(Clone, Debug)]
pub struct Presented {
    pub module: TorsionModule,
    /// `n × k`: original coordinates to diagonal ones.
    pub to_diag: Matrix,
    /// `k × n`: a section of `to_diag`.
    pub from_diag: Matrix,
}

impl Presented {
    /// Diagonalizes `coker(A)` for `A` with torsion cokernel.
    pub fn from_matrix(a: &Matrix) -> Result<Self> {
        let snf = smith_normal_form(a)?;
        if snf.rank() != a.rows() {
            return Err(Error::ShapeMismatch("cokernel has a free part".into()));
        }
        let base = a.base();
        let mut rows = Vec::new();
        let mut gammas = Vec::new();
        for s in (0..snf.pivots.len()).rev() {
            let g = snf.pivots[s].expect("full rank");
            if g > 0 {
                rows.push(snf.pivot_row(s));
                gammas.push(base.from_scaled(g));
            }
        }
        let all: Vec<usize> = (0..a.rows()).collect();
        Ok(Self {
            module: TorsionModule::from_gammas(&gammas)?,
            to_diag: snf.u.submatrix(&rows, &all),
            from_diag: snf.u_inv.submatrix(&all, &rows),
        })
    }
}

/// Working ring with enough precision for computations on `mods`.
fn work_base(base: BaseRing, mods: &[&TorsionModule]) -> Result<BaseRing> {
    let total: Q = mods.iter().map(|m| m.lambda()).sum();
    let need = base.to_scaled(total * Q::from_integer(3))? + 1;
    let max_gamma = mods.iter().flat_map(|m| m.gammas()).max().unwrap_or_else(Q::zero);
    if base.to_scaled(max_gamma)? > base.cap {
        return Err(Error::PrecisionExhausted { needed: Some(max_gamma) });
    }
    Ok(BaseRing { cap: base.cap.max(need), ..base })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    source: TorsionModule,
    target: TorsionModule,
    matrix: Matrix,
}

impl ModuleMap {
    /// Validates and reduces entry `(i, j)` modulo `t^{γ_target,i}`.
    pub fn new(source: TorsionModule, target: TorsionModule, matrix: Matrix) -> Result<Self> {
        if matrix.rows() != target.len() || matrix.cols() != source.len() {
            return Err(Error::ShapeMismatch("map matrix must be target × source".into()));
        }
        let base = matrix.base();
        let mut m = matrix;
        for (i, ft) in target.factors.iter().enumerate() {
            let gt = base.to_scaled(ft.gamma)?;
            for (j, fs) in source.factors.iter().enumerate() {
                let gs = base.to_scaled(fs.gamma)?;
                let x = m.get(i, j);
                if x.prec_scaled() < gt {
                    return Err(Error::PrecisionExhausted { needed: Some(ft.gamma) });
                }
                let r = x.truncate(gt);
                if let Some(v) = r.val_scaled() {
                    if v < gt - gs {
                        return Err(Error::IllDefinedMap { row: i, col: j });
                    }
                }
                m.set(i, j, r);
            }
        }
        Ok(Self { source, target, matrix: m })
    }

    pub fn zero(base: BaseRing, source: &TorsionModule, target: &TorsionModule) -> Self {
        let m = Matrix::zeros(base, target.len(), source.len());
        Self::new(source.clone(), target.clone(), m).expect("zero map is well defined")
    }

    /// `t^ε · id`.
    pub fn scalar(base: BaseRing, module: &TorsionModule, eps: Q) -> Result<Self> {
        let e = base.to_scaled(eps)?;
        let n = module.len();
        Self::new(module.clone(), module.clone(), Matrix::diag_monomials(base, n, n, &vec![e; n]))
    }

    pub fn identity(base: BaseRing, module: &TorsionModule) -> Self {
        Self::scalar(base, module, Q::zero()).expect("identity is well defined")
    }

    pub fn source(&self) -> &TorsionModule {
        &self.source
    }

    pub fn target(&self) -> &TorsionModule {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn base(&self) -> BaseRing {
        self.matrix.base()
    }

    fn lifted(&self, wb: BaseRing) -> Result<Matrix> {
        Ok(self.matrix.rebase(wb)?.lift_to(wb.cap))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ModuleMap) -> Result<ModuleMap> {
        if !first.target.same_shape(&self.source) {
            return Err(Error::ShapeMismatch("composition of incompatible maps".into()));
        }
        let base = self.base();
        let wb = work_base(base, &[&first.source, &self.source, &self.target])?;
        let prod = self.lifted(wb)?.mul(&first.lifted(wb)?)?;
        ModuleMap::new(first.source.clone(), self.target.clone(), prod.rebase(base)?)
    }

    /// Equality as maps: entries agree modulo `t^{γ_target,i}`.
    pub fn same_map(&self, other: &ModuleMap) -> bool {
        self.source.same_shape(&other.source)
            && self.target.same_shape(&other.target)
            && self.matrix.agrees_with(&other.matrix)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `coker f`, from the Smith form of `[D_target | X]`.
    pub fn cokernel(&self) -> Result<TorsionModule> {
        let base = self.base();
        let wb = work_base(base, &[&self.source, &self.target])?;
        let b = self.target.presentation(wb)?.hcat(&self.lifted(wb)?)?;
        Ok(TorsionModule::closed(&smith_normal_form(&b)?.cokernel().torsion))
    }

    /// Divisors of `f(M) ⊂ N`.
    pub fn image_divisors(&self) -> Result<EldivSeq> {
        let base = self.base();
        let wb = work_base(base, &[&self.source, &self.target])?;
        let dt = self.target.presentation(wb)?;
        let snf = smith_normal_form(&dt.hcat(&self.lifted(wb)?)?)?;
        // Coordinates of the columns of D_target in a basis of the image lattice.
        let ud = snf.u.mul(&dt)?;
        let n = dt.rows();
        let mut rows: Vec<Vec<Puiseux>> = vec![Vec::new(); n];
        for s in 0..snf.pivots.len() {
            let sigma = snf.pivots[s].ok_or(Error::ShapeMismatch("degenerate presentation".into()))?;
            let r = snf.pivot_row(s);
            rows[r] = ud.row(r).iter().map(|x| x.shift_down(sigma)).collect::<Result<_>>()?;
        }
        let pres = Matrix::new(wb, n, n, rows.into_iter().flatten().collect())?;
        Ok(smith_normal_form(&pres)?.cokernel().torsion)
    }

    /// `ker(g)/im(f)` for `M′ →f M →g M″`.
    pub fn homology(f: &ModuleMap, g: &ModuleMap) -> Result<EldivSeq> {
        if !f.target.same_shape(&g.source) {
            return Err(Error::ShapeMismatch("maps are not composable".into()));
        }
        let base = f.base();
        let wb = work_base(base, &[&f.source, &g.source, &g.target])?;
        if !Self::composes_to_zero(f, g, wb)? {
            return Err(Error::NotAComplex);
        }
        let n = g.source.len();
        if n == 0 {
            return Ok(EldivSeq::empty());
        }
        let d = g.source.presentation(wb)?;
        // Kernel lattice of g inside O^n, as generating columns.
        let kx = if g.target.is_empty() {
            Matrix::identity(wb, n)
        } else {
            let gp = g.lifted(wb)?.hcat(&g.target.presentation(wb)?)?;
            let snf = smith_normal_form(&gp)?;
            let pivot_cols: Vec<usize> =
                (0..snf.pivots.len()).filter(|&s| snf.pivots[s].is_some()).map(|s| snf.pivot_col(s)).collect();
            let kcols: Vec<usize> = (0..gp.cols()).filter(|c| !pivot_cols.contains(c)).collect();
            let xrows: Vec<usize> = (0..n).collect();
            snf.v.submatrix(&xrows, &kcols)
        };
        let ksnf = smith_normal_form(&kx)?;
        if ksnf.rank() != n {
            return Err(Error::PrecisionExhausted { needed: None });
        }
        let gens = ksnf.u.mul(&f.lifted(wb)?.hcat(&d)?)?;
        let mut data: Vec<Vec<Puiseux>> = vec![Vec::new(); n];
        for s in 0..ksnf.pivots.len() {
            let sigma = ksnf.pivots[s].expect("full rank");
            let r = ksnf.pivot_row(s);
            data[r] = gens.row(r).iter().map(|x| x.shift_down(sigma)).collect::<Result<_>>()?;
        }
        let pres = Matrix::new(wb, n, gens.cols(), data.into_iter().flatten().collect())?;
        Ok(smith_normal_form(&pres)?.cokernel().torsion)
    }

    fn composes_to_zero(f: &ModuleMap, g: &ModuleMap, wb: BaseRing) -> Result<bool> {
        let prod = g.lifted(wb)?.mul(&f.lifted(wb)?)?;
        for (i, fac) in g.target.factors.iter().enumerate() {
            let gi = wb.to_scaled(fac.gamma)?;
            for j in 0..prod.cols() {
                let x = prod.get(i, j);
                if x.prec_scaled() < gi {
                    return Err(Error::PrecisionExhausted { needed: Some(fac.gamma) });
                }
                if !x.truncate(gi).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub injective: bool,
    pub surjective: bool,
    pub middle_exact: bool,
    pub exact: bool,
    /// `λ(M)`.
    pub lambda_lhs: Q,
    /// `λ(M′) + λ(M″)`.
    pub lambda_rhs: Q,
    /// `γ_M ≤ γ_{M′} + γ_{M″}`.
    pub majorization: bool,
    pub kernel_left: EldivSeq,
    pub homology_middle: EldivSeq,
    pub cokernel_right: EldivSeq,
    /// Divisors at the first position where exactness fails.
    pub failing_homology: Option<EldivSeq>,
}

/// Checks `0 → M′ →f M →g M″ → 0`.
pub fn exact_sequence_check(f: &ModuleMap, g: &ModuleMap) -> Result<ExactnessReport> {
    let base = f.base();
    let kernel_left = ModuleMap::homology(&ModuleMap::zero(base, &TorsionModule::zero(), &f.source), f)?;
    let homology_middle = ModuleMap::homology(f, g)?;
    let cokernel_right = g.cokernel()?.divisors();
    let injective = kernel_left.is_empty();
    let middle_exact = homology_middle.is_empty();
    let surjective = cokernel_right.is_empty();
    let exact = injective && middle_exact && surjective;
    let failing_homology =
        [&kernel_left, &homology_middle, &cokernel_right].into_iter().find(|h| !h.is_empty()).cloned();
    let (gm, gl, gr) = (g.source.divisors(), f.source.divisors(), g.target.divisors());
    Ok(ExactnessReport {
        injective,
        surjective,
        middle_exact,
        exact,
        lambda_lhs: gm.lambda(),
        lambda_rhs: gl.lambda() + gr.lambda(),
        majorization: gl.indexwise_sum(&gr).majorizes(&gm),
        kernel_left,
        homology_middle,
        cokernel_right,
        failing_homology,
    })
}

/// `M ≈_ε N` by the metric criterion `‖γ_M − γ_N‖ ≤ ε`.
pub fn approx_eq(m: &TorsionModule, n: &TorsionModule, eps: Q) -> bool {
    m.divisors().linf_dist(&n.divisors()) <= eps
}

fn sorted_order(m: &TorsionModule) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m.len()).collect();
    idx.sort_by_key(|&i| Reverse(m.factors[i].gamma));
    idx
}

/// Diagonal `f: M → N`, `g: N → M` with `g∘f = t^ε` and `f∘g = t^ε`.
pub fn witness_maps(
    base: BaseRing,
    m: &TorsionModule,
    n: &TorsionModule,
    eps: Q,
) -> Result<Option<(ModuleMap, ModuleMap)>> {
    if !approx_eq(m, n, eps) {
        return Ok(None);
    }
    let (om, on) = (sorted_order(m), sorted_order(n));
    let mut fm = Matrix::zeros(base, n.len(), m.len());
    let mut gm = Matrix::zeros(base, m.len(), n.len());
    let one = base.field.one();
    for k in 0..om.len().min(on.len()) {
        let (i, j) = (om[k], on[k]);
        let (a, b) = (m.factors[i].gamma, n.factors[j].gamma);
        let u = if b > a { b - a } else { Q::zero() };
        let w = eps - u;
        fm.set(j, i, Puiseux::monomial(base, one, u)?);
        gm.set(i, j, Puiseux::monomial(base, one, w)?);
    }
    Ok(Some((ModuleMap::new(m.clone(), n.clone(), fm)?, ModuleMap::new(n.clone(), m.clone(), gm)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn base() -> BaseRing {
        BaseRing::new(2, 1, 2, qi(12)).unwrap()
    }

    fn module(g: &[Q]) -> TorsionModule {
        TorsionModule::from_gammas(g).unwrap()
    }

    fn map(src: &TorsionModule, tgt: &TorsionModule, rows: &[&[&str]]) -> ModuleMap {
        let b = base();
        let data = rows.iter().flat_map(|r| r.iter().map(|s| Puiseux::parse(b, s).unwrap())).collect();
        ModuleMap::new(src.clone(), tgt.clone(), Matrix::new(b, tgt.len(), src.len(), data).unwrap()).unwrap()
    }

    #[test]
    fn inclusion_projection_sequence() {
        let (m1, m2) = (module(&[qi(1)]), module(&[qi(2)]));
        let f = map(&m1, &m2, &[&["t"]]);
        let g = map(&m2, &m1, &[&["1"]]);
        let rep = exact_sequence_check(&f, &g).unwrap();
        assert!(rep.exact, "{rep:?}");
        assert_eq!((rep.lambda_lhs, rep.lambda_rhs), (qi(2), qi(2)));
        assert!(rep.majorization);
        assert_eq!(f.image_divisors().unwrap().entries(), &[qi(1)]);
        assert_eq!(g.cokernel().unwrap(), TorsionModule::zero());
    }

    #[test]
    fn ill_defined_map_rejected() {
        let (m1, m2) = (module(&[qi(1)]), module(&[qi(2)]));
        let b = base();
        let x = Matrix::identity(b, 1);
        assert_eq!(ModuleMap::new(m1, m2, x).unwrap_err(), Error::IllDefinedMap { row: 0, col: 0 });
    }

    #[test]
    fn zero_and_identity() {
        let b = base();
        let m = module(&[qi(1), q(1, 2)]);
        assert_eq!(ModuleMap::zero(b, &m, &m).cokernel().unwrap().divisors(), m.divisors());
        assert!(ModuleMap::identity(b, &m).cokernel().unwrap().is_empty());
        let id = ModuleMap::identity(b, &m);
        assert!(id.compose(&id).unwrap().same_map(&id));
    }

    #[test]
    fn not_exact_when_f_zero() {
        let b = base();
        let m1 = module(&[qi(1)]);
        let m = module(&[q(3, 2)]);
        let f = ModuleMap::zero(b, &m1, &m);
        let g = ModuleMap::identity(b, &m);
        let rep = exact_sequence_check(&f, &g).unwrap();
        assert!(!rep.injective && rep.middle_exact && rep.surjective);
        assert_eq!(rep.failing_homology.unwrap().entries(), &[qi(1)]);
        let rep0 = exact_sequence_check(&ModuleMap::zero(b, &TorsionModule::zero(), &m), &g).unwrap();
        assert!(rep0.exact);
    }

    #[test]
    fn not_a_complex() {
        let m = module(&[qi(1)]);
        let id = ModuleMap::identity(base(), &m);
        assert_eq!(exact_sequence_check(&id, &id), Err(Error::NotAComplex));
    }

    #[test]
    fn witnesses_compose_to_t_eps() {
        let b = base();
        let m = module(&[qi(1)]);
        let n = module(&[q(3, 2)]);
        let (f, g) = witness_maps(b, &m, &n, q(1, 2)).unwrap().unwrap();
        assert!(g.compose(&f).unwrap().same_map(&ModuleMap::scalar(b, &m, q(1, 2)).unwrap()));
        assert!(f.compose(&g).unwrap().same_map(&ModuleMap::scalar(b, &n, q(1, 2)).unwrap()));
        assert!(witness_maps(b, &module(&[qi(2)]), &TorsionModule::zero(), qi(1)).unwrap().is_none());
    }

    #[test]
    fn dual_swaps_flags() {
        let m = module(&[qi(2), qi(1)]);
        let d = m.dual();
        assert!(d.factors().iter().all(|f| f.flag == Flag::Open));
        assert_eq!(d.divisors(), m.divisors());
        assert_eq!(d.dual(), m);
        let almost = TorsionModule::new(vec![Factor { gamma: qi(0), flag: Flag::Open }]).unwrap();
        assert!(almost.is_almost_zero());
        assert!(TorsionModule::from_gammas(&[qi(0)]).is_err());
    }

    #[test]
    fn presented_block() {
        let b = base();
        let a = Matrix::new(b, 2, 2, ["t", "t", "t", "t^2"].iter().map(|s| Puiseux::parse(b, s).unwrap()).collect())
            .unwrap();
        let pr = Presented::from_matrix(&a).unwrap();
        assert_eq!(pr.module.gammas(), [qi(1), qi(1)]);
    }
}
