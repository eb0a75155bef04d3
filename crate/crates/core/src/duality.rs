//! Torsion, extension modules and parametrizations by differential duality.

use std::sync::OnceLock;

use crate::janet::{
    complete_with, free_resolution, minimize_generators, operator_cc, same_module, CcOptions, CompleteOptions, FreeResolution,
    JanetBasis, JanetError, JetSystem, Membership,
};
use crate::ore::{matrix_compose, Jet, OpMatrix, Row, ScalarOp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DualityError {
    #[error("not-a-parametrization")]
    NotAParametrization,
    #[error("not-minimal")]
    NotMinimal,
    #[error("no parametrization: the module has torsion")]
    HasTorsion,
    #[error("potential index out of range")]
    BadPotential,
    #[error(transparent)]
    Janet(#[from] JanetError),
}

/// The module `M = D^m / D^p A` with lazily computed invariants.
#[derive(Debug)]
pub struct ModuleHandle {
    system: JetSystem,
    basis: JanetBasis,
    resolution: OnceLock<FreeResolution>,
}

impl ModuleHandle {
    pub fn new(system: JetSystem) -> Result<Self, JanetError> {
        ModuleHandle::with_options(system, &CompleteOptions::default())
    }

    pub fn with_options(system: JetSystem, opts: &CompleteOptions) -> Result<Self, JanetError> {
        let basis = complete_with(&system, opts)?;
        Ok(ModuleHandle { system, basis, resolution: OnceLock::new() })
    }

    pub fn from_matrix(a: &OpMatrix) -> Result<Self, JanetError> {
        ModuleHandle::new(JetSystem::from_matrix(a))
    }

    pub fn n(&self) -> usize {
        self.system.n
    }

    pub fn m(&self) -> usize {
        self.system.m
    }

    pub fn system(&self) -> &JetSystem {
        &self.system
    }

    /// The defining rows in the original coordinates.
    pub fn presentation(&self) -> OpMatrix {
        let rows = match &self.system.coordinate_change {
            Some(c) => {
                let back = c.inverse();
                self.system.equations.iter().map(|r| back.apply_row(r).expect("invertible change")).collect()
            }
            None => self.system.equations.clone(),
        };
        OpMatrix::from_rows(self.n(), self.m(), rows)
    }

    pub fn basis(&self) -> &JanetBasis {
        &self.basis
    }

    pub fn resolution(&self) -> Result<&FreeResolution, JanetError> {
        if let Some(r) = self.resolution.get() {
            return Ok(r);
        }
        let r = free_resolution(&self.system)?;
        Ok(self.resolution.get_or_init(|| r))
    }

    pub fn rank(&self) -> u64 {
        self.basis.differential_rank()
    }

    pub fn codim(&self) -> usize {
        self.basis.codimension()
    }

    pub fn contains(&self, r: &Row) -> Result<bool, JanetError> {
        membership(self.n(), self.m(), self.presentation().rows())?.contains(r)
    }
}

fn membership(n: usize, cols: usize, rows: &[Row]) -> Result<Membership, JanetError> {
    Membership::new(n, cols, rows)
}

pub fn differential_rank(m: &ModuleHandle) -> u64 {
    m.rank()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    TorsionFree,
    HasTorsion,
    TorsionModule,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::TorsionFree => "torsion_free",
            Verdict::HasTorsion => "has_torsion",
            Verdict::TorsionModule => "torsion_module",
        }
    }
}

/// A torsion element `z` together with a nonzero operator killing it in `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionElement {
    pub generator: Row,
    pub annihilator: ScalarOp,
}

#[derive(Debug, Clone)]
pub struct TorsionReport {
    pub verdict: Verdict,
    pub generators: Vec<TorsionElement>,
    pub parametrization: Option<OpMatrix>,
    /// `ad(CC(ad A))`, whether or not it parametrizes.
    pub candidate: OpMatrix,
    /// `CC(candidate)`.
    pub double_dual: OpMatrix,
}

fn monic_op(p: &ScalarOp) -> ScalarOp {
    ScalarOp::from_row(&p.as_row(0).monic().unwrap_or_else(|_| p.as_row(0)), 0)
}

/// Relations of the stacked matrix `[a; extra]`, keeping the columns of `extra`.
fn relations_on(a: &OpMatrix, extra: &[Row]) -> Result<Vec<Row>, JanetError> {
    relations_with(a, extra, &CcOptions::default())
}

fn relations_with(a: &OpMatrix, extra: &[Row], opts: &CcOptions) -> Result<Vec<Row>, JanetError> {
    let stacked = a.stack(&OpMatrix::from_rows(a.nder(), a.ncols(), extra.to_vec()))?;
    let cc = operator_cc(&stacked, opts)?;
    let p = a.nrows();
    Ok(cc
        .generators
        .rows()
        .iter()
        .map(|r| {
            let mut out = Row::zero();
            for (j, c) in r.terms().filter(|(j, _)| j.unknown >= p) {
                out.add_term(Jet::new(j.unknown - p, j.mu.clone()), c.clone());
            }
            out
        })
        .filter(|r| !r.is_zero())
        .collect())
}

/// Generators, not necessarily minimal, of the operators `w` with `w z` in the row module of `a`.
pub fn annihilator_module(a: &OpMatrix, z: &Row) -> Result<Vec<Row>, JanetError> {
    relations_with(a, std::slice::from_ref(z), &CcOptions { minimize: false, ..CcOptions::default() })
}

/// Conditions on the right-hand sides of the first `k` rows of `a`, the rest having zero right-hand side.
pub fn source_conditions(a: &OpMatrix, k: usize) -> Result<Vec<Row>, JanetError> {
    let cc = operator_cc(a, &CcOptions::default())?;
    let mut out: Vec<Row> = Vec::new();
    for r in cc.generators.rows() {
        let s = r.filter(|j| j.unknown < k);
        if s.is_zero() {
            continue;
        }
        let s = s.monic().unwrap_or(s);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    minimize_generators(a.nder(), k, out)
}

/// A lowest-order nonzero `w` with `w z` in the row module of `a`.
pub fn annihilator(a: &OpMatrix, z: &Row) -> Result<Option<ScalarOp>, JanetError> {
    let rels = relations_on(a, std::slice::from_ref(z))?;
    Ok(rels
        .iter()
        .map(|r| ScalarOp::from_row(r, 0))
        .min_by_key(|w| (w.order(), w.terms().count()))
        .map(|w| monic_op(&w)))
}

/// `ad(CC(ad a))`: operators `P` with `a P = 0`.
pub fn candidate_parametrization(a: &OpMatrix) -> Result<OpMatrix, JanetError> {
    let ad = a.adjoint();
    if ad.rows().iter().all(Row::is_zero) {
        return Ok(OpMatrix::identity(a.nder(), a.ncols()));
    }
    let cc = operator_cc(&ad, &CcOptions::default())?.generators;
    let p = cc.adjoint();
    Ok(OpMatrix::from_rows(a.nder(), cc.nrows(), p.into_rows()))
}

/// Generators of all relations of `p`, with the identity when `p` has no columns.
fn cc_or_identity(p: &OpMatrix, m: usize) -> Result<OpMatrix, JanetError> {
    if p.ncols() == 0 || p.rows().iter().all(Row::is_zero) {
        return Ok(OpMatrix::identity(p.nder(), m));
    }
    Ok(operator_cc(p, &CcOptions::default())?.generators)
}

pub fn torsion_test(m: &ModuleHandle) -> Result<TorsionReport, JanetError> {
    let a = m.presentation();
    let candidate = candidate_parametrization(&a)?;
    let double_dual = cc_or_identity(&candidate, m.m())?;
    let mem = membership(m.n(), m.m(), a.rows())?;
    let mut generators = Vec::new();
    for r in double_dual.rows() {
        if mem.contains(r)? {
            continue;
        }
        let g = r.monic().unwrap_or_else(|_| r.clone());
        let w = annihilator(&a, &g)?.expect("double dual rows are torsion");
        generators.push(TorsionElement { generator: g, annihilator: w });
    }
    let verdict = if m.rank() == 0 && !generators.is_empty() {
        Verdict::TorsionModule
    } else if generators.is_empty() {
        Verdict::TorsionFree
    } else {
        Verdict::HasTorsion
    };
    let parametrization = (verdict == Verdict::TorsionFree).then(|| candidate.clone());
    Ok(TorsionReport { verdict, generators, parametrization, candidate, double_dual })
}

/// `w z` lies in `M` while `z` does not.
pub fn verify_torsion_element(m: &ModuleHandle, t: &TorsionElement) -> Result<bool, JanetError> {
    let a = m.presentation();
    let mem = membership(m.n(), m.m(), a.rows())?;
    Ok(!t.annihilator.is_zero() && !mem.contains(&t.generator)? && mem.contains(&t.annihilator.apply(&t.generator))?)
}

/// `A P = 0` and the relations of `P` generate exactly the rows of `A`.
pub fn verify_parametrization(a: &OpMatrix, p: &OpMatrix) -> Result<bool, JanetError> {
    let comp = matrix_compose(a, p).map_err(JanetError::from)?;
    if !comp.is_zero() {
        return Ok(false);
    }
    let cc = cc_or_identity(p, a.ncols())?;
    same_module(a.nder(), a.ncols(), a.rows(), cc.rows())
}

/// `ext^i(M)` as the cohomology of the adjoint complex of a free resolution.
#[derive(Debug, Clone)]
pub struct ExtPresentation {
    pub index: usize,
    /// Kernel generators, rows over `D^{p_{i-1}}`.
    pub generators: Vec<Row>,
    /// Relations among the generators modulo the image.
    pub relations: OpMatrix,
    pub is_zero: bool,
}

pub fn ext_module(m: &ModuleHandle, i: usize) -> Result<ExtPresentation, JanetError> {
    ext_from(m.resolution()?, m.m(), i)
}

/// Resolution whose maps are minimized generating sets of relations.
pub fn minimal_resolution(a: &OpMatrix) -> Result<FreeResolution, JanetError> {
    let mut maps = vec![a.clone()];
    loop {
        let last = maps.last().expect("nonempty");
        if last.nrows() == 0 || maps.len() > last.nder() + 2 {
            break;
        }
        let cc = operator_cc(last, &CcOptions::default())?.generators;
        if cc.nrows() == 0 {
            break;
        }
        maps.push(cc);
    }
    let mut ranks = vec![a.ncols()];
    ranks.extend(maps.iter().map(OpMatrix::nrows).filter(|&r| r > 0));
    let euler_poincare = ranks.iter().enumerate().map(|(i, &r)| if i % 2 == 0 { r as i64 } else { -(r as i64) }).sum();
    Ok(FreeResolution { maps, ranks, euler_poincare })
}

/// `ext^i` computed from a given resolution of a module with `m` generators.
pub fn ext_from(res: &FreeResolution, m: usize, i: usize) -> Result<ExtPresentation, JanetError> {
    let n = res.maps.first().map_or(0, OpMatrix::nder);
    // F_0 = D^m, F_{j+1} = D^{rows of D_j}
    let cols = if i == 0 { m } else { res.maps.get(i - 1).map_or(0, OpMatrix::nrows) };
    let empty = || ExtPresentation {
        index: i,
        generators: Vec::new(),
        relations: OpMatrix::from_rows(n, 0, Vec::new()),
        is_zero: true,
    };
    if cols == 0 {
        return Ok(empty());
    }
    let kernel: Vec<Row> = match res.maps.get(i) {
        Some(d) if d.rows().iter().any(|r| !r.is_zero()) => {
            operator_cc(&d.adjoint(), &CcOptions::default())?.generators.into_rows()
        }
        _ => OpMatrix::identity(n, cols).into_rows(),
    };
    if kernel.is_empty() {
        return Ok(empty());
    }
    let image: Vec<Row> = if i == 0 { Vec::new() } else { res.maps[i - 1].adjoint().into_rows() };
    let mem = membership(n, cols, &image)?;
    let mut is_zero = true;
    for k in &kernel {
        if !mem.contains(k)? {
            is_zero = false;
            break;
        }
    }
    let k = kernel.len();
    let relations = if is_zero {
        OpMatrix::identity(n, k)
    } else {
        let rels = relations_on(&OpMatrix::from_rows(n, cols, image), &kernel)?;
        OpMatrix::from_rows(n, k, rels)
    };
    Ok(ExtPresentation { index: i, generators: kernel, relations, is_zero })
}

/// Keep the potential columns in `keep` of a certified parametrization and check minimality.
pub fn minimal_parametrization(a: &OpMatrix, p: &OpMatrix, keep: &[usize]) -> Result<OpMatrix, DualityError> {
    if keep.iter().any(|&k| k >= p.ncols()) {
        return Err(DualityError::BadPotential);
    }
    let rows: Vec<Row> = p
        .rows()
        .iter()
        .map(|r| {
            let mut out = Row::zero();
            for (j, c) in r.terms() {
                if let Some(pos) = keep.iter().position(|&k| k == j.unknown) {
                    out.add_term(Jet::new(pos, j.mu.clone()), c.clone());
                }
            }
            out
        })
        .collect();
    let restricted = OpMatrix::from_rows(p.nder(), keep.len(), rows);
    if !verify_parametrization(a, &restricted)? {
        return Err(DualityError::NotAParametrization);
    }
    if kernel_rank(&restricted)? > 0 {
        return Err(DualityError::NotMinimal);
    }
    Ok(restricted)
}

/// Differential rank of the solutions of `P phi = 0`.
pub fn kernel_rank(p: &OpMatrix) -> Result<u64, JanetError> {
    if p.ncols() == 0 {
        return Ok(0);
    }
    let b = complete_with(&JetSystem::from_matrix(p), &CompleteOptions::untracked())?;
    Ok(b.differential_rank())
}

/// `X` with `X a = I`, if the unit rows lie in the row module of `a`.
pub fn left_inverse(a: &OpMatrix) -> Result<Option<OpMatrix>, JanetError> {
    let n = a.nder();
    let m = a.ncols();
    let sys = JetSystem::from_matrix(a);
    let b = complete_with(&sys, &CompleteOptions::default())?;
    let t = b.cofactors().ok_or(JanetError::Untracked)?;
    let mut rows = Vec::new();
    for k in 0..m {
        let (nf, s) = b.normal_form_tracked(&Row::jet(Jet::plain(k)), true);
        if !nf.is_zero() {
            return Ok(None);
        }
        let mut x = s.expect("tracked").substitute(t);
        if let Some(c) = b.coordinate_change() {
            x = c.inverse().apply_row(&x)?;
        }
        rows.push(x);
    }
    Ok(Some(OpMatrix::from_rows(n, a.nrows(), rows)))
}

/// `Y` with `a Y = I`.
pub fn right_inverse(a: &OpMatrix) -> Result<Option<OpMatrix>, JanetError> {
    Ok(left_inverse(&a.adjoint())?.map(|x| x.adjoint()))
}

pub const LIFT_ORDER_BOUND: u32 = 2;

/// A right inverse of `d1` of order at most `bound`, verified by composition.
pub fn lift_check(d1: &OpMatrix, bound: u32) -> Result<Option<OpMatrix>, JanetError> {
    let Some(y) = right_inverse(d1)? else { return Ok(None) };
    if y.order().unwrap_or(0) > bound {
        return Ok(None);
    }
    let comp = matrix_compose(d1, &y)?;
    Ok((comp == OpMatrix::identity(d1.nder(), d1.nrows())).then_some(y))
}

/// Rank duality: `m - rk(M) = p - rk(N)` for `N` presented by the adjoint.
pub fn operator_rank(a: &OpMatrix) -> Result<u64, JanetError> {
    let m = ModuleHandle::from_matrix(a)?;
    Ok(a.ncols() as u64 - m.rank())
}

/// A left inverse of `p` of order at most `bound`, verified by composition.
pub fn retraction_check(p: &OpMatrix, bound: u32) -> Result<Option<OpMatrix>, JanetError> {
    let Some(y) = left_inverse(p)? else { return Ok(None) };
    if y.order().unwrap_or(0) > bound {
        return Ok(None);
    }
    let comp = matrix_compose(&y, p)?;
    Ok((comp == OpMatrix::identity(p.nder(), p.ncols())).then_some(y))
}

/// Both presentations define the same quotient of the same free module.
pub fn recovers(a: &OpMatrix, b: &OpMatrix) -> Result<bool, JanetError> {
    if a.ncols() != b.ncols() {
        return Ok(false);
    }
    same_module(a.nder(), a.ncols(), a.rows(), b.rows())
}
