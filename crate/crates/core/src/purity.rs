//! Purity filtration, the full-class purity test and relative parametrizations.

use crate::coefficients::Scalar;
use crate::duality::{annihilator_module, minimal_resolution, torsion_test, ModuleHandle, Verdict};
use crate::janet::{
    complete_with, same_module, CompleteOptions, CoordChange, JanetBasis, JanetError, JetSystem, Membership,
};
use crate::ore::{Jet, MultiIndex, Names, OpMatrix, Row};
use crate::spencer::{first_order_form, subsystem_by_classes, SpencerError, SpencerForm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PurityError {
    #[error("not-pure")]
    NotPure,
    #[error("incompatible-constraint")]
    IncompatibleConstraint,
    #[error("parametrization does not absorb the top classes")]
    NoLift,
    #[error(transparent)]
    Spencer(#[from] SpencerError),
    #[error(transparent)]
    Janet(#[from] JanetError),
}

/// A module element together with the codimension of the submodule it generates.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub element: Row,
    pub codim: usize,
    /// Characters of the system satisfied by the element alone.
    pub alpha: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationStep {
    pub r: usize,
    /// Generators of `t_r(M)` among the witnesses.
    pub generators: Vec<Row>,
    pub is_zero: bool,
    /// `t_r(M)` is strictly contained in `t_{r-1}(M)`, or in `M` for `r = 0`.
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub struct PurityReport {
    pub n: usize,
    /// `t_n` first.
    pub filtration: Vec<FiltrationStep>,
    pub witnesses: Vec<Witness>,
    pub codim: usize,
    /// Number of full classes in the Spencer form, when the test was run.
    pub full_classes: Option<usize>,
    /// Verdict of the torsion test on the lower classes, when the test was run.
    pub lower_torsion_free: Option<bool>,
    /// `Some(r)` when `M` is `r`-pure.
    pub pure: Option<usize>,
}

impl PurityReport {
    /// `0 = t3 ⊂ t2 = t1 ⊂ t0 = M`.
    pub fn chain(&self) -> String {
        let mut s = String::from("0");
        for step in &self.filtration {
            if step.r == self.n {
                s.push_str(&format!(" = t{}", step.r));
            }
            let next = if step.r == 0 { "M".to_string() } else { format!("t{}", step.r - 1) };
            s.push_str(if step.strict { " ⊂ " } else { " = " });
            s.push_str(&next);
        }
        s
    }

    /// Witnesses whose codimensions disagree, when not pure.
    pub fn offending(&self) -> Vec<&Witness> {
        if self.pure.is_some() {
            return Vec::new();
        }
        let lo = self.witnesses.iter().map(|w| w.codim).min();
        let hi = self.witnesses.iter().map(|w| w.codim).max();
        self.witnesses.iter().filter(|w| Some(w.codim) == lo || Some(w.codim) == hi).collect()
    }
}

fn witness_rows(m: &ModuleHandle, extra: &[Row]) -> Vec<Row> {
    let q = m.basis().q;
    let mut out: Vec<Row> = Vec::new();
    for mu in MultiIndex::all_up_to(m.n(), q.saturating_sub(1)) {
        for k in 0..m.m() {
            out.push(Row::jet(Jet::new(k, mu.clone())));
        }
    }
    for r in extra {
        if !out.contains(r) {
            out.push(r.clone());
        }
    }
    out
}

fn codim_of(m: &ModuleHandle, w: &Row) -> Result<(usize, Vec<u64>), JanetError> {
    let ann = annihilator_module(&m.presentation(), w)?;
    if ann.is_empty() {
        let mut alpha = vec![0; m.n()];
        alpha[m.n() - 1] = 1;
        return Ok((0, alpha));
    }
    let b = complete_with(&JetSystem::new(m.n(), 1, ann), &CompleteOptions::untracked())?;
    Ok((b.codimension(), b.alpha()))
}

pub fn purity_filtration(m: &ModuleHandle) -> Result<PurityReport, JanetError> {
    let n = m.n();
    let a = m.presentation();
    let torsion = torsion_test(m)?;
    let extra: Vec<Row> = torsion.generators.iter().map(|t| t.generator.clone()).collect();
    let base = Membership::new(n, m.m(), a.rows())?;
    let mut witnesses = Vec::new();
    for w in witness_rows(m, &extra) {
        if base.contains(&w)? {
            continue;
        }
        let (codim, alpha) = codim_of(m, &w)?;
        witnesses.push(Witness { element: w, codim, alpha });
    }
    let gens = |r: usize| -> Vec<Row> {
        witnesses.iter().filter(|w| w.codim > r).map(|w| w.element.clone()).collect()
    };
    let span_contains = |inner: &[Row], outer: &[Row]| -> Result<bool, JanetError> {
        let mut rows = a.rows().to_vec();
        rows.extend(inner.iter().cloned());
        let mem = Membership::new(n, m.m(), &rows)?;
        for r in outer {
            if !mem.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let units: Vec<Row> = (0..m.m()).map(|k| Row::jet(Jet::plain(k))).collect();
    let mut filtration = Vec::new();
    for r in (0..=n).rev() {
        let g = gens(r);
        let outer = if r == 0 { units.clone() } else { gens(r - 1) };
        filtration.push(FiltrationStep {
            r,
            is_zero: g.is_empty(),
            strict: !span_contains(&g, &outer)?,
            generators: g,
        });
    }
    let zero_at = |r: usize| filtration.iter().find(|s| s.r == r).is_none_or(|s| s.is_zero);
    let whole_at = |r: usize| r == 0 || filtration.iter().find(|s| s.r == r - 1).is_some_and(|s| !s.strict);
    let pure = (0..=n).find(|&r| zero_at(r) && whole_at(r));
    Ok(PurityReport {
        n,
        filtration,
        witnesses,
        codim: m.codim(),
        full_classes: None,
        lower_torsion_free: None,
        pure,
    })
}

/// Spencer form of the module's involutive basis.
pub fn spencer_form(m: &ModuleHandle) -> Result<SpencerForm, SpencerError> {
    first_order_form(m.basis(), &Names::standard(m.n(), m.m()))
}

/// Full classes of the Spencer form and torsion-freeness of the lower classes.
pub fn purity_test(m: &ModuleHandle) -> Result<PurityReport, PurityError> {
    let mut report = purity_filtration(m)?;
    let sf = spencer_form(m)?;
    let r = sf.full_classes();
    let free = lower_classes_torsion_free(&sf, r)?;
    report.full_classes = Some(r);
    report.lower_torsion_free = Some(free);
    report.pure = free.then_some(r);
    Ok(report)
}

fn lower_classes_torsion_free(sf: &SpencerForm, r: usize) -> Result<bool, JanetError> {
    if r == sf.n() {
        return Ok(true);
    }
    let sub = ModuleHandle::new(subsystem_by_classes(sf, r))?;
    Ok(torsion_test(&sub)?.verdict == Verdict::TorsionFree)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inclusion {
    Equal,
    Strict,
}

#[derive(Debug, Clone)]
pub struct RelativeParametrization {
    pub r: usize,
    /// Display names of the potentials.
    pub potentials: Vec<String>,
    /// Row `k` expresses unknown `k` in the potentials.
    pub parametrizing_ops: OpMatrix,
    pub constraints: OpMatrix,
    pub l_system: JanetBasis,
    pub inclusion: Inclusion,
    /// Potentials outside the image of `M` when the inclusion is strict.
    pub witnesses: Vec<usize>,
}

impl RelativeParametrization {
    pub fn potential_names(&self, vars: &[String]) -> Names {
        Names::new(vars.to_vec(), self.potentials.clone())
    }

    /// The original system, applied to the parametrizing operators, vanishes modulo the constraints.
    pub fn verify(&self, a: &OpMatrix) -> Result<bool, JanetError> {
        let mem = Membership::new(self.constraints.nder(), self.constraints.ncols(), self.constraints.rows())?;
        for r in a.apply(self.parametrizing_ops.rows())? {
            if !mem.contains(&r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Number of operators in a minimal free resolution of `L`.
    pub fn l_resolution_length(&self) -> Result<usize, JanetError> {
        Ok(minimal_resolution(&self.constraints)?.maps.len())
    }
}

fn back_to_original(rows: Vec<Row>, change: Option<&CoordChange>) -> Result<Vec<Row>, JanetError> {
    match change {
        Some(c) => {
            let inv = c.inverse();
            Ok(rows.iter().map(|r| inv.apply_row(r)).collect::<Result<_, _>>()?)
        }
        None => Ok(rows),
    }
}

/// Parametrize the lower classes of the Spencer form and turn the full classes into constraints on the potentials.
pub fn relative_parametrization(
    m: &ModuleHandle,
    original: &Names,
    best_effort: bool,
) -> Result<RelativeParametrization, PurityError> {
    let sf = first_order_form(m.basis(), original)?;
    let n = sf.n();
    let r = sf.full_classes();
    let keep = n - r;
    let sb = &sf.basis;
    let mz = sf.m();
    let p_s: OpMatrix = if keep == 0 {
        OpMatrix::identity(n, mz)
    } else {
        let sub = ModuleHandle::new(subsystem_by_classes(&sf, r))?;
        let t = torsion_test(&sub)?;
        match t.parametrization {
            Some(p) => p,
            None if best_effort => t.candidate,
            None => return Err(PurityError::NotPure),
        }
    };
    let k = p_s.ncols();
    let p_s = normalize_potentials(&OpMatrix::from_rows(n, k, p_s.into_rows()));
    let mut constraints: Vec<Row> = Vec::new();
    for a in keep..n {
        let mut by_unknown: Vec<(usize, &Row)> =
            sf.rows_of_class(a).into_iter().map(|i| (sb.leader(i).unknown, &sb.rows()[i])).collect();
        by_unknown.sort_by_key(|(u, _)| *u);
        if by_unknown.len() != mz {
            return Err(PurityError::NotPure);
        }
        // V = eq(P phi), U = P (d_a phi), W = V - U = P C
        let da_phi: Vec<Row> = (0..k).map(|j| Row::jet(Jet::new(j, MultiIndex::unit(a)))).collect();
        let mut w_rows = vec![Row::zero(); mz];
        for (u, eq) in &by_unknown {
            let lead = eq.coeff(&Jet::new(*u, MultiIndex::unit(a))).ok_or(PurityError::NotPure)?;
            let eq = eq.scale(&Scalar::one().div(lead).map_err(JanetError::from)?);
            let v = eq.substitute(p_s.rows());
            let uu = p_s.rows()[*u].substitute(&da_phi);
            w_rows[*u] = &v - &uu;
        }
        let w = OpMatrix::from_rows(n, k, w_rows);
        let adp = p_s.adjoint();
        let adw = w.adjoint();
        let c = solve_left(&adp, &adw)?.ok_or(PurityError::NoLift)?.adjoint();
        for j in 0..k {
            let mut row = da_phi[j].clone();
            row.axpy(&Scalar::one(), &c.rows()[j]);
            constraints.push(row);
        }
    }
    // original unknowns through the dictionary, then the parametrization
    let mut y_in_z = Vec::new();
    for u in 0..m.m() {
        let nf = sb_original_normal_form(m, u);
        y_in_z.push(to_z(&sf, &nf));
    }
    let y_ops: Vec<Row> = y_in_z.iter().map(|e| e.substitute(p_s.rows())).collect();
    let change = sb.coordinate_change();
    let constraints = back_to_original(constraints, change)?;
    let y_ops = back_to_original(y_ops, change)?;
    let constraints: Vec<Row> = constraints.iter().map(|r| r.monic().unwrap_or_else(|_| r.clone())).collect();
    let l_system = complete_with(&JetSystem::new(n, k, constraints.clone()), &CompleteOptions::untracked())?;
    let mut gens = constraints.clone();
    gens.extend(y_ops.iter().cloned());
    let mem = Membership::new(n, k, &gens)?;
    let mut witnesses = Vec::new();
    for j in 0..k {
        if !mem.contains(&Row::jet(Jet::plain(j)))? {
            witnesses.push(j);
        }
    }
    let potentials = potential_names(&sf, &p_s);
    Ok(RelativeParametrization {
        r,
        potentials,
        parametrizing_ops: OpMatrix::from_rows(n, k, y_ops),
        constraints: OpMatrix::from_rows(n, k, constraints),
        l_system,
        inclusion: if witnesses.is_empty() { Inclusion::Equal } else { Inclusion::Strict },
        witnesses,
    })
}

fn sb_original_normal_form(m: &ModuleHandle, u: usize) -> Row {
    let b = m.basis();
    b.normal_form(&Row::jet(Jet::plain(u)))
}

/// Rewrite a row of parametric jets of order below `q` in the `z` unknowns.
fn to_z(sf: &SpencerForm, r: &Row) -> Row {
    let mut out = Row::zero();
    for (j, c) in r.terms() {
        let z = sf.dictionary.iter().position(|d| d == j).expect("parametric jet");
        out.add_term(Jet::plain(z), c.clone());
    }
    out
}

/// Rescale each potential by a constant so that its first lowest-order occurrence has coefficient 1.
fn normalize_potentials(p: &OpMatrix) -> OpMatrix {
    let k = p.ncols();
    let mut exprs: Vec<Row> = (0..k).map(|j| Row::jet(Jet::plain(j))).collect();
    for (j, e) in exprs.iter_mut().enumerate() {
        let mut best: Option<(u32, Scalar)> = None;
        for r in p.rows() {
            let lowest = r.terms().filter(|(t, _)| t.unknown == j).min_by_key(|(t, _)| t.order());
            if let Some((t, c)) = lowest {
                if best.as_ref().is_none_or(|(o, _)| t.order() < *o) {
                    best = Some((t.order(), c.clone()));
                }
            }
        }
        if let Some((_, c)) = best.filter(|(_, c)| c.is_constant()) {
            if let Ok(inv) = Scalar::one().div(&c) {
                *e = e.scale(&inv);
            }
        }
    }
    OpMatrix::from_rows(p.nder(), k, p.rows().iter().map(|r| r.substitute(&exprs)).collect())
}

/// Name potential `j` after `z^u` when row `u` of `P` is exactly `phi^j`.
fn potential_names(sf: &SpencerForm, p: &OpMatrix) -> Vec<String> {
    (0..p.ncols())
        .map(|j| {
            let unit = Row::jet(Jet::plain(j));
            p.rows()
                .iter()
                .position(|r| *r == unit)
                .map(|u| sf.names[u].clone())
                .unwrap_or_else(|| format!("phi{}", j + 1))
        })
        .collect()
}

/// `X` with `X a = b`, when every row of `b` lies in the row module of `a`.
fn solve_left(a: &OpMatrix, b: &OpMatrix) -> Result<Option<OpMatrix>, JanetError> {
    let sys = JetSystem::from_matrix(a);
    let basis = complete_with(&sys, &CompleteOptions::default())?;
    let t = basis.cofactors().ok_or(JanetError::Untracked)?;
    let mut rows = Vec::new();
    for r in b.rows() {
        let r = match basis.coordinate_change() {
            Some(c) => c.apply_row(r)?,
            None => r.clone(),
        };
        let (nf, s) = basis.normal_form_tracked(&r, true);
        if !nf.is_zero() {
            return Ok(None);
        }
        let mut x = s.expect("tracked").substitute(t);
        if let Some(c) = basis.coordinate_change() {
            x = c.inverse().apply_row(&x)?;
        }
        rows.push(x);
    }
    Ok(Some(OpMatrix::from_rows(a.nder(), a.nrows(), rows)))
}

/// Outcome of stacking a parametrization with constraints on its potentials.
#[derive(Debug)]
pub struct ConstraintCheck {
    pub basis: JanetBasis,
    /// Conditions on the parametrized unknowns, over the rows of `P`.
    pub cc: Vec<Row>,
}

/// `P phi = eta` with `C phi = 0` is compatible exactly when `target eta = 0`.
pub fn constrained_parametrization_check(
    p: &OpMatrix,
    c: &OpMatrix,
    target: &OpMatrix,
) -> Result<ConstraintCheck, PurityError> {
    let stacked = p.stack(c).map_err(JanetError::from)?;
    let basis = complete_with(&JetSystem::from_matrix(&stacked), &CompleteOptions::untracked())?;
    let cc = crate::duality::source_conditions(&stacked, p.nrows())?;
    if !same_module(p.nder(), p.nrows(), &cc, target.rows())? {
        return Err(PurityError::IncompatibleConstraint);
    }
    Ok(ConstraintCheck { basis, cc })
}
