//! First-order (Spencer) forms of involutive systems and their reduction.

use std::collections::BTreeMap;

use crate::coefficients::Scalar;
use crate::janet::{complete_with, CompleteOptions, CoordChange, JanetBasis, JanetError, JetSystem};
use crate::ore::{Jet, MultiIndex, Names, Row};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpencerError {
    #[error("zero-order-equation")]
    ZeroOrderEquation,
    #[error(transparent)]
    Janet(#[from] JanetError),
}

/// A first-order involutive system in new unknowns `z^j`, each standing for a jet of the original unknowns.
#[derive(Debug, Clone)]
pub struct SpencerForm {
    pub basis: JanetBasis,
    /// `dictionary[j]` is the original jet represented by `z^j`.
    pub dictionary: Vec<Jet>,
    pub names: Vec<String>,
    /// Number of unknowns solved in the top class.
    pub beta: usize,
    /// `(k, old)`: after reduction `z^k` stands for the expression `old` in the previous unknowns.
    pub substitutions: Vec<(usize, Row)>,
}

impl SpencerForm {
    pub fn n(&self) -> usize {
        self.basis.n
    }

    pub fn m(&self) -> usize {
        self.dictionary.len()
    }

    pub fn display_names(&self, vars: &[String]) -> Names {
        Names::new(vars.to_vec(), self.names.clone())
    }

    pub fn coordinate_change(&self) -> Option<&CoordChange> {
        self.basis.coordinate_change()
    }

    /// `z^j = y^k_mu` lines.
    pub fn render_dictionary(&self, original: &Names) -> Vec<String> {
        self.dictionary.iter().zip(&self.names).map(|(j, z)| format!("{z} = {}", original.jet_sub(j))).collect()
    }

    /// Row indices grouped by zero-based class, top class first.
    pub fn rows_of_class(&self, c: usize) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| self.basis.class(i) == Some(c)).collect()
    }

    /// Number of full classes counted from the top.
    pub fn full_classes(&self) -> usize {
        self.basis.codimension()
    }

    /// Express a row over `z` in the original jets.
    pub fn to_original(&self, r: &Row) -> Row {
        let exprs: Vec<Row> = self.dictionary.iter().map(|j| Row::jet(j.clone())).collect();
        r.substitute(&exprs)
    }
}

fn z_names(dictionary: &[Jet], original: &Names) -> Vec<String> {
    let identity = dictionary.len() == original.unknowns.len()
        && dictionary.iter().enumerate().all(|(k, j)| j.unknown == k && j.mu.is_zero());
    if identity {
        original.unknowns.clone()
    } else {
        (1..=dictionary.len()).map(|i| format!("z{i}")).collect()
    }
}

/// Equivalent first-order involutive system in the parametric jets of order below `q`.
pub fn first_order_form(basis: &JanetBasis, original: &Names) -> Result<SpencerForm, SpencerError> {
    let n = basis.n;
    let q = basis.q.max(1);
    let mut dictionary: Vec<Jet> = MultiIndex::all_up_to(n, q - 1)
        .into_iter()
        .flat_map(|mu| (0..basis.m).map(move |k| Jet::new(k, mu.clone())))
        .filter(|j| !basis.is_principal(j))
        .collect();
    dictionary.sort_by(|a, b| {
        (a.order(), a.unknown, a.mu.axes()).cmp(&(b.order(), b.unknown, b.mu.axes()))
    });
    let index: BTreeMap<Jet, usize> = dictionary.iter().enumerate().map(|(i, j)| (j.clone(), i)).collect();
    let convert = |r: &Row| -> Row {
        let mut out = Row::zero();
        for (j, c) in r.terms() {
            if let Some(&z) = index.get(j) {
                out.add_term(Jet::plain(z), c.clone());
            } else {
                // parametric jet of order q: d_c of a parametric jet of order q - 1
                let c0 = j.mu.class().expect("positive order");
                let base = Jet::new(j.unknown, j.mu.minus(c0).expect("class axis"));
                let z = index[&base];
                out.add_term(Jet::new(z, MultiIndex::unit(c0)), c.clone());
            }
        }
        out
    };
    let mut equations = Vec::new();
    for (z, j) in dictionary.iter().enumerate() {
        for i in 0..n {
            let target = basis.normal_form(&Row::jet(j.plus(i)));
            let mut eq = Row::jet(Jet::new(z, MultiIndex::unit(i)));
            eq.axpy(&Scalar::from_int(-1), &convert(&target));
            if !eq.is_zero() {
                equations.push(eq);
            }
        }
    }
    let mut sys = JetSystem::new(n, dictionary.len(), equations);
    sys.coordinate_change = basis.coordinate_change().cloned();
    let fb = complete_with(&sys, &CompleteOptions { auto_change: false, ..CompleteOptions::untracked() })?;
    let beta = fb.beta().last().copied().unwrap_or(0) as usize;
    let names = z_names(&dictionary, original);
    Ok(SpencerForm { basis: fb, dictionary, names, beta, substitutions: Vec::new() })
}

/// Absorb top-class derivatives of the unsolved unknowns into the solved ones.
pub fn reduce_spencer(sf: &SpencerForm) -> Result<SpencerForm, SpencerError> {
    let b = &sf.basis;
    if b.rows().iter().any(|r| r.order() == Some(0)) {
        return Err(SpencerError::ZeroOrderEquation);
    }
    let n = b.n;
    let top = n - 1;
    let solved: Vec<usize> = sf.rows_of_class(top).into_iter().map(|i| b.leader(i).unknown).collect();
    let mut rows: Vec<Row> = b.rows().to_vec();
    let mut substitutions = sf.substitutions.clone();
    loop {
        let mut step: Option<(usize, Row)> = None;
        for r in &rows {
            let Some(l) = r.leader() else { continue };
            if l.order() != 1 || l.mu.class() != Some(top) || !solved.contains(&l.unknown) {
                continue;
            }
            let lead = r.coeff(l).expect("leader").clone();
            let mut shift = Row::zero();
            for (j, c) in r.terms() {
                if j.mu == MultiIndex::unit(top) && !solved.contains(&j.unknown) {
                    shift.add_term(Jet::plain(j.unknown), c.div(&lead).map_err(JanetError::from)?);
                }
            }
            if !shift.is_zero() {
                step = Some((l.unknown, shift));
                break;
            }
        }
        let Some((k, shift)) = step else { break };
        // new z^k = z^k + shift, so old z^k = new z^k - shift
        let m = sf.m();
        let mut exprs: Vec<Row> = (0..m).map(|u| Row::jet(Jet::plain(u))).collect();
        exprs[k] = &exprs[k] - &shift;
        rows = rows.iter().map(|r| r.substitute(&exprs)).collect();
        let mut old = Row::jet(Jet::plain(k));
        old.axpy(&Scalar::one(), &shift);
        substitutions.push((k, old));
    }
    let mut sys = JetSystem::new(n, sf.m(), rows);
    sys.coordinate_change = b.coordinate_change().cloned();
    let basis = complete_with(&sys, &CompleteOptions { auto_change: false, ..CompleteOptions::untracked() })?;
    Ok(SpencerForm { basis, dictionary: sf.dictionary.clone(), names: sf.names.clone(), beta: solved.len(), substitutions })
}

/// True when the classes below the top are free of the unsolved unknowns and
/// the top class holds them only under lower derivations.
pub fn is_reduced(sf: &SpencerForm) -> bool {
    let b = &sf.basis;
    let top = b.n - 1;
    let solved: Vec<usize> = sf.rows_of_class(top).into_iter().map(|i| b.leader(i).unknown).collect();
    (0..b.len()).all(|i| {
        let r = &b.rows()[i];
        match b.class(i) {
            Some(c) if c == top => r
                .terms()
                .all(|(j, _)| solved.contains(&j.unknown) || j.mu != MultiIndex::unit(top)),
            _ => r.terms().all(|(j, _)| solved.contains(&j.unknown)),
        }
    })
}

/// The equations of the `n - r` lowest classes, as a system over the first `n - r` derivations.
pub fn subsystem_by_classes(sf: &SpencerForm, r: usize) -> JetSystem {
    let b = &sf.basis;
    let keep = b.n - r;
    let rows: Vec<Row> =
        (0..b.len()).filter(|&i| matches!(b.class(i), Some(c) if c < keep)).map(|i| b.rows()[i].clone()).collect();
    if r == 0 {
        return JetSystem::new(b.n, sf.m(), b.rows().to_vec());
    }
    JetSystem::new(keep, sf.m(), rows)
}
