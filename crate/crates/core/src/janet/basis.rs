use std::collections::HashMap;
use std::sync::Mutex;

use crate::coefficients::Scalar;
use crate::ore::{binomial, Jet, MultiIndex, Names, OpMatrix, Row};

use super::coords::CoordChange;
use super::echelon::{Echelon, TRow};
use super::JanetError;

/// A linear system `Phi^tau = 0` of order at most `q` in `m` unknowns over `n` derivations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSystem {
    pub n: usize,
    pub m: usize,
    pub q: u32,
    pub equations: Vec<Row>,
    pub coordinate_change: Option<CoordChange>,
}

impl JetSystem {
    pub fn new(n: usize, m: usize, equations: Vec<Row>) -> Self {
        let q = equations.iter().filter_map(Row::order).max().unwrap_or(0);
        JetSystem { n, m, q, equations, coordinate_change: None }
    }

    pub fn with_order(mut self, q: u32) -> Self {
        self.q = self.q.max(q);
        self
    }

    pub fn from_matrix(a: &OpMatrix) -> Self {
        JetSystem::new(a.nder(), a.ncols(), a.rows().to_vec())
    }

    pub fn as_matrix(&self) -> OpMatrix {
        OpMatrix::from_rows(self.n, self.m, self.equations.clone())
    }

    /// Rewrite the system in the coordinates `x = A x'`.
    pub fn change_coordinates_by(&self, c: &CoordChange) -> Result<JetSystem, JanetError> {
        let equations = self.equations.iter().map(|r| c.apply_row(r)).collect::<Result<Vec<_>, _>>()?;
        let change = match &self.coordinate_change {
            Some(prev) => prev.then(c),
            None => c.clone(),
        };
        Ok(JetSystem { n: self.n, m: self.m, q: self.q, equations, coordinate_change: Some(change) })
    }
}

/// Seeded generic linear change of the independent variables.
pub fn change_coordinates(sys: &JetSystem, seed: u64) -> Result<JetSystem, JanetError> {
    sys.change_coordinates_by(&CoordChange::seeded(sys.n, seed))
}

/// `dim J_q` for `m` unknowns in `n` variables.
pub fn jet_dimension(n: usize, m: usize, q: u32) -> u64 {
    m as u64 * binomial(n as u64 + q as u64, q as u64)
}

/// Number of order-`q` jets of one unknown whose class is `i` (zero-based).
pub(crate) fn class_count(n: usize, q: u32, i: usize) -> u64 {
    if q == 0 {
        return u64::from(i + 1 == n);
    }
    let free = (n - i - 1) as u64;
    binomial(q as u64 - 1 + free, free)
}

#[derive(Clone, Debug)]
pub struct CompleteOptions {
    /// Completion fails with "order-bound" beyond `q + max_extra`.
    pub max_extra: u32,
    pub track: bool,
    pub seeds: Vec<u64>,
    pub auto_change: bool,
}

impl Default for CompleteOptions {
    fn default() -> Self {
        CompleteOptions { max_extra: 10, track: true, seeds: (1..=5).collect(), auto_change: true }
    }
}

impl CompleteOptions {
    pub fn untracked() -> Self {
        CompleteOptions { track: false, ..Default::default() }
    }
}

/// Involutive basis of a system at order `q`.
#[derive(Debug)]
pub struct JanetBasis {
    pub n: usize,
    pub m: usize,
    pub q: u32,
    rows: Vec<Row>,
    cofactors: Option<Vec<Row>>,
    input: JetSystem,
    index: HashMap<Jet, usize>,
    prolongations: Mutex<HashMap<(usize, MultiIndex), Row>>,
    /// Number of equations added by the projection step before the symbol test.
    pub added: usize,
}

impl Clone for JanetBasis {
    fn clone(&self) -> Self {
        JanetBasis {
            n: self.n,
            m: self.m,
            q: self.q,
            rows: self.rows.clone(),
            cofactors: self.cofactors.clone(),
            input: self.input.clone(),
            index: self.index.clone(),
            prolongations: Mutex::new(HashMap::new()),
            added: self.added,
        }
    }
}

fn prolong_to(gens: &[TRow], q: u32, n: usize) -> Result<Echelon, JanetError> {
    let mut e = Echelon::new();
    for g in gens {
        let o = g.row.order().unwrap_or(0);
        // d_lambda g for |lambda| <= q - o, lambda built with non-decreasing axes
        let mut layer: Vec<(TRow, usize)> = vec![(g.clone(), 0)];
        for _ in o..=q {
            let mut next = Vec::new();
            for (r, last) in &layer {
                if r.row.order().unwrap_or(0) < q {
                    for i in *last..n {
                        next.push((r.prolong(i), i));
                    }
                }
                e.insert(r.clone())?;
            }
            layer = next;
            if layer.is_empty() {
                break;
            }
        }
    }
    Ok(e)
}

fn prolong_once(e: &Echelon, n: usize) -> Result<Echelon, JanetError> {
    let mut out = e.clone();
    for r in e.rows() {
        for i in 0..n {
            out.insert(r.prolong(i))?;
        }
    }
    Ok(out)
}

fn beta_of(e: &Echelon, n: usize, q: u32) -> Vec<u64> {
    let mut beta = vec![0u64; n];
    for j in e.leaders() {
        if j.order() == q {
            let c = if q == 0 { n - 1 } else { j.mu.class().expect("positive order") };
            beta[c] += 1;
        }
    }
    beta
}

fn symbol_ok(e: &Echelon, e1: &Echelon, n: usize, m: usize, q: u32) -> bool {
    let beta = beta_of(e, n, q);
    let mut expected: i64 = 0;
    for (i, &b) in beta.iter().enumerate() {
        let alpha = m as i64 * class_count(n, q, i) as i64 - b as i64;
        expected += (i as i64 + 1) * alpha;
    }
    let top = e1.leaders().filter(|j| j.order() == q + 1).count() as i64;
    let dim_g1 = m as i64 * binomial(n as u64 + q as u64, q as u64 + 1) as i64 - top;
    expected == dim_g1
}

/// Transpositions `x1 <-> xk` (farthest first), then the other transpositions, then seeded changes.
fn candidate_changes(n: usize, seeds: &[u64]) -> Vec<CoordChange> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1..n).rev() {
            out.push(CoordChange::swap(n, a, b));
        }
    }
    out.extend(seeds.iter().map(|&s| CoordChange::seeded(n, s)));
    out
}

/// Complete a system to an involutive basis.
pub fn complete_to_involution(sys: &JetSystem) -> Result<JanetBasis, JanetError> {
    complete_with(sys, &CompleteOptions::default())
}

pub fn complete_with(sys: &JetSystem, opts: &CompleteOptions) -> Result<JanetBasis, JanetError> {
    let n = sys.n;
    let m = sys.m;
    let mut input = sys.clone();
    let q0 = sys.q.max(sys.equations.iter().filter_map(Row::order).max().unwrap_or(0));
    let mut q = q0;
    let mut gens: Vec<TRow> = input
        .equations
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(t, r)| TRow::generator(r.clone(), t, opts.track))
        .collect();
    let mut tried_change = false;
    let mut added = 0usize;
    let mut first_rank: Option<usize> = None;
    loop {
        if q > q0 + opts.max_extra {
            return Err(if tried_change { JanetError::NotDeltaRegular } else { JanetError::OrderBound });
        }
        let eq = prolong_to(&gens, q, n)?;
        let e1 = prolong_once(&eq, n)?;
        let proj: Vec<TRow> = e1.rows().filter(|r| r.row.order().unwrap_or(0) <= q).cloned().collect();
        if first_rank.is_none() {
            first_rank = Some(eq.len());
        }
        if proj.len() > eq.len() {
            if q == q0 {
                added = proj.len() - first_rank.unwrap_or(0);
            }
            gens = proj;
            continue;
        }
        if symbol_ok(&eq, &e1, n, m, q) {
            return Ok(JanetBasis::build(input, n, m, q, eq, added));
        }
        let mut adopted = false;
        if opts.auto_change && input.coordinate_change.is_none() && n > 1 {
            tried_change = true;
            for c in candidate_changes(n, &opts.seeds) {
                let mut moved = Vec::new();
                for r in eq.rows() {
                    let row = c.apply_row(&r.row)?;
                    let cof = match &r.cof {
                        Some(cf) => Some(c.apply_row(cf)?),
                        None => None,
                    };
                    moved.push(TRow::new(row, cof));
                }
                let eqc = Echelon::from_rows(moved)?;
                let e1c = prolong_once(&eqc, n)?;
                if symbol_ok(&eqc, &e1c, n, m, q) {
                    input = input.change_coordinates_by(&c)?;
                    gens = eqc.into_rows();
                    adopted = true;
                    break;
                }
            }
        }
        if !adopted {
            gens = eq.into_rows();
            q += 1;
        }
    }
}

impl JanetBasis {
    fn build(input: JetSystem, n: usize, m: usize, q: u32, e: Echelon, added: usize) -> JanetBasis {
        let mut trows: Vec<TRow> = e.into_rows();
        trows.reverse();
        let track = trows.iter().all(|r| r.cof.is_some());
        let rows: Vec<Row> = trows.iter().map(|r| r.row.clone()).collect();
        let cofactors = track.then(|| trows.into_iter().map(|r| r.cof.expect("tracked")).collect());
        let index = rows.iter().enumerate().map(|(i, r)| (r.leader().expect("nonzero").clone(), i)).collect();
        JanetBasis { n, m, q, rows, cofactors, input, index, prolongations: Mutex::new(HashMap::new()), added }
    }

    /// Build directly from rows already known to form an echelon basis at order `q`.
    pub fn from_rows_unchecked(input: JetSystem, q: u32, rows: Vec<Row>) -> Result<JanetBasis, JanetError> {
        let e = Echelon::from_rows(rows.into_iter().map(|r| TRow::new(r, None)))?;
        let (n, m) = (input.n, input.m);
        Ok(JanetBasis::build(input, n, m, q, e, 0))
    }

    /// Basis rows sorted by descending leader.
    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Cofactors over the input equations: `rows[i] = cofactors[i] . input`.
    pub fn cofactors(&self) -> Option<&[Row]> {
        self.cofactors.as_deref()
    }

    /// The input system in the basis' coordinates.
    pub fn input(&self) -> &JetSystem {
        &self.input
    }

    pub fn coordinate_change(&self) -> Option<&CoordChange> {
        self.input.coordinate_change.as_ref()
    }

    pub fn as_matrix(&self) -> OpMatrix {
        OpMatrix::from_rows(self.n, self.m, self.rows.clone())
    }

    pub fn leader(&self, i: usize) -> &Jet {
        self.rows[i].leader().expect("nonzero")
    }

    pub fn is_principal(&self, j: &Jet) -> bool {
        self.reducer(j).is_some()
    }

    /// Zero-based class of row `i`; `None` for rows of order below `q`.
    pub fn class(&self, i: usize) -> Option<usize> {
        let l = self.leader(i);
        if l.order() < self.q {
            None
        } else if self.q == 0 {
            Some(self.n - 1)
        } else {
            l.mu.class()
        }
    }

    /// Zero-based multiplicative axes of row `i`.
    pub fn multiplicative(&self, i: usize) -> Vec<usize> {
        match self.class(i) {
            Some(c) => (0..=c).collect(),
            None => Vec::new(),
        }
    }

    pub fn non_multiplicative(&self, i: usize) -> Vec<usize> {
        match self.class(i) {
            Some(c) => (c + 1..self.n).collect(),
            None => (0..self.n).collect(),
        }
    }

    /// `beta^i_q` indexed by zero-based class.
    pub fn beta(&self) -> Vec<u64> {
        let mut beta = vec![0u64; self.n];
        for i in 0..self.rows.len() {
            if let Some(c) = self.class(i) {
                beta[c] += 1;
            }
        }
        beta
    }

    /// Cartan characters `alpha^i_q` indexed by zero-based class.
    pub fn alpha(&self) -> Vec<u64> {
        self.beta()
            .iter()
            .enumerate()
            .map(|(i, &b)| self.m as u64 * class_count(self.n, self.q, i) - b)
            .collect()
    }

    /// `dim g_{q+r}` from the characters.
    pub fn symbol_dimension(&self, r: u32) -> u64 {
        self.alpha()
            .iter()
            .enumerate()
            .map(|(i, &a)| binomial(r as u64 + i as u64, r as u64) * a)
            .sum()
    }

    /// Parametric jets of order below `q`.
    pub fn parametric_below_q(&self) -> Vec<Jet> {
        if self.q == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for mu in MultiIndex::all_up_to(self.n, self.q - 1) {
            for k in 0..self.m {
                let j = Jet::new(k, mu.clone());
                if !self.index.contains_key(&j) {
                    out.push(j);
                }
            }
        }
        out.sort();
        out
    }

    /// `dim R_{q+r}`.
    pub fn hilbert_function(&self, r: u32) -> u64 {
        self.parametric_below_q().len() as u64 + (0..=r).map(|s| self.symbol_dimension(s)).sum::<u64>()
    }

    /// Number of zero characters, i.e. the codimension of the characteristic set.
    pub fn codimension(&self) -> usize {
        let a = self.alpha();
        a.iter().rev().take_while(|&&x| x == 0).count()
    }

    /// The differential rank `alpha^n_q`.
    pub fn differential_rank(&self) -> u64 {
        self.alpha().last().copied().unwrap_or(self.m as u64)
    }

    /// Involutive reducer of a jet: a basis row and a multiplicative prolongation.
    pub fn reducer(&self, j: &Jet) -> Option<(usize, MultiIndex)> {
        let o = j.order();
        if o <= self.q {
            return self.index.get(j).map(|&i| (i, MultiIndex::zero()));
        }
        let mut excess = o - self.q;
        let mut mu = j.mu.exponents().to_vec();
        let mut lambda = vec![0u32; mu.len()];
        for i in 0..mu.len() {
            if excess == 0 {
                break;
            }
            let t = mu[i].min(excess);
            mu[i] -= t;
            lambda[i] += t;
            excess -= t;
        }
        let key = Jet::new(j.unknown, MultiIndex::from_exponents(mu));
        let &i = self.index.get(&key)?;
        Some((i, MultiIndex::from_exponents(lambda)))
    }

    /// `d_lambda` applied to basis row `i`, cached.
    pub fn prolongation(&self, i: usize, lambda: &MultiIndex) -> Row {
        if lambda.is_zero() {
            return self.rows[i].clone();
        }
        let key = (i, lambda.clone());
        if let Some(r) = self.prolongations.lock().expect("cache").get(&key) {
            return r.clone();
        }
        let axes = lambda.axes();
        let prev = MultiIndex::from_axes(&axes[..axes.len() - 1]);
        let r = self.prolongation(i, &prev).prolong(*axes.last().expect("nonempty"));
        self.prolongations.lock().expect("cache").insert(key, r.clone());
        r
    }

    pub fn normal_form(&self, r: &Row) -> Row {
        self.normal_form_tracked(r, false).0
    }

    /// Reduce to parametric jets; the second component (when requested)
    /// expresses `r - NF(r)` as a row over basis indices.
    pub fn normal_form_tracked(&self, r: &Row, track: bool) -> (Row, Option<Row>) {
        let mut cur = r.clone();
        let mut cof = track.then(Row::zero);
        let mut bound: Option<Jet> = None;
        loop {
            let hit = {
                let mut it: Box<dyn Iterator<Item = (&Jet, &Scalar)>> = match &bound {
                    Some(b) => Box::new(cur.terms_below(b).rev()),
                    None => Box::new(cur.terms().rev()),
                };
                it.find_map(|(j, c)| self.reducer(j).map(|red| (j.clone(), c.clone(), red)))
            };
            let Some((j, c, (i, lambda))) = hit else { break };
            let p = self.prolongation(i, &lambda);
            cur.axpy(&-&c, &p);
            if let Some(cf) = cof.as_mut() {
                cf.add_term(Jet::new(i, lambda), c);
            }
            bound = Some(j);
        }
        (cur, cof)
    }

    /// Check the involution criterion directly.
    pub fn verify_involution(&self) -> bool {
        (0..self.rows.len()).all(|i| {
            self.non_multiplicative(i)
                .into_iter()
                .all(|a| self.normal_form(&self.rows[i].prolong(a)).is_zero())
        })
    }

    /// Rows with digits for multiplicative axes and `•` otherwise.
    pub fn tabular(&self) -> Vec<String> {
        (0..self.rows.len())
            .map(|i| {
                let mult = self.multiplicative(i);
                (0..self.n)
                    .map(|a| if mult.contains(&a) { (a + 1).to_string() } else { "•".to_string() })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    pub fn render_rows(&self, names: &Names) -> Vec<String> {
        self.rows.iter().map(|r| names.row_sub(r)).collect()
    }
}
