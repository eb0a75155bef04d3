//! Analysis driver, report rendering and the corpus runner.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsl::{self, FieldKind, SystemFile};
use crate::duality::{self, ModuleHandle};
use crate::janet::{self, CcOptions, CompleteOptions, JanetError, JetSystem};
use crate::ore::{matrix_compose, Names};
use crate::purity::{self, Inclusion};

pub const SCHEMA: u32 = 1;

/// Seed used for coordinate changes when none is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Involution,
    Adjoint,
    Cc,
    Torsion,
    Purity,
    Parametrize,
    Resolution,
}

impl Task {
    pub const ALL: [Task; 7] =
        [Task::Involution, Task::Adjoint, Task::Cc, Task::Torsion, Task::Purity, Task::Parametrize, Task::Resolution];

    pub fn name(self) -> &'static str {
        match self {
            Task::Involution => "involution",
            Task::Adjoint => "adjoint",
            Task::Cc => "cc",
            Task::Torsion => "torsion",
            Task::Purity => "purity",
            Task::Parametrize => "parametrize",
            Task::Resolution => "resolution",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Task::ALL.into_iter().find(|t| t.name() == s.trim()).ok_or_else(|| format!("unknown task {:?}", s.trim()))
    }
}

/// Comma-separated task list; the empty string is the empty set.
pub fn parse_tasks(s: &str) -> Result<BTreeSet<Task>, String> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(Task::from_str).collect()
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Overrides the `tasks` line of the file; all tasks when both are absent.
    pub tasks: Option<BTreeSet<Task>>,
    pub seed: Option<u64>,
    /// Completion fails with "order-bound" past this order.
    pub max_order: Option<u32>,
    pub timings: bool,
}

impl Options {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn complete(&self, sys: &JetSystem) -> Result<CompleteOptions, JanetError> {
        let mut o = CompleteOptions::default();
        let s = self.seed();
        o.seeds = (s..s + 5).collect();
        if let Some(max) = self.max_order {
            let q = sys.equations.iter().filter_map(|r| r.order()).max().unwrap_or(0);
            if max < q {
                return Err(JanetError::OrderBound);
            }
            o.max_extra = max - q;
        }
        Ok(o)
    }

    fn tasks_for(&self, f: &SystemFile) -> Result<BTreeSet<Task>, String> {
        if let Some(t) = &self.tasks {
            return Ok(t.clone());
        }
        match &f.tasks {
            Some(t) => t.iter().map(|s| Task::from_str(s)).collect(),
            None => Ok(Task::ALL.into_iter().collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub name: String,
    pub field: String,
    pub unknowns: Vec<String>,
    pub equations: Vec<String>,
    pub seed: u64,
    pub tasks: Vec<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjoint: Option<RowsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cc: Option<RowsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<TorsionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purity: Option<PuritySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parametrization: Option<ParametrizationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
    /// Milliseconds per task; only filled on request since it breaks determinism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvolutionSection {
    pub order: u32,
    pub added: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinate_change: Option<Vec<Vec<String>>>,
    pub equations: Vec<String>,
    pub tabular: Vec<String>,
    /// Number of equations of class `n, n-1, ..., 1`.
    pub class_counts: Vec<usize>,
    pub characters: Vec<u64>,
    pub symbol_dimension: u64,
    pub codim: usize,
    pub rank: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characteristic_radical: Option<String>,
}

/// Operator rows acting on the named unknowns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowsSection {
    pub names: Vec<String>,
    pub rows: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorsionGenerator {
    pub element: String,
    pub annihilator: String,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorsionSection {
    pub verdict: String,
    pub generators: Vec<TorsionGenerator>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationLine {
    pub r: usize,
    pub zero: bool,
    pub strict: bool,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessLine {
    pub element: String,
    pub codim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuritySection {
    pub chain: String,
    pub codim: usize,
    pub filtration: Vec<FiltrationLine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_classes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_torsion_free: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pure: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offending: Vec<WitnessLine>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametrizationSection {
    /// "absolute" or "relative".
    pub kind: String,
    pub potentials: Vec<String>,
    pub rows: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inclusion: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_operators: Option<usize>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionSection {
    pub ranks: Vec<usize>,
    pub euler_poincare: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub task: Task,
    pub error: String,
}

fn show(names: &Names, r: &crate::ore::Row) -> String {
    if names.vars.len() <= 9 {
        names.row_sub(r)
    } else {
        names.row(r)
    }
}

fn numbered(stem: &str, k: usize) -> Vec<String> {
    if k == 1 {
        vec![stem.to_string()]
    } else {
        (1..=k).map(|i| format!("{stem}{i}")).collect()
    }
}

/// Names from a `param key = a, b, c` line when it lists exactly `k` of them.
fn given_names(f: &SystemFile, key: &str, k: usize) -> Option<Vec<String>> {
    let given: Vec<String> =
        f.params.get(key)?.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    (given.len() == k).then_some(given)
}

fn param_names(f: &SystemFile, key: &str, stem: &str, k: usize) -> Vec<String> {
    given_names(f, key, k).unwrap_or_else(|| numbered(stem, k))
}

fn field_decl(f: &SystemFile) -> String {
    let kind = match f.field {
        FieldKind::Rational => "rational",
        FieldKind::Constants => "constants",
    };
    format!("{kind}({})", f.vars.join(","))
}

fn equation_lines(f: &SystemFile) -> Vec<String> {
    let names = f.names();
    let sources = f.source_names();
    f.equations.iter().map(|e| format!("{} = {}", show(&names, &e.lhs), show(&sources, &e.rhs))).collect()
}

fn involution_section(f: &SystemFile, m: &ModuleHandle) -> InvolutionSection {
    let b = m.basis();
    let names = f.names();
    let tabular = b.tabular();
    let n = b.n;
    let class_counts = (1..=n)
        .rev()
        .map(|c| tabular.iter().filter(|t| t.split_whitespace().filter(|s| *s != "•").count() == c).count())
        .collect();
    InvolutionSection {
        order: b.q,
        added: b.added,
        coordinate_change: b
            .coordinate_change()
            .map(|c| c.matrix.iter().map(|row| row.iter().map(|v| v.to_string()).collect()).collect()),
        equations: b.rows().iter().map(|r| show(&names, r)).collect(),
        tabular,
        class_counts,
        characters: b.alpha(),
        symbol_dimension: b.symbol_dimension(0),
        codim: b.codimension(),
        rank: b.differential_rank(),
        characteristic_radical: janet::characteristic_ideal(b).render_radical(),
    }
}

fn adjoint_section(f: &SystemFile, m: &ModuleHandle) -> RowsSection {
    let a = m.presentation();
    let lam = param_names(f, "adjoint", "lambda", a.nrows());
    let names = Names::new(f.vars.clone(), lam.clone());
    RowsSection { names: lam, rows: a.adjoint().rows().iter().map(|r| show(&names, r)).collect() }
}

fn cc_section(f: &SystemFile, m: &ModuleHandle) -> Result<RowsSection, JanetError> {
    if !f.sources.is_empty() {
        let gens = janet::operator_cc(&f.matrix(), &CcOptions::default())?.generators;
        let on = matrix_compose(&gens, &f.source_matrix())?;
        let names = f.source_names();
        let mut rows: Vec<String> = Vec::new();
        for r in on.rows().iter().filter(|r| !r.is_zero()) {
            let s = show(&names, &r.monic()?);
            if !rows.contains(&s) {
                rows.push(s);
            }
        }
        return Ok(RowsSection { names: f.sources.clone(), rows });
    }
    let cc = janet::compatibility_conditions(m.basis());
    let phi = param_names(f, "cc", "Phi", m.basis().len());
    let names = Names::new(f.vars.clone(), phi.clone());
    Ok(RowsSection { names: phi, rows: cc.rows().iter().map(|r| show(&names, r)).collect() })
}

fn torsion_section(f: &SystemFile, m: &ModuleHandle, t: &duality::TorsionReport) -> Result<TorsionSection, JanetError> {
    let names = f.names();
    let mut generators = Vec::new();
    for g in &t.generators {
        generators.push(TorsionGenerator {
            element: show(&names, &g.generator),
            annihilator: names.op(&g.annihilator),
            verified: duality::verify_torsion_element(m, g)?,
        });
    }
    Ok(TorsionSection { verdict: t.verdict.label().to_string(), generators })
}

fn purity_section(f: &SystemFile, m: &ModuleHandle) -> Result<PuritySection, purity::PurityError> {
    let p = purity::purity_test(m)?;
    let names = f.names();
    Ok(PuritySection {
        chain: p.chain(),
        codim: p.codim,
        filtration: p
            .filtration
            .iter()
            .map(|s| FiltrationLine {
                r: s.r,
                zero: s.is_zero,
                strict: s.strict,
                generators: s.generators.iter().map(|g| show(&names, g)).collect(),
            })
            .collect(),
        full_classes: p.full_classes,
        lower_torsion_free: p.lower_torsion_free,
        pure: p.pure,
        offending: p.offending().iter().map(|w| WitnessLine { element: show(&names, &w.element), codim: w.codim }).collect(),
    })
}

fn parametrization_section(
    f: &SystemFile,
    m: &ModuleHandle,
    t: &duality::TorsionReport,
) -> Result<ParametrizationSection, String> {
    let a = m.presentation();
    if let Some(p) = &t.parametrization {
        let potentials = param_names(f, "potentials", "phi", p.ncols());
        let names = Names::new(f.vars.clone(), potentials.clone());
        return Ok(ParametrizationSection {
            kind: "absolute".into(),
            potentials,
            rows: p.rows().iter().map(|r| show(&names, r)).collect(),
            constraints: Vec::new(),
            inclusion: None,
            l_operators: None,
            verified: duality::verify_parametrization(&a, p).map_err(|e| e.to_string())?,
        });
    }
    let rp = purity::relative_parametrization(m, &f.names(), false).map_err(|e| e.to_string())?;
    let potentials = given_names(f, "potentials", rp.potentials.len()).unwrap_or_else(|| rp.potentials.clone());
    let names = Names::new(f.vars.clone(), potentials.clone());
    Ok(ParametrizationSection {
        kind: "relative".into(),
        potentials,
        rows: rp.parametrizing_ops.rows().iter().map(|r| show(&names, r)).collect(),
        constraints: rp.constraints.rows().iter().map(|r| show(&names, r)).collect(),
        inclusion: Some(
            match rp.inclusion {
                Inclusion::Equal => "equal",
                Inclusion::Strict => "strict",
            }
            .into(),
        ),
        l_operators: Some(rp.l_resolution_length().map_err(|e| e.to_string())?),
        verified: rp.verify(&a).map_err(|e| e.to_string())?,
    })
}

/// Run the requested analyses; engine failures land in `diagnostics`, unknown task names are an error.
pub fn run_analysis(f: &SystemFile, opts: &Options) -> Result<Report, String> {
    let tasks = opts.tasks_for(f)?;
    let mut report = Report {
        schema: SCHEMA,
        name: f.name.clone().unwrap_or_default(),
        field: field_decl(f),
        unknowns: f.unknowns.clone(),
        equations: equation_lines(f),
        seed: opts.seed(),
        tasks: tasks.iter().copied().collect(),
        involution: None,
        adjoint: None,
        cc: None,
        torsion: None,
        purity: None,
        parametrization: None,
        resolution: None,
        diagnostics: Vec::new(),
        timings_ms: None,
    };
    if tasks.is_empty() {
        return Ok(report);
    }
    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let module = f.system().and_then(|s| {
        let o = opts.complete(&s)?;
        ModuleHandle::with_options(s, &o)
    });
    timings.insert("completion".to_string(), start.elapsed().as_millis() as u64);
    let m = match module {
        Ok(m) => m,
        Err(e) => {
            let task = *tasks.iter().next().expect("nonempty");
            report.diagnostics.push(Diagnostic { task, error: e.to_string() });
            return Ok(report);
        }
    };
    let mut torsion: Option<Result<duality::TorsionReport, String>> = None;
    for &task in &tasks {
        let start = Instant::now();
        if matches!(task, Task::Torsion | Task::Parametrize) && torsion.is_none() {
            torsion = Some(duality::torsion_test(&m).map_err(|e| e.to_string()));
        }
        let out: Result<(), String> = match task {
            Task::Involution => {
                report.involution = Some(involution_section(f, &m));
                Ok(())
            }
            Task::Adjoint => {
                report.adjoint = Some(adjoint_section(f, &m));
                Ok(())
            }
            Task::Cc => cc_section(f, &m).map(|s| report.cc = Some(s)).map_err(|e| e.to_string()),
            Task::Torsion => match torsion.as_ref().expect("computed") {
                Ok(t) => torsion_section(f, &m, t).map(|s| report.torsion = Some(s)).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            },
            Task::Purity => purity_section(f, &m).map(|s| report.purity = Some(s)).map_err(|e| e.to_string()),
            Task::Parametrize => match torsion.as_ref().expect("computed") {
                Ok(t) => parametrization_section(f, &m, t).map(|s| report.parametrization = Some(s)),
                Err(e) => Err(e.clone()),
            },
            Task::Resolution => m
                .resolution()
                .map(|r| report.resolution = Some(ResolutionSection { ranks: r.ranks.clone(), euler_poincare: r.euler_poincare }))
                .map_err(|e| e.to_string()),
        };
        if let Err(error) = out {
            report.diagnostics.push(Diagnostic { task, error });
        }
        timings.insert(task.name().to_string(), start.elapsed().as_millis() as u64);
    }
    if opts.timings {
        report.timings_ms = Some(timings);
    }
    Ok(report)
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn push_rows(out: &mut String, title: &str, rows: &[String]) {
    out.push_str(&format!("{title}:\n"));
    for r in rows {
        out.push_str(&format!("  {r}\n"));
    }
}

fn flag(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

impl Report {
    /// Plain-text rendering of the same data as [`Report::to_json`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("system {} (schema {})\n", self.name, self.schema));
        out.push_str(&format!("field {}\nunknowns {}\nseed {}\n", self.field, self.unknowns.join(", "), self.seed));
        out.push_str(&format!("tasks {}\n", join(&self.tasks, ", ")));
        push_rows(&mut out, "equations", &self.equations);
        if let Some(s) = &self.involution {
            out.push_str(&format!("\n[involution]\norder {}\nadded {}\n", s.order, s.added));
            if let Some(c) = &s.coordinate_change {
                let rows: Vec<String> = c.iter().map(|r| r.join(" ")).collect();
                out.push_str(&format!("coordinate change {}\n", rows.join("; ")));
            }
            let width = s.equations.iter().map(|e| e.chars().count()).max().unwrap_or(0);
            out.push_str("tabular:\n");
            for (e, t) in s.equations.iter().zip(&s.tabular) {
                out.push_str(&format!("  {e:<width$} | {t}\n"));
            }
            out.push_str(&format!("class counts {}\n", join(&s.class_counts, " ")));
            out.push_str(&format!("characters ({})\n", join(&s.characters, ", ")));
            out.push_str(&format!("symbol dimension {}\ncodim {}\nrank {}\n", s.symbol_dimension, s.codim, s.rank));
            if let Some(r) = &s.characteristic_radical {
                out.push_str(&format!("characteristic radical {r}\n"));
            }
        }
        if let Some(s) = &self.adjoint {
            out.push_str(&format!("\n[adjoint]\nnames {}\n", s.names.join(", ")));
            push_rows(&mut out, "rows", &s.rows);
        }
        if let Some(s) = &self.cc {
            out.push_str(&format!("\n[cc]\nnames {}\n", s.names.join(", ")));
            push_rows(&mut out, "rows", &s.rows);
        }
        if let Some(s) = &self.torsion {
            out.push_str(&format!("\n[torsion]\nverdict {}\n", s.verdict));
            for g in &s.generators {
                out.push_str(&format!(
                    "  generator {} annihilated by {} (verified {})\n",
                    g.element,
                    g.annihilator,
                    flag(g.verified)
                ));
            }
        }
        if let Some(s) = &self.purity {
            out.push_str(&format!("\n[purity]\nchain {}\ncodim {}\n", s.chain, s.codim));
            for l in &s.filtration {
                out.push_str(&format!(
                    "  t{}: zero {}, strict {}, generators [{}]\n",
                    l.r,
                    flag(l.zero),
                    flag(l.strict),
                    l.generators.join(", ")
                ));
            }
            if let Some(c) = s.full_classes {
                out.push_str(&format!("full classes {c}\n"));
            }
            if let Some(b) = s.lower_torsion_free {
                out.push_str(&format!("lower classes torsion-free {}\n", flag(b)));
            }
            match s.pure {
                Some(r) => out.push_str(&format!("pure {r}\n")),
                None => out.push_str("pure none\n"),
            }
            for w in &s.offending {
                out.push_str(&format!("  offending {} of codim {}\n", w.element, w.codim));
            }
        }
        if let Some(s) = &self.parametrization {
            out.push_str(&format!("\n[parametrization]\nkind {}\npotentials {}\n", s.kind, s.potentials.join(", ")));
            push_rows(&mut out, "rows", &s.rows);
            if !s.constraints.is_empty() {
                push_rows(&mut out, "constraints", &s.constraints);
            }
            if let Some(i) = &s.inclusion {
                out.push_str(&format!("inclusion {i}\n"));
            }
            if let Some(l) = s.l_operators {
                out.push_str(&format!("l operators {l}\n"));
            }
            out.push_str(&format!("verified {}\n", flag(s.verified)));
        }
        if let Some(s) = &self.resolution {
            out.push_str(&format!("\n[resolution]\nranks ({})\neuler-poincare {}\n", join(&s.ranks, ", "), s.euler_poincare));
        }
        if !self.diagnostics.is_empty() {
            out.push_str("\n[diagnostics]\n");
            for d in &self.diagnostics {
                out.push_str(&format!("  {}: {}\n", d.task, d.error));
            }
        }
        if let Some(t) = &self.timings_ms {
            out.push_str("\n[timings]\n");
            for (k, v) in t {
                out.push_str(&format!("  {k} {v} ms\n"));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// JSON path of the first difference.
    Mismatch(String),
    Ungolden,
    Invalid(String),
}

impl Outcome {
    pub fn passed(&self) -> bool {
        *self == Outcome::Pass
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Pass => f.write_str("pass"),
            Outcome::Mismatch(at) => write!(f, "FAIL mismatch at {at}"),
            Outcome::Ungolden => f.write_str("FAIL ungolden"),
            Outcome::Invalid(e) => write!(f, "FAIL {e}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub file: String,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Default)]
pub struct CorpusSummary {
    /// Sorted by file name.
    pub entries: Vec<CorpusEntry>,
}

impl CorpusSummary {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.outcome.passed()).count()
    }

    pub fn failed(&self) -> usize {
        self.entries.len() - self.passed()
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed() > 0)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{} {}\n", e.file, e.outcome));
        }
        if self.entries.is_empty() {
            out.push_str("0 run\n");
        } else {
            out.push_str(&format!("{} run, {} passed, {} failed\n", self.entries.len(), self.passed(), self.failed()));
        }
        out
    }
}

/// `dir/ex3_1.pde` has its golden report in `dir/ex3_1.golden.json`.
pub fn golden_path(pde: &Path) -> PathBuf {
    let stem = pde.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    pde.with_file_name(format!("{stem}.golden.json"))
}

fn first_difference(path: &str, a: &serde_json::Value, b: &serde_json::Value) -> Option<String> {
    use serde_json::Value;
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let keys: BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            keys.into_iter().find_map(|k| match (x.get(k), y.get(k)) {
                (Some(u), Some(v)) => first_difference(&format!("{path}.{k}"), u, v),
                _ => Some(format!("{path}.{k}")),
            })
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Some(format!("{path} (length {} vs {})", x.len(), y.len()));
            }
            x.iter().zip(y).enumerate().find_map(|(i, (u, v))| first_difference(&format!("{path}[{i}]"), u, v))
        }
        _ => (a != b).then(|| path.to_string()),
    }
}

/// Analyze one corpus file and compare against its golden report.
pub fn check_file(pde: &Path) -> Outcome {
    let src = match std::fs::read_to_string(pde) {
        Ok(s) => s,
        Err(e) => return Outcome::Invalid(e.to_string()),
    };
    let f = match dsl::parse(&src) {
        Ok(f) => f,
        Err(e) => return Outcome::Invalid(format!("parse error: {e}")),
    };
    let golden: serde_json::Value = match std::fs::read_to_string(golden_path(pde)) {
        Ok(g) => match serde_json::from_str(&g) {
            Ok(v) => v,
            Err(e) => return Outcome::Invalid(format!("bad golden: {e}")),
        },
        Err(_) => return Outcome::Ungolden,
    };
    let report = match run_analysis(&f, &Options::default()) {
        Ok(r) => r,
        Err(e) => return Outcome::Invalid(e),
    };
    let got = serde_json::to_value(&report).expect("report serializes");
    match first_difference("$", &golden, &got) {
        None => Outcome::Pass,
        Some(at) => Outcome::Mismatch(at),
    }
}

/// Run every `.pde` file in `dir` against its golden report.
pub fn corpus_run(dir: &Path) -> std::io::Result<CorpusSummary> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pde"))
        .collect();
    files.sort();
    let entries = files
        .par_iter()
        .map(|p| CorpusEntry {
            file: p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            outcome: check_file(p),
        })
        .collect();
    Ok(CorpusSummary { entries })
}
