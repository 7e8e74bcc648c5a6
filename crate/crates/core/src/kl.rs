//! KL, the lazy Krivine machine for weak call-by-need on closed terms, and
//! its lockstep comparison with the weak prefix of RKNL.
//!
//! KL works on terms with actual substitution. A β-step renames the bound
//! variable to a fresh store name and records the argument in the store:
//!
//! | rule | configuration | becomes |
//! |------|---------------|---------|
//! | 1 | eval `t1 t2`, `E` | eval `t1`, `(□ t2) E` |
//! | 2 | eval `λx.t`, `E` | cont `λx.t`, `E` |
//! | 3 | eval `x`, `σ(x)` a thunk `t` | eval `t`, `(x := □) E` |
//! | 4 | eval `x`, `σ(x)` a value `v` | cont `v`, `E` |
//! | 5 | cont `v`, `(x := □) E` | cont `v`, `E`, with `σ[x ↦ v]` |
//! | 6 | cont `λx.t`, `(□ t2) E` | eval `t{x := x'}`, `E`, with `σ[x' = t2]` |
//!
//! Store names are location identifiers (`#n`), numbered with the same
//! counter RKNL uses for its locations, so a translated RKNL configuration
//! and the matching KL configuration are literally equal.
//!
//! By default a cell is a thunk until rule 5 overwrites it, whatever the
//! shape of the stored term. [`KlOptions::literal_guard`] instead sends
//! every stored abstraction through rule 4, which skips the evaluate and
//! write-back round trip that RKNL always performs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::machine::{
    Closure, Config, Env, Frame, LocKind, Location, Machine, MachineError, MachineOptions, Mode, Step, Storable,
    StoreView, TraceRecord, Value,
};
use crate::term::{Ident, Node, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KlCell {
    Thunk(Term),
    Value(Term),
}

impl KlCell {
    pub fn term(&self) -> &Term {
        match self {
            KlCell::Thunk(t) | KlCell::Value(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KlFrame {
    /// `□ t`
    Arg(Term),
    /// `#n := □`
    Cache(usize),
}

impl fmt::Display for KlFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KlFrame::Arg(t) => write!(f, "□ ({t})"),
            KlFrame::Cache(n) => write!(f, "#{n} := □"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KlMode {
    Eval(Term),
    /// Always an abstraction.
    Cont(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KlConfig {
    pub mode: KlMode,
    /// Bottom frame first.
    pub stack: Vec<KlFrame>,
    pub store: BTreeMap<usize, KlCell>,
}

impl fmt::Display for KlConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mode {
            KlMode::Eval(t) => write!(f, "eval {t}")?,
            KlMode::Cont(t) => write!(f, "cont {t}")?,
        }
        write!(f, " | ")?;
        for fr in self.stack.iter().rev() {
            write!(f, "{fr} · ")?;
        }
        write!(f, "□ | ")?;
        let cells: Vec<String> = self
            .store
            .iter()
            .map(|(n, c)| match c {
                KlCell::Thunk(t) => format!("#{n}=({t})"),
                KlCell::Value(t) => format!("#{n}↦({t})"),
            })
            .collect();
        write!(f, "[{}]", cells.join(", "))
    }
}

/// `t ↦ eval t, □, ε`
pub fn kl_load(t: &Term) -> KlConfig {
    KlConfig { mode: KlMode::Eval(t.clone()), stack: Vec::new(), store: BTreeMap::new() }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KlOptions {
    /// Decide between rules 3 and 4 by whether the stored term is an
    /// abstraction, rather than by whether the cell was written back.
    pub literal_guard: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KlError {
    #[error("free variable {0} reached; KL only evaluates closed terms")]
    StuckOpen(Ident),
    #[error("substituting {fresh} for {var} would be captured by a binder")]
    Capture { var: Ident, fresh: Ident },
    #[error("not a weak configuration: {0}")]
    NotWeak(String),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KlStep {
    /// `changed` is the store cell allocated or written, if any.
    Moved { rule: u8, changed: Option<usize> },
    Answer(Term),
}

pub struct KlMachine {
    opts: KlOptions,
    config: KlConfig,
    next_loc: usize,
    steps: u64,
}

impl KlMachine {
    pub fn new(t: &Term, opts: KlOptions) -> Self {
        KlMachine { opts, config: kl_load(t), next_loc: 0, steps: 0 }
    }

    pub fn config(&self) -> &KlConfig {
        &self.config
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// A trace line for the current configuration, reached by `rule`.
    pub fn record(&self, rule: u8) -> TraceRecord {
        let (mode, focus) = match &self.config.mode {
            KlMode::Eval(t) => ("eval", t),
            KlMode::Cont(t) => ("cont", t),
        };
        TraceRecord {
            step: self.steps,
            rule,
            mode,
            focus: focus.to_string(),
            stack_depth: self.config.stack.len(),
            store_size: self.config.store.len(),
        }
    }

    pub fn step(&mut self) -> Result<KlStep, KlError> {
        let k = &mut self.config;
        let (rule, changed) = match std::mem::replace(&mut k.mode, KlMode::Cont(Term::var(Ident::source("_")))) {
            KlMode::Eval(t) => match t.node() {
                Node::App(t1, t2) => {
                    k.stack.push(KlFrame::Arg(t2.clone()));
                    k.mode = KlMode::Eval(t1.clone());
                    (1, None)
                }
                Node::Lam(..) => {
                    // keeps the store names in step with RKNL's locations,
                    // which spend one on every annotation
                    self.next_loc += 1;
                    k.mode = KlMode::Cont(t);
                    (2, None)
                }
                Node::Var(x) => {
                    let Some((n, cell)) = x.location_id().and_then(|n| Some((n, k.store.get(&n)?))) else {
                        k.mode = KlMode::Eval(t.clone());
                        return Err(KlError::StuckOpen(x.clone()));
                    };
                    let thunk = match cell {
                        KlCell::Thunk(s) => !(self.opts.literal_guard && s.is_lam()),
                        KlCell::Value(_) => false,
                    };
                    if thunk {
                        k.mode = KlMode::Eval(cell.term().clone());
                        k.stack.push(KlFrame::Cache(n));
                        (3, None)
                    } else {
                        k.mode = KlMode::Cont(cell.term().clone());
                        (4, None)
                    }
                }
            },
            KlMode::Cont(v) => match k.stack.pop() {
                None => {
                    k.mode = KlMode::Cont(v.clone());
                    return Ok(KlStep::Answer(v));
                }
                Some(KlFrame::Cache(n)) => {
                    k.store.insert(n, KlCell::Value(v.clone()));
                    k.mode = KlMode::Cont(v);
                    (5, Some(n))
                }
                Some(KlFrame::Arg(t2)) => {
                    let Node::Lam(x, body) = v.node() else {
                        return Err(KlError::NotWeak(format!("continuing with non-abstraction {v}")));
                    };
                    let n = self.next_loc;
                    self.next_loc += 1;
                    let fresh = Term::var(Ident::location(n));
                    k.store.insert(n, KlCell::Thunk(t2));
                    k.mode = KlMode::Eval(rename_free(body, x, &fresh)?.unwrap_or_else(|| body.clone()));
                    (6, Some(n))
                }
            },
        };
        self.steps += 1;
        Ok(KlStep::Moved { rule, changed })
    }
}

/// `t{x := y}` for a store name `y`, or `None` if `x` is not free in `t`.
/// Fails rather than renames if a binder would capture `y`.
fn rename_free(t: &Term, x: &Ident, y: &Term) -> Result<Option<Term>, KlError> {
    Ok(match t.node() {
        Node::Var(z) => (z == x).then(|| y.clone()),
        Node::App(a, b) => match (rename_free(a, x, y)?, rename_free(b, x, y)?) {
            (None, None) => None,
            (a2, b2) => Some(Term::app(a2.unwrap_or_else(|| a.clone()), b2.unwrap_or_else(|| b.clone()))),
        },
        Node::Lam(z, _) if z == x => None,
        Node::Lam(z, body) => {
            let out = rename_free(body, x, y)?;
            if out.is_some() && y.has_free(z) {
                let Node::Var(fresh) = y.node() else { unreachable!() };
                return Err(KlError::Capture { var: x.clone(), fresh: fresh.clone() });
            }
            out.map(|b| Term::lam(z.clone(), b))
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KlOutcome {
    Answer(Term),
    FuelExhausted,
}

#[derive(Debug, Clone)]
pub struct KlRun {
    pub outcome: KlOutcome,
    pub rules: Vec<u8>,
    pub config: KlConfig,
}

impl KlRun {
    pub fn steps(&self) -> u64 {
        self.rules.len() as u64
    }

    pub fn beta_steps(&self) -> u64 {
        self.rules.iter().filter(|&&r| r == 6).count() as u64
    }
}

/// Run KL on a closed term for at most `fuel` transitions.
pub fn kl_run(t: &Term, opts: KlOptions, fuel: u64) -> Result<KlRun, KlError> {
    let mut m = KlMachine::new(t, opts);
    let mut rules = Vec::new();
    let outcome = loop {
        if m.steps() == fuel {
            if matches!(m.config.mode, KlMode::Cont(_)) && m.config.stack.is_empty() {
                let KlMode::Cont(v) = &m.config.mode else { unreachable!() };
                break KlOutcome::Answer(v.clone());
            }
            break KlOutcome::FuelExhausted;
        }
        match m.step()? {
            KlStep::Answer(v) => break KlOutcome::Answer(v),
            KlStep::Moved { rule, .. } => rules.push(rule),
        }
    };
    Ok(KlRun { outcome, rules, config: m.config })
}

/// Translates the parts of a weak RKNL configuration.
///
/// A variable bound in the environment becomes the name of its location;
/// one bound by an abstraction inside the closure stays itself.
pub fn translate_closure(c: &Closure) -> Result<Term, KlError> {
    fn go(t: &Term, env: &Env, bound: &mut Vec<Ident>) -> Result<Term, KlError> {
        match t.node() {
            Node::Var(x) => {
                if bound.contains(x) {
                    Ok(t.clone())
                } else if let Some(loc) = env.get(x) {
                    Ok(Term::var(Ident::location(loc.id)))
                } else {
                    Err(KlError::NotWeak(format!("free variable {x}")))
                }
            }
            Node::App(a, b) => Ok(Term::app(go(a, env, bound)?, go(b, env, bound)?)),
            Node::Lam(x, body) => {
                bound.push(x.clone());
                let body = go(body, env, bound);
                bound.pop();
                Ok(Term::lam(x.clone(), body?))
            }
        }
    }
    go(&c.term, &c.env, &mut Vec::new())
}

/// The annotation is forgotten.
pub fn translate_value(v: &Value) -> Result<Term, KlError> {
    match v {
        Value::AnnotAbs { lam, env, .. } => translate_closure(&Closure::new(lam.clone(), env.clone())),
        Value::PlainTerm(t) => Err(KlError::NotWeak(format!("plain value {t}"))),
    }
}

pub fn translate_frame(f: &Frame) -> Result<KlFrame, KlError> {
    match f {
        Frame::Arg(c) => Ok(KlFrame::Arg(translate_closure(c)?)),
        Frame::Cache(l) if l.kind == LocKind::Arg => Ok(KlFrame::Cache(l.id)),
        Frame::Cache(l) => Err(KlError::NotWeak(format!("cache frame for annotation {l}"))),
        Frame::LApp(_) | Frame::LamF(_) => Err(KlError::NotWeak("neutral-building frame".into())),
    }
}

/// A cell that is not `todo ⊥`.
pub fn translate_cell(s: &Storable) -> Result<Option<KlCell>, KlError> {
    match s {
        Storable::TodoEmpty => Ok(None),
        Storable::TodoClosure(c) => Ok(Some(KlCell::Thunk(translate_closure(c)?))),
        Storable::Done(v) => Ok(Some(KlCell::Value(translate_value(v)?))),
    }
}

pub fn translate(k: &Config, view: StoreView<'_>) -> Result<KlConfig, KlError> {
    let mode = match &k.mode {
        Mode::Eval(c) => KlMode::Eval(translate_closure(c)?),
        Mode::Cont(v) => KlMode::Cont(translate_value(v)?),
    };
    let mut stack = k.stack.iter().map(translate_frame).collect::<Result<Vec<_>, _>>()?;
    stack.reverse();
    let mut store = BTreeMap::new();
    for loc in view.locations() {
        if let Some(cell) = translate_cell(view.get(loc).expect("listed locations exist"))? {
            store.insert(loc.id, cell);
        }
    }
    Ok(KlConfig { mode, stack, store })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimFailure {
    /// The loaded configurations differ.
    Load,
    RuleMismatch { step: u64, rknl: u8, kl: u8 },
    StateMismatch { step: u64, rule: u8, rknl: Box<KlConfig>, kl: Box<KlConfig> },
    /// The cell changed by a step differs between the machines.
    CellMismatch { step: u64, location: usize },
    /// RKNL left the weak fragment while KL still had work to do.
    KlContinues { step: u64, kl_rule: u8 },
    /// KL answered while RKNL still took a weak step.
    KlAnswered { step: u64, rknl_rule: u8 },
    Error { step: u64, error: KlError },
}

impl fmt::Display for BisimFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BisimFailure::Load => write!(f, "loaded configurations differ"),
            BisimFailure::RuleMismatch { step, rknl, kl } => {
                write!(f, "step {step}: RKNL fired rule {rknl}, KL fired rule {kl}")
            }
            BisimFailure::StateMismatch { step, rule, rknl, kl } => {
                write!(f, "step {step} (rule {rule}): translated RKNL {rknl} but KL {kl}")
            }
            BisimFailure::CellMismatch { step, location } => write!(f, "step {step}: cell #{location} differs"),
            BisimFailure::KlContinues { step, kl_rule } => {
                write!(f, "step {step}: weak prefix ended but KL fired rule {kl_rule}")
            }
            BisimFailure::KlAnswered { step, rknl_rule } => {
                write!(f, "step {step}: KL answered but RKNL fired rule {rknl_rule}")
            }
            BisimFailure::Error { step, error } => write!(f, "step {step}: {error}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BisimReport {
    /// Length of the weak prefix checked.
    pub steps: u64,
    pub rules: Vec<u8>,
    /// Both machines stopped together within the fuel.
    pub completed: bool,
    #[serde(serialize_with = "display_opt")]
    pub failure: Option<BisimFailure>,
}

fn display_opt<S: serde::Serializer>(f: &Option<BisimFailure>, s: S) -> Result<S::Ok, S::Error> {
    match f {
        Some(f) => s.serialize_some(&f.to_string()),
        None => s.serialize_none(),
    }
}

impl BisimReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Run the weak prefix of RKNL on the closed term `t` and KL in lockstep.
///
/// After each step both machines must have fired the same rule, the
/// translated RKNL mode and stack must equal KL's, and the store cell
/// touched by the step must agree. Cells not touched keep their
/// translation, so the stores stay equal; the full stores are compared
/// at load and at the end. When RKNL leaves the weak fragment KL must be
/// at its answer.
pub fn bisim_check(t: &Term, fuel: u64) -> BisimReport {
    let mut rknl = Machine::new(t, MachineOptions::default());
    let mut kl = KlMachine::new(t, KlOptions::default());
    let mut report = BisimReport { steps: 0, rules: Vec::new(), completed: false, failure: None };
    let fail = |mut report: BisimReport, failure| {
        report.failure = Some(failure);
        report
    };
    match translate(rknl.config(), rknl.store().at(0)) {
        Ok(k) if k == *kl.config() => {}
        Ok(_) => return fail(report, BisimFailure::Load),
        Err(error) => return fail(report, BisimFailure::Error { step: 0, error }),
    }
    let mut last_weak = rknl.config().clone();
    while report.steps < fuel {
        let step = report.steps + 1;
        let r = match rknl.step() {
            Ok(Step::Moved(info)) if info.rule <= 6 => Some(info),
            Ok(_) => None,
            Err(e) => return fail(report, BisimFailure::Error { step, error: e.into() }),
        };
        let q = match kl.step() {
            Ok(q) => q,
            Err(error) => return fail(report, BisimFailure::Error { step, error }),
        };
        let (info, kl_rule, kl_changed) = match (r, q) {
            (None, KlStep::Answer(_)) => {
                report.completed = true;
                break;
            }
            (None, KlStep::Moved { rule, .. }) => {
                return fail(report, BisimFailure::KlContinues { step, kl_rule: rule })
            }
            (Some(info), KlStep::Answer(_)) => {
                return fail(report, BisimFailure::KlAnswered { step, rknl_rule: info.rule })
            }
            (Some(info), KlStep::Moved { rule, changed }) => (info, rule, changed),
        };
        if info.rule != kl_rule {
            return fail(report, BisimFailure::RuleMismatch { step, rknl: info.rule, kl: kl_rule });
        }
        report.steps = step;
        report.rules.push(info.rule);
        let k = rknl.config();
        let head = (|| {
            let mode = match &k.mode {
                Mode::Eval(c) => KlMode::Eval(translate_closure(c)?),
                Mode::Cont(v) => KlMode::Cont(translate_value(v)?),
            };
            let mut stack = k.stack.iter().map(translate_frame).collect::<Result<Vec<_>, _>>()?;
            stack.reverse();
            Ok::<_, KlError>((mode, stack))
        })();
        let (mode, stack) = match head {
            Ok(h) => h,
            Err(error) => return fail(report, BisimFailure::Error { step, error }),
        };
        if mode != kl.config().mode || stack != kl.config().stack {
            let rknl_k = translate(k, rknl.store().at(k.time)).unwrap_or(KlConfig { mode, stack, store: BTreeMap::new() });
            return fail(
                report,
                BisimFailure::StateMismatch { step, rule: info.rule, rknl: Box::new(rknl_k), kl: Box::new(kl.config().clone()) },
            );
        }
        let touched: BTreeSet<Location> =
            info.allocated.into_iter().chain(info.written).filter(|l| l.kind == LocKind::Arg).collect();
        let kl_touched: BTreeSet<usize> = kl_changed.into_iter().collect();
        if touched.iter().map(|l| l.id).collect::<BTreeSet<_>>() != kl_touched {
            let location = touched.iter().map(|l| l.id).chain(kl_touched).next().unwrap_or(0);
            return fail(report, BisimFailure::CellMismatch { step, location });
        }
        for loc in touched {
            match translate_cell(rknl.store().get(loc)) {
                Ok(c) if c.as_ref() == kl.config().store.get(&loc.id) => {}
                Ok(_) => return fail(report, BisimFailure::CellMismatch { step, location: loc.id }),
                Err(error) => return fail(report, BisimFailure::Error { step, error }),
            }
        }
        last_weak = k.clone();
    }
    if report.completed {
        match translate(&last_weak, rknl.store().at(last_weak.time)) {
            Ok(k) if k == *kl.config() => {}
            Ok(k) => {
                let failure = BisimFailure::StateMismatch {
                    step: report.steps,
                    rule: report.rules.last().copied().unwrap_or(0),
                    rknl: Box::new(k),
                    kl: Box::new(kl.config().clone()),
                };
                return fail(report, failure);
            }
            Err(error) => {
                let step = report.steps;
                return fail(report, BisimFailure::Error { step, error });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{church, identity};
    use crate::machine::run;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn literal_guard_takes_the_short_path() {
        let r = kl_run(&t("(\\x.x) (\\y.y)"), KlOptions { literal_guard: true }, 100).unwrap();
        assert_eq!(r.rules, vec![1, 2, 6, 4]);
        assert_eq!(r.outcome, KlOutcome::Answer(t("\\y.y")));
    }

    #[test]
    fn tagged_cells_evaluate_every_argument_once() {
        let r = kl_run(&t("(\\x.x) (\\y.y)"), KlOptions::default(), 100).unwrap();
        assert_eq!(r.rules, vec![1, 2, 6, 3, 2, 5]);
        assert_eq!(r.outcome, KlOutcome::Answer(t("\\y.y")));
        assert_eq!(r.config.store.get(&1), Some(&KlCell::Value(t("\\y.y"))));
    }

    #[test]
    fn abstraction_answers_at_once() {
        let r = kl_run(&t("\\x.x"), KlOptions::default(), 100).unwrap();
        assert_eq!(r.rules, vec![2]);
        assert_eq!(r.outcome, KlOutcome::Answer(t("\\x.x")));
    }

    #[test]
    fn rule_3_caches_a_non_value() {
        let mut m = KlMachine::new(&t("(\\x.x) ((\\a.a) (\\b.b))"), KlOptions { literal_guard: true });
        for _ in 0..3 {
            m.step().unwrap();
        }
        assert_eq!(m.config().store.get(&1), Some(&KlCell::Thunk(t("(\\a.a) (\\b.b)"))));
        assert_eq!(m.step().unwrap(), KlStep::Moved { rule: 3, changed: None });
        assert_eq!(m.config().stack, vec![KlFrame::Cache(1)]);
    }

    #[test]
    fn open_terms_get_stuck() {
        let err = kl_run(&t("(\\x.y) (\\z.z)"), KlOptions::default(), 100).unwrap_err();
        assert_eq!(err, KlError::StuckOpen(Ident::source("y")));
    }

    #[test]
    fn translation_of_load_is_load() {
        let term = t("(\\x.x x) (\\y.y)");
        let k = Config::load(&term);
        let r = run(&term, MachineOptions::default(), 0, false).unwrap();
        assert_eq!(translate(&k, r.store.at(0)).unwrap(), kl_load(&term));
    }

    #[test]
    fn elaborate_example_closed_at_step_3() {
        let term = t("(\\x.(\\w.w) x x) ((\\y.\\z.(\\w.w) z) ((\\x.x x) (\\x.x x)))");
        let r = run(&term, MachineOptions::default(), 3, true).unwrap();
        let k3 = r.trace.as_ref().unwrap().config(3);
        let mut m = KlMachine::new(&term, KlOptions::default());
        for _ in 0..3 {
            m.step().unwrap();
        }
        assert_eq!(translate(k3, r.store.at(3)).unwrap(), *m.config());
        assert_eq!(m.config().to_string(), "eval (\\w.w) #1 #1 | □ | [#1=((\\y.\\z.(\\w.w) z) ((\\x.x x) (\\x.x x)))]");
    }

    #[test]
    fn annotation_is_forgotten() {
        let lam = t("\\x.x");
        let a = Value::AnnotAbs { lam: lam.clone(), env: Env::new(), annot: Location { id: 0, kind: LocKind::Annot } };
        let b = Value::AnnotAbs { lam: lam.clone(), env: Env::new(), annot: Location { id: 7, kind: LocKind::Annot } };
        assert_eq!(translate_value(&a).unwrap(), lam);
        assert_eq!(translate_value(&b).unwrap(), lam);
    }

    #[test]
    fn bisimulation_examples() {
        let report = bisim_check(&t("(\\x.x) (\\y.y)"), 1000);
        assert!(report.passed() && report.completed, "{:?}", report.failure);
        assert_eq!(report.rules, vec![1, 2, 6, 3, 2, 5]);
        let report = bisim_check(&t("\\x.x"), 1000);
        assert!(report.passed() && report.completed);
        assert_eq!(report.rules, vec![2]);
        let c2 = church(2);
        let report = bisim_check(&Term::apps(c2.clone(), [c2, identity()]), 1000);
        assert!(report.passed() && report.completed, "{:?}", report.failure);
    }

    #[test]
    fn bisimulation_fuel_is_inconclusive() {
        let report = bisim_check(&t("(\\x.x x) (\\x.x x)"), 500);
        assert!(report.passed());
        assert!(!report.completed);
        assert_eq!(report.steps, 500);
    }
}
