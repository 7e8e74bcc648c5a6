//! The RKNL machine: strong call-by-need normalization with memoized
//! arguments and memoized normal forms of abstractions.
//!
//! Configurations are either evaluating a closure or continuing with a
//! value. The transitions, in the order they are tried:
//!
//! | rule | configuration | becomes |
//! |------|---------------|---------|
//! | 1 | eval `(t1 t2, e)`, `s` | eval `(t1, e)`, `□ (t2, e) · s` |
//! | 2 | eval `(λx.t, e)` | cont `(λx.t, e)^ℓ`, with `ℓ ↦ todo ⊥` fresh |
//! | 3 | eval `(x, e)`, `σ(e(x)) = todo c` | eval `c`, `ℓ := □ · s` |
//! | 4 | eval `(x, e)`, `σ(e(x)) = done v` or `x ∉ e` | cont `v` (or `x`) |
//! | 5 | cont `v`, `ℓ := □ · s` | cont `v`, `s`, with `σ[ℓ ↦ done v]` |
//! | 6 | cont `(λx.t, e)^ℓ`, `□ c · s` | eval `(t, e[x ↦ ℓ2])`, with `ℓ2 ↦ todo c` fresh |
//! | 7 | cont `(λx.t, e)^ℓ`, `σ(ℓ) = todo ⊥` | eval `(t, e[x ↦ ℓ2])`, `λx̂.□ · ℓ := □ · s`, with `ℓ2 ↦ done x̂` fresh |
//! | 8 | cont `(λx.t, e)^ℓ`, `σ(ℓ) = done v` | cont `v` |
//! | 9 | cont `t`, `□ c · s` | eval `c`, `t □ · s` |
//! | 10 | cont `t2`, `t1 □ · s` | cont `t1 t2` |
//! | 11 | cont `t`, `λx.□ · s` | cont `λx.t` |
//!
//! Loading `t` starts at eval `(t, [])` with empty stack and store; a
//! continuation with a plain term on the empty stack is the final answer.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{print, Style};
use crate::term::{Ident, Namespace, Node, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LocKind {
    /// Allocated by rules 6 and 7; the target of environment entries.
    Arg,
    /// Allocated by rule 2; holds the normal form of an abstraction.
    Annot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location {
    pub id: usize,
    pub kind: LocKind,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.id)
    }
}

/// Persistent map from identifiers to argument locations.
pub type Env = rpds::RedBlackTreeMap<Ident, Location>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub term: Term,
    pub env: Env,
}

impl Closure {
    pub fn new(term: Term, env: Env) -> Self {
        Closure { term, env }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    /// A term produced in continuation mode: a normal form, neutral when it
    /// meets an argument.
    PlainTerm(Term),
    /// An abstraction closure tagged with the location reserved for its
    /// normal form. `lam` is always an abstraction node.
    AnnotAbs { lam: Term, env: Env, annot: Location },
}

impl Value {
    /// Binder and body of an annotated abstraction.
    pub fn abs_parts(&self) -> Option<(&Ident, &Term)> {
        match self {
            Value::AnnotAbs { lam, .. } => match lam.node() {
                Node::Lam(x, body) => Some((x, body)),
                _ => None,
            },
            Value::PlainTerm(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Storable {
    TodoEmpty,
    TodoClosure(Closure),
    Done(Value),
}

/// How a location came to exist. Recorded once at allocation and never
/// changed, so decoding can consult it instead of the run's history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitRecord {
    ByRule2,
    ByRule6(Closure),
    ByRule7(Ident),
}

/// One store cell with its full write history.
#[derive(Debug, Clone)]
pub struct Cell {
    pub loc: Location,
    pub init: InitRecord,
    /// `(time, content)` pairs in increasing time; the first entry is the
    /// allocation.
    versions: Vec<(u64, Storable)>,
}

impl Cell {
    pub fn current(&self) -> &Storable {
        &self.versions.last().expect("cells are never empty").1
    }

    pub fn allocated_at(&self) -> u64 {
        self.versions[0].0
    }

    fn at(&self, time: u64) -> Option<&Storable> {
        let i = self.versions.partition_point(|(t, _)| *t <= time);
        (i > 0).then(|| &self.versions[i - 1].1)
    }

    pub fn writes(&self) -> usize {
        self.versions.len() - 1
    }
}

/// Append-only store. Cells are indexed by location id. Every write is
/// timestamped, so the store as it was at any earlier configuration can be
/// viewed without copying.
#[derive(Debug, Clone, Default)]
pub struct Store {
    cells: Vec<Cell>,
}

impl Store {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, loc: Location) -> &Cell {
        &self.cells[loc.id]
    }

    pub fn get(&self, loc: Location) -> &Storable {
        self.cells[loc.id].current()
    }

    pub fn init(&self, loc: Location) -> &InitRecord {
        &self.cells[loc.id].init
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter()
    }

    /// The store as seen by the configuration at `time`.
    pub fn at(&self, time: u64) -> StoreView<'_> {
        StoreView { store: self, time }
    }

    pub(crate) fn alloc(&mut self, kind: LocKind, init: InitRecord, content: Storable, time: u64) -> Location {
        let loc = Location { id: self.cells.len(), kind };
        self.cells.push(Cell { loc, init, versions: vec![(time, content)] });
        loc
    }

    pub(crate) fn write(&mut self, loc: Location, content: Storable, time: u64) {
        self.cells[loc.id].versions.push((time, content));
    }
}

#[derive(Clone, Copy)]
pub struct StoreView<'a> {
    store: &'a Store,
    time: u64,
}

impl<'a> StoreView<'a> {
    pub fn get(&self, loc: Location) -> Option<&'a Storable> {
        self.store.cells.get(loc.id)?.at(self.time)
    }

    pub fn init(&self, loc: Location) -> Option<&'a InitRecord> {
        let cell = self.store.cells.get(loc.id)?;
        (cell.allocated_at() <= self.time).then_some(&cell.init)
    }

    /// Number of cells allocated by this time.
    pub fn len(&self) -> usize {
        self.store.cells.partition_point(|c| c.allocated_at() <= self.time)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn locations(&self) -> impl Iterator<Item = Location> + 'a {
        self.store.cells[..self.len()].iter().map(|c| c.loc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    /// `□ c`
    Arg(Closure),
    /// `t □`
    LApp(Term),
    /// `λx.□`
    LamF(Ident),
    /// `ℓ := □`
    Cache(Location),
}

struct StackNode {
    frame: Frame,
    next: Stack,
    depth: usize,
}

/// Persistent stack; pushing shares the tail.
#[derive(Clone, Default)]
pub struct Stack(Option<Rc<StackNode>>);

impl Stack {
    pub fn new() -> Self {
        Stack(None)
    }

    pub fn push(&self, frame: Frame) -> Stack {
        Stack(Some(Rc::new(StackNode { frame, next: self.clone(), depth: self.depth() + 1 })))
    }

    pub fn top(&self) -> Option<&Frame> {
        self.0.as_ref().map(|n| &n.frame)
    }

    pub fn pop(&self) -> Option<(&Frame, Stack)> {
        self.0.as_ref().map(|n| (&n.frame, n.next.clone()))
    }

    pub fn depth(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.depth)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    /// Frames from the top of the stack downwards.
    pub fn iter(&self) -> StackIter<'_> {
        StackIter(self.0.as_deref())
    }

    pub fn ptr_eq(&self, other: &Stack) -> bool {
        match (&self.0, &other.0) {
            (Some(a), Some(b)) => Rc::ptr_eq(a, b),
            (None, None) => true,
            _ => false,
        }
    }

    pub fn from_frames(frames: impl IntoIterator<Item = Frame, IntoIter: DoubleEndedIterator>) -> Stack {
        frames.into_iter().rev().fold(Stack::new(), |s, f| s.push(f))
    }
}

pub struct StackIter<'a>(Option<&'a StackNode>);

impl<'a> Iterator for StackIter<'a> {
    type Item = &'a Frame;

    fn next(&mut self) -> Option<&'a Frame> {
        let node = self.0?;
        self.0 = node.next.0.as_deref();
        Some(&node.frame)
    }
}

impl PartialEq for Stack {
    fn eq(&self, other: &Stack) -> bool {
        self.depth() == other.depth()
            && self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }
}

impl Eq for Stack {}

impl fmt::Debug for Stack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl Drop for Stack {
    fn drop(&mut self) {
        // Unlink uniquely owned nodes one by one so long stacks do not
        // recurse on drop.
        let mut cur = self.0.take();
        while let Some(node) = cur {
            match Rc::try_unwrap(node) {
                Ok(mut node) => cur = node.next.0.take(),
                Err(_) => break,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Eval(Closure),
    Cont(Value),
}

/// A machine state. The store is owned by the run; `time` selects the
/// view of it this configuration sees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub mode: Mode,
    pub stack: Stack,
    pub time: u64,
}

impl Config {
    pub fn load(t: &Term) -> Config {
        Config { mode: Mode::Eval(Closure::new(t.clone(), Env::new())), stack: Stack::new(), time: 0 }
    }

    /// Text of the focused closure or value.
    pub fn focus_text(&self) -> String {
        match &self.mode {
            Mode::Eval(c) => print(&c.term, Style::Compact),
            Mode::Cont(Value::PlainTerm(t)) => print(t, Style::Compact),
            Mode::Cont(Value::AnnotAbs { lam, annot, .. }) => {
                format!("({})^{}", print(lam, Style::Compact), annot)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MachineOptions {
    /// Always take rule 7, never reuse a memoized normal form with rule 8.
    pub no8: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("ill-formed configuration: {0}")]
    IllFormed(String),
    #[error("fresh-name counter for {0:?} overflowed")]
    FreshExhausted(String),
    #[error("location {0} written twice")]
    WriteOnce(Location),
}

/// What one transition did besides moving the focus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepInfo {
    pub rule: u8,
    pub allocated: Option<Location>,
    pub written: Option<Location>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Moved(StepInfo),
    Terminal(Term),
}

/// Per-base counters for fresh identifiers.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    next: HashMap<Rc<str>, u64>,
}

impl FreshNames {
    /// Counters starting above every fresh identifier already present in `t`.
    pub fn avoiding(t: &Term) -> Self {
        let mut names = FreshNames::default();
        for x in t.all_idents() {
            if let (Namespace::Fresh, Some(i)) = (x.namespace(), x.index()) {
                let next = names.next.entry(Rc::from(x.base())).or_insert(0);
                *next = (*next).max(i.saturating_add(1));
            }
        }
        names
    }

    /// `base_k` for the next unused `k` of this base.
    pub fn fresh(&mut self, base: &Ident) -> Result<Ident, MachineError> {
        let next = self.next.entry(Rc::from(base.base())).or_insert(0);
        let i = *next;
        *next = i.checked_add(1).ok_or_else(|| MachineError::FreshExhausted(base.base().to_string()))?;
        Ok(base.refreshed(i))
    }
}

pub struct Machine {
    opts: MachineOptions,
    config: Config,
    store: Store,
    fresh: FreshNames,
    histogram: [u64; 12],
}

impl Machine {
    pub fn new(t: &Term, opts: MachineOptions) -> Self {
        Machine {
            opts,
            config: Config::load(t),
            store: Store::default(),
            fresh: FreshNames::avoiding(t),
            histogram: [0; 12],
        }
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn into_store(self) -> Store {
        self.store
    }

    pub fn steps(&self) -> u64 {
        self.config.time
    }

    /// Count of firings of `rule` so far.
    pub fn rule_count(&self, rule: u8) -> u64 {
        self.histogram[rule as usize]
    }

    pub fn histogram(&self) -> BTreeMap<u8, u64> {
        (1..=11).map(|r| (r, self.histogram[r as usize])).collect()
    }

    /// Apply one transition, or report the final term.
    pub fn step(&mut self) -> Result<Step, MachineError> {
        let time = self.config.time + 1;
        let stack = self.config.stack.clone();
        let mut info = StepInfo { rule: 0, allocated: None, written: None };
        let (mode, stack) = match &self.config.mode {
            Mode::Eval(Closure { term, env }) => match term.node() {
                Node::App(t1, t2) => {
                    info.rule = 1;
                    let arg = Frame::Arg(Closure::new(t2.clone(), env.clone()));
                    (Mode::Eval(Closure::new(t1.clone(), env.clone())), stack.push(arg))
                }
                Node::Lam(..) => {
                    info.rule = 2;
                    let annot = self.store.alloc(LocKind::Annot, InitRecord::ByRule2, Storable::TodoEmpty, time);
                    info.allocated = Some(annot);
                    (Mode::Cont(Value::AnnotAbs { lam: term.clone(), env: env.clone(), annot }), stack)
                }
                Node::Var(x) => match env.get(x) {
                    None => {
                        info.rule = 4;
                        (Mode::Cont(Value::PlainTerm(term.clone())), stack)
                    }
                    Some(&loc) => match self.store.get(loc) {
                        Storable::TodoClosure(c) => {
                            info.rule = 3;
                            (Mode::Eval(c.clone()), stack.push(Frame::Cache(loc)))
                        }
                        Storable::Done(v) => {
                            info.rule = 4;
                            (Mode::Cont(v.clone()), stack)
                        }
                        Storable::TodoEmpty => {
                            return Err(MachineError::IllFormed(format!("variable {x} bound to empty cell {loc}")))
                        }
                    },
                },
            },
            Mode::Cont(v) => match (stack.pop(), v) {
                (Some((Frame::Cache(loc), rest)), _) => {
                    info.rule = 5;
                    let loc = *loc;
                    if matches!(self.store.get(loc), Storable::Done(_)) && !self.opts.no8 {
                        return Err(MachineError::WriteOnce(loc));
                    }
                    self.store.write(loc, Storable::Done(v.clone()), time);
                    info.written = Some(loc);
                    (Mode::Cont(v.clone()), rest)
                }
                (Some((Frame::Arg(arg), rest)), Value::AnnotAbs { lam, env, .. }) => {
                    info.rule = 6;
                    let Node::Lam(x, body) = lam.node() else { unreachable!("annotated values hold abstractions") };
                    let loc = self.store.alloc(
                        LocKind::Arg,
                        InitRecord::ByRule6(arg.clone()),
                        Storable::TodoClosure(arg.clone()),
                        time,
                    );
                    info.allocated = Some(loc);
                    (Mode::Eval(Closure::new(body.clone(), env.insert(x.clone(), loc))), rest)
                }
                (_, Value::AnnotAbs { lam, env, annot }) => {
                    let Node::Lam(x, body) = lam.node() else { unreachable!("annotated values hold abstractions") };
                    match self.store.get(*annot).clone() {
                        Storable::Done(nf) if !self.opts.no8 => {
                            info.rule = 8;
                            (Mode::Cont(nf), stack)
                        }
                        Storable::TodoEmpty | Storable::Done(_) => {
                            info.rule = 7;
                            let x_hat = self.fresh.fresh(x)?;
                            let var = Value::PlainTerm(Term::var(x_hat.clone()));
                            let loc = self.store.alloc(
                                LocKind::Arg,
                                InitRecord::ByRule7(x_hat.clone()),
                                Storable::Done(var),
                                time,
                            );
                            info.allocated = Some(loc);
                            let stack = stack.push(Frame::Cache(*annot)).push(Frame::LamF(x_hat));
                            (Mode::Eval(Closure::new(body.clone(), env.insert(x.clone(), loc))), stack)
                        }
                        Storable::TodoClosure(_) => {
                            return Err(MachineError::IllFormed(format!("annotation {annot} holds a closure")))
                        }
                    }
                }
                (Some((Frame::Arg(arg), rest)), Value::PlainTerm(t)) => {
                    info.rule = 9;
                    (Mode::Eval(arg.clone()), rest.push(Frame::LApp(t.clone())))
                }
                (Some((Frame::LApp(t1), rest)), Value::PlainTerm(t2)) => {
                    info.rule = 10;
                    (Mode::Cont(Value::PlainTerm(Term::app(t1.clone(), t2.clone()))), rest)
                }
                (Some((Frame::LamF(x), rest)), Value::PlainTerm(t)) => {
                    info.rule = 11;
                    (Mode::Cont(Value::PlainTerm(Term::lam(x.clone(), t.clone()))), rest)
                }
                (None, Value::PlainTerm(t)) => return Ok(Step::Terminal(t.clone())),
            },
        };
        self.config = Config { mode, stack, time };
        self.histogram[info.rule as usize] += 1;
        Ok(Step::Moved(info))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    NormalForm(Term),
    FuelExhausted,
}

/// A recorded run: the loaded configuration followed by each transition
/// with the configuration it produced.
#[derive(Debug, Clone)]
pub struct Trace {
    pub initial: Config,
    pub steps: Vec<(StepInfo, Config)>,
}

impl Trace {
    /// Configuration `i`, with configuration 0 the loaded one.
    pub fn config(&self, i: usize) -> &Config {
        if i == 0 {
            &self.initial
        } else {
            &self.steps[i - 1].1
        }
    }

    pub fn rules(&self) -> Vec<u8> {
        self.steps.iter().map(|(info, _)| info.rule).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcome: Outcome,
    pub steps: u64,
    /// Number of rule-6 firings.
    pub beta_steps: u64,
    pub histogram: BTreeMap<u8, u64>,
    pub trace: Option<Trace>,
    /// The final store; earlier states are available through
    /// [`Store::at`].
    pub store: Store,
}

impl RunResult {
    pub fn normal_form(&self) -> Option<&Term> {
        match &self.outcome {
            Outcome::NormalForm(t) => Some(t),
            Outcome::FuelExhausted => None,
        }
    }
}

/// Load `t` and step until the final term or until `fuel` transitions
/// have been taken.
pub fn run(t: &Term, opts: MachineOptions, fuel: u64, trace: bool) -> Result<RunResult, MachineError> {
    let mut m = Machine::new(t, opts);
    let mut recorded = trace.then(|| Trace { initial: m.config().clone(), steps: Vec::new() });
    let outcome = loop {
        if m.steps() == fuel {
            // A final configuration still unloads without spending fuel.
            if let (Mode::Cont(Value::PlainTerm(t)), true) = (&m.config().mode, m.config().stack.is_empty()) {
                break Outcome::NormalForm(t.clone());
            }
            break Outcome::FuelExhausted;
        }
        match m.step()? {
            Step::Terminal(t) => break Outcome::NormalForm(t),
            Step::Moved(info) => {
                if let Some(tr) = recorded.as_mut() {
                    tr.steps.push((info, m.config().clone()));
                }
            }
        }
    };
    Ok(RunResult {
        outcome,
        steps: m.steps(),
        beta_steps: m.rule_count(6),
        histogram: m.histogram(),
        trace: recorded,
        store: m.into_store(),
    })
}

/// One line of the JSON-lines trace format.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub step: u64,
    pub rule: u8,
    pub mode: &'static str,
    pub focus: String,
    pub stack_depth: usize,
    pub store_size: usize,
}

impl Trace {
    pub fn records<'a>(&'a self, store: &'a Store) -> impl Iterator<Item = TraceRecord> + 'a {
        self.steps.iter().map(move |(info, k)| TraceRecord {
            step: k.time,
            rule: info.rule,
            mode: match k.mode {
                Mode::Eval(_) => "eval",
                Mode::Cont(_) => "cont",
            },
            focus: k.focus_text(),
            stack_depth: k.stack.depth(),
            store_size: store.at(k.time).len(),
        })
    }

    pub fn to_jsonl(&self, store: &Store) -> String {
        let mut out = String::new();
        for r in self.records(store) {
            out.push_str(&serde_json::to_string(&r).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    const ELABORATE: &str = "(\\x.c x x) ((\\y.\\z.(\\w.w) z) ((\\x.x x) (\\x.x x)))";

    #[test]
    fn load_is_eval_with_empty_everything() {
        let k = Config::load(&t("\\x.x"));
        assert_eq!(k.mode, Mode::Eval(Closure::new(t("\\x.x"), Env::new())));
        assert!(k.stack.is_empty());
        assert_eq!(k.time, 0);
    }

    #[test]
    fn elaborate_example_rules() {
        let r = run(&t(ELABORATE), MachineOptions::default(), 1000, true).unwrap();
        let expected = [1, 2, 6, 1, 1, 4, 9, 3, 1, 2, 6, 2, 5, 7, 1, 2, 6, 3, 4, 5, 11, 5, 10, 9, 4, 8, 10];
        assert_eq!(r.trace.as_ref().unwrap().rules(), expected);
        assert_eq!(r.steps, 27);
        assert_eq!(r.beta_steps, 3);
        assert_eq!(print(r.normal_form().unwrap(), Style::Unicode), "c (λz_0.z_0) (λz_0.z_0)");
    }

    #[test]
    fn open_variable_is_a_value() {
        let r = run(&t("x"), MachineOptions::default(), 10, false).unwrap();
        assert_eq!(r.normal_form(), Some(&t("x")));
        assert_eq!(r.steps, 1);
        assert_eq!(r.histogram[&4], 1);
    }

    #[test]
    fn omega_runs_out_of_fuel() {
        let r = run(&t("(\\x.x x) (\\x.x x)"), MachineOptions::default(), 1000, false).unwrap();
        assert_eq!(r.outcome, Outcome::FuelExhausted);
        assert_eq!(r.steps, 1000);
        assert!(r.beta_steps > 0);
        assert_eq!(r.beta_steps, r.histogram[&6]);
        assert_eq!(r.histogram.values().sum::<u64>(), r.steps);
    }

    #[test]
    fn fresh_names_are_per_base() {
        let mut names = FreshNames::default();
        assert_eq!(names.fresh(&Ident::source("z")).unwrap().to_string(), "z_0");
        assert_eq!(names.fresh(&Ident::source("z")).unwrap().to_string(), "z_1");
        assert_eq!(names.fresh(&Ident::source("x")).unwrap().to_string(), "x_0");
    }

    #[test]
    fn fresh_names_skip_input_names() {
        let input = Term::lam(Ident::fresh("z", 4), Term::var(Ident::fresh("z", 4)));
        let mut names = FreshNames::avoiding(&input);
        assert_eq!(names.fresh(&Ident::source("z")).unwrap(), Ident::fresh("z", 5));
    }

    #[test]
    fn identity_same_under_no8() {
        let a = run(&t("\\x.x"), MachineOptions::default(), 100, true).unwrap();
        let b = run(&t("\\x.x"), MachineOptions { no8: true }, 100, true).unwrap();
        assert_eq!(a.steps, b.steps);
        assert_eq!(a.trace.unwrap().rules(), b.trace.unwrap().rules());
    }

    #[test]
    fn store_views_follow_time() {
        let r = run(&t(ELABORATE), MachineOptions::default(), 1000, true).unwrap();
        let trace = r.trace.as_ref().unwrap();
        // configuration 2 has the annotation of λx.c x x; configuration 3
        // adds the argument cell
        assert_eq!(r.store.at(trace.config(2).time).len(), 1);
        assert_eq!(r.store.at(trace.config(3).time).len(), 2);
        let arg = Location { id: 1, kind: LocKind::Arg };
        assert!(matches!(r.store.at(3).get(arg), Some(Storable::TodoClosure(_))));
        assert!(matches!(r.store.get(arg), Storable::Done(_)));
    }

    #[test]
    fn deep_stack_drops_without_overflow() {
        let mut s = Stack::new();
        for _ in 0..1_000_000 {
            s = s.push(Frame::LamF(Ident::source("x")));
        }
        assert_eq!(s.depth(), 1_000_000);
        drop(s);
    }

    #[test]
    fn jsonl_trace_shape() {
        let r = run(&t("(\\x.x) y"), MachineOptions::default(), 100, true).unwrap();
        let text = r.trace.as_ref().unwrap().to_jsonl(&r.store);
        let first = text.lines().next().unwrap();
        assert_eq!(first, r#"{"step":1,"rule":1,"mode":"eval","focus":"\\x.x","stack_depth":1,"store_size":0}"#);
        assert_eq!(text.lines().count() as u64, r.steps);
    }
}
