//! The ghost machine: RKNL with its shape invariant spelled out in the
//! types.
//!
//! Values in continuation mode are split into neutral terms `a` and
//! annotated abstractions, and finished normal forms `n` get their own
//! configuration. Stacks come in two sorts:
//!
//! ```text
//! π ::= ℓ := □ · π  |  □ c · π  |  ⌈□⌉ · ϱ
//! ϱ ::= ℓ' := □ · ϱ |  []       |  λx.□ · ϱ  |  a □ · π
//! ```
//!
//! The coercion frame `⌈□⌉` marks where a neutral result turns into a
//! normal one (rule 9a). It has no counterpart in RKNL, so projecting a
//! ghost configuration drops it, erases coercions, and merges the two
//! stores. Running both machines side by side and comparing the projection
//! after every RKNL step checks that every RKNL configuration has this
//! shape.

use std::fmt;
use std::mem;
use std::rc::Rc;

use thiserror::Error;

use crate::machine::{
    Closure, Env, FreshNames, Frame, LocKind, Location, Machine, MachineError, MachineOptions, Mode, Stack,
    Step, Storable, Value,
};
use crate::oracle::{self, Classifier};
use crate::term::{ContextFrame, Ident, Node, SharedEq, Term};

/// `a ::= x | a n`, carrying its erasure.
#[derive(Clone)]
pub struct GNeutral(Rc<(GNeutralNode, Term)>);

pub enum GNeutralNode {
    Var(Ident),
    App(GNeutral, GNormal),
}

/// `n ::= λx.n | ⌈a⌉`, carrying its erasure.
#[derive(Clone)]
pub struct GNormal(Rc<(GNormalNode, Term)>);

pub enum GNormalNode {
    Lam(Ident, GNormal),
    Coerce(GNeutral),
}

impl GNeutral {
    pub fn var(x: Ident) -> Self {
        let t = Term::var(x.clone());
        GNeutral(Rc::new((GNeutralNode::Var(x), t)))
    }

    pub fn app(a: GNeutral, n: GNormal) -> Self {
        let t = Term::app(a.erase().clone(), n.erase().clone());
        GNeutral(Rc::new((GNeutralNode::App(a, n), t)))
    }

    pub fn node(&self) -> &GNeutralNode {
        &self.0 .0
    }

    pub fn erase(&self) -> &Term {
        &self.0 .1
    }
}

impl GNormal {
    pub fn lam(x: Ident, n: GNormal) -> Self {
        let t = Term::lam(x.clone(), n.erase().clone());
        GNormal(Rc::new((GNormalNode::Lam(x, n), t)))
    }

    /// `⌈a⌉`; erases to the same term as `a`.
    pub fn coerce(a: GNeutral) -> Self {
        let t = a.erase().clone();
        GNormal(Rc::new((GNormalNode::Coerce(a), t)))
    }

    pub fn node(&self) -> &GNormalNode {
        &self.0 .0
    }

    pub fn erase(&self) -> &Term {
        &self.0 .1
    }
}

impl fmt::Debug for GNeutral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.erase())
    }
}

impl fmt::Debug for GNormal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⌈{}⌉", self.erase())
    }
}

#[derive(Clone, Debug)]
pub enum GValue {
    Neutral(GNeutral),
    Annot { lam: Term, env: Env, annot: Location },
}

/// Potentially applicative stack.
#[derive(Clone)]
pub struct Pi(Rc<PiNode>);

pub enum PiNode {
    Cache(Location, Pi),
    Arg(Closure, Pi),
    Coerce(Rho),
}

/// Non-applicative stack.
#[derive(Clone)]
pub struct Rho(Rc<RhoNode>);

pub enum RhoNode {
    Cache(Location, Rho),
    Empty,
    LamF(Ident, Rho),
    LApp(GNeutral, Pi),
}

impl Pi {
    fn new(node: PiNode) -> Self {
        Pi(Rc::new(node))
    }

    pub fn node(&self) -> &PiNode {
        &self.0
    }

    fn addr(&self) -> usize {
        Rc::as_ptr(&self.0) as usize
    }
}

impl Rho {
    fn new(node: RhoNode) -> Self {
        Rho(Rc::new(node))
    }

    pub fn empty() -> Self {
        Rho::new(RhoNode::Empty)
    }

    pub fn node(&self) -> &RhoNode {
        &self.0
    }

    fn addr(&self) -> usize {
        Rc::as_ptr(&self.0) as usize
    }
}

enum Link {
    Pi(Pi),
    Rho(Rho),
}

fn is_end(rho: &Rho) -> bool {
    matches!(*rho.0, RhoNode::Empty)
}

fn placeholder() -> Pi {
    Pi(Rc::new(PiNode::Coerce(Rho::empty())))
}

fn is_placeholder(pi: &Pi) -> bool {
    matches!(&*pi.0, PiNode::Coerce(r) if is_end(r))
}

// Detach the tail of a uniquely owned node, leaving a trivial placeholder,
// so that dropping long stacks does not recurse.
fn detach_pi(p: &mut Pi) -> Option<Link> {
    match Rc::get_mut(&mut p.0)? {
        PiNode::Cache(_, next) | PiNode::Arg(_, next) if !is_placeholder(next) => {
            Some(Link::Pi(mem::replace(next, placeholder())))
        }
        PiNode::Coerce(rho) if !is_end(rho) => Some(Link::Rho(mem::replace(rho, Rho::empty()))),
        _ => None,
    }
}

fn detach_rho(r: &mut Rho) -> Option<Link> {
    match Rc::get_mut(&mut r.0)? {
        RhoNode::Cache(_, next) | RhoNode::LamF(_, next) if !is_end(next) => {
            Some(Link::Rho(mem::replace(next, Rho::empty())))
        }
        RhoNode::LApp(_, pi) if !is_placeholder(pi) => Some(Link::Pi(mem::replace(pi, placeholder()))),
        _ => None,
    }
}

fn drop_chain(mut cur: Option<Link>) {
    while let Some(mut link) = cur {
        cur = match &mut link {
            Link::Pi(p) => detach_pi(p),
            Link::Rho(r) => detach_rho(r),
        };
    }
}

impl Drop for Pi {
    fn drop(&mut self) {
        drop_chain(detach_pi(self));
    }
}

impl Drop for Rho {
    fn drop(&mut self) {
        drop_chain(detach_rho(self));
    }
}

#[derive(Clone)]
pub enum GMode {
    Eval(Closure, Pi),
    ContPi(GValue, Pi),
    ContRho(GNormal, Rho),
}

#[derive(Clone, Debug)]
pub enum GCell {
    /// `σ`: argument locations.
    Todo(Closure),
    Done(GValue),
    /// `σ'`: annotation locations.
    Empty,
    Normal(GNormal),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GhostRule {
    R(u8),
    /// Rule 5 on a normal form and an annotation location.
    R5Prime,
    /// Coercion of a neutral result; silent for RKNL.
    R9a,
}

impl GhostRule {
    /// The RKNL rule this step corresponds to, `None` for the silent one.
    pub fn machine_rule(self) -> Option<u8> {
        match self {
            GhostRule::R(r) => Some(r),
            GhostRule::R5Prime => Some(5),
            GhostRule::R9a => None,
        }
    }
}

impl fmt::Display for GhostRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GhostRule::R(r) => write!(f, "{r}"),
            GhostRule::R5Prime => write!(f, "5'"),
            GhostRule::R9a => write!(f, "9a"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GhostError {
    #[error("no ghost transition applies: {0}")]
    ShapeViolation(String),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

#[derive(Debug, Clone)]
pub enum GStep {
    Moved { rule: GhostRule, allocated: Option<Location>, written: Option<Location> },
    Terminal(GNormal),
}

pub struct GhostMachine {
    mode: GMode,
    cells: Vec<GCell>,
    fresh: FreshNames,
}

impl GhostMachine {
    /// Load `t` with the coercion frame on an empty stack.
    pub fn new(t: &Term) -> Self {
        let pi = Pi::new(PiNode::Coerce(Rho::empty()));
        GhostMachine {
            mode: GMode::Eval(Closure::new(t.clone(), Env::new()), pi),
            cells: Vec::new(),
            fresh: FreshNames::avoiding(t),
        }
    }

    pub fn mode(&self) -> &GMode {
        &self.mode
    }

    pub fn cell(&self, loc: Location) -> Option<&GCell> {
        self.cells.get(loc.id)
    }

    pub fn store_len(&self) -> usize {
        self.cells.len()
    }

    fn alloc(&mut self, kind: LocKind, cell: GCell) -> Location {
        let loc = Location { id: self.cells.len(), kind };
        self.cells.push(cell);
        loc
    }

    fn violation<T>(&self, what: impl Into<String>) -> Result<T, GhostError> {
        Err(GhostError::ShapeViolation(what.into()))
    }

    pub fn step(&mut self) -> Result<GStep, GhostError> {
        let mut allocated = None;
        let mut written = None;
        let (rule, mode) = match self.mode.clone() {
            GMode::Eval(Closure { term, env }, pi) => match term.node() {
                Node::App(t1, t2) => {
                    let pi = Pi::new(PiNode::Arg(Closure::new(t2.clone(), env.clone()), pi));
                    (GhostRule::R(1), GMode::Eval(Closure::new(t1.clone(), env), pi))
                }
                Node::Lam(..) => {
                    let annot = self.alloc(LocKind::Annot, GCell::Empty);
                    allocated = Some(annot);
                    (GhostRule::R(2), GMode::ContPi(GValue::Annot { lam: term.clone(), env, annot }, pi))
                }
                Node::Var(x) => match env.get(x) {
                    None => (GhostRule::R(4), GMode::ContPi(GValue::Neutral(GNeutral::var(x.clone())), pi)),
                    Some(&loc) => match self.cells.get(loc.id) {
                        Some(GCell::Todo(c)) => (GhostRule::R(3), GMode::Eval(c.clone(), Pi::new(PiNode::Cache(loc, pi)))),
                        Some(GCell::Done(v)) => (GhostRule::R(4), GMode::ContPi(v.clone(), pi)),
                        _ => return self.violation(format!("variable {x} bound to {loc}, not an argument cell")),
                    },
                },
            },
            GMode::ContPi(v, pi) => match (pi.node(), v) {
                (PiNode::Cache(loc, rest), v) => {
                    if loc.kind != LocKind::Arg {
                        return self.violation(format!("value cached into annotation {loc}"));
                    }
                    self.cells[loc.id] = GCell::Done(v.clone());
                    written = Some(*loc);
                    (GhostRule::R(5), GMode::ContPi(v, rest.clone()))
                }
                (PiNode::Arg(arg, rest), GValue::Annot { lam, env, .. }) => {
                    let Node::Lam(x, body) = lam.node() else { unreachable!("annotated values hold abstractions") };
                    let loc = self.alloc(LocKind::Arg, GCell::Todo(arg.clone()));
                    allocated = Some(loc);
                    (GhostRule::R(6), GMode::Eval(Closure::new(body.clone(), env.insert(x.clone(), loc)), rest.clone()))
                }
                (PiNode::Coerce(rho), GValue::Annot { lam, env, annot }) => {
                    let Node::Lam(x, body) = lam.node() else { unreachable!("annotated values hold abstractions") };
                    match self.cells.get(annot.id).cloned() {
                        Some(GCell::Empty) => {
                            let x_hat = self.fresh.fresh(x)?;
                            let loc = self.alloc(LocKind::Arg, GCell::Done(GValue::Neutral(GNeutral::var(x_hat.clone()))));
                            allocated = Some(loc);
                            let rho = Rho::new(RhoNode::LamF(x_hat, Rho::new(RhoNode::Cache(annot, rho.clone()))));
                            let pi = Pi::new(PiNode::Coerce(rho));
                            (GhostRule::R(7), GMode::Eval(Closure::new(body.clone(), env.insert(x.clone(), loc)), pi))
                        }
                        Some(GCell::Normal(n)) => (GhostRule::R(8), GMode::ContRho(n, rho.clone())),
                        _ => return self.violation(format!("annotation {annot} is not an annotation cell")),
                    }
                }
                (PiNode::Arg(arg, rest), GValue::Neutral(a)) => {
                    let rho = Rho::new(RhoNode::LApp(a, rest.clone()));
                    (GhostRule::R(9), GMode::Eval(arg.clone(), Pi::new(PiNode::Coerce(rho))))
                }
                (PiNode::Coerce(rho), GValue::Neutral(a)) => (GhostRule::R9a, GMode::ContRho(GNormal::coerce(a), rho.clone())),
            },
            GMode::ContRho(n, rho) => match rho.node() {
                RhoNode::Cache(loc, rest) => {
                    if loc.kind != LocKind::Annot {
                        return self.violation(format!("normal form cached into argument {loc}"));
                    }
                    self.cells[loc.id] = GCell::Normal(n.clone());
                    written = Some(*loc);
                    (GhostRule::R5Prime, GMode::ContRho(n, rest.clone()))
                }
                RhoNode::LApp(a, pi) => (GhostRule::R(10), GMode::ContPi(GValue::Neutral(GNeutral::app(a.clone(), n)), pi.clone())),
                RhoNode::LamF(x, rest) => (GhostRule::R(11), GMode::ContRho(GNormal::lam(x.clone(), n), rest.clone())),
                RhoNode::Empty => return Ok(GStep::Terminal(n)),
            },
        };
        self.mode = mode;
        Ok(GStep::Moved { rule, allocated, written })
    }
}

/// Projection of a ghost stack onto RKNL frames, top first.
fn project_frames(mode: &GMode) -> Vec<Frame> {
    let mut out = Vec::new();
    let mut cur = match mode {
        GMode::Eval(_, pi) | GMode::ContPi(_, pi) => Link::Pi(pi.clone()),
        GMode::ContRho(_, rho) => Link::Rho(rho.clone()),
    };
    loop {
        cur = match cur {
            Link::Pi(p) => match p.node() {
                PiNode::Cache(l, next) => {
                    out.push(Frame::Cache(*l));
                    Link::Pi(next.clone())
                }
                PiNode::Arg(c, next) => {
                    out.push(Frame::Arg(c.clone()));
                    Link::Pi(next.clone())
                }
                PiNode::Coerce(rho) => Link::Rho(rho.clone()),
            },
            Link::Rho(r) => match r.node() {
                RhoNode::Cache(l, next) => {
                    out.push(Frame::Cache(*l));
                    Link::Rho(next.clone())
                }
                RhoNode::LamF(x, next) => {
                    out.push(Frame::LamF(x.clone()));
                    Link::Rho(next.clone())
                }
                RhoNode::LApp(a, pi) => {
                    out.push(Frame::LApp(a.erase().clone()));
                    Link::Pi(pi.clone())
                }
                RhoNode::Empty => return out,
            },
        }
    }
}

fn project_value(v: &GValue) -> Value {
    match v {
        GValue::Neutral(a) => Value::PlainTerm(a.erase().clone()),
        GValue::Annot { lam, env, annot } => Value::AnnotAbs { lam: lam.clone(), env: env.clone(), annot: *annot },
    }
}

/// The RKNL mode and stack this ghost state stands for.
pub fn project(mode: &GMode) -> (Mode, Stack) {
    let m = match mode {
        GMode::Eval(c, _) => Mode::Eval(c.clone()),
        GMode::ContPi(v, _) => Mode::Cont(project_value(v)),
        GMode::ContRho(n, _) => Mode::Cont(Value::PlainTerm(n.erase().clone())),
    };
    (m, Stack::from_frames(project_frames(mode)))
}

pub fn project_cell(cell: &GCell) -> Storable {
    match cell {
        GCell::Todo(c) => Storable::TodoClosure(c.clone()),
        GCell::Done(v) => Storable::Done(project_value(v)),
        GCell::Empty => Storable::TodoEmpty,
        GCell::Normal(n) => Storable::Done(Value::PlainTerm(n.erase().clone())),
    }
}

/// Whether a machine stack, cache frames dropped, is a normal-order
/// context: argument frames only where no binder frame lies between them
/// and the hole (or the nearest neutral-application frame), and every
/// left-application frame holds a neutral term.
pub fn stack_decodes_to_no_context(stack: &Stack, classifier: &mut Classifier) -> bool {
    let placeholder = Term::var(Ident::source("_"));
    let frames: Vec<ContextFrame> = stack
        .iter()
        .filter_map(|f| match f {
            Frame::Arg(_) => Some(ContextFrame::Arg(placeholder.clone())),
            Frame::LApp(t) => Some(ContextFrame::Fun(t.clone())),
            Frame::LamF(x) => Some(ContextFrame::Lam(x.clone())),
            Frame::Cache(_) => None,
        })
        .collect();
    oracle::is_normal_order_frames(frames.iter(), classifier)
}

/// First point where the two machines disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// RKNL step index (1-based) at which the mismatch was seen.
    pub step: u64,
    pub reason: String,
    pub rknl: String,
    pub ghost: String,
}

#[derive(Debug, Clone, Default)]
pub struct LockstepReport {
    pub steps: u64,
    pub ghost_steps: u64,
    pub silent_steps: u64,
    pub completed: bool,
    pub divergence: Option<Divergence>,
    /// RKNL step indices whose stack was not a normal-order context.
    pub bad_stacks: Vec<u64>,
}

impl LockstepReport {
    pub fn passed(&self) -> bool {
        self.divergence.is_none() && self.bad_stacks.is_empty()
    }
}

/// Remembers projected stack nodes already matched against RKNL stack
/// nodes, so each step only compares the frames it changed.
struct StackMatcher {
    seen: std::collections::HashSet<(usize, usize)>,
    keep: Vec<(Link, Stack)>,
    eq: SharedEq,
}

impl StackMatcher {
    fn frame_eq(&mut self, a: &Frame, b: &Frame) -> bool {
        match (a, b) {
            (Frame::LApp(x), Frame::LApp(y)) => self.eq.eq(x, y),
            _ => a == b,
        }
    }

    fn matches(&mut self, mode: &GMode, stack: &Stack) -> bool {
        let mut cur = match mode {
            GMode::Eval(_, pi) | GMode::ContPi(_, pi) => Link::Pi(pi.clone()),
            GMode::ContRho(_, rho) => Link::Rho(rho.clone()),
        };
        let mut s = stack.clone();
        let mut visited = Vec::new();
        let ok = loop {
            let key = match &cur {
                Link::Pi(p) => (p.addr(), s.iter().next().map_or(0, |f| f as *const Frame as usize)),
                Link::Rho(r) => (r.addr(), s.iter().next().map_or(0, |f| f as *const Frame as usize)),
            };
            if self.seen.contains(&key) {
                break true;
            }
            let next_ghost = match &cur {
                Link::Pi(p) => match p.node() {
                    PiNode::Coerce(rho) => {
                        visited.push((key, Link::Pi(p.clone()), s.clone()));
                        cur = Link::Rho(rho.clone());
                        continue;
                    }
                    PiNode::Cache(l, next) => Some((Frame::Cache(*l), Link::Pi(next.clone()))),
                    PiNode::Arg(c, next) => Some((Frame::Arg(c.clone()), Link::Pi(next.clone()))),
                },
                Link::Rho(r) => match r.node() {
                    RhoNode::Cache(l, next) => Some((Frame::Cache(*l), Link::Rho(next.clone()))),
                    RhoNode::LamF(x, next) => Some((Frame::LamF(x.clone()), Link::Rho(next.clone()))),
                    RhoNode::LApp(a, pi) => Some((Frame::LApp(a.erase().clone()), Link::Pi(pi.clone()))),
                    RhoNode::Empty => None,
                },
            };
            match (next_ghost, s.pop().map(|(f, rest)| (f.clone(), rest))) {
                (None, None) => break true,
                (Some((gf, gnext)), Some((rf, rnext))) => {
                    if !self.frame_eq(&gf, &rf) {
                        break false;
                    }
                    let here = match &cur {
                        Link::Pi(p) => Link::Pi(p.clone()),
                        Link::Rho(r) => Link::Rho(r.clone()),
                    };
                    visited.push((key, here, s.clone()));
                    cur = gnext;
                    s = rnext;
                }
                _ => break false,
            }
        };
        if ok {
            for (key, link, st) in visited {
                self.seen.insert(key);
                self.keep.push((link, st));
            }
        }
        ok
    }
}

fn describe_ghost(g: &GhostMachine) -> String {
    let (mode, stack) = project(g.mode());
    format!("{} / stack depth {}", describe_mode(&mode), stack.depth())
}

fn describe_mode(mode: &Mode) -> String {
    match mode {
        Mode::Eval(c) => format!("eval {}", c.term),
        Mode::Cont(Value::PlainTerm(t)) => format!("cont {t}"),
        Mode::Cont(Value::AnnotAbs { lam, annot, .. }) => format!("cont ({lam})^{annot}"),
    }
}

/// Run RKNL and the ghost machine side by side for at most `fuel` RKNL
/// steps, comparing the projected ghost state with the RKNL state after
/// every step.
pub fn lockstep_check(t: &Term, fuel: u64) -> Result<LockstepReport, GhostError> {
    let mut m = Machine::new(t, MachineOptions::default());
    let mut g = GhostMachine::new(t);
    let mut report = LockstepReport::default();
    let mut matcher = StackMatcher { seen: Default::default(), keep: Vec::new(), eq: SharedEq::new() };
    let mut classifier = Classifier::new();
    let diverge = |report: &mut LockstepReport, m: &Machine, g: &GhostMachine, reason: String| {
        report.divergence = Some(Divergence {
            step: m.steps(),
            reason,
            rknl: format!("{} / stack depth {}", describe_mode(&m.config().mode), m.config().stack.depth()),
            ghost: describe_ghost(g),
        });
    };
    while m.steps() < fuel {
        let rstep = m.step()?;
        // advance the ghost past silent coercions
        let gstep = loop {
            let s = g.step()?;
            report.ghost_steps += 1;
            match s {
                GStep::Moved { rule: GhostRule::R9a, .. } => report.silent_steps += 1,
                other => break other,
            }
        };
        match (rstep, gstep) {
            (Step::Terminal(out), GStep::Terminal(n)) => {
                report.ghost_steps -= 1;
                if !matcher.eq.eq(&out, n.erase()) {
                    diverge(&mut report, &m, &g, format!("outputs differ: {out} vs {}", n.erase()));
                }
                report.completed = true;
                break;
            }
            (Step::Moved(info), GStep::Moved { rule, allocated, written }) => {
                report.steps += 1;
                if rule.machine_rule() != Some(info.rule) {
                    diverge(&mut report, &m, &g, format!("rule {} vs ghost rule {rule}", info.rule));
                    break;
                }
                if allocated != info.allocated || written != info.written {
                    diverge(&mut report, &m, &g, "different store effects".into());
                    break;
                }
                let (gmode, _) = project(g.mode());
                let same_mode = match (&gmode, &m.config().mode) {
                    (Mode::Cont(Value::PlainTerm(a)), Mode::Cont(Value::PlainTerm(b))) => matcher.eq.eq(a, b),
                    (a, b) => a == b,
                };
                if !same_mode {
                    diverge(&mut report, &m, &g, "focus differs".into());
                    break;
                }
                if !matcher.matches(g.mode(), &m.config().stack) {
                    diverge(&mut report, &m, &g, "stack differs".into());
                    break;
                }
                for loc in info.allocated.into_iter().chain(info.written) {
                    let cell_ok = match (g.cell(loc), m.store().get(loc)) {
                        (Some(gc), rc) => match (project_cell(gc), rc) {
                            (Storable::Done(Value::PlainTerm(a)), Storable::Done(Value::PlainTerm(b))) => {
                                matcher.eq.eq(&a, b)
                            }
                            (a, b) => &a == b,
                        },
                        (None, _) => false,
                    };
                    if !cell_ok {
                        diverge(&mut report, &m, &g, format!("store cell {loc} differs"));
                        break;
                    }
                }
                if report.divergence.is_some() {
                    break;
                }
                if !stack_decodes_to_no_context(&m.config().stack, &mut classifier) {
                    report.bad_stacks.push(m.steps());
                }
            }
            (Step::Terminal(_), GStep::Moved { rule, .. }) => {
                diverge(&mut report, &m, &g, format!("RKNL finished but ghost took rule {rule}"));
                break;
            }
            (Step::Moved(info), GStep::Terminal(_)) => {
                diverge(&mut report, &m, &g, format!("ghost finished but RKNL took rule {}", info.rule));
                break;
            }
        }
    }
    if report.divergence.is_none() && m.store().len() != g.store_len() {
        diverge(&mut report, &m, &g, "store sizes differ".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::LocKind;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    const ELABORATE: &str = "(\\x.c x x) ((\\y.\\z.(\\w.w) z) ((\\x.x x) (\\x.x x)))";

    #[test]
    fn load_pushes_coercion_frame() {
        let g = GhostMachine::new(&t("\\x.x"));
        let GMode::Eval(_, pi) = g.mode() else { panic!() };
        assert!(matches!(pi.node(), PiNode::Coerce(r) if matches!(r.node(), RhoNode::Empty)));
    }

    #[test]
    fn identity_run() {
        let mut g = GhostMachine::new(&t("\\x.x"));
        let mut rules = Vec::new();
        let out = loop {
            match g.step().unwrap() {
                GStep::Moved { rule, .. } => rules.push(rule.to_string()),
                GStep::Terminal(n) => break n,
            }
        };
        assert_eq!(rules, ["2", "7", "4", "9a", "11", "5'"]);
        assert_eq!(out.erase().to_string(), "\\x_0.x_0");
    }

    #[test]
    fn elaborate_example_lockstep() {
        let r = lockstep_check(&t(ELABORATE), 100).unwrap();
        assert!(r.passed(), "{:?}", r.divergence);
        assert!(r.completed);
        assert_eq!(r.steps, 27);
        assert_eq!(r.ghost_steps, 27 + r.silent_steps);
        assert!(r.silent_steps > 0);
    }

    #[test]
    fn open_terms_lockstep() {
        for s in ["\\x.x", "y ((\\x.x) (\\x.x))", "x", "\\f.f (\\x.x) ((\\y.y) f)"] {
            let r = lockstep_check(&t(s), 100).unwrap();
            assert!(r.passed() && r.completed, "{s}: {:?}", r.divergence);
        }
    }

    #[test]
    fn divergent_term_within_fuel() {
        let r = lockstep_check(&t("(\\x.x x) (\\x.x x)"), 500).unwrap();
        assert!(r.passed());
        assert!(!r.completed);
        assert_eq!(r.steps, 500);
    }

    #[test]
    fn stack_shapes() {
        let mut c = Classifier::new();
        let arg = Frame::Arg(Closure::new(t("c"), Env::new()));
        let lamf = Frame::LamF(Ident::source("x"));
        let cache = Frame::Cache(Location { id: 0, kind: LocKind::Annot });
        assert!(stack_decodes_to_no_context(&Stack::from_frames([arg.clone()]), &mut c));
        assert!(stack_decodes_to_no_context(&Stack::from_frames([lamf.clone(), cache]), &mut c));
        assert!(!stack_decodes_to_no_context(&Stack::from_frames([lamf, arg]), &mut c));
    }

    #[test]
    fn deep_ghost_stack_drops() {
        let mut rho = Rho::empty();
        for i in 0..200_000 {
            rho = Rho::new(RhoNode::LamF(Ident::fresh("x", i), rho));
            let pi = Pi::new(PiNode::Coerce(rho));
            rho = Rho::new(RhoNode::LApp(GNeutral::var(Ident::source("y")), pi));
        }
        drop(rho);
    }
}
