//! Decoding machine configurations back into terms, and classifying each
//! machine step by what it does to the decoded term.
//!
//! A closure decodes by replacing every variable bound in its environment
//! with what its location was *initialized* with:
//!
//! - a location made by rule 6 decodes to the decoding of its argument
//!   closure, whatever the cell holds now;
//! - a location made by rule 7 decodes to its fresh variable `x̂`;
//! - a variable missing from the environment stays as it is.
//!
//! Abstractions decode structurally with their binder overlined (`λx̄`), and
//! the stack decodes to a context: `□ c` to `□ ⟦c⟧`, `t □` and `λx.□` to
//! themselves, while cache frames vanish.
//!
//! Because only initialization records are consulted, one [`Decoder`] can
//! decode every configuration of a run against the final store and reuse
//! the per-location results.

use std::collections::HashMap;
use std::fmt;

use crate::machine::{Closure, Config, Env, Frame, InitRecord, Location, Mode, Stack, Store, Value};
use crate::oracle::{self, Classifier};
use crate::term::{alpha_eq, Context, ContextFrame, Ident, Node, SharedEq, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
enum DecodeEntry {
    Bound(Ident),
    Loc(Location),
}

pub struct Decoder<'a> {
    store: &'a Store,
    memo: HashMap<usize, Term>,
}

impl<'a> Decoder<'a> {
    pub fn new(store: &'a Store) -> Self {
        Decoder { store, memo: HashMap::new() }
    }

    pub fn closure(&mut self, c: &Closure) -> Term {
        let mut scope: Vec<(Ident, DecodeEntry)> = Vec::new();
        self.term(&c.term, &c.env, &mut scope)
    }

    fn location(&mut self, loc: Location) -> Term {
        if let Some(t) = self.memo.get(&loc.id) {
            return t.clone();
        }
        let t = match self.store.init(loc) {
            InitRecord::ByRule6(c) => {
                let c = c.clone();
                self.closure(&c)
            }
            InitRecord::ByRule7(x_hat) => Term::var(x_hat.clone()),
            // An annotation location never sits in an environment; render
            // it by name rather than fail.
            InitRecord::ByRule2 => Term::var(Ident::location(loc.id)),
        };
        self.memo.insert(loc.id, t.clone());
        t
    }

    fn term(&mut self, t: &Term, env: &Env, scope: &mut Vec<(Ident, DecodeEntry)>) -> Term {
        match t.node() {
            Node::Var(x) => {
                let entry = scope
                    .iter()
                    .rev()
                    .find(|(y, _)| y == x)
                    .map(|(_, e)| e.clone())
                    .or_else(|| env.get(x).map(|&l| DecodeEntry::Loc(l)));
                match entry {
                    Some(DecodeEntry::Bound(bar)) => Term::var(bar),
                    Some(DecodeEntry::Loc(loc)) => self.location(loc),
                    None => t.clone(),
                }
            }
            Node::App(a, b) => {
                let a = self.term(a, env, scope);
                let b = self.term(b, env, scope);
                Term::app(a, b)
            }
            Node::Lam(x, body) => {
                let bar = x.overlined();
                scope.push((x.clone(), DecodeEntry::Bound(bar.clone())));
                let body = self.term(body, env, scope);
                scope.pop();
                Term::lam(bar, body)
            }
        }
    }

    pub fn value(&mut self, v: &Value) -> Term {
        match v {
            Value::PlainTerm(t) => t.clone(),
            Value::AnnotAbs { lam, env, .. } => self.closure(&Closure::new(lam.clone(), env.clone())),
        }
    }

    /// The stack as a context, innermost frame first.
    pub fn stack(&mut self, s: &Stack) -> Context {
        let frames = s
            .iter()
            .filter_map(|f| match f {
                Frame::Arg(c) => Some(ContextFrame::Arg(self.closure(c))),
                Frame::LApp(t) => Some(ContextFrame::Fun(t.clone())),
                Frame::LamF(x) => Some(ContextFrame::Lam(x.clone())),
                Frame::Cache(_) => None,
            })
            .collect();
        Context { frames }
    }

    pub fn config(&mut self, k: &Config) -> Term {
        let focus = match &k.mode {
            Mode::Eval(c) => self.closure(c),
            Mode::Cont(v) => self.value(v),
        };
        self.stack(&k.stack).plug(focus)
    }
}

/// Decode a closure against the store's initialization records.
pub fn decode_closure(c: &Closure, store: &Store) -> Term {
    Decoder::new(store).closure(c)
}

pub fn decode_stack(s: &Stack, store: &Store) -> Context {
    Decoder::new(store).stack(s)
}

pub fn decode_config(k: &Config, store: &Store) -> Term {
    Decoder::new(store).config(k)
}

/// Whether the decoded stack, with cache frames dropped, is a normal-order
/// context.
pub fn stack_is_normal_order(s: &Stack, decoder: &mut Decoder<'_>, classifier: &mut Classifier) -> bool {
    let ctx = decoder.stack(s);
    oracle::is_normal_order_frames(ctx.frames.iter(), classifier)
}

/// What a single machine step did to the decoded term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Decodings are identical (rules 1, 2, 3, 5, 9, 10, 11).
    Equal,
    /// Decodings are α-equivalent (rule 7).
    Alpha,
    /// Exactly one normal-order step, up to α (rule 6).
    Beta,
    /// The given number of normal-order steps, up to α (rules 4, 8).
    Bypass(u64),
    /// Rules 4 and 8 only: the oracle budget ran out before reaching the
    /// target. Not a failure.
    Inconclusive { budget: u64 },
    Misclassified { rule: u8, before: Term, after: Term },
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Misclassified { .. })
    }

    /// Normal-order steps this machine step stands for, when known.
    pub fn no_steps(&self) -> Option<u64> {
        match self {
            Verdict::Equal | Verdict::Alpha => Some(0),
            Verdict::Beta => Some(1),
            Verdict::Bypass(k) => Some(*k),
            Verdict::Inconclusive { .. } | Verdict::Misclassified { .. } => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equal => write!(f, "equal"),
            Verdict::Alpha => write!(f, "alpha"),
            Verdict::Beta => write!(f, "beta"),
            Verdict::Bypass(k) => write!(f, "bypass({k})"),
            Verdict::Inconclusive { budget } => write!(f, "inconclusive(budget {budget})"),
            Verdict::Misclassified { rule, before, after } => {
                write!(f, "MISCLASSIFIED rule {rule}: {before} ~> {after}")
            }
        }
    }
}

/// Check one step against what its rule promises, given the decodings of
/// the configurations before and after it.
pub fn classify_decoded(before: &Term, rule: u8, after: &Term, oracle_fuel: u64, eq: &mut SharedEq) -> Verdict {
    let bad = || Verdict::Misclassified { rule, before: before.clone(), after: after.clone() };
    match rule {
        6 => match oracle::no_step(before) {
            Some(next) if alpha_eq(&next, after) => Verdict::Beta,
            _ => bad(),
        },
        7 => {
            if alpha_eq(before, after) {
                Verdict::Alpha
            } else {
                bad()
            }
        }
        4 | 8 => {
            let mut cur = before.clone();
            for k in 0..=oracle_fuel {
                if alpha_eq(&cur, after) {
                    return Verdict::Bypass(k);
                }
                if k == oracle_fuel {
                    break;
                }
                match oracle::no_step(&cur) {
                    Some(next) => cur = next,
                    None => return bad(),
                }
            }
            Verdict::Inconclusive { budget: oracle_fuel }
        }
        _ => {
            if eq.eq(before, after) {
                Verdict::Equal
            } else {
                bad()
            }
        }
    }
}

/// Decode both configurations and classify the step between them.
pub fn classify_step(k: &Config, rule: u8, k2: &Config, store: &Store, oracle_fuel: u64) -> Verdict {
    let mut d = Decoder::new(store);
    let before = d.config(k);
    let after = d.config(k2);
    classify_decoded(&before, rule, &after, oracle_fuel, &mut SharedEq::new())
}

/// Per-step verdicts for a traced run.
#[derive(Debug, Clone)]
pub struct DecodeReport {
    pub verdicts: Vec<(u8, Verdict)>,
    /// Steps whose decoded stack was not a normal-order context.
    pub bad_contexts: Vec<u64>,
    pub load_ok: bool,
    /// Present for completed runs: the final decoding is the output and is
    /// a normal form.
    pub unload_ok: Option<bool>,
}

impl DecodeReport {
    pub fn passed(&self) -> bool {
        self.load_ok
            && self.unload_ok != Some(false)
            && self.bad_contexts.is_empty()
            && self.verdicts.iter().all(|(_, v)| !v.is_failure())
    }

    /// Total normal-order steps witnessed, if every step was conclusive.
    pub fn witnessed_no_steps(&self) -> Option<u64> {
        self.verdicts.iter().map(|(_, v)| v.no_steps()).sum()
    }

    pub fn rule6_steps(&self) -> u64 {
        self.verdicts.iter().filter(|(r, _)| *r == 6).count() as u64
    }

    pub fn first_failure(&self) -> Option<(usize, &Verdict)> {
        self.verdicts.iter().enumerate().find(|(_, (_, v))| v.is_failure()).map(|(i, (_, v))| (i + 1, v))
    }
}

/// Classify every step of a traced run.
pub fn check_trace(
    t0: &Term,
    trace: &crate::machine::Trace,
    store: &Store,
    output: Option<&Term>,
    oracle_fuel: u64,
) -> DecodeReport {
    let mut d = Decoder::new(store);
    let mut eq = SharedEq::new();
    let mut classifier = Classifier::new();
    let mut prev = d.config(&trace.initial);
    let load_ok = alpha_eq(&prev, t0);
    let mut verdicts = Vec::with_capacity(trace.steps.len());
    let mut bad_contexts = Vec::new();
    for (info, k) in &trace.steps {
        let next = d.config(k);
        verdicts.push((info.rule, classify_decoded(&prev, info.rule, &next, oracle_fuel, &mut eq)));
        if !stack_is_normal_order(&k.stack, &mut d, &mut classifier) {
            bad_contexts.push(k.time);
        }
        prev = next;
    }
    let unload_ok = output.map(|out| eq.eq(&prev, out) && classifier.is_normal(out));
    DecodeReport { verdicts, bad_contexts, load_ok, unload_ok }
}
