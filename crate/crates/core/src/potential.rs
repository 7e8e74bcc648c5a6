//! The potential function of RKNL configurations.
//!
//! ```text
//! Φt(t1 t2) = 3 + Φt(t1) + Φt(t2)    Φs([])       = 0
//! Φt(λx.t)  = 4 + Φt(t)              Φs(□ (t,e)·s) = 2 + Φt(t) + Φs(s)
//! Φt(x)     = 2                      Φs(t □ · s)   = 1 + Φs(s)
//! Φv(t)     = 0                      Φs(λx.□ · s)  = 1 + Φs(s)
//! Φv((λx.t, e)^ℓ) = 1                Φs(ℓ := □ · s) = 1 + Φs(s)
//! ```
//!
//! The store contributes `Φt(t)` for every reachable argument location
//! still holding `todo (t, e)`, and `2 + Φt(t)` for every annotation `ℓ` of
//! an abstraction `(λx.t, e)^ℓ` occurring in the configuration whose cell is
//! still `todo ⊥`. Locations with a cache frame on the stack contribute
//! nothing. A configuration's potential is that of its focus, its stack and
//! its store.
//!
//! Every transition except rule 6 strictly lowers the potential, and rule 6
//! raises it by less than the potential of the loaded term, which bounds
//! the length of a run by `(β + 1) · Φt(t0)` where `β` counts rule-6 steps.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::machine::{Config, Frame, LocKind, Location, Mode, Storable, Store, StoreView, Trace, Value};
use crate::term::{MeasureOverflow, Node, Term};

/// `Φt`, computed on the unfolded tree.
pub fn phi_term(t: &Term) -> Result<u64, MeasureOverflow> {
    t.fold_measure(&|_| Some(2), &|a, b| a.checked_add(b)?.checked_add(3), &|b| b.checked_add(4))
}

/// `Φv`
pub fn phi_value(v: &Value) -> u64 {
    match v {
        Value::PlainTerm(_) => 0,
        Value::AnnotAbs { .. } => 1,
    }
}

/// Caches `Φt` of the (shared) source subterms a run keeps revisiting.
#[derive(Default)]
pub struct Potential {
    memo: HashMap<usize, u64>,
    keep: Vec<Term>,
}

impl Potential {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(&mut self, t: &Term) -> Result<u64, MeasureOverflow> {
        if let Some(&p) = self.memo.get(&t.addr()) {
            return Ok(p);
        }
        let p = phi_term(t)?;
        self.memo.insert(t.addr(), p);
        self.keep.push(t.clone());
        Ok(p)
    }

    /// `Φs`
    pub fn stack<'a>(&mut self, frames: impl IntoIterator<Item = &'a Frame>) -> Result<u64, MeasureOverflow> {
        let mut sum = 0u64;
        for f in frames {
            let p = match f {
                Frame::Arg(c) => self.term(&c.term)?.checked_add(2).ok_or(MeasureOverflow)?,
                Frame::LApp(_) | Frame::LamF(_) | Frame::Cache(_) => 1,
            };
            sum = sum.checked_add(p).ok_or(MeasureOverflow)?;
        }
        Ok(sum)
    }

    /// `Φσ` of a configuration against the store it sees.
    pub fn store(&mut self, k: &Config, view: StoreView<'_>) -> Result<u64, MeasureOverflow> {
        let cached: HashSet<Location> = k
            .stack
            .iter()
            .filter_map(|f| match f {
                Frame::Cache(l) => Some(*l),
                _ => None,
            })
            .collect();
        let mut seen = HashSet::new();
        // annotation locations of abstractions found in the configuration,
        // with the abstraction they annotate
        let mut annots: HashMap<Location, Term> = HashMap::new();
        let mut todo: Vec<Location> = Vec::new();
        let add_value = |v: &Value, todo: &mut Vec<Location>, annots: &mut HashMap<Location, Term>| {
            if let Value::AnnotAbs { lam, env, annot } = v {
                annots.entry(*annot).or_insert_with(|| lam.clone());
                todo.extend(env.values().copied());
            }
        };
        match &k.mode {
            Mode::Eval(c) => todo.extend(c.env.values().copied()),
            Mode::Cont(v) => add_value(v, &mut todo, &mut annots),
        }
        for f in k.stack.iter() {
            match f {
                Frame::Arg(c) => todo.extend(c.env.values().copied()),
                Frame::Cache(l) => todo.push(*l),
                Frame::LApp(_) | Frame::LamF(_) => {}
            }
        }
        let mut sum = 0u64;
        while let Some(loc) = todo.pop() {
            if !seen.insert(loc) {
                continue;
            }
            match view.get(loc) {
                Some(Storable::TodoClosure(c)) => {
                    if loc.kind == LocKind::Arg && !cached.contains(&loc) {
                        sum = sum.checked_add(self.term(&c.term)?).ok_or(MeasureOverflow)?;
                    }
                    todo.extend(c.env.values().copied());
                }
                Some(Storable::Done(v)) => add_value(v, &mut todo, &mut annots),
                Some(Storable::TodoEmpty) | None => {}
            }
        }
        for (annot, lam) in annots {
            if cached.contains(&annot) || !matches!(view.get(annot), Some(Storable::TodoEmpty)) {
                continue;
            }
            let Node::Lam(_, body) = lam.node() else { continue };
            let p = self.term(body)?.checked_add(2).ok_or(MeasureOverflow)?;
            sum = sum.checked_add(p).ok_or(MeasureOverflow)?;
        }
        Ok(sum)
    }

    /// `Φk`, returned together with its store part.
    pub fn config(&mut self, k: &Config, store: &Store) -> Result<(u64, u64), MeasureOverflow> {
        let focus = match &k.mode {
            Mode::Eval(c) => self.term(&c.term)?,
            Mode::Cont(v) => phi_value(v),
        };
        let stack = self.stack(k.stack.iter())?;
        let sigma = self.store(k, store.at(k.time))?;
        let total = focus.checked_add(stack).and_then(|s| s.checked_add(sigma)).ok_or(MeasureOverflow)?;
        Ok((total, sigma))
    }
}

/// `Φk` of a configuration, with a fresh cache.
pub fn phi_config(k: &Config, store: &Store) -> Result<u64, MeasureOverflow> {
    Ok(Potential::new().config(k, store)?.0)
}

/// `Φσ` of a configuration, with a fresh cache.
pub fn phi_store(k: &Config, store: &Store) -> Result<u64, MeasureOverflow> {
    Ok(Potential::new().config(k, store)?.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PotentialRecord {
    pub step: u64,
    /// `None` for the loaded configuration.
    pub rule: Option<u8>,
    pub phi_config: u64,
    pub phi_store: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A step other than rule 6 did not lower the potential.
    NoDecrease { step: u64, rule: u8, before: u64, after: u64 },
    /// A rule-6 step raised the potential by `Φt(t0)` or more.
    IncreaseTooLarge { step: u64, before: u64, after: u64 },
    /// More steps than `(β + 1) · Φt(t0)`.
    Bilinearity { steps: u64, beta_steps: u64, phi_t0: u64 },
    Overflow { step: u64 },
}

#[derive(Debug, Clone)]
pub struct PotentialReport {
    pub records: Vec<PotentialRecord>,
    pub phi_t0: u64,
    pub violations: Vec<Violation>,
}

impl PotentialReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Steps at which the potential went up.
    pub fn increases(&self) -> Vec<u64> {
        self.records.windows(2).filter(|w| w[1].phi_config > w[0].phi_config).map(|w| w[1].step).collect()
    }

    pub fn non_increasing(&self) -> bool {
        self.increases().is_empty()
    }

    /// CSV `step,rule,phi_config,phi_store`, one row per configuration.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,rule,phi_config,phi_store\n");
        for r in &self.records {
            let rule = r.rule.map(|r| r.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", r.step, rule, r.phi_config, r.phi_store));
        }
        out
    }
}

/// Check the decrease and increase properties on every step of a traced
/// run of `t0`, and the step bound at its end.
pub fn check_run(t0: &Term, trace: &Trace, store: &Store) -> PotentialReport {
    let mut pot = Potential::new();
    let mut violations = Vec::new();
    let phi_t0 = match pot.term(t0) {
        Ok(p) => p,
        Err(_) => {
            return PotentialReport { records: Vec::new(), phi_t0: 0, violations: vec![Violation::Overflow { step: 0 }] }
        }
    };
    let mut records = Vec::with_capacity(trace.steps.len() + 1);
    let configs = std::iter::once((None, &trace.initial)).chain(trace.steps.iter().map(|(i, k)| (Some(i.rule), k)));
    let mut beta_steps = 0;
    for (rule, k) in configs {
        let Ok((phi_config, phi_store)) = pot.config(k, store) else {
            violations.push(Violation::Overflow { step: k.time });
            return PotentialReport { records, phi_t0, violations };
        };
        let before = records.last().map(|r: &PotentialRecord| r.phi_config);
        records.push(PotentialRecord { step: k.time, rule, phi_config, phi_store });
        let (Some(rule), Some(before)) = (rule, before) else { continue };
        let after = phi_config;
        if rule == 6 {
            beta_steps += 1;
            if after >= before.saturating_add(phi_t0) {
                violations.push(Violation::IncreaseTooLarge { step: k.time, before, after });
            }
        } else if after >= before {
            violations.push(Violation::NoDecrease { step: k.time, rule, before, after });
        }
    }
    let steps = trace.steps.len() as u64;
    if u128::from(steps) > u128::from(beta_steps + 1) * u128::from(phi_t0) {
        violations.push(Violation::Bilinearity { steps, beta_steps, phi_t0 });
    }
    PotentialReport { records, phi_t0, violations }
}
