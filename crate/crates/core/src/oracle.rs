//! Normal-order (leftmost-outermost) β-reduction by substitution.
//!
//! This is the naive reference reducer the machines are checked against. It
//! rebuilds terms at each step and makes no attempt at sharing beyond leaving
//! untouched subterms in place.
//!
//! Normal-order contexts are
//!
//! ```text
//! N ::= N̄ | λx.N        N̄ ::= □ | N̄ t | a N
//! ```
//!
//! where `a` ranges over neutral terms `a ::= x | a n` and `n` over normal
//! forms `n ::= λx.n | a`.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::term::{Context, ContextFrame, ContextPath, Ident, Node, PathStep, Term};

/// A β-redex `(λbinder.body) argument` found at `path`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedexSite {
    pub path: ContextPath,
    pub binder: Ident,
    pub body: Term,
    pub argument: Term,
}

/// Capture-avoiding substitution `t{x:=s}`.
///
/// A binder is renamed only when it would capture a free variable of `s`
/// and `x` actually occurs under it. The new name is the fresh identifier
/// with the binder's base and the smallest index avoiding every free
/// variable of `s` and of the body.
pub fn subst(t: &Term, x: &Ident, s: &Term) -> Term {
    let fv_s = s.free_vars();
    subst_with(t, x, s, &fv_s).unwrap_or_else(|| t.clone())
}

/// Returns `None` when `t` is unchanged, so untouched subterms stay shared.
fn subst_with(t: &Term, x: &Ident, s: &Term, fv_s: &BTreeSet<Ident>) -> Option<Term> {
    match t.node() {
        Node::Var(y) => (y == x).then(|| s.clone()),
        Node::App(a, b) => {
            let a2 = subst_with(a, x, s, fv_s);
            let b2 = subst_with(b, x, s, fv_s);
            if a2.is_none() && b2.is_none() {
                return None;
            }
            Some(Term::app(a2.unwrap_or_else(|| a.clone()), b2.unwrap_or_else(|| b.clone())))
        }
        Node::Lam(y, body) => {
            if y == x {
                return None;
            }
            if fv_s.contains(y) && body.has_free(x) {
                let mut avoid = body.free_vars();
                avoid.extend(fv_s.iter().cloned());
                let fresh = (0..)
                    .map(|i| y.refreshed(i))
                    .find(|z| !avoid.contains(z))
                    .expect("unbounded index range");
                let renamed = subst(body, y, &Term::var(fresh.clone()));
                let body2 = subst_with(&renamed, x, s, fv_s).unwrap_or(renamed);
                return Some(Term::lam(fresh, body2));
            }
            subst_with(body, x, s, fv_s).map(|b| Term::lam(y.clone(), b))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CtxState {
    /// Inside `N`: may still descend under a binder.
    N,
    /// Inside `N̄`: only the head of an application may be entered.
    NBar,
}

/// The leftmost-outermost redex reachable through a normal-order context.
pub fn find_redex(t: &Term) -> Option<RedexSite> {
    fn go(t: &Term, state: CtxState, path: &mut Vec<PathStep>) -> Option<RedexSite> {
        match t.node() {
            Node::Var(_) => None,
            Node::Lam(_, body) => {
                if state == CtxState::NBar {
                    return None;
                }
                path.push(PathStep::LamBody);
                let r = go(body, CtxState::N, path);
                path.pop();
                r
            }
            Node::App(f, a) => {
                if let Node::Lam(x, body) = f.node() {
                    return Some(RedexSite {
                        path: ContextPath(path.clone()),
                        binder: x.clone(),
                        body: body.clone(),
                        argument: a.clone(),
                    });
                }
                path.push(PathStep::AppLeft);
                let r = go(f, CtxState::NBar, path);
                path.pop();
                if r.is_some() {
                    return r;
                }
                // `f` is neither an abstraction nor contains an N̄-redex, so
                // it is neutral and the argument sits in an `a N` context.
                path.push(PathStep::AppRight);
                let r = go(a, CtxState::N, path);
                path.pop();
                r
            }
        }
    }
    go(t, CtxState::N, &mut Vec::new())
}

/// Contract the redex at `site`.
pub fn contract(t: &Term, site: &RedexSite) -> Term {
    let reduct = subst(&site.body, &site.binder, &site.argument);
    t.replace_at(&site.path, reduct).expect("redex path addresses the term")
}

/// One normal-order step, or `None` on a normal form.
pub fn no_step(t: &Term) -> Option<Term> {
    find_redex(t).map(|site| contract(t, &site))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoOutcome {
    pub normal_form: Term,
    pub beta_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fuel exhausted after {steps} normal-order steps")]
pub struct FuelExhausted {
    pub partial: Term,
    pub steps: u64,
}

/// Reduce to normal form taking at most `fuel` β-steps.
pub fn no_normalize(t: &Term, fuel: u64) -> Result<NoOutcome, FuelExhausted> {
    let mut cur = t.clone();
    let mut steps = 0;
    loop {
        let Some(site) = find_redex(&cur) else {
            return Ok(NoOutcome { normal_form: cur, beta_steps: steps });
        };
        if steps == fuel {
            return Err(FuelExhausted { partial: cur, steps });
        }
        cur = contract(&cur, &site);
        steps += 1;
    }
}

/// Grammar classifier memoized per shared node, so that heavily shared
/// terms are classified in time linear in their node count.
#[derive(Default)]
pub struct Classifier {
    normal: HashMap<usize, bool>,
    neutral: HashMap<usize, bool>,
    keep: Vec<Term>,
}

impl Classifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_normal(&mut self, t: &Term) -> bool {
        if let Some(&b) = self.normal.get(&t.addr()) {
            return b;
        }
        let b = match t.node() {
            Node::Lam(_, body) => self.is_normal(body),
            _ => self.is_neutral(t),
        };
        self.normal.insert(t.addr(), b);
        self.keep.push(t.clone());
        b
    }

    pub fn is_neutral(&mut self, t: &Term) -> bool {
        if let Some(&b) = self.neutral.get(&t.addr()) {
            return b;
        }
        let b = match t.node() {
            Node::Var(_) => true,
            Node::App(f, a) => self.is_neutral(f) && self.is_normal(a),
            Node::Lam(..) => false,
        };
        self.neutral.insert(t.addr(), b);
        self.keep.push(t.clone());
        b
    }
}

/// `n ::= λx.n | a`
pub fn is_normal(t: &Term) -> bool {
    Classifier::new().is_normal(t)
}

/// `a ::= x | a n`
pub fn is_neutral(t: &Term) -> bool {
    Classifier::new().is_neutral(t)
}

/// Whether a context belongs to `N`, checked by the inside-out automaton
/// reading frames from the hole outwards.
///
/// The automaton is in state `N̄` until it crosses a binder, after which only
/// further binders or a neutral-headed application `a □` (returning to `N̄`)
/// may follow. An argument frame `□ t` is accepted only in state `N̄`.
pub fn is_normal_order_context(ctx: &Context) -> bool {
    let mut classifier = Classifier::new();
    is_normal_order_frames(ctx.frames.iter(), &mut classifier)
}

pub(crate) fn is_normal_order_frames<'a>(
    frames: impl IntoIterator<Item = &'a ContextFrame>,
    classifier: &mut Classifier,
) -> bool {
    let mut under_binder = false;
    for frame in frames {
        match frame {
            ContextFrame::Arg(_) => {
                if under_binder {
                    return false;
                }
            }
            ContextFrame::Lam(_) => under_binder = true,
            ContextFrame::Fun(a) => {
                if !classifier.is_neutral(a) {
                    return false;
                }
                under_binder = false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use crate::term::alpha_eq;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    const I: &str = "(\\x.x)";

    #[test]
    fn subst_avoids_capture() {
        let r = subst(&t("\\y.x y"), &Ident::source("x"), &t("y"));
        assert!(alpha_eq(&r, &t("\\z.y z")));
        assert_eq!(r.to_string(), "\\y_0.y y_0");
    }

    #[test]
    fn subst_trivial_cases() {
        assert_eq!(subst(&t("x"), &Ident::source("x"), &t("\\y.y")), t("\\y.y"));
        assert_eq!(subst(&t("\\x.x"), &Ident::source("x"), &t("a b")), t("\\x.x"));
    }

    #[test]
    fn subst_does_not_rename_without_occurrence() {
        let r = subst(&t("\\y.y"), &Ident::source("x"), &t("y"));
        assert_eq!(r, t("\\y.y"));
    }

    #[test]
    fn redex_at_root() {
        let site = find_redex(&t("(\\x.x) (\\x.x)")).unwrap();
        assert!(site.path.0.is_empty());
    }

    #[test]
    fn redex_under_binder_but_not_inside_argument() {
        let term = t(&format!("\\y.(\\z.{I} {I} z) {I}"));
        let site = find_redex(&term).unwrap();
        assert_eq!(site.path.0, vec![PathStep::LamBody]);
        assert_eq!(Term::app(Term::lam(site.binder, site.body), site.argument), t(&format!("(\\z.{I} {I} z) {I}")));
    }

    #[test]
    fn redex_inside_neutral_argument() {
        let term = t(&format!("y ({I} {I})"));
        let site = find_redex(&term).unwrap();
        assert_eq!(site.path.0, vec![PathStep::AppRight]);
        assert_eq!(no_step(&term).unwrap(), t(&format!("y {I}")));
    }

    #[test]
    fn classification() {
        assert!(is_neutral(&t(&format!("y {I}"))));
        assert!(!is_neutral(&t(&format!("y ({I} {I})"))));
        assert!(is_normal(&t(&format!("\\y.{I}"))));
        assert!(!is_normal(&t("(\\x.x) y")));
    }

    #[test]
    fn church_counts() {
        let c2 = "(\\f.\\x.f (f x))";
        let r = no_normalize(&t(&format!("{c2} {c2} {I}")), 100).unwrap();
        assert_eq!(r.beta_steps, 11);
        assert!(alpha_eq(&r.normal_form, &t("\\x.x")));
    }

    #[test]
    fn zero_fuel_on_normal_form() {
        let r = no_normalize(&t("\\x.x"), 0).unwrap();
        assert_eq!(r, NoOutcome { normal_form: t("\\x.x"), beta_steps: 0 });
    }

    #[test]
    fn divergence_runs_out_of_fuel() {
        let omega = t("(\\x.x x) (\\x.x x)");
        let err = no_normalize(&omega, 7).unwrap_err();
        assert_eq!(err.steps, 7);
        assert_eq!(err.partial, omega);
    }

    #[test]
    fn context_automaton() {
        let arg = ContextFrame::Arg(t("c"));
        let lam = ContextFrame::Lam(Ident::source("x"));
        let fun = ContextFrame::Fun(t("y"));
        let ctx = |frames: Vec<ContextFrame>| Context { frames };
        assert!(is_normal_order_context(&ctx(vec![arg.clone()])));
        assert!(is_normal_order_context(&ctx(vec![lam.clone(), fun.clone(), arg.clone()])));
        assert!(is_normal_order_context(&ctx(vec![arg.clone(), lam.clone()])));
        assert!(!is_normal_order_context(&ctx(vec![lam.clone(), arg.clone()])));
        let non_neutral = ContextFrame::Fun(t("\\x.x"));
        assert!(!is_normal_order_context(&ctx(vec![non_neutral])));
    }
}
