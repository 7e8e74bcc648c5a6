//! Lambda terms with structural sharing.
//!
//! A [`Term`] is an immutable, reference-counted node. Two references may
//! point at the same node; every observation in this module (equality,
//! printing, [`Term::size`], [`alpha_eq`]) behaves as if the term were the
//! unfolded tree. [`Term::node_count`] is the one place where sharing is
//! visible: it counts distinct nodes.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

/// The class an identifier belongs to.
///
/// Identifiers of different namespaces never compare equal, even when their
/// rendered text coincides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    /// Written by the user.
    Source,
    /// A bound variable as rendered by decoding (`x~`).
    Overlined,
    /// Produced by a fresh-name generator (`x_3`).
    Fresh,
    /// A store location used as a variable name (`#12`).
    Location,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident {
    namespace: Namespace,
    base: Rc<str>,
    index: Option<u64>,
}

impl Ident {
    pub fn source(base: &str) -> Self {
        Ident { namespace: Namespace::Source, base: Rc::from(base), index: None }
    }

    pub fn fresh(base: &str, index: u64) -> Self {
        Ident { namespace: Namespace::Fresh, base: Rc::from(base), index: Some(index) }
    }

    /// The overlined copy of `self`, keeping base and index.
    pub fn overlined(&self) -> Self {
        Ident { namespace: Namespace::Overlined, base: self.base.clone(), index: self.index }
    }

    /// The variable naming store location `id`.
    pub fn location(id: usize) -> Self {
        Ident { namespace: Namespace::Location, base: Rc::from(id.to_string()), index: None }
    }

    /// A fresh identifier sharing the base text of `self`.
    pub fn refreshed(&self, index: u64) -> Self {
        Ident { namespace: Namespace::Fresh, base: self.base.clone(), index: Some(index) }
    }

    pub fn namespace(&self) -> Namespace {
        self.namespace
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn index(&self) -> Option<u64> {
        self.index
    }

    /// The location named, for a location identifier.
    pub fn location_id(&self) -> Option<usize> {
        match self.namespace {
            Namespace::Location => self.base.parse().ok(),
            _ => None,
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.namespace, self.index) {
            (Namespace::Source, _) => write!(f, "{}", self.base),
            (Namespace::Fresh, Some(i)) => write!(f, "{}_{}", self.base, i),
            (Namespace::Fresh, None) => write!(f, "{}_", self.base),
            (Namespace::Overlined, Some(i)) => write!(f, "{}_{}~", self.base, i),
            (Namespace::Overlined, None) => write!(f, "{}~", self.base),
            (Namespace::Location, _) => write!(f, "#{}", self.base),
        }
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug)]
pub enum Node {
    Var(Ident),
    App(Term, Term),
    Lam(Ident, Term),
}

/// A shared, immutable lambda term.
#[derive(Clone)]
pub struct Term(Rc<Node>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("term measure does not fit in 64 bits")]
pub struct MeasureOverflow;

impl Term {
    pub fn var(x: Ident) -> Self {
        Term(Rc::new(Node::Var(x)))
    }

    pub fn app(fun: Term, arg: Term) -> Self {
        Term(Rc::new(Node::App(fun, arg)))
    }

    pub fn lam(x: Ident, body: Term) -> Self {
        Term(Rc::new(Node::Lam(x, body)))
    }

    /// Left-nested application `head a1 a2 ... an`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Self {
        args.into_iter().fold(head, Term::app)
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// True iff both references denote the same shared node.
    pub fn ptr_eq(&self, other: &Term) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    /// Address of the node, usable as a key while the term is alive.
    pub fn addr(&self) -> usize {
        Rc::as_ptr(&self.0) as usize
    }

    pub fn is_lam(&self) -> bool {
        matches!(self.node(), Node::Lam(..))
    }

    /// Number of constructors of the unfolded tree.
    pub fn size(&self) -> Result<u64, MeasureOverflow> {
        self.fold_measure(&|_| Some(1), &|a, b| a.checked_add(b)?.checked_add(1), &|b| b.checked_add(1))
    }

    /// Number of distinct shared nodes.
    pub fn node_count(&self) -> usize {
        let mut seen = HashSet::new();
        let mut todo = vec![self];
        while let Some(t) = todo.pop() {
            if !seen.insert(t.addr()) {
                continue;
            }
            match t.node() {
                Node::Var(_) => {}
                Node::App(a, b) => {
                    todo.push(a);
                    todo.push(b);
                }
                Node::Lam(_, b) => todo.push(b),
            }
        }
        seen.len()
    }

    /// Bottom-up measure over the unfolded tree, memoized per shared node so
    /// that heavily shared terms are measured in time linear in their node
    /// count.
    pub(crate) fn fold_measure(
        &self,
        var: &dyn Fn(&Ident) -> Option<u64>,
        app: &dyn Fn(u64, u64) -> Option<u64>,
        lam: &dyn Fn(u64) -> Option<u64>,
    ) -> Result<u64, MeasureOverflow> {
        fn go(
            t: &Term,
            memo: &mut HashMap<usize, u64>,
            var: &dyn Fn(&Ident) -> Option<u64>,
            app: &dyn Fn(u64, u64) -> Option<u64>,
            lam: &dyn Fn(u64) -> Option<u64>,
        ) -> Result<u64, MeasureOverflow> {
            if let Some(&m) = memo.get(&t.addr()) {
                return Ok(m);
            }
            let m = match t.node() {
                Node::Var(x) => var(x),
                Node::App(a, b) => {
                    let ma = go(a, memo, var, app, lam)?;
                    let mb = go(b, memo, var, app, lam)?;
                    app(ma, mb)
                }
                Node::Lam(_, b) => lam(go(b, memo, var, app, lam)?),
            }
            .ok_or(MeasureOverflow)?;
            memo.insert(t.addr(), m);
            Ok(m)
        }
        go(self, &mut HashMap::new(), var, app, lam)
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        fn go<'a>(t: &'a Term, bound: &mut Vec<&'a Ident>, out: &mut BTreeSet<Ident>) {
            match t.node() {
                Node::Var(x) => {
                    if !bound.contains(&x) {
                        out.insert(x.clone());
                    }
                }
                Node::App(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Node::Lam(x, b) => {
                    bound.push(x);
                    go(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, x: &Ident) -> bool {
        match self.node() {
            Node::Var(y) => x == y,
            Node::App(a, b) => a.has_free(x) || b.has_free(x),
            Node::Lam(y, b) => x != y && b.has_free(x),
        }
    }

    /// Every identifier occurring in the term, bound or free.
    pub fn all_idents(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        let mut seen = HashSet::new();
        let mut todo = vec![self];
        while let Some(t) = todo.pop() {
            if !seen.insert(t.addr()) {
                continue;
            }
            match t.node() {
                Node::Var(x) => {
                    out.insert(x.clone());
                }
                Node::App(a, b) => {
                    todo.push(a);
                    todo.push(b);
                }
                Node::Lam(x, b) => {
                    out.insert(x.clone());
                    todo.push(b);
                }
            }
        }
        out
    }

    /// True iff `other` is `self` or a (shared or structurally equal)
    /// subterm of `self`.
    pub fn contains_subterm(&self, other: &Term) -> bool {
        let mut seen = HashSet::new();
        let mut todo = vec![self];
        while let Some(t) = todo.pop() {
            if t.ptr_eq(other) || t == other {
                return true;
            }
            if !seen.insert(t.addr()) {
                continue;
            }
            match t.node() {
                Node::Var(_) => {}
                Node::App(a, b) => {
                    todo.push(a);
                    todo.push(b);
                }
                Node::Lam(_, b) => todo.push(b),
            }
        }
        false
    }

    pub fn subterm_at(&self, path: &ContextPath) -> Option<Term> {
        let mut t = self;
        for step in &path.0 {
            t = match (step, t.node()) {
                (PathStep::AppLeft, Node::App(a, _)) => a,
                (PathStep::AppRight, Node::App(_, b)) => b,
                (PathStep::LamBody, Node::Lam(_, b)) => b,
                _ => return None,
            };
        }
        Some(t.clone())
    }

    /// Replace the subterm at `path` by `new`, sharing everything off the
    /// path.
    pub fn replace_at(&self, path: &ContextPath, new: Term) -> Option<Term> {
        fn go(t: &Term, steps: &[PathStep], new: Term) -> Option<Term> {
            let Some((step, rest)) = steps.split_first() else {
                return Some(new);
            };
            Some(match (step, t.node()) {
                (PathStep::AppLeft, Node::App(a, b)) => Term::app(go(a, rest, new)?, b.clone()),
                (PathStep::AppRight, Node::App(a, b)) => Term::app(a.clone(), go(b, rest, new)?),
                (PathStep::LamBody, Node::Lam(x, b)) => Term::lam(x.clone(), go(b, rest, new)?),
                _ => return None,
            })
        }
        go(self, &path.0, new)
    }

    /// Decompose the term at `path` into the surrounding context and the
    /// subterm in the hole.
    pub fn decompose(&self, path: &ContextPath) -> Option<(Context, Term)> {
        let mut frames = Vec::with_capacity(path.0.len());
        let mut t = self;
        for step in &path.0 {
            t = match (step, t.node()) {
                (PathStep::AppLeft, Node::App(a, b)) => {
                    frames.push(ContextFrame::Arg(b.clone()));
                    a
                }
                (PathStep::AppRight, Node::App(a, b)) => {
                    frames.push(ContextFrame::Fun(a.clone()));
                    b
                }
                (PathStep::LamBody, Node::Lam(x, b)) => {
                    frames.push(ContextFrame::Lam(x.clone()));
                    b
                }
                _ => return None,
            };
        }
        frames.reverse();
        Some((Context { frames }, t.clone()))
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        match (self.node(), other.node()) {
            (Node::Var(x), Node::Var(y)) => x == y,
            (Node::App(a1, b1), Node::App(a2, b2)) => a1 == a2 && b1 == b2,
            (Node::Lam(x, b1), Node::Lam(y, b2)) => x == y && b1 == b2,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print(self, crate::syntax::Style::Compact))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print(self, crate::syntax::Style::Compact))
    }
}

/// Structural equality on shared terms that remembers node pairs already
/// found equal, so repeated comparisons of large shared values stay cheap.
///
/// The memo keeps both nodes alive, which makes address reuse impossible.
#[derive(Default)]
pub struct SharedEq {
    known: HashSet<(usize, usize)>,
    keep: Vec<(Term, Term)>,
}

impl SharedEq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eq(&mut self, a: &Term, b: &Term) -> bool {
        if a.ptr_eq(b) || self.known.contains(&(a.addr(), b.addr())) {
            return true;
        }
        let same = match (a.node(), b.node()) {
            (Node::Var(x), Node::Var(y)) => x == y,
            (Node::App(a1, b1), Node::App(a2, b2)) => self.eq(a1, a2) && self.eq(b1, b2),
            (Node::Lam(x, b1), Node::Lam(y, b2)) => x == y && self.eq(b1, b2),
            _ => false,
        };
        if same && !matches!(a.node(), Node::Var(_)) {
            self.known.insert((a.addr(), b.addr()));
            self.keep.push((a.clone(), b.clone()));
        }
        same
    }
}

/// Equality up to renaming of bound variables; free variables must match
/// exactly, namespace included.
pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    fn lookup(scope: &[&Ident], x: &Ident) -> Option<usize> {
        scope.iter().rposition(|y| *y == x)
    }
    fn go<'a>(a: &'a Term, b: &'a Term, sa: &mut Vec<&'a Ident>, sb: &mut Vec<&'a Ident>) -> bool {
        match (a.node(), b.node()) {
            (Node::Var(x), Node::Var(y)) => match (lookup(sa, x), lookup(sb, y)) {
                (None, None) => x == y,
                (Some(i), Some(j)) => i == j,
                _ => false,
            },
            (Node::App(a1, b1), Node::App(a2, b2)) => go(a1, a2, sa, sb) && go(b1, b2, sa, sb),
            (Node::Lam(x, b1), Node::Lam(y, b2)) => {
                sa.push(x);
                sb.push(y);
                let r = go(b1, b2, sa, sb);
                sa.pop();
                sb.pop();
                r
            }
            _ => false,
        }
    }
    go(t1, t2, &mut Vec::new(), &mut Vec::new())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathStep {
    AppLeft,
    AppRight,
    LamBody,
}

/// Address of a hole position, outermost step first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ContextPath(pub Vec<PathStep>);

/// One layer of a context around a hole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextFrame {
    /// `□ t`
    Arg(Term),
    /// `t □`
    Fun(Term),
    /// `λx.□`
    Lam(Ident),
}

/// A term with one hole, stored innermost frame first (the frame adjacent to
/// the hole is `frames[0]`), which is the order machine stacks use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Context {
    pub frames: Vec<ContextFrame>,
}

impl Context {
    pub fn hole() -> Self {
        Self::default()
    }

    pub fn plug(&self, t: Term) -> Term {
        self.frames.iter().fold(t, |acc, f| match f {
            ContextFrame::Arg(arg) => Term::app(acc, arg.clone()),
            ContextFrame::Fun(fun) => Term::app(fun.clone(), acc),
            ContextFrame::Lam(x) => Term::lam(x.clone(), acc),
        })
    }

    pub fn path(&self) -> ContextPath {
        ContextPath(
            self.frames
                .iter()
                .rev()
                .map(|f| match f {
                    ContextFrame::Arg(_) => PathStep::AppLeft,
                    ContextFrame::Fun(_) => PathStep::AppRight,
                    ContextFrame::Lam(_) => PathStep::LamBody,
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn size_of_identity() {
        assert_eq!(t("\\x.x").size(), Ok(2));
        assert_eq!(t("(\\x.x x) (\\y.y)").size(), Ok(7));
    }

    #[test]
    fn free_vars_skip_bound() {
        let fv = t("\\x.c x x").free_vars();
        assert_eq!(fv.into_iter().collect::<Vec<_>>(), vec![Ident::source("c")]);
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&t("\\x.x"), &t("\\y.y")));
        assert!(!alpha_eq(&t("\\x.y"), &t("\\x.z")));
        assert!(alpha_eq(&t("\\x.\\y.x y"), &t("\\z.\\y.z y")));
        assert!(!alpha_eq(&t("\\x.\\y.x"), &t("\\x.\\y.y")));
        // free variables are namespace sensitive
        let free_src = Term::var(Ident::source("z"));
        let free_fresh = Term::var(Ident::fresh("z", 0));
        assert!(!alpha_eq(&free_src, &free_fresh));
    }

    #[test]
    fn sharing_counts_once() {
        let i = t("\\x.x");
        let shared = Term::apps(Term::var(Ident::source("c")), [i.clone(), i]);
        assert_eq!(shared.size(), Ok(7));
        // c, app, app, one shared lam with its var
        assert_eq!(shared.node_count(), 5);
        assert_eq!(shared.to_string(), "c (\\x.x) (\\x.x)");
    }

    #[test]
    fn size_overflow_is_reported() {
        let mut t = Term::var(Ident::source("x"));
        for _ in 0..70 {
            t = Term::app(t.clone(), t);
        }
        assert_eq!(t.size(), Err(MeasureOverflow));
        assert_eq!(t.node_count(), 71);
    }

    #[test]
    fn decompose_and_plug_roundtrip() {
        let term = t("\\y.(\\z.(\\x.x) (\\x.x) z) (\\x.x)");
        let path = ContextPath(vec![PathStep::LamBody, PathStep::AppLeft, PathStep::LamBody]);
        let (ctx, hole) = term.decompose(&path).unwrap();
        assert_eq!(ctx.path(), path);
        assert_eq!(hole, t("(\\x.x) (\\x.x) z"));
        assert_eq!(ctx.plug(hole), term);
        assert_eq!(term.subterm_at(&path), Some(t("(\\x.x) (\\x.x) z")));
        let replaced = term.replace_at(&path, t("z")).unwrap();
        assert_eq!(replaced, t("\\y.(\\z.z) (\\x.x)"));
    }

    #[test]
    fn ident_rendering() {
        assert_eq!(Ident::fresh("z", 0).to_string(), "z_0");
        assert_eq!(Ident::source("x").overlined().to_string(), "x~");
        assert_eq!(Ident::location(12).to_string(), "#12");
        assert_ne!(Ident::source("z_0"), Ident::fresh("z", 0));
    }

    #[test]
    fn shared_eq_agrees_with_eq() {
        let a = t("\\f.f (\\x.x) (\\x.x)");
        let b = t("\\f.f (\\x.x) (\\x.x)");
        let mut eq = SharedEq::new();
        assert!(eq.eq(&a, &b));
        assert!(eq.eq(&a, &b));
        assert!(!eq.eq(&a, &t("\\f.f (\\x.x) (\\y.y)")));
    }
}
