//! Random closed terms for the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rknl::{Ident, Term};

/// Binder names are drawn from a small pool so shadowing is common.
const NAMES: [&str; 4] = ["x", "y", "z", "w"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly shaped closed term with exactly `size` nodes (`size >= 2`).
pub fn closed_term(rng: &mut impl Rng, size: usize) -> Term {
    assert!(size >= 2, "a closed term has at least two nodes");
    gen(rng, size, &mut Vec::new())
}

/// A term of `size` nodes whose free variables are among `scope`.
pub fn term_in_scope(rng: &mut impl Rng, size: usize, scope: &mut Vec<Ident>) -> Term {
    gen(rng, size, scope)
}

fn gen(rng: &mut impl Rng, size: usize, scope: &mut Vec<Ident>) -> Term {
    let leaf_ok = !scope.is_empty();
    if size == 1 {
        return Term::var(scope[rng.gen_range(0..scope.len())].clone());
    }
    // an application needs two parts, each buildable in this scope
    let min_part = if leaf_ok { 1 } else { 2 };
    let can_app = size > 2 * min_part;
    if can_app && rng.gen_bool(0.5) {
        let left = rng.gen_range(min_part..=size - 1 - min_part);
        let f = gen(rng, left, scope);
        let a = gen(rng, size - 1 - left, scope);
        Term::app(f, a)
    } else {
        let x = Ident::source(NAMES[rng.gen_range(0..NAMES.len())]);
        scope.push(x.clone());
        let body = gen(rng, size - 1, scope);
        scope.pop();
        Term::lam(x, body)
    }
}

/// `count` random closed terms of size `2..=max_size` accepted by `keep`.
pub fn closed_terms(seed: u64, count: usize, max_size: usize, mut keep: impl FnMut(&Term) -> bool) -> Vec<Term> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let size = rng.gen_range(2..=max_size);
        let t = closed_term(&mut rng, size);
        if keep(&t) {
            out.push(t);
        }
    }
    out
}

/// Possibly open terms over a handful of names.
pub fn arb_term() -> impl proptest::strategy::Strategy<Value = Term> {
    use proptest::prelude::*;
    let leaf = prop::sample::select(vec!["x", "y", "z", "a"]).prop_map(|s| Term::var(Ident::source(s)));
    leaf.prop_recursive(7, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (prop::sample::select(vec!["x", "y", "z"]), inner).prop_map(|(x, b)| Term::lam(Ident::source(x), b)),
        ]
    })
}

/// Abstract every free variable.
pub fn close(t: Term) -> Term {
    t.free_vars().into_iter().fold(t, |t, x| Term::lam(x, t))
}

pub fn arb_closed_term() -> impl proptest::strategy::Strategy<Value = Term> {
    use proptest::strategy::Strategy;
    arb_term().prop_map(close)
}
