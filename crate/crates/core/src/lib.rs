//! Strong call-by-need normalization of the pure λ-calculus.
//!
//! The centre of the crate is [`machine`], the RKNL abstract machine. It
//! evaluates arguments at most once and computes the normal form of each
//! abstraction at most once, so terms whose normal-order reduction blows up
//! exponentially often normalize in a linear number of steps.
//!
//! Everything else checks that machine:
//!
//! - [`oracle`] is a plain normal-order reducer on terms.
//! - [`decode`] reads machine configurations back as terms and classifies
//!   every step against the oracle.
//! - [`ghost`] runs an instrumented copy of the machine whose stacks carry
//!   their own shape invariants.
//! - [`potential`] computes the potential that bounds run lengths.
//! - [`kl`] is the lazy Krivine machine for weak call-by-need, which the
//!   machine's weak prefix must simulate step for step.
//! - [`families`] builds the benchmark term families with their expected
//!   step counts.
//!
//! ```
//! use rknl::{parse, run, MachineOptions};
//!
//! let t = parse(r"(\x.c x x) ((\y.\z.(\w.w) z) ((\x.x x) (\x.x x)))").unwrap();
//! let r = run(&t, MachineOptions::default(), 1000, false).unwrap();
//! assert_eq!(r.normal_form().unwrap().to_string(), r"c (\z_0.z_0) (\z_0.z_0)");
//! assert_eq!((r.steps, r.beta_steps), (27, 3));
//! ```

pub mod decode;
pub mod families;
pub mod ghost;
pub mod kl;
pub mod machine;
pub mod oracle;
pub mod potential;
pub mod syntax;
pub mod term;

pub use families::{Engine, Family};
pub use machine::{run, Machine, MachineError, MachineOptions, Outcome, RunResult};
pub use oracle::no_normalize;
pub use syntax::{parse, print, ParseError, Style};
pub use term::{alpha_eq, Ident, Term};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/terms.md")]
    mod terms {}
    #[doc = include_str!("../../../book/src/machine.md")]
    mod machine {}
    #[doc = include_str!("../../../book/src/checking.md")]
    mod checking {}
    #[doc = include_str!("../../../book/src/potential.md")]
    mod potential {}
    #[doc = include_str!("../../../book/src/weak.md")]
    mod weak {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
