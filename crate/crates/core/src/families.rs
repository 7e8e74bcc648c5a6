//! The six benchmark term families and their closed-form step counts.
//!
//! ```text
//! I := λx.x      K := λx.λy.x      Ʞ := λx.λy.y      ω := λx.x x
//! pair := λx.λy.λf.f x y           dub := λx.λf.f x x
//! pred := λn.λf.λx.n (λe.pair (e Ʞ) (f (e Ʞ))) (pair x x) K
//! c_n  := λf.λx.f (f (… (f x)))    (n applications)
//! d_0  := I      d_n := λv.(λx.λk.k (λf.f x x)) v d_{n-1}
//! ```
//!
//! Named constants are inlined, so every family member is a closed term.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::machine::{self, MachineError, MachineOptions};
use crate::oracle;
use crate::term::{Ident, Term};

fn var(x: &str) -> Term {
    Term::var(Ident::source(x))
}

fn lam(x: &str, body: Term) -> Term {
    Term::lam(Ident::source(x), body)
}

fn app(f: Term, a: Term) -> Term {
    Term::app(f, a)
}

pub fn identity() -> Term {
    lam("x", var("x"))
}

pub fn k_comb() -> Term {
    lam("x", lam("y", var("x")))
}

/// `λx.λy.y`, the normal form of `K I`.
pub fn k_flipped() -> Term {
    lam("x", lam("y", var("y")))
}

pub fn omega_small() -> Term {
    lam("x", app(var("x"), var("x")))
}

pub fn omega() -> Term {
    app(omega_small(), omega_small())
}

pub fn pair() -> Term {
    lam("x", lam("y", lam("f", Term::apps(var("f"), [var("x"), var("y")]))))
}

pub fn dub() -> Term {
    lam("x", lam("f", Term::apps(var("f"), [var("x"), var("x")])))
}

pub fn church(n: u32) -> Term {
    let body = (0..n).fold(var("x"), |acc, _| app(var("f"), acc));
    lam("f", lam("x", body))
}

pub fn pred() -> Term {
    let step = lam(
        "e",
        Term::apps(pair(), [app(var("e"), k_flipped()), app(var("f"), app(var("e"), k_flipped()))]),
    );
    let init = Term::apps(pair(), [var("x"), var("x")]);
    lam("n", lam("f", lam("x", Term::apps(var("n"), [step, init, k_comb()]))))
}

pub fn d(n: u32) -> Term {
    (0..n).fold(identity(), |prev, _| {
        let cps = lam("x", lam("k", app(var("k"), lam("f", Term::apps(var("f"), [var("x"), var("x")])))));
        lam("v", Term::apps(cps, [var("v"), prev]))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `c_n c_2 I`
    #[serde(rename = "cn_c2_I")]
    CnC2I,
    /// `pred c_n`
    PredCn,
    /// `λx.(c_n ω) x`
    LamCnOmega,
    /// `c_n dub I`
    #[serde(rename = "cn_dub_I")]
    CnDubI,
    /// `c_n dub (λx.I x)`
    #[serde(rename = "cn_dub_etaI")]
    CnDubEtaI,
    /// `d_n I`
    #[serde(rename = "dn_I")]
    DnI,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::CnC2I, Family::PredCn, Family::LamCnOmega, Family::CnDubI, Family::CnDubEtaI, Family::DnI];

    pub fn name(self) -> &'static str {
        match self {
            Family::CnC2I => "cn_c2_I",
            Family::PredCn => "pred_cn",
            Family::LamCnOmega => "lam_cn_omega",
            Family::CnDubI => "cn_dub_I",
            Family::CnDubEtaI => "cn_dub_etaI",
            Family::DnI => "dn_I",
        }
    }

    /// The family member for `n`. Any `n` is accepted here; the closed forms
    /// hold only for `1 ≤ n ≤ 9`.
    pub fn make(self, n: u32) -> Term {
        let cn = church(n);
        match self {
            Family::CnC2I => Term::apps(cn, [church(2), identity()]),
            Family::PredCn => app(pred(), cn),
            Family::LamCnOmega => lam("x", app(app(cn, omega_small()), var("x"))),
            Family::CnDubI => Term::apps(cn, [dub(), identity()]),
            Family::CnDubEtaI => Term::apps(cn, [dub(), lam("x", app(identity(), var("x")))]),
            Family::DnI => app(d(n), identity()),
        }
    }

    /// Closed-form step count for `engine` at `n`.
    pub fn expected_steps(self, engine: Engine, n: u32) -> Result<u64, FamilyError> {
        if !VALID_N.contains(&n) {
            return Err(FamilyError::OutOfRange(n));
        }
        let n = u64::from(n);
        let p = 1u64 << n;
        Ok(match (self, engine) {
            (Family::CnC2I, Engine::No) => 3 * p - 1,
            (Family::CnC2I, Engine::Rknl | Engine::RknlNo8) => 10 * p + 5 * n + 5,
            (Family::CnC2I, Engine::Kn) => 15 * p - 6,
            (Family::PredCn, Engine::No) => 6 * n + 8,
            (Family::PredCn, Engine::Rknl | Engine::RknlNo8) => 30 * n + 41,
            (Family::PredCn, Engine::Kn) => 26 * n + 25,
            (Family::LamCnOmega, Engine::No) => p + 1,
            (Family::LamCnOmega, Engine::Rknl | Engine::RknlNo8) => 9 * n + 15,
            (Family::LamCnOmega, Engine::Kn) => 12 * p - 3,
            (Family::CnDubI, Engine::No) => p + 1,
            (Family::CnDubI, Engine::Rknl) => 18 * n + 15,
            (Family::CnDubI, Engine::RknlNo8) => 16 * p + 5 * n - 1,
            (Family::CnDubI, Engine::Kn) => 23 * p - 14,
            (Family::CnDubEtaI, Engine::No) => 2 * p + 1,
            (Family::CnDubEtaI, Engine::Rknl) => 18 * n + 20,
            (Family::CnDubEtaI, Engine::RknlNo8) => 21 * p + 5 * n - 1,
            (Family::CnDubEtaI, Engine::Kn) => 26 * p - 14,
            (Family::DnI, Engine::No) => 3 * n + 1,
            (Family::DnI, Engine::Rknl) => 28 * n + 10,
            (Family::DnI, Engine::RknlNo8) => 16 * p + 15 * n - 6,
            (Family::DnI, Engine::Kn) => 22 * p + 7 * n - 15,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, FamilyError> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| FamilyError::Unknown(s.to_string()))
    }
}

/// Range of `n` over which the closed forms are asserted.
pub const VALID_N: std::ops::RangeInclusive<u32> = 1..=9;

/// Step-count columns of the table. `Kn` is documentation only: its
/// closed forms are listed but no such machine is implemented here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Normal-order β-steps.
    No,
    Rknl,
    RknlNo8,
    Kn,
}

impl Engine {
    pub const MEASURED: [Engine; 3] = [Engine::No, Engine::Rknl, Engine::RknlNo8];

    pub fn name(self) -> &'static str {
        match self {
            Engine::No => "no",
            Engine::Rknl => "rknl",
            Engine::RknlNo8 => "rknl_no8",
            Engine::Kn => "kn",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("n = {0} is outside 1..=9, where the closed forms hold")]
    OutOfRange(u32),
    #[error("unknown family {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub family: Family,
    pub n: u32,
    pub engine: Engine,
    /// `None` for the documentation-only column, or when fuel ran out.
    pub measured: Option<u64>,
    pub expected: u64,
}

impl TableRow {
    pub fn matches(&self) -> bool {
        self.measured == Some(self.expected)
    }
}

/// Measure one cell. Fuel is `2·expected + 64` so an off-by-constant
/// discrepancy still finishes and shows up as a mismatch.
pub fn measure(family: Family, engine: Engine, n: u32) -> Result<TableRow, FamilyError> {
    let expected = family.expected_steps(engine, n)?;
    let fuel = 2 * expected + 64;
    let t = family.make(n);
    let measured = match engine {
        Engine::No => oracle::no_normalize(&t, fuel).ok().map(|r| r.beta_steps),
        Engine::Rknl | Engine::RknlNo8 => {
            let opts = MachineOptions { no8: engine == Engine::RknlNo8 };
            let r = machine::run(&t, opts, fuel, false)?;
            r.normal_form().map(|_| r.steps)
        }
        Engine::Kn => None,
    };
    Ok(TableRow { family, n, engine, measured, expected })
}

/// All measured cells for `n_lo..=n_hi`, family-major.
pub fn run_table(n_lo: u32, n_hi: u32) -> Result<Vec<TableRow>, FamilyError> {
    for n in [n_lo, n_hi] {
        if !VALID_N.contains(&n) {
            return Err(FamilyError::OutOfRange(n));
        }
    }
    let mut rows = Vec::new();
    for family in Family::ALL {
        for n in n_lo..=n_hi {
            for engine in Engine::MEASURED {
                rows.push(measure(family, engine, n)?);
            }
        }
    }
    Ok(rows)
}

/// CSV with header `family,n,engine,measured,expected,match`. The
/// documentation-only column has an empty `measured` field and
/// `not-implemented` in place of the verdict.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("family,n,engine,measured,expected,match\n");
    for r in rows {
        let measured = r.measured.map(|m| m.to_string()).unwrap_or_default();
        let verdict = match (r.engine, r.matches()) {
            (Engine::Kn, _) => "not-implemented",
            (_, true) => "true",
            (_, false) => "false",
        };
        out.push_str(&format!("{},{},{},{},{},{}\n", r.family, r.n, r.engine.name(), measured, r.expected, verdict));
    }
    out
}

/// Documentation rows for the KN column.
pub fn kn_rows(n_lo: u32, n_hi: u32) -> Result<Vec<TableRow>, FamilyError> {
    let mut rows = Vec::new();
    for family in Family::ALL {
        for n in n_lo..=n_hi {
            let expected = family.expected_steps(Engine::Kn, n)?;
            rows.push(TableRow { family, n, engine: Engine::Kn, measured: None, expected });
        }
    }
    Ok(rows)
}
