mod common;

use proptest::prelude::*;
use rknl::decode::{check_trace, Verdict};
use rknl::ghost::lockstep_check;
use rknl::kl::{bisim_check, kl_run, BisimFailure, KlOptions, KlOutcome};
use rknl::potential::check_run;
use rknl::{no_normalize, parse, run, MachineOptions, Term};

const ELABORATE: &str = r"(\x.c x x) ((\y.\z.(\w.w) z) ((\x.x x) (\x.x x)))";

#[test]
fn rule_6_count_is_not_the_normal_order_count() {
    let t = parse(ELABORATE).unwrap();
    let r = run(&t, MachineOptions::default(), 1000, true).unwrap();
    let report = check_trace(&t, r.trace.as_ref().unwrap(), &r.store, r.normal_form(), 1000);
    let beta = no_normalize(&t, 1000).unwrap().beta_steps;
    assert!(report.passed());
    assert_eq!(report.rule6_steps(), 3);
    assert_eq!(beta, 5);
    // the two missing steps are skipped by a lookup and a cached normal form
    assert_eq!(report.verdicts[24], (4, Verdict::Bypass(1)));
    assert_eq!(report.verdicts[25], (8, Verdict::Bypass(1)));
    assert_eq!(report.witnessed_no_steps(), Some(beta));
}

#[test]
fn literal_value_guard_breaks_the_lockstep() {
    let t = parse(r"(\x.x) (\y.y)").unwrap();
    let literal = kl_run(&t, KlOptions { literal_guard: true }, 100).unwrap();
    let tagged = kl_run(&t, KlOptions::default(), 100).unwrap();
    assert_eq!(literal.rules, [1, 2, 6, 4]);
    assert_eq!(tagged.rules, [1, 2, 6, 3, 2, 5]);
    assert_eq!(literal.outcome, tagged.outcome);
    let report = bisim_check(&t, 100);
    assert_eq!(report.rules, tagged.rules);
    assert!(report.passed() && report.completed);
}

#[test]
fn bisimulation_reports_open_terms() {
    let report = bisim_check(&parse(r"(\x.x) y").unwrap(), 100);
    assert!(matches!(report.failure, Some(BisimFailure::Error { .. })), "{:?}", report.failure);
}

fn terminating(t: &Term, fuel: u64) -> Option<rknl::RunResult> {
    let r = run(t, MachineOptions::default(), fuel, true).ok()?;
    r.normal_form().is_some().then_some(r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_step_decodes_soundly(t in common::arb_term()) {
        if let Some(r) = terminating(&t, 3_000) {
            let report = check_trace(&t, r.trace.as_ref().unwrap(), &r.store, r.normal_form(), 10_000);
            prop_assert!(report.passed(), "{:?}", report.first_failure());
            if let (Some(w), Ok(no)) = (report.witnessed_no_steps(), no_normalize(&t, 10_000)) {
                prop_assert_eq!(w, no.beta_steps);
            }
        }
    }

    #[test]
    fn ghost_runs_in_lockstep(t in common::arb_term()) {
        let report = lockstep_check(&t, 3_000).unwrap();
        prop_assert!(report.passed(), "{:?} {:?}", report.divergence, report.bad_stacks);
    }

    #[test]
    fn potential_bounds_every_run(t in common::arb_term()) {
        let r = run(&t, MachineOptions::default(), 3_000, true).unwrap();
        let report = check_run(&t, r.trace.as_ref().unwrap(), &r.store);
        prop_assert!(report.passed(), "{:?}", report.violations);
        prop_assert_eq!(report.records.len() as u64, r.steps + 1);
    }

    #[test]
    fn weak_prefix_is_kl(t in common::arb_closed_term()) {
        let report = bisim_check(&t, 3_000);
        prop_assert!(report.passed(), "{}", report.failure.as_ref().unwrap());
        let kl = kl_run(&t, KlOptions::default(), 3_000).unwrap();
        if let KlOutcome::Answer(_) = kl.outcome {
            prop_assert!(report.completed);
            prop_assert_eq!(report.rules, kl.rules);
        }
    }
}
