//! Randomized property suite for the matching engine.
//!
//! Draws seeded random instances and checks that every deferred-acceptance
//! outcome is a valid matching, is pairwise stable, satisfies both trace
//! propositions, and, on instances small enough to enumerate, is one of the
//! stable matchings found by brute force.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::matching::instance::{random_instance, Instance};
use crate::matching::oracle::{stable_matchings, PairSet};
use crate::matching::{
    is_pairwise_stable, verify_trace_propositions, ChoiceFunction, DeferredAcceptance, MatchingError, PreferenceOrder,
};

/// Largest side length accepted by the suite.
pub const MAX_VERIFY_SIZE: usize = 10;
/// Instances with both sides at most this large are checked against brute force.
pub const ORACLE_SIZE: usize = 4;

/// Deliberate engine faults, for checking that the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Receivers keep their least preferred acceptable offers.
    ReversedReceivers,
}

struct Reversed<'a>(&'a PreferenceOrder);

impl ChoiceFunction for Reversed<'_> {
    fn choose(&self, candidates: &BTreeSet<usize>) -> BTreeSet<usize> {
        let order = self.0;
        order.ranking().iter().rev().filter(|a| candidates.contains(a)).take(order.quota()).copied().collect()
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub max_size: usize,
    pub max_quota: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { trials: 1000, seed: 0, max_size: 4, max_quota: 3, fault: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub reason: String,
    pub instance: Instance,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub trials: usize,
    pub stable: usize,
    pub propositions: usize,
    pub oracle_checked: usize,
    pub oracle_agreed: usize,
    pub failures: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Default)]
struct TrialOutcome {
    stable: bool,
    propositions: bool,
    oracle: Option<bool>,
    failure: Option<String>,
}

fn check_instance(instance: &Instance, fault: Option<Fault>) -> Result<TrialOutcome, MatchingError> {
    let props = &instance.proposers;
    let recvs = &instance.receivers;
    let run = match fault {
        None => DeferredAcceptance::new(props, recvs).run(),
        Some(Fault::ReversedReceivers) => {
            let reversed: Vec<Reversed> = recvs.iter().map(Reversed).collect();
            DeferredAcceptance::new(props, &reversed).run()
        }
    };
    let (matching, trace) = match run {
        Ok(result) => result,
        Err(e) => return Ok(TrialOutcome { failure: Some(e.to_string()), ..Default::default() }),
    };
    let mut reasons = Vec::new();
    if let Err(e) = matching.validate(props, recvs) {
        reasons.push(e.to_string());
    }
    let stability = is_pairwise_stable(&matching, props, recvs);
    if let Some(pair) = stability.blocking_pair() {
        reasons.push(format!("blocking pair (v{}, s{}) in {matching}", pair.proposer, pair.receiver));
    }
    let report = verify_trace_propositions(&trace, recvs);
    reasons.extend(report.violations.iter().map(ToString::to_string));
    let oracle = if props.len() <= ORACLE_SIZE && recvs.len() <= ORACLE_SIZE {
        let found: PairSet = matching.pairs().collect();
        let agreed = stable_matchings(props, recvs)?.contains(&found);
        if !agreed {
            reasons.push(format!("{matching} is not among the enumerated stable matchings"));
        }
        Some(agreed)
    } else {
        None
    };
    Ok(TrialOutcome {
        stable: stability.is_stable(),
        propositions: report.holds(),
        oracle,
        failure: (!reasons.is_empty()).then(|| reasons.join("; ")),
    })
}

pub fn run_verification(options: &VerifyOptions) -> Result<VerifyReport, MatchingError> {
    if options.max_size > MAX_VERIFY_SIZE {
        return Err(MatchingError::UniverseTooLarge { size: options.max_size, guard: MAX_VERIFY_SIZE });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let instances: Vec<Instance> =
        (0..options.trials).map(|_| random_instance(&mut rng, options.max_size, options.max_quota)).collect();
    let outcomes: Vec<TrialOutcome> = instances
        .par_iter()
        .map(|instance| check_instance(instance, options.fault))
        .collect::<Result<_, _>>()?;

    let mut report = VerifyReport { trials: options.trials, ..Default::default() };
    for (trial, (outcome, instance)) in outcomes.into_iter().zip(instances).enumerate() {
        report.stable += usize::from(outcome.stable);
        report.propositions += usize::from(outcome.propositions);
        if let Some(agreed) = outcome.oracle {
            report.oracle_checked += 1;
            report.oracle_agreed += usize::from(agreed);
        }
        if let Some(reason) = outcome.failure {
            report.failures.push(Counterexample { trial, reason, instance });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = run_verification(&VerifyOptions { trials: 300, seed: 4, ..Default::default() }).unwrap();
        assert!(report.passed(), "{:?}", report.failures.first());
        assert_eq!(report.stable, 300);
        assert_eq!(report.oracle_checked, 300);
    }

    #[test]
    fn zero_trials_pass_vacuously() {
        let report = run_verification(&VerifyOptions { trials: 0, ..Default::default() }).unwrap();
        assert!(report.passed());
        assert_eq!(report.trials, 0);
    }

    #[test]
    fn injected_fault_is_detected() {
        let options = VerifyOptions { trials: 200, seed: 1, fault: Some(Fault::ReversedReceivers), ..Default::default() };
        let report = run_verification(&options).unwrap();
        assert!(!report.passed());
        assert!(report.stable < 200);
    }

    #[test]
    fn oversized_bound_is_rejected() {
        assert!(run_verification(&VerifyOptions { max_size: 11, ..Default::default() }).is_err());
    }
}
