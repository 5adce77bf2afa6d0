//! Random matching instances for property checks.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{run_deferred_acceptance, AgentId, Matching, MatchingError, MatchingTrace, PreferenceOrder};

/// Probability that a given opposite-side agent is acceptable.
const ACCEPTANCE_PROBABILITY: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub proposers: Vec<PreferenceOrder>,
    pub receivers: Vec<PreferenceOrder>,
}

impl Instance {
    pub fn solve(&self) -> Result<(Matching, MatchingTrace), MatchingError> {
        run_deferred_acceptance(&self.proposers, &self.receivers)
    }
}

fn random_order<R: Rng>(rng: &mut R, owner: AgentId, opposite: usize, max_quota: usize) -> PreferenceOrder {
    let mut ranking: Vec<usize> = (0..opposite).filter(|_| rng.gen_bool(ACCEPTANCE_PROBABILITY)).collect();
    ranking.shuffle(rng);
    let quota = rng.gen_range(1..=max_quota.max(1));
    PreferenceOrder::new(owner, ranking, quota).expect("shuffled distinct indices")
}

/// Draws side sizes in `1..=max_agents`, random strict rankings over random
/// acceptable subsets, and quotas in `1..=max_quota`.
pub fn random_instance<R: Rng>(rng: &mut R, max_agents: usize, max_quota: usize) -> Instance {
    let n_prop = rng.gen_range(1..=max_agents.max(1));
    let n_recv = rng.gen_range(1..=max_agents.max(1));
    let proposers = (0..n_prop)
        .map(|i| random_order(rng, AgentId::proposer(i), n_recv, max_quota))
        .collect();
    let receivers = (0..n_recv)
        .map(|i| random_order(rng, AgentId::receiver(i), n_prop, max_quota))
        .collect();
    Instance { proposers, receivers }
}
