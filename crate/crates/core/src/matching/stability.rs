use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ChoiceFunction, Matching, MatchingError};

/// Largest universe `check_substitutability` will enumerate (2^15 subsets).
pub const SUBSTITUTABILITY_GUARD: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingPair {
    pub proposer: usize,
    pub receiver: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Blocked(BlockingPair),
}

impl Stability {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stability::Stable)
    }

    pub fn blocking_pair(&self) -> Option<BlockingPair> {
        match *self {
            Stability::Stable => None,
            Stability::Blocked(pair) => Some(pair),
        }
    }
}

/// Scans every unmatched cross pair (v, s) and reports the first one where
/// both would pick the other: s ∈ C_v(µ(v) ∪ {s}) and v ∈ C_s(µ(s) ∪ {v}).
pub fn is_pairwise_stable<P: ChoiceFunction, R: ChoiceFunction>(
    matching: &Matching,
    proposers: &[P],
    receivers: &[R],
) -> Stability {
    for (v, proposer) in proposers.iter().enumerate() {
        for (s, receiver) in receivers.iter().enumerate() {
            if matching.contains(v, s) {
                continue;
            }
            if !proposer.admits(matching.partners_of_proposer(v), s) {
                continue;
            }
            if receiver.admits(matching.partners_of_receiver(s), v) {
                return Stability::Blocked(BlockingPair { proposer: v, receiver: s });
            }
        }
    }
    Stability::Stable
}

/// Exhaustively checks that for every S ⊆ `universe` and k, k′ ∈ C(S),
/// k ∈ C(S \ {k′}).
pub fn check_substitutability<C: ChoiceFunction>(choice: &C, universe: &[usize]) -> Result<bool, MatchingError> {
    let universe: Vec<usize> = universe.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if universe.len() > SUBSTITUTABILITY_GUARD {
        return Err(MatchingError::UniverseTooLarge { size: universe.len(), guard: SUBSTITUTABILITY_GUARD });
    }
    for mask in 0u32..(1 << universe.len()) {
        let subset: BTreeSet<usize> = universe
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask & (1 << bit) != 0)
            .map(|(_, &a)| a)
            .collect();
        let chosen = choice.choose(&subset);
        for &dropped in &chosen {
            let mut smaller = subset.clone();
            smaller.remove(&dropped);
            let rechosen = choice.choose(&smaller);
            if chosen.iter().any(|k| *k != dropped && !rechosen.contains(k)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::matching::{AgentId, PreferenceOrder};

    fn prop(i: usize, ranking: &[usize], quota: usize) -> PreferenceOrder {
        PreferenceOrder::new(AgentId::proposer(i), ranking.to_vec(), quota).unwrap()
    }

    fn recv(i: usize, ranking: &[usize], quota: usize) -> PreferenceOrder {
        PreferenceOrder::new(AgentId::receiver(i), ranking.to_vec(), quota).unwrap()
    }

    #[test]
    fn empty_matching_without_acceptable_pairs_is_stable() {
        let props = [prop(0, &[], 1), prop(1, &[], 1)];
        let recvs = [recv(0, &[], 1)];
        assert!(is_pairwise_stable(&Matching::empty(2, 1), &props, &recvs).is_stable());
    }

    #[test]
    fn preferred_receiver_with_free_quota_blocks() {
        // v0 ranks s0 ≻ s1, matched to s1; s0 has room and ranks v0 first.
        let props = [prop(0, &[0, 1], 1)];
        let recvs = [recv(0, &[0], 1), recv(1, &[0], 1)];
        let m = Matching::from_pairs(1, 2, [(0, 1)]);
        assert_eq!(
            is_pairwise_stable(&m, &props, &recvs),
            Stability::Blocked(BlockingPair { proposer: 0, receiver: 0 })
        );
    }

    #[test]
    fn full_receiver_with_better_partners_does_not_block() {
        let props = [prop(0, &[0], 1), prop(1, &[0], 1)];
        let recvs = [recv(0, &[0, 1], 1)];
        let m = Matching::from_pairs(2, 1, [(0, 0)]);
        assert!(is_pairwise_stable(&m, &props, &recvs).is_stable());
    }

    #[test]
    fn quota_truncation_is_substitutable() {
        for quota in 0..=5 {
            let order = prop(0, &[3, 0, 4, 1, 2], quota);
            assert!(check_substitutability(&order, &[0, 1, 2, 3, 4]).unwrap());
        }
    }

    #[test]
    fn full_quota_is_trivially_substitutable() {
        let order = prop(0, &[0, 1, 2, 3], 4);
        assert!(check_substitutability(&order, &[0, 1, 2, 3]).unwrap());
    }

    /// Picks {a,b} from {a,b,c} but only {c} once b is gone: removing b
    /// evicts a, which substitutability forbids.
    #[test]
    fn pathological_choice_is_caught() {
        struct Table(BTreeMap<Vec<usize>, Vec<usize>>);
        impl ChoiceFunction for Table {
            fn choose(&self, candidates: &BTreeSet<usize>) -> BTreeSet<usize> {
                let key: Vec<usize> = candidates.iter().copied().collect();
                match self.0.get(&key) {
                    Some(chosen) => chosen.iter().copied().collect(),
                    None => candidates.clone(),
                }
            }
        }
        let (a, b, c) = (0, 1, 2);
        let table = Table(BTreeMap::from([(vec![a, b, c], vec![a, b]), (vec![a, c], vec![c])]));
        assert!(!check_substitutability(&table, &[a, b, c]).unwrap());
    }

    #[test]
    fn oversized_universe_is_rejected() {
        let universe: Vec<usize> = (0..16).collect();
        let order = prop(0, &universe, 2);
        assert_eq!(
            check_substitutability(&order, &universe),
            Err(MatchingError::UniverseTooLarge { size: 16, guard: 15 })
        );
    }
}
