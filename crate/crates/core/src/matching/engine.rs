use std::collections::BTreeSet;

use super::{validate_orders, ChoiceFunction, Matching, MatchingError, MatchingTrace, PreferenceOrder, RoundRecord, Side};

/// Proposer-side deferred acceptance with simultaneous rounds.
///
/// In every round each proposer offers itself to its choice set among the
/// receivers that have not rejected it yet; each receiver keeps its choice set
/// of the offers it holds and rejects the rest. The loop ends in the first
/// round without rejections, and the offers of that round are the matching.
pub struct DeferredAcceptance<'a, P, R> {
    proposers: &'a [P],
    receivers: &'a [R],
}

impl<'a, P: ChoiceFunction, R: ChoiceFunction> DeferredAcceptance<'a, P, R> {
    pub fn new(proposers: &'a [P], receivers: &'a [R]) -> Self {
        DeferredAcceptance { proposers, receivers }
    }

    /// Every non-final round rejects at least one pair that never gets
    /// proposed again, so `|P|·|R| + 1` rounds always suffice.
    pub fn round_limit(&self) -> usize {
        self.proposers.len() * self.receivers.len() + 1
    }

    pub fn run(&self) -> Result<(Matching, MatchingTrace), MatchingError> {
        let n_prop = self.proposers.len();
        let n_recv = self.receivers.len();
        let all_receivers: BTreeSet<usize> = (0..n_recv).collect();
        let mut rejected_by: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_prop];
        let mut trace = MatchingTrace::default();
        let limit = self.round_limit();

        for round in 0..limit {
            let proposals: Vec<BTreeSet<usize>> = self
                .proposers
                .iter()
                .zip(&rejected_by)
                .map(|(p, rejected)| {
                    let open: BTreeSet<usize> = all_receivers.difference(rejected).copied().collect();
                    p.choose(&open)
                })
                .collect();

            let mut received = vec![BTreeSet::new(); n_recv];
            for (v, offers) in proposals.iter().enumerate() {
                for &s in offers {
                    received[s].insert(v);
                }
            }

            let mut rejections = Vec::new();
            for (s, offers) in received.iter().enumerate() {
                let kept = self.receivers[s].choose(offers);
                for &v in offers.difference(&kept) {
                    rejections.push((v, s));
                }
            }
            rejections.sort_unstable();
            for &(v, s) in &rejections {
                rejected_by[v].insert(s);
            }

            let done = rejections.is_empty();
            trace.push(RoundRecord { round, proposals, received, rejections });
            if done {
                let last = trace.rounds().last().expect("round just pushed");
                let matching = Matching::from_pairs(
                    n_prop,
                    n_recv,
                    last.proposals.iter().enumerate().flat_map(|(v, ss)| ss.iter().map(move |&s| (v, s))),
                );
                return Ok((matching, trace));
            }
        }
        Err(MatchingError::NonTermination { limit })
    }
}

/// Runs deferred acceptance over quota-truncation preferences, proposers
/// proposing. Orders must be indexed by their owner on each side.
pub fn run_deferred_acceptance(
    proposer_prefs: &[PreferenceOrder],
    receiver_prefs: &[PreferenceOrder],
) -> Result<(Matching, MatchingTrace), MatchingError> {
    validate_orders(proposer_prefs, Side::Proposer, receiver_prefs.len())?;
    validate_orders(receiver_prefs, Side::Receiver, proposer_prefs.len())?;
    let (matching, trace) = DeferredAcceptance::new(proposer_prefs, receiver_prefs).run()?;
    matching.validate(proposer_prefs, receiver_prefs)?;
    Ok((matching, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{is_pairwise_stable, AgentId};

    fn prop(i: usize, ranking: &[usize], quota: usize) -> PreferenceOrder {
        PreferenceOrder::new(AgentId::proposer(i), ranking.to_vec(), quota).unwrap()
    }

    fn recv(i: usize, ranking: &[usize], quota: usize) -> PreferenceOrder {
        PreferenceOrder::new(AgentId::receiver(i), ranking.to_vec(), quota).unwrap()
    }

    #[test]
    fn mutual_first_choice_matches_in_one_round() {
        let (m, trace) = run_deferred_acceptance(&[prop(0, &[0], 1)], &[recv(0, &[0], 1)]).unwrap();
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 0)]);
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn contested_receiver_rejects_weaker_proposer() {
        // v0, v1 both rank s0 ≻ s1 with quota 1; s0 prefers v0; s1 accepts either.
        let props = [prop(0, &[0, 1], 1), prop(1, &[0, 1], 1)];
        let recvs = [recv(0, &[0, 1], 1), recv(1, &[0, 1], 1)];
        let (m, trace) = run_deferred_acceptance(&props, &recvs).unwrap();
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.rounds()[0].rejections, vec![(1, 0)]);
        assert!(trace.rounds()[1].rejections.is_empty());
    }

    #[test]
    fn unacceptable_pairs_never_match() {
        let props = [prop(0, &[1], 2), prop(1, &[0, 1], 2)];
        let recvs = [recv(0, &[0], 2), recv(1, &[0], 2)];
        let (m, _) = run_deferred_acceptance(&props, &recvs).unwrap();
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(is_pairwise_stable(&m, &props, &recvs).is_stable());
    }

    #[test]
    fn empty_instance_terminates_immediately() {
        let (m, trace) = run_deferred_acceptance(&[], &[]).unwrap();
        assert!(m.is_empty());
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn misindexed_orders_are_rejected() {
        let props = [prop(1, &[0], 1)];
        let recvs = [recv(0, &[0], 1)];
        assert!(matches!(run_deferred_acceptance(&props, &recvs), Err(MatchingError::MisplacedOrder { .. })));
    }

    #[test]
    fn rounds_stay_within_rejection_bound() {
        struct OfferAll;
        impl ChoiceFunction for OfferAll {
            fn choose(&self, candidates: &BTreeSet<usize>) -> BTreeSet<usize> {
                candidates.clone()
            }
        }
        // keeps only its lowest-indexed offer, one rejection cascade per round
        struct KeepFirst;
        impl ChoiceFunction for KeepFirst {
            fn choose(&self, candidates: &BTreeSet<usize>) -> BTreeSet<usize> {
                candidates.iter().next().copied().into_iter().collect()
            }
        }
        let props = [OfferAll, OfferAll, OfferAll];
        let recvs = [KeepFirst, KeepFirst];
        let da = DeferredAcceptance::new(&props, &recvs);
        let (m, trace) = da.run().unwrap();
        assert!(trace.len() <= da.round_limit());
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 0), (0, 1)]);
    }
}
