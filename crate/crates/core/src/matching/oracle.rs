//! Brute-force reference for small instances.
//!
//! Enumerates every matching that respects both quotas and pairs only
//! mutually acceptable agents, then keeps those without a blocking pair. The
//! choice rule and the blocking test are re-derived here straight from the
//! rankings so that nothing is shared with the engine or the verifier.

use std::collections::BTreeSet;

use super::{MatchingError, PreferenceOrder};

/// Largest side length the enumeration accepts.
pub const BRUTE_FORCE_MAX_AGENTS: usize = 5;

pub type PairSet = BTreeSet<(usize, usize)>;

fn naive_choice(order: &PreferenceOrder, offered: &BTreeSet<usize>) -> BTreeSet<usize> {
    order
        .ranking()
        .iter()
        .filter(|a| offered.contains(a))
        .take(order.quota())
        .copied()
        .collect()
}

fn blocks(pairs: &PairSet, proposers: &[PreferenceOrder], receivers: &[PreferenceOrder], v: usize, s: usize) -> bool {
    let mut mine: BTreeSet<usize> = pairs.iter().filter(|(pv, _)| *pv == v).map(|&(_, ps)| ps).collect();
    mine.insert(s);
    let mut theirs: BTreeSet<usize> = pairs.iter().filter(|(_, ps)| *ps == s).map(|&(pv, _)| pv).collect();
    theirs.insert(v);
    naive_choice(&proposers[v], &mine).contains(&s) && naive_choice(&receivers[s], &theirs).contains(&v)
}

fn is_stable(pairs: &PairSet, proposers: &[PreferenceOrder], receivers: &[PreferenceOrder]) -> bool {
    (0..proposers.len())
        .flat_map(|v| (0..receivers.len()).map(move |s| (v, s)))
        .filter(|p| !pairs.contains(p))
        .all(|(v, s)| !blocks(pairs, proposers, receivers, v, s))
}

/// Every individually rational, quota-feasible matching of the instance.
pub fn feasible_matchings(
    proposers: &[PreferenceOrder],
    receivers: &[PreferenceOrder],
) -> Result<Vec<PairSet>, MatchingError> {
    let largest = proposers.len().max(receivers.len());
    if largest > BRUTE_FORCE_MAX_AGENTS {
        return Err(MatchingError::UniverseTooLarge { size: largest, guard: BRUTE_FORCE_MAX_AGENTS });
    }
    let candidates: Vec<(usize, usize)> = proposers
        .iter()
        .enumerate()
        .flat_map(|(v, p)| p.ranking().iter().map(move |&s| (v, s)))
        .filter(|&(v, s)| receivers.get(s).is_some_and(|r| r.ranking().contains(&v)))
        .collect();

    let mut out = Vec::new();
    let mut chosen = PairSet::new();
    let mut load_v = vec![0usize; proposers.len()];
    let mut load_s = vec![0usize; receivers.len()];
    extend(0, &candidates, proposers, receivers, &mut chosen, &mut load_v, &mut load_s, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    at: usize,
    candidates: &[(usize, usize)],
    proposers: &[PreferenceOrder],
    receivers: &[PreferenceOrder],
    chosen: &mut PairSet,
    load_v: &mut [usize],
    load_s: &mut [usize],
    out: &mut Vec<PairSet>,
) {
    let Some(&(v, s)) = candidates.get(at) else {
        out.push(chosen.clone());
        return;
    };
    extend(at + 1, candidates, proposers, receivers, chosen, load_v, load_s, out);
    if load_v[v] < proposers[v].quota() && load_s[s] < receivers[s].quota() {
        chosen.insert((v, s));
        load_v[v] += 1;
        load_s[s] += 1;
        extend(at + 1, candidates, proposers, receivers, chosen, load_v, load_s, out);
        load_v[v] -= 1;
        load_s[s] -= 1;
        chosen.remove(&(v, s));
    }
}

/// All pairwise-stable matchings, by exhaustive enumeration.
pub fn stable_matchings(
    proposers: &[PreferenceOrder],
    receivers: &[PreferenceOrder],
) -> Result<Vec<PairSet>, MatchingError> {
    Ok(feasible_matchings(proposers, receivers)?
        .into_iter()
        .filter(|m| is_stable(m, proposers, receivers))
        .collect())
}
