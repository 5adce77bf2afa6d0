use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ChoiceFunction;

/// One round of deferred acceptance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    /// Per proposer, the receivers it offered itself to: C_v(𝓜, k).
    pub proposals: Vec<BTreeSet<usize>>,
    /// Per receiver, the offers it held this round: 𝒫_s(k).
    pub received: Vec<BTreeSet<usize>>,
    /// (proposer, receiver) pairs rejected this round, sorted.
    pub rejections: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingTrace {
    rounds: Vec<RoundRecord>,
}

impl MatchingTrace {
    pub fn from_rounds(rounds: Vec<RoundRecord>) -> Self {
        MatchingTrace { rounds }
    }

    pub(crate) fn push(&mut self, record: RoundRecord) {
        self.rounds.push(record);
    }

    pub fn rounds(&self) -> &[RoundRecord] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn total_rejections(&self) -> usize {
        self.rounds.iter().map(|r| r.rejections.len()).sum()
    }

    /// Line-oriented log, one round per line.
    pub fn to_log(&self) -> String {
        self.to_string()
    }
}

fn write_sets(f: &mut fmt::Formatter<'_>, own: char, other: char, sets: &[BTreeSet<usize>]) -> fmt::Result {
    let mut first = true;
    for (i, set) in sets.iter().enumerate() {
        if set.is_empty() {
            continue;
        }
        if !first {
            f.write_str(";")?;
        }
        first = false;
        let members: Vec<String> = set.iter().map(|x| format!("{other}{x}")).collect();
        write!(f, "{own}{i}:{{{}}}", members.join(","))?;
    }
    if first {
        f.write_str("-")?;
    }
    Ok(())
}

impl fmt::Display for RoundRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "round={} proposals=", self.round)?;
        write_sets(f, 'v', 's', &self.proposals)?;
        f.write_str(" received=")?;
        write_sets(f, 's', 'v', &self.received)?;
        f.write_str(" rejections=")?;
        if self.rejections.is_empty() {
            f.write_str("-")?;
        }
        let rejections: Vec<String> = self.rejections.iter().map(|(v, s)| format!("(v{v},s{s})")).collect();
        f.write_str(&rejections.join(","))
    }
}

impl fmt::Display for MatchingTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for round in &self.rounds {
            writeln!(f, "{round}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropositionViolation {
    /// Rounds not numbered 0, 1, 2, …
    RoundNumbering { position: usize, found: usize },
    /// s held v's offer at `round` without rejecting it, yet v dropped s at `round + 1`.
    OfferWithdrawn { round: usize, proposer: usize, receiver: usize },
    /// s rejected v at `rejected_at`, but v would be chosen from 𝒫_s(`round`) ∪ {v}.
    RejectionReversed { rejected_at: usize, round: usize, proposer: usize, receiver: usize },
    /// v offered itself again to s after s rejected it.
    Reproposal { rejected_at: usize, round: usize, proposer: usize, receiver: usize },
}

impl PropositionViolation {
    /// Which of the two trace propositions the violation breaks (0 for structure).
    pub fn proposition(&self) -> u8 {
        match self {
            PropositionViolation::RoundNumbering { .. } => 0,
            PropositionViolation::OfferWithdrawn { .. } => 1,
            PropositionViolation::RejectionReversed { .. } | PropositionViolation::Reproposal { .. } => 2,
        }
    }
}

impl fmt::Display for PropositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PropositionViolation::RoundNumbering { position, found } => {
                write!(f, "round at position {position} is numbered {found}")
            }
            PropositionViolation::OfferWithdrawn { round, proposer, receiver } => write!(
                f,
                "offers remain open: s{receiver} kept v{proposer} at round {round} but v{proposer} withdrew at round {}",
                round + 1
            ),
            PropositionViolation::RejectionReversed { rejected_at, round, proposer, receiver } => write!(
                f,
                "rejections are final: s{receiver} rejected v{proposer} at round {rejected_at} but would choose it at round {round}"
            ),
            PropositionViolation::Reproposal { rejected_at, round, proposer, receiver } => write!(
                f,
                "rejections are final: v{proposer} proposed to s{receiver} at round {round} after rejection at round {rejected_at}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceReport {
    pub violations: Vec<PropositionViolation>,
}

impl TraceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a deferred-acceptance trace against the two monotonicity
/// propositions:
///
/// 1. offers remain open: if s ∈ C_v(𝓜, k−1) and s did not reject v at k−1,
///    then s ∈ C_v(𝓜, k);
/// 2. rejections are final: if s rejected v at k, then for every p ≥ k,
///    v ∉ C_s(𝒫_s(p) ∪ {v}), and v never offers itself to s again.
///
/// `receivers` supplies the choice functions C_s used in the second check.
pub fn verify_trace_propositions<R: ChoiceFunction>(trace: &MatchingTrace, receivers: &[R]) -> TraceReport {
    let mut violations = Vec::new();
    let rounds = trace.rounds();

    for (position, record) in rounds.iter().enumerate() {
        if record.round != position {
            violations.push(PropositionViolation::RoundNumbering { position, found: record.round });
        }
    }

    for pair in rounds.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        for (v, offered) in prev.proposals.iter().enumerate() {
            for &s in offered {
                if prev.rejections.binary_search(&(v, s)).is_err()
                    && !next.proposals.get(v).is_some_and(|p| p.contains(&s))
                {
                    violations.push(PropositionViolation::OfferWithdrawn { round: prev.round, proposer: v, receiver: s });
                }
            }
        }
    }

    for (k, record) in rounds.iter().enumerate() {
        for &(v, s) in &record.rejections {
            let Some(receiver) = receivers.get(s) else { continue };
            let empty = BTreeSet::new();
            for (p, later) in rounds.iter().enumerate().skip(k) {
                let offers = later.received.get(s).unwrap_or(&empty);
                if p > k && offers.contains(&v) {
                    violations.push(PropositionViolation::Reproposal {
                        rejected_at: record.round,
                        round: later.round,
                        proposer: v,
                        receiver: s,
                    });
                }
                if receiver.admits(offers, v) {
                    violations.push(PropositionViolation::RejectionReversed {
                        rejected_at: record.round,
                        round: later.round,
                        proposer: v,
                        receiver: s,
                    });
                }
            }
        }
    }

    TraceReport { violations }
}
