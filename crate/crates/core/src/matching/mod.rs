//! Many-to-many matching under quotas.
//!
//! Agents live on two sides: proposers (video instances, acting through the
//! server that owns them) and receivers (small base stations). Each agent
//! holds a [`PreferenceOrder`]: a strict ranking over acceptable agents of the
//! opposite side plus a quota. The quota-truncation rule derived from it is a
//! substitutable [`ChoiceFunction`]; the engine accepts any other choice
//! function as well, which the verifiers use for fault injection.
//!
//! Inside this module agents are addressed by their index on their own side.
//! [`AgentId`] carries the side explicitly where that matters (serialized
//! instances, diagnostics).

mod engine;
pub mod instance;
pub mod oracle;
mod stability;
mod trace;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use engine::{run_deferred_acceptance, DeferredAcceptance};
pub use stability::{check_substitutability, is_pairwise_stable, BlockingPair, Stability, SUBSTITUTABILITY_GUARD};
pub use trace::{verify_trace_propositions, MatchingTrace, PropositionViolation, RoundRecord, TraceReport};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("preference order of {owner} ranks {agent} more than once")]
    DuplicateRanking { owner: AgentId, agent: usize },
    #[error("{owner} ranks {agent}, but only {available} agents exist on the opposite side")]
    UnknownAgent { owner: AgentId, agent: usize, available: usize },
    #[error("preference order at position {position} belongs to {found}, expected {expected}")]
    MisplacedOrder { position: usize, expected: AgentId, found: AgentId },
    #[error("deferred acceptance exceeded {limit} rounds")]
    NonTermination { limit: usize },
    #[error("universe of {size} agents exceeds the exhaustive enumeration guard of {guard}")]
    UniverseTooLarge { size: usize, guard: usize },
    #[error("matching violates its structure: {0}")]
    InvalidMatching(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Proposer,
    Receiver,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Proposer => Side::Receiver,
            Side::Receiver => Side::Proposer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId {
    pub side: Side,
    pub index: usize,
}

impl AgentId {
    pub fn proposer(index: usize) -> Self {
        AgentId { side: Side::Proposer, index }
    }

    pub fn receiver(index: usize) -> Self {
        AgentId { side: Side::Receiver, index }
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Proposer => write!(f, "v{}", self.index),
            Side::Receiver => write!(f, "s{}", self.index),
        }
    }
}

/// Picks the subset of offered partners an agent wants to keep.
///
/// Candidates and results are indices on the opposite side.
pub trait ChoiceFunction {
    fn choose(&self, candidates: &BTreeSet<usize>) -> BTreeSet<usize>;

    /// Whether `candidate` survives when offered alongside `held`, i.e.
    /// `candidate ∈ C(held ∪ {candidate})`.
    fn admits(&self, held: &BTreeSet<usize>, candidate: usize) -> bool {
        let mut offers = held.clone();
        offers.insert(candidate);
        self.choose(&offers).contains(&candidate)
    }
}

impl<C: ChoiceFunction + ?Sized> ChoiceFunction for &C {
    fn choose(&self, candidates: &BTreeSet<usize>) -> BTreeSet<usize> {
        (**self).choose(candidates)
    }

    fn admits(&self, held: &BTreeSet<usize>, candidate: usize) -> bool {
        (**self).admits(held, candidate)
    }
}

/// Strict ranking over acceptable opposite-side agents, with a quota.
///
/// Agents missing from the ranking are unacceptable. A quota of zero is
/// allowed and makes the agent choose nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPreferenceOrder", into = "RawPreferenceOrder")]
pub struct PreferenceOrder {
    owner: AgentId,
    ranking: Vec<usize>,
    quota: usize,
    // position of each opposite-side index in `ranking`
    positions: Vec<Option<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawPreferenceOrder {
    owner: AgentId,
    ranking: Vec<usize>,
    quota: usize,
}

impl TryFrom<RawPreferenceOrder> for PreferenceOrder {
    type Error = MatchingError;

    fn try_from(raw: RawPreferenceOrder) -> Result<Self, Self::Error> {
        PreferenceOrder::new(raw.owner, raw.ranking, raw.quota)
    }
}

impl From<PreferenceOrder> for RawPreferenceOrder {
    fn from(order: PreferenceOrder) -> Self {
        RawPreferenceOrder { owner: order.owner, ranking: order.ranking, quota: order.quota }
    }
}

impl PreferenceOrder {
    pub fn new(owner: AgentId, ranking: Vec<usize>, quota: usize) -> Result<Self, MatchingError> {
        let len = ranking.iter().max().map_or(0, |m| m + 1);
        let mut positions = vec![None; len];
        for (pos, &agent) in ranking.iter().enumerate() {
            if positions[agent].replace(pos).is_some() {
                return Err(MatchingError::DuplicateRanking { owner, agent });
            }
        }
        Ok(PreferenceOrder { owner, ranking, quota, positions })
    }

    pub fn owner(&self) -> AgentId {
        self.owner
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn quota(&self) -> usize {
        self.quota
    }

    /// Rank position of `agent`, `None` when unacceptable.
    pub fn position(&self, agent: usize) -> Option<usize> {
        self.positions.get(agent).copied().flatten()
    }

    pub fn is_acceptable(&self, agent: usize) -> bool {
        self.position(agent).is_some()
    }

    /// `a` strictly preferred to `b`. Unacceptable agents rank below everyone.
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(pa), Some(pb)) => pa < pb,
            (Some(_), None) => true,
            _ => false,
        }
    }
}

impl ChoiceFunction for PreferenceOrder {
    fn choose(&self, candidates: &BTreeSet<usize>) -> BTreeSet<usize> {
        choice_set(self, candidates)
    }

    // Kept iff acceptable and fewer than `quota` held partners rank above it.
    fn admits(&self, held: &BTreeSet<usize>, candidate: usize) -> bool {
        let Some(rank) = self.position(candidate) else { return false };
        let better = held
            .iter()
            .filter(|&&h| h != candidate && self.position(h).is_some_and(|p| p < rank))
            .count();
        better < self.quota
    }
}

/// The `quota` highest-ranked acceptable members of `candidates`.
pub fn choice_set(pref: &PreferenceOrder, candidates: &BTreeSet<usize>) -> BTreeSet<usize> {
    if pref.quota == 0 || candidates.is_empty() {
        return BTreeSet::new();
    }
    let mut ranked: Vec<(usize, usize)> = candidates
        .iter()
        .filter_map(|&c| pref.position(c).map(|p| (p, c)))
        .collect();
    ranked.sort_unstable();
    ranked.into_iter().take(pref.quota).map(|(_, c)| c).collect()
}

/// Checks that `orders[i]` is owned by agent `i` of `side` and that every
/// ranked agent exists on the opposite side.
pub fn validate_orders(orders: &[PreferenceOrder], side: Side, opposite_len: usize) -> Result<(), MatchingError> {
    for (position, order) in orders.iter().enumerate() {
        let expected = AgentId { side, index: position };
        if order.owner != expected {
            return Err(MatchingError::MisplacedOrder { position, expected, found: order.owner });
        }
        if let Some(&agent) = order.ranking.iter().find(|&&a| a >= opposite_len) {
            return Err(MatchingError::UnknownAgent { owner: order.owner, agent, available: opposite_len });
        }
    }
    Ok(())
}

/// A bilateral assignment between proposers and receivers.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Matching {
    proposer_partners: Vec<BTreeSet<usize>>,
    receiver_partners: Vec<BTreeSet<usize>>,
}

impl Matching {
    pub fn empty(proposers: usize, receivers: usize) -> Self {
        Matching {
            proposer_partners: vec![BTreeSet::new(); proposers],
            receiver_partners: vec![BTreeSet::new(); receivers],
        }
    }

    pub fn from_pairs<I>(proposers: usize, receivers: usize, pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = Matching::empty(proposers, receivers);
        for (v, s) in pairs {
            m.insert(v, s);
        }
        m
    }

    pub fn insert(&mut self, proposer: usize, receiver: usize) {
        self.proposer_partners[proposer].insert(receiver);
        self.receiver_partners[receiver].insert(proposer);
    }

    pub fn proposer_count(&self) -> usize {
        self.proposer_partners.len()
    }

    pub fn receiver_count(&self) -> usize {
        self.receiver_partners.len()
    }

    /// µ(v) for a proposer.
    pub fn partners_of_proposer(&self, proposer: usize) -> &BTreeSet<usize> {
        &self.proposer_partners[proposer]
    }

    /// µ(s) for a receiver.
    pub fn partners_of_receiver(&self, receiver: usize) -> &BTreeSet<usize> {
        &self.receiver_partners[receiver]
    }

    pub fn contains(&self, proposer: usize, receiver: usize) -> bool {
        self.proposer_partners.get(proposer).is_some_and(|p| p.contains(&receiver))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.proposer_partners
            .iter()
            .enumerate()
            .flat_map(|(v, ss)| ss.iter().map(move |&s| (v, s)))
    }

    pub fn len(&self) -> usize {
        self.proposer_partners.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Structural check: partner sets stay within the opposite side, quotas
    /// hold on both sides, and s ∈ µ(v) ⇔ v ∈ µ(s).
    pub fn validate(&self, proposers: &[PreferenceOrder], receivers: &[PreferenceOrder]) -> Result<(), MatchingError> {
        let bad = |msg: String| Err(MatchingError::InvalidMatching(msg));
        if self.proposer_partners.len() != proposers.len() || self.receiver_partners.len() != receivers.len() {
            return bad(format!(
                "matching covers {}x{} agents, preferences cover {}x{}",
                self.proposer_partners.len(),
                self.receiver_partners.len(),
                proposers.len(),
                receivers.len()
            ));
        }
        for (v, partners) in self.proposer_partners.iter().enumerate() {
            if partners.len() > proposers[v].quota() {
                return bad(format!("v{v} holds {} partners over quota {}", partners.len(), proposers[v].quota()));
            }
            for &s in partners {
                if s >= receivers.len() {
                    return bad(format!("v{v} matched to unknown receiver s{s}"));
                }
                if !self.receiver_partners[s].contains(&v) {
                    return bad(format!("s{s} in µ(v{v}) but v{v} not in µ(s{s})"));
                }
            }
        }
        for (s, partners) in self.receiver_partners.iter().enumerate() {
            if partners.len() > receivers[s].quota() {
                return bad(format!("s{s} holds {} partners over quota {}", partners.len(), receivers[s].quota()));
            }
            for &v in partners {
                if v >= proposers.len() {
                    return bad(format!("s{s} matched to unknown proposer v{v}"));
                }
                if !self.proposer_partners[v].contains(&s) {
                    return bad(format!("v{v} in µ(s{s}) but s{s} not in µ(v{v})"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.pairs().map(|(v, s)| format!("(v{v},s{s})")).collect();
        write!(f, "{{{}}}", pairs.join(","))
    }
}
