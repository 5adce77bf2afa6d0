//! Proactive video caching in small cell networks as a many-to-many matching
//! game between video-owning servers and storage-limited base stations.
//!
//! The crate is layered bottom-up:
//!
//! - [`matching`]: generic many-to-many deferred acceptance over choice
//!   functions, with verifiers for pairwise stability, substitutability and
//!   the monotonicity of proposal traces, plus a brute-force reference.
//! - [`network`]: seeded generation of the server/base-station/user topology
//!   and of the synthetic social world.
//! - [`popularity`]: social factors and per-base-station local popularity, or
//!   a synthetic Zipf alternative.
//! - [`preferences`]: both sides' rankings and quotas.
//! - [`sim`]: matching and random placements, request serving under link
//!   sharing, and the storage-ratio/request-count experiment sweep.
//! - [`cli`] and [`verify`]: the commands behind the `social-cache` binary.
//!
//! ```
//! use social_cache::matching::{run_deferred_acceptance, is_pairwise_stable, AgentId, PreferenceOrder};
//!
//! let videos = vec![
//!     PreferenceOrder::new(AgentId::proposer(0), vec![0, 1], 1).unwrap(),
//!     PreferenceOrder::new(AgentId::proposer(1), vec![0, 1], 1).unwrap(),
//! ];
//! let stations = vec![
//!     PreferenceOrder::new(AgentId::receiver(0), vec![0, 1], 1).unwrap(),
//!     PreferenceOrder::new(AgentId::receiver(1), vec![1, 0], 1).unwrap(),
//! ];
//! let (matching, trace) = run_deferred_acceptance(&videos, &stations).unwrap();
//! assert_eq!(matching.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
//! assert_eq!(trace.len(), 2);
//! assert!(is_pairwise_stable(&matching, &videos, &stations).is_stable());
//! ```

pub mod cli;
pub mod config;
pub mod matching;
pub mod network;
pub mod popularity;
pub mod preferences;
pub mod rng;
pub mod sim;
pub mod verify;

pub use config::ScenarioConfig;
pub use matching::{Matching, MatchingTrace, PreferenceOrder};
pub use network::World;
pub use sim::{run_experiment, ExperimentResult};
