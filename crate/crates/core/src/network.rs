//! Physical and social topology of the caching scenario.
//!
//! Servers (SPSs) reach base stations (SBSs) over backhaul links; each user
//! (UE) is attached to one SBS over a radio link. Alongside sits a synthetic
//! social layer: a friendship graph, per-user sharing and viewing histories,
//! and the catalog of videos with their sharer, owner and category.

use std::collections::{BTreeMap, BTreeSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Connectivity, ScenarioConfig};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("SBS {0} has no backhaul link to any server")]
    IsolatedBaseStation(usize),
    #[error("invalid topology: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    /// `backhaul[i][j]`: capacity of the link from server i to SBS j, if any.
    pub backhaul: Vec<Vec<Option<f64>>>,
    /// Capacity of each user's radio link to its serving SBS.
    pub radio: Vec<f64>,
    /// Serving SBS of each user.
    pub attachment: Vec<usize>,
    /// Per-SBS storage quota, in videos.
    pub storage_quota: Vec<usize>,
    /// Per-SBS aggregate backhaul budget before the per-link split.
    pub backhaul_budget: Vec<f64>,
    /// Per-SBS aggregate radio budget before the per-link split.
    pub radio_budget: Vec<f64>,
}

impl Topology {
    pub fn server_count(&self) -> usize {
        self.backhaul.len()
    }

    pub fn base_station_count(&self) -> usize {
        self.storage_quota.len()
    }

    pub fn user_count(&self) -> usize {
        self.attachment.len()
    }

    pub fn backhaul(&self, server: usize, sbs: usize) -> Option<f64> {
        self.backhaul.get(server).and_then(|row| row.get(sbs)).copied().flatten()
    }

    /// r_jn, defined only for the user's serving SBS.
    pub fn radio(&self, sbs: usize, user: usize) -> Option<f64> {
        (self.attachment.get(user) == Some(&sbs)).then(|| self.radio[user])
    }

    pub fn serving_sbs(&self, user: usize) -> usize {
        self.attachment[user]
    }

    /// Users attached to each SBS, in index order.
    pub fn users_by_sbs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.base_station_count()];
        for (user, &sbs) in self.attachment.iter().enumerate() {
            out[sbs].push(user);
        }
        out
    }

    pub fn set_uniform_storage_quota(&mut self, quota: usize) {
        self.storage_quota.iter_mut().for_each(|q| *q = quota);
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        let m = self.base_station_count();
        let invalid = |msg: String| Err(NetworkError::Invalid(msg));
        if self.backhaul.iter().any(|row| row.len() != m) {
            return invalid("backhaul table is not servers x base stations".into());
        }
        if self.radio.len() != self.attachment.len() {
            return invalid("radio capacities do not cover every user".into());
        }
        if let Some(u) = self.attachment.iter().position(|&s| s >= m) {
            return invalid(format!("user {u} attached to unknown SBS"));
        }
        let positive = |c: f64| c.is_finite() && c > 0.0;
        if self.backhaul.iter().flatten().flatten().any(|&c| !positive(c)) {
            return invalid("backhaul capacities must be positive".into());
        }
        if self.radio.iter().any(|&c| !positive(c)) {
            return invalid("radio capacities must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    /// Owning server of each video.
    pub owner: Vec<usize>,
    /// Category of each video, in `0..categories`.
    pub category: Vec<usize>,
    pub categories: usize,
    /// Uniform video size in Mbit.
    pub size: f64,
}

impl Catalog {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }
}

/// Undirected friendship graph over users.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocialGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl SocialGraph {
    pub fn empty(users: usize) -> Self {
        SocialGraph { adjacency: vec![BTreeSet::new(); users] }
    }

    /// Builds a graph from undirected edges; self-loops are dropped.
    pub fn from_edges(users: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = SocialGraph::empty(users);
        for (a, b) in edges {
            g.add_friendship(a, b);
        }
        g
    }

    pub fn add_friendship(&mut self, a: usize, b: usize) {
        if a != b {
            self.adjacency[a].insert(b);
            self.adjacency[b].insert(a);
        }
    }

    pub fn user_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn friends(&self, user: usize) -> &BTreeSet<usize> {
        &self.adjacency[user]
    }

    /// F_l.
    pub fn degree(&self, user: usize) -> usize {
        self.adjacency[user].len()
    }

    pub fn are_friends(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(a).is_some_and(|f| f.contains(&b))
    }

    pub fn is_symmetric(&self) -> bool {
        self.adjacency
            .iter()
            .enumerate()
            .all(|(a, fs)| !fs.contains(&a) && fs.iter().all(|&b| self.adjacency[b].contains(&a)))
    }
}

/// Sharing and viewing counts per user.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserHistory {
    /// `viewed_from[l][n]` = α_ln, videos shared by n and viewed by l.
    pub viewed_from: Vec<BTreeMap<usize, u32>>,
    /// `shared_by_category[l][g]` = S_gl.
    pub shared_by_category: Vec<Vec<u32>>,
    /// `viewed_by_category[l][g]` = V_gl.
    pub viewed_by_category: Vec<Vec<u32>>,
    /// User who shared each video.
    pub sharer_of: Vec<usize>,
}

impl UserHistory {
    pub fn empty(users: usize, categories: usize) -> Self {
        UserHistory {
            viewed_from: vec![BTreeMap::new(); users],
            shared_by_category: vec![vec![0; categories]; users],
            viewed_by_category: vec![vec![0; categories]; users],
            sharer_of: Vec::new(),
        }
    }

    pub fn alpha(&self, viewer: usize, sharer: usize) -> u32 {
        self.viewed_from[viewer].get(&sharer).copied().unwrap_or(0)
    }

    pub fn total_shares(&self, user: usize) -> u32 {
        self.shared_by_category[user].iter().sum()
    }

    /// H_l, the size of the user's viewing history.
    pub fn total_views(&self, user: usize) -> u32 {
        self.viewed_by_category[user].iter().sum()
    }
}

/// Everything the preference and simulation layers read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub topology: Topology,
    pub catalog: Catalog,
    pub graph: SocialGraph,
    pub history: UserHistory,
}

impl World {
    /// JSON snapshot for replay and cross-implementation comparison.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("world serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Whether the video's owner reaches `sbs` over the backhaul.
    pub fn reachable(&self, sbs: usize, video: usize) -> bool {
        self.topology.backhaul(self.catalog.owner[video], sbs).is_some()
    }
}

/// Splits B equally over SBSs and each SBS's share equally over its servers;
/// R likewise over SBSs and then over attached users.
pub fn generate_topology(config: &ScenarioConfig, seed: u64) -> Result<Topology, NetworkError> {
    let (k, m, n) = (config.servers, config.base_stations, config.users);
    let mut rng = stream_rng(seed, Stream::Topology);

    let links: Vec<Vec<bool>> = match config.connectivity {
        Connectivity::Complete => vec![vec![true; m]; k],
        Connectivity::Random(p) => (0..k).map(|_| (0..m).map(|_| rng.gen_bool(p)).collect()).collect(),
    };
    let backhaul_budget = vec![config.backhaul_total / m as f64; m];
    let mut backhaul = vec![vec![None; m]; k];
    for j in 0..m {
        let connected = (0..k).filter(|&i| links[i][j]).count();
        if connected == 0 {
            return Err(NetworkError::IsolatedBaseStation(j));
        }
        for i in (0..k).filter(|&i| links[i][j]) {
            backhaul[i][j] = Some(backhaul_budget[j] / connected as f64);
        }
    }

    let attachment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    let radio_budget = vec![config.radio_total / m as f64; m];
    let mut attached = vec![0usize; m];
    attachment.iter().for_each(|&j| attached[j] += 1);
    let radio = attachment.iter().map(|&j| radio_budget[j] / attached[j] as f64).collect();

    let topology = Topology {
        backhaul,
        radio,
        attachment,
        storage_quota: vec![config.videos; m],
        backhaul_budget,
        radio_budget,
    };
    topology.validate()?;
    Ok(topology)
}

fn zipf_weights(len: usize, exponent: f64) -> Vec<f64> {
    (1..=len).map(|rank| (rank as f64).powf(-exponent)).collect()
}

fn category_affinity(rng: &mut ChaCha8Rng, categories: usize, exponent: f64) -> Vec<f64> {
    let weights = zipf_weights(categories, exponent);
    let mut order: Vec<usize> = (0..categories).collect();
    order.shuffle(rng);
    let mut affinity = vec![0.0; categories];
    for (rank, &g) in order.iter().enumerate() {
        affinity[g] = weights[rank];
    }
    affinity
}

/// Friendship graph, sharing/viewing histories and catalog.
///
/// Friendships are Erdős–Rényi. Each user gets a Zipf-shaped category
/// affinity; shares are drawn from it. A user views each share of each friend
/// with a per-pair probability, so α_ln never exceeds n's total shares, and
/// each such view is counted under the category of the share. A few extra
/// views outside the friend graph follow the user's own affinity. Videos get
/// a uniform sharer, a category drawn from the sharer's shares (or affinity
/// when it never shared) and a uniform owner server.
pub fn generate_social_world(
    config: &ScenarioConfig,
    topology: &Topology,
    seed: u64,
) -> (SocialGraph, UserHistory, Catalog) {
    let n = topology.user_count();
    let g = config.categories;
    let social = &config.social;

    let mut rng = stream_rng(seed, Stream::SocialGraph);
    let mut graph = SocialGraph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(social.friendship_probability) {
                graph.add_friendship(a, b);
            }
        }
    }

    let mut rng = stream_rng(seed, Stream::History);
    let affinity: Vec<Vec<f64>> = (0..n).map(|_| category_affinity(&mut rng, g, social.category_exponent)).collect();
    let mut history = UserHistory::empty(n, g);
    for (user, aff) in affinity.iter().enumerate() {
        let pick = WeightedIndex::new(aff).expect("positive affinity");
        for _ in 0..rng.gen_range(0..=social.max_shares) {
            history.shared_by_category[user][pick.sample(&mut rng)] += 1;
        }
    }
    for viewer in 0..n {
        for &sharer in graph.friends(viewer) {
            let shares = history.total_shares(sharer);
            if shares == 0 {
                continue;
            }
            let p: f64 = rng.gen();
            let by_category = WeightedIndex::new(&history.shared_by_category[sharer]).expect("sharer has shares");
            let mut viewed = 0;
            for _ in 0..shares {
                if rng.gen_bool(p) {
                    viewed += 1;
                    history.viewed_by_category[viewer][by_category.sample(&mut rng)] += 1;
                }
            }
            if viewed > 0 {
                history.viewed_from[viewer].insert(sharer, viewed);
            }
        }
        let own = WeightedIndex::new(&affinity[viewer]).expect("positive affinity");
        for _ in 0..rng.gen_range(0..=social.max_extra_views) {
            history.viewed_by_category[viewer][own.sample(&mut rng)] += 1;
        }
    }

    let mut rng = stream_rng(seed, Stream::Catalog);
    let mut owner = Vec::with_capacity(config.videos);
    let mut category = Vec::with_capacity(config.videos);
    for _ in 0..config.videos {
        let sharer = rng.gen_range(0..n);
        let weights: Vec<f64> = if history.total_shares(sharer) > 0 {
            history.shared_by_category[sharer].iter().map(|&c| c as f64).collect()
        } else {
            affinity[sharer].clone()
        };
        category.push(WeightedIndex::new(&weights).expect("positive weights").sample(&mut rng));
        history.sharer_of.push(sharer);
        owner.push(rng.gen_range(0..topology.server_count()));
    }
    let catalog = Catalog { owner, category, categories: g, size: config.video_size };
    (graph, history, catalog)
}

pub fn generate_world(config: &ScenarioConfig, seed: u64) -> Result<World, NetworkError> {
    let topology = generate_topology(config, seed)?;
    let (graph, history, catalog) = generate_social_world(config, &topology, seed);
    Ok(World { topology, catalog, graph, history })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(k: usize, m: usize, n: usize) -> ScenarioConfig {
        ScenarioConfig { servers: k, base_stations: m, users: n, videos: 5, ..ScenarioConfig::default() }
    }

    #[test]
    fn single_link_gets_whole_budgets() {
        let t = generate_topology(&small(1, 1, 1), 0).unwrap();
        assert_eq!(t.backhaul(0, 0), Some(80.0));
        assert_eq!(t.radio(0, 0), Some(180.0));
    }

    #[test]
    fn reference_topology_conserves_budgets() {
        let config = ScenarioConfig::default();
        let t = generate_topology(&config, 7).unwrap();
        assert_eq!(t.user_count(), 400);
        assert!(t.attachment.iter().all(|&j| j < 150));
        let radio: f64 = t.radio_budget.iter().sum();
        let backhaul: f64 = t.backhaul_budget.iter().sum();
        assert!((radio - 180.0).abs() < 1e-9);
        assert!((backhaul - 80.0).abs() < 1e-9);
        // per-link split sums back to each SBS budget
        for j in 0..150 {
            let links: f64 = (0..80).filter_map(|i| t.backhaul(i, j)).sum();
            assert!((links - t.backhaul_budget[j]).abs() < 1e-12);
        }
        let max_backhaul = t.backhaul.iter().flatten().flatten().cloned().fold(0.0, f64::max);
        let min_radio = t.radio.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max_backhaul < min_radio);
    }

    #[test]
    fn same_seed_same_world() {
        let config = ScenarioConfig { users: 60, ..small(4, 6, 60) };
        assert_eq!(generate_world(&config, 3).unwrap(), generate_world(&config, 3).unwrap());
        assert_ne!(generate_world(&config, 3).unwrap(), generate_world(&config, 4).unwrap());
    }

    #[test]
    fn random_connectivity_rejects_isolated_sbs() {
        let config = ScenarioConfig { connectivity: Connectivity::Random(1e-9), ..small(2, 3, 4) };
        assert!(matches!(generate_topology(&config, 0), Err(NetworkError::IsolatedBaseStation(_))));
        let config = ScenarioConfig { connectivity: Connectivity::Random(0.5), ..small(20, 3, 4) };
        let t = generate_topology(&config, 0).unwrap();
        assert!(t.backhaul.iter().flatten().any(Option::is_none));
    }

    #[test]
    fn friendship_extremes() {
        let mut config = small(1, 1, 3);
        config.social.friendship_probability = 0.0;
        let world = generate_world(&config, 1).unwrap();
        assert!((0..3).all(|u| world.graph.degree(u) == 0));
        config.social.friendship_probability = 1.0;
        let world = generate_world(&config, 1).unwrap();
        assert!((0..3).all(|u| world.graph.degree(u) == 2));
    }

    #[test]
    fn default_social_world_is_consistent() {
        let config = ScenarioConfig::default();
        let world = generate_world(&config, 11).unwrap();
        assert!(world.graph.is_symmetric());
        let h = &world.history;
        for l in 0..config.users {
            for (&n, &alpha) in &h.viewed_from[l] {
                assert!(world.graph.are_friends(l, n));
                assert!(alpha <= h.total_shares(n));
            }
            let friend_views: u32 = h.viewed_from[l].values().sum();
            assert!(friend_views <= h.total_views(l));
        }
        assert_eq!(h.sharer_of.len(), config.videos);
        assert!(world.catalog.category.iter().all(|&g| g < config.categories));
        assert!(world.catalog.owner.iter().all(|&i| i < config.servers));
    }

    #[test]
    fn snapshot_round_trips() {
        let world = generate_world(&small(2, 3, 10), 5).unwrap();
        assert_eq!(World::from_json(&world.to_json()).unwrap(), world);
    }
}
