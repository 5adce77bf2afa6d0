//! Preference lists for both sides of the caching game.
//!
//! Base stations rank videos by local popularity. Each video ranks base
//! stations by the time its expected requesters there would need to fetch it:
//! the size over the slower of the backhaul link from its owner and the mean
//! radio capacity of those requesters.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::matching::{AgentId, PreferenceOrder};
use crate::network::{Catalog, Topology, World};
use crate::popularity::{LocalPopularityTable, SocialFactors};

/// Predicted requesters of each video at each SBS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedDemand {
    /// `requesters[sbs][video]`, sorted user indices.
    requesters: Vec<Vec<Vec<usize>>>,
}

impl ExpectedDemand {
    pub fn from_requesters(requesters: Vec<Vec<Vec<usize>>>) -> Self {
        ExpectedDemand { requesters }
    }

    pub fn requesters(&self, sbs: usize, video: usize) -> &[usize] {
        &self.requesters[sbs][video]
    }
}

/// How requesters are predicted.
#[derive(Debug, Clone, Copy)]
pub enum DemandModel<'a> {
    /// Friends of the video's sharer attached to the SBS whose predicted
    /// interest in the video is positive.
    Social(&'a SocialFactors),
    /// Every user attached to the SBS, wherever the video is popular there.
    Zipf,
}

pub fn expected_demand(world: &World, popularity: &LocalPopularityTable, model: DemandModel<'_>) -> ExpectedDemand {
    let users_by_sbs = world.topology.users_by_sbs();
    let videos = world.catalog.len();
    let requesters = users_by_sbs
        .iter()
        .enumerate()
        .map(|(sbs, users)| {
            (0..videos)
                .map(|video| match model {
                    DemandModel::Zipf if popularity.get(sbs, video) > 0.0 => users.clone(),
                    DemandModel::Zipf => Vec::new(),
                    DemandModel::Social(factors) => {
                        let sharer = world.history.sharer_of[video];
                        let category = world.catalog.category[video];
                        world
                            .graph
                            .friends(sharer)
                            .iter()
                            .copied()
                            .filter(|&l| world.topology.serving_sbs(l) == sbs)
                            .filter(|&l| factors.interest(world, l, sharer, category) > 0.0)
                            .collect()
                    }
                })
                .collect()
        })
        .collect();
    ExpectedDemand { requesters }
}

/// Expected download time of `video` from `server` through `sbs`, in time
/// slots: size / min(b_ij, mean radio capacity of the expected requesters).
///
/// `None` when the link is missing or nobody is expected to request the
/// video there, which leaves the SBS out of the video's ranking.
pub fn download_time(
    topology: &Topology,
    catalog: &Catalog,
    demand: &ExpectedDemand,
    server: usize,
    sbs: usize,
    video: usize,
) -> Option<f64> {
    let backhaul = topology.backhaul(server, sbs)?;
    let requesters = demand.requesters(sbs, video);
    if requesters.is_empty() {
        return None;
    }
    let radio: f64 = requesters.iter().map(|&u| topology.radio(sbs, u).expect("requester attached")).sum();
    let mean_radio = radio / requesters.len() as f64;
    Some(catalog.size / backhaul.min(mean_radio))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceProfile {
    /// Receivers: one order over videos per SBS, quota = storage.
    pub sbs_prefs: Vec<PreferenceOrder>,
    /// Proposers: one order over SBSs per video.
    pub video_prefs: Vec<PreferenceOrder>,
}

impl PreferenceProfile {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }
}

/// Indices sorted by score, best first, ties by ascending index.
fn rank_by<F>(mut items: Vec<(usize, f64)>, better: F) -> Vec<usize>
where
    F: Fn(f64, f64) -> Ordering,
{
    items.sort_by(|a, b| better(a.1, b.1).then(a.0.cmp(&b.0)));
    items.into_iter().map(|(i, _)| i).collect()
}

/// SBS m ranks every reachable video by descending P(m, v); videos with zero
/// popularity stay acceptable at the bottom. Video v ranks the SBSs where it
/// has expected requesters by ascending download time, with quota equal to
/// the number of such SBSs, capped at `video_quota_cap`.
pub fn build_preference_profile(
    world: &World,
    popularity: &LocalPopularityTable,
    demand: &ExpectedDemand,
    video_quota_cap: Option<usize>,
) -> PreferenceProfile {
    let topology = &world.topology;
    let catalog = &world.catalog;

    let sbs_prefs = (0..topology.base_station_count())
        .map(|m| {
            let scored = (0..catalog.len())
                .filter(|&v| world.reachable(m, v))
                .map(|v| (v, popularity.get(m, v)))
                .collect();
            let ranking = rank_by(scored, |a, b| b.total_cmp(&a));
            PreferenceOrder::new(AgentId::receiver(m), ranking, topology.storage_quota[m]).expect("distinct videos")
        })
        .collect();

    let video_prefs = (0..catalog.len())
        .map(|v| {
            let owner = catalog.owner[v];
            let scored = (0..topology.base_station_count())
                .filter_map(|m| download_time(topology, catalog, demand, owner, m, v).map(|t| (m, t)))
                .collect();
            let ranking = rank_by(scored, |a, b| a.total_cmp(&b));
            let quota = video_quota_cap.map_or(ranking.len(), |cap| cap.min(ranking.len()));
            PreferenceOrder::new(AgentId::proposer(v), ranking, quota).expect("distinct base stations")
        })
        .collect();

    PreferenceProfile { sbs_prefs, video_prefs }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::network::{SocialGraph, UserHistory};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    /// One server, `radios.len()` SBSs each with the listed UE radio capacities.
    fn world(backhaul: &[f64], radios: &[&[f64]], videos: usize) -> World {
        let mut radio = Vec::new();
        let mut attachment = Vec::new();
        for (j, rs) in radios.iter().enumerate() {
            for &r in *rs {
                radio.push(r);
                attachment.push(j);
            }
        }
        let m = radios.len();
        let n = radio.len();
        World {
            topology: Topology {
                backhaul: vec![backhaul.iter().map(|&b| Some(b)).collect()],
                radio,
                attachment,
                storage_quota: vec![1; m],
                backhaul_budget: backhaul.to_vec(),
                radio_budget: radios.iter().map(|rs| rs.iter().sum()).collect(),
            },
            catalog: Catalog { owner: vec![0; videos], category: vec![0; videos], categories: 1, size: 1.0 },
            graph: SocialGraph::empty(n),
            history: UserHistory::empty(n, 1),
        }
    }

    fn all_users(w: &World, videos: usize) -> ExpectedDemand {
        let by_sbs = w.topology.users_by_sbs();
        ExpectedDemand::from_requesters(by_sbs.iter().map(|us| vec![us.clone(); videos]).collect())
    }

    #[test]
    fn download_time_single_requester() {
        let w = world(&[2.0], &[&[4.0]], 1);
        let d = all_users(&w, 1);
        assert!(close(download_time(&w.topology, &w.catalog, &d, 0, 0, 0).unwrap(), 0.5));
    }

    #[test]
    fn download_time_equal_capacities() {
        let w = world(&[3.0], &[&[3.0]], 1);
        let d = all_users(&w, 1);
        assert!(close(download_time(&w.topology, &w.catalog, &d, 0, 0, 0).unwrap(), 1.0 / 3.0));
    }

    #[test]
    fn download_time_uses_mean_radio() {
        let w = world(&[10.0], &[&[3.0, 5.0]], 1);
        let d = all_users(&w, 1);
        assert!(close(download_time(&w.topology, &w.catalog, &d, 0, 0, 0).unwrap(), 0.25));
    }

    #[test]
    fn download_time_unranked_without_requesters_or_link() {
        let w = world(&[10.0], &[&[3.0]], 1);
        let d = ExpectedDemand::from_requesters(vec![vec![vec![]]]);
        assert_eq!(download_time(&w.topology, &w.catalog, &d, 0, 0, 0), None);
        let mut w = w;
        w.topology.backhaul[0][0] = None;
        assert_eq!(download_time(&w.topology, &w.catalog, &all_users(&w, 1), 0, 0, 0), None);
    }

    #[test]
    fn sbs_ranking_sorts_popularity_with_index_ties() {
        let w = world(&[1.0], &[&[1.0]], 3);
        let p = LocalPopularityTable::from_rows(vec![vec![0.5, 0.9, 0.5]]);
        let profile = build_preference_profile(&w, &p, &all_users(&w, 3), None);
        assert_eq!(profile.sbs_prefs[0].ranking(), &[1, 0, 2]);
    }

    #[test]
    fn zero_popularity_videos_rank_last() {
        let w = world(&[1.0], &[&[1.0]], 3);
        let p = LocalPopularityTable::from_rows(vec![vec![0.0, 0.0, 0.2]]);
        let profile = build_preference_profile(&w, &p, &all_users(&w, 3), None);
        assert_eq!(profile.sbs_prefs[0].ranking(), &[2, 0, 1]);
    }

    #[test]
    fn single_agent_profile_is_singleton() {
        let w = world(&[1.0], &[&[1.0]], 1);
        let p = LocalPopularityTable::from_rows(vec![vec![1.0]]);
        let profile = build_preference_profile(&w, &p, &all_users(&w, 1), None);
        assert_eq!(profile.sbs_prefs[0].ranking(), &[0]);
        assert_eq!(profile.video_prefs[0].ranking(), &[0]);
        assert_eq!(profile.video_prefs[0].quota(), 1);
    }

    #[test]
    fn video_ranks_faster_sbs_first() {
        // T_D at s0 = 1/min(2, 4) = 0.5, at s1 = 1/min(4, 8) = 0.25
        let w = world(&[2.0, 4.0], &[&[4.0], &[8.0]], 1);
        let p = LocalPopularityTable::from_rows(vec![vec![1.0], vec![1.0]]);
        let profile = build_preference_profile(&w, &p, &all_users(&w, 1), None);
        assert_eq!(profile.video_prefs[0].ranking(), &[1, 0]);
        assert_eq!(profile.video_prefs[0].quota(), 2);
        let capped = build_preference_profile(&w, &p, &all_users(&w, 1), Some(1));
        assert_eq!(capped.video_prefs[0].quota(), 1);
    }

    #[test]
    fn zipf_demand_covers_attached_users() {
        let w = world(&[1.0, 1.0], &[&[2.0, 2.0, 2.0, 2.0], &[]], 1);
        let p = LocalPopularityTable::from_rows(vec![vec![0.3], vec![0.7]]);
        let d = expected_demand(&w, &p, DemandModel::Zipf);
        assert_eq!(d.requesters(0, 0), &[0, 1, 2, 3]);
        assert!(d.requesters(1, 0).is_empty());
        assert!(close(download_time(&w.topology, &w.catalog, &d, 0, 0, 0).unwrap(), 1.0));
    }

    #[test]
    fn social_demand_uses_interested_friends() {
        // sharer 0 at SBS 0 with friends 1, 2 at SBS 1 (r = 3, 5); friend 3 at SBS 1 without history
        let mut w = world(&[10.0, 10.0], &[&[1.0], &[3.0, 5.0, 1.0]], 1);
        w.graph = SocialGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        w.history.sharer_of = vec![0];
        for l in [1, 2] {
            w.history.viewed_from[l].insert(0, 1);
            w.history.viewed_by_category[l][0] = 1;
        }
        let factors = SocialFactors::new(0.5).unwrap();
        let p = LocalPopularityTable::from_rows(vec![vec![0.0], vec![0.0]]);
        let d = expected_demand(&w, &p, DemandModel::Social(&factors));
        assert!(d.requesters(0, 0).is_empty());
        assert_eq!(d.requesters(1, 0), &[1, 2]);
        // mean radio 4 < backhaul 10
        assert!(close(download_time(&w.topology, &w.catalog, &d, 0, 1, 0).unwrap(), 0.25));
    }

    proptest! {
        #[test]
        fn scaling_popularity_keeps_ranking(ints in prop::collection::vec(0u32..1000, 1..12), scale in 0.01f64..100.0) {
            let row: Vec<f64> = ints.iter().map(|&x| x as f64).collect();
            let n = row.len();
            let w = world(&[1.0], &[&[1.0]], n);
            let d = all_users(&w, n);
            let a = build_preference_profile(&w, &LocalPopularityTable::from_rows(vec![row.clone()]), &d, None);
            let scaled: Vec<f64> = row.iter().map(|p| p * scale).collect();
            let b = build_preference_profile(&w, &LocalPopularityTable::from_rows(vec![scaled]), &d, None);
            prop_assert_eq!(a.sbs_prefs[0].ranking(), b.sbs_prefs[0].ranking());
        }

        #[test]
        fn faster_backhaul_never_demotes(bs in prop::collection::vec(0.1f64..10.0, 2..6), target in 0usize..6, boost in 1.0f64..10.0) {
            let m = bs.len();
            let target = target % m;
            let radios: Vec<Vec<f64>> = (0..m).map(|j| vec![1.0 + j as f64]).collect();
            let radio_refs: Vec<&[f64]> = radios.iter().map(Vec::as_slice).collect();
            let p = LocalPopularityTable::from_rows(vec![vec![1.0]; m]);
            let w = world(&bs, &radio_refs, 1);
            let before = build_preference_profile(&w, &p, &all_users(&w, 1), None);
            let mut faster = bs.clone();
            faster[target] *= boost;
            let w = world(&faster, &radio_refs, 1);
            let after = build_preference_profile(&w, &p, &all_users(&w, 1), None);
            let pos = |prof: &PreferenceProfile| prof.video_prefs[0].position(target).unwrap();
            prop_assert!(pos(&after) <= pos(&before));
        }
    }
}
